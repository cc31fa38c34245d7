"""The 24 axis-aligned rotations, with stable names.

Names are built as ``ry<deg>`` (spin about the vertical axis) composed with
one of six "up" orientations (``rx90``, ``rx180``, ``rx270``, ``rz90``,
``rz270``).  ``ry90_rx90`` means: apply ``rx90`` first, then ``ry90``.
"""
from __future__ import annotations

import numpy as np

_AXES = {"x": 0, "y": 1, "z": 2}


def axis_rotation(axis: str, degrees: int) -> np.ndarray:
    """Integer rotation matrix for a multiple of 90 degrees about one axis."""
    if degrees % 90:
        raise ValueError(f"rotation must be a multiple of 90 degrees, got {degrees}")
    q = (degrees // 90) % 4
    c = [1, 0, -1, 0][q]
    s = [0, 1, 0, -1][q]
    i = _AXES[axis]
    j, k = [(1, 2), (2, 0), (0, 1)][i]
    m = np.eye(3, dtype=int)
    m[j, j] = c
    m[j, k] = -s
    m[k, j] = s
    m[k, k] = c
    return m


def _build_group() -> dict[str, np.ndarray]:
    ups = ["", "rx90", "rx180", "rx270", "rz90", "rz270"]
    group: dict[str, np.ndarray] = {}
    for up in ups:
        base = np.eye(3, dtype=int)
        if up:
            base = axis_rotation(up[1], int(up[2:]))
        for k in range(4):
            spin = axis_rotation("y", 90 * k)
            tokens = ([f"ry{90 * k}"] if k else []) + ([up] if up else [])
            name = "_".join(tokens) or "identity"
            group[name] = spin @ base
    return group


ROTATIONS: dict[str, np.ndarray] = _build_group()
ROTATION_NAMES: tuple[str, ...] = tuple(ROTATIONS)

_BY_KEY = {tuple(m.ravel()): name for name, m in ROTATIONS.items()}
assert len(_BY_KEY) == 24


def rotation_matrix(name: str) -> np.ndarray:
    """Matrix for a rotation name.

    Besides the 24 canonical names, any ``_``-joined chain of ``r<axis><deg>``
    tokens is accepted and composed right-to-left.
    """
    if name in ROTATIONS:
        return ROTATIONS[name].copy()
    m = np.eye(3, dtype=int)
    for token in name.split("_"):
        if len(token) < 3 or token[0] != "r" or token[1] not in _AXES:
            raise ValueError(f"unknown rotation {name!r}")
        try:
            deg = int(token[2:])
        except ValueError:
            raise ValueError(f"unknown rotation {name!r}") from None
        m = m @ axis_rotation(token[1], deg)
    return m


def canonical_name(name: str) -> str:
    return rotation_name(rotation_matrix(name))


def rotation_name(matrix, atol: float = 1e-6) -> str:
    """Canonical name of a matrix from the group; ValueError if it is not one."""
    m = np.asarray(matrix, dtype=float).reshape(3, 3)
    r = np.rint(m)
    if np.max(np.abs(m - r)) > atol:
        raise ValueError("rotation is not axis-aligned")
    key = tuple(int(v) for v in r.ravel())
    try:
        return _BY_KEY[key]
    except KeyError:
        raise ValueError("matrix is not one of the 24 axis-aligned rotations") from None
