"""Threshold-based stand-in recognizer and pixel alignment measurements."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .metrics import DEFAULT_RESOLUTION, ViewpointSet, confusability
from .model import PartPlacement
from .shapes import LDU_MM

ORTHONORMAL_TOL = 1e-9


@dataclass(frozen=True)
class CameraModel:
    focal_px: float = 1400.0
    resolution: tuple[int, int] = (1792, 828)
    principal_point: tuple[float, float] | None = None  # None: image centre

    def __post_init__(self):
        if not self.focal_px > 0:
            raise ValueError("focal_px must be positive")
        w, h = self.resolution
        if w <= 0 or h <= 0:
            raise ValueError("resolution must be positive")
        if self.principal_point is None:
            object.__setattr__(self, "principal_point", (w / 2.0, h / 2.0))
        px, py = self.principal_point
        if not (0 <= px <= w and 0 <= py <= h):
            raise ValueError(f"principal point {self.principal_point} lies outside the {w}x{h} image")

    def project(self, points: np.ndarray) -> np.ndarray:
        """Camera-frame points (..., 3) in mm to pixels (..., 2)."""
        z = points[..., 2]
        if np.any(z <= 0):
            raise ValueError("point behind the camera (z <= 0)")
        px, py = self.principal_point
        return np.stack([self.focal_px * points[..., 0] / z + px, self.focal_px * points[..., 1] / z + py], axis=-1)


@dataclass(frozen=True)
class Pose:
    rotation: np.ndarray = field(repr=False)
    translation: tuple[float, float, float] = (0.0, 0.0, 0.0)  # mm, camera frame, z forward

    def __post_init__(self):
        r = np.array(self.rotation, dtype=float)
        if r.shape != (3, 3):
            raise ValueError("rotation must be 3x3")
        if np.abs(r.T @ r - np.eye(3)).max() > ORTHONORMAL_TOL:
            raise ValueError("rotation is not orthonormal")
        if np.linalg.det(r) < 0:
            raise ValueError("rotation has determinant -1")
        r.setflags(write=False)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", tuple(float(v) for v in self.translation))

    @classmethod
    def from_row(cls, values: Sequence[float]) -> "Pose":
        """Twelve numbers: row-major rotation then translation."""
        if len(values) != 12:
            raise ValueError(f"a pose row needs 12 numbers, got {len(values)}")
        return cls(np.reshape(np.asarray(values[:9], dtype=float), (3, 3)), tuple(values[9:]))

    def apply(self, points_mm: np.ndarray) -> np.ndarray:
        return points_mm @ self.rotation.T + np.asarray(self.translation)


def rotation_z(degrees: float) -> np.ndarray:
    c, s = math.cos(math.radians(degrees)), math.sin(math.radians(degrees))
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


# --- recognition ----------------------------------------------------------------


@dataclass(frozen=True)
class TrackerParams:
    t_max: int = 40
    theta_iou: float = 0.5
    theta_amb: float = 0.9
    occlusion_limit: float = 0.66
    z_rotation_limit: float = 90.0
    resolution: float = DEFAULT_RESOLUTION

    def __post_init__(self):
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        for name in ("theta_iou", "theta_amb", "occlusion_limit"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not self.z_rotation_limit > 0:
            raise ValueError("z_rotation_limit must be positive")
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")


@dataclass(frozen=True)
class Registered:
    phase: int


@dataclass(frozen=True)
class Ambiguous:
    phases: tuple[int, ...]

    def __post_init__(self):
        if len(self.phases) < 2:
            raise ValueError("Ambiguous needs at least two phases")


@dataclass(frozen=True)
class NotRecognized:
    pass


def occlusion_stability(fraction: float, params: TrackerParams = TrackerParams()) -> bool:
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("occlusion fraction must lie in [0, 1]")
    return fraction <= params.occlusion_limit


def recognize(current_step: int, active_targets: Sequence[tuple[int, int]], parts: Sequence[PartPlacement],
              params: TrackerParams = TrackerParams(), occlusion_fraction: float = 0.0,
              z_rotation_deg: float = 0.0, views: ViewpointSet | None = None):
    """Simulated recognition of the physical prefix ``parts[:current_step]``.

    ``active_targets`` holds ``(phase_id, target_prefix_step)`` pairs and
    ``parts`` is the placement sequence in build order.
    """
    if not active_targets:
        raise ValueError("at least one active target is required")
    parts = list(parts)
    views = views or ViewpointSet.default()
    if not occlusion_stability(occlusion_fraction, params) or abs(z_rotation_deg) > params.z_rotation_limit:
        return NotRecognized()
    physical = parts[:current_step]
    passing = []
    for phase, prefix_step in sorted(active_targets):
        if abs(current_step - prefix_step) > params.t_max:
            continue
        if confusability(physical, parts[:prefix_step], views, params.resolution) >= params.theta_iou:
            passing.append((phase, prefix_step))
    if not passing:
        return NotRecognized()
    if len(passing) == 1:
        return Registered(passing[0][0])
    confused = set()
    for i, (pa, sa) in enumerate(passing):
        for pb, sb in passing[i + 1:]:
            if confusability(parts[:sa], parts[:sb], views, params.resolution) >= params.theta_amb:
                confused.update((pa, pb))
    if len(confused) >= 2:
        return Ambiguous(tuple(sorted(confused)))
    return Registered(min(passing, key=lambda t: (abs(current_step - t[1]), t[0]))[0])


# --- reprojection ----------------------------------------------------------------

# the twelve AABB edges as corner-index pairs; corner bits are (x, y, z)
_EDGES = tuple(
    (a, a | (1 << bit)) for bit in (2, 1, 0) for a in range(8) if not a & (1 << bit)
)


def _edge_endpoints(boxes_ldu: np.ndarray) -> np.ndarray:
    """(k, 12, 2, 3) edge endpoints in mm."""
    corners = np.array([[(c >> 2) & 1, (c >> 1) & 1, c & 1] for c in range(8)])
    pts = boxes_ldu[:, corners, np.arange(3)] * LDU_MM  # (k, 8, 3)
    idx = np.array(_EDGES)
    return pts[:, idx, :]


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = np.einsum("...i,...i->...", ab, ab)
    t = np.where(denom > 0, np.einsum("...i,...i->...", p - a, ab) / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.linalg.norm(p - (a + t[..., None] * ab), axis=-1)


@dataclass(frozen=True)
class ReprojectionGap:
    mean_px: float
    max_px: float


def _as_boxes(prefix) -> np.ndarray:
    if isinstance(prefix, np.ndarray):
        boxes = np.asarray(prefix, dtype=float)
    else:
        parts = list(prefix)
        if not parts:
            raise ValueError("prefix must contain at least one part")
        boxes = np.stack([p.box for p in parts])
    if boxes.ndim != 3 or boxes.shape[1:] != (2, 3) or len(boxes) == 0:
        raise ValueError("boxes must have shape (k, 2, 3) with k >= 1")
    return boxes


def reprojection_gap(pose_true: Pose, pose_est: Pose, camera: CameraModel, prefix,
                     samples_per_edge: int = 10) -> ReprojectionGap:
    """Pixel distance from true-pose edge samples to the estimated-pose edges.

    ``prefix`` is a sequence of placements or a (k, 2, 3) array of LDU boxes.
    Samples include both edge endpoints.
    """
    if samples_per_edge < 2:
        raise ValueError("samples_per_edge must be >= 2")
    edges = _edge_endpoints(_as_boxes(prefix))  # (k, 12, 2, 3) mm
    t = np.linspace(0.0, 1.0, samples_per_edge)
    a, b = edges[:, :, 0, :], edges[:, :, 1, :]
    samples = a[:, :, None, :] + t[None, None, :, None] * (b - a)[:, :, None, :]  # (k, 12, s, 3)
    true_px = camera.project(pose_true.apply(samples))
    est_a = camera.project(pose_est.apply(a))[:, :, None, :]
    est_b = camera.project(pose_est.apply(b))[:, :, None, :]
    # the corresponding estimated sample lies on the segment, so taking the
    # minimum changes nothing except making equal poses give exactly zero
    est_px = camera.project(pose_est.apply(samples))
    gaps = np.minimum(_point_segment_distance(true_px, est_a, est_b), np.linalg.norm(true_px - est_px, axis=-1))
    return ReprojectionGap(float(gaps.mean()), float(gaps.max()))
