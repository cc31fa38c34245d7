"""Box-level part shapes and the built-in part dictionary."""
from __future__ import annotations

from dataclasses import dataclass

BRICK_HEIGHT = 24
PLATE_HEIGHT = 8
STUD = 20
LDU_MM = 0.4


@dataclass(frozen=True)
class PartShape:
    """Axis-aligned box of ``extent = (width, depth, height)`` LDU.

    Width runs along local x, depth along local z and height along local +y.
    The local origin sits at the centre of the bottom face.
    """

    shape_id: str
    extent: tuple[int, int, int]

    def __post_init__(self):
        ext = tuple(int(v) for v in self.extent)
        if len(ext) != 3 or min(ext) < 1:
            raise ValueError(f"shape {self.shape_id!r}: extents must be >= 1 LDU, got {self.extent}")
        object.__setattr__(self, "extent", ext)

    @property
    def size_xyz(self) -> tuple[int, int, int]:
        w, d, h = self.extent
        return (w, h, d)


def _brick(w, d):
    return (STUD * w, STUD * d, BRICK_HEIGHT)


def _plate(w, d):
    return (STUD * w, STUD * d, PLATE_HEIGHT)


# LDraw part numbers; width is the long side as modelled along x.
PART_DICTIONARY: dict[str, PartShape] = {
    sid: PartShape(sid, ext)
    for sid, ext in {
        "3005": _brick(1, 1),
        "3004": _brick(2, 1),
        "3622": _brick(3, 1),
        "3010": _brick(4, 1),
        "3009": _brick(6, 1),
        "3008": _brick(8, 1),
        "3003": _brick(2, 2),
        "3002": _brick(3, 2),
        "3001": _brick(4, 2),
        "2456": _brick(6, 2),
        "3007": _brick(8, 2),
        "3006": _brick(10, 2),
        "3024": _plate(1, 1),
        "3023": _plate(2, 1),
        "3623": _plate(3, 1),
        "3710": _plate(4, 1),
        "3022": _plate(2, 2),
        "3021": _plate(3, 2),
        "3020": _plate(4, 2),
        "3795": _plate(6, 2),
        "3034": _plate(8, 2),
        "3031": _plate(4, 4),
        "3958": _plate(6, 6),
        "3068b": _plate(2, 2),
    }.items()
}


def normalize_shape_id(raw: str) -> str:
    sid = raw.strip().lower().replace("\\", "/").rsplit("/", 1)[-1]
    if sid.endswith(".dat"):
        sid = sid[:-4]
    return sid


def lookup_shape(raw: str, extra: dict[str, PartShape] | None = None) -> PartShape:
    """Resolve a shape id against ``extra`` first, then the built-in dictionary.

    Raises KeyError for ids that neither knows.
    """
    if extra:
        if raw in extra:
            return extra[raw]
        sid = normalize_shape_id(raw)
        if sid in extra:
            return extra[sid]
    sid = normalize_shape_id(raw)
    return PART_DICTIONARY[sid]
