"""Small reference models and the 386-step phase-schedule fixture."""
from __future__ import annotations

from .model import AssemblyModel, PartPlacement, build_model
from .plan_format import InstructionPlan, build_plan
from .shapes import PART_DICTIONARY, PartShape

SCHEDULE_PART_COUNT = 386
SCHEDULE_BOUNDARIES = (105, 129, 165, 226)


def _model(specs, color=4) -> AssemblyModel:
    parts = []
    for i, spec in enumerate(specs, start=1):
        sid, rot, pos = spec[:3]
        step = spec[3] if len(spec) > 3 else 1
        shape = sid if isinstance(sid, PartShape) else PART_DICTIONARY[sid]
        parts.append(PartPlacement(i, shape, color, rot, pos, step))
    return build_model(parts)


def tower(n: int = 5, shape: str = "3003") -> AssemblyModel:
    h = PART_DICTIONARY[shape].extent[2]
    return _model([(shape, "identity", (0, h * i, 0), i + 1) for i in range(n)])


def pyramid(base_plate: bool = False) -> AssemblyModel:
    """Three 1x4 rows, two crosswise 2x4s on them, one 2x4 on top: 8 contacts.

    With ``base_plate`` the rows stand on a 6x6 plate, which makes the model
    buildable as a single connected piece.
    """
    y = 8 if base_plate else 0
    specs = [("3958", "identity", (0, 0, 0))] if base_plate else []
    specs += [
        ("3010", "identity", (0, y, -20)),
        ("3010", "identity", (0, y, 0)),
        ("3010", "identity", (0, y, 20)),
        ("3001", "ry90", (-20, y + 24, 0)),
        ("3001", "ry90", (20, y + 24, 0)),
        ("3001", "identity", (0, y + 48, 0)),
    ]
    return _model(specs)


def bridge() -> AssemblyModel:
    """Two 2-brick piers and a 2x8 deck across them."""
    return _model([
        ("3003", "identity", (-60, 0, 0)),
        ("3003", "identity", (-60, 24, 0)),
        ("3003", "identity", (60, 0, 0)),
        ("3003", "identity", (60, 24, 0)),
        ("3007", "identity", (0, 48, 0)),
    ])


def twin_towers(height: int = 3) -> AssemblyModel:
    """A 2x8 base plate carrying two 2x2 towers at its ends."""
    specs = [("3034", "identity", (0, 0, 0))]
    for x in (-60, 60):
        specs += [("3003", "identity", (x, 8 + 24 * i, 0)) for i in range(height)]
    return _model(specs)


def l_model() -> AssemblyModel:
    """Twelve parts: a 6x6 base plate carrying an L-shaped wall four courses high."""
    return _model([
        ("3958", "identity", (0, 0, 0), 1),
        ("3001", "identity", (-20, 8, -40), 2),
        ("3003", "identity", (40, 8, -40), 2),
        ("3001", "ry90", (-40, 8, 20), 2),
        ("3003", "identity", (-40, 32, -40), 3),
        ("3001", "identity", (20, 32, -40), 3),
        ("3003", "identity", (-40, 32, 0), 3),
        ("3003", "identity", (-40, 32, 40), 3),
        ("3001", "identity", (-20, 56, -40), 4),
        ("3003", "identity", (40, 56, -40), 4),
        ("3001", "ry90", (-40, 56, 20), 4),
        ("3003", "identity", (-40, 80, -40), 5),
    ])


def wall(n: int, row_length: int = 8) -> AssemblyModel:
    """Running-bond wall of 1x2 bricks, ``row_length`` bricks per course."""
    specs = []
    for i in range(n):
        course, slot = divmod(i, row_length)
        x = 40 * slot + (20 if course % 2 else 0)
        specs.append(("3004", "identity", (x, 24 * course, 0), course + 1))
    return _model(specs)


def long_schedule_plan() -> InstructionPlan:
    """A 386-step plan with the ground-plane bootstrap over steps 1..104 and
    model-target phases starting at 105, 129, 165 and 226."""
    model = wall(SCHEDULE_PART_COUNT)
    return build_plan(model, list(range(1, SCHEDULE_PART_COUNT + 1)), SCHEDULE_BOUNDARIES)
