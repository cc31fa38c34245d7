"""InstructionPlan: the planner/runtime contract and its canonical JSON form.

Files use the ``.plan.json`` extension.  Keys are sorted and separators carry
no whitespace, so equal plans serialize to identical bytes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Sequence

import jsonschema

from .model import AssemblyModel
from .rotations import ROTATIONS

PLAN_VERSION = 1
PLAN_SUFFIX = ".plan.json"


class PlanFormatError(ValueError):
    """Schema or syntax problem in plan text; ``path`` locates it."""

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{path}: {message}")


class PlanVersionError(PlanFormatError):
    pass


class PlanValidationError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid plan: " + "; ".join(self.violations))


@dataclass(frozen=True)
class Phase:
    phase_id: int
    start_step: int
    end_step: int
    target_prefix: int
    pre_activate_at: int


@dataclass(frozen=True)
class PlanStep:
    step: int
    part: int
    rotation: str
    position: tuple[int, int, int]
    color_id: int
    shape_id: str
    extent: tuple[int, int, int]


@dataclass(frozen=True)
class VizPolicy:
    current: str = "rendered"
    previous: str = "wireframe"
    previous_toggleable: bool = True
    future: str = "hidden"
    occluder: str = "physical_prefix"


@dataclass(frozen=True)
class InstructionPlan:
    model_hash: str
    part_count: int
    bootstrap_end: int
    phases: tuple[Phase, ...]
    steps: tuple[PlanStep, ...]
    viz_policy: VizPolicy = field(default_factory=VizPolicy)
    version: int = PLAN_VERSION

    @property
    def first_boundary(self) -> int:
        return self.bootstrap_end + 1

    @property
    def boundaries(self) -> tuple[int, ...]:
        return tuple(p.start_step for p in self.phases)

    def phase_at(self, step: int) -> Phase | None:
        """Phase covering ``step``; None inside the ground-plane bootstrap."""
        for ph in self.phases:
            if ph.start_step <= step <= ph.end_step:
                return ph
        return None

    def phase_starting_at(self, step: int) -> Phase | None:
        for ph in self.phases:
            if ph.start_step == step:
                return ph
        return None


FIRST_PHASE_ID = 2  # phase 1 is the ground-plane bootstrap


def make_phases(boundaries: Sequence[int], n: int, first_id: int = FIRST_PHASE_ID) -> tuple[Phase, ...]:
    bounds = list(boundaries)
    ends = [b - 1 for b in bounds[1:]] + [n]
    return tuple(
        Phase(first_id + i, b, e, b - 1, b - 1) for i, (b, e) in enumerate(zip(bounds, ends))
    )


def build_plan(model: AssemblyModel, order: Sequence[int], boundaries: Sequence[int]) -> InstructionPlan:
    """Assemble a plan from a build order and ascending phase start steps."""
    steps = []
    for i, idx in enumerate(order, start=1):
        p = model.part(idx)
        steps.append(PlanStep(i, idx, p.rotation, p.position, p.color_id, p.shape.shape_id, p.shape.extent))
    n = model.part_count
    return InstructionPlan(
        model_hash=model.model_hash,
        part_count=n,
        bootstrap_end=boundaries[0] - 1,
        phases=make_phases(boundaries, n),
        steps=tuple(steps),
    )


def validate_plan(plan: InstructionPlan) -> list[str]:
    """Every broken plan invariant as a message; an empty list means valid."""
    out: list[str] = []
    n = plan.part_count
    if plan.version != PLAN_VERSION:
        out.append(f"unsupported version {plan.version}")
    if n < 1:
        out.append("part_count must be >= 1")
    if len(plan.steps) != n:
        out.append(f"expected {n} steps, found {len(plan.steps)}")
    if [s.step for s in plan.steps] != list(range(1, len(plan.steps) + 1)):
        out.append("step indices must run 1..N contiguously")
    if sorted(s.part for s in plan.steps) != list(range(1, len(plan.steps) + 1)):
        out.append("part indices must be a permutation of 1..N")
    for s in plan.steps:
        if s.rotation not in ROTATIONS:
            out.append(f"step {s.step}: unknown rotation {s.rotation!r}")
        if len(s.extent) != 3 or min(s.extent) < 1:
            out.append(f"step {s.step}: extents must be >= 1")
    if plan.bootstrap_end < 1:
        out.append("bootstrap must cover at least step 1")
    if not plan.phases:
        out.append("a model-target phase must exist")
        return out
    ids = [p.phase_id for p in plan.phases]
    if len(set(ids)) != len(ids):
        out.append("phase ids must be unique")
    first = plan.phases[0]
    if first.start_step != plan.bootstrap_end + 1:
        out.append(f"phase {first.phase_id} must start right after the bootstrap (step {plan.bootstrap_end + 1})")
    for ph in plan.phases:
        if ph.start_step > ph.end_step:
            out.append(f"phase {ph.phase_id}: start {ph.start_step} after end {ph.end_step}")
        if ph.start_step < 2 or ph.end_step > n:
            out.append(f"phase {ph.phase_id}: steps outside 2..{n}")
        if ph.target_prefix != ph.start_step - 1:
            out.append(f"phase {ph.phase_id}: target_prefix must be start_step-1")
        if ph.pre_activate_at >= ph.start_step:
            out.append(f"phase {ph.phase_id}: pre-activation must precede switch")
        elif ph.pre_activate_at != ph.start_step - 1:
            out.append(f"phase {ph.phase_id}: pre-activation must be one step before the switch")
    for a, b in zip(plan.phases, plan.phases[1:]):
        if b.start_step <= a.end_step:
            out.append(f"phases {a.phase_id} and {b.phase_id} overlap")
        elif b.start_step != a.end_step + 1:
            out.append(f"gap between phases {a.phase_id} and {b.phase_id}")
    if plan.phases[-1].end_step != n:
        out.append(f"last phase must end at step {n}")
    return out


def to_dict(plan: InstructionPlan) -> dict:
    return {
        "version": plan.version,
        "model_hash": plan.model_hash,
        "part_count": plan.part_count,
        "bootstrap": {"mode": "ground_plane", "steps": [1, plan.bootstrap_end]},
        "phases": [
            {
                "phase_id": p.phase_id,
                "start_step": p.start_step,
                "end_step": p.end_step,
                "target_prefix": p.target_prefix,
                "pre_activate_at": p.pre_activate_at,
            }
            for p in plan.phases
        ],
        "steps": [
            {
                "step": s.step,
                "part": s.part,
                "pose": {"rotation": s.rotation, "position": list(s.position)},
                "color_id": s.color_id,
                "shape": {"id": s.shape_id, "extent": list(s.extent)},
            }
            for s in plan.steps
        ],
        "viz_policy": {
            "current": plan.viz_policy.current,
            "previous": plan.viz_policy.previous,
            "previous_toggleable": plan.viz_policy.previous_toggleable,
            "future": plan.viz_policy.future,
            "occluder": plan.viz_policy.occluder,
        },
    }


def serialize(plan: InstructionPlan) -> str:
    violations = validate_plan(plan)
    if violations:
        raise PlanValidationError(violations)
    return json.dumps(to_dict(plan), sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"


@lru_cache(maxsize=None)
def plan_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("plan.schema.json").read_text("utf-8"))


def _json_path(parts) -> str:
    path = "$"
    for p in parts:
        path += f"[{p}]" if isinstance(p, int) else f".{p}"
    return path


def from_dict(data) -> InstructionPlan:
    """Schema-check a decoded document and build the plan (no semantic checks)."""
    if isinstance(data, dict) and "version" in data and data["version"] != PLAN_VERSION:
        raise PlanVersionError(f"version {data['version']!r} is not supported (expected {PLAN_VERSION})", "$.version")
    validator = jsonschema.Draft202012Validator(plan_schema())
    error = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if error is not None:
        raise PlanFormatError(error.message, _json_path(error.absolute_path))
    return InstructionPlan(
        version=data["version"],
        model_hash=data["model_hash"],
        part_count=data["part_count"],
        bootstrap_end=data["bootstrap"]["steps"][1],
        phases=tuple(Phase(**p) for p in data["phases"]),
        steps=tuple(
            PlanStep(
                step=s["step"],
                part=s["part"],
                rotation=s["pose"]["rotation"],
                position=tuple(s["pose"]["position"]),
                color_id=s["color_id"],
                shape_id=s["shape"]["id"],
                extent=tuple(s["shape"]["extent"]),
            )
            for s in data["steps"]
        ),
        viz_policy=VizPolicy(**data["viz_policy"]),
    )


def deserialize(text: str | bytes) -> InstructionPlan:
    """Parse plan text; key order and whitespace are free on input.

    Raises PlanFormatError (with a JSON path) for syntax or schema problems and
    PlanValidationError when the plan breaks an invariant.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise PlanFormatError(f"not UTF-8: {exc.reason}") from None
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, RecursionError) as exc:
        raise PlanFormatError(f"invalid JSON: {exc}") from None
    plan = from_dict(data)
    if data["bootstrap"]["steps"][0] != 1:
        raise PlanValidationError(["bootstrap must start at step 1"])
    violations = validate_plan(plan)
    if violations:
        raise PlanValidationError(violations)
    return plan


def load_plan(path) -> InstructionPlan:
    with open(path, "r", encoding="utf-8") as fh:
        return deserialize(fh.read())


def save_plan(plan: InstructionPlan, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(plan))
