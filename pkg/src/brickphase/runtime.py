"""Instruction runtime: step counting, phase hand-over and visualization directives.

The runtime never recognises anything itself; the host injects
``TargetRecognized`` and ``TrackingLost``.  ``apply`` is a pure function from
(state, event) to (state, directives).

Target sets per step
--------------------
Moving forward onto step ``t`` the active targets are the phase covering ``t``
plus the phase starting at ``t + 1`` (pre-activation).  Moving backward they
are the phase covering ``t``, the phase that ended just before ``t`` when
``t`` is a phase start, and otherwise the phase starting at ``t + 1``.  Two
targets are only ever active inside a ``{start - 1, start}`` window.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .plan_format import InstructionPlan, PlanValidationError, validate_plan

log = logging.getLogger(__name__)

AWAITING_ANCHOR = "AwaitingAnchor"
BOOTSTRAPPED = "Bootstrapped"
TRACKING = "Tracking"
LOST = "Lost"


class RuntimeEventError(RuntimeError):
    pass


class TraceError(RuntimeError):
    def __init__(self, index: int, event, cause: Exception):
        self.index = index
        self.event = event
        self.cause = cause
        super().__init__(f"event {index} ({format_event(event)}): {cause}")


# --- events --------------------------------------------------------------------


@dataclass(frozen=True)
class Next:
    pass


@dataclass(frozen=True)
class Prev:
    pass


@dataclass(frozen=True)
class AnchorPlaced:
    pass


@dataclass(frozen=True)
class TargetRecognized:
    phase: int


@dataclass(frozen=True)
class TrackingLost:
    pass


@dataclass(frozen=True)
class ToggleWireframe:
    pass


_EVENT_WORDS = {
    "next": Next,
    "prev": Prev,
    "anchor": AnchorPlaced,
    "lost": TrackingLost,
    "togglewf": ToggleWireframe,
}


def parse_events(text: str) -> list:
    """Event script: one of next, prev, anchor, recognized <phase>, lost, togglewf per line."""
    events = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        word = tokens[0].lower()
        if word == "recognized" and len(tokens) == 2:
            try:
                events.append(TargetRecognized(int(tokens[1])))
            except ValueError:
                raise ValueError(f"line {lineno}: phase id must be an integer, got {tokens[1]!r}") from None
        elif word in _EVENT_WORDS and len(tokens) == 1:
            events.append(_EVENT_WORDS[word]())
        else:
            raise ValueError(f"line {lineno}: unknown event {line!r}")
    return events


def format_event(event) -> str:
    if isinstance(event, TargetRecognized):
        return f"recognized {event.phase}"
    for word, cls in _EVENT_WORDS.items():
        if isinstance(event, cls):
            return word
    return repr(event)


# --- state -----------------------------------------------------------------------


@dataclass(frozen=True)
class Mode:
    kind: str
    phase: int | None = None

    def __str__(self):
        return self.kind if self.phase is None else f"{self.kind}({self.phase})"


@dataclass(frozen=True)
class VizState:
    """Per-step visual layers; parts are addressed by their build step."""

    step: int
    part_count: int
    wireframe_visible: bool
    shown: bool = True  # False before the anchor is placed

    @property
    def rendered_current(self) -> frozenset:
        return frozenset({self.step}) if self.shown else frozenset()

    @property
    def wireframe_previous(self) -> frozenset:
        if not (self.shown and self.wireframe_visible):
            return frozenset()
        return frozenset(range(1, self.step))

    @property
    def occluder(self) -> frozenset:
        return frozenset(range(1, self.step))

    @property
    def hidden(self) -> frozenset:
        return frozenset(range(self.step + 1, self.part_count + 1))

    def state_of(self, part_step: int) -> str:
        if part_step in self.rendered_current:
            return "rendered_current"
        if part_step in self.wireframe_previous:
            return "wireframe_previous"
        if part_step < self.step:
            return "occluder"
        return "hidden"

    def to_dict(self) -> dict:
        prev = [1, self.step - 1] if self.step > 1 else []
        return {
            "current": self.step if self.shown else None,
            "wireframe": prev if (self.shown and self.wireframe_visible) else [],
            "occluder": prev,
            "hidden": [self.step + 1, self.part_count] if self.step < self.part_count else [],
        }


@dataclass(frozen=True)
class RuntimeState:
    step: int
    mode: Mode
    active_targets: frozenset
    wireframe_visible: bool
    viz: VizState
    ground_plane: bool = True

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "mode": str(self.mode),
            "active_targets": sorted(self.active_targets),
            "wireframe_visible": self.wireframe_visible,
            "ground_plane": self.ground_plane,
            "viz": self.viz.to_dict(),
        }


# --- directives ------------------------------------------------------------------


@dataclass(frozen=True)
class EnableTarget:
    phase: int


@dataclass(frozen=True)
class DisableTarget:
    phase: int


@dataclass(frozen=True)
class DisableGroundPlane:
    pass


@dataclass(frozen=True)
class EnableGroundPlane:
    pass


@dataclass(frozen=True)
class ShowAnchorGuide:
    pass


@dataclass(frozen=True)
class SetViz:
    viz: VizState


@dataclass(frozen=True)
class Warn:
    message: str


def directive_to_dict(d) -> dict:
    out = {"type": type(d).__name__}
    if isinstance(d, (EnableTarget, DisableTarget)):
        out["phase"] = d.phase
    elif isinstance(d, SetViz):
        out["viz"] = d.viz.to_dict()
    elif isinstance(d, Warn):
        out["message"] = d.message
    return out


# --- transition law ----------------------------------------------------------------


def _phase_id(plan: InstructionPlan, step: int) -> int | None:
    ph = plan.phase_at(step)
    return None if ph is None else ph.phase_id


def _starting(plan: InstructionPlan, step: int) -> int | None:
    ph = plan.phase_starting_at(step)
    return None if ph is None else ph.phase_id


def targets_for(plan: InstructionPlan, step: int, forward: bool) -> frozenset:
    active = {_phase_id(plan, step)}
    if forward:
        active.add(_starting(plan, step + 1))
    elif plan.phase_starting_at(step) is not None:
        active.add(_phase_id(plan, step - 1))
    else:
        active.add(_starting(plan, step + 1))
    active.discard(None)
    return frozenset(active)


def init(plan: InstructionPlan) -> tuple[RuntimeState, list]:
    problems = validate_plan(plan)
    if problems:
        raise PlanValidationError(problems)
    state = RuntimeState(
        step=1,
        mode=Mode(AWAITING_ANCHOR),
        active_targets=frozenset(),
        wireframe_visible=True,
        viz=VizState(1, plan.part_count, True, shown=False),
        ground_plane=True,
    )
    return state, [ShowAnchorGuide()]


def _arrive(state: RuntimeState, plan: InstructionPlan, step: int, forward: bool) -> tuple[RuntimeState, list]:
    directives: list = []
    ground = step < plan.first_boundary
    if state.ground_plane and not ground:
        directives.append(DisableGroundPlane())
    elif ground and not state.ground_plane:
        directives.append(EnableGroundPlane())
    new_active = targets_for(plan, step, forward)
    directives += [DisableTarget(p) for p in sorted(state.active_targets - new_active)]
    directives += [EnableTarget(p) for p in sorted(new_active - state.active_targets)]

    mode = state.mode
    here = _phase_id(plan, step)
    if here is None:
        mode = Mode(BOOTSTRAPPED)
    elif not (mode.kind in (TRACKING, LOST) and mode.phase in new_active):
        mode = Mode(LOST, here)
    viz = VizState(step, plan.part_count, state.wireframe_visible)
    directives.append(SetViz(viz))
    return replace(state, step=step, mode=mode, active_targets=new_active, viz=viz, ground_plane=ground), directives


def apply(state: RuntimeState, event, plan: InstructionPlan) -> tuple[RuntimeState, list]:
    """Apply one event; raises RuntimeEventError for illegal moves."""
    if isinstance(event, Next):
        if state.mode.kind == AWAITING_ANCHOR:
            raise RuntimeEventError("anchor required before stepping")
        if state.step >= plan.part_count:
            return state, [Warn(f"already at the last step ({plan.part_count})")]
        return _arrive(state, plan, state.step + 1, forward=True)

    if isinstance(event, Prev):
        if state.step <= 1:
            raise RuntimeEventError("cannot step back from step 1")
        if state.mode.kind == AWAITING_ANCHOR:
            raise RuntimeEventError("anchor required before stepping")
        return _arrive(state, plan, state.step - 1, forward=False)

    if isinstance(event, AnchorPlaced):
        if state.mode.kind != AWAITING_ANCHOR:
            return state, [Warn("anchor already placed")]
        new_state, directives = _arrive(replace(state, mode=Mode(BOOTSTRAPPED)), plan, state.step, forward=True)
        return new_state, directives

    if isinstance(event, TargetRecognized):
        if event.phase not in state.active_targets:
            log.warning("recognition of inactive phase %s at step %d ignored", event.phase, state.step)
            return state, [Warn(f"phase {event.phase} is not active")]
        return replace(state, mode=Mode(TRACKING, event.phase)), []

    if isinstance(event, TrackingLost):
        if state.mode.kind == TRACKING:
            return replace(state, mode=Mode(LOST, state.mode.phase)), []
        return state, []

    if isinstance(event, ToggleWireframe):
        visible = not state.wireframe_visible
        viz = replace(state.viz, wireframe_visible=visible)
        return replace(state, wireframe_visible=visible, viz=viz), [SetViz(viz)]

    raise RuntimeEventError(f"unknown event {event!r}")


def trace(plan: InstructionPlan, events: Iterable) -> list[tuple[RuntimeState, list]]:
    """Fold ``apply`` over the events, starting from ``init``."""
    state, directives = init(plan)
    out = [(state, directives)]
    for i, ev in enumerate(events):
        try:
            state, directives = apply(state, ev, plan)
        except RuntimeEventError as exc:
            raise TraceError(i, ev, exc) from exc
        out.append((state, directives))
    return out


def check_invariants(state: RuntimeState, plan: InstructionPlan) -> list[str]:
    out = []
    n = plan.part_count
    if not 1 <= state.step <= n:
        out.append(f"step {state.step} outside 1..{n}")
    if len(state.active_targets) > 2:
        out.append(f"{len(state.active_targets)} targets active")
    if len(state.active_targets) == 2:
        windows = {s for b in plan.boundaries[1:] for s in (b - 1, b)}
        if state.step not in windows:
            out.append(f"two targets active outside a hand-over window at step {state.step}")
    if state.viz.occluder != frozenset(range(1, state.step)):
        out.append("occluder set differs from the placed prefix")
    if state.mode.kind != AWAITING_ANCHOR and len(state.viz.rendered_current) != 1:
        out.append("exactly one part must be rendered as current")
    if state.mode.kind == AWAITING_ANCHOR and state.step >= plan.first_boundary:
        out.append("awaiting anchor outside the bootstrap")
    if state.viz.step != state.step:
        out.append("viz step out of sync")
    return out


def trace_record(index: int | None, event, state: RuntimeState, directives: Sequence) -> dict:
    return {
        "index": index,
        "event": None if event is None else format_event(event),
        "state": state.to_dict(),
        "directives": [directive_to_dict(d) for d in directives],
    }
