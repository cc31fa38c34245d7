"""Step ordering and phase partitioning.

The build order minimises a travel-plus-symmetry cost subject to precedence
and prefix feasibility.  Phase boundaries are then placed farthest-first so the
number of model-target phases is minimal for the given validity predicate.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, fields, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .metrics import (
    DEFAULT_RESOLUTION,
    DEFAULT_TAU_SYM,
    ViewpointSet,
    confusability,
    distinctness_score,
    symmetry_score,
)
from .model import DEFAULT_EPS_CONTACT, AssemblyModel, ContactGraph, PrecedenceGraph, contact_graph, precedence_graph
from .plan_format import InstructionPlan, build_plan, validate_plan
from .stability import can_extend, grounded_parts, prefix_feasible

log = logging.getLogger(__name__)

SYMMETRY = "symmetry"
DISTINCTNESS = "distinctness"
CONFUSABILITY = "confusability"
MASK = "invalid_boundary"


class PlanningError(ValueError):
    pass


class NoFeasibleOrderError(PlanningError):
    pass


class UnplannableError(PlanningError):
    """No phase boundary can be placed; ``step`` is where the search got stuck."""

    def __init__(self, step: int, constraint: str, detail: str = ""):
        self.step = step
        self.constraint = constraint
        msg = f"unplannable: stuck at step {step} ({constraint})"
        super().__init__(msg + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class SequencerConfig:
    t_max: int = 40
    theta_sym: float = 0.85
    theta_dist: float = 0.05
    theta_conf: float = 0.90
    b_min: int = 8
    w_local: float = 1.0
    seed: int = 0
    iters: int = 2000
    tau_sym: float = DEFAULT_TAU_SYM
    resolution: float = DEFAULT_RESOLUTION
    eps_contact: float = DEFAULT_EPS_CONTACT
    cap_final_phase: bool = True

    def __post_init__(self):
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.b_min < 1:
            raise ValueError("b_min must be >= 1")
        for name in ("theta_sym", "theta_dist", "theta_conf"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.iters < 0:
            raise ValueError("iters must be >= 0")

    def with_overrides(self, **kw) -> "SequencerConfig":
        known = {f.name for f in fields(self)}
        return replace(self, **{k: v for k, v in kw.items() if k in known})


@dataclass(frozen=True)
class OrderedPlanDraft:
    order: tuple[int, ...]
    bootstrap_end: int
    boundaries: tuple[int, ...]
    phase_scores: tuple[tuple[float, float, Optional[float]], ...]

    @property
    def phase_count(self) -> int:
        return len(self.boundaries)


# --- ordering ------------------------------------------------------------------


class _SymmetryCache:
    def __init__(self, model: AssemblyModel, tau: float):
        self.model = model
        self.tau = tau
        self.memo: dict[frozenset, float] = {}

    def __call__(self, parts: Sequence[int]) -> float:
        key = frozenset(parts)
        if key not in self.memo:
            self.memo[key] = symmetry_score(self.model.ordered(sorted(key)), self.tau).score
        return self.memo[key]


def order_cost(model: AssemblyModel, order: Sequence[int], config: SequencerConfig = SequencerConfig(),
               _sym: Callable | None = None) -> float:
    """``w_local`` times the centroid path length plus the summed prefix symmetry."""
    sym = _sym or _SymmetryCache(model, config.tau_sym)
    cents = np.array([model.part(i).centroid for i in order])
    travel = float(np.linalg.norm(np.diff(cents, axis=0), axis=1).sum()) if len(order) > 1 else 0.0
    return config.w_local * travel + sum(sym(order[:k]) for k in range(1, len(order) + 1))


def _greedy_order(model, precedence, contacts, config, sym):
    preds = precedence.predecessor_map()
    ground = grounded_parts(model)
    n = model.part_count
    cents = {p.index: p.centroid for p in model.placements}
    dead: set[frozenset] = set()

    def candidates(placed, last):
        scored = []
        for part in range(1, n + 1):
            if part in placed or not preds[part] <= placed or not can_extend(placed, part, contacts, ground):
                continue
            step = 0.0 if last is None else float(np.linalg.norm(cents[part] - cents[last]))
            scored.append((config.w_local * step + sym(list(placed) + [part]), part))
        scored.sort()
        return [p for _, p in scored]

    order: list[int] = []
    placed: set[int] = set()
    stack = [iter(candidates(placed, None))]
    while stack:
        if len(order) == n:
            return order
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            if order:
                dead.add(frozenset(placed))
                placed.discard(order.pop())
            continue
        placed.add(nxt)
        if frozenset(placed) in dead:
            placed.discard(nxt)
            continue
        order.append(nxt)
        stack.append(iter(candidates(placed, nxt)))
    raise NoFeasibleOrderError("no feasible build order exists")


def order_steps(model: AssemblyModel, precedence: PrecedenceGraph, contacts: ContactGraph,
                config: SequencerConfig = SequencerConfig()) -> list[int]:
    """Feasible topological build order: greedy construction, then swap local search.

    Greedy picks the cheapest feasible next part (ties to the smallest index),
    backtracking only on dead ends.  The local search then tries ``iters``
    seeded random swaps and keeps those that stay feasible and lower the cost.
    """
    sym = _SymmetryCache(model, config.tau_sym)
    order = _greedy_order(model, precedence, contacts, config, sym)
    n = len(order)
    if n < 3 or config.iters == 0:
        return order
    rng = np.random.default_rng(config.seed)
    best = order_cost(model, order, config, sym)
    for _ in range(config.iters):
        i, j = sorted(int(v) for v in rng.choice(n, size=2, replace=False))
        cand = order.copy()
        cand[i], cand[j] = cand[j], cand[i]
        if not precedence.is_topological(cand):
            continue
        if not prefix_feasible(model, contacts, cand).feasible:
            continue
        cost = order_cost(model, cand, config, sym)
        if cost < best - 1e-12:
            order, best = cand, cost
    return order


# --- partitioning -----------------------------------------------------------------


def partition_boundaries(n: int, check: Callable[[int, Optional[int]], Optional[str]], t_max: int, b_min: int,
                         cap_final_phase: bool = True) -> list[int]:
    """Farthest-first phase starts.

    ``check(b, prev)`` returns None when ``b`` is a valid phase start following
    a phase that began at ``prev`` (None for the first boundary), else the name
    of the failing constraint.  The first boundary is the earliest valid
    ``b >= b_min + 1``; each later one is the largest valid ``b`` within
    ``t_max`` of the previous.  Phases cover up to ``n``.
    """
    first = None
    reason = MASK
    for b in range(b_min + 1, n + 1):
        r = check(b, None)
        if r is None:
            first = b
            break
        reason = r
    if first is None:
        raise UnplannableError(b_min + 1, reason, "no valid first model-target boundary")
    bounds = [first]
    prev = first
    while cap_final_phase and n - prev + 1 > t_max:
        chosen = None
        reason = MASK
        for b in range(min(n, prev + t_max), prev, -1):
            r = check(b, prev)
            if r is None:
                chosen = b
                break
            if b == min(n, prev + t_max):
                reason = r
        if chosen is None:
            raise UnplannableError(prev, reason, f"no valid boundary within {t_max} steps")
        bounds.append(chosen)
        prev = chosen
    return bounds


def schedule_violations(n: int, boundaries: Sequence[int], t_max: int, cap_final_phase: bool = True) -> list[str]:
    """Tolerance check for a fixed list of phase starts."""
    out = []
    bounds = list(boundaries)
    if not bounds:
        return ["no phases"]
    if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
        out.append("boundaries must be strictly ascending")
    if bounds[0] < 2 or bounds[-1] > n:
        out.append(f"boundaries must lie in 2..{n}")
    for b1, b2 in zip(bounds, bounds[1:]):
        if b2 - b1 > t_max:
            out.append(f"phase starting at {b1} spans {b2 - b1} steps > t_max={t_max}")
    if cap_final_phase and n - bounds[-1] + 1 > t_max:
        out.append(f"final phase spans {n - bounds[-1] + 1} steps > t_max={t_max}")
    return out


class PrefixScorer:
    """Memoised prefix metrics for one build order."""

    def __init__(self, model: AssemblyModel, order: Sequence[int], config: SequencerConfig,
                 views: ViewpointSet | None = None):
        self.parts = model.ordered(order)
        self.config = config
        self.views = views or ViewpointSet.default()
        self._sym: dict[int, float] = {}
        self._dist: dict[int, float] = {}
        self._conf: dict[tuple[int, int], float] = {}

    def symmetry(self, k: int) -> float:
        if k not in self._sym:
            self._sym[k] = symmetry_score(self.parts[:k], self.config.tau_sym).score
        return self._sym[k]

    def distinctness(self, k: int) -> float:
        if k not in self._dist:
            self._dist[k] = distinctness_score(self.parts[:k], self.views, self.config.resolution)
        return self._dist[k]

    def confusability(self, k1: int, k2: int) -> float:
        key = (min(k1, k2), max(k1, k2))
        if key not in self._conf:
            self._conf[key] = confusability(self.parts[:key[0]], self.parts[:key[1]], self.views,
                                            self.config.resolution)
        return self._conf[key]

    def check(self, b: int, prev: int | None) -> str | None:
        k = b - 1
        if self.symmetry(k) > self.config.theta_sym:
            return SYMMETRY
        if self.distinctness(k) < self.config.theta_dist:
            return DISTINCTNESS
        if prev is not None and self.confusability(prev - 1, k) > self.config.theta_conf:
            return CONFUSABILITY
        return None


def partition_phases(model: AssemblyModel, order: Sequence[int], config: SequencerConfig = SequencerConfig(),
                     views: ViewpointSet | None = None) -> OrderedPlanDraft:
    scorer = PrefixScorer(model, order, config, views)
    bounds = partition_boundaries(model.part_count, scorer.check, config.t_max, config.b_min, config.cap_final_phase)
    scores = []
    for i, b in enumerate(bounds):
        conf = scorer.confusability(bounds[i - 1] - 1, b - 1) if i else None
        scores.append((scorer.symmetry(b - 1), scorer.distinctness(b - 1), conf))
    return OrderedPlanDraft(tuple(order), bounds[0] - 1, tuple(bounds), tuple(scores))


def plan_draft(model: AssemblyModel, config: SequencerConfig = SequencerConfig(),
               views: ViewpointSet | None = None) -> OrderedPlanDraft:
    contacts = contact_graph(model, config.eps_contact)
    precedence = precedence_graph(model, contacts)
    order = order_steps(model, precedence, contacts, config)
    return partition_phases(model, order, config, views)


def plan(model: AssemblyModel, config: SequencerConfig = SequencerConfig(),
         views: ViewpointSet | None = None) -> InstructionPlan:
    """Order, partition and package a model into a validated InstructionPlan."""
    draft = plan_draft(model, config, views)
    result = build_plan(model, draft.order, draft.boundaries)
    problems = validate_plan(result)
    if problems:  # pragma: no cover - would be a planner bug
        raise PlanningError("planner produced an invalid plan: " + "; ".join(problems))
    log.info("planned %d parts into %d phases", model.part_count, draft.phase_count)
    return result
