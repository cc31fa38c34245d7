"""Prefix feasibility: every build prefix must be grounded and in one piece."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import AssemblyModel, ContactGraph

FLOATING_PART = "floating_part"
DISCONNECTED = "disconnected_component"


@dataclass(frozen=True)
class Violation:
    step: int
    reason: str


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    first_violation: Violation | None = None


def grounded_parts(model: AssemblyModel, tol: float = 1e-9) -> set[int]:
    """Indices of parts whose bottom face lies on the model's ground plane."""
    ground = model.ground_y
    return {p.index for p in model.placements if abs(p.box[0, 1] - ground) <= tol}


def check_permutation(order: Sequence[int], n: int) -> None:
    if len(order) != n or sorted(order) != list(range(1, n + 1)):
        raise ValueError(f"order must be a permutation of 1..{n}")


class _Components:
    """Union-find that also tracks how many components touch the ground."""

    def __init__(self):
        self.parent: dict[int, int] = {}
        self.grounded: dict[int, bool] = {}
        self.count = 0
        self.floating = 0

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def add(self, a: int, on_ground: bool) -> None:
        self.parent[a] = a
        self.grounded[a] = on_ground
        self.count += 1
        self.floating += not on_ground

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        ga, gb = self.grounded[ra], self.grounded[rb]
        self.parent[rb] = ra
        self.grounded[ra] = ga or gb
        self.count -= 1
        self.floating -= (not ga) + (not gb) - (not (ga or gb))


def prefix_feasible(model: AssemblyModel, contacts: ContactGraph, order: Sequence[int]) -> FeasibilityReport:
    """Check every prefix of ``order`` for floating parts and split components.

    A floating part is reported ahead of a disconnected prefix when both occur
    at the same step.
    """
    order = list(order)
    check_permutation(order, model.part_count)
    ground = grounded_parts(model)
    comps = _Components()
    for k, part in enumerate(order, start=1):
        comps.add(part, part in ground)
        for nb in contacts.neighbors(part):
            if nb in comps.parent:
                comps.union(part, nb)
        if comps.floating:
            return FeasibilityReport(False, Violation(k, FLOATING_PART))
        if comps.count > 1:
            return FeasibilityReport(False, Violation(k, DISCONNECTED))
    return FeasibilityReport(True)


def can_extend(placed: set[int], part: int, contacts: ContactGraph, ground: set[int]) -> bool:
    """Would adding ``part`` to a feasible prefix keep it feasible?

    A feasible prefix is one grounded component, so the new part only has to
    touch it (or be the first part and stand on the ground).
    """
    if not placed:
        return part in ground
    return any(nb in placed for nb in contacts.neighbors(part))
