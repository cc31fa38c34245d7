"""Assembly models: parsing, canonical serialization, contact and precedence graphs."""
from __future__ import annotations

import graphlib
import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .rotations import ROTATIONS, canonical_name, rotation_name
from .shapes import PartShape, lookup_shape

DEFAULT_EPS_CONTACT = 0.5
OVERLAP_SLOP = 1.0  # LDU^3 of overlap tolerated as numeric slop
_FLIP = np.diag([1, -1, 1])


class ModelError(ValueError):
    pass


class ModelParseError(ModelError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


class InterpenetrationError(ModelError):
    def __init__(self, a: int, b: int, volume: float):
        self.pair = (a, b)
        self.volume = volume
        super().__init__(f"parts {a} and {b} interpenetrate (overlap {volume:g} LDU^3)")


class PrecedenceCycleError(ModelError):
    def __init__(self, cycle: Sequence[int]):
        self.cycle = list(cycle)
        super().__init__("precedence cycle: " + " -> ".join(map(str, self.cycle)))


@dataclass(frozen=True)
class PartPlacement:
    index: int
    shape: PartShape
    color_id: int
    rotation: str
    position: tuple[int, int, int]
    source_step: int = 1

    def __post_init__(self):
        object.__setattr__(self, "rotation", canonical_name(self.rotation))
        object.__setattr__(self, "position", tuple(int(v) for v in self.position))

    @cached_property
    def box(self) -> np.ndarray:
        """World AABB as a (2, 3) array of [min, max]."""
        w, h, d = self.shape.size_xyz
        lo = np.array([-w / 2, 0.0, -d / 2])
        hi = np.array([w / 2, float(h), d / 2])
        corners = np.array([[x, y, z] for x in (lo[0], hi[0]) for y in (lo[1], hi[1]) for z in (lo[2], hi[2])])
        world = corners @ ROTATIONS[self.rotation].T + np.asarray(self.position, dtype=float)
        return np.stack([world.min(axis=0), world.max(axis=0)])

    @property
    def centroid(self) -> np.ndarray:
        return self.box.mean(axis=0)

    @property
    def world_extent(self) -> tuple[float, float, float]:
        return tuple(float(v) for v in self.box[1] - self.box[0])


@dataclass(frozen=True)
class AssemblyModel:
    placements: tuple[PartPlacement, ...]

    def __post_init__(self):
        object.__setattr__(self, "placements", tuple(self.placements))
        for i, p in enumerate(self.placements, start=1):
            if p.index != i:
                raise ModelError(f"placement indices must run 1..N in order; position {i} has index {p.index}")
        last = 1
        for p in self.placements:
            if p.source_step < last:
                raise ModelError(f"part {p.index}: source steps must be non-decreasing")
            last = p.source_step

    def __len__(self) -> int:
        return len(self.placements)

    def __iter__(self):
        return iter(self.placements)

    @property
    def part_count(self) -> int:
        return len(self.placements)

    @cached_property
    def model_hash(self) -> str:
        return hashlib.sha256(serialize_model(self).encode("utf-8")).hexdigest()

    @cached_property
    def boxes(self) -> np.ndarray:
        if not self.placements:
            return np.zeros((0, 2, 3))
        return np.stack([p.box for p in self.placements])

    @property
    def ground_y(self) -> float:
        return float(self.boxes[:, 0, 1].min())

    def part(self, index: int) -> PartPlacement:
        return self.placements[index - 1]

    def ordered(self, order: Sequence[int]) -> list[PartPlacement]:
        """Placements in the given order of part indices."""
        return [self.placements[i - 1] for i in order]

    def prefix(self, k: int) -> "AssemblyModel":
        return AssemblyModel(self.placements[:k])


def build_model(placements: Iterable[PartPlacement]) -> AssemblyModel:
    """Construct a model and reject interpenetrating placements."""
    model = AssemblyModel(tuple(placements))
    check_interpenetration(model)
    return model


def _overlap_volumes(boxes_a: np.ndarray, boxes_b: np.ndarray) -> np.ndarray:
    lo = np.maximum(boxes_a[:, None, 0, :], boxes_b[None, :, 0, :])
    hi = np.minimum(boxes_a[:, None, 1, :], boxes_b[None, :, 1, :])
    return np.prod(np.clip(hi - lo, 0.0, None), axis=-1)


def check_interpenetration(model: AssemblyModel, slop: float = OVERLAP_SLOP) -> None:
    boxes = model.boxes
    n = len(boxes)
    chunk = 512
    for start in range(0, n, chunk):
        vol = _overlap_volumes(boxes[start:start + chunk], boxes)
        rows = np.arange(start, min(start + chunk, n))
        vol[rows - start, rows] = 0.0
        vol[np.arange(vol.shape[1])[None, :] <= rows[:, None]] = 0.0
        bad = np.argwhere(vol > slop)
        if len(bad):
            i, j = bad[0]
            raise InterpenetrationError(int(rows[i]) + 1, int(j) + 1, float(vol[i, j]))


# --- parsing -----------------------------------------------------------------


def parse_model(text: str, format: str = "native", shapes: dict[str, PartShape] | None = None) -> AssemblyModel:
    """Parse a model from ``native`` or ``ldraw`` text into a validated AssemblyModel."""
    if format == "native":
        records = _parse_native(text, shapes)
    elif format in ("ldraw", "ldraw_subset"):
        records = _parse_ldraw(text, shapes)
    else:
        raise ValueError(f"unknown model format {format!r}")
    if not records:
        raise ModelParseError("model contains no parts")
    placements = []
    for i, (lineno, shape, color, rot, pos, step) in enumerate(records, start=1):
        placements.append(PartPlacement(i, shape, color, rot, pos, step))
    return build_model(placements)


def _int_token(tok: str, what: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ModelParseError(f"{what} must be an integer, got {tok!r}", lineno) from None


def _parse_native(text, shapes):
    records = []
    step = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "step":
            if len(tokens) != 1:
                raise ModelParseError("'step' takes no arguments", lineno)
            step += 1
        elif tokens[0] == "part":
            if len(tokens) != 7:
                raise ModelParseError("expected 'part <shape_id> <color_id> <rot> <x> <y> <z>'", lineno)
            try:
                shape = lookup_shape(tokens[1], shapes)
            except KeyError:
                raise ModelParseError(f"unknown shape id {tokens[1]!r}", lineno) from None
            color = _int_token(tokens[2], "color_id", lineno)
            try:
                rot = canonical_name(tokens[3])
            except ValueError as exc:
                raise ModelParseError(str(exc), lineno) from None
            pos = tuple(_int_token(t, "coordinate", lineno) for t in tokens[4:7])
            records.append((lineno, shape, color, rot, pos, step))
        else:
            raise ModelParseError(f"unknown record {tokens[0]!r}", lineno)
    return records


def _ldraw_number(tok, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ModelParseError(f"expected a number, got {tok!r}", lineno) from None


def _split_ldraw_sections(text):
    sections: dict[str, list[tuple[int, str]]] = {}
    order = []
    has_files = any(
        len(t) >= 2 and t[0] == "0" and t[1].upper() == "FILE" for t in (ln.split() for ln in text.splitlines())
    )
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if len(tokens) >= 3 and tokens[0] == "0" and tokens[1].upper() == "FILE":
            current = " ".join(raw.split(None, 2)[2:]).strip().lower()
            sections[current] = []
            order.append(current)
            continue
        if len(tokens) >= 2 and tokens[0] == "0" and tokens[1].upper() == "NOFILE":
            current = None
            continue
        if current is None:
            if has_files or order:
                continue
            current = ""
            sections[current] = []
            order.append(current)
        sections[current].append((lineno, raw))
    return sections, order


def _parse_ldraw(text, shapes):
    sections, order = _split_ldraw_sections(text)
    if not order:
        return []
    records = []

    def expand(name, rot, trans, color, stack, top_step):
        step = 1
        for lineno, raw in sections[name]:
            tokens = raw.split()
            if not tokens:
                continue
            kind = tokens[0]
            if kind == "0":
                if len(tokens) >= 2 and tokens[1].upper() == "STEP":
                    step += 1
                continue
            if kind in ("2", "3", "4", "5"):
                raise ModelParseError(f"unsupported LDraw line type {kind}", lineno)
            if kind != "1":
                raise ModelParseError(f"unknown LDraw line type {kind!r}", lineno)
            if len(tokens) < 15:
                raise ModelParseError("line type 1 needs colour, 12 numbers and a file name", lineno)
            line_color = _int_token(tokens[1], "colour", lineno)
            if line_color == 16:
                line_color = color
            nums = [_ldraw_number(t, lineno) for t in tokens[2:14]]
            ref = " ".join(raw.split(None, 14)[14:]).strip()
            t_local = np.array(nums[0:3])
            r_local = np.array(nums[3:12]).reshape(3, 3)
            try:
                rotation_name(r_local)
            except ValueError as exc:
                raise ModelParseError(str(exc), lineno) from None
            r_local = np.rint(r_local)
            r_world = rot @ r_local
            t_world = rot @ t_local + trans
            this_step = step if top_step is None else top_step
            key = ref.lower()
            if key in sections and key != "":
                if key in stack:
                    raise ModelParseError(f"recursive submodel reference {ref!r}", lineno)
                expand(key, r_world, t_world, line_color, stack | {key}, this_step)
                continue
            try:
                shape = lookup_shape(ref, shapes)
            except KeyError:
                raise ModelParseError(f"unknown shape id {ref!r}", lineno) from None
            pos_f = _FLIP @ (r_world @ np.array([0.0, shape.size_xyz[1], 0.0]) + t_world)
            pos = np.rint(pos_f)
            if np.max(np.abs(pos - pos_f)) > 1e-6:
                raise ModelParseError("coordinates must be integer LDU", lineno)
            rot_name = rotation_name(_FLIP @ r_world @ _FLIP)
            records.append((lineno, shape, line_color, rot_name, tuple(int(v) for v in pos), this_step))

    expand(order[0], np.eye(3), np.zeros(3), 16, frozenset({order[0]}), None)
    return records


# --- serialization -----------------------------------------------------------


def serialize_model(model: AssemblyModel, format: str = "native") -> str:
    """Canonical text form; re-parsing it yields a structurally equal model."""
    if format == "native":
        return _serialize_native(model)
    if format in ("ldraw", "ldraw_subset"):
        return _serialize_ldraw(model)
    raise ValueError(f"unknown model format {format!r}")


def _step_lines(model, marker, emit):
    lines = []
    cur = 1
    for p in model.placements:
        while cur < p.source_step:
            lines.append(marker)
            cur += 1
        lines.append(emit(p))
    lines.append(marker)
    return "\n".join(lines) + "\n"


def _serialize_native(model):
    def emit(p):
        x, y, z = p.position
        return f"part {p.shape.shape_id} {p.color_id} {p.rotation} {x} {y} {z}"

    return _step_lines(model, "step", emit)


def _serialize_ldraw(model):
    def emit(p):
        r_l = _FLIP @ ROTATIONS[p.rotation] @ _FLIP
        t_l = _FLIP @ np.asarray(p.position) - r_l @ np.array([0, p.shape.size_xyz[1], 0])
        nums = [int(v) for v in t_l] + [int(v) for v in r_l.ravel()]
        return f"1 {p.color_id} " + " ".join(str(v) for v in nums) + f" {p.shape.shape_id}.dat"

    return _step_lines(model, "0 STEP", emit)


# --- graphs ------------------------------------------------------------------


@dataclass(frozen=True)
class ContactGraph:
    nodes: tuple[int, ...]
    edges: frozenset  # of (a, b) with a < b
    eps: float = DEFAULT_EPS_CONTACT
    _adj: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        adj = {n: set() for n in self.nodes}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        object.__setattr__(self, "_adj", {n: frozenset(v) for n, v in adj.items()})

    def neighbors(self, node: int) -> frozenset:
        return self._adj[node]

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges


@dataclass(frozen=True)
class PrecedenceGraph:
    nodes: tuple[int, ...]
    edges: frozenset  # of (before, after)

    def predecessors(self, node: int) -> set[int]:
        return {a for a, b in self.edges if b == node}

    def predecessor_map(self) -> dict[int, set[int]]:
        preds = {n: set() for n in self.nodes}
        for a, b in self.edges:
            preds[b].add(a)
        return preds

    def is_topological(self, order: Sequence[int]) -> bool:
        pos = {n: i for i, n in enumerate(order)}
        if sorted(pos) != sorted(self.nodes) or len(order) != len(self.nodes):
            return False
        return all(pos[a] < pos[b] for a, b in self.edges)


def _below_matrix(boxes: np.ndarray, eps: float) -> np.ndarray:
    """below[i, j]: part i's top face meets part j's bottom face over a positive area."""
    top = boxes[:, 1, 1]
    bottom = boxes[:, 0, 1]
    faces_meet = np.abs(top[:, None] - bottom[None, :]) <= eps
    ox = np.minimum(boxes[:, None, 1, 0], boxes[None, :, 1, 0]) - np.maximum(boxes[:, None, 0, 0], boxes[None, :, 0, 0])
    oz = np.minimum(boxes[:, None, 1, 2], boxes[None, :, 1, 2]) - np.maximum(boxes[:, None, 0, 2], boxes[None, :, 0, 2])
    below = faces_meet & (ox > 1e-9) & (oz > 1e-9)
    np.fill_diagonal(below, False)
    return below


def contact_graph(model: AssemblyModel, eps_contact: float = DEFAULT_EPS_CONTACT) -> ContactGraph:
    nodes = tuple(p.index for p in model.placements)
    if len(nodes) < 2:
        return ContactGraph(nodes, frozenset(), eps_contact)
    below = _below_matrix(model.boxes, eps_contact)
    touch = np.triu(below | below.T, k=1)
    edges = frozenset((int(i) + 1, int(j) + 1) for i, j in np.argwhere(touch))
    return ContactGraph(nodes, edges, eps_contact)


def precedence_graph(model: AssemblyModel, contacts: ContactGraph) -> PrecedenceGraph:
    """Direct ``lower -> upper`` edges for every contact; raises on cycles."""
    boxes = model.boxes
    edges = set()
    for a, b in sorted(contacts.edges):
        ta, ba = boxes[a - 1, 1, 1], boxes[a - 1, 0, 1]
        tb, bb = boxes[b - 1, 1, 1], boxes[b - 1, 0, 1]
        if abs(ta - bb) <= contacts.eps:
            edges.add((a, b))
        if abs(tb - ba) <= contacts.eps:
            edges.add((b, a))
    graph = PrecedenceGraph(contacts.nodes, frozenset(edges))
    sorter = graphlib.TopologicalSorter(graph.predecessor_map())
    try:
        sorter.prepare()
    except graphlib.CycleError as exc:
        raise PrecedenceCycleError(exc.args[1]) from None
    return graph
