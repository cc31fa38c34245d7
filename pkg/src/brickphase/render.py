"""Static SVG preview of one instruction step.

Placed parts are drawn as stroked outlines, the current part filled and later
parts omitted.  Each part is the convex hull of its projected box corners.
"""
from __future__ import annotations

from xml.sax.saxutils import quoteattr

import numpy as np
from scipy.spatial import ConvexHull

from .metrics import NAMED_VIEWS, direction_from_angles, view_basis
from .model import PartPlacement
from .plan_format import InstructionPlan
from .shapes import PartShape

# LDraw colour ids to fill colours; anything else falls back to grey
COLOURS = {
    0: "#1b2a34", 1: "#1e5aa8", 2: "#00852b", 4: "#b40000", 14: "#fac80a",
    15: "#f4f4f4", 19: "#d7ba8c", 25: "#d67923", 71: "#969696", 72: "#646464",
}
DEFAULT_COLOUR = "#9ba19d"
MARGIN = 10.0


def _placements(plan: InstructionPlan) -> list[PartPlacement]:
    return [
        PartPlacement(s.part, PartShape(s.shape_id, s.extent), s.color_id, s.rotation, s.position)
        for s in plan.steps
    ]


def _outline(box: np.ndarray, right: np.ndarray, up: np.ndarray) -> np.ndarray:
    corners = np.array([[x, y, z] for x in box[:, 0] for y in box[:, 1] for z in box[:, 2]])
    pts = np.column_stack([corners @ right, -(corners @ up)])  # SVG y grows downward
    pts = np.unique(np.round(pts, 9), axis=0)
    hull = ConvexHull(pts)
    return pts[hull.vertices]


def _points_attr(poly: np.ndarray, offset: np.ndarray) -> str:
    return " ".join(f"{x:.3f},{y:.3f}" for x, y in poly - offset)


def render_svg(plan: InstructionPlan, step: int, view: str = "iso") -> str:
    """SVG text for ``step`` seen from one of the named views."""
    if not 1 <= step <= plan.part_count:
        raise ValueError(f"step must lie in 1..{plan.part_count}")
    if view not in NAMED_VIEWS:
        raise ValueError(f"unknown view {view!r}; choose from {', '.join(sorted(NAMED_VIEWS))}")
    _, right, up = view_basis(direction_from_angles(*NAMED_VIEWS[view]))
    polys = [_outline(p.box, right, up) for p in _placements(plan)]
    everything = np.vstack(polys)  # frame the whole model so every step shares one canvas
    offset = everything.min(axis=0) - MARGIN
    width, height = everything.max(axis=0) - everything.min(axis=0) + 2 * MARGIN

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.3f}" height="{height:.3f}" '
        f'viewBox="0 0 {width:.3f} {height:.3f}">',
        f"<title>step {step} of {plan.part_count} ({view})</title>",
    ]
    for s in plan.steps[: step - 1]:
        lines.append(
            f'<g class="outline" data-step="{s.step}"><polygon points="{_points_attr(polys[s.step - 1], offset)}" '
            'fill="none" stroke="#404040" stroke-width="1"/></g>'
        )
    cur = plan.steps[step - 1]
    colour = quoteattr(COLOURS.get(cur.color_id, DEFAULT_COLOUR))
    lines.append(
        f'<g class="current" data-step="{cur.step}"><polygon points="{_points_attr(polys[step - 1], offset)}" '
        f'fill={colour} stroke="#000000" stroke-width="1.5"/></g>'
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
