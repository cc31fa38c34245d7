import xml.etree.ElementTree as ET

import pytest

from brickphase.plan_format import build_plan
from brickphase.render import render_svg
from brickphase.samples import l_model

NS = "{http://www.w3.org/2000/svg}"
PLAN = build_plan(l_model(), list(range(1, 13)), [9])


def _groups(svg):
    root = ET.fromstring(svg)
    return [(g.get("class"), int(g.get("data-step"))) for g in root.iter(NS + "g")]


def test_first_step_is_one_filled_part():
    assert _groups(render_svg(PLAN, 1)) == [("current", 1)]


@pytest.mark.parametrize("view", ["iso", "front", "top", "left"])
@pytest.mark.parametrize("step", [2, 7, 12])
def test_previous_steps_are_outlines(step, view):
    groups = _groups(render_svg(PLAN, step, view))
    assert [g for g in groups if g[0] == "outline"] == [("outline", i) for i in range(1, step)]
    assert [g for g in groups if g[0] == "current"] == [("current", step)]


def test_every_group_holds_one_polygon():
    root = ET.fromstring(render_svg(PLAN, 5))
    for g in root.iter(NS + "g"):
        polys = g.findall(NS + "polygon")
        assert len(polys) == 1 and len(polys[0].get("points").split()) >= 3


def test_output_is_byte_identical_across_runs():
    assert render_svg(PLAN, 6, "iso") == render_svg(PLAN, 6, "iso")


def test_canvas_is_shared_by_all_steps():
    sizes = {(ET.fromstring(render_svg(PLAN, k)).get("width"), ET.fromstring(render_svg(PLAN, k)).get("height"))
             for k in (1, 6, 12)}
    assert len(sizes) == 1


@pytest.mark.parametrize("step, view", [(0, "iso"), (13, "iso"), (3, "sideways")])
def test_bad_arguments(step, view):
    with pytest.raises(ValueError):
        render_svg(PLAN, step, view)
