import xml.etree.ElementTree as ET

import numpy as np
import pytest

from planvent.io import atomic_write_text
from planvent.plan import ShadingDevice, Side
from planvent.render import _left_is_high, render_daily_svg, render_plan_svg

NS = "{http://www.w3.org/2000/svg}"


def test_plan_svg_is_well_formed(plan_a):
    root = ET.fromstring(render_plan_svg(plan_a, "Design 1 & co", notes=["penalty 123.4"]))
    rects = root.findall(f"{NS}rect")
    assert len(rects) == 1 + len(plan_a.spaces)
    labels = {t.text for t in root.iter(f"{NS}text")}
    assert {s.id for s in plan_a.spaces} <= labels
    assert "Design 1 & co" in labels and "penalty 123.4" in labels
    assert len(root.findall(f"{NS}line")) == len(plan_a.openings)


def test_plan_svg_is_deterministic(plan_a):
    assert render_plan_svg(plan_a) == render_plan_svg(plan_a)


def test_shading_is_drawn(plan_a):
    w = plan_a.windows[0].id
    shaded = plan_a.with_openings(plan_a.openings, [ShadingDevice(w, 0.6, 0.3, 0.0)])
    root = ET.fromstring(render_plan_svg(shaded))
    assert len(root.findall(f"{NS}polygon")) == 1          # overhang; the arrow sits in a group
    assert len(root.findall(f"{NS}line")) == len(plan_a.openings) + 1


@pytest.mark.parametrize("orientation,reflected,expected", [(0.0, False, "0"), (90.0, False, "270"),
                                                            (90.0, True, "90")])
def test_north_arrow(plan_a, orientation, expected, reflected):
    from dataclasses import replace

    svg = render_plan_svg(replace(plan_a, orientation=orientation, reflected=reflected))
    assert f"rotate({expected})" in svg


def test_left_fin_side():
    # seen from outside a south wall, the left hand points west (low x)
    assert not _left_is_high(Side.S, False)
    assert _left_is_high(Side.N, False)
    assert _left_is_high(Side.S, True)


def test_daily_svg():
    days = np.arange(365.0)
    svg = render_daily_svg({"A": -np.sin(days / 58.0), "B": np.zeros(365)}, "Daily")
    root = ET.fromstring(svg)
    lines = root.findall(f"{NS}polyline")
    assert len(lines) == 2
    assert len(lines[0].get("points").split()) == 365


def test_daily_svg_flat_series():
    ET.fromstring(render_daily_svg({"A": np.zeros(365)}))


def test_atomic_write(tmp_path):
    target = tmp_path / "sub" / "a.txt"
    atomic_write_text(target, "one\n")
    atomic_write_text(target, "two\n")
    assert target.read_text() == "two\n"
    assert [p.name for p in target.parent.iterdir()] == ["a.txt"]
