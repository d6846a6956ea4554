import json

import pytest
from hypothesis import given, strategies as st

from planvent.plan import (
    DesignProgram, FloorPlan, Opening, OpeningKind, PlanError, Rect, RequiredSpace, ShadingDevice, Side,
    Space, SpaceFunction, angular_distance, bounding_box, compass_label, connect_spaces, door_graph,
    envelope_sides, fingerprint, load_plan, overlap_area, plan_from_dict, plan_to_dict,
    program_from_dict, program_to_dict, reachable_from_hall, save_plan, shared_segment, validate,
)

H, L = SpaceFunction.HALL, SpaceFunction.LIVING_ROOM


def _toy(orientation=0.0, reflected=False, window_side=Side.S):
    spaces = (Space("Hall1", H, Rect(0, 0, 2, 3)), Space("Living1", L, Rect(2, 0, 4, 4)))
    win = Opening("W1", OpeningKind.WINDOW, "Living1", window_side, 1.0, 2.0, 1.1, 1.0)
    ext = Opening("E1", OpeningKind.EXTERIOR_DOOR, "Hall1", Side.W, 1.0, 0.9, 2.0)
    plan = FloorPlan(spaces, (win, ext), (), orientation, reflected)
    return connect_spaces(plan)


def _program(**kw):
    return DesignProgram(
        (RequiredSpace(H, 1, 4.0), RequiredSpace(L, 1, 12.0, min_window_width=1.5)),
        [(H, L)], [(L, "S")], **kw)


def test_toy_plan_is_valid():
    plan = _toy()
    assert validate(plan) == []
    assert validate(plan, _program()) == []
    assert door_graph(plan) == {"Hall1": {"Living1"}, "Living1": {"Hall1"}}
    assert reachable_from_hall(plan) == {"Hall1", "Living1"}


def test_shared_segment_and_overlap():
    a, b = Rect(0, 0, 2, 3), Rect(2, 0, 4, 4)
    assert shared_segment(a, b) == (Side.E, 0, 3)
    assert overlap_area(a, b) == 0
    assert overlap_area(Rect(0, 0, 2, 2), Rect(1, 1, 2, 2)) == pytest.approx(1.0)


def test_violations_are_reported():
    plan = _toy()
    small = DesignProgram((RequiredSpace(H, 1, 4.0), RequiredSpace(L, 1, 20.0, min_window_width=3.0)),
                          [(H, L)], [(L, "N")], max_construction_area=15.0)
    kinds = {v.kind for v in validate(plan, small)}
    assert {"area_deficit", "window_width_deficit", "orientation", "over_area"} <= kinds


def test_window_off_its_wall():
    plan = _toy()
    bad = Opening("W1", OpeningKind.WINDOW, "Living1", Side.S, 3.5, 2.0, 1.1, 1.0)
    kinds = [v.kind for v in validate(plan.with_openings([bad, *plan.openings[1:]]))]
    assert "opening_placement" in kinds


def test_window_on_shared_wall_is_invalid():
    plan = _toy()
    bad = Opening("W1", OpeningKind.WINDOW, "Living1", Side.W, 0.5, 1.0, 1.1, 1.0)
    assert any(v.kind == "opening_placement" for v in validate(plan.with_openings([bad])))


def test_unreachable_without_doors():
    plan = _toy()
    bare = plan.with_openings([o for o in plan.openings if o.kind is not OpeningKind.INTERIOR_DOOR])
    assert [v.subject for v in validate(bare) if v.kind == "unreachable"] == ["Living1"]


def test_world_azimuth_rotation_and_reflection():
    assert _toy(90.0).world_azimuth(Side.N) == 90.0
    assert _toy(0.0, True).world_azimuth(Side.E) == 270.0
    assert _toy(45.0, True).world_azimuth(Side.E) == 315.0


def test_orientation_preference_follows_rotation():
    assert validate(_toy(0.0), _program()) == []
    kinds = {v.kind for v in validate(_toy(180.0), _program())}
    assert kinds == {"orientation"}
    # 45 deg off is inside the 67.5 deg sector
    assert validate(_toy(45.0), _program()) == []


def test_envelope_excludes_shared_wall():
    plan = _toy()
    segs = {(s.space_id, s.wall_side): s.length for s in envelope_sides(plan)}
    assert ("Hall1", Side.E) not in segs
    assert segs[("Living1", Side.W)] == pytest.approx(1.0)   # above the hall
    assert segs[("Living1", Side.S)] == pytest.approx(4.0)


def test_bounding_box():
    assert bounding_box(_toy()) == Rect(0, 0, 6, 4)


def test_compass_helpers():
    assert compass_label(0) == "N" and compass_label(200) == "S" and compass_label(350) == "N"
    assert angular_distance(350, 10) == pytest.approx(20)


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_fingerprint_ignores_translation(dx, dy):
    plan = _toy()
    dx, dy = round(dx, 1), round(dy, 1)
    moved = FloorPlan(tuple(Space(s.id, s.function, Rect(s.rect.x + dx, s.rect.y + dy, s.rect.w, s.rect.h))
                            for s in plan.spaces))
    assert fingerprint(moved) == fingerprint(plan)


@given(st.tuples(*[st.floats(-5, 5)] * 2, *[st.floats(0.1, 5)] * 2),
       st.tuples(*[st.floats(-5, 5)] * 2, *[st.floats(0.1, 5)] * 2))
def test_overlap_symmetric_and_bounded(a, b):
    ra, rb = Rect(*a), Rect(*b)
    ov = overlap_area(ra, rb)
    assert ov == pytest.approx(overlap_area(rb, ra))
    assert 0 <= ov <= min(ra.area, rb.area) + 1e-9


def test_plan_json_roundtrip(tmp_path):
    plan = _toy(135.0, True).with_openings(_toy().openings, [ShadingDevice("W1", 0.6, 0.3, 0.0)])
    assert plan_from_dict(json.loads(json.dumps(plan_to_dict(plan)))) == plan
    save_plan(plan, tmp_path / "p.json", {"seed": 3})
    assert load_plan(tmp_path / "p.json") == plan
    assert json.loads((tmp_path / "p.json").read_text())["seed"] == 3


def test_plan_schema_checked():
    data = plan_to_dict(_toy())
    data["schema"] = "other"
    with pytest.raises(PlanError):
        plan_from_dict(data)
    with pytest.raises(PlanError, match="clashes"):
        save_plan(_toy(), "unused.json", {"spaces": []})


def test_program_roundtrip(program):
    assert program_from_dict(program_to_dict(program)) == program
    assert program.space_count == 9


def test_invalid_values():
    with pytest.raises(PlanError):
        Rect(0, 0, 0, 1)
    with pytest.raises(PlanError):
        Opening("x", OpeningKind.WINDOW, "a", Side.N, 0, 0, 1)
    with pytest.raises(PlanError):
        ShadingDevice("x", -1)
    with pytest.raises(PlanError):
        FloorPlan((Space("a", H, Rect(0, 0, 1, 1)), Space("a", H, Rect(1, 0, 1, 1))))
    with pytest.raises(PlanError):
        RequiredSpace(H, 0, 4.0)
    with pytest.raises(PlanError):
        DesignProgram((), (), [(L, "SSE")])


def test_bundled_plans_are_valid(plan_a, plan_b, program):
    assert validate(plan_a, program) == []
    assert validate(plan_b, program) == []
