import itertools
import json

import pytest

from planvent.optimizer import (
    CachedEvaluator, DesignVariable, VariableKind, apply_variable, current_value, extract_variables,
    optimize_designs, sweep,
)
from planvent.plan import validate


def _toy_penalty(plan):
    """Separable bowl: best at 135 degrees, reflected, 0.6 m overhang on W1."""
    dev = plan.shading_for("W1")
    depth = 0.0 if dev is None else dev.overhang_depth
    return abs(plan.orientation - 135.0) + (0 if plan.reflected else 7.0) + 10 * abs(depth - 0.6)


def _vars():
    return [DesignVariable(VariableKind.ORIENTATION, "plan", tuple(float(a) for a in range(0, 360, 45)), "deg"),
            DesignVariable(VariableKind.REFLECTION, "plan", (False, True), "bool"),
            DesignVariable(VariableKind.OVERHANG, "W1", (0.0, 0.3, 0.6, 0.9))]


def test_sweep_finds_separable_optimum(plan_a):
    plan, trace = sweep(plan_a, _vars(), _toy_penalty)
    assert plan.orientation == 135.0 and plan.reflected
    assert plan.shading_for("W1").overhang_depth == 0.6
    assert trace.final == pytest.approx(0.0)
    assert trace.passes == 2          # second pass accepts nothing


def test_trace_strictly_decreasing(plan_a):
    _, trace = sweep(plan_a, _vars(), _toy_penalty)
    values = [trace.initial] + [s.after for s in trace.steps]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert all(s.before == a for s, a in zip(trace.steps, values))
    d = json.loads(trace.to_json())
    assert d["final_penalty"] == trace.final and len(d["steps"]) == len(trace.steps)


def test_sweep_matches_grid_minimum(plan_a):
    variables = _vars()
    grid = min(_toy_penalty(p) for p in (
        apply_variable(apply_variable(apply_variable(plan_a, variables[0], o), variables[1], r), variables[2], h)
        for o, r, h in itertools.product(*(v.domain for v in variables))))
    assert sweep(plan_a, variables, _toy_penalty)[1].final == pytest.approx(grid)


def test_no_improvement_keeps_plan(plan_a):
    plan, trace = sweep(plan_a, _vars(), lambda p: 1.0)
    assert plan is plan_a and trace.steps == [] and trace.passes == 1


def test_cache_counts_distinct_plans(plan_a):
    ev = CachedEvaluator(_toy_penalty)
    ev(plan_a)
    ev(plan_a)
    assert ev.calls == 1


def test_extracted_candidates_are_feasible(plan_a, program):
    variables = extract_variables(plan_a, program)
    kinds = {v.kind for v in variables}
    assert {VariableKind.ORIENTATION, VariableKind.REFLECTION, VariableKind.OVERHANG} <= kinds
    for var in variables:
        cur = current_value(plan_a, var)
        for v in var.domain:
            if v != cur:
                new = apply_variable(plan_a, var, v, program)
                assert new is not None and validate(new, program) == []


def _window_positions(plan):
    out = {}
    for o in plan.windows:
        r = plan.space(o.host_space).rect
        out[o.id] = round((r.x if o.wall_side.horizontal else r.y) + o.offset, 6)
    return out


def test_wall_move_keeps_window_in_place(plan_a, program):
    walls = [v for v in extract_variables(plan_a, program) if v.kind is VariableKind.INTERIOR_WALL]
    if not walls:
        pytest.skip("no movable wall")
    var = walls[0]
    cur = current_value(plan_a, var)
    new = apply_variable(plan_a, var, next(v for v in var.domain if v != cur), program)
    assert current_value(new, var) != cur
    assert _window_positions(new) == _window_positions(plan_a)


def test_empty_domain_rejected():
    with pytest.raises(ValueError):
        DesignVariable(VariableKind.ORIENTATION, "plan", ())


def test_ranking_sorted_with_real_penalty(plan_a, plan_b, context, program):
    designs = optimize_designs([plan_a, plan_b], context, program, max_passes=1)
    assert [d.rank for d in designs] == [1, 2]
    assert designs[0].penalty <= designs[1].penalty
    for d in designs:
        assert d.trace.final <= d.trace.initial
        assert d.penalty == pytest.approx(context.penalty(d.plan).total)
