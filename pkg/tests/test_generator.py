from dataclasses import replace

import numpy as np
import pytest

from planvent.generator import (
    DesignWeights, InfeasibleProgramError, SearchConfig, compactness, design_penalty, local_search,
    run_epsap, seed_population,
)
from planvent.plan import Rect, fingerprint, validate

SMALL = SearchConfig(population_size=8, target_count=2, seed=3)


@pytest.fixture(scope="module")
def small_run(program):
    history = []
    return run_epsap(program, SMALL, history=history), history


def test_generated_plans_satisfy_program(small_run, program):
    plans, _ = small_run
    assert len(plans) == 2
    assert len({fingerprint(p) for p in plans}) == 2
    for p in plans:
        assert validate(p, program) == []
        assert design_penalty(p, program).total == 0.0


def test_best_fitness_never_increases(small_run):
    _, history = small_run
    assert all(b <= a for a, b in zip(history, history[1:]))


def test_plans_ordered_by_compactness(small_run):
    plans, _ = small_run
    c = [compactness(p) for p in plans]
    assert c == sorted(c, reverse=True)
    assert all(0 < x <= 1 for x in c)


def test_same_seed_same_plans(small_run, program):
    again = run_epsap(program, SMALL)
    assert [fingerprint(p) for p in again] == [fingerprint(p) for p in small_run[0]]


def test_seeds_have_required_counts(program):
    for plan in seed_population(program, replace(SMALL, population_size=4)):
        counts = {}
        for s in plan.spaces:
            counts[s.function] = counts.get(s.function, 0) + 1
        assert counts == {r.function: r.count for r in program.required_spaces}


def test_infeasible_area_budget(program):
    tight = replace(program, max_construction_area=program.total_min_area - 1.0)
    with pytest.raises(InfeasibleProgramError, match="maximum construction area"):
        run_epsap(tight, SMALL)


def test_config_rejects_zero():
    with pytest.raises(ValueError):
        SearchConfig(generations=0)


def test_local_search_never_worsens(program):
    rng = np.random.default_rng(0)
    plan = seed_population(program, replace(SMALL, population_size=1))[0]
    before = design_penalty(plan, program).total
    after = design_penalty(local_search(plan, program, 50, rng), program).total
    assert after <= before


def test_penalty_zero_iff_valid(plan_a, program):
    assert design_penalty(plan_a, program).total == 0.0
    s = plan_a.spaces[0]
    r = s.rect
    moved = replace(plan_a, spaces=(replace(s, rect=Rect(r.x + 40, r.y, r.w, r.h)),) + plan_a.spaces[1:])
    pen = design_penalty(moved, program)
    assert validate(moved, program) and pen.total > 0
    heavy = design_penalty(moved, program, DesignWeights(missing_connectivity=100.0))
    assert heavy.total > pen.total
