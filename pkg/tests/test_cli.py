import json
from pathlib import Path

import pytest

from planvent import cli
from planvent.plan import save_plan

from conftest import EPW, PROGRAM


def _project(tmp_path, **over):
    doc = {
        "schema": "planvent/project", "version": 1,
        "program": "package:data/case_study_program.json",
        "weather": "package:data/porto_synthetic.epw",
        "seed": 5, "out": "out",
        "search": {"population_size": 8, "target_count": 2},
        "optimizer": {"max_passes": 1},
        "scenarios": ["A"],
    }
    doc.update(over)
    path = tmp_path / "project.json"
    path.write_text(json.dumps(doc))
    return path


def _seed_plans(out: Path, plans, seed=5):
    for i, p in enumerate(plans):
        save_plan(p, out / "plans" / f"design_{i + 1:02d}.json", {"design": f"design_{i + 1:02d}", "seed": seed})


def test_project_paths_resolve(tmp_path):
    proj = cli.load_project(str(_project(tmp_path)))
    assert proj.program_path == Path(str(PROGRAM))
    assert proj.weather_path == Path(str(EPW))
    assert proj.out == tmp_path / "out"
    assert proj.search.seed == 5 and proj.search.target_count == 2


def test_bundled_project_loads():
    proj = cli.load_project(cli.BUNDLED_PROJECT)
    assert proj.seed == 7 and [s.name for s in proj.scenarios] == ["A", "B", "C", "D"]


def test_seed_override(tmp_path):
    proj = cli.load_project(str(_project(tmp_path))).with_seed(99)
    assert proj.seed == 99 and proj.search.seed == 99
    with pytest.raises(cli.ProjectError):
        proj.with_seed(-1)


@pytest.mark.parametrize("over", [
    {"schema": "other"},
    {"constructions": "heavy"},
    {"seed": "x"},
    {"comfort": {"category": "IV"}},
    {"scenarios": ["Z"]},
    {"scenarios": [{"name": "E", "d1": 3, "d2": 1}]},
    {"optimizer": {"max_passes": 0}},
    {"weather": "missing.epw"},
])
def test_bad_projects_exit_2(tmp_path, over, capsys):
    code = cli.main(["generate", "--project", str(_project(tmp_path, **over))])
    assert code == cli.EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err


def test_missing_project_file(tmp_path):
    assert cli.main(["generate", "--project", str(tmp_path / "none.json")]) == cli.EXIT_CONFIG


def test_bad_jobs(tmp_path):
    assert cli.main(["generate", "--project", str(_project(tmp_path)), "--jobs", "0"]) == cli.EXIT_CONFIG


def test_infeasible_program_exits_3(tmp_path, program):
    from dataclasses import replace

    from planvent.plan import program_to_dict

    tight = replace(program, max_construction_area=10.0)
    (tmp_path / "tight.json").write_text(json.dumps(program_to_dict(tight)))
    code = cli.main(["generate", "--project", str(_project(tmp_path, program="tight.json"))])
    assert code == cli.EXIT_INFEASIBLE


def test_bad_weather_exits_5(tmp_path, plan_a):
    (tmp_path / "short.epw").write_text("".join(EPW.read_text().splitlines(keepends=True)[:500]))
    out = tmp_path / "out"
    _seed_plans(out, [plan_a])
    code = cli.main(["compare", "--source", "generated", "--project",
                     str(_project(tmp_path, weather="short.epw"))])
    assert code == cli.EXIT_IO


def test_optimize_without_plans_exits_5(tmp_path):
    assert cli.main(["optimize", "--project", str(_project(tmp_path))]) == cli.EXIT_IO


def test_seed_mismatch_is_refused(tmp_path, plan_a, capsys):
    out = tmp_path / "out"
    _seed_plans(out, [plan_a], seed=5)
    code = cli.main(["compare", "--source", "generated", "--seed", "6", "--project", str(_project(tmp_path))])
    assert code == cli.EXIT_CONFIG
    assert "seed 5" in capsys.readouterr().err


def test_unknown_scenario_flag(tmp_path, plan_a):
    _seed_plans(tmp_path / "out", [plan_a])
    code = cli.main(["compare", "--source", "generated", "--scenario", "C",
                     "--project", str(_project(tmp_path))])
    assert code == cli.EXIT_CONFIG


def test_compare_and_render_stages(tmp_path, plan_a, plan_b):
    out = tmp_path / "elsewhere"
    _seed_plans(out, [plan_a, plan_b])
    proj = str(_project(tmp_path))
    assert cli.main(["compare", "--source", "generated", "--out", str(out), "--project", proj]) == 0
    doc = json.loads((out / "report" / "scenarios.json").read_text())
    assert doc["seed"] == 5 and doc["scenarios"] == ["NoVent", "A"] and doc["source"] == "generated"
    assert (out / "report" / "scenarios.csv").read_text().startswith("# seed: 5")
    assert sorted(p.name for p in (out / "report" / "daily").iterdir()) == ["design_01.csv", "design_02.csv"]
    assert cli.main(["render", "--out", str(out), "--project", proj]) == 0
    names = sorted(p.name for p in (out / "svg").iterdir())
    assert names == ["design_01_daily.svg", "design_01_generated.svg",
                     "design_02_daily.svg", "design_02_generated.svg"]
    meta = json.loads((out / "run_meta.json").read_text())
    assert meta["command"] == "render" and meta["status"] == 0
    assert not any(p.name.endswith(".tmp") for p in out.rglob("*"))


def test_render_with_nothing_exits_5(tmp_path):
    assert cli.main(["render", "--project", str(_project(tmp_path))]) == cli.EXIT_IO


def test_parser_flags():
    args = cli.build_parser().parse_args(["compare", "--seed", "3", "--jobs", "2", "--scenario", "A",
                                          "--scenario", "B", "--out", "x"])
    assert (args.seed, args.jobs, args.scenario, args.out, args.source) == (3, 2, ["A", "B"], "x", "optimized")
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args([])
