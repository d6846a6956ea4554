"""Command line pipeline: generate, optimize, compare, render, or all four.

Every stage reads its inputs from and writes its outputs to the output
directory, so stages can be re-run or inspected one at a time::

    out/plans/design_01.json ...          generated plans
    out/generation.json                   generator summary
    out/optimized/design_01.json ...      sealed-optimized plans
    out/traces/design_01.trace.json ...   optimizer traces
    out/ranking.json, out/ranking.csv     designs by final penalty
    out/report/scenarios.{csv,json,txt}   scenario comparison table
    out/report/daily/design_01.csv ...    daily differences to the reference
    out/svg/*.svg                         drawings
    out/run_meta.json                     timestamps and versions (not reproducible)

All randomness comes from the project seed, which every artifact records.
Exit codes: 0 success, 2 configuration, 3 infeasible program, 4 simulation
failure, 5 file input/output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import platform
import sys
import time
from dataclasses import dataclass, field, replace
from importlib.resources import files
from pathlib import Path

import numpy as np

from planvent import __version__
from planvent.comfort import CATEGORY_HALF_WIDTH
from planvent.evaluation import EvaluationContext
from planvent.generator import (
    GenerationError, InfeasibleProgramError, SearchConfig, design_penalty, run_epsap,
)
from planvent.io import atomic_write_text
from planvent.optimizer import MAX_PASSES, optimize_designs
from planvent.plan import PlanError, fingerprint, load_plan_document, load_program, save_plan
from planvent.render import render_daily_svg, render_plan_svg
from planvent.scenarios import REFERENCE, VentilationScenario, builtin_scenarios, run_experiment
from planvent.thermal import BACKEND, ThermalModelError, SimulationError
from planvent.weather import EpwError, parse_epw

log = logging.getLogger("planvent")

PROJECT_SCHEMA = "planvent/project"
PACKAGE_PREFIX = "package:"
BUNDLED_PROJECT = PACKAGE_PREFIX + "data/case_study_project.json"

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_SIMULATION, EXIT_IO = 0, 2, 3, 4, 5


class ProjectError(ValueError):
    """Invalid or incomplete project configuration."""


# -- project -------------------------------------------------------------------------

def resolve_path(ref: str, base: Path) -> Path:
    """``package:`` refers to data bundled with planvent; other relative paths
    are taken from the project file's directory."""
    if ref.startswith(PACKAGE_PREFIX):
        return Path(str(files("planvent") / ref[len(PACKAGE_PREFIX):]))
    p = Path(ref)
    return p if p.is_absolute() else base / p


def _scenarios_from(items) -> list[VentilationScenario]:
    known = {s.name: s for s in builtin_scenarios(include_reference=False)}
    out = []
    for item in items:
        if isinstance(item, str):
            if item not in known:
                raise ProjectError(f"unknown scenario {item!r}; built-in are {sorted(known)}")
            out.append(known[item])
        elif isinstance(item, dict):
            try:
                out.append(VentilationScenario(**item))
            except (TypeError, ValueError) as exc:
                raise ProjectError(f"bad scenario {item!r}: {exc}") from exc
        else:
            raise ProjectError(f"scenario entries are names or objects, got {item!r}")
    if len({s.name for s in out}) != len(out):
        raise ProjectError("scenario names must be unique")
    return out


@dataclass(frozen=True)
class Project:
    program_path: Path
    weather_path: Path
    seed: int
    out: Path
    search: SearchConfig = field(default_factory=SearchConfig)
    max_passes: int = MAX_PASSES
    comfort_category: str = "II"
    clamp_running_mean: bool = True
    scenarios: tuple = ()
    source: str = BUNDLED_PROJECT

    @classmethod
    def from_dict(cls, data: dict, base: Path, source: str = "") -> "Project":
        if data.get("schema") != PROJECT_SCHEMA or data.get("version") != 1:
            raise ProjectError(f"expected schema {PROJECT_SCHEMA!r} version 1")
        for key, allowed in (("constructions", "reference"), ("schedules", "default")):
            if data.get(key, allowed) != allowed:
                raise ProjectError(f"{key}: only {allowed!r} is available")
        try:
            program = resolve_path(data["program"], base)
            weather = resolve_path(data["weather"], base)
            seed = int(data.get("seed", 0))
            search = dict(data.get("search", {}))
            search.pop("seed", None)
            search_cfg = SearchConfig(seed=seed, **search)
            comfort = data.get("comfort", {})
            category = str(comfort.get("category", "II"))
            clamp = bool(comfort.get("clamp_running_mean", True))
            passes = int(data.get("optimizer", {}).get("max_passes", MAX_PASSES))
        except KeyError as exc:
            raise ProjectError(f"project is missing {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ProjectError(f"bad project value: {exc}") from exc
        if not 0 <= seed < 2 ** 64:
            raise ProjectError("seed must be an unsigned 64-bit integer")
        if category not in CATEGORY_HALF_WIDTH:
            raise ProjectError(f"comfort category must be one of {sorted(CATEGORY_HALF_WIDTH)}")
        if passes < 1:
            raise ProjectError("optimizer.max_passes must be >= 1")
        for label, p in (("program", program), ("weather", weather)):
            if not p.is_file():
                raise ProjectError(f"{label} file not found: {p}")
        scen = _scenarios_from(data.get("scenarios", ["A", "B", "C", "D"]))
        return cls(program, weather, seed, resolve_path(str(data.get("out", "out")), base),
                   search_cfg, passes, category, clamp, tuple(scen), source)

    def with_seed(self, seed: int) -> "Project":
        if not 0 <= seed < 2 ** 64:
            raise ProjectError("seed must be an unsigned 64-bit integer")
        return replace(self, seed=seed, search=replace(self.search, seed=seed))


def load_project(ref: str) -> Project:
    path = resolve_path(ref, Path.cwd())
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ProjectError(f"project file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ProjectError(f"project file {path} is not valid JSON: {exc}") from exc
    # bundled projects keep their outputs relative to the working directory
    base = Path.cwd() if ref.startswith(PACKAGE_PREFIX) else path.parent
    return Project.from_dict(data, base, ref)


# -- stages --------------------------------------------------------------------------

def _design_id(i: int) -> str:
    return f"design_{i + 1:02d}"


def _context(project: Project) -> EvaluationContext:
    return EvaluationContext(parse_epw(project.weather_path), comfort_category=project.comfort_category,
                             clamp_running_mean=project.clamp_running_mean)


def _load_dir(directory: Path):
    paths = sorted(directory.glob("design_*.json"))
    if not paths:
        raise FileNotFoundError(f"no design_*.json files in {directory}")
    return [(p.stem, *load_plan_document(p)) for p in paths]


def _check_seed(doc_extra: dict, project: Project, path: Path):
    if doc_extra.get("seed") != project.seed:
        raise ProjectError(f"{path} was written with seed {doc_extra.get('seed')}, "
                           f"this run uses {project.seed}; re-run the earlier stage")


def cmd_generate(project: Project, out: Path, jobs: int) -> None:
    program = load_program(project.program_path)
    t0 = time.perf_counter()
    plans = run_epsap(program, project.search)
    log.info("generated %d plans in %.1f s", len(plans), time.perf_counter() - t0)
    for old in (out / "plans").glob("design_*.json"):
        old.unlink()
    summary = []
    for i, plan in enumerate(plans):
        did = _design_id(i)
        pen = design_penalty(plan, program)
        save_plan(plan, out / "plans" / f"{did}.json",
                  {"design": did, "seed": project.seed, "design_penalty": round(pen.total, 9)})
        summary.append({"design": did, "floor_area": round(plan.floor_area, 6),
                        "design_penalty": round(pen.total, 9),
                        "fingerprint_hash": _hash(fingerprint(plan))})
    doc = {"seed": project.seed, "count": len(plans), "search": _search_dict(project.search),
           "designs": summary}
    atomic_write_text(out / "generation.json", json.dumps(doc, indent=2) + "\n")
    print(f"generated {len(plans)} designs -> {out / 'plans'}")


def _hash(obj) -> str:
    import hashlib

    return hashlib.sha256(repr(obj).encode()).hexdigest()[:16]


def _search_dict(cfg: SearchConfig) -> dict:
    return {k: getattr(cfg, k) for k in ("population_size", "offspring_per_parent", "generations",
                                         "ls_moves_per_individual", "seed", "target_count")}


def cmd_optimize(project: Project, out: Path, jobs: int) -> None:
    program = load_program(project.program_path)
    docs = _load_dir(out / "plans")
    for name, _, extra in docs:
        _check_seed(extra, project, out / "plans" / f"{name}.json")
    ctx = _context(project)
    t0 = time.perf_counter()
    designs = optimize_designs([d[1] for d in docs], ctx, program, jobs=jobs, max_passes=project.max_passes)
    log.info("optimized %d designs in %.1f s", len(designs), time.perf_counter() - t0)
    for old in (out / "optimized").glob("design_*.json"):
        old.unlink()
    ranking = []
    for d in sorted(designs, key=lambda d: d.index):
        name = docs[d.index][0]
        save_plan(d.plan, out / "optimized" / f"{name}.json",
                  {"design": name, "seed": project.seed, "rank": d.rank,
                   "thermal_penalty": round(d.penalty, 6)})
        trace = {"design": name, "seed": project.seed, **d.trace.to_dict()}
        atomic_write_text(out / "traces" / f"{name}.trace.json", json.dumps(trace, indent=2) + "\n")
    for d in designs:
        ranking.append({"rank": d.rank, "design": docs[d.index][0],
                        "initial_penalty": round(d.trace.initial, 6),
                        "final_penalty": round(d.penalty, 6), "accepted_moves": len(d.trace.steps),
                        "evaluations": d.trace.evaluations})
    atomic_write_text(out / "ranking.json",
                      json.dumps({"seed": project.seed, "ranking": ranking}, indent=2) + "\n")
    buf = io.StringIO()
    buf.write(f"# seed: {project.seed}\n")
    w = csv.DictWriter(buf, fieldnames=list(ranking[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(ranking)
    atomic_write_text(out / "ranking.csv", buf.getvalue())
    print(f"{'rank':>4}  {'design':<10}{'initial':>12}{'final':>12}{'moves':>7}{'evals':>7}")
    for r in ranking:
        print(f"{r['rank']:>4}  {r['design']:<10}{r['initial_penalty']:>12.1f}{r['final_penalty']:>12.1f}"
              f"{r['accepted_moves']:>7}{r['evaluations']:>7}")


def _selected(project: Project, names) -> list:
    scen = list(project.scenarios)
    if names:
        unknown = [n for n in names if n != REFERENCE and n not in {s.name for s in scen}]
        if unknown:
            raise ProjectError(f"unknown scenario(s) {unknown}; project has "
                               f"{[s.name for s in scen]}")
        scen = [s for s in scen if s.name in names]
    return scen


def cmd_compare(project: Project, out: Path, jobs: int, names=(), source: str = "optimized") -> None:
    directory = out / ("optimized" if source == "optimized" else "plans")
    docs = _load_dir(directory)
    for name, _, extra in docs:
        _check_seed(extra, project, directory / f"{name}.json")
    ctx = _context(project)
    t0 = time.perf_counter()
    result = run_experiment([d[1] for d in docs], ctx, _selected(project, names),
                            labels=[d[0] for d in docs], jobs=jobs, seed=project.seed)
    log.info("compared %d designs in %.1f s", len(docs), time.perf_counter() - t0)
    rep = out / "report"
    atomic_write_text(rep / "scenarios.csv", result.to_csv())
    doc = result.to_dict()
    doc["source"] = source
    atomic_write_text(rep / "scenarios.json", json.dumps(doc, indent=2) + "\n")
    atomic_write_text(rep / "scenarios.txt", result.to_text())
    for old in (rep / "daily").glob("design_*.csv"):
        old.unlink()
    for d in result.designs:
        atomic_write_text(rep / "daily" / f"{d}.csv", result.daily_csv(d))
    print(result.to_text(), end="")


def _read_daily(path: Path) -> dict:
    series: dict[str, list] = {}
    with open(path, encoding="utf-8") as fh:
        rows = csv.DictReader(line for line in fh if not line.startswith("#"))
        for row in rows:
            series.setdefault(row["scenario"], []).append(float(row["signed_diff"]))
    return {k: np.array(v) for k, v in series.items()}


def cmd_render(project: Project, out: Path, jobs: int) -> None:
    svg = out / "svg"
    count = 0
    for sub, label in (("plans", "generated"), ("optimized", "optimized")):
        directory = out / sub
        if not directory.is_dir():
            continue
        for path in sorted(directory.glob("design_*.json")):
            plan, extra = load_plan_document(path)
            notes = [f"floor area {plan.floor_area:.1f} m2, orientation {plan.orientation:g} deg"]
            if "thermal_penalty" in extra:
                notes.append(f"sealed thermal penalty {extra['thermal_penalty']:.1f} (rank {extra.get('rank')})")
            notes.append(f"seed: {extra.get('seed')}")
            atomic_write_text(svg / f"{path.stem}_{label}.svg",
                              render_plan_svg(plan, f"{path.stem} ({label})", notes))
            count += 1
    for path in sorted((out / "report" / "daily").glob("design_*.csv")):
        series = _read_daily(path)
        atomic_write_text(svg / f"{path.stem}_daily.svg",
                          render_daily_svg(series, f"{path.stem}: daily penalty minus {REFERENCE} "
                                                   f"(seed {project.seed})"))
        count += 1
    if count == 0:
        raise FileNotFoundError(f"nothing to render under {out}")
    print(f"wrote {count} drawings -> {svg}")


def cmd_all(project: Project, out: Path, jobs: int, names=()) -> None:
    cmd_generate(project, out, jobs)
    cmd_optimize(project, out, jobs)
    cmd_compare(project, out, jobs, names)
    cmd_render(project, out, jobs)


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--project", default=BUNDLED_PROJECT,
                        help="project JSON; 'package:' paths point into the installed package "
                             f"(default {BUNDLED_PROJECT})")
    common.add_argument("--out", help="output directory (default: the project's 'out')")
    common.add_argument("--seed", type=int, help="override the project seed (unsigned 64-bit)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    common.add_argument("--scenario", action="append", default=[],
                        help="restrict compare to this scenario; repeatable")
    common.add_argument("-v", "--verbose", action="store_true")
    p = argparse.ArgumentParser(prog="planvent", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"planvent {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common], help="generate alternative floor plans")
    sub.add_parser("optimize", parents=[common], help="sealed thermal optimization of the generated plans")
    cp = sub.add_parser("compare", parents=[common], help="ventilation scenarios against the sealed reference")
    cp.add_argument("--source", choices=("optimized", "generated"), default="optimized",
                    help="which plans to compare (default optimized)")
    sub.add_parser("render", parents=[common], help="SVG drawings of plans and daily differences")
    sub.add_parser("all", parents=[common], help="generate, optimize, compare and render")
    return p


def _write_meta(out: Path, args, project: Project, status: int, seconds: float) -> None:
    meta = {"command": args.command, "argv": sys.argv[1:], "seed": project.seed,
            "project": project.source, "status": status, "seconds": round(seconds, 3),
            "finished_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "planvent": __version__, "kernel": BACKEND, "python": platform.python_version(),
            "numpy": np.__version__}
    try:
        atomic_write_text(out / "run_meta.json", json.dumps(meta, indent=2) + "\n")
    except OSError as exc:
        log.warning("could not write run_meta.json: %s", exc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    t0 = time.perf_counter()
    project = None
    try:
        project = load_project(args.project)
        if args.seed is not None:
            project = project.with_seed(args.seed)
        out = Path(args.out) if args.out else project.out
        if args.command == "generate":
            cmd_generate(project, out, args.jobs)
        elif args.command == "optimize":
            cmd_optimize(project, out, args.jobs)
        elif args.command == "compare":
            cmd_compare(project, out, args.jobs, args.scenario, args.source)
        elif args.command == "render":
            cmd_render(project, out, args.jobs)
        else:
            cmd_all(project, out, args.jobs, args.scenario)
        status = EXIT_OK
    except ProjectError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        status = EXIT_CONFIG
    except (InfeasibleProgramError, GenerationError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        status = EXIT_INFEASIBLE
    except (SimulationError, ThermalModelError) as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        status = EXIT_SIMULATION
    except (OSError, EpwError, PlanError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        status = EXIT_IO
    if project is not None:
        _write_meta(Path(args.out) if args.out else project.out, args, project, status,
                    time.perf_counter() - t0)
    return status


if __name__ == "__main__":
    sys.exit(main())
