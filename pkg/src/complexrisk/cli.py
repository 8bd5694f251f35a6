"""Batch harness: one JSON config drives evaluation and verification runs.

Example config::

    {
      "space": {"k": [2, 1]},
      "simple": {"family": "weighted-sum", "params": {"weights": [1, 1]}},
      "clustering": {"family": "neg-average", "params": {"gamma": [1, 1]}},
      "suites": ["axioms", "primal", "dual", "gap"],
      "seed": 7,
      "inputs": {"path": "scenarios.csv"}
    }

Exit status is 0 when every check passed, 1 when any axiom check failed or
a duality gap exceeded its tolerance, and 2 on configuration or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import PrimalGrid, check_set_monotonicity, primal_evaluate
from .catalog import clustering_from_descriptor, simple_from_descriptor
from .composition import (
    check_axiom,
    check_level_set_constancy,
    check_round_trip,
    compose,
    reconstruct_clustering,
)
from .duality import DualSearch, duality_gap, dual_evaluate, weak_duality_check
from .io import ScenarioFormatError, load_scenarios
from .report import json_float
from .scenario import ScenarioSpace

__all__ = ["ConfigError", "RunConfig", "run", "main"]

SUITE_ORDER = ("axioms", "eval", "primal", "dual", "gap", "decompose")
DEFAULT_TOLERANCES = {"axioms": 1e-9, "gap": 1e-9, "weak_duality": 1e-9, "level_set": 1e-9, "round_trip": 1e-6}
DEFAULT_TRIALS = {"axioms": 10_000, "weak_duality": 10_000, "level_set": 1000, "round_trip": 1000}
SUBCOMMAND_SUITES = {
    "eval": [],
    "axioms": ["axioms"],
    "primal": ["primal"],
    "dual": ["dual", "gap"],
    "decompose": ["decompose"],
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    space: ScenarioSpace
    simple: dict
    clustering: dict
    suites: list = field(default_factory=list)
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    trials: dict = field(default_factory=dict)
    primal_grid: PrimalGrid = field(default_factory=PrimalGrid)
    dual_search: DualSearch = field(default_factory=DualSearch)
    inputs: dict | None = None
    base_dir: Path = Path(".")

    @classmethod
    def from_dict(cls, doc: dict, base_dir=".") -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config: expected a JSON object")
        try:
            space = ScenarioSpace(doc["space"]["k"])
        except KeyError:
            raise ConfigError("space.k: required") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"space.k: {exc}") from None
        for key in ("simple", "clustering"):
            if not isinstance(doc.get(key), dict):
                raise ConfigError(f"{key}: required {{family, params}} record")
        suites = list(doc.get("suites", []))
        unknown = [s for s in suites if s not in SUITE_ORDER]
        if unknown:
            raise ConfigError(f"suites: unknown suite(s) {unknown}, expected any of {list(SUITE_ORDER)}")
        grids = doc.get("grids", {})
        try:
            primal = PrimalGrid(**grids.get("primal", {}))
            dual = DualSearch(**grids.get("dual", {}))
        except TypeError as exc:
            raise ConfigError(f"grids: {exc}") from None
        cfg = cls(
            space=space,
            simple=doc["simple"],
            clustering=doc["clustering"],
            suites=suites,
            seed=_check_seed(doc.get("seed", 0), "seed"),
            tolerances={**DEFAULT_TOLERANCES, **doc.get("tolerances", {})},
            trials={**DEFAULT_TRIALS, **doc.get("trials", {})},
            primal_grid=primal,
            dual_search=dual,
            inputs=doc.get("inputs"),
            base_dir=Path(base_dir),
        )
        cfg.build()
        return cfg

    def build(self):
        """Validate the descriptors against the catalog and return the composed statistic."""
        try:
            r = simple_from_descriptor(self.simple, self.space.d)
        except ValueError as exc:
            raise ConfigError(f"simple.{exc}") from None
        try:
            f = clustering_from_descriptor(self.clustering, self.space)
        except ValueError as exc:
            raise ConfigError(f"clustering.{exc}") from None
        return compose(r, f)

    def echo(self) -> dict:
        return {
            "space": {"k": list(self.space.k)},
            "simple": self.build().simple.descriptor(),
            "clustering": self.build().clustering.descriptor(),
            "suites": list(self.suites),
            "seed": self.seed,
            "tolerances": dict(sorted(self.tolerances.items())),
            "trials": dict(sorted(self.trials.items())),
            "grids": {"primal": self.primal_grid.to_dict(), "dual": self.dual_search.to_dict()},
        }


def _check_seed(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < 2**64:
        raise ConfigError(f"{where}: expected an unsigned 64-bit integer, got {v!r}")
    return v


def _subseed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, np.uint64)[0])


def _run_axioms(cfg: RunConfig, rho) -> list:
    tol, n = cfg.tolerances["axioms"], cfg.trials["axioms"]
    jobs = [(rho.simple, a) for a in ("A1", "A2")]
    jobs += [(rho.clustering, a) for a in ("B1", "B2", "B3")]
    jobs += [(rho, a) for a in ("C1", "C2", "C3")]
    reports = [check_axiom(subj, a, n, _subseed(cfg.seed, i), tol) for i, (subj, a) in enumerate(jobs)]
    base = len(jobs)
    for j, (subj, direction) in enumerate(
        [(s, d) for s in (rho.simple, rho.clustering) for d in ("convex", "f", "b")]
    ):
        reports.append(check_set_monotonicity(subj, direction, n, _subseed(cfg.seed, base + j), tol))
    reports.append(check_level_set_constancy(rho, cfg.trials["level_set"], _subseed(cfg.seed, 100),
                                             cfg.tolerances["level_set"]))
    return reports


def run(cfg: RunConfig, inputs, timings: bool = False) -> dict:
    """Execute the configured suites and return the report as a plain dict.

    Suites run in a fixed order (axioms, eval, primal, dual, gap, decompose)
    and a failing check never stops the run.  Evaluations are always
    included.
    """
    rho = cfg.build()
    for i, X in enumerate(inputs, start=1):
        if X.space != cfg.space:
            raise ConfigError(f"inputs: vector {i} has shape {list(X.space.k)}, config declares {list(cfg.space.k)}")
    suites = [s for s in SUITE_ORDER if s in cfg.suites or s == "eval"]
    clock = {}
    report = {
        "versions": {"complexrisk": __version__, "numpy": np.__version__},
        "config": cfg.echo(),
        "statistic": rho.describe(),
        "axioms": [],
        "evaluations": [{"index": i} for i in range(len(inputs))],
    }
    failures = 0
    for suite in suites:
        t0 = time.perf_counter()
        if suite == "axioms":
            reps = _run_axioms(cfg, rho)
            failures += sum(not r.passed for r in reps)
            report["axioms"] = [r.to_dict() for r in reps]
        elif suite == "eval":
            for ev, X in zip(report["evaluations"], inputs):
                ev["rho"] = json_float(rho(X))
                ev["phi"] = [json_float(v) for v in rho.clustering(X)]
        elif suite == "primal":
            for ev, X in zip(report["evaluations"], inputs):
                ev["primal"] = primal_evaluate(rho, X, cfg.primal_grid).to_dict()
        elif suite == "dual":
            for ev, X in zip(report["evaluations"], inputs):
                ev["dual"] = dual_evaluate(rho, X, cfg.dual_search).to_dict()
            if inputs:
                wd = weak_duality_check(rho, inputs, cfg.trials["weak_duality"], _subseed(cfg.seed, 200),
                                        cfg.tolerances["weak_duality"], cfg.dual_search)
                failures += not wd.passed
                report["axioms"].append(wd.to_dict())
        elif suite == "gap":
            for ev, X in zip(report["evaluations"], inputs):
                g = duality_gap(rho, X, cfg.dual_search)
                ev["gap"] = g.to_dict()
                failures += g.gap > cfg.tolerances["gap"]
        elif suite == "decompose":
            phi_hat = reconstruct_clustering(rho)
            for ev, X in zip(report["evaluations"], inputs):
                ev["decompose"] = {"phi_hat": [json_float(v) for v in phi_hat(X)]}
            rt = check_round_trip(rho, cfg.trials["round_trip"], _subseed(cfg.seed, 300), cfg.tolerances["round_trip"])
            failures += not rt.passed
            report["axioms"].append(rt.to_dict())
        clock[suite] = time.perf_counter() - t0
    report["passed"] = failures == 0
    if timings:
        report["timings"] = clock
    return report


def _table(report: dict) -> str:
    lines = [f"statistic: {report['statistic']}   k={report['config']['space']['k']}   seed={report['config']['seed']}"]
    if report["axioms"]:
        lines.append("")
        lines.append(f"{'check':<16}{'trials':>8}{'viol':>7}{'skip':>7}{'worst margin':>16}  status")
        for a in report["axioms"]:
            wm = a["worst_margin"]
            wm = f"{wm:.3e}" if isinstance(wm, float) else str(wm)
            status = "PASS" if a["violations"] == 0 else "FAIL"
            lines.append(f"{a['axiom']:<16}{a['trials']:>8}{a['violations']:>7}{a['skipped']:>7}{wm:>16}  {status}")
    if report["evaluations"]:
        lines.append("")
        cols = ["rho", "primal", "numeric", "dual", "gap"]
        lines.append(f"{'input':>6}" + "".join(f"{c:>14}" for c in cols))
        for ev in report["evaluations"]:
            row = {
                "rho": ev.get("rho"),
                "primal": ev.get("primal", {}).get("analytic"),
                "numeric": ev.get("primal", {}).get("numeric"),
                "dual": ev.get("dual", ev.get("gap", {})).get("value"),
                "gap": ev.get("gap", {}).get("gap"),
            }
            cells = "".join(f"{v:>14.6g}" if isinstance(v, float) else f"{'-' if v is None else str(v):>14}"
                            for v in row.values())
            lines.append(f"{ev['index']:>6}{cells}")
    lines.append("")
    lines.append("PASSED" if report["passed"] else "FAILED")
    return "\n".join(lines)


def _load_config(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"--config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--config: {path} is not valid JSON: {exc}") from None


def _resolve_inputs(cfg: RunConfig, override: str | None):
    if override:
        path, fmt = Path(override), None
    elif cfg.inputs:
        path = cfg.base_dir / cfg.inputs["path"]
        fmt = cfg.inputs.get("format")
    else:
        return []
    try:
        space, vectors = load_scenarios(path, fmt, with_space=True)
    except OSError as exc:
        raise ConfigError(f"inputs.path: cannot read {path}: {exc.strerror}") from None
    if space != cfg.space:
        raise ConfigError(f"inputs: file declares k={list(space.k)}, config declares k={list(cfg.space.k)}")
    return vectors


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="complexrisk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("eval", "axioms", "primal", "dual", "decompose", "report"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--input", help="scenario file (overrides inputs.path in the config)")
        p.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides the config)")
        p.add_argument("--format", choices=("json", "table"), default="json")
        p.add_argument("--out", help="write the JSON report here")
        p.add_argument("--timings", action="store_true", help="include wall-clock per suite in the report")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg_path = Path(args.config)
        doc = _load_config(cfg_path)
        if args.seed is not None:
            doc = {**doc, "seed": _check_seed(args.seed, "--seed")}
        cfg = RunConfig.from_dict(doc, base_dir=cfg_path.parent)
        if args.command != "report":
            cfg.suites = SUBCOMMAND_SUITES[args.command]
        inputs = _resolve_inputs(cfg, args.input)
        report = run(cfg, inputs, timings=args.timings)
    except (ConfigError, ScenarioFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text if args.format == "json" else _table(report))
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
