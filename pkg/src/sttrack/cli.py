"""Command-line front end.

Exit codes: 0 success, 2 invalid scenario or arguments, 3 no convergence
(only with ``--require-convergence``). Errors are also printed to stderr as
one JSON object.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

from . import __version__
from .config import SCHEMA, ConfigError, OutputOptions, SimConfig, apply_overrides, build_config
from .engine import run, run_batch
from .estimation import TargetLeftInterior
from .geometry import GeometryError, inscribed_circle
from .kinematics import InvalidBudget, omega_max_cases
from .limited_range import necessary_bounds, sufficient_bounds
from .svg import bars_svg, series_svg, trajectories_svg, write_svg
from .traceio import SCHEMA_VERSION, write_summary_json, write_trace_csv

EXIT_OK, EXIT_INVALID, EXIT_NOT_CONVERGED = 0, 2, 3


class _Fail(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code, self.kind, self.message = code, kind, message


def _load(args, need_seed: bool = True) -> tuple[SimConfig, OutputOptions]:
    try:
        doc = yaml.safe_load(Path(args.scenario).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise _Fail(EXIT_INVALID, "io", f"cannot read scenario {args.scenario}: {exc}")
    if not isinstance(doc, dict):
        raise _Fail(EXIT_INVALID, "validation", "scenario must be a mapping at the top level")
    try:
        doc = apply_overrides(doc, args.set or [])
        if getattr(args, "seed", None) is not None:
            doc["seed"] = args.seed
        elif need_seed and "seed" not in doc:
            doc["seed"] = int(np.random.SeedSequence().entropy % (2 ** 31))
            print(f"seed: {doc['seed']}", file=sys.stderr)
        cfg, out = build_config(doc)
    except ConfigError as exc:
        raise _Fail(EXIT_INVALID, "validation", str(exc))
    if getattr(args, "out", None):
        out = replace(out, dir=args.out)
    if getattr(args, "plots", False):
        out = replace(out, plots=True)
    return cfg, out


def _run_checked(cfg: SimConfig):
    try:
        return run(cfg)
    except (TargetLeftInterior, GeometryError, InvalidBudget) as exc:
        raise _Fail(EXIT_INVALID, "validation", str(exc))


def cmd_run(args) -> int:
    cfg, out = _load(args)
    trace = _run_checked(cfg)
    d = Path(out.dir)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    if out.trace_csv:
        written.append(write_trace_csv(trace, d / f"{out.prefix}_trace.csv"))
    if out.summary_json:
        written.append(write_summary_json(trace, d / f"{out.prefix}_summary.json"))
    if out.plots:
        written.append(write_svg(trajectories_svg(trace), d / f"{out.prefix}_trajectories.svg"))
        written.append(write_svg(series_svg({"Cerr": trace.cerr_series()}, "Convergence error", "Cerr [rad]",
                                            dt=cfg.dt, threshold=0.1 * cfg.n_robots),
                                 d / f"{out.prefix}_cerr.svg"))
        if cfg.estimator != "known_target":
            written.append(write_svg(series_svg({"Terr": trace.terr_series()}, "Target estimate error",
                                                "Terr [m]", dt=cfg.dt), d / f"{out.prefix}_terr.svg"))
    s = trace.summary()
    ctime = "not converged" if s.ctime is None else str(s.ctime)
    print(f"seed {cfg.seed}: steps {s.steps}, Ctime {ctime}, Com {s.com_bar:.4f}, "
          f"final Cerr {s.final_cerr:.4g}")
    for p in written:
        print(f"wrote {p}")
    if args.require_convergence and not s.converged:
        raise _Fail(EXIT_NOT_CONVERGED, "not_converged",
                    f"Cerr stayed above {0.1 * cfg.n_robots:g} for {s.steps} steps")
    return EXIT_OK


def _parse_sweep(text: str | None) -> tuple[str | None, list[Any]]:
    if not text:
        return None, [None]
    key, _, vals = text.partition("=")
    if not key or not vals:
        raise _Fail(EXIT_INVALID, "arguments", "--sweep takes key=v1,v2,...")
    return key, [yaml.safe_load(v) for v in vals.split(",")]


def _stats(xs: Sequence[float]) -> tuple[float | None, float | None]:
    if not xs:
        return None, None
    a = np.asarray(xs, dtype=float)
    return float(a.mean()), float(a.std())


def compare_rows(cfg_doc_args, strategies: Sequence[str], trials: int, seed0: int,
                 sweep: str | None, workers: int) -> list[dict[str, Any]]:
    key, values = _parse_sweep(sweep)
    rows = []
    for strat in strategies:
        for val in values:
            args = cfg_doc_args
            extra = [f"strategy={strat}"] + ([f"{key}={val}"] if key else [])
            args = argparse.Namespace(**{**vars(args), "set": list(args.set or []) + extra,
                                         "seed": seed0})
            cfg, _ = _load(args)
            try:
                summaries = run_batch(cfg, range(seed0, seed0 + trials), workers=workers)
            except (TargetLeftInterior, GeometryError, InvalidBudget) as exc:
                raise _Fail(EXIT_INVALID, "validation", str(exc))
            ct = [s.ctime for s in summaries if s.ctime is not None]
            cm, cs = _stats(ct)
            bm, bs = _stats([s.com_bar for s in summaries])
            label = strat if key is None else f"{strat} {key}={val}"
            rows.append({"label": label, "strategy": strat, "sweep_key": key, "sweep_value": val,
                         "trials": trials, "converged": len(ct),
                         "ctime_mean": cm, "ctime_std": cs, "com_bar_mean": bm, "com_bar_std": bs,
                         "seeds": [seed0, seed0 + trials - 1]})
    return rows


def format_table(rows: Sequence[dict[str, Any]]) -> str:
    head = ("case", "trials", "conv", "Ctime mean", "Ctime std", "Com mean", "Com std")

    def f(v, digits):
        return "-" if v is None else f"{v:.{digits}f}"

    body = [(r["label"], str(r["trials"]), str(r["converged"]), f(r["ctime_mean"], 1),
             f(r["ctime_std"], 1), f(r["com_bar_mean"], 4), f(r["com_bar_std"], 4)) for r in rows]
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    lines = ["  ".join(c.ljust(w) if j == 0 else c.rjust(w) for j, (c, w) in enumerate(zip(row, widths)))
             for row in (head, *body)]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def cmd_compare(args) -> int:
    if args.trials < 1:
        raise _Fail(EXIT_INVALID, "arguments", "--trials must be at least 1")
    cfg, out = _load(args)
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    rows = compare_rows(args, strategies, args.trials, cfg.seed, args.sweep, args.workers)
    print(format_table(rows))
    d = Path(out.dir)
    d.mkdir(parents=True, exist_ok=True)
    doc = {"schema_version": SCHEMA_VERSION, "tool": {"name": "sttrack", "version": __version__},
           "scenario": str(args.scenario), "rows": rows}
    p = d / f"{out.prefix}_compare.json"
    p.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {p}")
    if out.plots:
        labels = [r["label"] for r in rows]
        for metric, ylabel in (("ctime", "Ctime [steps]"), ("com_bar", "Com [msgs/robot/step]")):
            means = [r[f"{metric}_mean"] or 0.0 for r in rows]
            stds = [r[f"{metric}_std"] or 0.0 for r in rows]
            q = write_svg(bars_svg(labels, means, stds, f"{metric} over {args.trials} trials", ylabel),
                          d / f"{out.prefix}_compare_{metric}.svg")
            print(f"wrote {q}")
    return EXIT_OK


def cmd_omega(args) -> int:
    cfg, _ = _load(args, need_seed=False)
    if cfg.omega_max is not None:
        res = {"source": "fixed", "omega_max": cfg.omega_max}
    else:
        if cfg.estimator == "known_target":
            center = cfg.target.position_at(0.0)
        else:
            center = cfg.initial_mean or inscribed_circle(cfg.polygon)[0]
        b = omega_max_cases(cfg.polygon, center, cfg.speed_budget)
        enc = [None if math.isinf(v) else v for v in (b.case1, b.case2, b.case3)]
        res = {"source": "computed", "center": list(center), "d_max": cfg.speed_budget.d_max,
               "case1": enc[0], "case2": enc[1], "case3": enc[2],
               "omega_max": b.omega_max, "binding_case": b.binding_case}
    if args.json:
        print(json.dumps(res, indent=2, sort_keys=True))
    elif res["source"] == "fixed":
        print(f"omega_max = {res['omega_max']:.6g} rad/s (fixed in scenario, not computed)")
    else:
        for k in ("case1", "case2", "case3"):
            v = res[k]
            print(f"{k}: {'n/a' if v is None else f'{v:.6g} rad/s'}")
        print(f"omega_max = {res['omega_max']:.6g} rad/s (case {res['binding_case']} binds)")
    return EXIT_OK


def cmd_ranges(args) -> int:
    cfg, _ = _load(args, need_seed=False)
    n = cfg.n_robots
    nec = necessary_bounds(cfg.polygon, n)
    suf = sufficient_bounds(cfg.polygon, n)
    r_c, r_s = cfg.ranges.r_c, cfg.ranges.r_s
    checks = {
        "necessary_r_c": r_c >= nec[0], "necessary_r_s": r_s >= nec[1],
        "sufficient_r_c": r_c >= suf[0], "sufficient_r_s": r_s >= suf[1],
    }
    if not (checks["necessary_r_c"] and checks["necessary_r_s"]):
        status = "warning: below the necessary bounds, convergence is impossible"
    elif not (checks["sufficient_r_c"] and checks["sufficient_r_s"]):
        status = "caution: below the sufficient bounds, convergence is not guaranteed"
    else:
        status = "ok"

    def enc(v):
        return "unlimited" if math.isinf(v) else v

    res = {"n_robots": n, "r_c": enc(r_c), "r_s": enc(r_s),
           "necessary": {"r_c": nec[0], "r_s": nec[1]},
           "sufficient": {"r_c": suf[0], "r_s": suf[1]},
           "checks": checks, "status": status}
    if args.json:
        print(json.dumps(res, indent=2, sort_keys=True))
    else:
        print(f"N = {n}, r_c = {enc(r_c)}, r_s = {enc(r_s)}")
        print(f"necessary:  r_c >= {nec[0]:.6g} [{'ok' if checks['necessary_r_c'] else 'FAIL'}], "
              f"r_s >= {nec[1]:.6g} [{'ok' if checks['necessary_r_s'] else 'FAIL'}]")
        print(f"sufficient: r_c >= {suf[0]:.6g} [{'ok' if checks['sufficient_r_c'] else 'no'}], "
              f"r_s >= {suf[1]:.6g} [{'ok' if checks['sufficient_r_s'] else 'no'}]")
        print(f"status: {status}")
    return EXIT_OK


def cmd_schema(args) -> int:
    print(json.dumps(SCHEMA, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sttrack", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"sttrack {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario(sp, seeded=True):
        sp.add_argument("scenario", help="YAML scenario file")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a field, dot path for nested keys (repeatable)")
        if seeded:
            sp.add_argument("--seed", type=int, help="trial seed (first seed for compare)")
            sp.add_argument("--out", help="output directory (overrides output.dir)")
            sp.add_argument("--plots", action="store_true", help="also write SVG figures")

    r = sub.add_parser("run", help="run one trial and write its trace")
    scenario(r)
    r.add_argument("--require-convergence", action="store_true",
                   help="exit 3 if Cerr never drops below 0.1*N")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="paired-seed batch comparison of strategies")
    scenario(c)
    c.add_argument("--strategies", default="constant,self_triggered")
    c.add_argument("--trials", type=int, default=30)
    c.add_argument("--sweep", help="also sweep one field, e.g. sigma=0.005,0.02,0.05")
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_compare)

    o = sub.add_parser("omega", help="angular speed limit from the boundary speed budget")
    scenario(o, seeded=False)
    o.add_argument("--json", action="store_true")
    o.set_defaults(func=cmd_omega)

    g = sub.add_parser("ranges", help="communication and sensing range bounds")
    scenario(g, seeded=False)
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_ranges)

    s = sub.add_parser("schema", help="print the scenario JSON schema")
    s.set_defaults(func=cmd_schema)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _Fail as f:
        print(json.dumps({"error": f.kind, "message": f.message, "exit_code": f.code}), file=sys.stderr)
        return f.code


if __name__ == "__main__":
    sys.exit(main())
