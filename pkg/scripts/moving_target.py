"""Tracking a target on a circle with the three estimation pipelines."""

import argparse

import numpy as np

from sttrack.engine import run
from sttrack.svg import series_svg, trajectories_svg, write_svg

from _common import dump, out_dir, scenario

PIPELINES = {
    "constant+centralized": ("constant", "centralized_ekf"),
    "self_triggered+centralized": ("self_triggered", "centralized_ekf"),
    "self_triggered+decentralized": ("self_triggered", "decentralized_ekf_ci"),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=3000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="out/moving")
    args = ap.parse_args()
    out = out_dir(args.out)
    cerr, terr, summary = {}, {}, {}
    for name, (strat, est) in PIPELINES.items():
        cfg = scenario("moving_target.yaml", [f"strategy={strat}", f"estimator={est}",
                                              f"max_steps={args.steps}", f"seed={args.seed}"])
        tr = run(cfg)
        cerr[name], terr[name] = tr.cerr_series(), tr.terr_series()
        tail = slice(len(cerr[name]) // 2, None)
        summary[name] = {"mean_cerr_late": float(np.mean(cerr[name][tail])),
                         "mean_terr_late": float(np.mean(terr[name][tail])),
                         "com_bar": tr.com_bar()}
        print(f"{name:30s} late Cerr {summary[name]['mean_cerr_late']:.3f}  "
              f"late Terr {summary[name]['mean_terr_late']:.3f}  Com {tr.com_bar():.4f}")
        write_svg(trajectories_svg(tr), out / f"trajectories_{strat}_{est}.svg")
    dt = cfg.dt
    write_svg(series_svg(cerr, "Convergence error", "Cerr [rad]", dt=dt), out / "moving_cerr.svg")
    write_svg(series_svg(terr, "Target estimate error", "Terr [m]", dt=dt), out / "moving_terr.svg")
    dump({"steps": args.steps, "seed": args.seed, "pipelines": summary}, out / "moving.json")


if __name__ == "__main__":
    main()
