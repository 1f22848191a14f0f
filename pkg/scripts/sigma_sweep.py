"""Communication and convergence time as the trigger tolerance sigma varies."""

import argparse

from sttrack.engine import run
from sttrack.metrics import ctime
from sttrack.svg import bars_svg, write_svg

from _common import dump, mean_std, out_dir, scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigmas", default="0.005,0.02,0.05,0.1")
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--out", default="out/sigma")
    args = ap.parse_args()
    out = out_dir(args.out)
    rows = []
    for sigma in (float(s) for s in args.sigmas.split(",")):
        cfg = scenario("hexagon_known.yaml", [f"sigma={sigma}", "stop_at_convergence=false",
                                              "max_steps=2000"])
        traces = [run(cfg.with_seed(k)) for k in range(args.trials)]
        row = {"sigma": sigma,
               "com_bar": mean_std([t.com_bar() for t in traces]),
               "ctime": mean_std([t.ctime for t in traces]),
               "ctime_exact": mean_std([ctime([r.cerr_true for r in t.records], cfg.n_robots)
                                        for t in traces])}
        rows.append(row)
        print(f"sigma {sigma:<6g} Com {row['com_bar'][0]:.4f}  Ctime {row['ctime'][0]:7.1f}  "
              f"Ctime(exact midpoints) {row['ctime_exact'][0]:7.1f}")
    dump({"trials": args.trials, "rows": rows}, out / "sigma_sweep.json")
    labels = [f"{r['sigma']:g}" for r in rows]
    for key, title in (("com_bar", "Com"), ("ctime", "Ctime"), ("ctime_exact", "Ctime, exact midpoints")):
        write_svg(bars_svg(labels, [r[key][0] for r in rows], [r[key][1] for r in rows],
                           f"{title} vs sigma", title), out / f"sigma_{key}.svg")


if __name__ == "__main__":
    main()
