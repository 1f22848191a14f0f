"""Convergence time as a function of the angular speed limit."""

import argparse
import math

from sttrack.engine import run_batch
from sttrack.svg import series_svg, write_svg

from _common import dump, mean_std, out_dir, scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degrees", default="0.25,0.5,1,2,4,8,16", help="omega_max values in deg/s")
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--out", default="out/omega")
    args = ap.parse_args()
    out = out_dir(args.out)
    rows = []
    for deg in (float(d) for d in args.degrees.split(",")):
        cfg = scenario("hexagon_known.yaml", [f"omega_max={math.radians(deg)}", "max_steps=20000"])
        s = run_batch(cfg, range(args.trials))
        m, sd = mean_std([x.ctime for x in s])
        rows.append({"omega_deg": deg, "ctime": [m, sd], "converged": sum(x.converged for x in s)})
        print(f"omega {deg:6g} deg/s  Ctime {m:8.1f} +- {sd:.1f}  ({rows[-1]['converged']}/{args.trials})")
    dump({"trials": args.trials, "rows": rows}, out / "omega_sweep.json")
    write_svg(series_svg({"Ctime": [r["ctime"][0] for r in rows]},
                         "Ctime vs omega_max (index into " + args.degrees + " deg/s)", "Ctime [steps]"),
              out / "omega_sweep.svg")


if __name__ == "__main__":
    main()
