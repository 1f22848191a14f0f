"""Paired-seed comparison of the constant and self-triggered strategies on a stationary target."""

import argparse

from sttrack.engine import run_batch
from sttrack.svg import bars_svg, write_svg

from _common import dump, mean_std, out_dir, scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0, help="first seed")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="out/stationary")
    args = ap.parse_args()
    out = out_dir(args.out)
    seeds = range(args.seed, args.seed + args.trials)
    rows = {}
    for strat in ("constant", "self_triggered"):
        cfg = scenario("hexagon_known.yaml", [f"strategy={strat}"])
        s = run_batch(cfg, seeds, workers=args.workers)
        rows[strat] = {"ctime": mean_std([x.ctime for x in s]), "com_bar": mean_std([x.com_bar for x in s]),
                       "converged": sum(x.converged for x in s)}
        print(f"{strat:15s} Ctime {rows[strat]['ctime'][0]:8.1f} +- {rows[strat]['ctime'][1]:6.1f}  "
              f"Com {rows[strat]['com_bar'][0]:.4f} +- {rows[strat]['com_bar'][1]:.4f}")
    ratio = rows["self_triggered"]["com_bar"][0] / rows["constant"]["com_bar"][0]
    print(f"Com ratio self/constant: {ratio:.4f}")
    dump({"trials": args.trials, "first_seed": args.seed, "rows": rows, "com_ratio": ratio},
         out / "stationary.json")
    for key, label in (("ctime", "Ctime [steps]"), ("com_bar", "Com [msgs/robot/step]")):
        names = list(rows)
        write_svg(bars_svg(names, [rows[n][key][0] for n in names], [rows[n][key][1] for n in names],
                           f"{key}, {args.trials} trials", label), out / f"stationary_{key}.svg")


if __name__ == "__main__":
    main()
