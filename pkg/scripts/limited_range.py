"""Limited communication range on the unit square: chain merging and convergence."""

import argparse

from sttrack.engine import run
from sttrack.svg import series_svg, trajectories_svg, write_svg

from _common import dump, out_dir, scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--out", default="out/limited")
    args = ap.parse_args()
    out = out_dir(args.out)
    rows = []
    for seed in range(args.trials):
        tr = run(scenario("limited_square.yaml", [f"seed={seed}"]))
        chains = [r.chains for r in tr.records]
        rows.append({"seed": seed, "initial_chains": chains[0],
                     "single_chain_at": chains.index(1) if 1 in chains else None,
                     "ctime": tr.ctime, "final_chains": chains[-1]})
        print(f"seed {seed:2d}: chains {chains[0]} -> {chains[-1]}, single chain at "
              f"{rows[-1]['single_chain_at']}, Ctime {tr.ctime}")
        if seed == 0:
            write_svg(trajectories_svg(tr), out / "limited_trajectories.svg")
            write_svg(series_svg({"Cerr": tr.cerr_series()}, "Convergence error", "Cerr [rad]",
                                 dt=tr.config.dt), out / "limited_cerr.svg")
    dump({"trials": args.trials, "rows": rows}, out / "limited.json")


if __name__ == "__main__":
    main()
