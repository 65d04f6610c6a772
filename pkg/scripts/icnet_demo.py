"""Perturb a rhombic line grid, repair it with the solver and print the theorem residuals."""
import argparse
import json

from dconfocal import icnet


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=8)
    ap.add_argument("--eps", type=float, default=1e-3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-o", "--output", help="write the solved grid here")
    args = ap.parse_args()

    start = icnet.perturb_grid(icnet.rhombic_grid(args.size), args.eps, seed=args.seed)
    print(f"seed grid: max Pitot residual {icnet.max_pitot(start):.3e}")
    res = icnet.icnet_solve(start)
    print("solver history: " + " ".join(f"{r:.1e}" for r in res.history))
    rep = icnet.icnet_report(res.grid)
    print(json.dumps(rep, indent=1))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(res.grid.to_json())


if __name__ == "__main__":
    main()
