"""Relative deviation between the rescaled discrete net and the smooth confocal net.

    python3 scripts/continuum_trend.py --L 5 10 20 50 100 200
"""
import argparse

from dconfocal.verify import continuum_deviation


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, nargs="+", default=[5, 10, 20, 50, 100, 200, 500])
    ap.add_argument("--base", type=int, nargs=2, default=[5, 1])
    args = ap.parse_args()
    prev = None
    print(f"{'L':>6} {'deviation':>12} {'L*dev':>10}")
    for L in args.L:
        d = continuum_deviation(L, base=tuple(args.base))
        note = "" if prev is None or d < prev else "  (not decreasing)"
        print(f"{L:6d} {d:12.4e} {L * d:10.4f}{note}")
        prev = d


if __name__ == "__main__":
    main()
