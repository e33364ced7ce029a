"""Tabulate torus covering times against the density target.

Runs the orbit simulation for a ladder of eps values and fits the growth
exponent p in L ~ C / eps^p by least squares on the log-log pairs.  For
a badly approximable direction like (1, golden ratio) the fit should sit
near p = 1.

Usage:
    python3 scripts/covering_table.py
    python3 scripts/covering_table.py --direction 1,1.41421356 --eps 0.3,0.2,0.1,0.05
"""

import argparse
import math
import sys

from lattice_rotor.oracle import covering_time
from lattice_rotor.reporting import covering_csv

GOLDEN = "1.6180339887498948482"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--direction", default=f"1,{GOLDEN}", help="comma-separated coords")
    ap.add_argument("--eps", default="0.3,0.2,0.1,0.05,0.025", help="eps ladder")
    ap.add_argument("--cap", type=float, default=1e6)
    args = ap.parse_args(argv)

    direction = [float(c) for c in args.direction.split(",")]
    eps_values = [float(e) for e in args.eps.split(",")]

    rows = []
    pairs = []
    print(f"{'eps':>8}  {'L':>12}  {'cells':>8}")
    for eps in eps_values:
        out = covering_time(direction, eps, args.cap)
        if out.covered:
            print(f"{eps:>8g}  {out.L:>12.4f}  {out.cells_total:>8}")
            rows.append((repr(eps), repr(out.L)))
            pairs.append((math.log(1.0 / eps), math.log(out.L)))
        else:
            print(f"{eps:>8g}  {'not covered':>12}  {out.cells_total:>8}")
            rows.append((repr(eps), ""))

    if len(pairs) >= 2:
        n = len(pairs)
        sx = sum(x for x, _ in pairs)
        sy = sum(y for _, y in pairs)
        sxx = sum(x * x for x, _ in pairs)
        sxy = sum(x * y for x, y in pairs)
        slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
        print(f"fitted growth exponent p (L ~ C/eps^p): {slope:.3f}")

    if rows:
        sys.stdout.write(covering_csv(rows))
    return 0


if __name__ == "__main__":
    sys.exit(main())
