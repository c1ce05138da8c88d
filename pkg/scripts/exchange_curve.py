"""Trace the critical exchange curve for constant growth rates.

For each side-2 rate below the uncoupled side-2 level, finds the side-1
rate at which the coupled linearization is exactly critical.  The curve
decreases from the uncoupled side-1 level (rate -> -infinity) through the
origin toward the vertical asymptote.  Writes hcurve.csv plus a sidecar
holding both uncoupled levels; render it with the plots package.
"""

import argparse
from pathlib import Path

from membrana import trace_h, two_interval, write_hcurve_csv

SAMPLES = [-1000.0, -700.0, -500.0, -350.0, -250.0, -180.0, -130.0, -90.0,
           -60.0, -40.0, -25.0, -15.0, -9.0, -5.0, -3.0, -1.5, -0.7, -0.2,
           0.0, 0.06]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--gamma1", type=float, default=1.0)
    parser.add_argument("--gamma2", type=float, default=0.1)
    parser.add_argument("--nodes", type=int, default=257, help="nodes per subdomain")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    g = two_interval(0.0, 0.5, 1.0, args.nodes, args.nodes)
    curve = trace_h(SAMPLES, args.gamma1, args.gamma2, g)
    write_hcurve_csv(curve, out / "hcurve.csv")
    print(f"sigma1 = {curve.sigma1!r}, sigma2 = {curve.sigma2!r}")
    print(f"H({SAMPLES[0]:g}) = {curve.h_values[0]!r} "
          f"(gap to sigma1 {abs(curve.h_values[0] - curve.sigma1):.3g})")
    print(f"wrote {out / 'hcurve.csv'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
