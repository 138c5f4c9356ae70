"""Render representative interval profiles as SVG figures.

Produces the parabola member, the constant-curvature member on the same
interval, and a wider-interval example, so the boundary tangency and the
family's shape variation are visible side by side.

Usage: python3 scripts/plot_ansatz.py --out-dir figures
"""

import argparse
import pathlib
import sys

from ckemlab.ansatz import find_ckem, solve_boundary_value
from ckemlab.plotting import plot_profile


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--m", type=int, default=2)
    args = ap.parse_args()

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    parabola = solve_boundary_value(args.m, 1.0, 2.0, 0.0)
    plot_profile(parabola, what="both", path=out / "parabola_member.svg")

    ckem = find_ckem(args.m, 1.0, 2.0)
    plot_profile(ckem.profile, what="both", path=out / "constant_curvature.svg")

    wide = solve_boundary_value(args.m, 0.5, 4.0, -1.0)
    plot_profile(wide, what="psi", path=out / "wide_interval.svg")

    print(f"wrote 3 figures to {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
