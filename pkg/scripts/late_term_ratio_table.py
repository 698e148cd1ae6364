#!/usr/bin/env python3
"""Validation trend: the late formal-solution coefficients a_n against the
multiplier-driven prediction, printed as a ratio table over n.

A correct multiplier set drives the ratio to 1; the pointwise deviation
beats with n mod 3 wherever the three-term bracket partially cancels, so
read the windowed trend, not single rows.

Usage: python scripts/late_term_ratio_table.py [params_file] [n_max]
"""

import sys

from mpmath import mp, workprec

from charexp import a_series, late_coeff_prediction, solve
from charexp.asymptotics import LateTermModel
from charexp.cli import config_from_file


def main() -> int:
    if len(sys.argv) > 1:
        config = config_from_file(sys.argv[1], {"lmax": 24})
    else:
        from charexp import EquationParams
        from charexp.cli import RunConfig

        params = EquationParams(
            D=[0.9, -0.4, 0.7, -1.1, 0.2, 1.3], L="0.5", B=[0.8, -0.6, 1.1, 0, 0, 9]
        )
        config = RunConfig(params=params, lmax=24)
    n_max = int(sys.argv[2]) if len(sys.argv) > 2 else 120
    with workprec(config.precision_bits):
        out = solve(config.params, config.settings())
        if not out.converged:
            print("# warning: multiplier level sums unconverged; trend may be meaningless")
        model = LateTermModel.from_parts(out.frame, out.stokes, 1)
        series = a_series(out.frame, config.params, 1, n_max)
        print(f"{'n':>5} {'a_n':>16} {'prediction':>16} {'|ratio - 1|':>12}")
        for n in range(30, n_max + 1, 3):
            pred = late_coeff_prediction(model, n)
            ratio = series[n] / pred
            print(
                f"{n:>5} {mp.nstr(series[n], 8):>16} {mp.nstr(pred.real, 8):>16} "
                f"{mp.nstr(abs(ratio - 1), 3):>12}"
            )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
