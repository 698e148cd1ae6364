#!/usr/bin/env python3
"""Truncation study: the origin connection coefficient e(-kappa; 0, 0) as a
function of the asymptotic index m and the correction order K.

The exact value is (m, K)-independent; the computed one is not, and no
a-priori rule fixes how large m must be.  This prints the drift so the
adaptive defaults can be sanity-checked on a concrete parameter set.

Usage: python scripts/e_convergence_study.py [params_file]
"""

import sys

from mpmath import mp, workprec

from charexp import derive_frame, e_grid
from charexp.cli import config_from_file


def default_config():
    from charexp import EquationParams
    from charexp.cli import RunConfig

    params = EquationParams(
        D=[0.5, -0.2, 0.8, -0.4, 0.3, 1.2], L="0.7", B=[0.4, 0.6, -0.5, 0.9, -0.7, 6]
    )
    return RunConfig(params=params)


def main() -> int:
    config = config_from_file(sys.argv[1], {}) if len(sys.argv) > 1 else default_config()
    with workprec(config.precision_bits):
        params = config.params
        lam = params.L if config.lam == "auto" else mp.mpf(config.lam)
        frame = derive_frame(params, lam)
        print(f"# lambda = {mp.nstr(lam, 10)}")
        for kappa in (1, -1):
            print(f"# source kappa = {kappa:+d}")
            print(f"{'m':>5} {'K':>3}  {'e(0,0)':<45} {'drift vs previous m'}")
            prev = None
            for m in range(40, 161, 20):
                for K in (6, 10):
                    g = e_grid(frame, params, kappa, 0, m, K, with_variants=False)
                    v = g.value(0, 0)
                    drift = "" if prev is None or K != 10 else mp.nstr(abs(v - prev), 3)
                    print(f"{m:>5} {K:>3}  {mp.nstr(v, 40):<45} {drift}")
                    if K == 10:
                        prev = v
            print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
