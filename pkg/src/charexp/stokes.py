"""Connection coefficients and Stokes multipliers.

The central objects are the e-coefficients e(-kappa; n1, n2): lambda-free
connection constants between the formal solutions attached to the two
singular directions kappa = +1, -1 of the kernel geometry.  Each one is
recovered from the large-m asymptotics of the b-table,

    e(-k; n1, n2) = [ -pi * G(m, n1, n2) * (2 k s0)^m * b(k; m, n1, n2)
                      - sum over (q1, q2) < (n1, n2) of already-known e's
                        times gamma ratios and correction kernels ]
                    / [ 1 + sum_{k'=1..K} ratio_{k'} * H(-k; k', 0, 0; n1, n2) ],

where G is a pure gamma-function ratio, the kernels H carry the first K
orders of the 1/m correction series, and the (q1, q2) sum couples lower
grading levels (grading = 2 n1 + n2) through binomial tail factors in
t10, t20.  The asymptotic index m and the correction order K are free
accuracy knobs: the exact e's do not depend on them, the truncated values
do, and the difference across (m, K) settings is the honest error estimate
attached to every entry.

From the e-grids, the real partial sums S0, S1, S2(kappa) collect the
grading levels mod 3 with geometric weights (2 kappa s0)^{-level}, and the
six Stokes multipliers sigma_{0,1,2}(+-1) are fixed phase combinations of
the S's with the sextic unit eta = exp(i pi / 3).

Everything is real until the sigma assembly; the e-entries are stored as mpf.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from mpmath import loggamma, exp, mp, mpf, pi

from .coeffs import BTable, b_table
from .errors import (
    IllConditionedSolveError,
    LambdaDegenerateError,
    PrecisionExhaustedError,
)
from .frame import EquationParams, Frame, _check_kappa
from .special import eta_phase, factorial, pochhammer

__all__ = [
    "EGrid",
    "StokesSet",
    "h_coeff",
    "e_grid",
    "e_limit_estimate",
    "stokes_multipliers",
    "compute_stokes_set",
]

# defaults for the accuracy knobs; the truncation behaviour of the
# correction series is unspecified theory-side, so these are empirical
M_START = 40
M_STEP = 10
M_CAP = 200
DEFAULT_K = 10
DEFAULT_LMAX = 12
STABILIZE_RTOL = mpf("1e-14")
LEVEL_TOL = mpf("1e-8")
_DEGENERATE_EPS = mpf("1e-9")


@dataclass(frozen=True)
class EGrid:
    """e(-kappa_source; n1, n2) for gradings 2 n1 + n2 <= lmax.

    ``err`` holds per-entry estimates max(|value(K) - value(K-1)|,
    |value(m) - value(m - m_delta)|); ``variants`` retains those two
    alternative grids so downstream sums can be re-run against them for
    error propagation.
    """

    kappa_source: int
    lmax: int
    m_used: int
    K_used: int
    entries: dict
    err: dict
    variants: dict = field(default_factory=dict)
    warnings: tuple = ()

    def value(self, n1: int, n2: int):
        return self.entries[(n1, n2)]

    def with_entries(self, entries: dict) -> "EGrid":
        return replace(self, entries=entries, variants={})


@dataclass(frozen=True)
class StokesSet:
    """Partial sums S0, S1, S2(+-1), the six multipliers sigma_n(+-1), and eta.

    S is keyed by (j, kappa) with j in {0, 1, 2}; sigma by (n, kappa) with
    n in {0, 1, 2}.  ``level_contributions`` keeps the per-level terms of
    each S sum and ``converged`` whether the last two levels dropped below
    the stop tolerance before the grid's lmax ran out (a warning, not an
    error: the sums converge but no rate is guaranteed).
    """

    s0: object
    S: dict
    sigma: dict
    eta: object
    level_contributions: dict
    converged: dict
    warnings: tuple = ()

    def recompute_sigma(self) -> dict:
        """Re-assemble the sigma's from the stored S values (consistency check)."""
        return _sigma_from_S(self.s0, self.S)


def grid_indices(lmax: int):
    """All (n1, n2) with 2 n1 + n2 <= lmax, in increasing grading."""
    idx = [
        (n1, n2)
        for n1 in range(lmax // 2 + 1)
        for n2 in range(lmax - 2 * n1 + 1)
    ]
    idx.sort(key=lambda t: (2 * t[0] + t[1], t[0]))
    return idx


def h_coeff(
    frame: Frame,
    kappa: int,
    k: int,
    l1: int,
    l2: int,
    q1: int,
    q2: int,
    b_other: BTable,
):
    """Correction kernel H(-kappa; k, l1, l2; q1, q2) of the e-coefficient solve:

        sum_{j = l1+l2 .. k}  (mu(kappa))_{k-j} / ( (k-j)! (1 + mu(-kappa) + phi(q))_j )
                              * (-2 kappa s0)^j * b(-kappa; j, l1, l2),

    with phi(q) = (2 q1 + q2)/3.  Empty when l1 + l2 > k; equals 1 at k = 0.
    Note H depends on (q1, q2) only through phi(q).
    """
    _check_kappa(kappa)
    if b_other.kappa != -kappa:
        raise ValueError("b_other must be the table for -kappa")
    mu_k = frame.mu(kappa)
    mu_mk = frame.mu(-kappa)
    phi_q = mpf(2 * q1 + q2) / 3
    base = 1 + mu_mk + phi_q
    acc = mpf(0)
    den_poch = mpf(1)  # running (base)_j
    for i in range(l1 + l2):
        den_poch *= base + i
    for j in range(l1 + l2, k + 1):
        if abs(den_poch) < _DEGENERATE_EPS:
            raise LambdaDegenerateError(
                f"(1 + mu({-kappa}) + {mp.nstr(phi_q, 6)})_{j} is nearly zero; re-choose lambda"
            )
        bv = b_other.get(j, l1, l2)
        if bv != 0:
            acc += (
                pochhammer(mu_k, k - j)
                / factorial(k - j)
                / den_poch
                * (-2 * kappa * frame.s0) ** j
                * bv
            )
        den_poch *= base + j
    return acc


class _GridEngine:
    """Shared machinery for evaluating one source-kappa grid at several (m, K).

    Caches the m-independent pieces: the b-tables (grown on demand) and the
    kernels H keyed by (k, l1, l2, grading of q).  A grid evaluation at a
    given (m, K) is then a small assembly pass.
    """

    def __init__(self, frame, params, kappa, lmax, K, b_self=None, b_other=None):
        _check_kappa(kappa)
        self.frame = frame
        self.params = params
        self.kappa = kappa
        self.lmax = lmax
        self.K = K
        n1cap = max(lmax // 2, 0)
        n2cap = lmax
        self.b_self = b_self if b_self is not None else b_table(
            frame, params, kappa, 0, n1cap, n2cap
        )
        other_M = max(K, 0)
        self.b_other = b_other if b_other is not None else b_table(
            frame, params, -kappa, other_M, min(other_M, max(n1cap, 1)), min(other_M, max(n2cap, 1))
        )
        self._h = {}
        self._jf1 = self._powers_over_factorials(-2 * kappa * frame.t10, lmax // 2)
        self._jf2 = self._powers_over_factorials(-2 * kappa * frame.t20, lmax)
        self.indices = grid_indices(lmax)

    @staticmethod
    def _powers_over_factorials(x, jmax):
        vals = [mpf(1)]
        for j in range(1, jmax + 1):
            vals.append(vals[-1] * x / j)
        return vals

    def _H(self, k, l1, l2, g):
        key = (k, l1, l2, g)
        val = self._h.get(key)
        if val is None:
            q1, q2 = 0, g  # only the grading enters h_coeff
            val = h_coeff(self.frame, self.kappa, k, l1, l2, q1, q2, self.b_other)
            self._h[key] = val
        return val

    def ensure_m(self, m: int) -> None:
        if self.b_self.M < m:
            self.b_self.extend(m)

    def grid_at(self, m: int, K: int, max_grading: int | None = None) -> dict:
        """Evaluate e(-kappa; n1, n2) for gradings <= max_grading at (m, K).

        max_grading=0 is the cheap probe used by the adaptive-m scan: only
        the origin entry, which has no lower-grading couplings.
        """
        if K > self.K:
            raise ValueError("K exceeds the engine's kernel order")
        if m <= K:
            raise ValueError("asymptotic index m must exceed the correction order K")
        if max_grading is None or max_grading > self.lmax:
            max_grading = self.lmax
        self.ensure_m(m)
        frame, kappa = self.frame, self.kappa
        mu_k = frame.mu(kappa)
        mu_mk = frame.mu(-kappa)
        s0 = frame.s0

        # per-grading data: phi = g/3, log Gamma(-mu(-kappa) - phi + m), and the
        # Pochhammer ratios (1 + mu(-k) + phi)_k' / (1 + mu(-k) + phi - m)_k'
        lgden = {}
        ratio = {}
        for g in range(max_grading + 1):
            phi = mpf(g) / 3
            arg = -mu_mk - phi + m
            if arg <= 0:
                raise PrecisionExhaustedError(
                    f"gamma argument {mp.nstr(arg, 6)} <= 0 at m={m}; increase m"
                )
            lgden[g] = loggamma(arg)
            base = 1 + mu_mk + phi
            r = []
            num = mpf(1)
            den = mpf(1)
            for k in range(1, K + 1):
                num *= base + (k - 1)
                den *= base - m + (k - 1)
                r.append(num / den)
            ratio[g] = r

        lg_pref = loggamma(mpf(1) + m) - loggamma(1 + mu_k + m)
        pow_2ks0 = (2 * kappa * s0) ** m

        # correction kernel Omega(g; l1, l2) = [l=0] + sum_k ratio_k(g) H(k, l1, l2, g)
        omega = {}
        for g in range(max_grading + 1):
            r = ratio[g]
            for l1 in range(max_grading // 2 + 1):
                for l2 in range(max_grading + 1):
                    if l1 + l2 > K and (l1, l2) != (0, 0):
                        continue
                    acc = mpf(1) if (l1, l2) == (0, 0) else mpf(0)
                    for k in range(max(1, l1 + l2), K + 1):
                        H = self._H(k, l1, l2, g)
                        if H != 0:
                            acc += r[k - 1] * H
                    omega[(g, l1, l2)] = acc

        e = {}
        for (n1, n2) in self.indices:
            g_n = 2 * n1 + n2
            if g_n > max_grading:
                continue
            pref = (
                -pi
                * exp(lg_pref - lgden[g_n])
                * pow_2ks0
                * self.b_self.get(m, n1, n2)
            )
            qsum = mpf(0)
            for q1 in range(n1 + 1):
                for q2 in range(n2 + 1):
                    if (q1, q2) == (n1, n2):
                        continue
                    g_q = 2 * q1 + q2
                    gr = exp(lgden[g_q] - lgden[g_n])
                    ker = mpf(0)
                    for l1 in range(n1 - q1 + 1):
                        jf1 = self._jf1[n1 - q1 - l1]
                        for l2 in range(n2 - q2 + 1):
                            if l1 + l2 > K and (l1, l2) != (0, 0):
                                continue
                            ker += omega[(g_q, l1, l2)] * jf1 * self._jf2[n2 - q2 - l2]
                    qsum += e[(q1, q2)] * gr * ker
            div = omega[(g_n, 0, 0)]
            if abs(div) < _DEGENERATE_EPS:
                raise IllConditionedSolveError(
                    f"diagonal bracket {mp.nstr(div, 6)} too close to zero at "
                    f"(n1, n2) = ({n1}, {n2}), m={m}"
                )
            e[(n1, n2)] = (pref - qsum) / div
        return e


def e_grid(
    frame: Frame,
    params: EquationParams,
    kappa: int,
    Lmax: int,
    m: int,
    K: int,
    *,
    b_self: BTable | None = None,
    b_other: BTable | None = None,
    m_delta: int = M_STEP,
    with_variants: bool = True,
) -> EGrid:
    """Compute the e-coefficient grid for source sign ``kappa`` at fixed (m, K).

    Entries are filled in increasing grading 2 n1 + n2, each solving the
    connection relation for its diagonal term using the already-known
    lower-grading entries.  With ``with_variants`` the grid is also
    evaluated at (m - m_delta, K) and (m, K - 1), and every entry carries
    the error estimate max of the two differences.
    """
    engine = _GridEngine(frame, params, kappa, Lmax, K, b_self=b_self, b_other=b_other)
    return _grid_from_engine(engine, m, K, m_delta=m_delta, with_variants=with_variants)


def _grid_from_engine(engine, m, K, *, m_delta=M_STEP, with_variants=True, warnings=()):
    main = engine.grid_at(m, K)
    variants = {}
    err = {}
    if with_variants:
        variants["m_minus"] = engine.grid_at(m - m_delta, K) if m - m_delta > K else {}
        variants["K_minus"] = engine.grid_at(m, K - 1) if K >= 1 else {}
        for key, val in main.items():
            diffs = [abs(val - var[key]) for var in variants.values() if key in var]
            err[key] = max(diffs) if diffs else mpf(0)
    return EGrid(
        kappa_source=engine.kappa,
        lmax=engine.lmax,
        m_used=m,
        K_used=K,
        entries=main,
        err=err,
        variants=variants,
        warnings=tuple(warnings),
    )


def e_limit_estimate(
    frame: Frame,
    kappa: int,
    n1: int,
    n2: int,
    m: int,
    b_tab: BTable,
):
    """Finite-m evaluation of the bare limit formula for e(-kappa; n1, n2):

        -pi * Gamma(1+m) / ( Gamma(1+mu(kappa)+m) Gamma(-mu(-kappa) - phi(n) + m) )
            * (2 kappa s0)^m
            * sum_{j1<=n1, j2<=n2} b(kappa; m, j1, j2)
                  (2 kappa t10)^{n1-j1}/(n1-j1)!  (2 kappa t20)^{n2-j2}/(n2-j2)!

    Converges to the exact value only as m -> infinity (relative error
    O(1/m)); used as a sanity cross-check on the corrected solve, never as
    the production path.
    """
    _check_kappa(kappa)
    if b_tab.kappa != kappa:
        raise ValueError("b_tab must be the table for kappa")
    mu_k = frame.mu(kappa)
    mu_mk = frame.mu(-kappa)
    phi = mpf(2 * n1 + n2) / 3
    arg = -mu_mk - phi + m
    if arg <= 0 or 1 + mu_k + m <= 0:
        raise PrecisionExhaustedError("gamma argument non-positive; increase m")
    lg = loggamma(mpf(1) + m) - loggamma(1 + mu_k + m) - loggamma(arg)
    acc = mpf(0)
    for j1 in range(n1 + 1):
        f1 = (2 * kappa * frame.t10) ** (n1 - j1) / factorial(n1 - j1)
        for j2 in range(n2 + 1):
            bv = b_tab.get(m, j1, j2)
            if bv != 0:
                acc += bv * f1 * (2 * kappa * frame.t20) ** (n2 - j2) / factorial(n2 - j2)
    return -pi * exp(lg) * (2 * kappa * frame.s0) ** m * acc


def _sigma_from_S(s0, S):
    eta = eta_phase()
    a1 = (2 * s0) ** (-mpf(1) / 3)
    a2 = (2 * s0) ** (-mpf(2) / 3)
    sigma = {}
    for n in (0, 1, 2):
        sigma[(n, 1)] = S[(0, 1)] + eta ** ((2 * n) % 6) * a1 * S[(1, 1)] \
            + eta ** ((4 * n) % 6) * a2 * S[(2, 1)]
        sigma[(n, -1)] = S[(0, -1)] + eta ** ((2 * n + 1) % 6) * a1 * S[(1, -1)] \
            + eta ** ((2 * (2 * n + 1)) % 6) * a2 * S[(2, -1)]
    return sigma


def stokes_multipliers(
    frame: Frame,
    egrid_plus: EGrid,
    egrid_minus: EGrid,
    Lmax: int | None = None,
    level_tol=LEVEL_TOL,
) -> StokesSet:
    """Assemble S0, S1, S2(+-1) and the six Stokes multipliers.

    S_j(kappa) sums the e(-kappa; n1, n2) of grading 2 n1 + n2 = 3 l + j
    with weight (2 kappa s0)^{-l}, level by level; the multipliers are

        sigma_n(+1) = S0 + eta^{2n}   c S1 + eta^{4n}     c^2 S2,
        sigma_n(-1) = S0 + eta^{2n+1} c S1 + eta^{2(2n+1)} c^2 S2,

    with c = (2 s0)^{-1/3} and eta = exp(i pi / 3).  A sum whose last two
    level contributions have not dropped below ``level_tol`` (relative to
    the sum) is flagged as unconverged in the diagnostics -- a warning,
    not an error.
    """
    if egrid_plus.kappa_source != 1 or egrid_minus.kappa_source != -1:
        raise ValueError("expected the source-(+1) and source-(-1) grids in that order")
    s0 = frame.s0
    if Lmax is None:
        Lmax = min(egrid_plus.lmax, egrid_minus.lmax)
    S = {}
    contributions = {}
    converged = {}
    warnings = []
    for kappa, grid in ((1, egrid_plus), (-1, egrid_minus)):
        by_level = {}
        for (n1, n2), v in grid.entries.items():
            g = 2 * n1 + n2
            if g > Lmax:
                continue
            by_level.setdefault(g, mpf(0))
            by_level[g] += v
        for j in (0, 1, 2):
            total = mpf(0)
            terms = []
            levels = sorted(g for g in by_level if g % 3 == j)
            for g in levels:
                l = g // 3
                term = (2 * kappa * s0) ** (-l) * by_level[g]
                total += term
                terms.append(term)
            S[(j, kappa)] = total
            contributions[(j, kappa)] = tuple(terms)
            scale = max(mpf(1), abs(total))
            tail_ok = len(terms) >= 2 and all(
                abs(t) <= level_tol * scale for t in terms[-2:]
            )
            converged[(j, kappa)] = tail_ok
            if not tail_ok:
                warnings.append(
                    f"S{j}({kappa:+d}) level sum not below tolerance at lmax={Lmax}; "
                    "result carries truncation error"
                )
    sigma = _sigma_from_S(s0, S)
    return StokesSet(
        s0=s0,
        S=S,
        sigma=sigma,
        eta=eta_phase(),
        level_contributions=contributions,
        converged=converged,
        warnings=tuple(warnings),
    )


def compute_stokes_set(
    frame: Frame,
    params: EquationParams,
    *,
    Lmax: int = DEFAULT_LMAX,
    K: int = DEFAULT_K,
    m="adaptive",
    m_start: int = M_START,
    m_step: int = M_STEP,
    m_cap: int = M_CAP,
    stabilize_rtol=STABILIZE_RTOL,
    level_tol=LEVEL_TOL,
):
    """End-to-end driver: e-grids for both source signs, then the StokesSet.

    With m = "adaptive" the asymptotic index is raised from ``m_start`` in
    steps of ``m_step`` until the whole grid (weighted by the level factors
    it will carry in the S sums) stabilizes to ``stabilize_rtol``, or
    ``m_cap`` is reached (then a warning is recorded).  Returns
    (stokes_set, egrid_plus, egrid_minus).
    """
    grids = {}
    for kappa in (1, -1):
        engine = _GridEngine(frame, params, kappa, Lmax, K)
        warnings = []
        if m == "adaptive":
            prev = None
            m_used = m_start
            for m_try in range(m_start, m_cap + 1, m_step):
                e00 = engine.grid_at(m_try, K, max_grading=0)[(0, 0)]
                m_used = m_try
                if prev is not None and abs(e00 - prev) <= stabilize_rtol * max(
                    mpf(1), abs(e00)
                ):
                    break
                prev = e00
            else:
                warnings.append(
                    f"e-grid(source {kappa:+d}) origin entry did not stabilize to "
                    f"{mp.nstr(mpf(stabilize_rtol), 3)} by m={m_cap}; "
                    "error estimates reflect the residual drift"
                )
            grids[kappa] = _grid_from_engine(
                engine, m_used, K, m_delta=m_step, warnings=warnings
            )
        else:
            grids[kappa] = _grid_from_engine(engine, int(m), K, m_delta=m_step)
    sset = stokes_multipliers(frame, grids[1], grids[-1], Lmax, level_tol=level_tol)
    return sset, grids[1], grids[-1]
