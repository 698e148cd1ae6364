"""Equation parameters and the derived exponent frame.

The differential equation under study is

    z^2 f'' + z f' - [ sum_{m=1..6} D_m z^{-m} + L^2 + sum_{m=1..6} B_m z^m ] f = 0,

with thirteen real parameters D1..D6, L, B1..B6, an irregular singular point
of rank three at the origin (when D6 != 0) and one at infinity (when B6 != 0).
The formal solutions at infinity carry the exponential factor
exp(+-P(z)) z^{-tau(+-1)} with P(z) = p3 z^3 + p2 z^2 + p1 z; this module
derives p1, p2, p3, the power exponents tau(+-1), the singular-point
coordinates (s0, t10, t20) = (p3, p2, p1) of the associated kernel geometry,
and the auxiliary exponents mu(+-1) = (lambda + tau(+-1) - 3) / 3 driven by
the computational parameter lambda.

All values are mpf at the ambient mpmath precision; a Frame is immutable and
safe to share between concurrent computations.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import isfinite, mp, mpf, nint, pi, sqrt

from .errors import InvalidParametersError, LambdaDegenerateError
from .special import as_mpf

__all__ = ["EquationParams", "Frame", "derive_frame", "choose_lambda"]

#: |mu - nearest integer| below this raises LambdaDegenerateError.  Far above
#: precision noise, far below any natural parameter spacing.
INTEGER_GUARD = 1e-6


@dataclass(frozen=True)
class EquationParams:
    """The thirteen real parameters of the equation.

    D and B are 6-tuples (coefficients of z^{-m} and z^{m}); L >= 0 and
    B6 > 0 are standing assumptions.
    """

    D: tuple
    L: object
    B: tuple

    def __init__(self, D, L, B):
        D = tuple(as_mpf(x) for x in D)
        B = tuple(as_mpf(x) for x in B)
        L = as_mpf(L)
        if len(D) != 6 or len(B) != 6:
            raise InvalidParametersError("D and B must each have six entries")
        if not all(isfinite(x) for x in (*D, L, *B)):
            raise InvalidParametersError("parameters must be finite")
        if not B[5] > 0:
            raise InvalidParametersError(f"B6 must be positive, got {B[5]}")
        if L < 0:
            raise InvalidParametersError(f"L must be non-negative, got {L}")
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "B", B)

    def d(self, m: int):
        """D_m with 1-based index m."""
        return self.D[m - 1]

    def b(self, m: int):
        """B_m with 1-based index m."""
        return self.B[m - 1]


@dataclass(frozen=True)
class Frame:
    """Derived exponent bookkeeping shared by every downstream module.

    nu1 = nu2 = 1 is hard-wired: it is the canonical choice for the
    integer exponents of the kernel expansion, and keeping it fixed keeps
    the index bookkeeping of the connection formulas single-path.
    """

    p1: object
    p2: object
    p3: object
    s0: object
    t10: object
    t20: object
    tau_plus: object
    tau_minus: object
    lam: object
    mu_plus: object
    mu_minus: object
    nu1: int = 1
    nu2: int = 1

    def tau(self, kappa: int):
        return self.tau_plus if kappa == 1 else self.tau_minus

    def mu(self, kappa: int):
        return self.mu_plus if kappa == 1 else self.mu_minus


def _check_kappa(kappa: int) -> None:
    if kappa not in (1, -1):
        raise ValueError(f"kappa must be +1 or -1, got {kappa!r}")


def derive_frame(params: EquationParams, lam, integer_guard: float = INTEGER_GUARD) -> Frame:
    """Derive the full exponent frame for ``params`` at computational parameter ``lam``.

    p3 = sqrt(B6)/3, p2 = B5/(12 p3), p1 = (B4 - 4 p2^2)/(6 p3), and
    tau(kappa) = 3/2 + kappa * x with x = (-B3/6 + 2 p1 p2 / 3)/p3, so
    tau(1) + tau(-1) = 3 exactly up to rounding.  The exponents satisfy
    3 mu(kappa) = lam + tau(kappa) - 3.

    Raises LambdaDegenerateError when either mu(+-1) falls within
    ``integer_guard`` of an integer; the caller should then re-choose lam
    (see choose_lambda).
    """
    lam = as_mpf(lam)
    if not isfinite(lam):
        raise InvalidParametersError("lambda must be finite")
    p3 = sqrt(params.B[5]) / 3
    p2 = params.B[4] / (12 * p3)
    p1 = (params.B[3] - 4 * p2 ** 2) / (6 * p3)
    x = (-params.B[2] / 6 + 2 * p1 * p2 / 3) / p3
    tau_plus = mpf(3) / 2 + x
    tau_minus = mpf(3) / 2 - x
    mu_plus = (lam + tau_plus - 3) / 3
    mu_minus = (lam + tau_minus - 3) / 3
    for mu, kappa in ((mu_plus, 1), (mu_minus, -1)):
        if abs(mu - nint(mu)) < integer_guard:
            raise LambdaDegenerateError(
                f"mu({kappa}) = {mp.nstr(mu, 10)} is within {integer_guard} of an integer; "
                "re-choose lambda"
            )
    return Frame(
        p1=p1,
        p2=p2,
        p3=p3,
        s0=p3,
        t10=p2,
        t20=p1,
        tau_plus=tau_plus,
        tau_minus=tau_minus,
        lam=lam,
        mu_plus=mu_plus,
        mu_minus=mu_minus,
    )


def choose_lambda(params: EquationParams, integer_guard: float = INTEGER_GUARD):
    """Pick the computational parameter lambda.

    Defaults to lam = L, the choice that annihilates the large terms of
    the asymptotic correction series.  If that lands an exponent mu(+-1)
    within the integer guard, L is shifted by multiples of the fixed
    irrational offset 1/pi until both exponents clear the guard; the
    offset is deterministic, so the returned lambda is reproducible.
    """
    for k in range(64):
        lam = params.L + k / pi
        try:
            derive_frame(params, lam, integer_guard)
        except LambdaDegenerateError:
            continue
        return lam
    # 64 failures would require mu to track the irrational offset; unreachable.
    raise LambdaDegenerateError("could not find a non-degenerate lambda")
