"""Late-coefficient asymptotics: an independent validation channel.

The coefficients a_n(kappa) of a formal solution grow factorially, and their
leading exponential behaviour is controlled by the Stokes multipliers of the
opposite singular direction:

    a_n(kappa) ~ -(1/3 pi) (2 kappa s0)^{-n/3} Gamma((tau(kappa) - tau(-kappa) + n)/3)
                 * [ sigma_0(kappa) EX_0(n) + eta^{2n} sigma_1(kappa) EX_1(n)
                     + eta^{4n} sigma_2(kappa) EX_2(n) ],

where the EX_j are stretched exponentials in n^{2/3} and n^{1/3} built from
t10 and t20, one for each cube-root branch.  For kappa = -1 the fractional
powers of (2 kappa s0) carry the branch phase eta^j = exp(i pi j / 3) per
negative cube root, matching the phase convention of the multiplier sums.

A pipeline whose multipliers are right must therefore reproduce the exact
recurrence coefficients ratio-to-1 as n grows; only the leading order is
implemented (relative corrections O(1/n) are omitted), so the check is a
trend criterion over a window of n, not a fixed tolerance at one n.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import exp, gamma, mpc, mpf, pi

from .frame import Frame, _check_kappa
from .special import eta_phase
from .stokes import StokesSet

__all__ = ["LateTermModel", "late_coeff_prediction", "ex_factors", "l_combinations"]


@dataclass(frozen=True)
class LateTermModel:
    """Inputs of the late-coefficient formula for one sign kappa."""

    kappa: int
    s0: object
    t10: object
    t20: object
    tau_self: object
    tau_other: object
    sigma: tuple  # (sigma_0(kappa), sigma_1(kappa), sigma_2(kappa))

    @classmethod
    def from_parts(cls, frame: Frame, stokes: StokesSet, kappa: int) -> "LateTermModel":
        _check_kappa(kappa)
        return cls(
            kappa=kappa,
            s0=frame.s0,
            t10=frame.t10,
            t20=frame.t20,
            tau_self=frame.tau(kappa),
            tau_other=frame.tau(-kappa),
            sigma=tuple(stokes.sigma[(n, kappa)] for n in (0, 1, 2)),
        )


def _branch_roots(model: LateTermModel):
    """(2 kappa s0)^{-1/3} and (2 kappa s0)^{-2/3} on the multiplier branch:
    the negative cube root carries eta per third."""
    eta = eta_phase()
    r1 = (2 * model.s0) ** (-mpf(1) / 3)
    r2 = (2 * model.s0) ** (-mpf(2) / 3)
    if model.kappa == 1:
        return r1, r2, eta
    return eta * r1, eta ** 2 * r2, eta


def ex_factors(model: LateTermModel, n: int):
    """The three stretched exponentials EX_0, EX_1, EX_2 at index n.

    EX_j(n) = exp( w^{(j)}_1 (n/3)^{2/3} (2 k s0)^{-2/3} (-2 k t10)
                 + w^{(j)}_2 (n/3)^{1/3} (2 k s0)^{-1/3} (-2 k t20) ),

    with cube-root weights (w_1, w_2) = (1, 1), (eta^4, eta^2), (eta^2, eta^4).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    r1, r2, eta = _branch_roots(model)
    kappa = model.kappa
    x = (mpf(n) / 3) ** (mpf(2) / 3) * r2 * (-2 * kappa * model.t10)
    y = (mpf(n) / 3) ** (mpf(1) / 3) * r1 * (-2 * kappa * model.t20)
    ex0 = exp(x + y)
    ex1 = exp(eta ** 4 * x + eta ** 2 * y)
    ex2 = exp(eta ** 2 * x + eta ** 4 * y)
    return ex0, ex1, ex2


def l_combinations(model: LateTermModel, n: int):
    """eta-weighted combinations isolating one identifying term each:

        L0 = (EX0 + EX1 + EX2)/3           = 1 + ...
        L1 = (EX0 + eta^2 EX1 + eta^4 EX2)/3 = x-term + ...
        L2 = (EX0 + eta^4 EX1 + eta^2 EX2)/3 = y-term + ...

    and L0 + L1 + L2 = EX0 exactly, since 1 + eta^2 + eta^4 = 0.
    """
    ex0, ex1, ex2 = ex_factors(model, n)
    eta = eta_phase()
    third = mpf(1) / 3
    l0 = third * (ex0 + ex1 + ex2)
    l1 = third * (ex0 + eta ** 2 * ex1 + eta ** 4 * ex2)
    l2 = third * (ex0 + eta ** 4 * ex1 + eta ** 2 * ex2)
    return l0, l1, l2


def late_coeff_prediction(model: LateTermModel, n: int) -> mpc:
    """Leading-order prediction of a_n(kappa) for large n:

        -(1/3 pi) (2 kappa s0)^{-n/3} Gamma((tau(kappa) - tau(-kappa) + n)/3)
          [ sigma_0 EX_0(n) + eta^{2n} sigma_1 EX_1(n) + eta^{4n} sigma_2 EX_2(n) ].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    r1, _r2, eta = _branch_roots(model)
    ex0, ex1, ex2 = ex_factors(model, n)
    s = model.sigma
    bracket = (
        s[0] * ex0
        + eta ** ((2 * n) % 6) * s[1] * ex1
        + eta ** ((4 * n) % 6) * s[2] * ex2
    )
    root_n = (2 * model.s0) ** (-mpf(n) / 3)
    if model.kappa == -1:
        root_n *= eta ** (n % 6)
    g = gamma((model.tau_self - model.tau_other + n) / 3)
    return -g * root_n * bracket / (3 * pi)
