"""Small arbitrary-precision helpers used across the numerical core.

Everything here computes at the ambient mpmath precision (``mp.prec``).
Callers that need a specific precision wrap their work in
``mpmath.workprec(bits)``; nothing in this package mutates the global
precision behind the caller's back.
"""

from __future__ import annotations

from mpmath import exp, mpc, mpf, pi

__all__ = [
    "as_mpf",
    "eta_phase",
    "factorial",
    "pochhammer",
    "prec_to_dps",
]


def as_mpf(x) -> mpf:
    """Convert ``x`` (int/float/str/mpf) to mpf at the ambient precision."""
    return mpf(x)


def pochhammer(x, k: int):
    """Rising factorial (x)_k = x (x+1) ... (x+k-1) as a plain product.

    k is a small non-negative integer here (truncation orders), so the
    direct product is both fast and accurate.
    """
    if k < 0:
        raise ValueError("pochhammer order must be >= 0")
    acc = mpf(1)
    for i in range(k):
        acc *= x + i
    return acc


def factorial(n: int):
    if n < 0:
        raise ValueError("factorial of negative integer")
    acc = mpf(1)
    for i in range(2, n + 1):
        acc *= i
    return acc


def eta_phase() -> mpc:
    """The sextic phase unit exp(i pi / 3) at the ambient precision."""
    return exp(mpc(0, 1) * pi / 3)


def prec_to_dps(prec_bits: int) -> int:
    """Decimal digits that faithfully represent a binary precision."""
    return int(prec_bits / 3.3219280948873626) + 1
