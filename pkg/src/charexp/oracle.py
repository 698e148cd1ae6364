"""Ground-truth oracles, independent of the Stokes pipeline.

Two channels, sharing no code with the connection-coefficient machinery:

* ``monodromy_trace_ode`` integrates the equation as a first-order system in
  (f, z f') once around the origin and returns the circuit matrix; its trace
  is 2 cos(2 pi omega) in any basis.  Fixed-order explicit Runge-Kutta with
  step halving, run at the ambient mpmath precision so the oracle is
  strictly more trustworthy than the pipeline it checks.

* ``hill_residual`` truncates the bilateral three-plus-band recurrence of the
  convergent annulus solution z^omega sum c_n z^n to a (2N+1)-dimensional
  homogeneous system and returns its smallest singular value, which dips to
  zero exactly when omega is a Floquet exponent.  Rows are normalized by the
  diagonal (-L + omega + n)(L + omega + n); rows whose normalizer nearly
  vanishes are rescaled by 1 + n^2 instead (and reported when asked).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from mpmath import exp, mp, mpc, mpf, pi

from .errors import AccuracyNotReachedError
from .frame import EquationParams

__all__ = ["MonodromySample", "monodromy_trace_ode", "hill_residual"]

RK4_ORDER = 4
DEFAULT_HILL_N = 80


@dataclass(frozen=True)
class MonodromySample:
    """One adaptive monodromy computation: the circuit matrix (row-major
    2x2), its trace, det (= 1 up to integration error), the step count of
    the accepted grid, and the step-halving error estimate on the trace."""

    radius: object
    steps: int
    trace: object
    matrix: tuple
    det: object
    err_estimate: object


def _integrate_circuit(params: EquationParams, radius, steps: int, direction: int = -1):
    """Classical RK4 over theta in [0, 2 pi] for z = r e^{i direction theta}.

    The substitution g = z f' turns the equation into

        df/dtheta = i direction g,
        dg/dtheta = i direction Q(z) f,      Q(z) = sum D_m z^{-m} + L^2 + sum B_m z^m,

    whose coefficient matrix is traceless, so the fundamental matrix stays
    unimodular.  Both columns are propagated at once; direction=-1 is the
    negative-sense circuit matching the circuit-matrix convention.
    """
    r = mpf(radius)
    idir = mpc(0, direction)
    L2 = params.L ** 2
    D, B = params.D, params.B

    def q_of(z):
        acc = mpc(L2)
        zp = mpc(1)
        zm = mpc(1)
        for m in range(6):
            zp *= z
            zm /= z
            acc += B[m] * zp + D[m] * zm
        return acc

    h = 2 * pi / steps
    y = [mpc(1), mpc(0), mpc(0), mpc(1)]  # columns (f1, g1), (f2, g2)

    def deriv(theta, y):
        q = q_of(r * exp(idir * theta))
        return (idir * y[1], idir * q * y[0], idir * y[3], idir * q * y[2])

    theta = mpf(0)
    half = h / 2
    sixth = h / 6
    for _ in range(steps):
        k1 = deriv(theta, y)
        k2 = deriv(theta + half, [y[i] + half * k1[i] for i in range(4)])
        k3 = deriv(theta + half, [y[i] + half * k2[i] for i in range(4)])
        k4 = deriv(theta + h, [y[i] + h * k3[i] for i in range(4)])
        y = [y[i] + sixth * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) for i in range(4)]
        theta += h
    # y holds the images of the two basis columns: M = [[f1, f2], [g1, g2]]
    return (y[0], y[2], y[1], y[3])


def monodromy_trace_ode(
    params: EquationParams,
    radius=1.0,
    target_err=1e-10,
    *,
    initial_steps: int = 256,
    max_steps: int = 1 << 20,
) -> MonodromySample:
    """Adaptive circuit integration: double the step count until the
    Richardson estimate |trace(2n) - trace(n)| / (2^order - 1) meets
    ``target_err``.  Any radius > 0 is valid (the only finite singular point
    is the origin); radius-independence of the trace is itself a useful
    cross-check.  Raises AccuracyNotReachedError (with the best sample
    attached) if ``max_steps`` is hit first.
    """
    if not mpf(radius) > 0:
        raise ValueError("radius must be positive")
    target = mpf(target_err)
    steps = initial_steps
    prev_trace = None
    best = None
    while steps <= max_steps:
        m11, m12, m21, m22 = _integrate_circuit(params, radius, steps)
        trace = m11 + m22
        det = m11 * m22 - m12 * m21
        if prev_trace is not None:
            err = abs(trace - prev_trace) / (2 ** RK4_ORDER - 1)
            best = MonodromySample(
                radius=mpf(radius),
                steps=steps,
                trace=trace,
                matrix=(m11, m12, m21, m22),
                det=det,
                err_estimate=err,
            )
            if err <= target:
                return best
        prev_trace = trace
        steps *= 2
    raise AccuracyNotReachedError(
        f"monodromy trace did not reach {mp.nstr(target, 3)} within {max_steps} steps",
        best=best,
    )


def hill_residual(
    params: EquationParams,
    omega,
    N: int = DEFAULT_HILL_N,
    *,
    details: bool = False,
):
    """Smallest singular value of the truncated bilateral recurrence system.

    Row n of the (2N+1)-dimensional truncation reads

        -sum_m B_m c_{n-m} + (-L + omega + n)(L + omega + n) c_n - sum_m D_m c_{n+m} = 0,

    n = -N .. N, coefficients outside the window dropped.  Each row is
    divided by its diagonal normalizer when that is safely nonzero, else by
    1 + n^2 (flagged).  Near-zero return values mean omega is (numerically)
    a Floquet exponent; the singular value is used instead of a determinant
    because the determinant's scale is meaningless after truncation.

    With ``details=True`` returns (residual, shifted_rows).
    """
    if N < 20:
        raise ValueError("N must be >= 20")
    om = complex(omega)
    L = float(params.L)
    B = [float(x) for x in params.B]
    D = [float(x) for x in params.D]
    dim = 2 * N + 1
    n_idx = np.arange(-N, N + 1)
    A = np.zeros((dim, dim), dtype=np.complex128)
    diag = (-L + om + n_idx) * (L + om + n_idx)
    for i in range(dim):
        A[i, i] = diag[i]
        for m in range(1, 7):
            if i - m >= 0:
                A[i, i - m] = -B[m - 1]
            if i + m < dim:
                A[i, i + m] = -D[m - 1]
    shifted_rows = []
    for i in range(dim):
        d = diag[i]
        if abs(d) > 1e-6 * max(1.0, float(n_idx[i]) ** 2):
            A[i, :] /= d
        else:
            A[i, :] /= 1.0 + float(n_idx[i]) ** 2
            shifted_rows.append(int(n_idx[i]))
    residual = float(np.linalg.svd(A, compute_uv=False)[-1])
    if details:
        return residual, tuple(shifted_rows)
    return residual
