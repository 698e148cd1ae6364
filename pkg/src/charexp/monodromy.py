"""Circuit matrix, characteristic exponent, and multiplicative solutions.

One negative-sense circuit around the origin maps the two solutions
normalized at infinity onto linear combinations of themselves,

    f1(e^{-2 pi i} z) = T11 f1(z) + T12 f2(z),
    f2(e^{-2 pi i} z) = T21 f1(z) + T22 f2(z),

and the 2x2 circuit matrix T is an explicit polynomial in the six Stokes
multipliers with phase coefficients exp(c pi i tau(+-1)) and prefactors
(2 s0)^{+-(tau(1)-tau(-1))/3} on the off-diagonal entries.  T is unimodular,
det T = 1, identically in the multipliers -- a sharp transcription check.

The multiplicative (Floquet) solutions scale by p = exp(-+ 2 pi i omega)
under the circuit, where p1, p2 are the roots of p^2 - (T11 + T22) p + 1,
so cos(2 pi omega) = (T11 + T22)/2.  The same trace has the closed form
cos(2 pi tau(1)) + X with X a sixteen-term polynomial in the multipliers;
both forms are assembled here as literal term lists, since transcription
error is the dominant risk in this module.

The principal branch fixes Re(omega) in [0, 1/2]: omega and -omega generate
the same solution pair, and the trace determines omega only up to sign and
integer shifts.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import acos, cos, exp, mp, mpc, mpf, pi

from .errors import InconsistencyError
from .frame import Frame
from .stokes import StokesSet

__all__ = [
    "CircuitMatrix",
    "FloquetResult",
    "SolutionPairs",
    "circuit_matrix",
    "characteristic_exponent",
    "multiplicative_solutions",
]

#: |p1 - p2| below this flags the multiplier pair as degenerate (2 omega
#: within roundoff of an integer); below the combined sigma error for
#: default settings.
DEGENERACY_THRESHOLD = mpf("1e-8")

#: default ceiling on |Im cos(2 pi omega)| before the reality cross-check
#: fails; real parameters force a real trace.
IM_TOL_DEFAULT = mpf("1e-6")


@dataclass(frozen=True)
class CircuitMatrix:
    T11: object
    T12: object
    T21: object
    T22: object

    def det(self):
        return self.T11 * self.T22 - self.T12 * self.T21

    def trace(self):
        return self.T11 + self.T22


@dataclass(frozen=True)
class SolutionPairs:
    """Coefficient pairs (alpha, beta) of the two multiplicative solutions
    alpha * f1 + beta * f2; equal pairs with ``degenerate`` set when p1 = p2."""

    pair1: tuple
    pair2: tuple
    degenerate: bool


@dataclass(frozen=True)
class FloquetResult:
    cos_two_pi_omega: object
    omega_principal: object
    X: object
    multiplier_pair: tuple
    solution_coeffs: SolutionPairs
    diagnostics: dict

    @property
    def p1(self):
        return self.multiplier_pair[0]

    @property
    def p2(self):
        return self.multiplier_pair[1]


# Term lists for the circuit matrix and the trace polynomial X.  Each term is
# (integer coefficient, tau phase, multiplier word); the phase ((p, q), kappa)
# stands for exp((p/q) * pi * i * tau(kappa)) and the word lists (n, kappa)
# multiplier indices.  The fractions stay integral here so the phases are
# built at the caller's working precision.  Transcribed literally; validated
# by the det T = 1 and trace-consistency identities in the tests.
_F43 = (4, 3)
_F23 = (2, 3)

_T11_TERMS = [
    (4, (_F43, -1), ((0, -1), (0, 1))),
    (4, (_F43, 1), ((1, 1), (0, -1))),
    (4, None, ((2, 1), (0, -1))),
    (4, (_F43, 1), ((2, 1), (1, -1))),
    (4, (_F43, 1), ((2, -1), (0, 1))),
    (4, None, ((1, -1), (0, 1))),
    (16, (_F23, 1), ((2, -1), (2, 1), (1, -1), (0, 1))),
    (16, (_F23, 1), ((2, -1), (1, 1), (0, -1), (0, 1))),
    (16, (_F23, 1), ((2, 1), (1, -1), (1, 1), (0, -1))),
    (16, (_F23, -1), ((2, -1), (2, 1), (0, -1), (0, 1))),
    (16, (_F23, -1), ((1, -1), (1, 1), (0, -1), (0, 1))),
    (64, None, ((2, -1), (2, 1), (1, -1), (1, 1), (0, -1), (0, 1))),
]

_T12_TERMS = [
    (2, (_F23, -1), ((2, 1),)),
    (2, (_F23, 1), ((1, 1),)),
    (2, ((2, 1), -1), ((0, 1),)),
    (8, (_F43, -1), ((2, -1), (2, 1), (0, 1))),
    (8, None, ((2, -1), (1, 1), (0, 1))),
    (8, (_F43, -1), ((1, -1), (1, 1), (0, 1))),
    (8, None, ((2, 1), (1, -1), (1, 1))),
    (32, (_F23, -1), ((2, -1), (2, 1), (1, -1), (1, 1), (0, 1))),
]

_T21_TERMS = [
    (2, (_F43, -1), ((0, -1),)),
    (2, (_F43, 1), ((2, -1),)),
    (2, None, ((1, -1),)),
    (8, (_F23, 1), ((2, -1), (2, 1), (1, -1))),
    (8, (_F23, -1), ((2, -1), (2, 1), (0, -1))),
    (8, (_F23, -1), ((1, -1), (1, 1), (0, -1))),
    (8, (_F23, 1), ((2, -1), (1, 1), (0, -1))),
    (32, None, ((2, -1), (2, 1), (1, -1), (1, 1), (0, -1))),
]

_T22_TERMS = [
    (4, (_F43, -1), ((2, -1), (2, 1))),
    (4, (_F43, -1), ((1, -1), (1, 1))),
    (4, None, ((2, -1), (1, 1))),
    (16, (_F23, -1), ((2, -1), (2, 1), (1, -1), (1, 1))),
]

_X_TERMS = [
    (2, (_F43, -1), ((0, -1), (0, 1))),
    (2, (_F43, 1), ((1, 1), (0, -1))),
    (2, None, ((2, 1), (0, -1))),
    (2, (_F43, 1), ((2, 1), (1, -1))),
    (2, (_F43, 1), ((2, -1), (0, 1))),
    (2, None, ((1, -1), (0, 1))),
    (2, (_F43, -1), ((2, -1), (2, 1))),
    (2, (_F43, -1), ((1, -1), (1, 1))),
    (2, None, ((2, -1), (1, 1))),
    (8, (_F23, -1), ((2, -1), (2, 1), (1, -1), (1, 1))),
    (8, (_F23, 1), ((2, -1), (2, 1), (1, -1), (0, 1))),
    (8, (_F23, 1), ((2, -1), (1, 1), (0, -1), (0, 1))),
    (8, (_F23, 1), ((2, 1), (1, -1), (1, 1), (0, -1))),
    (8, (_F23, -1), ((2, -1), (2, 1), (0, -1), (0, 1))),
    (8, (_F23, -1), ((1, -1), (1, 1), (0, -1), (0, 1))),
    (32, None, ((2, -1), (2, 1), (1, -1), (1, 1), (0, -1), (0, 1))),
]


def _eval_terms(terms, frame: Frame, sigma: dict):
    phase_cache = {}

    def phase(spec):
        if spec is None:
            return mpf(1)
        val = phase_cache.get(spec)
        if val is None:
            (num, den), kappa = spec
            val = exp(mpc(0, 1) * pi * num * frame.tau(kappa) / den)
            phase_cache[spec] = val
        return val

    total = mpc(0)
    for coeff, phase_spec, word in terms:
        term = coeff * phase(phase_spec)
        for key in word:
            term *= sigma[key]
        total += term
    return total


def circuit_matrix(frame: Frame, sigma: StokesSet) -> CircuitMatrix:
    """Assemble T from the Stokes multipliers (literal term lists above).

    T11 and T22 start from exp(2 pi i tau(+-1)); T12 carries an overall 2i
    and T21 an overall -2i together with the (2 s0)^{+-(tau(1)-tau(-1))/3}
    prefactors.
    """
    s = sigma.sigma
    I = mpc(0, 1)
    tau_diff = (frame.tau_plus - frame.tau_minus) / 3
    T11 = exp(2 * pi * I * frame.tau_plus) + _eval_terms(_T11_TERMS, frame, s)
    T22 = exp(2 * pi * I * frame.tau_minus) + _eval_terms(_T22_TERMS, frame, s)
    T12 = (2 * frame.s0) ** tau_diff * I * _eval_terms(_T12_TERMS, frame, s)
    T21 = (2 * frame.s0) ** (-tau_diff) * (-I) * _eval_terms(_T21_TERMS, frame, s)
    return CircuitMatrix(T11=T11, T12=T12, T21=T21, T22=T22)


def multiplicative_solutions(T: CircuitMatrix, result, p2=None) -> SolutionPairs:
    """Coefficient pairs (T22 - p, -T12) of the multiplicative solutions.

    ``result`` is either a FloquetResult (its multiplier pair is used) or
    the multiplier p1 directly together with ``p2``.

    Built from the lower circuit relation, which avoids the much longer T11.
    When p1 = p2 (within DEGENERACY_THRESHOLD; 2 omega an integer) the two
    pairs coincide and the result is flagged degenerate, as it also is when
    a pair collapses to (0, 0).
    """
    if isinstance(result, FloquetResult):
        p1, p2 = result.multiplier_pair
    else:
        if p2 is None:
            raise TypeError("pass a FloquetResult or both multipliers p1, p2")
        p1 = result
    pair1 = (T.T22 - p1, -T.T12)
    pair2 = (T.T22 - p2, -T.T12)
    scale = max(mpf(1), abs(T.T22), abs(T.T12))
    degenerate = abs(p1 - p2) < DEGENERACY_THRESHOLD or any(
        abs(a) < DEGENERACY_THRESHOLD * scale and abs(b) < DEGENERACY_THRESHOLD * scale
        for a, b in (pair1, pair2)
    )
    return SolutionPairs(pair1=pair1, pair2=pair2, degenerate=degenerate)


def characteristic_exponent(
    frame: Frame,
    sigma: StokesSet,
    im_tol=IM_TOL_DEFAULT,
) -> FloquetResult:
    """The characteristic exponent: cos(2 pi omega) = cos(2 pi tau(1)) + X.

    The imaginary part of the assembled cosine is a pure diagnostic -- the
    equation's parameters are real, so a residue above ``im_tol`` signals
    inaccurate multipliers upstream and raises InconsistencyError (pass
    im_tol=None to skip, e.g. when the sigma series is known unconverged).

    omega is extracted from the real part by the principal inverse cosine,
    Re(omega) in [0, 1/2]; for |cos| > 1 omega is complex with the branch
    Re(omega) = 0 (cos > 1) or 1/2 (cos < -1).  The multipliers are
    p1 = exp(-2 pi i omega), p2 = exp(2 pi i omega), so p1 p2 = 1.
    """
    X = _eval_terms(_X_TERMS, frame, sigma.sigma)
    cos_val = cos(2 * pi * frame.tau_plus) + X
    im_resid = abs(cos_val.imag) if isinstance(cos_val, mpc) else mpf(0)
    if im_tol is not None and im_resid > im_tol:
        raise InconsistencyError(
            f"|Im cos(2 pi omega)| = {mp.nstr(im_resid, 6)} exceeds {mp.nstr(mpf(im_tol), 6)}; "
            "the Stokes multipliers are not accurate enough"
        )
    c = cos_val.real if isinstance(cos_val, mpc) else cos_val
    if abs(c) <= 1:
        omega = acos(c) / (2 * pi)
    else:
        omega = acos(mpc(c)) / (2 * pi)
    I = mpc(0, 1)
    p1 = exp(-2 * pi * I * omega)
    p2 = exp(2 * pi * I * omega)
    T = circuit_matrix(frame, sigma)
    pairs = multiplicative_solutions(T, p1, p2)
    diagnostics = {
        "im_cos_residual": im_resid,
        "det_T_minus_one": abs(T.det() - 1),
        "trace_minus_2cos": abs(T.trace() - 2 * cos_val),
        "degenerate_multipliers": pairs.degenerate,
        "sigma_converged": dict(sigma.converged),
    }
    return FloquetResult(
        cos_two_pi_omega=cos_val,
        omega_principal=omega,
        X=X,
        multiplier_pair=(p1, p2),
        solution_coeffs=pairs,
        diagnostics=diagnostics,
    )
