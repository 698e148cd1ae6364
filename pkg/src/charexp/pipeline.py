"""End-to-end driver: parameters in, characteristic exponent out.

Runs frame derivation, the adaptive e-grid computation for both source
signs, multiplier assembly, and the circuit/exponent extraction under one
working precision, and attaches an honest error estimate to cos(2 pi omega):
the pipeline is re-assembled against the lower-order e-grid variants
(smaller asymptotic index m, smaller correction order K) and against a
shortened level sum, and the observed shifts are combined.  Those estimates
are heuristic, not bounds -- the underlying series are asymptotic ones with
no published remainder terms.

The computational parameter lambda cancels from exact results; it is chosen
as L by default (the choice that suppresses the large correction terms) and
re-chosen automatically if a degenerate exponent combination makes the
correction kernels blow up.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf, pi, workprec

from .errors import InconsistencyError, LambdaDegenerateError
from .frame import EquationParams, Frame, choose_lambda, derive_frame
from .monodromy import (
    CircuitMatrix,
    FloquetResult,
    characteristic_exponent,
    circuit_matrix,
)
from .stokes import (
    DEFAULT_K,
    DEFAULT_LMAX,
    EGrid,
    StokesSet,
    compute_stokes_set,
    stokes_multipliers,
)

__all__ = ["PipelineSettings", "PipelineOutput", "solve"]

_LAMBDA_RETRIES = 3


@dataclass(frozen=True)
class PipelineSettings:
    """Numerical knobs of one pipeline run.

    m is the asymptotic index ("adaptive" or a fixed integer), K the
    correction order, lmax the grading cap of the e-grids, lam the
    computational parameter ("auto" picks L, shifted off degenerate spots).
    """

    precision_bits: int = 256
    m: object = "adaptive"
    K: int = DEFAULT_K
    lmax: int = DEFAULT_LMAX
    lam: object = "auto"
    im_tol: object = mpf("1e-6")

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be >= 64")
        if self.K < 1 or self.lmax < 0:
            raise ValueError("K must be >= 1 and lmax >= 0")
        if self.m != "adaptive" and int(self.m) <= self.K:
            raise ValueError("fixed m must exceed K")


@dataclass(frozen=True)
class PipelineOutput:
    params: EquationParams
    settings: PipelineSettings
    frame: Frame
    egrid_plus: EGrid
    egrid_minus: EGrid
    stokes: StokesSet
    circuit: CircuitMatrix
    result: FloquetResult
    cos_err_estimate: object
    warnings: tuple = ()

    @property
    def converged(self) -> bool:
        return all(self.stokes.converged.values())


def _variant_cos(frame, egrid_plus, egrid_minus, lmax):
    sset = stokes_multipliers(frame, egrid_plus, egrid_minus, lmax)
    res = characteristic_exponent(frame, sset, im_tol=None)
    return res.cos_two_pi_omega


def solve(params: EquationParams, settings: PipelineSettings | None = None) -> PipelineOutput:
    """Run the full pipeline for one parameter set.

    Deterministic: identical params and settings give bit-identical output.
    Raises InconsistencyError when the multiplier series converged but the
    assembled cosine has an imaginary residue beyond both the configured
    tolerance and the propagated error estimate.
    """
    if settings is None:
        settings = PipelineSettings()
    with workprec(settings.precision_bits):
        warnings: list[str] = []
        if settings.lam == "auto":
            lam = choose_lambda(params)
            if lam != params.L:
                warnings.append(
                    f"lambda shifted off L to {mp.nstr(lam, 8)} (degenerate exponent guard)"
                )
        else:
            lam = mpf(settings.lam)
        frame = None
        last_exc = None
        for attempt in range(_LAMBDA_RETRIES + 1):
            try:
                frame = derive_frame(params, lam)
                sset, eg_plus, eg_minus = compute_stokes_set(
                    frame,
                    params,
                    Lmax=settings.lmax,
                    K=settings.K,
                    m=settings.m,
                )
                break
            except LambdaDegenerateError as exc:
                last_exc = exc
                lam = lam + 1 / pi
                warnings.append(
                    f"lambda re-chosen as {mp.nstr(lam, 8)} after degenerate kernel: {exc}"
                )
        else:
            raise last_exc
        warnings.extend(eg_plus.warnings)
        warnings.extend(eg_minus.warnings)
        warnings.extend(sset.warnings)

        result = characteristic_exponent(frame, sset, im_tol=None)
        circuit = circuit_matrix(frame, sset)
        cos_main = result.cos_two_pi_omega

        # error propagation: re-run the assembly against the grid variants
        variant_err = mpf(0)
        for key in ("m_minus", "K_minus"):
            vp = eg_plus.variants.get(key)
            vm = eg_minus.variants.get(key)
            if not vp or not vm:
                continue
            cos_v = _variant_cos(
                frame, eg_plus.with_entries(vp), eg_minus.with_entries(vm), settings.lmax
            )
            variant_err = max(variant_err, abs(cos_main - cos_v))
        # level-sum truncation: drop the top grading triple
        trunc_err = mpf(0)
        if settings.lmax >= 3:
            cos_t = _variant_cos(frame, eg_plus, eg_minus, settings.lmax - 3)
            trunc_err = abs(cos_main - cos_t)
        cos_err = variant_err + trunc_err

        im_resid = result.diagnostics["im_cos_residual"]
        if all(sset.converged.values()):
            if im_resid > max(mpf(settings.im_tol), 10 * cos_err):
                raise InconsistencyError(
                    f"|Im cos(2 pi omega)| = {mp.nstr(im_resid, 6)} exceeds tolerance "
                    f"{mp.nstr(max(mpf(settings.im_tol), 10 * cos_err), 6)}"
                )
        else:
            warnings.append(
                "multiplier level sums not converged at lmax; reality check suspended"
            )

        seen = set()
        uniq = []
        for w in warnings:
            if w not in seen:
                seen.add(w)
                uniq.append(w)
        return PipelineOutput(
            params=params,
            settings=settings,
            frame=frame,
            egrid_plus=eg_plus,
            egrid_minus=eg_minus,
            stokes=sset,
            circuit=circuit,
            result=result,
            cos_err_estimate=cos_err,
            warnings=tuple(uniq),
        )
