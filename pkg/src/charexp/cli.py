"""Batch front-end: parameter files in, machine-readable reports out.

Input is a flat key-value text file (thirteen scalars need no nesting):

    # comment
    D1 = 0.5
    ...
    L  = 0.3
    B6 = 9
    precision = 256      # optional solver keys
    m = adaptive
    K = 10
    lmax = 12
    lambda = auto
    oracle = ode

The report is a single structured key-value document with [section]
headers, all numerals in decimal at the configured precision, no
timestamps: identical configuration gives byte-identical output.  Sweep
mode reads a CSV of parameter rows and emits one aggregated CSV.

Exit codes: 0 success, 1 usage error, 2 numerical failure,
3 oracle disagreement beyond threshold.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import sys
from dataclasses import dataclass, field

from mpmath import mp, mpf, workprec

from .errors import CharexpError, InvalidParametersError
from .frame import EquationParams
from .oracle import hill_residual, monodromy_trace_ode
from .pipeline import PipelineOutput, PipelineSettings, solve
from .special import prec_to_dps

__all__ = ["RunConfig", "RunReport", "run_pipeline", "main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_ORACLE = 3

ORACLE_RADIUS = 1.0
ORACLE_TARGET_ERR = 1e-9
ORACLE_AGREE_TOL = 1e-6
HILL_N = 80
HILL_DELTA = 0.05
HILL_DIP_FACTOR = 1e3

_PARAM_KEYS = tuple(f"d{i}" for i in range(1, 7)) + ("l",) + tuple(
    f"b{i}" for i in range(1, 7)
)
_SOLVER_KEYS = ("precision", "precision_bits", "m", "k", "lmax", "lambda", "oracle")


@dataclass(frozen=True)
class RunConfig:
    """One pipeline run: parameters plus solver and output settings."""

    params: EquationParams
    precision_bits: int = 256
    m: object = "adaptive"
    K: int = 10
    lmax: int = 12
    lam: object = "auto"
    oracle: str = "none"
    output_path: str = "-"

    def __post_init__(self):
        if self.precision_bits < 64:
            raise InvalidParametersError("precision_bits must be >= 64")
        if self.K < 1 or self.lmax < 0:
            raise InvalidParametersError("K must be >= 1 and lmax >= 0")
        if self.oracle not in ("none", "ode", "hill", "both"):
            raise InvalidParametersError(f"unknown oracle {self.oracle!r}")

    def settings(self) -> PipelineSettings:
        return PipelineSettings(
            precision_bits=self.precision_bits,
            m=self.m,
            K=self.K,
            lmax=self.lmax,
            lam=self.lam,
        )


@dataclass
class RunReport:
    text: str
    exit_code: int
    warnings: tuple = ()
    csv_fields: dict = field(default_factory=dict)


def parse_params_text(text: str):
    """Parse the flat key-value format; returns (param dict, solver dict)."""
    params = {}
    solver = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParametersError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key_l = key.lower()
        if key_l in _PARAM_KEYS:
            params[key_l] = value
        elif key_l in _SOLVER_KEYS:
            solver[key_l] = value
        else:
            raise InvalidParametersError(f"line {lineno}: unknown key {key!r}")
    return params, solver


def config_from_file(path: str, overrides: dict) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidParametersError(f"cannot read {path}: {exc}") from exc
    raw_params, solver = parse_params_text(text)
    if "b6" not in raw_params:
        raise InvalidParametersError("parameter file must set B6")
    D = [raw_params.get(f"d{i}", "0") for i in range(1, 7)]
    B = [raw_params.get(f"b{i}", "0") for i in range(1, 7)]
    L = raw_params.get("l", "0")
    merged = dict(solver)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    kwargs = {}
    prec = merged.get("precision", merged.get("precision_bits"))
    if prec is not None:
        kwargs["precision_bits"] = int(prec)
    if "m" in merged:
        kwargs["m"] = merged["m"] if merged["m"] == "adaptive" else int(merged["m"])
    if "k" in merged:
        kwargs["K"] = int(merged["k"])
    if "lmax" in merged:
        kwargs["lmax"] = int(merged["lmax"])
    if "lambda" in merged:
        kwargs["lam"] = merged["lambda"] if merged["lambda"] == "auto" else merged["lambda"]
    if "oracle" in merged:
        kwargs["oracle"] = merged["oracle"]
    if "out" in merged:
        kwargs["output_path"] = merged["out"]
    with workprec(kwargs.get("precision_bits", 256)):
        params = EquationParams(D=D, L=L, B=B)
    return RunConfig(params=params, **kwargs)


def _fmt(value, dps: int) -> str:
    return mp.nstr(value, dps)


def _oracle_sections(config, out: PipelineOutput, dps, lines, csv_fields):
    """Run the requested oracles and append their report sections.

    Returns the worst oracle exit code (0 when everything agrees).
    """
    code = EXIT_OK
    cos_val = out.result.cos_two_pi_omega
    if config.oracle in ("ode", "both"):
        sample = monodromy_trace_ode(
            out.params, radius=ORACLE_RADIUS, target_err=ORACLE_TARGET_ERR
        )
        half = sample.trace / 2
        diff = abs(cos_val - half)
        agree = diff <= mpf(ORACLE_AGREE_TOL) + out.cos_err_estimate + sample.err_estimate
        lines.append("[oracle.ode]")
        lines.append(f"radius = {_fmt(sample.radius, dps)}")
        lines.append(f"steps = {sample.steps}")
        lines.append(f"trace_half = {_fmt(half, dps)}")
        lines.append(f"err_estimate = {_fmt(sample.err_estimate, 6)}")
        lines.append(f"abs_det_minus_one = {_fmt(abs(sample.det - 1), 6)}")
        lines.append(f"discrepancy = {_fmt(diff, 6)}")
        lines.append(f"agree = {str(agree).lower()}")
        lines.append("")
        csv_fields["oracle_ode_diff"] = _fmt(diff, 6)
        if not agree:
            code = EXIT_ORACLE
    if config.oracle in ("hill", "both"):
        omega = out.result.omega_principal
        res0, shifted = hill_residual(out.params, omega, HILL_N, details=True)
        res_p = hill_residual(out.params, omega + HILL_DELTA, HILL_N)
        res_m = hill_residual(out.params, omega - HILL_DELTA, HILL_N)
        dip = min(res_p, res_m) / res0 if res0 > 0 else float("inf")
        ok = dip >= HILL_DIP_FACTOR
        lines.append("[oracle.hill]")
        lines.append(f"N = {HILL_N}")
        lines.append(f"residual_at_omega = {res0:.6e}")
        lines.append(f"residual_at_omega_plus = {res_p:.6e}")
        lines.append(f"residual_at_omega_minus = {res_m:.6e}")
        lines.append(f"dip_ratio = {dip:.6e}")
        lines.append(f"shifted_rows = {','.join(map(str, shifted)) if shifted else 'none'}")
        lines.append(f"pass = {str(ok).lower()}")
        lines.append("")
        csv_fields["hill_dip_ratio"] = f"{dip:.6e}"
        if not ok:
            code = EXIT_ORACLE
    return code


def run_pipeline(config: RunConfig) -> RunReport:
    """Run one configuration and render the full report document."""
    dps = prec_to_dps(config.precision_bits)
    lines: list[str] = []
    csv_fields: dict = {}
    with workprec(config.precision_bits):
        lines.append("[input]")
        for i in range(6):
            lines.append(f"D{i + 1} = {_fmt(config.params.D[i], dps)}")
        lines.append(f"L = {_fmt(config.params.L, dps)}")
        for i in range(6):
            lines.append(f"B{i + 1} = {_fmt(config.params.B[i], dps)}")
        lines.append(f"precision_bits = {config.precision_bits}")
        lines.append(f"m = {config.m}")
        lines.append(f"K = {config.K}")
        lines.append(f"lmax = {config.lmax}")
        lines.append(f"lambda = {config.lam}")
        lines.append(f"oracle = {config.oracle}")
        lines.append("")
        for i in range(6):
            csv_fields[f"D{i + 1}"] = _fmt(config.params.D[i], dps)
        csv_fields["L"] = _fmt(config.params.L, dps)
        for i in range(6):
            csv_fields[f"B{i + 1}"] = _fmt(config.params.B[i], dps)

        out = solve(config.params, config.settings())

        fr = out.frame
        lines.append("[frame]")
        for name, val in (
            ("p1", fr.p1),
            ("p2", fr.p2),
            ("p3", fr.p3),
            ("s0", fr.s0),
            ("t10", fr.t10),
            ("t20", fr.t20),
            ("tau_plus", fr.tau_plus),
            ("tau_minus", fr.tau_minus),
            ("lambda", fr.lam),
            ("mu_plus", fr.mu_plus),
            ("mu_minus", fr.mu_minus),
        ):
            lines.append(f"{name} = {_fmt(val, dps)}")
        lines.append("")

        for label, grid in (("plus", out.egrid_plus), ("minus", out.egrid_minus)):
            lines.append(f"[egrid.{label}]")
            lines.append(f"m_used = {grid.m_used}")
            lines.append(f"K_used = {grid.K_used}")
            for (n1, n2) in sorted(grid.entries, key=lambda t: (2 * t[0] + t[1], t[0])):
                err = grid.err.get((n1, n2), mpf(0))
                lines.append(
                    f"e {n1} {n2} = {_fmt(grid.entries[(n1, n2)], dps)} "
                    f"(err {_fmt(err, 4)})"
                )
            lines.append("")

        sset = out.stokes
        lines.append("[stokes]")
        for j in (0, 1, 2):
            for kappa, tag in ((1, "plus"), (-1, "minus")):
                lines.append(f"S{j}_{tag} = {_fmt(sset.S[(j, kappa)], dps)}")
        for n in (0, 1, 2):
            for kappa, tag in ((1, "plus"), (-1, "minus")):
                lines.append(f"sigma{n}_{tag} = {_fmt(sset.sigma[(n, kappa)], dps)}")
        lines.append(f"eta = {_fmt(sset.eta, dps)}")
        for j in (0, 1, 2):
            for kappa, tag in ((1, "plus"), (-1, "minus")):
                lines.append(
                    f"converged_S{j}_{tag} = {str(sset.converged[(j, kappa)]).lower()}"
                )
        lines.append("")

        T = out.circuit
        lines.append("[circuit]")
        lines.append(f"T11 = {_fmt(T.T11, dps)}")
        lines.append(f"T12 = {_fmt(T.T12, dps)}")
        lines.append(f"T21 = {_fmt(T.T21, dps)}")
        lines.append(f"T22 = {_fmt(T.T22, dps)}")
        lines.append(f"abs_det_minus_one = {_fmt(abs(T.det() - 1), 6)}")
        lines.append("")

        res = out.result
        pairs = res.solution_coeffs
        lines.append("[floquet]")
        lines.append(f"X = {_fmt(res.X, dps)}")
        lines.append(f"cos_2pi_omega = {_fmt(res.cos_two_pi_omega, dps)}")
        lines.append(f"cos_err_estimate = {_fmt(out.cos_err_estimate, 6)}")
        lines.append(f"im_cos_residual = {_fmt(res.diagnostics['im_cos_residual'], 6)}")
        lines.append(f"omega = {_fmt(res.omega_principal, dps)}")
        lines.append(f"p1 = {_fmt(res.p1, dps)}")
        lines.append(f"p2 = {_fmt(res.p2, dps)}")
        lines.append(f"degenerate = {str(pairs.degenerate).lower()}")
        lines.append(f"solution1_alpha = {_fmt(pairs.pair1[0], dps)}")
        lines.append(f"solution1_beta = {_fmt(pairs.pair1[1], dps)}")
        lines.append(f"solution2_alpha = {_fmt(pairs.pair2[0], dps)}")
        lines.append(f"solution2_beta = {_fmt(pairs.pair2[1], dps)}")
        lines.append("")

        csv_fields.update(
            {
                "m_used_plus": str(out.egrid_plus.m_used),
                "m_used_minus": str(out.egrid_minus.m_used),
                "cos_re": _fmt(res.cos_two_pi_omega.real, dps),
                "cos_im": _fmt(res.cos_two_pi_omega.imag, dps),
                "cos_err_estimate": _fmt(out.cos_err_estimate, 6),
                "omega_re": _fmt(res.omega_principal.real, dps),
                "omega_im": _fmt(getattr(res.omega_principal, "imag", mpf(0)), dps),
                "abs_det_minus_one": _fmt(abs(T.det() - 1), 6),
                "converged": str(out.converged).lower(),
            }
        )

        exit_code = _oracle_sections(config, out, dps, lines, csv_fields)

        lines.append("[warnings]")
        if out.warnings:
            for w in out.warnings:
                lines.append(f"- {w}")
        else:
            lines.append("none")
        lines.append("")
        lines.append("[status]")
        lines.append(f"exit_code = {exit_code}")
        lines.append("")
        csv_fields["warnings"] = "; ".join(out.warnings)
        csv_fields["status"] = str(exit_code)
    return RunReport(
        text="\n".join(lines),
        exit_code=exit_code,
        warnings=out.warnings,
        csv_fields=csv_fields,
    )


_CSV_COLUMNS = (
    [f"D{i}" for i in range(1, 7)]
    + ["L"]
    + [f"B{i}" for i in range(1, 7)]
    + [
        "m_used_plus",
        "m_used_minus",
        "cos_re",
        "cos_im",
        "cos_err_estimate",
        "omega_re",
        "omega_im",
        "abs_det_minus_one",
        "converged",
        "oracle_ode_diff",
        "hill_dip_ratio",
        "warnings",
        "status",
    ]
)


def _sweep_row_config(row: dict, base: RunConfig) -> RunConfig:
    with workprec(base.precision_bits):
        params = EquationParams(
            D=[row.get(f"D{i}", "0") for i in range(1, 7)],
            L=row.get("L", "0"),
            B=[row.get(f"B{i}", "0") for i in range(1, 7)],
        )
    return RunConfig(
        params=params,
        precision_bits=base.precision_bits,
        m=base.m,
        K=base.K,
        lmax=base.lmax,
        lam=base.lam,
        oracle=base.oracle,
        output_path=base.output_path,
    )


def _run_sweep_row(args):
    index, row, base = args
    try:
        report = run_pipeline(_sweep_row_config(row, base))
        return index, report.exit_code, report.csv_fields
    except InvalidParametersError as exc:
        return index, EXIT_USAGE, {"warnings": str(exc), "status": str(EXIT_USAGE)}
    except CharexpError as exc:
        return index, EXIT_NUMERICAL, {"warnings": str(exc), "status": str(EXIT_NUMERICAL)}


def run_sweep(sweep_path: str, base: RunConfig, jobs: int = 1):
    """Run every parameter row of a sweep CSV; returns (csv text, exit code)."""
    try:
        with open(sweep_path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise InvalidParametersError(f"cannot read {sweep_path}: {exc}") from exc
    if not rows:
        raise InvalidParametersError(f"sweep file {sweep_path} has no rows")
    tasks = [(i, row, base) for i, row in enumerate(rows)]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_sweep_row, tasks))
    else:
        results = [_run_sweep_row(t) for t in tasks]
    results.sort(key=lambda t: t[0])
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["row"] + _CSV_COLUMNS, extrasaction="ignore")
    writer.writeheader()
    worst = EXIT_OK
    for index, code, fields in results:
        fields = dict(fields)
        fields["row"] = str(index)
        writer.writerow(fields)
        worst = max(worst, code)
    return buf.getvalue(), worst


def _write_output(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="charexp",
        description=(
            "Compute the characteristic (Floquet) exponent of the "
            "rank-three two-point equation from a parameter file."
        ),
    )
    parser.add_argument("params_file", help="flat key-value parameter file")
    parser.add_argument("--precision", type=int, default=None, help="working precision in bits")
    parser.add_argument("--m", default=None, help="asymptotic index ('adaptive' or integer)")
    parser.add_argument("--K", dest="K", type=int, default=None, help="correction order")
    parser.add_argument("--lmax", type=int, default=None, help="grading cap of the e-grids")
    parser.add_argument("--lambda", dest="lam", default=None, help="'auto' or a real value")
    parser.add_argument(
        "--oracle", choices=["none", "ode", "hill", "both"], default=None,
        help="cross-check against the requested oracle(s)",
    )
    parser.add_argument("--out", default=None, help="output path ('-' for stdout)")
    parser.add_argument("--sweep", default=None, help="CSV of parameter rows to run")
    parser.add_argument("--jobs", type=int, default=1, help="concurrent sweep rows")
    return parser


def main(argv=None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    overrides = {
        "precision": args.precision,
        "m": args.m,
        "k": args.K,
        "lmax": args.lmax,
        "lambda": args.lam,
        "oracle": args.oracle,
        "out": args.out,
    }
    try:
        if args.sweep:
            base = config_from_file(args.params_file, overrides)
            text, code = run_sweep(args.sweep, base, jobs=max(1, args.jobs))
            _write_output(text, base.output_path)
            return code
        config = config_from_file(args.params_file, overrides)
        report = run_pipeline(config)
        _write_output(report.text, config.output_path)
        return report.exit_code
    except InvalidParametersError as exc:
        print(f"charexp: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CharexpError as exc:
        print(f"charexp: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
