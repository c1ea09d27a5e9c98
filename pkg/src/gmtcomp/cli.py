"""Command-line interface: calibrate, solve, reform, sweep, verify.

Examples::

    gmtcomp calibrate --moments moments.json
    gmtcomp solve --tm 0.15
    gmtcomp reform --tm 0.16 --phi 1.0 --compliance-cost 10.5
    gmtcomp sweep --tm-range 0:1 --step 0.001 --out results/
    gmtcomp verify --sample-size 200 --seed 0

Without ``--params`` the bundled headline parameter file is used (the
real-response variant picks its own bundled file). ``GMTCOMP_OUT_DIR``
overrides the output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .calibration import MomentTargets, calibrate, load_moments_file
from .config import (
    DEFAULT_MOMENTS_FILE,
    DEFAULT_PARAMS_FILE,
    DEFAULT_REAL_RESPONSE_PARAMS_FILE,
    bundled_path,
    load_params_file,
)
from .errors import CalibrationError, ConvergenceError, DomainError
from .extensions import real_response_regime0_diagnostics
from .oracle import GridSpec
from .report import build_reform_report, build_sweep
from .verify import run_conformance

_VARIANT_CHOICES = ("baseline", "decentralised", "real-response")


def _variant_key(name: str) -> str:
    return name.replace("-", "_")


def _load_params(args):
    variant = _variant_key(getattr(args, "variant", "baseline"))
    if args.params is not None:
        return load_params_file(args.params, variant), variant
    default = (DEFAULT_REAL_RESPONSE_PARAMS_FILE if variant == "real_response"
               else DEFAULT_PARAMS_FILE)
    return load_params_file(bundled_path(default), variant), variant


def _out_dir(args):
    env = os.environ.get("GMTCOMP_OUT_DIR")
    chosen = env if env else getattr(args, "out", None)
    if chosen is None:
        return None
    path = Path(chosen)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit(args, text: str, filename: str):
    out_dir = _out_dir(args)
    if out_dir is None:
        sys.stdout.write(text)
    else:
        target = out_dir / filename
        target.write_text(text, newline="\n")
        print(f"wrote {target}")


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def cmd_calibrate(args) -> int:
    moments_path = args.moments if args.moments else bundled_path(DEFAULT_MOMENTS_FILE)
    spec = load_moments_file(moments_path)
    variant = _variant_key(args.variant) if args.variant else spec["variant"]
    targets = MomentTargets(spec["t_n0"], spec["shifted_share"])
    result = calibrate(targets, spec["H"], spec["phi"], spec["Pi"], variant)

    payload = {
        "variant": result.variant,
        "fitted": {"lambda": result.mvpf_hat, "delta": result.shifting_cost_hat},
        "fixed": {"H": result.havens, "phi": result.coverage, "Pi": result.total_profits},
        "residual": result.residual,
        "targeted_moments": {
            "t_n0": {"model": result.moments_model.t_n0, "data": spec["t_n0"]},
            "shifted_share": {"model": result.moments_model.shifted_share,
                              "data": spec["shifted_share"]},
        },
        "nontargeted_moments": result.nontargeted,
    }
    if result.variant == "real_response":
        payload["fitted"]["Pi_b"] = result.baseline_profits_hat
        diag = real_response_regime0_diagnostics(result.params)
        payload["closed_form_note"] = {
            "published_closed_form_rate": diag.closed_form_rate,
            "solver_rate": diag.solver_rate,
            "residual": diag.residual,
            "note": ("published closed-form unconstrained rate disagrees with "
                     "the numeric first-order condition; the solver value is "
                     "authoritative"),
        }

    if args.format == "json":
        _emit(args, _json_text(payload), "calibration.json")
    else:
        lines = [f"Calibration ({result.variant})"]
        lines.append(f"  lambda = {result.mvpf_hat:.4f}")
        lines.append(f"  delta  = {result.shifting_cost_hat:.4f}")
        if result.baseline_profits_hat is not None:
            lines.append(f"  Pi_b   = {result.baseline_profits_hat:.1f} bUSD")
        lines.append(f"  fixed: H={result.havens}, phi={result.coverage}, "
                     f"Pi={result.total_profits} bUSD")
        lines.append(f"  residual = {result.residual:.3e}")
        m = result.moments_model
        lines.append(f"  targeted: t_n0 {100 * m.t_n0:.1f}% (data "
                     f"{100 * spec['t_n0']:.1f}%), share {100 * m.shifted_share:.1f}% "
                     f"(data {100 * spec['shifted_share']:.1f}%)")
        lines.append(f"  non-targeted: t_h0 {100 * m.t_h0:.1f}%, revenue loss "
                     f"{m.revenue_loss:.0f} bUSD")
        if result.variant == "real_response":
            note = payload["closed_form_note"]
            lines.append(
                f"  note: published closed-form rate "
                f"{100 * note['published_closed_form_rate']:.1f}% vs solver "
                f"{100 * note['solver_rate']:.1f}% (residual kept as diagnostic)")
        _emit(args, "\n".join(lines) + "\n", "calibration.txt")
    return 0


def cmd_solve(args) -> int:
    params, variant = _load_params(args)
    from .report import _solve  # single source for variant dispatch
    outcome = _solve(args.tm, params, variant, args.selection)
    payload = {
        "t_m": args.tm,
        "variant": variant,
        "regime": outcome.regime.value,
        "nonhaven": {"small_rate": outcome.nonhaven.small_rate,
                     "large_rate": outcome.nonhaven.large_rate},
        "haven": {"small_rate": outcome.haven.small_rate,
                  "large_rate": outcome.haven.large_rate},
        "theta_small": outcome.theta_small,
        "theta_large": outcome.theta_large,
        "shifted_profits_total": outcome.shifted_profits_total,
        "welfare_nonhaven": outcome.welfare_nonhaven,
        "welfare_haven_total": outcome.welfare_haven_total,
        "welfare_world": outcome.welfare_world,
        "revenue_nonhaven": outcome.revenue_nonhaven,
        "revenue_haven_total": outcome.revenue_haven_total,
    }
    if args.format == "json":
        _emit(args, _json_text(payload), "solve.json")
    else:
        lines = [
            f"floor {100 * args.tm:.2f}% -> regime {outcome.regime.value}",
            f"  non-haven: small {100 * outcome.nonhaven.small_rate:.2f}%, "
            f"large {100 * outcome.nonhaven.large_rate:.2f}%",
            f"  haven:     small {100 * outcome.haven.small_rate:.2f}%, "
            f"large {100 * outcome.haven.large_rate:.2f}%",
            f"  shifted profits {outcome.shifted_profits_total:.1f} bUSD",
            f"  welfare (nonhaven, haven, world): {outcome.welfare_nonhaven:.1f}, "
            f"{outcome.welfare_haven_total:.1f}, {outcome.welfare_world:.1f} bUSD",
            f"  revenue (nonhaven, haven): {outcome.revenue_nonhaven:.1f}, "
            f"{outcome.revenue_haven_total:.1f} bUSD",
        ]
        _emit(args, "\n".join(lines) + "\n", "solve.txt")
    return 0


def cmd_reform(args) -> int:
    params, variant = _load_params(args)
    report = build_reform_report(
        params, args.tm, variant=variant, selection=args.selection,
        compliance_cost=args.compliance_cost, coverage=args.phi)
    if args.format == "json":
        _emit(args, _json_text(report.to_json_dict()), f"reform_{report.scenario}.json")
    else:
        _emit(args, report.to_text(), f"reform_{report.scenario}.txt")
    return 0


def cmd_sweep(args) -> int:
    params, variant = _load_params(args)
    try:
        start_s, stop_s = args.tm_range.split(":")
        start, stop = float(start_s), float(stop_s)
    except ValueError as exc:
        raise DomainError(
            f"--tm-range must look like START:STOP, got {args.tm_range!r}") from exc
    phis = ([float(x) for x in args.phi_list.split(",")]
            if args.phi_list else [params.coverage])
    if len(phis) > 1 and _out_dir(args) is None:
        raise DomainError("multiple --phi-list values need --out DIR")
    from .report import _with_coverage
    for phi in phis:
        dataset = build_sweep(_with_coverage(params, phi), start, stop, args.step,
                              variant=variant, selection=args.selection)
        _emit(args, dataset.to_csv(), f"sweep_{variant}_phi{phi:g}.csv")
    return 0


def cmd_verify(args) -> int:
    params, _ = _load_params(args)
    grid = GridSpec(step=args.grid_step)
    report = run_conformance(params, sample_size=args.sample_size,
                             seed=args.seed, grid=grid)
    if args.format == "json":
        _emit(args, _json_text(report.to_json_dict()), "verify.json")
    else:
        _emit(args, report.to_text(), "verify.txt")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmtcomp",
        description=("Tax-competition equilibria under a partial-coverage "
                     "global minimum tax"))
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, formats=("json", "text")):
        p.add_argument("--params", metavar="FILE",
                       help="params JSON file (default: bundled headline file)")
        p.add_argument("--out", metavar="DIR",
                       help="write output files here instead of stdout")
        p.add_argument("--format", choices=formats, default=formats[0])

    p = sub.add_parser("calibrate", help="fit lambda/delta to data moments")
    p.add_argument("--moments", metavar="FILE",
                   help="moments JSON file (default: bundled)")
    p.add_argument("--variant", choices=("baseline", "real-response"),
                   help="override the variant named in the moments file")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("solve", help="equilibrium at one floor rate")
    add_common(p)
    p.add_argument("--tm", type=float, required=True, metavar="RATE")
    p.add_argument("--variant", choices=_VARIANT_CHOICES, default="baseline")
    p.add_argument("--selection", choices=("commit", "split"), default="commit")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reform", help="reform deltas against the no-floor benchmark")
    add_common(p, formats=("text", "json"))
    p.add_argument("--tm", type=float, required=True, metavar="RATE")
    p.add_argument("--phi", type=float, metavar="RATE",
                   help="coverage override; differing from the params file "
                        "adds a coverage-gap comparison")
    p.add_argument("--variant", choices=_VARIANT_CHOICES, default="baseline")
    p.add_argument("--selection", choices=("commit", "split"), default="commit")
    p.add_argument("--compliance-cost", type=float, metavar="BUSD",
                   help="subtract this constant from world/non-haven gains")
    p.set_defaults(func=cmd_reform)

    p = sub.add_parser("sweep", help="equilibrium path over a floor grid, CSV")
    p.add_argument("--params", metavar="FILE")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--format", choices=("csv",), default="csv")
    p.add_argument("--tm-range", default="0:1", metavar="START:STOP")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--phi-list", metavar="P1,P2,...",
                   help="run the sweep at each coverage level")
    p.add_argument("--variant", choices=_VARIANT_CHOICES, default="baseline")
    p.add_argument("--selection", choices=("commit", "split"), default="commit")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="closed-form/oracle and derivative conformance")
    add_common(p, formats=("text", "json"))
    p.add_argument("--sample-size", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-step", type=float, default=1e-4)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, CalibrationError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
