"""Command-line front end emitting figure-ready CSV/JSON.

Commands: `regions` (attack-plane scan), `counterexample` (one-mode
reachability report), `rate-sweep` (key-rate curves), `validate-mc`
(Monte Carlo consistency report). Every command is deterministic given its
full flag set, embeds its configuration in the output for provenance, and
writes atomically (temp file + rename) so invalid inputs never leave
partial files behind.

Exit codes: 0 ok, 1 input error, 2 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    ReachabilityReport,
    counterexample_attack,
    one_mode_simulation_search,
    region_scan,
)
from .attacks import TwoModeAttack, attack_cm, entangled_band, noise_aggregates
from .errors import InternalConsistencyError, UnphysicalStateError, ValidationError
from .keyrate import Direction, RateConfig, key_rate
from .protocol import ProtocolParams, conditional_cm_analytic, conditional_cm_numeric
from .simulation import (
    estimate_transmissivities,
    reconstruct_conditional_cm,
    reconstruction_standard_errors,
    simulate_runs,
)

OUTPUT_DIR_ENV = "CVMDI_OUTPUT_DIR"
_MC_FLOOR = 1000


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; remap to 1 (input error).
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_range(text: str) -> tuple[float, float, int]:
    """Parse 'start:stop:steps' with inclusive endpoints."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"range must be start:stop:steps, got {text!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValidationError(f"malformed range {text!r}: {exc}") from None
    if steps < 2:
        raise ValidationError(f"range needs at least 2 steps, got {steps}")
    if not (np.isfinite(start) and np.isfinite(stop) and start <= stop):
        raise ValidationError(f"invalid range endpoints in {text!r}")
    return start, stop, steps


def _resolve_out(path: str | None, default_name: str) -> Path:
    if path is not None:
        return Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    return (Path(base) if base else Path.cwd()) / default_name


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"func", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _report_json(schema: str, args: argparse.Namespace, body: dict) -> str:
    return json.dumps({"schema": schema, "config": _config_dict(args), **body}, indent=2) + "\n"


def _csv_header(schema: str, args: argparse.Namespace, columns: str) -> list[str]:
    return [
        f"# schema: {schema}",
        f"# config: {json.dumps(_config_dict(args))}",
        columns,
    ]


def cmd_regions(args: argparse.Namespace) -> int:
    omega = _parse_range(args.omega)
    g = _parse_range(args.g)
    points = region_scan((omega[0], omega[1]), (g[0], g[1]), (omega[2], g[2]))
    lines = _csv_header("cvmdi.regions v1", args, "omega,g,region")
    lines += [f"{p.omega:.12g},{p.g:.12g},{p.region.value}" for p in points]
    out = _resolve_out(args.out, "regions.csv")
    _atomic_write(out, "\n".join(lines) + "\n")
    print(f"wrote {len(points)} rows to {out}")
    return 0


def _reachability_body(report: ReachabilityReport) -> dict:
    return {
        "target_v11": report.target_v11,
        "best_one_mode_v11": report.best_one_mode_v11,
        "gap": report.gap,
        "best_one_mode_params": list(report.best_one_mode_params),
        "matched": report.matched,
        "cm_distance": report.cm_distance,
    }


def cmd_counterexample(args: argparse.Namespace) -> int:
    if not args.mu > 1.0:
        raise ValidationError(f"--mu must exceed 1, got {args.mu}")
    if not 0.0 < args.tau < 1.0:
        raise ValidationError(f"--tau must lie in (0, 1), got {args.tau}")
    attack = counterexample_attack(args.omega)
    params = ProtocolParams(mu=args.mu, tau_a=args.tau, tau_b=args.tau)
    target = conditional_cm_analytic(params, attack)
    report = one_mode_simulation_search(target, params)
    agg = noise_aggregates(attack)
    band = entangled_band(args.omega)
    best = TwoModeAttack(*report.best_one_mode_params)
    body = {
        "attack": {"omega_a": attack.omega_a, "omega_b": attack.omega_b, "g": attack.g, "g_prime": attack.g_prime},
        "entangled_band": {"lower_exclusive": band.lower, "upper_inclusive": band.upper},
        "x": agg.x,
        "x_prime": agg.x_prime,
        **_reachability_body(report),
        "target_cm": target.entries.tolist(),
        "best_one_mode_cm": conditional_cm_analytic(params, best).entries.tolist(),
    }
    out = _resolve_out(args.out, "counterexample.json")
    _atomic_write(out, _report_json("cvmdi.counterexample v1", args, body))
    print(f"wrote report to {out} (matched={report.matched}, gap={report.gap:.6g})")
    return 0


_SWEEP_AXES = ("mu", "tau", "omega", "g")


def _sweep_point(args: argparse.Namespace, axis_value: float) -> tuple[ProtocolParams, TwoModeAttack]:
    mu, tau_a, tau_b = args.mu, args.tau_a, args.tau_b
    omega_a, omega_b, g, g_prime = args.omega_a, args.omega_b, args.g, args.gprime
    if args.axis == "mu":
        mu = axis_value
    elif args.axis == "tau":
        tau_a = tau_b = axis_value
    elif args.axis == "omega":
        omega_a = omega_b = axis_value
    else:  # g: sweep the symmetric family g' = -g
        g, g_prime = axis_value, -axis_value
    params = ProtocolParams(mu=mu, tau_a=tau_a, tau_b=tau_b)
    return params, TwoModeAttack(omega_a=omega_a, omega_b=omega_b, g=g, g_prime=g_prime)


def cmd_rate_sweep(args: argparse.Namespace) -> int:
    if args.axis not in _SWEEP_AXES:
        raise ValidationError(f"--axis must be one of {_SWEEP_AXES}, got {args.axis}")
    args.tau_a = args.tau if args.tau_a is None else args.tau_a
    args.tau_b = args.tau if args.tau_b is None else args.tau_b
    if args.tau_a is None or args.tau_b is None:
        raise ValidationError("provide --tau, or both --tau-a and --tau-b")
    start, stop, steps = _parse_range(args.range)
    config = RateConfig(reconciliation_efficiency=args.xi, direction=Direction(args.direction))

    lines = _csv_header("cvmdi.rate_sweep v1", args, f"{args.axis},mutual_information,holevo_bound,rate,physical")
    for value in np.linspace(start, stop, steps):
        params, attack = _sweep_point(args, float(value))
        try:
            cm = (
                conditional_cm_analytic(params, attack)
                if params.symmetric
                else conditional_cm_numeric(params, attack)
            )
        except UnphysicalStateError:
            # Flagged, not silently dropped: the grid row stays in the output.
            lines.append(f"{value:.12g},nan,nan,nan,0")
            continue
        result = key_rate(cm, config)
        lines.append(
            f"{value:.12g},{result.mutual_information:.12g},{result.holevo_bound:.12g},{result.rate:.12g},1"
        )
    out = _resolve_out(args.out, "rate_sweep.csv")
    _atomic_write(out, "\n".join(lines) + "\n")
    print(f"wrote {steps} rows to {out}")
    return 0


def cmd_validate_mc(args: argparse.Namespace) -> int:
    if args.n < _MC_FLOOR:
        raise ValidationError(f"--n must be at least {_MC_FLOOR}, got {args.n}")
    params = ProtocolParams(mu=args.mu, tau_a=args.tau_a, tau_b=args.tau_b)
    attack = TwoModeAttack(omega_a=args.omega_a, omega_b=args.omega_b, g=args.g, g_prime=args.gprime)
    attack_cm(attack)

    data = simulate_runs(params, attack, args.n, args.seed)
    tau_a_hat, tau_b_hat = estimate_transmissivities(data)
    reconstructed = reconstruct_conditional_cm(data)
    se = reconstruction_standard_errors(data)
    analytic = (
        conditional_cm_analytic(params, attack) if params.symmetric else conditional_cm_numeric(params, attack)
    )
    z = (reconstructed.entries - analytic.entries) / se

    body = {
        "tau_a_hat": tau_a_hat,
        "tau_b_hat": tau_b_hat,
        "tau_a_error": tau_a_hat - params.tau_a,
        "tau_b_error": tau_b_hat - params.tau_b,
        "analytic_cm": analytic.entries.tolist(),
        "reconstructed_cm": reconstructed.entries.tolist(),
        "standard_errors": se.tolist(),
        "z_scores": z.tolist(),
        "max_abs_z": float(np.abs(z).max()),
    }
    out = _resolve_out(args.out, "validate_mc.json")
    _atomic_write(out, _report_json("cvmdi.validate_mc v1", args, body))
    print(f"wrote report to {out} (max |z| = {body['max_abs_z']:.3f})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cvmdi", description="Gaussian-attack security analysis for CV-MDI-QKD")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("regions", help="scan the (omega, g) attack plane to CSV")
    p.add_argument("--omega", required=True, help="omega range start:stop:steps (inclusive)")
    p.add_argument("--g", required=True, help="g range start:stop:steps (inclusive)")
    p.add_argument("--out", help=f"output CSV path (default: regions.csv under ${OUTPUT_DIR_ENV} or cwd)")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("counterexample", help="one-mode reachability report for the band-midpoint attack")
    p.add_argument("--omega", type=float, required=True, help="thermal variance of the symmetric attack (> 1)")
    p.add_argument("--mu", type=float, required=True, help="source variance (> 1)")
    p.add_argument("--tau", type=float, required=True, help="link transmissivity in (0, 1)")
    p.add_argument("--out", help="output JSON path")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("rate-sweep", help="key-rate curve along one parameter axis, to CSV")
    p.add_argument("--axis", required=True, choices=_SWEEP_AXES, help="swept parameter")
    p.add_argument("--range", required=True, help="axis range start:stop:steps (inclusive)")
    p.add_argument("--mu", type=float, default=10.0)
    p.add_argument("--tau", type=float, help="symmetric transmissivity (sets both links)")
    p.add_argument("--tau-a", type=float, dest="tau_a", help="link A transmissivity (with --tau-b)")
    p.add_argument("--tau-b", type=float, dest="tau_b", help="link B transmissivity (with --tau-a)")
    p.add_argument("--omega-a", type=float, dest="omega_a", default=1.0)
    p.add_argument("--omega-b", type=float, dest="omega_b", default=1.0)
    p.add_argument("--g", type=float, default=0.0)
    p.add_argument("--gprime", type=float, default=0.0)
    p.add_argument("--xi", type=float, default=1.0, help="reconciliation efficiency in (0, 1]")
    p.add_argument(
        "--direction",
        default=Direction.DIRECT_ON_BOB.value,
        choices=[d.value for d in Direction],
    )
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_rate_sweep)

    p = sub.add_parser("validate-mc", help="Monte Carlo reconstruction vs analytic CM, to JSON")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--tau-a", type=float, dest="tau_a", required=True)
    p.add_argument("--tau-b", type=float, dest="tau_b", required=True)
    p.add_argument("--omega-a", type=float, dest="omega_a", required=True)
    p.add_argument("--omega-b", type=float, dest="omega_b", required=True)
    p.add_argument("--g", type=float, default=0.0)
    p.add_argument("--gprime", type=float, default=0.0)
    p.add_argument("--n", type=int, required=True, help=f"number of trials (>= {_MC_FLOOR})")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="output JSON path")
    p.set_defaults(func=cmd_validate_mc)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ValidationError, ValueError) as exc:
        print(f"cvmdi: input error: {exc}", file=sys.stderr)
        return 1
    except InternalConsistencyError as exc:
        print(f"cvmdi: internal consistency failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
