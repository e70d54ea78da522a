"""Command-line surface: predictions, scans, event simulation, and self-checks.

Angles on the command line are degrees; everything internal is radians.
Outputs are plot-ready CSV/JSON with full provenance (tool version, seed,
catalog hash, parameter echo) and no timestamps, so rerunning the echoed
command reproduces every byte.

Exit codes: 0 success (for ``simulate``: violation observed at or above the
significance threshold), 1 completed without a violation (``simulate``) or
with failed identities (``check``), 2 usage or runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import __version__
from .catalog import (CATALOG_ENV_VAR, MOTHERS, DecayMode, ProductionChannel,
                      catalog_sha256, default_catalog_path, load_catalog,
                      make_pair_channel)
from .correlations import (correlation_singlet, correlation_triplet_m0,
                           correlation_via_operators, joint_prob_matrix,
                           joint_prob_singlet, parity_flip_z)
from .geometry import (build_settings, load_settings, validate_settings)
from .inequalities import (InequalityReport, leggett_max_lhs, leggett_sum_curve,
                           leggett_sum_lhs, optimal_phi, symmetric_alpha_threshold)
from .povm import MeasurementParams
from .quantum import Direction, singlet_state, triplet_m0_state
from .simulation import (estimate_leggett_lhs, sample_pair_decay,
                         save_events, spin_correlation_matrix)

TOOL = "hyperon-leggett"


@dataclass(frozen=True)
class ScanResult:
    """Grid scan output: axis columns plus derived columns, ready for CSV."""

    axes: tuple[str, ...]
    columns: dict[str, np.ndarray]
    bound: float
    metadata: dict[str, Any]

    def __post_init__(self) -> None:
        lengths = {name: len(col) for name, col in self.columns.items()}
        if len(set(lengths.values())) != 1:
            raise ValueError(f"scan columns differ in length: {lengths}")
        for axis in self.axes:
            if axis not in self.columns:
                raise ValueError(f"axis column {axis!r} missing from scan columns")
        if not _lexicographically_sorted([self.columns[axis] for axis in self.axes]):
            raise ValueError("scan grid must be monotone in its axis columns")
        if "lhs" in self.columns and "violated" in self.columns:
            lhs = self.columns["lhs"]
            violated = self.columns["violated"].astype(bool)
            if np.any(violated & ~(lhs > self.bound)):
                raise ValueError("violation mask inconsistent with lhs and bound")


def _lexicographically_sorted(axis_columns: Sequence[np.ndarray]) -> bool:
    rows = np.column_stack(axis_columns)
    for prev, cur in zip(rows[:-1], rows[1:]):
        for p, c in zip(prev, cur):
            if c > p:
                break
            if c < p:
                return False
    return True


@dataclass(frozen=True)
class ResolvedChannel:
    channel: ProductionChannel
    pa: MeasurementParams
    pb: MeasurementParams
    catalog_path: str
    catalog_sha: str


def _resolve_channel(args: argparse.Namespace) -> ResolvedChannel:
    catalog_path = Path(args.catalog) if args.catalog else default_catalog_path()
    if args.channel:
        modes = load_catalog(catalog_path)
        sha = catalog_sha256(catalog_path)
        channel = make_pair_channel(modes, args.channel, mother=args.mother)
        mode_a, mode_b = channel.mode_a, channel.mode_b
        if args.alpha_a is not None:
            mode_a = replace(mode_a, alpha=args.alpha_a)
        if args.alpha_b is not None:
            mode_b = replace(mode_b, alpha=args.alpha_b)
        channel = ProductionChannel(mother=args.mother, mode_a=mode_a, mode_b=mode_b)
        catalog_str = str(catalog_path)
    else:
        if args.alpha_a is None or args.alpha_b is None:
            raise ValueError("provide --channel, or both --alpha-a and --alpha-b")
        mode_a = DecayMode("customA", "custom", args.alpha_a, 0.0)
        mode_b = DecayMode("customB", "custom", args.alpha_b, 0.0)
        channel = ProductionChannel(mother=args.mother, mode_a=mode_a, mode_b=mode_b)
        sha, catalog_str = "-", "-"
    pa = MeasurementParams(args.eta_a, channel.mode_a.alpha)
    pb = MeasurementParams(args.eta_b, channel.mode_b.alpha)
    return ResolvedChannel(channel=channel, pa=pa, pb=pb,
                           catalog_path=catalog_str, catalog_sha=sha)


def _pair_correlation(spin_state: str, pa: MeasurementParams, pb: MeasurementParams,
                      a: Direction, b: Direction) -> float:
    if spin_state == "singlet":
        return correlation_singlet(pa, a, pb, b)
    return correlation_triplet_m0(pa, parity_flip_z(a), pb, b)


def _leggett_report_at(settings, spin_state: str, pa: MeasurementParams,
                       pb: MeasurementParams) -> InequalityReport:
    e_pairs = []
    for i in range(3):
        e = _pair_correlation(spin_state, pa, pb, settings.a[i], settings.b[i])
        ep = _pair_correlation(spin_state, pa, pb, settings.a[i], settings.b_prime[i])
        e_pairs.append((e, ep))
    return leggett_sum_lhs(settings, e_pairs, alpha_b=pb.alpha)


def _resolve_settings(args: argparse.Namespace, alpha_a: float):
    if getattr(args, "settings_file", None):
        settings = load_settings(args.settings_file)
        violations = validate_settings(settings)
        if violations:
            raise ValueError(f"{args.settings_file}: " + "; ".join(violations))
        return settings
    if getattr(args, "phi_deg", None) is not None:
        phi = math.radians(args.phi_deg)
    else:
        phi = optimal_phi(alpha_a)
    return build_settings(phi)


def _metadata(args: argparse.Namespace, argv: Sequence[str],
              extra: Mapping[str, Any] | None = None) -> dict[str, Any]:
    meta: dict[str, Any] = {
        "tool": TOOL,
        "version": __version__,
        "command": " ".join([TOOL, *argv]),
    }
    if extra:
        meta.update(extra)
    return meta


def _emit_json(payload: Mapping[str, Any], out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_csv(result: ScanResult, header_order: Sequence[str], out: str | None) -> None:
    lines = [f"# {key} {value}" for key, value in result.metadata.items()]
    lines.append(",".join(header_order))
    cols = [result.columns[name] for name in header_order]
    for row in zip(*cols):
        cells = []
        for value in row:
            if isinstance(value, (bool, np.bool_)):
                cells.append(str(int(value)))
            else:
                cells.append(repr(float(value)))  # shortest exact round trip
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_predict(args: argparse.Namespace, argv: Sequence[str]) -> int:
    resolved = _resolve_channel(args)
    settings = _resolve_settings(args, resolved.pa.alpha)
    report = _leggett_report_at(settings, resolved.channel.spin_state,
                                resolved.pa, resolved.pb)
    phi_star = optimal_phi(resolved.pa.alpha)
    payload = _metadata(args, argv, {
        "catalog": resolved.catalog_path,
        "catalog_sha256": resolved.catalog_sha,
        "channel": resolved.channel.label(),
        "spin_state": resolved.channel.spin_state,
        "eta_a": resolved.pa.eta, "alpha_a": resolved.pa.alpha,
        "eta_b": resolved.pb.eta, "alpha_b": resolved.pb.alpha,
        "phi_rad": settings.phi, "phi_deg": math.degrees(settings.phi),
        "report": report.to_dict(),
        "optimal_phi_rad": phi_star,
        "optimal_phi_deg": math.degrees(phi_star),
        "max_lhs": leggett_max_lhs(resolved.pa.alpha, resolved.pb.alpha),
        "max_violated": leggett_max_lhs(resolved.pa.alpha, resolved.pb.alpha) > 2.0,
        "symmetric_alpha_threshold": symmetric_alpha_threshold(),
    })
    _emit_json(payload, args.out)
    return 0


def cmd_scan_phi(args: argparse.Namespace, argv: Sequence[str]) -> int:
    if args.steps < 2:
        raise ValueError("--steps must be at least 2")
    if not 0.0 < args.phi_min_deg < args.phi_max_deg <= 180.0:
        raise ValueError("need 0 < --phi-min-deg < --phi-max-deg <= 180")
    resolved = _resolve_channel(args)
    phis = np.linspace(math.radians(args.phi_min_deg),
                       math.radians(args.phi_max_deg), args.steps)
    lhs = np.empty(args.steps)
    for i, phi in enumerate(phis):
        settings = build_settings(float(phi))
        lhs[i] = _leggett_report_at(settings, resolved.channel.spin_state,
                                    resolved.pa, resolved.pb).lhs
    result = ScanResult(
        axes=("phi_rad",),
        columns={
            "phi_deg": np.degrees(phis),
            "phi_rad": phis,
            "lhs": lhs,
            "bound": np.full(args.steps, 2.0),
            "margin": lhs - 2.0,
            "violated": lhs > 2.0,
        },
        bound=2.0,
        metadata=_metadata(args, argv, {
            "catalog": resolved.catalog_path,
            "catalog_sha256": resolved.catalog_sha,
            "channel": resolved.channel.label(),
            "spin_state": resolved.channel.spin_state,
            "eta_a": resolved.pa.eta, "alpha_a": resolved.pa.alpha,
            "eta_b": resolved.pb.eta, "alpha_b": resolved.pb.alpha,
        }))
    _emit_csv(result, ("phi_deg", "phi_rad", "lhs", "bound", "margin", "violated"),
              args.out)
    return 0


def cmd_scan_region(args: argparse.Namespace, argv: Sequence[str]) -> int:
    if args.steps < 2:
        raise ValueError("--steps must be at least 2")
    if not 0.0 <= args.alpha_min < args.alpha_max <= 1.0:
        raise ValueError("need 0 <= --alpha-min < --alpha-max <= 1")
    grid = np.linspace(args.alpha_min, args.alpha_max, args.steps)
    alpha_a = np.repeat(grid, args.steps)
    alpha_b = np.tile(grid, args.steps)
    max_lhs = 2.0 * alpha_b * np.hypot(alpha_a, 1.0 / 3.0)
    violated = (alpha_a ** 2 + 1.0 / 9.0) * alpha_b ** 2 > 1.0
    result = ScanResult(
        axes=("alpha_a", "alpha_b"),
        columns={"alpha_a": alpha_a, "alpha_b": alpha_b,
                 "lhs": max_lhs, "violated": violated},
        bound=2.0,
        metadata=_metadata(args, argv, {
            "bound": 2.0,
            "boundary": "(alpha_a^2 + 1/9) * alpha_b^2 = 1",
            "symmetric_alpha_threshold": symmetric_alpha_threshold(),
        }))
    _emit_csv(result, ("alpha_a", "alpha_b", "lhs", "violated"), args.out)
    return 0


def cmd_simulate(args: argparse.Namespace, argv: Sequence[str]) -> int:
    if args.events < 100:
        raise ValueError("--events must be at least 100 for the estimators")
    resolved = _resolve_channel(args)
    if resolved.pa.eta != 0.0 or resolved.pb.eta != 0.0:
        raise ValueError("event simulation models unbiased decay measurements; "
                         "eta overrides are not supported here")
    settings = _resolve_settings(args, resolved.pa.alpha)

    sample = sample_pair_decay(resolved.channel, args.events, args.seed,
                               catalog_sha256=resolved.catalog_sha)
    estimate = estimate_leggett_lhs(sample, settings)
    reference = _leggett_report_at(settings, resolved.channel.spin_state,
                                   resolved.pa, resolved.pb)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    events_path = out_dir / "events.txt"
    save_events(events_path, sample)

    significance = (estimate.lhs_hat - 2.0) / estimate.std_error if estimate.std_error else 0.0
    violation = significance >= args.sigma_threshold
    payload = _metadata(args, argv, {
        "catalog": resolved.catalog_path,
        "catalog_sha256": resolved.catalog_sha,
        "channel": resolved.channel.label(),
        "spin_state": resolved.channel.spin_state,
        "alpha_a": resolved.pa.alpha, "alpha_b": resolved.pb.alpha,
        "generator": sample.generator,
        "seed": args.seed,
        "n_events": args.events,
        "phi_rad": settings.phi, "phi_deg": math.degrees(settings.phi),
        "events_file": str(events_path),
        "lhs_hat": estimate.lhs_hat,
        "std_error": estimate.std_error,
        "error_method": estimate.method,
        "e_sums": list(estimate.e_sums),
        "e_sum_errors": list(estimate.e_sum_errors),
        "bound": 2.0,
        "closed_form_lhs": reference.lhs,
        "significance": significance,
        "sigma_threshold": args.sigma_threshold,
        "violation_observed": violation,
    })
    summary_path = out_dir / "summary.json"
    _emit_json(payload, str(summary_path))
    _emit_json(payload, None)
    return 0 if violation else 1


def _run_checks(seed: int, trials: int, negative_control: bool) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(seed)
    results: list[tuple[str, bool, str]] = []

    def random_direction() -> Direction:
        v = rng.normal(size=3)
        return Direction.normalized(*v)

    def random_params() -> MeasurementParams:
        eta = rng.uniform(-1.0, 1.0)
        alpha = rng.uniform(-1.0, 1.0) * (1.0 - abs(eta))
        return MeasurementParams(eta, alpha)

    def record(name: str, residual: float, tol: float) -> None:
        ok = residual <= tol
        results.append((name, ok, f"max residual {residual:.3e} (tol {tol:.0e})"))

    # Closed forms against the 4x4 matrix path.
    worst_joint = 0.0
    worst_corr_singlet = 0.0
    worst_corr_triplet = 0.0
    singlet = singlet_state()
    triplet = triplet_m0_state()
    for _ in range(trials):
        pa, pb = random_params(), random_params()
        a, b = random_direction(), random_direction()
        table_closed = joint_prob_singlet(pa, a, pb, b)
        table_matrix = joint_prob_matrix(singlet, pa, a, pb, b)
        worst_joint = max(worst_joint, max(
            abs(table_closed.value(j, k) - table_matrix.value(j, k))
            for j in (1, -1) for k in (1, -1)))
        closed_e = correlation_singlet(pa, a, pb, b)
        if negative_control:
            closed_e = -closed_e
        worst_corr_singlet = max(worst_corr_singlet, abs(
            closed_e - correlation_via_operators(singlet, pa, a, pb, b)))
        ua = MeasurementParams.unsharp(pa.alpha)
        ub = MeasurementParams.unsharp(pb.alpha)
        worst_corr_triplet = max(worst_corr_triplet, abs(
            correlation_triplet_m0(ua, a, ub, b)
            - correlation_via_operators(triplet, ua, a, ub, b)))
    record("singlet joint table: closed form vs matrix path", worst_joint, 1e-12)
    record("singlet correlation: closed form vs operator average", worst_corr_singlet, 1e-12)
    record("triplet correlation: closed form vs operator average", worst_corr_triplet, 1e-12)

    # Sampler moments against the spin-correlation matrix.
    n_events = 200_000
    worst_sigma = 0.0
    for mother in MOTHERS:
        mode = DecayMode("checkY", "check", 0.9, 0.0, None)
        channel = ProductionChannel(mother, mode, mode)
        c_matrix = spin_correlation_matrix(channel)
        sample = sample_pair_decay(channel, n_events, seed)
        prods = 9.0 * np.einsum("ni,nj->nij", sample.n_a, sample.n_b)
        mean = prods.mean(axis=0)
        se = prods.std(axis=0, ddof=1) / math.sqrt(n_events)
        target = 0.9 * 0.9 * c_matrix
        worst_sigma = max(worst_sigma, float(np.max(np.abs(mean - target) / se)))
    results.append(("sampler moment matrix vs spin-correlation matrix",
                    worst_sigma <= 5.0, f"max deviation {worst_sigma:.2f} sigma (tol 5)"))

    # Threshold root: closed form against an independent bisection.
    threshold = symmetric_alpha_threshold()
    lo, hi = 0.5, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid ** 4 + mid ** 2 / 9.0 < 1.0:
            lo = mid
        else:
            hi = mid
    record("symmetric threshold: closed form vs bisection",
           abs(threshold - 0.5 * (lo + hi)), 1e-12)
    record("symmetric threshold: defining polynomial residual",
           abs(threshold ** 4 + threshold ** 2 / 9.0 - 1.0), 1e-10)

    # Geometry identities over a phi grid.
    worst_geo = 0.0
    worst_len = 0.0
    for phi in np.linspace(0.01, math.pi - 0.01, 100):
        settings = build_settings(float(phi))
        if validate_settings(settings):
            worst_geo = math.inf
        for i in range(3):
            d = (settings.b[i].x - settings.b_prime[i].x,
                 settings.b[i].y - settings.b_prime[i].y,
                 settings.b[i].z - settings.b_prime[i].z)
            worst_len = max(worst_len, abs(math.sqrt(sum(x * x for x in d))
                                           - 2.0 * math.sin(0.5 * phi)))
    results.append(("geometry: construction passes validation on phi grid",
                    worst_geo == 0.0, "100 points"))
    record("geometry: |b - b'| = 2 sin(phi/2)", worst_len, 1e-12)

    # Pair-state curve against the settings path.
    pa = MeasurementParams.unsharp(0.98)
    pb = MeasurementParams.unsharp(0.98)
    worst_curve = 0.0
    for phi in np.linspace(0.01, math.pi - 0.01, 100):
        settings = build_settings(float(phi))
        report = _leggett_report_at(settings, "singlet", pa, pb)
        worst_curve = max(worst_curve, abs(report.lhs - leggett_sum_curve(phi, 0.98, 0.98)))
    record("pair-state curve vs settings path", worst_curve, 1e-12)

    return results


def cmd_check(args: argparse.Namespace, argv: Sequence[str]) -> int:
    results = _run_checks(args.seed, args.trials, args.negative_control)
    failed = [name for name, ok, _ in results if not ok]
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name} ({detail})")
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 0 if not failed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL,
        description="Nonlocal-realism and local-realism bound tests for entangled "
                    "hyperon pairs measured through their weak decays.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_channel_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--channel", help="hyperon name from the catalog; the B side "
                                         "is its CP-conjugate link")
        p.add_argument("--mother", choices=MOTHERS, default="eta_c",
                       help="production channel mother (default: eta_c)")
        p.add_argument("--alpha-a", type=float, default=None,
                       help="override the A-side decay asymmetry")
        p.add_argument("--alpha-b", type=float, default=None,
                       help="override the B-side decay asymmetry")
        p.add_argument("--eta-a", type=float, default=0.0,
                       help="A-side measurement bias (default 0)")
        p.add_argument("--eta-b", type=float, default=0.0,
                       help="B-side measurement bias (default 0)")
        p.add_argument("--catalog", default=None,
                       help=f"decay catalog file (default: ${CATALOG_ENV_VAR} "
                            "or the packaged table)")

    p_predict = sub.add_parser("predict", help="closed-form bound evaluation at one angle")
    add_channel_args(p_predict)
    p_predict.add_argument("--phi-deg", type=float, default=None,
                           help="pair opening angle in degrees (default: the optimum)")
    p_predict.add_argument("--settings-file", default=None,
                           help="settings file overriding the built-in construction")
    p_predict.add_argument("--out", default=None, help="write JSON here instead of stdout")
    p_predict.set_defaults(func=cmd_predict)

    p_scan = sub.add_parser("scan-phi", help="left-hand side over an opening-angle grid (CSV)")
    add_channel_args(p_scan)
    p_scan.add_argument("--phi-min-deg", type=float, default=0.1)
    p_scan.add_argument("--phi-max-deg", type=float, default=180.0)
    p_scan.add_argument("--steps", type=int, default=1001)
    p_scan.add_argument("--out", default=None, help="write CSV here instead of stdout")
    p_scan.set_defaults(func=cmd_scan_phi)

    p_region = sub.add_parser("scan-region",
                              help="violation region over the (alpha_a, alpha_b) square (CSV)")
    p_region.add_argument("--alpha-min", type=float, default=0.0)
    p_region.add_argument("--alpha-max", type=float, default=1.0)
    p_region.add_argument("--steps", type=int, default=101, help="grid points per axis")
    p_region.add_argument("--out", default=None, help="write CSV here instead of stdout")
    p_region.set_defaults(func=cmd_scan_region)

    p_sim = sub.add_parser("simulate", help="generate decay events and estimate the bound")
    add_channel_args(p_sim)
    p_sim.add_argument("--events", type=int, required=True, help="number of pair events")
    p_sim.add_argument("--seed", type=int, default=1, help="64-bit generator seed")
    p_sim.add_argument("--phi-deg", type=float, default=None,
                       help="pair opening angle in degrees (default: the optimum)")
    p_sim.add_argument("--settings-file", default=None,
                       help="settings file overriding the built-in construction")
    p_sim.add_argument("--sigma-threshold", type=float, default=3.0,
                       help="significance (in standard errors) required to report "
                            "a violation (default 3)")
    p_sim.add_argument("--out", default=".",
                       help="output directory for events.txt and summary.json")
    p_sim.set_defaults(func=cmd_simulate)

    p_check = sub.add_parser("check", help="run the oracle cross-check suite")
    p_check.add_argument("--seed", type=int, default=20250809)
    p_check.add_argument("--trials", type=int, default=200,
                         help="random trials per identity (default 200)")
    p_check.add_argument("--negative-control", action="store_true",
                         help="inject a sign flip to confirm the checks can fail")
    p_check.set_defaults(func=cmd_check)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except (ValueError, KeyError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    raise SystemExit(main())
