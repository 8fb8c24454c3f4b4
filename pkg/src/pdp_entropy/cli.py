"""Command-line driver: ``simulate``, ``verify``, ``prior-mc`` and ``bounds``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines, then command-line flags.  Exit status is 0 on success,
1 when a verification check fails and 2 for usage or parameter errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .harness import (
    VerifyConfig,
    default_grid,
    parse_grid,
    prior_checks,
    prior_monte_carlo,
    run_verification,
)
from .sampler import PdpParams, make_rng, simulate_batch
from .special_fn import digamma, digamma_vec
from .trajectory import STEP_COLUMNS, compute_table

log = logging.getLogger("pdp_entropy")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "alpha": 0.5,
    "theta": 1.0,
    "length": 1000,
    "replicas": 1,
    "seed": 20240611,
    "truncation": 10_000,
    "out": None,
    "grid": None,
}
CASTS = {
    "alpha": float,
    "theta": float,
    "length": int,
    "replicas": int,
    "seed": int,
    "truncation": int,
    "out": str,
    "grid": str,
}

BOUNDS_COLUMNS = (
    "replica",
    "ell",
    "k",
    "last_count",
    "h_min",
    "h_pdp",
    "h_max",
    "weighted_h_min",
    "eta",
    "eta_lower",
    "eta_upper",
    "eta_approx",
    "d",
    "d_approx",
    "d_f",
    "d_f_approx",
    "out_of_bounds",
)


class UsageError(Exception):
    pass


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file; blank lines and ``#`` comments are ignored."""
    settings = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in CASTS:
            raise UsageError(f"{path}:{lineno}: unrecognised line {raw!r}")
        settings[key] = value.strip()
    return settings


def resolve_settings(args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS)
    if args.config:
        settings.update(read_config_file(args.config))
    for key in CASTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    try:
        for key, cast in CASTS.items():
            if settings[key] is not None:
                settings[key] = cast(settings[key])
    except ValueError as exc:
        raise UsageError(f"bad setting: {exc}") from exc
    if settings["length"] < 1:
        raise UsageError("length must be >= 1")
    if settings["replicas"] < 1:
        raise UsageError("replicas must be >= 1")
    if settings["seed"] < 0 or settings["seed"] >= 2**64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    return settings


def _params(settings: dict) -> PdpParams:
    try:
        return PdpParams(settings["alpha"], settings["theta"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _open_output(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", newline="", encoding="utf-8"), True
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _write_csv(path: Optional[str], header: Sequence[str], rows) -> None:
    handle, close = _open_output(path)
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    finally:
        if close:
            handle.close()


def simulate_tables(settings: dict):
    """One table per replica; replica ``r`` uses sub-stream ``r`` of the seed."""
    params = _params(settings)
    for r in range(settings["replicas"]):
        rng = make_rng(settings["seed"], r)
        n_star = simulate_batch(params, settings["length"], 1, rng)
        yield r, compute_table(n_star, params)


def cmd_simulate(settings: dict) -> int:
    rows = (row for r, table in simulate_tables(settings) for row in table.rows(replica_offset=r))
    _write_csv(settings["out"], STEP_COLUMNS, rows)
    return EXIT_OK


def bounds_rows(settings: dict):
    params = _params(settings)
    alpha, theta = params.alpha, params.theta
    psi_unseen = digamma(1.0 - alpha)
    for r, t in simulate_tables(settings):
        ell = t.ell[0].astype(float)
        prev = ell - 1.0
        x = theta + prev + 1.0
        y = t.last_count[0] - alpha
        eta_lower = np.log(x) - 1.0 / x - np.log(y) + 0.5 / y
        eta_upper = np.log(x) - 0.5 / x - np.log(y) + 1.0 / y
        eta_approx = np.log(x) - 0.5 / x + np.where(t.last_count[0] > 1, -np.log(y) + 0.5 / y, 0.0)
        # weighted max-entropy increments from ell to ell + 1
        d = digamma_vec(theta + ell + 1.0) - psi_unseen
        d_approx = np.log(ell) - psi_unseen
        d_f = (ell + 1) * np.log(ell + 1) - ell * np.log(ell)
        d_f_approx = np.log(ell) + 1.0
        eta = t.eta[0]
        out = (
            (t.h_pdp[0] < t.h_min[0] - 1e-10)
            | (t.h_pdp[0] > t.h_max[0] + 1e-10)
            | (eta < eta_lower - 1e-10)
            | (eta > eta_upper + 1e-10)
        )
        columns = (
            np.full(len(ell), r),
            t.ell[0],
            t.k[0],
            t.last_count[0],
            t.h_min[0],
            t.h_pdp[0],
            t.h_max[0],
            (theta + ell) * t.h_min[0],
            eta,
            eta_lower,
            eta_upper,
            eta_approx,
            d,
            d_approx,
            d_f,
            d_f_approx,
            out.astype(int),
        )
        yield from zip(*columns)


def cmd_bounds(settings: dict) -> int:
    flagged = 0

    def counted():
        nonlocal flagged
        for row in bounds_rows(settings):
            flagged += int(row[-1])
            yield row

    _write_csv(settings["out"], BOUNDS_COLUMNS, counted())
    if flagged:
        log.error("%d rows left their stated bounds", flagged)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_prior_mc(settings: dict) -> int:
    if settings["truncation"] < 100:
        raise UsageError("truncation must be >= 100")
    params = _params(settings)
    draws = settings["replicas"]
    if draws < 2:
        raise UsageError("prior-mc needs --replicas >= 2 to estimate a standard error")
    result = prior_monte_carlo(params, draws, settings["truncation"], make_rng(settings["seed"]))
    check = prior_checks([result])[0]
    summary = {
        "alpha": params.alpha,
        "theta": params.theta,
        "draws": draws,
        "truncation": result.truncation,
        "mean": result.mean,
        "stderr": result.stderr,
        "target": result.target,
        "z_score": result.z_score,
        "remainder_median": result.remainder_median,
        "remainder_max": result.remainder_max,
        "within_3_se": check.passed,
    }
    print(check.line())
    _emit_json(settings["out"], summary)
    return EXIT_OK


def _emit_json(path: Optional[str], payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if path is None or path == "-":
        print(text)
        return
    try:
        Path(path).write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def cmd_verify(settings: dict, explicit: set) -> int:
    try:
        grid = parse_grid(settings["grid"]) if settings["grid"] else default_grid()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    config = VerifyConfig(grid=grid, seed=settings["seed"], truncation=settings["truncation"])
    # the global single-run defaults do not apply to verify unless given
    if "length" in explicit:
        config.length = settings["length"]
    if "replicas" in explicit:
        config.replicas = settings["replicas"]
    results = run_verification(config)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    summary = {
        "passed": not failed,
        "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results],
        "first_failure": failed[0].name if failed else None,
    }
    _emit_json(settings["out"], summary)
    if failed:
        print(f"FIRST FAILURE: {failed[0].name}: {failed[0].detail}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, help="discount parameter, 0 <= alpha < 1")
    common.add_argument("--theta", type=float, help="concentration parameter, theta > -alpha")
    common.add_argument("--length", type=int, help="steps per trajectory")
    common.add_argument("--replicas", type=int, help="trajectories (or GEM draws for prior-mc)")
    common.add_argument("--seed", type=int, help="base seed; replica r uses sub-stream r")
    common.add_argument("--truncation", type=int, help="GEM truncation level")
    common.add_argument("--out", help="output path, '-' for stdout")
    common.add_argument("--grid", help="verify only: comma-separated alpha:theta pairs")
    common.add_argument("--config", help="key = value settings file; flags override it")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="pdp-entropy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="write per-step records as CSV")
    sub.add_parser("verify", parents=[common], help="run every verification check")
    sub.add_parser("prior-mc", parents=[common], help="Monte Carlo prior mean entropy")
    sub.add_parser("bounds", parents=[common], help="write per-step bounds as CSV")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        settings = resolve_settings(args)
        if args.command == "simulate":
            return cmd_simulate(settings)
        if args.command == "bounds":
            return cmd_bounds(settings)
        if args.command == "prior-mc":
            return cmd_prior_mc(settings)
        explicit = {k for k in CASTS if getattr(args, k, None) is not None}
        if args.config:
            explicit |= set(read_config_file(args.config))
        return cmd_verify(settings, explicit)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
