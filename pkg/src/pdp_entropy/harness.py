"""Verification campaigns: simulation identities, brute-force extremality,
prior Monte Carlo, and the non-monotonicity examples.

Every check returns a :class:`CheckResult`; :func:`run_verification` collects
them in a fixed order so the first failure is reproducible.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .entropy import mle_entropy, posterior_mean_entropy, prior_mean_entropy
from .functionals import kappa
from .general_entropy import (
    check_admissibility,
    frequentist_spec,
    general_delta,
    general_entropy,
    pdp_spec,
)
from .oracle import check_extremality
from .sampler import (
    PdpParams,
    make_rng,
    sample_gem_matrix,
    simulate_batch,
    simulate_trajectory,
    states_from_increments,
)
from .special_fn import digamma, digamma_vec
from .trajectory import compute_table

log = logging.getLogger(__name__)

DEFAULT_ALPHAS = (0.0, 0.25, 0.5, 0.9)
IDENTITY_TOL = 1e-10
SIGN_TOL = 1e-12
DECOMPOSITION_TOL = 1e-9


def default_grid() -> list[PdpParams]:
    grid = []
    for alpha in DEFAULT_ALPHAS:
        for theta in (-alpha + 0.1, 0.5, 1.0, 10.0):
            grid.append(PdpParams(alpha, theta))
    return grid


def parse_grid(text: str) -> list[PdpParams]:
    """Parse ``"a:t,a:t,..."`` into parameter pairs."""
    grid = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        a, _, t = item.partition(":")
        if not t:
            raise ValueError(f"grid entry {item!r} is not of the form alpha:theta")
        grid.append(PdpParams(float(a), float(t)))
    if not grid:
        raise ValueError("empty grid")
    return grid


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    values: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}" + (f": {self.detail}" if self.detail else "")


def _label(params: PdpParams) -> str:
    return f"alpha={params.alpha:g},theta={params.theta:g}"


# --- trajectory identities -------------------------------------------------


@dataclass
class TrajectoryStats:
    """Worst-case discrepancies over one batch of trajectories."""

    params: PdpParams
    trajectories: int
    steps: int
    min_delta: float
    delta_disagreement: float
    max_delta_at_discovery: float
    min_delta_off_discovery: float
    eta_disagreement: float
    min_eta: float
    delta_f_disagreement: float
    min_delta_f_off_discovery: float
    max_delta_f_at_discovery: float
    freq_weighted_min: float
    freq_weighted_max_single_class: float
    freq_weighted_min_multi_class: float
    additivity_error: float
    difmax_error: float
    decomposition_error: float
    functional_error: float
    sandwich_violation: float
    eta_bound_violation: float


def trajectory_stats(n_star: np.ndarray, params: PdpParams) -> TrajectoryStats:
    t = compute_table(n_star, params)
    alpha, theta = params.alpha, params.theta
    replicas, length = n_star.shape
    disc = t.is_discovery.astype(bool)
    psi_unseen = digamma(1.0 - alpha)

    # plug-in weighted step (ell+1) H_{ell+1} - ell H_ell from the table's entropies
    ell_f = t.ell.astype(float)
    weighted_mle = ell_f * t.h_mle
    freq_step = np.diff(weighted_mle, axis=1, prepend=0.0)
    single = t.k == 1

    # Delta + eta against the weighted max-entropy increment, both closed form
    prev_ell = np.arange(0, length)
    d = digamma_vec(theta + prev_ell + 1.0) - psi_unseen
    h_max = t.h_max[0]
    w_max = (theta + ell_f[0]) * h_max
    w_max_prev = np.concatenate([[theta * (digamma(theta + 1.0) - psi_unseen)], w_max[:-1]])
    difmax = np.abs(d - (w_max - w_max_prev)).max()

    # telescoped decomposition at the final step
    c_term = (
        math.fsum(digamma_vec(theta + np.arange(1, length + 1)))
        + theta * digamma(theta + 1.0)
        - theta * psi_unseen
    )
    psi_star = t.delta + psi_unseen  # psi(n* - alpha)
    decomposition = np.abs(c_term - psi_star.sum(axis=1) - t.weighted_pdp[:, -1]).max()
    functional = np.abs(t.delta.sum(axis=1) - t.a_value[:, -1]).max()

    # eta log bounds
    x = theta + prev_ell + 1.0
    y = t.last_count - alpha
    lower = np.log(x) - 1.0 / x - np.log(y) + 0.5 / y
    upper = np.log(x) - 0.5 / x - np.log(y) + 1.0 / y
    eta_violation = max(float((lower - t.eta).max()), float((t.eta - upper).max()))

    sandwich = max(float((t.h_min - t.h_pdp).max()), float((t.h_pdp - t.h_max).max()))

    def _extreme(arr, mask, fn, empty):
        sel = arr[mask]
        return float(fn(sel)) if sel.size else empty

    return TrajectoryStats(
        params=params,
        trajectories=replicas,
        steps=replicas * length,
        min_delta=float(t.delta.min()),
        delta_disagreement=float(np.abs(t.delta - t.delta_long).max()),
        max_delta_at_discovery=_extreme(np.abs(t.delta), disc, np.max, 0.0),
        min_delta_off_discovery=_extreme(t.delta, ~disc, np.min, math.inf),
        eta_disagreement=float(np.abs(t.eta - t.eta_long).max()),
        min_eta=float(t.eta.min()),
        delta_f_disagreement=float(np.abs(t.delta_f - t.delta_f_long).max()),
        min_delta_f_off_discovery=_extreme(t.delta_f, ~disc, np.min, math.inf),
        max_delta_f_at_discovery=_extreme(np.abs(t.delta_f), disc, np.max, 0.0),
        freq_weighted_min=float(freq_step.min()),
        freq_weighted_max_single_class=_extreme(np.abs(freq_step), single, np.max, 0.0),
        freq_weighted_min_multi_class=_extreme(freq_step, ~single, np.min, math.inf),
        additivity_error=float(np.abs(t.delta + t.eta - d[None, :]).max()),
        difmax_error=float(difmax),
        decomposition_error=float(decomposition),
        functional_error=float(functional),
        sandwich_violation=sandwich,
        eta_bound_violation=eta_violation,
    )


def simulation_checks(stats: Sequence[TrajectoryStats]) -> list[CheckResult]:
    """Turn per-grid-point discrepancy summaries into pass/fail checks."""
    results = []

    def check(name, key, ok, worst=max):
        bad = [s for s in stats if not ok(s)]
        detail = f"worst {key}={worst(getattr(s, key) for s in stats):.3g}"
        if bad:
            detail = f"failed at {_label(bad[0].params)}: {key}={getattr(bad[0], key)!r}"
        results.append(CheckResult(name, not bad, detail, {s.params.__repr__(): getattr(s, key) for s in stats}))

    check("delta.nonnegative", "min_delta", lambda s: s.min_delta >= -SIGN_TOL, min)
    check("delta.closed_form_vs_entropies", "delta_disagreement", lambda s: s.delta_disagreement <= IDENTITY_TOL)
    check("delta.zero_at_discovery", "max_delta_at_discovery", lambda s: s.max_delta_at_discovery < SIGN_TOL)
    check(
        "delta.positive_off_discovery",
        "min_delta_off_discovery",
        lambda s: s.min_delta_off_discovery
        >= digamma(2.0 - s.params.alpha) - digamma(1.0 - s.params.alpha) - IDENTITY_TOL,
        min,
    )
    check("eta.closed_form_vs_entropies", "eta_disagreement", lambda s: s.eta_disagreement <= IDENTITY_TOL)
    check("eta.positive", "min_eta", lambda s: s.min_eta > 0, min)
    check("eta.log_bounds", "eta_bound_violation", lambda s: s.eta_bound_violation <= IDENTITY_TOL)
    check("additivity.delta_plus_eta", "additivity_error", lambda s: s.additivity_error <= 1e-12)
    check("difmax.weighted_max_increment", "difmax_error", lambda s: s.difmax_error <= IDENTITY_TOL)
    check("decomposition.weighted_entropy", "decomposition_error", lambda s: s.decomposition_error <= DECOMPOSITION_TOL)
    check("decomposition.functional", "functional_error", lambda s: s.functional_error <= DECOMPOSITION_TOL)
    check("sandwich.min_le_pdp_le_max", "sandwich_violation", lambda s: s.sandwich_violation <= IDENTITY_TOL)
    check("frequentist.delta_closed_form", "delta_f_disagreement", lambda s: s.delta_f_disagreement <= IDENTITY_TOL)
    check(
        "frequentist.delta_flat_exactly_at_discovery",
        "min_delta_f_off_discovery",
        lambda s: s.max_delta_f_at_discovery == 0.0 and s.min_delta_f_off_discovery > 0,
        min,
    )
    check("frequentist.weighted_step_nonnegative", "freq_weighted_min", lambda s: s.freq_weighted_min >= -IDENTITY_TOL, min)
    check(
        "frequentist.weighted_step_zero_iff_single_class",
        "freq_weighted_min_multi_class",
        lambda s: s.freq_weighted_max_single_class <= IDENTITY_TOL and s.freq_weighted_min_multi_class > IDENTITY_TOL,
        min,
    )
    return results


def run_simulation_campaign(
    grid: Iterable[PdpParams], length: int, replicas: int, seed: int
) -> list[TrajectoryStats]:
    stats = []
    for index, params in enumerate(grid):
        n_star = simulate_batch(params, length, replicas, make_rng(seed, index))
        stats.append(trajectory_stats(n_star, params))
        log.info("simulated %d x %d at %s", replicas, length, _label(params))
    return stats


# --- brute force, frequentist, counterexamples, general framework -----------


def extremality_check(grid: Iterable[PdpParams], max_ell: int = 12) -> CheckResult:
    failures = []
    for params in grid:
        for ell in range(1, max_ell + 1):
            failures += [f"{_label(params)}: {msg}" for msg in check_extremality(ell, params)]
    detail = failures[0] if failures else f"all compositions up to ell={max_ell}"
    return CheckResult("extremality.brute_force", not failures, detail, {"failures": len(failures)})


def kappa_bounds_check(max_ell: int = 100_000) -> CheckResult:
    """kappa(ell+1) - (log ell + 1) against its bracket for ell = 1..max_ell."""
    ell = np.arange(1, max_ell + 1, dtype=float)
    # (ell+1) log(ell+1) - ell log ell - log ell - 1, without cancellation
    gap = (ell + 1) * np.log1p(1.0 / ell) - 1.0
    head = ell[:1000]
    direct = np.array([kappa(int(m) + 1) for m in head]) - (np.log(head) + 1.0)
    # the direct form cancels two terms of size (m+1) log(m+1)
    rounding = 8 * np.finfo(float).eps * ((head + 1) * np.log(head + 1) + 1.0)
    lower = 1.0 / (2 * ell) - 1.0 / (2 * ell * ell)
    upper = 1.0 / ell
    bad = np.flatnonzero((gap < lower) | (gap > upper))
    consistent = bool(np.all(np.abs(direct - gap[:1000]) <= rounding))
    if bad.size:
        detail = f"violated at ell={int(ell[bad[0]])}"
    elif not consistent:
        detail = "kappa() disagrees with the log1p form"
    else:
        detail = f"ell=1..{max_ell}"
    return CheckResult("frequentist.kappa_bounds", not bad.size and consistent, detail)


def notnot1_values() -> tuple[float, float, float]:
    """Plug-in entropies H_2, H_3, H_4 for the observation pattern A, B, A, B."""
    states = states_from_increments([1, 1, 2, 2])
    return tuple(mle_entropy(s) for s in states[1:])


def notnot2_values(params: PdpParams) -> tuple[float, float, float]:
    """Posterior entropies at ell = 2, 3, 4 for the pattern A, B, A, B."""
    states = states_from_increments([1, 1, 2, 2])
    return tuple(posterior_mean_entropy(s, params) for s in states[1:])


def counterexample_checks() -> list[CheckResult]:
    h2, h3, h4 = notnot1_values()
    ok1 = h2 == h4 and abs(h2 - math.log(2)) <= 1e-15 and h2 > h3
    p = PdpParams(0.25, 0.1)
    g2, g3, g4 = notnot2_values(p)
    ok2 = g2 > g3 and g4 > g3
    return [
        CheckResult("counterexample.plugin", ok1, f"H2={h2:.17g} H3={h3:.17g} H4={h4:.17g}"),
        CheckResult(
            "counterexample.posterior", ok2, f"{_label(p)}: H2={g2:.17g} H3={g3:.17g} H4={g4:.17g}"
        ),
    ]


def general_framework_checks(
    grid: Iterable[PdpParams], states: int, seed: int, grid_max: int = 2_000
) -> list[CheckResult]:
    results = []
    freq = frequentist_spec()
    report = check_admissibility(freq, grid_max)
    failed = [n for n, ok in report.results.items() if not ok]
    for params in grid:
        pr = check_admissibility(pdp_spec(params), grid_max)
        failed += [f"{_label(params)}:{n}" for n, ok in pr.results.items() if not ok]
    results.append(CheckResult("general.admissibility", not failed, ", ".join(failed) or "frequentist and pdp specs"))

    rng = make_rng(seed, 10_000)
    grid = list(grid)
    worst_f = worst_p = worst_delta = 0.0
    for i in range(states):
        params = grid[i % len(grid)]
        spec = pdp_spec(params)
        length = int(rng.integers(2, 40))
        traj = simulate_trajectory(params, length, rng)
        s = traj[-1]
        worst_f = max(worst_f, abs(general_entropy(freq, s) - mle_entropy(s)))
        worst_p = max(worst_p, abs(general_entropy(spec, s) - posterior_mean_entropy(s, params)))
        prev = traj[-2]
        n = s.last_count
        delta = digamma(n - params.alpha) - digamma(1.0 - params.alpha)
        worst_delta = max(
            worst_delta,
            abs(general_delta(spec, prev, s) - delta),
            abs(general_delta(freq, prev, s) - kappa(n)),
        )
    results.append(
        CheckResult(
            "general.specializations",
            worst_f <= IDENTITY_TOL and worst_p <= IDENTITY_TOL,
            f"{states} states: frequentist err={worst_f:.3g}, pdp err={worst_p:.3g}",
        )
    )
    results.append(
        CheckResult("general.delta_specializations", worst_delta <= IDENTITY_TOL, f"worst err={worst_delta:.3g}")
    )
    return results


# --- prior Monte Carlo -----------------------------------------------------


@dataclass
class PriorMcResult:
    params: PdpParams
    draws: int
    truncation: int
    mean: float
    stderr: float
    target: float
    remainder_median: float
    remainder_max: float

    @property
    def z_score(self) -> float:
        return (self.mean - self.target) / self.stderr


def prior_monte_carlo(
    params: PdpParams, draws: int, truncation: int, rng: np.random.Generator, chunk: int = 250
) -> PriorMcResult:
    """Mean Shannon entropy of truncated GEM draws, next to the exact prior mean.

    The leftover stick mass is reported, not folded into the entropy.
    """
    entropies = np.empty(draws)
    remainders = np.empty(draws)
    for start in range(0, draws, chunk):
        stop = min(draws, start + chunk)
        w, rem = sample_gem_matrix(params, truncation, stop - start, rng)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(w > 0, w * np.log(w), 0.0)
        entropies[start:stop] = -terms.sum(axis=1)
        remainders[start:stop] = rem
    return PriorMcResult(
        params=params,
        draws=draws,
        truncation=truncation,
        mean=float(entropies.mean()),
        stderr=float(entropies.std(ddof=1) / math.sqrt(draws)),
        target=prior_mean_entropy(params),
        remainder_median=float(np.median(remainders)),
        remainder_max=float(remainders.max()),
    )


def prior_checks(results: Sequence[PriorMcResult], sigmas: float = 3.0) -> list[CheckResult]:
    out = []
    for r in results:
        ok = abs(r.mean - r.target) <= sigmas * r.stderr
        out.append(
            CheckResult(
                f"prior_mean.monte_carlo[{_label(r.params)}]",
                ok,
                f"mean={r.mean:.6f} target={r.target:.6f} se={r.stderr:.2e} "
                f"z={r.z_score:+.2f} remainder median={r.remainder_median:.2e}",
            )
        )
    return out


# --- consistency trend -----------------------------------------------------


def consistency_medians(
    params: PdpParams, checkpoints: Sequence[int], replicas: int, seed: int
) -> list[float]:
    """Median over replicas of |posterior entropy - plug-in entropy| at each checkpoint."""
    n_star = simulate_batch(params, max(checkpoints), replicas, make_rng(seed))
    t = compute_table(n_star, params)
    gap = np.abs(t.h_pdp - t.h_mle)
    return [float(np.median(gap[:, c - 1])) for c in checkpoints]


# --- full run --------------------------------------------------------------


PRIOR_MC_PARAMS = (PdpParams(0.0, 1.0), PdpParams(0.5, 0.5))


@dataclass
class VerifyConfig:
    grid: list[PdpParams]
    length: int = 1000
    replicas: int = 625
    seed: int = 20240611
    truncation: int = 10_000
    prior_draws: int = 10_000
    general_states: int = 10_000
    brute_force_max_ell: int = 12


def run_verification(config: VerifyConfig) -> list[CheckResult]:
    results = [extremality_check(config.grid, config.brute_force_max_ell)]
    stats = run_simulation_campaign(config.grid, config.length, config.replicas, config.seed)
    results += simulation_checks(stats)
    results.append(kappa_bounds_check())
    results += counterexample_checks()
    results += general_framework_checks(config.grid, config.general_states, config.seed)
    prior = [
        prior_monte_carlo(p, config.prior_draws, config.truncation, make_rng(config.seed, 20_000 + i))
        for i, p in enumerate(PRIOR_MC_PARAMS)
    ]
    results += prior_checks(prior)
    return results
