"""The discovery functional and its one-step increments.

For a sample of size ell the functional is

    A_ell = (theta + ell) * (max posterior entropy at size ell - posterior entropy),

with A_0 = 0.  Its increment Delta depends only on the post-step frequency
n of the species just observed, Delta = psi(n - alpha) - psi(1 - alpha), so it
is zero exactly at discoveries.  The weighted entropy increment is
eta = psi(theta + ell + 1) - psi(n - alpha), and Delta + eta does not depend
on the sample.  The frequentist versions replace the posterior entropy with
the plug-in entropy and theta + ell with ell.

Closed forms are used throughout; the ``*_from_entropies`` helpers recompute
the same increments by differencing full entropies and exist for cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .entropy import global_max_entropy, mle_entropy, posterior_mean_entropy, weighted_posterior_entropy
from .sampler import PdpParams, SampleState
from .special_fn import digamma


class StepMismatchError(ValueError):
    """``next`` is not a one-observation successor of ``prev``."""


@dataclass(frozen=True)
class StepVariation:
    delta: float
    eta: float
    a_value: float
    a_f_value: float
    delta_f: float
    is_discovery: bool


@dataclass(frozen=True)
class DiscoveryDecomposition:
    """Telescoped form of a trajectory's weighted posterior entropy.

    (theta + ell) * H_ell = c_term + sum(discovery_values) and
    A_ell = sum(reinforcement_rewards).
    """

    c_term: float
    discovery_values: list[float]
    reinforcement_rewards: list[float]

    @property
    def weighted_entropy(self) -> float:
        return self.c_term + math.fsum(self.discovery_values)

    @property
    def functional(self) -> float:
        return math.fsum(self.reinforcement_rewards)


class MaxEntropyStep(NamedTuple):
    d: float
    d_f: float


def xlogx(x: float) -> float:
    return 0.0 if x == 0 else x * math.log(x)


def kappa(m: int) -> float:
    """m log m - (m - 1) log(m - 1), with 0 log 0 = 0."""
    return xlogx(m) - xlogx(m - 1)


def kappa_bounds(ell: int) -> tuple[float, float]:
    """Bounds on kappa(ell + 1) - (log ell + 1) for ell >= 1."""
    return 1.0 / (2 * ell) - 1.0 / (2 * ell * ell), 1.0 / ell


def successor_count(prev: SampleState, next: SampleState) -> int:
    """Post-step frequency of the species observed in prev -> next."""
    if next.ell != prev.ell + 1 or next.last_species is None:
        raise StepMismatchError(f"state with ell={next.ell} does not follow ell={prev.ell}")
    j = next.last_species
    expected = list(prev.counts)
    if j == prev.k:
        expected.append(1)
    elif 0 <= j < prev.k:
        expected[j] += 1
    else:
        raise StepMismatchError(f"species {j} cannot be reached from a state with k={prev.k}")
    if tuple(expected) != next.counts:
        raise StepMismatchError(f"counts {prev.counts} -> {next.counts} differ by more than species {j}")
    return next.last_count


def functional_A(state: SampleState, params: PdpParams) -> float:
    if state.ell == 0:
        return 0.0
    return (params.theta + state.ell) * (
        global_max_entropy(state.ell, params) - posterior_mean_entropy(state, params)
    )


def frequentist_functional(state: SampleState) -> float:
    """ell * (log ell - plug-in entropy); zero for the empty sample."""
    if state.ell == 0:
        return 0.0
    return state.ell * (math.log(state.ell) - mle_entropy(state))


def eta_step(prev: SampleState, next: SampleState, params: PdpParams) -> float:
    n = successor_count(prev, next)
    return digamma(params.theta + prev.ell + 1.0) - digamma(n - params.alpha)


def frequentist_delta(prev: SampleState, next: SampleState) -> float:
    return kappa(successor_count(prev, next))


def delta_step(prev: SampleState, next: SampleState, params: PdpParams) -> StepVariation:
    n = successor_count(prev, next)
    psi_n = digamma(n - params.alpha)
    return StepVariation(
        delta=psi_n - digamma(1.0 - params.alpha),
        eta=digamma(params.theta + prev.ell + 1.0) - psi_n,
        a_value=functional_A(next, params),
        a_f_value=frequentist_functional(next),
        delta_f=kappa(n),
        is_discovery=n == 1,
    )


def frequentist_weighted_entropy_step(prev: SampleState, next: SampleState) -> float:
    """(ell+1) H_{ell+1} - ell H_ell for the plug-in entropy."""
    n = successor_count(prev, next)
    return kappa(prev.ell + 1) - kappa(n)


def max_entropy_weighted_step(ell: int, params: PdpParams) -> MaxEntropyStep:
    """Weighted increment of the maximal entropy from size ell to ell + 1.

    ``d`` is the posterior-entropy version and ``d_f`` the plug-in one.
    """
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    return MaxEntropyStep(
        d=digamma(params.theta + ell + 1.0) - digamma(1.0 - params.alpha),
        d_f=kappa(ell + 1),
    )


def eta_bounds(ell: int, n: int, params: PdpParams) -> tuple[float, float]:
    """Log bracket for eta at the step ell -> ell + 1 with post-step frequency n."""
    x, y = params.theta + ell + 1.0, n - params.alpha
    lower = math.log(x) - 1.0 / x - math.log(y) + 0.5 / y
    upper = math.log(x) - 0.5 / x - math.log(y) + 1.0 / y
    return lower, upper


def eta_approximation(ell: int, n: int, params: PdpParams) -> float:
    """Large-sample approximation of eta; at discoveries only the ell term is kept."""
    x = params.theta + ell + 1.0
    value = math.log(x) - 0.5 / x
    if n > 1:
        y = n - params.alpha
        value += -math.log(y) + 0.5 / y
    return value


def discovery_decomposition(trajectory: Sequence[SampleState], params: PdpParams) -> DiscoveryDecomposition:
    """Split (theta + ell) H_ell into a sample-free term and per-step discovery values.

    ``trajectory`` holds the states for ell = 1..L in order.
    """
    alpha, theta = params.alpha, params.theta
    psi_unseen = digamma(1.0 - alpha)
    ell = len(trajectory)
    c_term = (
        math.fsum(digamma(theta + i) for i in range(1, ell + 1))
        + theta * digamma(theta + 1.0)
        - theta * psi_unseen
    )
    psi_star = [digamma(s.last_count - alpha) for s in trajectory]
    return DiscoveryDecomposition(
        c_term=c_term,
        discovery_values=[-p for p in psi_star],
        reinforcement_rewards=[p - psi_unseen for p in psi_star],
    )


def delta_from_entropies(prev: SampleState, next: SampleState, params: PdpParams) -> float:
    successor_count(prev, next)
    return functional_A(next, params) - functional_A(prev, params)


def eta_from_entropies(prev: SampleState, next: SampleState, params: PdpParams) -> float:
    successor_count(prev, next)
    return weighted_posterior_entropy(next, params) - weighted_posterior_entropy(prev, params)


def frequentist_delta_from_entropies(prev: SampleState, next: SampleState) -> float:
    successor_count(prev, next)
    return frequentist_functional(next) - frequentist_functional(prev)
