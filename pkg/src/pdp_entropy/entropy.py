"""Entropy estimators for a species sample and their extremal values.

All functions take either a :class:`SampleState` or a plain sequence of
positive frequencies; only the multiset of frequencies matters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence, Union

import numpy as np

from .sampler import PdpParams, SampleState
from .special_fn import digamma

Sample = Union[SampleState, Sequence[int]]


def _counts(sample: Sample) -> tuple[int, ...]:
    if isinstance(sample, SampleState):
        return sample.counts
    counts = tuple(int(c) for c in sample)
    if any(c < 1 for c in counts):
        raise ValueError(f"frequencies must be positive integers, got {counts}")
    return counts


def prior_mean_entropy(params: PdpParams) -> float:
    """E[H(pi)] = psi(theta + 1) - psi(1 - alpha) under the PDP prior."""
    return digamma(params.theta + 1.0) - digamma(1.0 - params.alpha)


def weighted_posterior_entropy(sample: Sample, params: PdpParams) -> float:
    """(theta + ell) * E[H | sample].

    For the empty sample this is theta * (psi(theta+1) - psi(1-alpha)), so
    the weighted one-step increments telescope from ell = 0 even when
    theta <= 0.
    """
    counts = _counts(sample)
    alpha, theta = params.alpha, params.theta
    ell, k = sum(counts), len(counts)
    psi_unseen = digamma(1.0 - alpha)
    occupied = math.fsum((n - alpha) * digamma(n - alpha + 1.0) for n in counts)
    return (theta + ell) * digamma(theta + ell + 1.0) - (theta + alpha * k) * psi_unseen - occupied


def posterior_mean_entropy(sample: Sample, params: PdpParams) -> float:
    """Posterior mean of the Shannon entropy given the observed frequencies.

    psi(theta+ell+1) - (theta+alpha k)/(theta+ell) psi(1-alpha)
    - 1/(theta+ell) sum_i (n_i - alpha) psi(n_i - alpha + 1).
    The empty sample returns the prior mean.
    """
    counts = _counts(sample)
    ell = sum(counts)
    if ell == 0:
        return prior_mean_entropy(params)
    alpha, theta = params.alpha, params.theta
    denom = theta + ell
    occupied = math.fsum((n - alpha) * digamma(n - alpha + 1.0) for n in counts)
    return (
        digamma(theta + ell + 1.0)
        - (theta + alpha * len(counts)) / denom * digamma(1.0 - alpha)
        - occupied / denom
    )


def mle_entropy(sample: Sample) -> float:
    """Plug-in entropy of the empirical frequencies."""
    counts = _counts(sample)
    ell = sum(counts)
    if ell == 0:
        raise ValueError("MLE entropy is undefined for an empty sample")
    return -math.fsum((n / ell) * math.log(n / ell) for n in counts)


def shannon_entropy(weights) -> float:
    """-sum p log p over the given (not necessarily normalized) weights, with 0 log 0 = 0."""
    p = np.asarray(weights, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


@dataclass(frozen=True)
class ExtremalConfig:
    counts: tuple[int, ...]
    kind: Literal["max", "min"]
    k: int
    ell: int


def extremal_config(ell: int, k: int, kind: Literal["max", "min"]) -> ExtremalConfig:
    """Frequency vector of maximal or minimal posterior entropy among samples
    of size ``ell`` with exactly ``k`` species.

    The maximum spreads observations as evenly as possible; the minimum puts
    ``ell - k + 1`` in one species and a single observation in each other.
    """
    if not 1 <= k <= ell:
        raise ValueError(f"need 1 <= k <= ell, got k={k}, ell={ell}")
    if kind == "max":
        base = ell // k
        high = ell - k * base
        counts = (base,) * (k - high) + (base + 1,) * high
    elif kind == "min":
        counts = (ell - k + 1,) + (1,) * (k - 1)
    else:
        raise ValueError(f"kind must be 'max' or 'min', got {kind!r}")
    return ExtremalConfig(counts=counts, kind=kind, k=k, ell=ell)


def global_max_entropy(ell: int, params: PdpParams) -> float:
    """Largest posterior entropy over all samples of size ``ell`` (all singletons)."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    return digamma(params.theta + ell + 1.0) - digamma(1.0 - params.alpha) - ell / (params.theta + ell)


def global_min_entropy(ell: int, params: PdpParams) -> float:
    """Smallest posterior entropy over all samples of size ``ell`` (one species)."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    alpha, theta = params.alpha, params.theta
    return (
        digamma(theta + ell + 1.0)
        - (theta + alpha) * digamma(1.0 - alpha) / (theta + ell)
        - (ell - alpha) * digamma(ell - alpha + 1.0) / (theta + ell)
    )
