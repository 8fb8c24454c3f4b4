"""Sequential species sampling under PDP(alpha, theta).

Species are integer ids assigned in discovery order (0-based).  Two sampling
paths share the same predictive rule:

* :func:`step` / :func:`simulate_trajectory` work on explicit
  :class:`SampleState` objects and draw categorically from
  :func:`predictive_probabilities`.
* :func:`simulate_batch` advances many replicas at once and records only the
  post-step frequency ``n*(i)`` of the species observed at each step.  The
  multiset of frequencies at every step is a function of that sequence, so
  every entropy quantity can be rebuilt from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


class InvalidStateError(ValueError):
    """A SampleState whose fields are mutually inconsistent."""


@dataclass(frozen=True)
class PdpParams:
    """Discount ``alpha`` in [0, 1) and concentration ``theta`` > -alpha."""

    alpha: float
    theta: float

    def __post_init__(self):
        alpha, theta = float(self.alpha), float(self.theta)
        if not (math.isfinite(alpha) and math.isfinite(theta)):
            raise ValueError(f"PDP parameters must be finite, got alpha={alpha}, theta={theta}")
        if not 0.0 <= alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
        if not theta > -alpha:
            raise ValueError(f"theta must exceed -alpha={-alpha}, got {theta}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "theta", theta)


@dataclass(frozen=True)
class SampleState:
    """Frequencies after ``ell`` observations.

    ``counts[j]`` is the frequency of species ``j``; ``last_species`` is the
    species hit by the most recent observation and ``last_count`` its
    frequency right after that observation (1 means it was a discovery).
    """

    ell: int = 0
    counts: tuple[int, ...] = ()
    last_species: Optional[int] = None
    last_count: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        self.validate()

    def validate(self) -> None:
        if self.ell < 0:
            raise InvalidStateError(f"ell must be nonnegative, got {self.ell}")
        if any(c < 1 for c in self.counts):
            raise InvalidStateError(f"every count must be >= 1, got {self.counts}")
        if sum(self.counts) != self.ell:
            raise InvalidStateError(f"counts sum to {sum(self.counts)}, expected ell={self.ell}")
        if self.last_species is None:
            if self.last_count is not None:
                raise InvalidStateError("last_count set without last_species")
            return
        if not 0 <= self.last_species < len(self.counts):
            raise InvalidStateError(f"last_species {self.last_species} out of range")
        if self.last_count != self.counts[self.last_species]:
            raise InvalidStateError(
                f"last_count={self.last_count} but counts[{self.last_species}]="
                f"{self.counts[self.last_species]}"
            )

    @property
    def k(self) -> int:
        return len(self.counts)

    @property
    def is_discovery(self) -> bool:
        return self.last_count == 1

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> "SampleState":
        """State with the given frequencies and no recorded last step."""
        counts = tuple(int(c) for c in counts)
        return cls(ell=sum(counts), counts=counts)

    def observe(self, species: int) -> "SampleState":
        """Add one observation of ``species``; ``species == k`` founds a new one."""
        if species == self.k:
            counts = self.counts + (1,)
        elif 0 <= species < self.k:
            counts = list(self.counts)
            counts[species] += 1
            counts = tuple(counts)
        else:
            raise InvalidStateError(f"species {species} is neither existing nor the next new id {self.k}")
        return SampleState(self.ell + 1, counts, species, counts[species])


@dataclass(frozen=True)
class PriorWeights:
    """Truncated GEM draw: the first ``truncation`` weights plus the leftover mass."""

    weights: np.ndarray
    remainder: float

    @property
    def truncation(self) -> int:
        return len(self.weights)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for sub-stream ``stream`` of ``seed``.

    Streams are derived with :class:`numpy.random.SeedSequence` spawn keys, so
    replica ``r`` of a run always sees the same numbers regardless of how many
    other replicas exist or the order they execute in.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


def predictive_probabilities(state: SampleState, params: PdpParams) -> tuple[float, list[float]]:
    """Probability of a new species and of each existing species for the next draw.

    The first draw (``ell == 0``) is always a new species.
    """
    state.validate()
    if state.ell == 0:
        return 1.0, []
    denom = params.theta + state.ell
    new = (params.theta + params.alpha * state.k) / denom
    existing = [(n - params.alpha) / denom for n in state.counts]
    return new, existing


def step(state: SampleState, params: PdpParams, rng: np.random.Generator) -> SampleState:
    """Draw observation ``ell + 1`` from the predictive rule."""
    new, existing = predictive_probabilities(state, params)
    u = rng.random()
    if u < new or not existing:
        return state.observe(state.k)
    # invert the cumulative distribution of the existing species
    cum = np.cumsum(existing)
    j = int(np.searchsorted(cum, u - new, side="right"))
    return state.observe(min(j, state.k - 1))


def simulate_trajectory(params: PdpParams, length: int, rng: np.random.Generator) -> list[SampleState]:
    """States for ell = 1..length, each obtained from the previous by :func:`step`."""
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    states = []
    state = SampleState()
    for _ in range(length):
        state = step(state, params, rng)
        states.append(state)
    return states


def simulate_batch(params: PdpParams, length: int, replicas: int, rng: np.random.Generator) -> np.ndarray:
    """Simulate ``replicas`` independent trajectories in lockstep.

    Returns an integer array of shape ``(replicas, length)`` whose entry
    ``[r, i-1]`` is ``n*(i)``, the frequency after step ``i`` of the species
    observed at step ``i``.

    Joining an existing species uses a proposal that picks a past observation
    uniformly (species j with probability n_j / ell) and accepts with
    probability (n_j - alpha) / n_j, which leaves species j chosen with
    probability proportional to n_j - alpha.
    """
    if length < 1 or replicas < 1:
        raise ValueError("length and replicas must be >= 1")
    alpha, theta = params.alpha, params.theta
    rows = np.arange(replicas)
    labels = np.zeros((replicas, length), dtype=np.int64)  # species of each past observation
    counts = np.zeros((replicas, length), dtype=np.int64)  # frequency per species id
    k = np.ones(replicas, dtype=np.int64)
    counts[:, 0] = 1
    n_star = np.empty((replicas, length), dtype=np.int64)
    n_star[:, 0] = 1

    for ell in range(1, length):
        p_new = (theta + alpha * k) / (theta + ell)
        is_new = rng.random(replicas) < p_new
        chosen = k.copy()
        pending = np.flatnonzero(~is_new)
        while pending.size:
            idx = rng.integers(0, ell, size=pending.size)
            species = labels[pending, idx]
            n = counts[pending, species]
            accept = rng.random(pending.size) * n < n - alpha
            chosen[pending[accept]] = species[accept]
            pending = pending[~accept]
        k += is_new
        labels[:, ell] = chosen
        counts[rows, chosen] += 1
        n_star[:, ell] = counts[rows, chosen]
    return n_star


def states_from_increments(n_star: Sequence[int]) -> list[SampleState]:
    """Rebuild explicit states from a sequence of post-step frequencies.

    Ties between species sharing a frequency are broken by lowest id; the
    multiset of counts, which is all any entropy depends on, is unaffected.
    """
    states = []
    state = SampleState()
    by_count: dict[int, list[int]] = {}
    for m in n_star:
        m = int(m)
        if m == 1:
            species = state.k
        else:
            bucket = by_count.get(m - 1)
            if not bucket:
                raise InvalidStateError(f"no species with frequency {m - 1} to increment")
            species = bucket.pop(0)
        state = state.observe(species)
        by_count.setdefault(m, []).append(species)
        by_count[m].sort()
        states.append(state)
    return states


def sample_gem_weights(params: PdpParams, truncation: int, rng: np.random.Generator) -> PriorWeights:
    """First ``truncation`` stick-breaking weights of GEM(alpha, theta).

    beta_k ~ Beta(1 - alpha, theta + alpha k) is drawn as a ratio of Gamma
    variates, which stays valid for shape parameters below one.
    """
    if truncation < 1:
        raise ValueError(f"truncation must be >= 1, got {truncation}")
    weights, remainder = sample_gem_matrix(params, truncation, 1, rng)
    return PriorWeights(weights=weights[0], remainder=float(remainder[0]))


def sample_gem_matrix(
    params: PdpParams, truncation: int, draws: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """``draws`` independent truncated GEM vectors as a (draws, truncation) array plus remainders."""
    ks = np.arange(1, truncation + 1)
    a = np.full(truncation, 1.0 - params.alpha)
    b = params.theta + params.alpha * ks
    ga = rng.standard_gamma(a, size=(draws, truncation))
    gb = rng.standard_gamma(b, size=(draws, truncation))
    beta = ga / (ga + gb)
    stick = np.cumprod(1.0 - beta, axis=1)
    prev = np.concatenate([np.ones((draws, 1)), stick[:, :-1]], axis=1)
    return beta * prev, stick[:, -1].copy()
