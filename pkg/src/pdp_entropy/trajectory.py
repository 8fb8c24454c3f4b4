"""Per-step records for batches of simulated trajectories.

A batch is the ``(replicas, length)`` array of post-step frequencies returned
by :func:`pdp_entropy.sampler.simulate_batch`.  Entropies are rebuilt from it
without materialising per-step states: the occupied-species sums
sum_i (n_i - alpha) psi(n_i - alpha + 1) and sum_i n_i log n_i change by one
term per step, so their running values are cumulative sums of per-step term
changes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sampler import PdpParams
from .special_fn import digamma, digamma_vec

STEP_COLUMNS = (
    "replica",
    "ell",
    "k",
    "last_count",
    "is_discovery",
    "h_mle",
    "h_pdp",
    "h_max",
    "h_min",
    "a_value",
    "delta",
    "eta",
    "a_f",
    "delta_f",
)


@dataclass
class TrajectoryTable:
    """Column arrays of shape (replicas, length); column ``i`` is step ell = i + 1."""

    ell: np.ndarray
    k: np.ndarray
    last_count: np.ndarray
    is_discovery: np.ndarray
    h_mle: np.ndarray
    h_pdp: np.ndarray
    h_max: np.ndarray
    h_min: np.ndarray
    a_value: np.ndarray
    delta: np.ndarray
    eta: np.ndarray
    a_f: np.ndarray
    delta_f: np.ndarray
    # recomputed by differencing full entropies, for cross-checks
    weighted_pdp: np.ndarray
    delta_long: np.ndarray
    eta_long: np.ndarray
    delta_f_long: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.ell.shape

    def rows(self, replica_offset: int = 0):
        """Yield one tuple per step in ``STEP_COLUMNS`` order, grouped by replica."""
        replicas, length = self.shape
        cols = [getattr(self, name) for name in STEP_COLUMNS[1:]]
        for r in range(replicas):
            for i in range(length):
                yield (replica_offset + r,) + tuple(c[r, i] for c in cols)


def _xlogx(n: np.ndarray) -> np.ndarray:
    n = n.astype(float)
    out = np.zeros_like(n)
    pos = n > 0
    out[pos] = n[pos] * np.log(n[pos])
    return out


def compute_table(n_star: np.ndarray, params: PdpParams) -> TrajectoryTable:
    n_star = np.atleast_2d(np.asarray(n_star, dtype=np.int64))
    length = n_star.shape[1]
    alpha, theta = params.alpha, params.theta
    ell = np.broadcast_to(np.arange(1, length + 1), n_star.shape)
    ell_f = ell.astype(float)
    is_discovery = n_star == 1
    k = np.cumsum(is_discovery, axis=1)

    psi_unseen = digamma(1.0 - alpha)
    # psi_shift[n] = psi(n - alpha) for n = 1..length+1; slot 0 is never read
    psi_shift = np.concatenate([[np.nan], digamma_vec(np.arange(1, length + 2) - alpha)])
    # psi_top[ell] = psi(theta + ell + 1) for ell = 0..length
    psi_top = digamma_vec(theta + np.arange(1, length + 2))
    # occupied[n] = (n - alpha) psi(n - alpha + 1), zero for an empty species
    ns = np.arange(0, length + 1)
    occupied = np.zeros(length + 1)
    occupied[1:] = (ns[1:] - alpha) * psi_shift[2:]

    # closed forms
    psi_star = psi_shift[n_star]
    delta = psi_star - psi_unseen
    eta = psi_top[:-1][None, :] - psi_star
    delta_f = _xlogx(n_star) - _xlogx(n_star - 1)

    # full posterior entropy at every step
    occupied_sum = np.cumsum(occupied[n_star] - occupied[n_star - 1], axis=1)
    top = psi_top[1:][None, :]
    weight = theta + ell_f
    weighted_pdp = weight * top - (theta + alpha * k) * psi_unseen - occupied_sum
    h_pdp = weighted_pdp / weight
    h_max = top - psi_unseen - ell_f / weight
    h_min = top - (theta + alpha) * psi_unseen / weight - occupied[ell] / weight
    # an all-singleton sample is the maximizer, so the gap is exactly zero there
    a_value = np.where(k == ell, 0.0, weight * (h_max - h_pdp))
    delta_long = np.diff(a_value, axis=1, prepend=0.0)
    weighted_0 = theta * (psi_top[0] - psi_unseen)
    eta_long = np.diff(weighted_pdp, axis=1, prepend=weighted_0)

    # plug-in entropy from the running sum of n log n
    sum_nlogn = np.cumsum(delta_f, axis=1)
    h_mle = np.log(ell_f) - sum_nlogn / ell_f
    a_f = ell_f * (np.log(ell_f) - h_mle)
    delta_f_long = np.diff(a_f, axis=1, prepend=0.0)

    return TrajectoryTable(
        ell=np.ascontiguousarray(ell),
        k=k,
        last_count=n_star,
        is_discovery=is_discovery.astype(np.int64),
        h_mle=h_mle,
        h_pdp=h_pdp,
        h_max=h_max,
        h_min=h_min,
        a_value=a_value,
        delta=delta,
        eta=eta,
        a_f=a_f,
        delta_f=delta_f,
        weighted_pdp=weighted_pdp,
        delta_long=delta_long,
        eta_long=eta_long,
        delta_f_long=delta_f_long,
    )
