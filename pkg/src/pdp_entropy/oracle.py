"""Exhaustive enumeration over frequency vectors of a fixed sample size."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .entropy import extremal_config, global_max_entropy, global_min_entropy, posterior_mean_entropy
from .sampler import PdpParams


def compositions(ell: int, k: int) -> Iterator[tuple[int, ...]]:
    """All ordered ways to write ell as a sum of k positive integers."""
    for cuts in itertools.combinations(range(1, ell), k - 1):
        bounds = (0,) + cuts + (ell,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(k))


@dataclass
class ExtremalFinding:
    ell: int
    k: int
    max_value: float
    min_value: float
    argmax: set
    argmin: set


def enumerate_extremes(ell: int, params: PdpParams, tol: float = 1e-9) -> list[ExtremalFinding]:
    """Max and min posterior entropy for every k = 1..ell, with all maximizing
    and minimizing frequency multisets (sorted descending)."""

    @lru_cache(maxsize=None)
    def value(multiset):
        return posterior_mean_entropy(multiset, params)

    findings = []
    for k in range(1, ell + 1):
        scored = [(value(tuple(sorted(c, reverse=True))), tuple(sorted(c, reverse=True))) for c in compositions(ell, k)]
        hi = max(v for v, _ in scored)
        lo = min(v for v, _ in scored)
        findings.append(
            ExtremalFinding(
                ell=ell,
                k=k,
                max_value=hi,
                min_value=lo,
                argmax={m for v, m in scored if v >= hi - tol},
                argmin={m for v, m in scored if v <= lo + tol},
            )
        )
    return findings


def check_extremality(ell: int, params: PdpParams, tol: float = 1e-9, exact_tol: float = 1e-10) -> list[str]:
    """Compare the enumeration against the closed-form extremal structures.

    Returns a list of human-readable failures (empty when everything agrees).
    """
    failures = []
    findings = enumerate_extremes(ell, params, tol)
    for f in findings:
        want_max = tuple(sorted(extremal_config(ell, f.k, "max").counts, reverse=True))
        want_min = tuple(sorted(extremal_config(ell, f.k, "min").counts, reverse=True))
        if f.argmax != {want_max}:
            failures.append(f"ell={ell} k={f.k}: maximizers {sorted(f.argmax)} != {want_max}")
        if f.argmin != {want_min}:
            failures.append(f"ell={ell} k={f.k}: minimizers {sorted(f.argmin)} != {want_min}")
    for lo, hi in zip(findings, findings[1:]):
        if not hi.max_value > lo.max_value:
            failures.append(f"ell={ell}: max at k={hi.k} does not exceed max at k={lo.k}")
        if not hi.min_value > lo.min_value:
            failures.append(f"ell={ell}: min at k={hi.k} does not exceed min at k={lo.k}")
    overall_max = max(f.max_value for f in findings)
    overall_min = min(f.min_value for f in findings)
    if abs(overall_max - global_max_entropy(ell, params)) > exact_tol:
        failures.append(f"ell={ell}: enumerated global max {overall_max!r} != closed form")
    if abs(overall_min - global_min_entropy(ell, params)) > exact_tol:
        failures.append(f"ell={ell}: enumerated global min {overall_min!r} != closed form")
    return failures
