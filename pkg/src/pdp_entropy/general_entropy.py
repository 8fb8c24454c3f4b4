"""A family of entropies sharing the discovery-flatness property.

An entropy in the family is fixed by (w, u, a, b, c, v) through

    w(ell) * H_ell = u(a + ell) - b - sum_i (u(n_i - c) + v).

The plug-in entropy and the PDP posterior mean entropy are both members.
When the admissibility conditions hold, the weighted gap to the maximal
entropy is nondecreasing along any trajectory and flat exactly at
discoveries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .functionals import successor_count, xlogx
from .sampler import PdpParams, SampleState
from .special_fn import digamma


@dataclass(frozen=True)
class GeneralEntropySpec:
    w: Callable[[float], float]
    u: Callable[[float], float]
    a: float
    b: float
    c: float
    v: float
    name: str = "custom"

    @property
    def singleton_cost(self) -> float:
        """u(1 - c) + v, the contribution of one species seen once."""
        return self.u(1.0 - self.c) + self.v


def frequentist_spec() -> GeneralEntropySpec:
    return GeneralEntropySpec(w=float, u=xlogx, a=0.0, b=0.0, c=0.0, v=0.0, name="frequentist")


def pdp_spec(params: PdpParams) -> GeneralEntropySpec:
    alpha, theta = params.alpha, params.theta
    psi_unseen = digamma(1.0 - alpha)
    return GeneralEntropySpec(
        w=lambda ell: theta + ell,
        u=lambda x: x * digamma(x + 1.0),
        a=theta,
        b=theta * psi_unseen,
        c=alpha,
        v=alpha * psi_unseen,
        name="pdp",
    )


BUILTIN_SPECS = ("frequentist", "pdp")


def get_spec(name: str, params: PdpParams | None = None) -> GeneralEntropySpec:
    if name == "frequentist":
        return frequentist_spec()
    if name == "pdp":
        if params is None:
            raise ValueError("the pdp spec needs PdpParams")
        return pdp_spec(params)
    raise ValueError(f"unknown spec {name!r}; choose from {BUILTIN_SPECS}")


@dataclass
class AdmissibilityReport:
    spec_name: str
    grid_max: int
    results: dict[str, bool] = field(default_factory=dict)
    details: dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(self.results.values())

    def record(self, name: str, ok: bool, detail: str = "") -> None:
        self.results[name] = bool(ok)
        if detail:
            self.details[name] = detail


def _increments(f: Callable[[float], float], xs) -> np.ndarray:
    return np.array([f(x + 1.0) - f(x) for x in xs])


def check_admissibility(spec: GeneralEntropySpec, grid_max: int = 10_000) -> AdmissibilityReport:
    """Check the family's conditions, the unbounded ones on n = 1..grid_max.

    Conditions reported:

    * ``c_range``: 0 <= c < 1
    * ``a_lower``: a >= -c
    * ``split_gain``: 2 u(1-c) + v < u(2-c)
    * ``increasing_increments``: u(n+1-c) - u(n-c) strictly increasing in n
    * ``weight_positive_increasing``: w(ell) > 0 and increasing for ell >= 1
    * ``weighted_step_nonnegative``: u(n+a+1) - u(n+a) >= u(m-c+1) - u(m-c) for n >= m
    """
    if grid_max < 3:
        raise ValueError(f"grid_max must be >= 3, got {grid_max}")
    report = AdmissibilityReport(spec.name, grid_max)
    c, a = spec.c, spec.a
    report.record("c_range", 0.0 <= c < 1.0, f"c={c}")
    report.record("a_lower", a >= -c, f"a={a}, -c={-c}")

    checks = {
        "split_gain": lambda: _split_gain(spec),
        "increasing_increments": lambda: _increasing_increments(spec, grid_max),
        "weight_positive_increasing": lambda: _weights_ok(spec, grid_max),
        "weighted_step_nonnegative": lambda: _weighted_step_ok(spec, grid_max),
    }
    for name, check in checks.items():
        try:
            ok, detail = check()
        except (ValueError, ArithmeticError) as exc:
            ok, detail = False, f"evaluation failed: {exc}"
        report.record(name, ok, detail)
    return report


def _split_gain(spec):
    lhs = 2.0 * spec.u(1.0 - spec.c) + spec.v
    rhs = spec.u(2.0 - spec.c)
    return lhs < rhs, f"2u(1-c)+v={lhs:.17g}, u(2-c)={rhs:.17g}"


def _increasing_increments(spec, grid_max):
    inc = _increments(spec.u, np.arange(1, grid_max + 1) - spec.c)
    bad = np.flatnonzero(np.diff(inc) <= 0)
    if bad.size:
        return False, f"not increasing at n={bad[0] + 1}"
    return True, ""


def _weights_ok(spec, grid_max):
    w = np.array([spec.w(ell) for ell in range(1, grid_max + 1)], dtype=float)
    if np.any(w <= 0):
        return False, f"w(ell) <= 0 at ell={int(np.argmax(w <= 0)) + 1}"
    if np.any(np.diff(w) <= 0):
        return False, "w not increasing"
    return True, ""


def _weighted_step_ok(spec, grid_max):
    ns = np.arange(1, grid_max + 1)
    left = _increments(spec.u, ns + spec.a)
    right = _increments(spec.u, ns - spec.c)
    # every n must dominate the worst m <= n
    worst = np.maximum.accumulate(right)
    bad = np.flatnonzero(left < worst)
    if bad.size:
        return False, f"fails at n={bad[0] + 1}"
    return True, ""


def weighted_general_entropy(spec: GeneralEntropySpec, state: SampleState) -> float:
    """w(ell) * H_ell, defined for ell >= 0."""
    return (
        spec.u(spec.a + state.ell)
        - spec.b
        - math.fsum(spec.u(n - spec.c) + spec.v for n in state.counts)
    )


def general_entropy(spec: GeneralEntropySpec, state: SampleState) -> float:
    if state.ell < 1:
        raise ValueError("general entropy needs a nonempty sample")
    return weighted_general_entropy(spec, state) / spec.w(state.ell)


def weighted_general_max(spec: GeneralEntropySpec, ell: int) -> float:
    """w(ell) times the maximal entropy, reached when every species is a singleton."""
    return spec.u(spec.a + ell) - spec.b - ell * spec.singleton_cost


def general_delta(spec: GeneralEntropySpec, prev: SampleState, next: SampleState) -> float:
    """One-step increment of w(ell) * (H^max_ell - H_ell)."""
    n = successor_count(prev, next)
    if n == 1:
        return 0.0
    pre = n - 1
    return spec.u(pre - spec.c + 1.0) - spec.u(pre - spec.c) - spec.singleton_cost


def general_weighted_entropy_step(spec: GeneralEntropySpec, prev: SampleState, next: SampleState) -> float:
    """w(ell+1) H_{ell+1} - w(ell) H_ell."""
    ell = prev.ell
    d = spec.u(spec.a + ell + 1.0) - spec.u(spec.a + ell) - spec.singleton_cost
    return d - general_delta(spec, prev, next)
