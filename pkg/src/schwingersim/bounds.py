"""Trotter-error bounds and empirical minimum step counts.

Three routes to "how many Trotter steps does time t need at tolerance eps":

* a closed-form product bound  kappa_p * gamma * lambda^p * dt^(p+1),
* the exact second-order nested-commutator bound, evaluated termwise with
  Pauli algebra so cancellations are kept,
* a binary search over r for the smallest ||exp(-i t H) - S_p(t/r)^r|| <= eps.

Term grouping: the hopping blocks enter as individual groups in odd-even
order, and the whole diagonal part is the single last group (its pieces
commute, so splitting it further adds no Trotter error).  The diagonal group
has the largest norm, which keeps gamma small.

One-step bounds B(dt) = c * dt^(p+1) convert to step counts by requiring
r * B(t/r) <= eps, i.e. r >= t * (c * t / eps)^(1/p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .model import SchwingerModel
from .pauli import TermSum, commutator, spectral_norm, term_sum_norm
from .statevector import DEFAULT_DENSE_LIMIT, evolution_operator
from .trotter import Ordering, build_step, step_unitary

STEP_CAP_DEFAULT = 10**6


class StepCapError(RuntimeError):
    """Raised when the binary search exceeds the step cap."""


def bound_groups(model: SchwingerModel) -> list[TermSum]:
    """Hamiltonian groups h_1 .. h_K with the diagonal part last."""
    n = model.n_sites
    odd = [model.h_x_pairs[s] for s in range(0, n - 1, 2)]
    even = [model.h_x_pairs[s] for s in range(1, n - 1, 2)]
    return odd + even + [model.diagonal_part().assert_hermitian()]


def kappa(p: int) -> float:
    """Product-formula constant (4 * 5^(p/2 - 1))^(p + 1)."""
    return float((4.0 * 5.0 ** (p / 2.0 - 1.0)) ** (p + 1))


def site_interaction_strength(model: SchwingerModel, method: str = "coefficient") -> float:
    """Largest per-site interaction strength lambda.

    "coefficient": for each site, sum |coefficient| over every Hamiltonian
    term acting on it, and take the maximum.  "norm": same but with the
    spectral norm of the summed per-site operator, a slightly tighter
    alternative reading kept for sensitivity checks.
    """
    terms = model.hamiltonian().assert_hermitian().terms
    if method == "coefficient":
        strength = np.zeros(model.n_sites)
        for t in terms:
            for s in t.support():
                strength[s] += abs(t.coefficient)
        return float(strength.max())
    if method == "norm":
        best = 0.0
        for s in range(model.n_sites):
            local = TermSum.from_terms(
                [t for t in terms if s in t.support()], model.n_sites
            )
            best = max(best, term_sum_norm(local))
        return best
    raise ValueError(f"unknown lambda method {method!r}")


def interaction_norm_sum(model: SchwingerModel) -> float:
    """gamma: the sum of spectral norms of the first K-1 groups."""
    groups = bound_groups(model)
    return float(sum(term_sum_norm(g) for g in groups[:-1]))


def closed_form_coefficient(
    model: SchwingerModel, p: int, lambda_method: str = "coefficient"
) -> float:
    """c with one-step bound c * dt^(p+1) from the closed-form product bound."""
    if p != 1 and (p < 2 or p % 2 != 0):
        raise ValueError(f"order must be 1 or even, got {p}")
    if not model.hamiltonian().terms:
        raise ValueError("empty model")
    lam = site_interaction_strength(model, lambda_method)
    gam = interaction_norm_sum(model)
    return kappa(p) * gam * lam**p


def closed_form_bound(
    model: SchwingerModel, p: int, dt: float, lambda_method: str = "coefficient"
) -> float:
    """One-step error bound kappa_p * gamma * lambda^p * dt^(p+1)."""
    return closed_form_coefficient(model, p, lambda_method) * abs(dt) ** (p + 1)


def nested_commutator_coefficient(groups: list[TermSum]) -> float:
    """dt^3 coefficient of the second-order bound for an ordered group list:

        (1/24) sum_k ||[h_k, [h_k, S_k]]|| + (1/12) sum_k ||[S_k, [S_k, h_k]]||

    with S_k the sum of all groups after k.  Commutators are evaluated
    termwise, so cancellations between terms are kept.
    """
    n = groups[0].n_sites
    total_24 = 0.0
    total_12 = 0.0
    for k1 in range(len(groups) - 1):
        suffix = TermSum.from_terms(
            [t for g in groups[k1 + 1 :] for t in g.terms], n
        )
        inner = commutator(groups[k1], suffix)
        total_24 += term_sum_norm(commutator(groups[k1], inner))
        total_12 += term_sum_norm(commutator(suffix, commutator(suffix, groups[k1])))
    return total_24 / 24.0 + total_12 / 12.0


@lru_cache(maxsize=32)
def exact_commutator_coefficient(model: SchwingerModel) -> float:
    """c with one-step bound c * dt^3 from the exact nested-commutator sums."""
    return nested_commutator_coefficient(bound_groups(model))


def exact_commutator_bound(model: SchwingerModel, dt: float, p: int = 2) -> float:
    """Second-order one-step bound: (dt^3/24) sum ||[h_k,[h_k,S_k]]|| +
    (dt^3/12) sum ||[S_k,[S_k,h_k]]|| with S_k the sum of the groups after k."""
    if p != 2:
        raise ValueError("the nested-commutator bound is second-order specific")
    return exact_commutator_coefficient(model) * abs(dt) ** 3


def min_steps_from_bound(coefficient: float, p: int, t: float, epsilon: float) -> int:
    """Smallest r with r * c * (t/r)^(p+1) <= epsilon: r = ceil(t (c t/eps)^(1/p))."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if t == 0 or coefficient == 0:
        return 1
    return max(1, math.ceil(t * (coefficient * t / epsilon) ** (1.0 / p)))


def trotter_error(
    model: SchwingerModel,
    p: int,
    t: float,
    steps: int,
    ordering: Ordering = Ordering.OE1,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> float:
    """||exp(-i t H) - S_p(t/steps)^steps|| in spectral norm."""
    u_exact = evolution_operator(model, t, dense_limit=dense_limit)
    s = step_unitary(build_step(model, ordering, p, t / steps), dense_limit=dense_limit)
    return spectral_norm(np.linalg.matrix_power(s, steps) - u_exact)


def empirical_min_steps(
    model: SchwingerModel,
    p: int,
    t: float,
    epsilon: float,
    ordering: Ordering = Ordering.OE1,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    step_cap: int = STEP_CAP_DEFAULT,
    linear_scan_limit: int | None = None,
) -> int:
    """Minimum r with total Trotter error at most epsilon.

    Doubles r until the tolerance is met, then bisects; the returned r is
    checked to be minimal (r-1 fails).  A linear scan over r = 1, 2, ... is
    available via `linear_scan_limit` as an independent cross-check.
    """
    if p not in (1, 2):
        raise ValueError("empirical search supports p in {1, 2}")
    if epsilon >= 2.0 or t == 0:
        return 1  # a difference of unitaries never exceeds norm 2

    def error(r: int) -> float:
        return trotter_error(model, p, t, r, ordering, dense_limit)

    if linear_scan_limit is not None:
        for r in range(1, linear_scan_limit + 1):
            if error(r) <= epsilon:
                return r
        raise StepCapError(f"no r <= {linear_scan_limit} meets epsilon {epsilon}")

    hi = 1
    while error(hi) > epsilon:
        hi *= 2
        if hi > step_cap:
            raise StepCapError(f"step count exceeded cap {step_cap}")
    lo = hi // 2  # error(lo) > epsilon when lo >= 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if error(mid) <= epsilon:
            hi = mid
        else:
            lo = mid
    # minimality check: walk down through any non-monotone pocket at the edge
    while hi > 1 and error(hi - 1) <= epsilon:
        hi -= 1
    return hi


def two_qubit_gates_per_step(n_sites: int) -> int:
    """XX gates per odd-even step: 2(N-1) + C(N-1, 2)."""
    m = n_sites - 1
    return 2 * m + m * (m - 1) // 2


@dataclass
class BoundReport:
    """Per-size summary of the three step-count estimates.

    `closed_form` and `exact_commutator` are the one-step bound coefficients
    (bounds at dt = 1); multiply by dt^(p+1) or dt^3 for other step sizes.
    """

    n_sites: int
    t: float
    epsilon: float
    p: int
    lambda_: float
    gamma: float
    kappa_p: float
    closed_form: float
    exact_commutator: float
    steps: dict[str, int] = field(default_factory=dict)
    gate_counts: dict[str, int] = field(default_factory=dict)


def evaluate_bounds(
    model: SchwingerModel,
    t: float,
    epsilon: float,
    p: int = 2,
    include_empirical: bool = True,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> BoundReport:
    """Step counts and two-qubit gate totals for every method at one size."""
    report = BoundReport(
        n_sites=model.n_sites,
        t=t,
        epsilon=epsilon,
        p=p,
        lambda_=site_interaction_strength(model),
        gamma=interaction_norm_sum(model),
        kappa_p=kappa(p),
        closed_form=closed_form_coefficient(model, p),
        exact_commutator=exact_commutator_coefficient(model) if p == 2 else float("nan"),
    )
    per_step = two_qubit_gates_per_step(model.n_sites)
    report.steps["commutator_bound"] = min_steps_from_bound(report.closed_form, p, t, epsilon)
    if p == 2:
        report.steps["exact_commutator"] = min_steps_from_bound(
            report.exact_commutator, p, t, epsilon
        )
    if include_empirical:
        report.steps["empirical"] = empirical_min_steps(
            model, p, t, epsilon, dense_limit=dense_limit
        )
    report.gate_counts = {k: r * per_step for k, r in report.steps.items()}
    return report


def scaling_fit(points) -> tuple[float, float, float]:
    """Least-squares fit of log(count) against log(N).

    Returns (exponent, intercept, r_squared); `points` is a sequence of
    (N, count) with positive entries.
    """
    pts = [(float(n), float(c)) for n, c in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    if any(n <= 0 or c <= 0 for n, c in pts):
        raise ValueError("points must be positive")
    log_n = np.log([n for n, _ in pts])
    log_c = np.log([c for _, c in pts])
    exponent, intercept = np.polyfit(log_n, log_c, 1)
    predicted = exponent * log_n + intercept
    ss_res = float(np.sum((log_c - predicted) ** 2))
    ss_tot = float(np.sum((log_c - log_c.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(exponent), float(intercept), r_squared
