"""Ordered product-formula steps and (optionally protected) Trotter evolution.

A step is a list of exponential factors exp(-i * duration * group), where each
group is a mutually commuting Hermitian term sum that we can exponentiate
exactly: a nearest-neighbor hopping block, a single Pauli string, or the full
diagonal part.  Factor lists are written in applied order (first factor hits
the state first).

Three term orderings are supported:

* ``oe1``: odd hopping pairs, even hopping pairs, then the whole diagonal.
* ``oe2``: hopping and nearest-neighbor ZZ interleaved pair by pair, then the
  longer-range ZZ factors, then the single-Z factors.
* ``xyz``: all XX factors, all YY factors, then the diagonal.

Symmetry protection conjugates step k by the global charge rotation
C(alpha_k), one Z(alpha_k) native rotation per qubit, which equals
exp(-i alpha_k/2 S_z).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from .model import SchwingerModel, bare_vacuum, symmetry_charges
from .pauli import DenseLimitError, TermSum, restricted_dense, term_action
from .statevector import DEFAULT_DENSE_LIMIT, apply_block, protection_phases


class Ordering(str, Enum):
    OE1 = "oe1"
    OE2 = "oe2"
    XYZ = "xyz"


@dataclass(frozen=True)
class TrotterPlan:
    """Ordering scheme, formula order, step size, step count, protection angles."""

    ordering: Ordering
    order_p: int
    dt: float
    steps: int
    protection: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.order_p != 1 and (self.order_p < 2 or self.order_p % 2 != 0):
            raise ValueError(f"order must be 1 or an even integer, got {self.order_p}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if self.protection is not None and len(self.protection) != self.steps:
            raise ValueError(
                f"protection schedule length {len(self.protection)} != steps {self.steps}"
            )

    @property
    def total_time(self) -> float:
        return self.dt * self.steps


@dataclass(frozen=True)
class StepFactor:
    group: TermSum
    duration: float


@dataclass(frozen=True)
class StepSequence:
    """One Trotter step as an ordered list of exact exponential factors."""

    factors: tuple[StepFactor, ...]
    n_sites: int
    ordering: Ordering
    order_p: int
    dt: float


def _base_groups(model: SchwingerModel, ordering: Ordering) -> list[TermSum]:
    """Commuting factor groups of the first-order step, in applied order."""
    n = model.n_sites
    diagonal = model.diagonal_part().assert_hermitian()
    if ordering is Ordering.OE1:
        odd = [model.h_x_pairs[s] for s in range(0, n - 1, 2)]
        even = [model.h_x_pairs[s] for s in range(1, n - 1, 2)]
        return odd + even + [diagonal]
    if ordering is Ordering.OE2:
        groups: list[TermSum] = []
        for start in (0, 1):
            for s in range(start, n - 1, 2):
                groups.append(model.h_x_pairs[s])
                zz = [t for t in model.h_zz_pairs if t.support() == (s, s + 1)]
                if zz:
                    groups.append(TermSum.from_terms(zz, n))
        for t in model.h_zz_pairs:
            a, b = t.support()
            if b - a >= 2:
                groups.append(TermSum.from_terms([t], n))
        groups.append(model.h_z.assert_hermitian())
        return groups
    if ordering is Ordering.XYZ:
        xx = [TermSum.from_terms([block.terms[0]], n) for block in model.h_x_pairs]
        yy = [TermSum.from_terms([block.terms[1]], n) for block in model.h_x_pairs]
        return xx + yy + [diagonal]
    raise ValueError(f"unknown ordering {ordering!r}")


def _strang(groups: list[TermSum], dt: float) -> list[StepFactor]:
    head = [StepFactor(g, dt / 2) for g in groups[:-1]]
    return head + [StepFactor(groups[-1], dt)] + head[::-1]


def _suzuki(groups: list[TermSum], p: int, dt: float) -> list[StepFactor]:
    """Recursive fractal construction for even p >= 4.

    S_p(dt) = S_{p-2}(u dt)^2  S_{p-2}((1 - 4u) dt)  S_{p-2}(u dt)^2
    with u = 1 / (4 - 4^(1/(p-1))).
    """
    if p == 2:
        return _strang(groups, dt)
    u = 1.0 / (4.0 - 4.0 ** (1.0 / (p - 1)))
    wing = _suzuki(groups, p - 2, u * dt)
    middle = _suzuki(groups, p - 2, (1.0 - 4.0 * u) * dt)
    return wing + wing + middle + wing + wing


def build_step(
    model: SchwingerModel, ordering: Ordering, order_p: int, dt: float
) -> StepSequence:
    """Factor sequence of one Trotter step for the given scheme and order."""
    if order_p != 1 and (order_p < 2 or order_p % 2 != 0):
        raise ValueError(f"order must be 1 or an even integer, got {order_p}")
    groups = _base_groups(model, ordering)
    if order_p == 1:
        factors = [StepFactor(g, dt) for g in groups]
    else:
        factors = _suzuki(groups, order_p, dt)
    return StepSequence(tuple(factors), model.n_sites, ordering, order_p, dt)


# ---------------------------------------------------------------------------
# Factor kernels


def _diagonal_of(group: TermSum) -> np.ndarray:
    diag = np.zeros(1 << group.n_sites, dtype=complex)
    for t in group.terms:
        rows, amps = term_action(t)
        if not np.array_equal(rows, np.arange(len(rows))):
            raise ValueError("group is not diagonal")
        diag += amps
    if np.max(np.abs(diag.imag)) > 1e-12:
        raise ValueError("diagonal group must be Hermitian")
    return diag.real


class _Kernel:
    """Compiled applier for one step factor."""

    def __init__(self, factor: StepFactor, n: int):
        group = factor.group
        if group.is_diagonal:
            self._phases = np.exp(-1j * factor.duration * _diagonal_of(group))
            self.apply = self._apply_diagonal
            return
        sites = group.support()
        if len(sites) > 2:
            raise ValueError(f"non-diagonal factor spans {len(sites)} sites; expected <= 2")
        h = restricted_dense(group)
        if np.max(np.abs(h - h.conj().T)) > 1e-12:
            raise ValueError("factor group must be Hermitian")
        evals, evecs = np.linalg.eigh(h)
        self._u = (evecs * np.exp(-1j * factor.duration * evals)) @ evecs.conj().T
        self._sites = sites
        self.apply = self._apply_block

    def _apply_diagonal(self, arr: np.ndarray) -> np.ndarray:
        if arr.ndim == 1:
            return self._phases * arr
        return self._phases[:, None] * arr

    def _apply_block(self, arr: np.ndarray) -> np.ndarray:
        return apply_block(arr, self._u, self._sites)


def compile_step(seq: StepSequence) -> list[_Kernel]:
    return [_Kernel(f, seq.n_sites) for f in seq.factors]


def apply_step(arr: np.ndarray, kernels: list[_Kernel]) -> np.ndarray:
    for k in kernels:
        arr = k.apply(arr)
    return arr


def step_unitary(seq: StepSequence, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Dense unitary of one step (product of all factor exponentials)."""
    if seq.n_sites > dense_limit:
        raise DenseLimitError(f"{seq.n_sites} sites exceeds dense limit {dense_limit}")
    dim = 1 << seq.n_sites
    return apply_step(np.eye(dim, dtype=complex), compile_step(seq))


def evolve(
    model: SchwingerModel,
    psi0: np.ndarray,
    plan: TrotterPlan,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> list[np.ndarray]:
    """Trajectory [psi_0, psi_1, ..., psi_steps] under the Trotterized step.

    With a protection schedule, step k is conjugated to
    C(alpha_k)^dag U_step C(alpha_k).
    """
    if model.n_sites > dense_limit:
        raise DenseLimitError(f"{model.n_sites} sites exceeds dense limit {dense_limit}")
    kernels = compile_step(build_step(model, plan.ordering, plan.order_p, plan.dt))
    trajectory = [np.array(psi0, dtype=complex)]
    psi = trajectory[0]
    for k in range(plan.steps):
        if plan.protection is not None:
            phases = protection_phases(model.n_sites, plan.protection[k])
            psi = phases.conj() * apply_step(phases * psi, kernels)
        else:
            psi = apply_step(psi, kernels)
        trajectory.append(psi)
    return trajectory


def oe_equivalence_conjugator(
    model: SchwingerModel, dt: float, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> np.ndarray:
    """Diagonal unitary D with S_oe1 = D S_oe2 D^dag: the product of the
    odd-pair nearest-neighbor ZZ exponentials."""
    n = model.n_sites
    if n > dense_limit:
        raise DenseLimitError(f"{n} sites exceeds dense limit {dense_limit}")
    diag = np.zeros(1 << n, dtype=float)
    for s in range(0, n - 1, 2):
        for t in model.h_zz_pairs:
            if t.support() == (s, s + 1):
                rows, amps = term_action(t)
                diag += amps.real
    return np.diag(np.exp(-1j * dt * diag))


def random_angle_schedule(steps: int, seed: int) -> tuple[float, ...]:
    """Uniform draws from [0, 2*pi), reproducible given the seed."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rng = np.random.default_rng(seed)
    return tuple(rng.uniform(0.0, 2.0 * np.pi, steps))


def linear_angle_schedule(alpha1: float, steps: int) -> tuple[float, ...]:
    """The ramp alpha_k = k * alpha1 for k = 1..steps."""
    return tuple(alpha1 * k for k in range(1, steps + 1))


def _leakage_batch(
    step_u: np.ndarray, charges: np.ndarray, psi0: np.ndarray, alphas: np.ndarray, steps: int
) -> np.ndarray:
    """Final-time symmetry-sector leakage for a batch of alpha1 candidates.

    Evolves all candidates at once; protection angles follow the k * alpha1
    ramp.  Leakage is the total population outside the initial charge sector.
    """
    reference = int(round(float(np.real(np.vdot(psi0, charges * psi0)))))
    forbidden = charges != reference
    states = np.broadcast_to(psi0, (len(alphas), len(psi0))).copy()
    ut = step_u.T
    for k in range(1, steps + 1):
        phases = np.exp(-0.5j * np.outer(k * alphas, charges))
        states = ((phases * states) @ ut) * phases.conj()
    return (np.abs(states[:, forbidden]) ** 2).sum(axis=1)


def optimize_alpha1(
    model: SchwingerModel,
    dt: float,
    t: float,
    grid_points: int = 4096,
    ordering: Ordering = Ordering.XYZ,
    psi0: np.ndarray | None = None,
    refine_tol: float = 1e-6,
    return_curve: bool = False,
):
    """Smallest first-step protection angle that minimizes final-time leakage.

    Sweeps alpha1 over a uniform grid on [0, 2*pi) with the ramp schedule
    alpha_k = k * alpha1, then refines the best grid point by a bounded local
    search to `refine_tol` radians.  Ties go to the smallest angle.

    Returns (alpha1, leakage), plus the full (alphas, leakages) grid when
    `return_curve` is set.
    """
    steps = round(t / dt)
    if abs(steps * dt - t) > 1e-9 * max(1.0, abs(t)):
        raise ValueError(f"t = {t} is not an integer multiple of dt = {dt}")
    if grid_points < 1000:
        raise ValueError("grid_points must be >= 1000")
    if psi0 is None:
        psi0 = bare_vacuum(model.params)
    step_u = step_unitary(build_step(model, ordering, 1, dt))
    charges = symmetry_charges(model.n_sites)
    alphas = np.linspace(0.0, 2.0 * np.pi, grid_points, endpoint=False)
    values = _leakage_batch(step_u, charges, psi0, alphas, steps)

    vmin = float(values.min())
    ties = alphas[values <= vmin + 1e-12]
    best_alpha = float(ties.min())
    best_value = float(
        _leakage_batch(step_u, charges, psi0, np.array([best_alpha]), steps)[0]
    )

    spacing = 2.0 * np.pi / grid_points
    lo = max(0.0, best_alpha - spacing)
    hi = min(2.0 * np.pi, best_alpha + spacing)

    def objective(a: float) -> float:
        return float(_leakage_batch(step_u, charges, psi0, np.array([a]), steps)[0])

    result = minimize_scalar(
        objective, bounds=(lo, hi), method="bounded", options={"xatol": refine_tol}
    )
    if result.fun < best_value - 1e-15:
        best_alpha, best_value = float(result.x), float(result.fun)

    if return_curve:
        return best_alpha, best_value, alphas, values
    return best_alpha, best_value


# ---------------------------------------------------------------------------
# Plan (de)serialization


def plan_to_json(plan: TrotterPlan) -> str:
    doc = {
        "ordering": plan.ordering.value,
        "p": plan.order_p,
        "dt": plan.dt,
        "steps": plan.steps,
        "protection": list(plan.protection) if plan.protection is not None else None,
    }
    return json.dumps(doc, indent=2)


def plan_from_json(text: str) -> TrotterPlan:
    """Parse a plan document; protection may be a list of angles, null, or
    {"random": seed} for a reproducible uniform schedule."""
    doc = json.loads(text)
    protection = doc.get("protection")
    steps = int(doc["steps"])
    if isinstance(protection, dict):
        protection = random_angle_schedule(steps, int(protection["random"]))
    elif protection is not None:
        protection = tuple(float(a) for a in protection)
    return TrotterPlan(
        ordering=Ordering(doc["ordering"]),
        order_p=int(doc["p"]),
        dt=float(doc["dt"]),
        steps=steps,
        protection=protection,
    )
