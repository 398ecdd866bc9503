"""Physical quantities from states and measured populations.

Everything here is diagonal in the measurement basis except the vacuum
persistence, which is a squared overlap; all quantities are therefore also
computable from a PopulationTable (shot data), which is how the post-selected
variants are produced.

Per-site conventions (0-based site s, staggered label n = s + 1):

    nu_n = <((-1)^n Z_n + 1) / 2>      particle number, in [0, 1]
    Q_n  = <(Z_n + (-1)^n) / 2>        local charge, = (-1)^n nu_n
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import alternating_sign, symmetry_charges
from .statevector import PopulationTable, n_sites_of


def vacuum_persistence(psi: np.ndarray, psi0: np.ndarray) -> float:
    """|<psi0|psi>|^2."""
    if psi.shape != psi0.shape:
        raise ValueError(f"dimension mismatch: {psi.shape} vs {psi0.shape}")
    return float(abs(np.vdot(psi0, psi)) ** 2)


def _z_expectations(probs: np.ndarray, n: int) -> np.ndarray:
    """<Z_s> for every site from basis-state probabilities."""
    indices = np.arange(len(probs))
    out = np.empty(n)
    for s in range(n):
        bit = (indices >> (n - 1 - s)) & 1
        out[s] = float(np.sum(probs * (1 - 2 * bit)))
    return out


def particle_density(psi: np.ndarray) -> tuple[float, np.ndarray]:
    """(mean nu, per-site nu_n) for a normalized state."""
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state not normalized: |psi| = {norm}")
    return particle_density_from_probs(np.abs(psi) ** 2, n_sites_of(psi))


def particle_density_from_probs(probs: np.ndarray, n: int) -> tuple[float, np.ndarray]:
    z = _z_expectations(probs, n)
    signs = np.array([alternating_sign(s) for s in range(n)])
    nu_site = (signs * z + 1.0) / 2.0
    return float(nu_site.mean()), nu_site


def charge_density(psi: np.ndarray) -> np.ndarray:
    """Per-site charge Q_n; particles carry -1, antiparticles +1."""
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state not normalized: |psi| = {norm}")
    return charge_density_from_probs(np.abs(psi) ** 2, n_sites_of(psi))


def charge_density_from_probs(probs: np.ndarray, n: int) -> np.ndarray:
    z = _z_expectations(probs, n)
    signs = np.array([alternating_sign(s) for s in range(n)])
    return (z + signs) / 2.0


def leakage(pop: PopulationTable, reference_charge: int) -> float:
    """Total probability outside the reference charge sector."""
    forbidden = symmetry_charges(pop.n_sites) != reference_charge
    return float(pop.probabilities[forbidden].sum())


def state_leakage(psi: np.ndarray, reference_charge: int) -> float:
    forbidden = symmetry_charges(n_sites_of(psi)) != reference_charge
    return float((np.abs(psi[forbidden]) ** 2).sum())


def post_select(pop: PopulationTable, reference_charge: int) -> PopulationTable:
    """Drop the forbidden-sector entries and renormalize.

    The result has exactly zero leakage; fully leaked data raises ValueError.
    """
    allowed = symmetry_charges(pop.n_sites) == reference_charge
    kept = np.where(allowed, pop.probabilities, 0.0)
    if np.array_equal(kept, pop.probabilities):
        return pop  # nothing to discard; keeps the operation exactly idempotent
    survival = float(kept.sum())
    if survival <= 0.0:
        raise ValueError("no probability left in the reference charge sector")
    return PopulationTable(kept / survival, pop.n_sites, pop.shot_count)


def state_projection(psi: np.ndarray, bitstring: str) -> float:
    """Probability of one named basis state."""
    n = n_sites_of(psi)
    if len(bitstring) != n or set(bitstring) - {"0", "1"}:
        raise ValueError(f"need a {n}-bit string, got {bitstring!r}")
    return float(abs(psi[int(bitstring, 2)]) ** 2)


def apply_readout_correction(pop: PopulationTable, matrix: np.ndarray) -> PopulationTable:
    """Hook for an externally measured state-transfer correction.

    `matrix` maps true populations to observed ones; its inverse is applied
    and the result clipped to physical range and renormalized.
    """
    matrix = np.asarray(matrix, dtype=float)
    dim = len(pop.probabilities)
    if matrix.shape != (dim, dim):
        raise ValueError(f"correction matrix must be {dim}x{dim}")
    corrected = np.linalg.solve(matrix, pop.probabilities)
    corrected = np.clip(corrected, 0.0, None)
    total = corrected.sum()
    if total <= 0:
        raise ValueError("correction produced an empty distribution")
    return PopulationTable(corrected / total, pop.n_sites, pop.shot_count)


@dataclass
class ObservableRow:
    """One trajectory row: time plus every derived quantity."""

    time: float
    p_vac: float
    nu: float
    q: np.ndarray
    leakage: float
    projections: dict[str, float] | None = None


def observables_from_state(
    psi: np.ndarray,
    psi0: np.ndarray,
    time: float,
    reference_charge: int = 0,
    projection_bitstrings: tuple[str, ...] = (),
) -> ObservableRow:
    nu, _ = particle_density(psi)
    return ObservableRow(
        time=time,
        p_vac=vacuum_persistence(psi, psi0),
        nu=nu,
        q=charge_density(psi),
        leakage=state_leakage(psi, reference_charge),
        projections={b: state_projection(psi, b) for b in projection_bitstrings} or None,
    )


def observables_from_table(
    pop: PopulationTable,
    vacuum_index: int,
    time: float,
    reference_charge: int = 0,
    projection_bitstrings: tuple[str, ...] = (),
) -> ObservableRow:
    """Observable row from measured populations; p_vac is the vacuum-state
    population (the initial state is a basis state, so these coincide)."""
    n = pop.n_sites
    nu, _ = particle_density_from_probs(pop.probabilities, n)
    projections = {
        b: float(pop.probabilities[int(b, 2)]) for b in projection_bitstrings
    }
    return ObservableRow(
        time=time,
        p_vac=pop.probability(vacuum_index),
        nu=nu,
        q=charge_density_from_probs(pop.probabilities, n),
        leakage=leakage(pop, reference_charge),
        projections=projections or None,
    )


def asymptotic_density_check(p_vac: float, nu: float, n_sites: int) -> float:
    """Diagnostic gap nu + log(P_vac)/N; vanishes in the large-N limit.

    Reported only, never asserted: finite sizes deviate.
    """
    if p_vac <= 0:
        return float("nan")
    return float(nu + np.log(p_vac) / n_sites)
