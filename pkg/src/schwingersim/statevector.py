"""Exact state-vector evolution, Pauli-rotation kernels and native gates.

States are plain complex amplitude vectors of length 2^N, basis-ordered with
site 0 as the most significant bit.  Gate application returns a new array and
never mutates the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

from .model import SchwingerModel, symmetry_charges
from .pauli import DenseLimitError, PauliTerm, term_action, to_dense

if TYPE_CHECKING:
    from .compiler import NativeGate

#: states are plain complex amplitude vectors of length 2^N
StateVector = np.ndarray

DEFAULT_DENSE_LIMIT = 12

NORM_TOLERANCE = 1e-10


@dataclass(frozen=True)
class PopulationTable:
    """Basis-state probabilities, exact or as shot frequencies."""

    probabilities: np.ndarray
    n_sites: int
    shot_count: int | None = None

    def probability(self, index: int) -> float:
        return float(self.probabilities[index])


def n_sites_of(state: np.ndarray) -> int:
    n = int(np.log2(len(state)))
    if 1 << n != len(state):
        raise ValueError(f"state length {len(state)} is not a power of two")
    return n


def basis_state(n_sites: int, index: int) -> np.ndarray:
    psi = np.zeros(1 << n_sites, dtype=complex)
    psi[index] = 1.0
    return psi


def bitstring_to_index(bits: str) -> int:
    if set(bits) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {bits!r}")
    return int(bits, 2)


def index_to_bitstring(index: int, n_sites: int) -> str:
    return format(index, f"0{n_sites}b")


def assert_normalized(state: np.ndarray, tol: float = NORM_TOLERANCE) -> None:
    norm = float(np.linalg.norm(state))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state norm {norm} deviates from 1 beyond {tol}")


@lru_cache(maxsize=4)
def _eigh_cached(model: SchwingerModel, dense_limit: int):
    h = to_dense(model.hamiltonian().assert_hermitian(), dense_limit=dense_limit)
    evals, evecs = np.linalg.eigh(h)
    return evals, evecs


def dense_hamiltonian(model: SchwingerModel, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Dense H (constant excluded)."""
    return to_dense(model.hamiltonian().assert_hermitian(), dense_limit=dense_limit)


def evolution_operator(
    model: SchwingerModel, t: float, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> np.ndarray:
    """exp(-i t H) from the cached eigendecomposition."""
    if model.n_sites > dense_limit:
        raise DenseLimitError(f"{model.n_sites} sites exceeds dense limit {dense_limit}")
    evals, evecs = _eigh_cached(model, dense_limit)
    phases = np.exp(-1j * t * evals)
    return (evecs * phases) @ evecs.conj().T


def exact_evolve(
    model: SchwingerModel,
    psi0: np.ndarray,
    t: float,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> np.ndarray:
    """Evolve psi0 by exp(-i t H); unitary to NORM_TOLERANCE."""
    if model.n_sites > dense_limit:
        raise DenseLimitError(f"{model.n_sites} sites exceeds dense limit {dense_limit}")
    evals, evecs = _eigh_cached(model, dense_limit)
    psi = evecs @ (np.exp(-1j * t * evals) * (evecs.conj().T @ psi0))
    assert_normalized(psi)
    return psi


def exact_trajectory(
    model: SchwingerModel,
    psi0: np.ndarray,
    times,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> list[np.ndarray]:
    """exp(-i t H) psi0 for each t, sharing one eigendecomposition."""
    if model.n_sites > dense_limit:
        raise DenseLimitError(f"{model.n_sites} sites exceeds dense limit {dense_limit}")
    evals, evecs = _eigh_cached(model, dense_limit)
    coeffs = evecs.conj().T @ psi0
    return [evecs @ (np.exp(-1j * t * evals) * coeffs) for t in times]


def apply_pauli_term(state: np.ndarray, term: PauliTerm) -> np.ndarray:
    """P |psi> including the term coefficient (signed-permutation action)."""
    rows, amps = term_action(term)
    out = np.zeros_like(state)
    out[rows] = amps * state
    return out


def apply_pauli_rotation(state: np.ndarray, term: PauliTerm, angle: float) -> np.ndarray:
    """exp(-i * angle * P) |psi> for the unit-coefficient Pauli string P.

    The term's own coefficient is ignored; fold it into `angle`.
    """
    if term.is_identity:
        raise ValueError("identity rotation is a global phase; fold it at the caller")
    unit = PauliTerm(1.0, term.axes)
    return np.cos(angle) * state - 1j * np.sin(angle) * apply_pauli_term(state, unit)


def apply_block(arr: np.ndarray, u: np.ndarray, sites: tuple[int, ...]) -> np.ndarray:
    """Apply a 2^k x 2^k unitary on `sites` to a state vector or to a stack of
    column vectors (shape (2^n,) or (2^n, batch))."""
    n = n_sites_of(arr if arr.ndim == 1 else arr[:, 0])
    k = len(sites)
    front = tuple(range(k))
    psi = arr.reshape([2] * n + list(arr.shape[1:]))
    psi = np.moveaxis(psi, sites, front)
    shape = psi.shape
    psi = u @ psi.reshape(1 << k, -1)
    return np.moveaxis(psi.reshape(shape), front, sites).reshape(arr.shape)


def rotation_matrix(theta: float, phi: float) -> np.ndarray:
    """R(theta, phi) = exp(-i theta/2 (X cos phi + Y sin phi))."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[c, -1j * s * np.exp(-1j * phi)], [-1j * s * np.exp(1j * phi), c]], dtype=complex
    )


def z_rotation_matrix(theta: float) -> np.ndarray:
    """Z(theta) = exp(-i theta/2 Z)."""
    return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]], dtype=complex)


def xx_matrix(chi: float) -> np.ndarray:
    """XX(chi) = exp(-i chi X x X) on a two-site block."""
    xx = np.kron(np.array([[0, 1], [1, 0]]), np.array([[0, 1], [1, 0]])).astype(complex)
    return np.cos(chi) * np.eye(4) - 1j * np.sin(chi) * xx


def apply_native(state: np.ndarray, gate: "NativeGate") -> np.ndarray:
    """Apply one native gate: XX(chi), R(theta, phi) or Z(theta)."""
    n = n_sites_of(state)
    if any(q < 0 or q >= n for q in gate.qubits):
        raise ValueError(f"gate qubits {gate.qubits} out of range for {n} sites")
    return apply_block(state, gate_matrix(gate), tuple(gate.qubits))


def gate_matrix(gate: "NativeGate") -> np.ndarray:
    """Dense matrix of a native gate on its own qubits."""
    if gate.kind == "Z":
        (theta,) = gate.angles
        return z_rotation_matrix(theta)
    if gate.kind == "R":
        theta, phi = gate.angles
        return rotation_matrix(theta, phi)
    if gate.kind == "XX":
        (chi,) = gate.angles
        return xx_matrix(chi)
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def populations(state: np.ndarray) -> PopulationTable:
    """Exact Z-basis populations of a state."""
    probs = np.abs(state) ** 2
    return PopulationTable(probs, n_sites_of(state), shot_count=None)


def sample(state: np.ndarray, shots: int, seed: int) -> PopulationTable:
    """Multinomial shot frequencies from |amplitudes|^2, reproducible by seed."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = np.abs(state) ** 2
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    return PopulationTable(counts / shots, n_sites_of(state), shot_count=shots)


def state_to_csv(state: np.ndarray) -> str:
    """Amplitude dump, one `index,re,im` line per basis state."""
    lines = ["index,re,im"]
    for index, amp in enumerate(state):
        lines.append(f"{index},{float(amp.real)!r},{float(amp.imag)!r}")
    return "\n".join(lines) + "\n"


def state_from_csv(text: str) -> np.ndarray:
    rows = [line.split(",") for line in text.splitlines()[1:] if line]
    state = np.zeros(len(rows), dtype=complex)
    for index, re, im in rows:
        state[int(index)] = float(re) + 1j * float(im)
    return state


def population_to_csv(table: PopulationTable) -> str:
    """Populations as `index,bitstring,probability_or_count` lines.

    Sampled tables report integer counts, exact ones report probabilities.
    """
    lines = ["index,bitstring,probability_or_count"]
    for index, p in enumerate(table.probabilities):
        value = round(p * table.shot_count) if table.shot_count else float(p)
        cell = str(value) if table.shot_count else repr(float(p))
        lines.append(f"{index},{index_to_bitstring(index, table.n_sites)},{cell}")
    return "\n".join(lines) + "\n"


def protection_phases(n_sites: int, alpha: float) -> np.ndarray:
    """Diagonal of the symmetry rotation C(alpha) over basis indices.

    C(alpha) is one Z(alpha) native rotation per qubit, i.e.
    exp(-i alpha/2 S_z) with S_z the total-charge operator.
    """
    return np.exp(-0.5j * alpha * symmetry_charges(n_sites))
