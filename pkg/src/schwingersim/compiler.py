"""Compile one odd-even-ordered Trotter step into trapped-ion native gates.

Native gate set (angles in radians):

    Z_i(theta)      = exp(-i theta/2 Z_i)
    R_i(theta, phi) = exp(-i theta/2 (X_i cos phi + Y_i sin phi))
    XX_ij(chi)      = exp(-i chi X_i X_j)

YY(chi) is an XX(chi) conjugated by Z(pi/2) rotations on both qubits, and
ZZ(chi) is an XX(chi) conjugated by equatorial rotations that map X to Z.

Merging policy (deterministic, applied at emission): the ZZ interactions form
one mutually commuting block, so the basis-change rotations are emitted once
per qubit around the whole block rather than around every gate, and the layer
covers the full register.  Single-qubit counts are otherwise left unoptimized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SchwingerModel
from .pauli import DenseLimitError, spectral_norm
from .statevector import DEFAULT_DENSE_LIMIT, apply_block, gate_matrix
from .trotter import Ordering, StepSequence, step_unitary

HALF_PI = np.pi / 2


@dataclass(frozen=True)
class NativeGate:
    """One native gate: kind "XX" (2 qubits, angle chi), "R" (1 qubit, theta
    and phi) or "Z" (1 qubit, theta)."""

    kind: str
    qubits: tuple[int, ...]
    angles: tuple[float, ...]

    def __post_init__(self):
        expected = {"XX": (2, 1), "R": (1, 2), "Z": (1, 1)}
        if self.kind not in expected:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_qubits, n_angles = expected[self.kind]
        if len(self.qubits) != n_qubits or len(set(self.qubits)) != n_qubits:
            raise ValueError(f"{self.kind} gate needs {n_qubits} distinct qubits")
        if len(self.angles) != n_angles:
            raise ValueError(f"{self.kind} gate needs {n_angles} angles")


@dataclass(frozen=True)
class NativeCircuit:
    gates: tuple[NativeGate, ...]
    n_sites: int

    def __post_init__(self):
        for g in self.gates:
            if any(q < 0 or q >= self.n_sites for q in g.qubits):
                raise ValueError(f"gate {g} out of range for {self.n_sites} sites")


@dataclass(frozen=True)
class GateCount:
    xx: int
    r: int
    z: int


def xx_gate(a: int, b: int, chi: float) -> NativeGate:
    return NativeGate("XX", (a, b), (chi,))


def r_gate(q: int, theta: float, phi: float) -> NativeGate:
    return NativeGate("R", (q,), (theta, phi))


def z_gate(q: int, theta: float) -> NativeGate:
    return NativeGate("Z", (q,), (theta,))


def z_angle_for_coefficient(coefficient: float, dt: float) -> float:
    """Z(theta) realizes exp(-i dt c Z) with theta = 2 c dt."""
    return 2.0 * coefficient * dt


def compile_step(
    model: SchwingerModel, ordering: Ordering = Ordering.OE1, dt: float = 1.0
) -> NativeCircuit:
    """Native-gate circuit of one odd-even Trotter step, in applied order.

    Only the odd-even scheme is compiled; other orderings raise ValueError.
    """
    if ordering is not Ordering.OE1:
        raise ValueError(f"compilation targets the oe1 ordering, got {ordering.value}")
    n = model.n_sites
    gates: list[NativeGate] = []

    # hopping blocks: XX(chi) then YY(chi) as a Z-conjugated XX, odd pairs
    # first; chi is the XX string weight x/2 times dt
    for start in (0, 1):
        for s in range(start, n - 1, 2):
            chi = model.h_x_pairs[s].terms[0].coefficient.real * dt
            gates.append(xx_gate(s, s + 1, chi))
            gates.append(z_gate(s, -HALF_PI))
            gates.append(z_gate(s + 1, -HALF_PI))
            gates.append(xx_gate(s, s + 1, chi))
            gates.append(z_gate(s, HALF_PI))
            gates.append(z_gate(s + 1, HALF_PI))

    # ZZ block: one basis change on every qubit around all pair interactions
    if model.h_zz_pairs:
        for q in range(n):
            gates.append(r_gate(q, HALF_PI, HALF_PI))
        for term in model.h_zz_pairs:
            a, b = term.support()
            gates.append(xx_gate(a, b, term.coefficient.real * dt))
        for q in range(n):
            gates.append(r_gate(q, HALF_PI, -HALF_PI))

    # single-Z layer, in site order
    for term in sorted(model.h_z.terms, key=lambda t: t.support()):
        (q,) = term.support()
        gates.append(z_gate(q, z_angle_for_coefficient(term.coefficient.real, dt)))

    return NativeCircuit(tuple(gates), n)


def count_gates(circuit: NativeCircuit) -> GateCount:
    kinds = [g.kind for g in circuit.gates]
    return GateCount(xx=kinds.count("XX"), r=kinds.count("R"), z=kinds.count("Z"))


def xx_count_formula(n_sites: int) -> int:
    """Two-qubit gates per odd-even step: 2(N-1) hopping + C(N-1, 2) pair terms."""
    m = n_sites - 1
    return 2 * m + m * (m - 1) // 2


def circuit_unitary(
    circuit: NativeCircuit, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> np.ndarray:
    if circuit.n_sites > dense_limit:
        raise DenseLimitError(f"{circuit.n_sites} sites exceeds dense limit {dense_limit}")
    u = np.eye(1 << circuit.n_sites, dtype=complex)
    for g in circuit.gates:
        u = apply_block(u, gate_matrix(g), tuple(g.qubits))
    return u


def verify_circuit(
    circuit: NativeCircuit,
    reference: StepSequence | np.ndarray,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> float:
    """Spectral-norm deviation between the compiled circuit and the reference
    step, after aligning the global phase (the dropped Hamiltonian constant
    shifts the circuit by a phase)."""
    u_circ = circuit_unitary(circuit, dense_limit=dense_limit)
    if isinstance(reference, StepSequence):
        u_ref = step_unitary(reference, dense_limit=dense_limit)
    else:
        u_ref = np.asarray(reference)
    if u_circ.shape != u_ref.shape:
        raise ValueError(f"dimension mismatch: {u_circ.shape} vs {u_ref.shape}")
    overlap = np.trace(u_ref.conj().T @ u_circ)
    if abs(overlap) > 1e-12:
        u_ref = (overlap / abs(overlap)) * u_ref
    return spectral_norm(u_circ - u_ref)


# ---------------------------------------------------------------------------
# Line-oriented circuit text format: one gate per line, 17 significant digits.
#   XX <q_i> <q_j> <chi>
#   R <q> <theta> <phi>
#   Z <q> <theta>


def circuit_to_text(circuit: NativeCircuit) -> str:
    lines = [f"# sites {circuit.n_sites}"]
    for g in circuit.gates:
        fields = [g.kind, *map(str, g.qubits), *(f"{a:.17g}" for a in g.angles)]
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> NativeCircuit:
    n_sites = 0
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts[:1] == ["sites"]:
                n_sites = int(parts[1])
            continue
        fields = line.split()
        kind = fields[0]
        try:
            if kind == "XX":
                gates.append(xx_gate(int(fields[1]), int(fields[2]), float(fields[3])))
            elif kind == "R":
                gates.append(r_gate(int(fields[1]), float(fields[2]), float(fields[3])))
            elif kind == "Z":
                gates.append(z_gate(int(fields[1]), float(fields[2])))
            else:
                raise ValueError(f"unknown gate kind {kind!r}")
        except (IndexError, ValueError) as err:
            raise ValueError(f"bad circuit line {lineno}: {raw!r}") from err
    if n_sites == 0:
        n_sites = 1 + max((q for g in gates for q in g.qubits), default=0)
    return NativeCircuit(tuple(gates), n_sites)
