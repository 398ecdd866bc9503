"""Pauli-string algebra: terms, sums, commutators, dense realization, norms.

Conventions used by the whole package:

* Sites are indexed 0 .. n_sites-1.  Site 0 is the most significant bit of a
  computational-basis index, so on two sites |01> is index 1 and |10> is 2.
* sigma^Z |0> = +|0>,  sigma^Z |1> = -|1>.
* A Pauli string is an axis letter per site, e.g. "XZI" acts with X on site 0,
  Z on site 1 and trivially on site 2.

Coefficients are tracked as complex numbers because Pauli products generate
i-phases; builders of Hermitian operators assert the imaginary parts away.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

AXES = "IXYZ"

#: dense operators are plain complex 2^n x 2^n arrays
DenseOperator = np.ndarray

#: coefficients with |c| below this are dropped when term sums are merged
MERGE_TOLERANCE = 1e-14

#: matrices of the four single-site operators, indexed by axis letter
SINGLE_SITE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# single-site product table: (a, b) -> (phase, axis) with sigma^a sigma^b = phase * sigma^axis
_MUL = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("Y", "I"): (1, "Y"), ("Z", "I"): (1, "Z"),
    ("X", "X"): (1, "I"), ("Y", "Y"): (1, "I"), ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


class SiteCountMismatchError(ValueError):
    """Raised when two operands act on different numbers of sites."""


class DenseLimitError(RuntimeError):
    """Raised when a dense realization would exceed the configured site limit."""


@dataclass(frozen=True)
class PauliTerm:
    """A weighted Pauli string: ``coefficient * sigma^axes[0] x sigma^axes[1] x ...``"""

    coefficient: complex
    axes: str

    def __post_init__(self):
        if not self.axes or any(a not in AXES for a in self.axes):
            raise ValueError(f"axes must be a nonempty string over {AXES!r}, got {self.axes!r}")
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def n_sites(self) -> int:
        return len(self.axes)

    @property
    def is_identity(self) -> bool:
        return set(self.axes) == {"I"}

    @property
    def is_diagonal(self) -> bool:
        """True when the term is diagonal in the computational basis."""
        return all(a in "IZ" for a in self.axes)

    def support(self) -> tuple[int, ...]:
        """Sites on which the term acts nontrivially."""
        return tuple(s for s, a in enumerate(self.axes) if a != "I")

    def scaled(self, factor: complex) -> "PauliTerm":
        return PauliTerm(self.coefficient * factor, self.axes)

    def __repr__(self) -> str:
        return f"({self.coefficient:+g})*{self.axes}"


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Operator product of two Pauli terms, i-phase folded into the coefficient."""
    if a.n_sites != b.n_sites:
        raise SiteCountMismatchError(f"{a.n_sites} != {b.n_sites}")
    phase = 1 + 0j
    out = []
    for ca, cb in zip(a.axes, b.axes):
        p, c = _MUL[(ca, cb)]
        phase *= p
        out.append(c)
    return PauliTerm(a.coefficient * b.coefficient * phase, "".join(out))


@dataclass(frozen=True)
class TermSum:
    """A sum of Pauli terms on a common register, kept merged by axes pattern."""

    terms: tuple[PauliTerm, ...]
    n_sites: int

    @classmethod
    def from_terms(cls, terms, n_sites: int | None = None) -> "TermSum":
        """Build a merged sum; duplicate axes patterns are combined and
        coefficients below MERGE_TOLERANCE are dropped."""
        terms = list(terms)
        if n_sites is None:
            if not terms:
                raise ValueError("n_sites required for an empty sum")
            n_sites = terms[0].n_sites
        merged: dict[str, complex] = {}
        for t in terms:
            if t.n_sites != n_sites:
                raise SiteCountMismatchError(f"{t.n_sites} != {n_sites}")
            merged[t.axes] = merged.get(t.axes, 0j) + t.coefficient
        kept = tuple(
            PauliTerm(c, axes) for axes, c in sorted(merged.items()) if abs(c) > MERGE_TOLERANCE
        )
        return cls(kept, n_sites)

    def __add__(self, other: "TermSum") -> "TermSum":
        if self.n_sites != other.n_sites:
            raise SiteCountMismatchError(f"{self.n_sites} != {other.n_sites}")
        return TermSum.from_terms(self.terms + other.terms, self.n_sites)

    def scaled(self, factor: complex) -> "TermSum":
        return TermSum(tuple(t.scaled(factor) for t in self.terms), self.n_sites)

    @property
    def is_diagonal(self) -> bool:
        return all(t.is_diagonal for t in self.terms)

    def support(self) -> tuple[int, ...]:
        sites: set[int] = set()
        for t in self.terms:
            sites.update(t.support())
        return tuple(sorted(sites))

    def assert_hermitian(self, tol: float = 1e-12) -> "TermSum":
        """Drop imaginary parts after checking they are below tol."""
        bad = max((abs(t.coefficient.imag) for t in self.terms), default=0.0)
        if bad > tol:
            raise ValueError(f"expected Hermitian sum, imaginary coefficient {bad:g}")
        return TermSum(
            tuple(PauliTerm(t.coefficient.real, t.axes) for t in self.terms), self.n_sites
        )


def commutator(a: TermSum, b: TermSum) -> TermSum:
    """[a, b] as a merged TermSum; vanishing terms are removed."""
    if a.n_sites != b.n_sites:
        raise SiteCountMismatchError(f"{a.n_sites} != {b.n_sites}")
    pieces = []
    for ta in a.terms:
        for tb in b.terms:
            ab = multiply(ta, tb)
            ba = multiply(tb, ta)
            # Pauli strings either commute or anticommute: ab == +-ba
            if ab.coefficient != ba.coefficient:
                pieces.append(PauliTerm(ab.coefficient - ba.coefficient, ab.axes))
    return TermSum.from_terms(pieces, a.n_sites)


def _parity_signs(values: np.ndarray) -> np.ndarray:
    """Bit-parity (popcount mod 2) of each entry, as +-1 signs."""
    counts = np.bitwise_count(values.astype(np.uint64))
    return 1 - 2 * (counts & 1).astype(np.int64)


def _term_masks(term: PauliTerm) -> tuple[int, int, int]:
    """(x_mask, zy_mask, y_count) for the permutation form of the term.

    Site s occupies bit (n_sites - 1 - s): site 0 is the most significant bit.
    """
    n = term.n_sites
    x_mask = zy_mask = y_count = 0
    for s, a in enumerate(term.axes):
        bit = 1 << (n - 1 - s)
        if a in "XY":
            x_mask |= bit
        if a in "ZY":
            zy_mask |= bit
        if a == "Y":
            y_count += 1
    return x_mask, zy_mask, y_count


def term_action(term: PauliTerm) -> tuple[np.ndarray, np.ndarray]:
    """Column action of the term: maps |j> to amplitudes[j] * |rows[j]>.

    Every Pauli string is a signed permutation, so one output index and one
    amplitude per basis state fully describe it.
    """
    n = term.n_sites
    dim = 1 << n
    x_mask, zy_mask, y_count = _term_masks(term)
    cols = np.arange(dim)
    rows = cols ^ x_mask
    signs = _parity_signs(cols & zy_mask)
    amps = term.coefficient * (1j**y_count) * signs
    return rows, amps


def to_dense(op: TermSum | PauliTerm, dense_limit: int = 12) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a term or merged sum.

    Raises DenseLimitError above `dense_limit` sites.
    """
    terms = op.terms if isinstance(op, TermSum) else (op,)
    n = op.n_sites
    if n > dense_limit:
        raise DenseLimitError(f"{n} sites exceeds dense limit {dense_limit}")
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for t in terms:
        rows, amps = term_action(t)
        out[rows, cols] += amps
    return out


def restricted_dense(op: TermSum, dense_limit: int = 12) -> np.ndarray:
    """Dense matrix of the sum restricted to its support sites.

    The spectral norm is unchanged by tensoring with identity, so norms of
    few-site sums embedded in a large register can be taken here cheaply.
    """
    sites = op.support()
    if not sites:
        return np.zeros((1, 1), dtype=complex)
    reduced = TermSum.from_terms(
        (PauliTerm(t.coefficient, "".join(t.axes[s] for s in sites)) for t in op.terms),
        len(sites),
    )
    return to_dense(reduced, dense_limit=dense_limit)


def spectral_norm(matrix: np.ndarray, tol: float = 1e-10, max_iter: int = 10**5) -> float:
    """Largest singular value.

    Full SVD up to dimension 4096; power iteration on A^dag A with relative
    tolerance `tol` beyond that.
    """
    matrix = np.asarray(matrix)
    if not np.all(np.isfinite(matrix)):
        raise ValueError("non-finite entries")
    if matrix.shape[0] * matrix.shape[1] == 0:
        return 0.0
    if max(matrix.shape) <= 4096:
        return float(np.linalg.svd(matrix, compute_uv=False)[0])
    rng = np.random.default_rng(0)
    v = rng.standard_normal(matrix.shape[1]) + 1j * rng.standard_normal(matrix.shape[1])
    v /= np.linalg.norm(v)
    sigma2 = 0.0
    for _ in range(max_iter):
        w = matrix.conj().T @ (matrix @ v)
        new_sigma2 = float(np.linalg.norm(w))
        if new_sigma2 == 0.0:
            return 0.0
        v = w / new_sigma2
        if abs(new_sigma2 - sigma2) <= tol * new_sigma2:
            sigma2 = new_sigma2
            break
        sigma2 = new_sigma2
    return float(np.sqrt(sigma2))


def term_sum_norm(op: TermSum, dense_limit: int = 12) -> float:
    """Spectral norm of a term sum, computed on its support."""
    if not op.terms:
        return 0.0
    return spectral_norm(restricted_dense(op, dense_limit=dense_limit))
