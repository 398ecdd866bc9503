"""Purely fermionic spin Hamiltonian of the lattice Schwinger model.

For an even number N of staggered sites, open boundaries and zero incoming
electric field, the dimensionless Hamiltonian splits into

    H = H^x + H^ZZ + H^Z + const

with

    H^x  = x * sum_{n=1}^{N-1} (s+_n s-_{n+1} + h.c.)
         = (x/2) * sum_{n=1}^{N-1} (X_n X_{n+1} + Y_n Y_{n+1})
    H^ZZ + H^Z + const
         = (1/4) * sum_{n=1}^{N-1} [ sum_{m=1}^{n} (Z_m + (-1)^m) ]^2
           + (mu/2) * sum_{n=1}^{N} (-1)^n (Z_n + 1)

(1-based site labels n here; code uses 0-based sites with site 0 the most
significant bit).  Expanding the square gives

    ZZ pair (m, l), m < l <= N-1:   coefficient (N - l) / 2
    single Z on site n:             (mu/2)(-1)^n - (1/2) |{odd k : n <= k <= N-1}|
    constant:                       (1/4) sum_{n<N} (n + [n odd])

The identity part does not affect the dynamics and is recorded separately as
``dropped_constant``.  Particles live on odd (1-based) sites encoded as |1>,
antiparticles on even sites encoded as |0>, so the bare vacuum (ground state
at x = 0) is the basis state |0101...01>.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .pauli import PauliTerm, TermSum, commutator


@dataclass(frozen=True)
class ModelParams:
    """Model parameters: even site count N, coupling x > 0 and mass mu."""

    n_sites: int
    x: float
    mu: float

    def __post_init__(self):
        if self.n_sites < 2 or self.n_sites % 2 != 0:
            raise ValueError(f"n_sites must be even and >= 2, got {self.n_sites}")
        if not self.x > 0:
            raise ValueError(f"x must be positive, got {self.x}")


@dataclass(frozen=True)
class SchwingerModel:
    """Grouped Hamiltonian terms plus the dropped identity constant.

    h_x_pairs[k] is the hopping block (x/2)*(XX + YY) on sites (k, k+1),
    h_zz_pairs holds one ZZ term per site pair (a, b) with a < b <= N-2
    (0-based) and h_z the merged single-Z sum.
    """

    params: ModelParams
    h_x_pairs: tuple[TermSum, ...]
    h_zz_pairs: tuple[PauliTerm, ...]
    h_z: TermSum
    dropped_constant: float

    @property
    def n_sites(self) -> int:
        return self.params.n_sites

    def h_x(self) -> TermSum:
        terms = [t for block in self.h_x_pairs for t in block.terms]
        return TermSum.from_terms(terms, self.n_sites)

    def h_zz(self) -> TermSum:
        return TermSum.from_terms(self.h_zz_pairs, self.n_sites)

    def diagonal_part(self) -> TermSum:
        """H^ZZ + H^Z, the mutually commuting diagonal group."""
        return self.h_zz() + self.h_z

    def hamiltonian(self) -> TermSum:
        """Full H as a merged term sum, constant excluded."""
        return self.h_x() + self.h_zz() + self.h_z

    def symmetry_operator(self) -> TermSum:
        """Global charge operator: the sum of Z over all sites."""
        n = self.n_sites
        return TermSum.from_terms(
            (PauliTerm(1.0, _single_axis(n, s, "Z")) for s in range(n)), n
        )

    def zz_coefficient(self, a: int, b: int) -> float:
        """ZZ coefficient for 0-based pair (a, b), a < b; zero outside H^ZZ."""
        n = self.n_sites
        if not 0 <= a < b < n:
            raise ValueError(f"bad pair ({a}, {b})")
        if b > n - 2:
            return 0.0
        return (n - 1 - b) / 2.0


def _single_axis(n: int, site: int, axis: str) -> str:
    return "I" * site + axis + "I" * (n - site - 1)


def _pair_axes(n: int, a: int, b: int, axis: str) -> str:
    chars = ["I"] * n
    chars[a] = axis
    chars[b] = axis
    return "".join(chars)


def alternating_sign(site: int) -> int:
    """(-1)^n for 0-based site (n = site + 1): -1 on even sites, +1 on odd."""
    return 1 if site % 2 else -1


def build_model(params: ModelParams) -> SchwingerModel:
    """Expand the Hamiltonian into grouped Pauli terms.

    The squared cumulative-charge term is expanded symbolically; the resulting
    constant is kept out of every evolution.
    """
    n = params.n_sites
    x = params.x
    mu = params.mu

    # x (s+ s- + h.c.) per link: equal XX and YY strings of weight x/2
    h_x_pairs = tuple(
        TermSum.from_terms(
            [
                PauliTerm(0.5 * x, _pair_axes(n, s, s + 1, "X")),
                PauliTerm(0.5 * x, _pair_axes(n, s, s + 1, "Y")),
            ],
            n,
        )
        for s in range(n - 1)
    )

    # pair (a, b) 0-based, a < b <= n-2, coefficient (N - l)/2 with l = b + 1
    h_zz_pairs = tuple(
        PauliTerm((n - 1 - b) / 2.0, _pair_axes(n, a, b, "Z"))
        for b in range(1, n - 1)
        for a in range(b)
    )

    # single-Z: mass term plus the linear part of the expanded square;
    # the latter counts odd (1-based) links k >= n up to N-1
    z_terms = []
    for s in range(n):
        odd_links_after = sum(1 for k in range(s + 1, n) if k % 2 == 1)
        coeff = 0.5 * mu * alternating_sign(s) - 0.5 * odd_links_after
        z_terms.append(PauliTerm(coeff, _single_axis(n, s, "Z")))
    h_z = TermSum.from_terms(z_terms, n)

    # identity part: (1/4) sum_{n=1}^{N-1} (n + [n odd]) + (mu/2) sum (-1)^n
    constant = 0.25 * sum(k + (k % 2) for k in range(1, n)) + 0.5 * mu * sum(
        alternating_sign(s) for s in range(n)
    )

    return SchwingerModel(
        params=params,
        h_x_pairs=h_x_pairs,
        h_zz_pairs=h_zz_pairs,
        h_z=h_z,
        dropped_constant=float(constant),
    )


def bare_vacuum_index(n_sites: int) -> int:
    """Basis index of |0101...01>: odd 0-based sites hold bit 1."""
    index = 0
    for s in range(n_sites):
        if s % 2 == 1:
            index |= 1 << (n_sites - 1 - s)
    return index


def bare_vacuum(params: ModelParams) -> np.ndarray:
    """The x = 0 ground state |0101...01> as an amplitude vector."""
    psi = np.zeros(1 << params.n_sites, dtype=complex)
    psi[bare_vacuum_index(params.n_sites)] = 1.0
    return psi


def symmetry_charge(index: int, n_sites: int) -> int:
    """Total charge sum_n z_n of a basis state: +1 per 0 bit, -1 per 1 bit."""
    if not 0 <= index < (1 << n_sites):
        raise ValueError(f"index {index} out of range for {n_sites} sites")
    return n_sites - 2 * int(index).bit_count()


def symmetry_charges(n_sites: int) -> np.ndarray:
    """Charge of every basis index, ordered by index."""
    indices = np.arange(1 << n_sites, dtype=np.uint64)
    return n_sites - 2 * np.bitwise_count(indices).astype(np.int64)


def model_commutes_with_charge(model: SchwingerModel) -> bool:
    """Termwise check that [H, S_z] merges to the empty sum."""
    return not commutator(model.hamiltonian(), model.symmetry_operator()).terms


def model_to_json(model: SchwingerModel) -> str:
    """Interchange document listing every term as {sites, axes, coefficient}."""
    terms = []

    def add(term: PauliTerm, group: str):
        sites = term.support()
        terms.append(
            {
                "sites": list(sites),
                "axes": "".join(term.axes[s] for s in sites),
                "coefficient": term.coefficient.real,
                "group": group,
            }
        )

    for block in model.h_x_pairs:
        for t in block.terms:
            add(t, "x")
    for t in model.h_zz_pairs:
        add(t, "zz")
    for t in model.h_z.terms:
        add(t, "z")
    doc = {
        "n_sites": model.n_sites,
        "x": model.params.x,
        "mu": model.params.mu,
        "constant": model.dropped_constant,
        "terms": terms,
    }
    return json.dumps(doc, indent=2, sort_keys=False)


def model_from_json(text: str) -> SchwingerModel:
    """Rebuild a model from its JSON document (validates against build_model)."""
    doc = json.loads(text)
    params = ModelParams(doc["n_sites"], doc["x"], doc["mu"])
    model = build_model(params)
    rebuilt = TermSum.from_terms(
        (
            PauliTerm(
                entry["coefficient"],
                _axes_from_sites(doc["n_sites"], entry["sites"], entry["axes"]),
            )
            for entry in doc["terms"]
        ),
        doc["n_sites"],
    )
    expected = model.hamiltonian()
    if rebuilt.terms != expected.assert_hermitian().terms:
        raise ValueError("term list does not match the model parameters")
    return model


def _axes_from_sites(n: int, sites: list[int], axes: str) -> str:
    chars = ["I"] * n
    for s, a in zip(sites, axes):
        chars[s] = a
    return "".join(chars)
