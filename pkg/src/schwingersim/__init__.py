"""Trotterized real-time dynamics of the purely fermionic lattice Schwinger
model: term orderings, error bounds, native-gate compilation, symmetry
protection and post-selection, at exact-statevector scale (N <= 12 sites)."""

from .model import ModelParams, SchwingerModel, bare_vacuum, build_model, symmetry_charge
from .pauli import PauliTerm, TermSum, commutator, multiply, spectral_norm, to_dense
from .trotter import Ordering, TrotterPlan, build_step, evolve, optimize_alpha1

__all__ = [
    "ModelParams",
    "SchwingerModel",
    "bare_vacuum",
    "build_model",
    "symmetry_charge",
    "PauliTerm",
    "TermSum",
    "commutator",
    "multiply",
    "spectral_norm",
    "to_dense",
    "Ordering",
    "TrotterPlan",
    "build_step",
    "evolve",
    "optimize_alpha1",
]

__version__ = "0.1.0"
