import numpy as np
import pytest

from schwingersim.model import ModelParams, build_model
from schwingersim.pauli import AXES, PauliTerm, TermSum


@pytest.fixture
def model4():
    return build_model(ModelParams(4, 0.6, 0.1))


@pytest.fixture
def model6():
    return build_model(ModelParams(6, 0.6, 0.1))


def random_term(rng, n_sites, real=False):
    axes = "".join(rng.choice(list(AXES), size=n_sites))
    if axes == "I" * n_sites:
        axes = "X" + axes[1:]
    coeff = rng.standard_normal() + (0 if real else 1j * rng.standard_normal())
    return PauliTerm(coeff, axes)


def random_term_sum(rng, n_sites, n_terms, real=False):
    return TermSum.from_terms(
        [random_term(rng, n_sites, real=real) for _ in range(n_terms)], n_sites
    )


def random_state(rng, n_sites):
    dim = 1 << n_sites
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)
