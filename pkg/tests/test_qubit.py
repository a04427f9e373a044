import itertools
from functools import reduce

import numpy as np
import pytest

from ququart_mub.error_analysis import random_state
from ququart_mub.qubit import (
    qubit_mse_bound,
    qubit_mub_build,
    qubit_phase_violation,
    qubit_probabilities,
    qubit_reconstruct,
)

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_mutually_unbiased(n):
    fam = qubit_mub_build(n)
    d = fam.dim
    assert fam.bases.shape == (d + 1, d, d)
    for a, b in itertools.combinations(range(d + 1), 2):
        ov = np.abs(fam.bases[a].conj().T @ fam.bases[b]) ** 2
        assert np.allclose(ov, 1 / d, atol=1e-12)
    for u in fam.bases:
        assert np.allclose(u.conj().T @ u, np.eye(d), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_phase_relation_and_hadamard(n):
    assert qubit_phase_violation(n) == 0
    assert np.allclose(qubit_mub_build(n).bases[-1], reduce(np.kron, [H] * n))


@pytest.mark.parametrize("n", [1, 2, 4])
def test_round_trip(n):
    fam = qubit_mub_build(n)
    rho = random_state("mixed", fam.dim, 3, 0)
    assert np.allclose(qubit_reconstruct(qubit_probabilities(rho, fam), fam), rho, atol=1e-12)


@pytest.mark.parametrize("kind", ["pure", "mixed"])
def test_bound_is_dim_minus_purity(kind):
    for d in (4, 16):
        rho = random_state(kind, d, 8, 0)
        purity = np.trace(rho @ rho).real
        assert np.isclose(qubit_mse_bound(rho), d - purity)


def test_bound_matches_multinomial_error():
    # per-shot linear-estimator error: sum over bases of 1 - sum p^2
    rho = random_state("mixed", 4, 2, 0)
    p = qubit_probabilities(rho)
    assert np.isclose(qubit_mse_bound(rho), float(np.sum(1 - (p ** 2).sum(axis=1))))


def test_errors():
    with pytest.raises(ValueError):
        qubit_mub_build(5)
    with pytest.raises(ValueError):
        qubit_reconstruct(np.zeros((3, 2)), qubit_mub_build(2))
    with pytest.raises(ValueError):
        qubit_reconstruct(np.zeros((5, 4)), qubit_mub_build(2))
    with pytest.raises(ValueError):
        qubit_mse_bound(np.eye(3) / 3)
