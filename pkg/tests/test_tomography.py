import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ququart_mub.error_analysis import random_state
from ququart_mub.mub import family_build
from ququart_mub.tomography import (
    CountTable,
    ProbabilityTable,
    TomographyError,
    born_map_rank,
    born_probabilities,
    check_density_matrix,
    check_probability_table,
    empirical_mse,
    independent_parameter_count,
    reconstruct_monomial,
    reconstruct_projector,
    redundancy_check,
    sample_counts,
    squared_errors,
    table_from_csv,
    table_to_csv,
)

from conftest import hs_dist


def lstsq_oracle(table):
    """Generic least-squares inverse of the Born map, independent of the closed forms."""
    fam = table.family
    u = fam.matrices
    d = fam.dim
    a = np.einsum("sik,sjk->skij", u.conj(), u).reshape(-1, d * d)
    x, *_ = np.linalg.lstsq(a, table.values.reshape(-1).astype(complex), rcond=None)
    return x.reshape(d, d)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("kind", ["pure", "mixed"])
def test_both_paths_match_lstsq_oracle(n, kind):
    fam = family_build(n)
    for i in range(5):
        rho = random_state(kind, fam.dim, 11, i)
        p = born_probabilities(rho, fam)
        oracle = lstsq_oracle(p)
        assert hs_dist(oracle, rho) <= 1e-10
        assert hs_dist(reconstruct_projector(p), rho) <= 1e-10
        assert hs_dist(reconstruct_monomial(p), rho) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0, 1))
def test_reconstruction_is_affine(seed, t):
    fam = family_build(1)
    a, b = random_state("mixed", 4, seed, 0), random_state("pure", 4, seed, 1)
    mix = t * a + (1 - t) * b
    pa, pb, pm = (born_probabilities(r, fam).values for r in (a, b, mix))
    comb = ProbabilityTable(fam, t * pa + (1 - t) * pb)
    assert np.allclose(reconstruct_projector(comb), mix, atol=1e-12)
    assert np.allclose(pm, comb.values, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(10, 500))
def test_sampled_estimates_hermitian_unit_trace(seed, shots):
    fam = family_build(1)
    rho = random_state("mixed", 4, seed, 0)
    freqs = sample_counts(born_probabilities(rho, fam), shots, seed).frequencies()
    for est in (reconstruct_projector(freqs), reconstruct_monomial(freqs)):
        assert np.allclose(est, est.conj().T, atol=1e-12)
        assert np.isclose(np.trace(est).real, 1)
    # per-setup normalized data: both formulas still coincide
    assert np.allclose(reconstruct_projector(freqs), reconstruct_monomial(freqs), atol=1e-12)


def test_paths_differ_off_normalization(fam1):
    rng = np.random.default_rng(3)
    raw = ProbabilityTable(fam1, rng.uniform(0, 0.5, (fam1.n_setups, fam1.dim)))
    assert not np.allclose(reconstruct_projector(raw), reconstruct_monomial(raw))


@pytest.mark.parametrize("n", [1, 2])
def test_redundancy_and_rank(n):
    fam = family_build(n)
    rho = random_state("mixed", fam.dim, 5, 0)
    rep = redundancy_check(born_probabilities(rho, fam))
    assert rep["max"] <= 1e-10
    assert born_map_rank(fam) == 16 ** n
    assert independent_parameter_count(fam) == 16 ** n - 1


def test_redundancy_detects_bad_table(fam1):
    p = born_probabilities(np.eye(4) / 4, fam1).values.copy()
    p[1, 0] += 0.1
    p[1, 1] -= 0.1
    assert redundancy_check(ProbabilityTable(fam1, p))["ray"] > 0.05


def test_validation_errors(fam1):
    with pytest.raises(TomographyError):
        check_density_matrix(np.eye(3) / 3, 4)
    with pytest.raises(TomographyError):
        check_density_matrix(np.eye(4))
    with pytest.raises(TomographyError):
        check_density_matrix(np.diag([1, 0, 0, 0]) + np.triu(np.ones((4, 4)), 1))
    with pytest.raises(TomographyError):
        check_density_matrix(np.diag([1.5, -0.5, 0, 0]), physical=True)
    with pytest.raises(TomographyError):
        check_probability_table(np.zeros((6, 4)), fam1)
    with pytest.raises(TomographyError):
        check_probability_table(np.full((6, 4), np.nan), fam1, normalized=False)
    with pytest.raises(TomographyError):
        ProbabilityTable(fam1, np.zeros((5, 4)))
    with pytest.raises(TomographyError):
        CountTable(fam1, np.ones((6, 4), dtype=int), 5)
    with pytest.raises(TomographyError):
        born_probabilities(np.eye(16) / 16, fam1)


def test_sampling_deterministic_and_order_free(fam1):
    p = born_probabilities(random_state("mixed", 4, 2, 0), fam1)
    a = sample_counts(p, 1000, seed=9, repeat=3)
    b = sample_counts(p, 1000, seed=9, repeat=3)
    assert np.array_equal(a.counts, b.counts)
    assert a.counts.sum(axis=1).tolist() == [1000] * fam1.n_setups
    assert not np.array_equal(a.counts, sample_counts(p, 1000, seed=9, repeat=4).counts)
    with pytest.raises(TomographyError):
        sample_counts(p, 0, seed=1)


def test_mse_scales_inverse_shots(fam1):
    rho = random_state("mixed", 4, 1, 0)
    lo = empirical_mse(rho, fam1, 500, 400, 3)
    hi = empirical_mse(rho, fam1, 8000, 400, 3)
    assert 0.75 <= lo / hi / 16 <= 1.25
    assert squared_errors(rho, fam1, 100, 3, 0).shape == (3,)
    with pytest.raises(TomographyError):
        squared_errors(rho, fam1, 100, 0, 0)


def test_csv_round_trip(tmp_path, fam2):
    p = born_probabilities(random_state("pure", 16, 4, 0), fam2)
    text = table_to_csv(p, out=tmp_path / "t.csv")
    assert text.splitlines()[0] == "setup_kind,setup_elem,outcome_elem,value"
    for src in (text, tmp_path / "t.csv"):
        back = table_from_csv(src, 2)
        assert np.array_equal(back.values, p.values)
    counts = sample_counts(p, 50, seed=1)
    assert table_to_csv(counts).splitlines()[1].split(",")[-1].isdigit()


def test_csv_rejects_incomplete():
    with pytest.raises(TomographyError):
        table_from_csv("a,b\n1,2\n", 1)
    with pytest.raises(TomographyError):
        table_from_csv("setup_kind,setup_elem,outcome_elem,value\nray,0,0,1.0\n", 1)
