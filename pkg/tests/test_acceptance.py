"""One test per acceptance criterion; run with ``pytest tests/test_acceptance.py -v``."""

import time

import numpy as np
import pytest

from ququart_mub.error_analysis import (
    cramer_rao,
    fisher_likelihood_oracle,
    fisher_matrix,
    monte_carlo_table,
    q_bruteforce_oracle,
    q_matrix,
    random_state,
    sic_bound,
)
from ququart_mub.mub import (
    family_build,
    mub_census,
    overlap_verify,
    phase_equation_violation,
    product_bases,
    single_ququart_laws,
)
from ququart_mub.pauli import commuting_sets, fourier_matrix, fourier_tensor, is_product_operator, max_disjoint_selection
from ququart_mub.reference_data import PRODUCT_IDEALS_N2, PRODUCT_RAYS_N2, ring_expr
from ququart_mub.tomography import (
    born_probabilities,
    independent_parameter_count,
    reconstruct_monomial,
    reconstruct_projector,
    redundancy_check,
    squared_errors,
)
from ququart_mub.verify import (
    hensel_mismatches,
    commuting_set_mismatches,
    shared_monomial_mismatches,
    expansion_mismatches,
    trace_rule_mismatches,
)

from conftest import hs_dist, record_criterion

SEED = 7


def conclude(number, ok, detail):
    record_criterion(number, ok, detail)
    assert ok, detail


def test_criterion_01_ring_conformance():
    t0 = time.perf_counter()
    b1, tr = expansion_mismatches(), trace_rule_mismatches()
    dt = time.perf_counter() - t0
    conclude(1, b1 == 0 and tr == 0 and dt < 1.0,
             f"expansion row mismatches={b1} trace-rule mismatches={tr} time={dt:.2f}s")


def test_criterion_02_hensel_lifts():
    t0 = time.perf_counter()
    bad = hensel_mismatches(3)
    dt = time.perf_counter() - t0
    conclude(2, bad == 0 and dt < 1.0, f"lift/trace mismatches={bad} time={dt:.2f}s")


def test_criterion_03_overlap_laws():
    v1 = overlap_verify(family_build(1)).max_violation
    t0 = time.perf_counter()
    fam2 = family_build(2)
    v2 = overlap_verify(fam2).max_violation
    dt = time.perf_counter() - t0
    laws = max(single_ququart_laws().values())
    ok = (family_build(1).n_setups == 6 and fam2.n_setups == 20
          and max(v1, v2, laws) <= 1e-10 and dt <= 60)
    conclude(3, ok, f"max violation N=1 {v1:.1e}, N=2 {v2:.1e}, single-ququart {laws:.1e}; N=2 time={dt:.1f}s")


def test_criterion_04_phase_equation():
    bad = [phase_equation_violation(n) for n in (1, 2)]
    conclude(4, bad == [0, 0], f"violating triples N=1,2: {bad}")


def test_criterion_05_redundancy():
    worst, counts = 0.0, []
    for n in (1, 2):
        fam = family_build(n)
        rep = overlap_verify(fam)
        worst = max(worst, rep.redundancy_ray, rep.redundancy_ideal)
        for i in range(10):
            worst = max(worst, redundancy_check(born_probabilities(random_state("mixed", fam.dim, SEED, i), fam))["max"])
        counts.append(independent_parameter_count(fam))
    conclude(5, worst <= 1e-10 and counts == [15, 255], f"max violation {worst:.1e}; independent parameters {counts}")


def test_criterion_06_reconstruction():
    worst, gap = 0.0, 0.0
    for n in (1, 2):
        fam = family_build(n)
        for kind in ("mixed", "pure"):
            for i in range(100):
                rho = random_state(kind, fam.dim, SEED, i)
                p = born_probabilities(rho, fam)
                a, b = reconstruct_projector(p), reconstruct_monomial(p)
                worst = max(worst, hs_dist(a, rho), hs_dist(b, rho))
                gap = max(gap, hs_dist(a, b))
    conclude(6, worst <= 1e-10 and gap <= 1e-10, f"max HS residual {worst:.1e}; path gap {gap:.1e}")


def test_criterion_07_closed_forms():
    qdiff = []
    for n in (1, 2):
        closed, oracle = q_matrix(n), q_bruteforce_oracle(n)
        qdiff.append(max(float(np.max(np.abs(a - b))) for a, b in zip(closed.blocks, oracle.blocks)))
    fam = family_build(1)
    frel = 0.0
    for i in range(20):
        rho = random_state("mixed", fam.dim, SEED, i)
        p = born_probabilities(0.9 * rho + 0.1 * np.eye(fam.dim) / fam.dim, fam)
        for a, b in zip(fisher_matrix(p, 1).blocks, fisher_likelihood_oracle(p, 1).blocks):
            frel = max(frel, float(np.max(np.abs(a - b)) / np.max(np.abs(b))))
    ok = qdiff[0] == 0 and qdiff[1] <= 1e-8 and frel <= 1e-6
    conclude(7, ok, f"closed-form Q vs oracle max |diff| N=1 {qdiff[0]:.3g}, N=2 {qdiff[1]:.3g}; "
                    f"Fisher closed form vs likelihood oracle max rel {frel:.3g}")


def test_criterion_08_cramer_rao():
    fam = family_build(1)
    rho = np.eye(4) / 4
    bound = cramer_rao(rho, 1)
    shots = 10 ** 5
    err = squared_errors(rho, fam, shots, 200, SEED) * shots
    mean, se = err.mean(), err.std(ddof=1) / np.sqrt(len(err))
    above = mean >= bound - 3 * se
    close = abs(mean / bound - 1) <= 0.10
    lo = squared_errors(rho, fam, 1000, 200, SEED).mean() * 1000
    hi = squared_errors(rho, fam, 16000, 200, SEED).mean() * 16000
    scaling = abs(lo / hi - 1) <= 0.25
    conclude(8, above and close and scaling,
             f"M*MSE={mean:.3f}+-{se:.3f} vs Tr(QF^-1)={bound:.3f}; M*MSE at 1e3/1.6e4 shots ratio {lo / hi:.3f}")


# provable conflicts between the printed cell and its closed form; see error-analysis notes in README
def qubit_pure_conflict(d):
    # pure-state bound is d - 1 for every state
    return np.sqrt(d - 1)


def sic_mixed_ceiling(d):
    # largest attainable value over all states is at purity 1/d
    return np.sqrt(d * d + d - 1 - 1 / d)


def test_criterion_09_table3():
    t0 = time.perf_counter()
    r1 = monte_carlo_table((1,), ("pure", "mixed"), 1000, SEED)
    t1 = time.perf_counter() - t0
    t0 = time.perf_counter()
    r2 = monte_carlo_table((2,), ("pure", "mixed"), 1000, SEED)
    t2 = time.perf_counter() - t0
    lines, ok = [], t1 < 120 and t2 < 1800
    for d, rep in ((4, r1), (16, r2)):
        sic = rep.row(f"sic-{d}", "pure")
        exact = abs(sic.mean - np.sqrt(sic_bound(random_state("pure", d, 0, 0)))) < 1e-12 and sic.stderr < 1e-12
        ok &= exact and abs(sic.mean - sic.paper_value) <= 0.005
        lines.append(f"sic-{d} pure {sic.mean:.4f} (printed {sic.paper_value})")
    for rep, scheme in ((r1, "ququart-1"), (r2, "ququart-2")):
        for ens in ("pure", "mixed"):
            r = rep.row(scheme, ens)
            ok &= abs(r.delta) <= 0.2
            lines.append(f"{scheme} {ens} {r.mean:.3f} (printed {r.paper_value}, delta {r.delta:+.3f})")
    # formula-implied cells: accepted when they agree or the printed value is provably unattainable
    for rep, d in ((r1, 4), (r2, 16)):
        q = rep.row(f"qubit-{int(np.log2(d))}", "pure")
        conflict = abs(qubit_pure_conflict(d) - q.paper_value) > 0.005
        ok &= abs(q.mean - qubit_pure_conflict(d)) < 1e-9 and (abs(q.delta) <= 0.005 or conflict)
        lines.append(f"qubit-{int(np.log2(d))} pure {q.mean:.3f} (printed {q.paper_value}{', conflict' if conflict else ''})")
        qm = rep.row(f"qubit-{int(np.log2(d))}", "mixed")
        lines.append(f"qubit-{int(np.log2(d))} mixed {qm.mean:.3f} (printed {qm.paper_value}, delta {qm.delta:+.3f})")
        s = rep.row(f"sic-{d}", "mixed")
        ceiling = sic_mixed_ceiling(d)
        ok &= s.mean <= ceiling
        tag = "conflict" if s.paper_value > ceiling else f"delta {s.delta:+.3f}"
        lines.append(f"sic-{d} mixed {s.mean:.3f} (printed {s.paper_value}, ceiling {ceiling:.3f}, {tag})")
    lines.append(f"time N=1 {t1:.0f}s N=2 {t2:.0f}s")
    conclude(9, bool(ok), "; ".join(lines))


def test_criterion_10_censuses():
    sets_ok = all(len(commuting_sets(n)) == 4 ** n + 2 ** n for n in (1, 2))
    tables = commuting_set_mismatches() + shared_monomial_mismatches()
    sizes = [max_disjoint_selection(commuting_sets(n)) for n in (1, 2)]
    (size1, count1), (size2, _) = mub_census(family_build(1)), mub_census(family_build(2))
    ok = sets_ok and tables == 0 and sizes == [3, 5] and (size1, size2) == (3, 5) and count1 == 6
    conclude(10, ok, f"set counts ok={sets_ok}; table mismatches={tables}; largest disjoint selection {sizes}; "
                     f"largest unbiased clique N=1 {size1} x{count1}, N=2 {size2}")


def test_criterion_11_factorization():
    fac = {n: is_product_operator(fourier_matrix(n)) for n in (1, 2, 3)}
    tensor = all(np.allclose(fourier_matrix(n), fourier_tensor(n)) for n in (1, 3))
    fam = family_build(2)
    ring = fam.space.ring
    got = {(lab.kind, lab.elem) for lab in product_bases(fam)}
    want = {("ray", ring_expr(ring, t)) for t in PRODUCT_RAYS_N2} | {("ideal", ring_expr(ring, t)) for t in PRODUCT_IDEALS_N2}
    ok = fac == {1: True, 2: False, 3: True} and tensor and got == want
    conclude(11, ok, f"Fourier product N=1,2,3: {[fac[n] for n in (1, 2, 3)]}; F = F4^(x)N at N=1,3: {tensor}; "
                     f"product bases {sorted(lab.text for lab in product_bases(fam))}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
