"""Conformance checks shared by the ``verify`` command and the test-suite."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .galois import hensel_lift, lift_teichmuller, lifted_context, ring_context
from .mub import (
    family_build,
    overlap_verify,
    phase_equation_violation,
    single_ququart_laws,
    spectral_violation,
    validate_fixtures,
)
from .pauli import commuting_sets, set_overlap
from .reference_data import COMMUTING_SETS_N1, SHARED_MONOMIALS_N2, GR42_EXPANSION, ring_expr
from .tomography import born_probabilities, redundancy_check

TOL = 1e-10


@dataclass
class Check:
    name: str
    violation: float
    tolerance: float = TOL

    @property
    def passed(self) -> bool:
        return bool(self.violation <= self.tolerance)

    def as_dict(self) -> dict:
        return {"max_violation": float(self.violation), "tolerance": self.tolerance, "pass": self.passed}


def expansion_mismatches() -> int:
    """Rows of the GR(4,2) expansion table not reproduced by the ring."""
    ring = ring_context(2, 2)
    bad = 0
    for (a1, a2), coords in GR42_EXPANSION:
        elem = ring_expr(ring, a1) + ring_expr(ring, a2) * 2
        digits = ring.two_adic(elem)
        expected = tuple(None if d == "0" else ring.two_adic(ring_expr(ring, d)).parts[0] for d in (a1, a2))
        if ring.coords(elem) != coords or digits.parts != expected:
            bad += 1
    return bad


def trace_rule_mismatches() -> int:
    """GF(4) ``tr(xi xi) = 1`` plus the GR(4,2) pair and triple trace rules."""
    bad = int(ring_context(1, 2).trace(ring_context(1, 2).xi ** 2) != 1)
    ring = ring_context(2, 2)
    xi = ring.xi
    for i, j in itertools.product((1, 2), repeat=2):
        bad += ring.trace(xi ** i * xi ** j) != (i == j) + 2
    for i, j, k in itertools.product((1, 2), repeat=3):
        bad += ring.trace(xi ** i * xi ** j * xi ** k) != (2 if i == j == k else 3)
    return int(bad)


def hensel_mismatches(max_n: int = 3) -> int:
    """Printed lifts plus trace compatibility ``T_(2q)(lift a) mod q = T_q(a)``."""
    bad = int(hensel_lift((1, 1, 1), 1) != (1, 1, 1))
    bad += int(hensel_lift((1, 1, 1), 2) != (1, 1, 1))
    bad += int(hensel_lift((1, 0, 1, 1), 1) != (3, 2, 3, 1))
    for s in (1, 2):
        for n in range(1, max_n + 1):
            ring = ring_context(s, n)
            up = lifted_context(ring)
            for a in ring.elements():
                bad += int(up.trace(lift_teichmuller(a, up)) % ring.q != ring.trace(a))
    return bad


def commuting_set_mismatches() -> int:
    sets = {s.label: s for s in commuting_sets(1)}
    bad = 0
    for kind, param, members in COMMUTING_SETS_N1:
        got = sets[f"{kind}:{param}"].positions() - {(0, 0)}
        bad += int(got != set(members))
    return bad


def shared_monomial_mismatches() -> int:
    ring = ring_context(2, 2)
    sets = {s.label: s for s in commuting_sets(2)}

    def key(kind, text):
        return f"{kind}:{','.join(str(c) for c in ring_expr(ring, text).coeffs)}"

    bad = 0
    for kind, params, shared in SHARED_MONOMIALS_N2:
        want = {(ring_expr(ring, g), ring_expr(ring, d)) for g, d in shared}
        row = [sets[key(kind, p)] for p in params]
        for a, b in itertools.combinations(row, 2):
            got = {(m.gamma, m.delta) for m in set_overlap(a, b)} - {(ring.zero, ring.zero)}
            bad += int(got != want)
    return bad


def fixture_report() -> list[dict]:
    return [
        {
            "fixture": r.key,
            "printed_set": r.printed_set,
            "eigenbasis_direct": r.eigen_sets_direct,
            "eigenbasis_conjugate": r.eigen_sets_conjugate,
            "matches_direct": r.matches_direct,
            "matches_conjugate": r.matches_conjugate,
        }
        for r in validate_fixtures()
    ]


def run_checks(n: int, seed: int = 0) -> tuple[list[Check], dict]:
    """Every conformance check for ``n`` ququarts; returns checks and extra report data."""
    checks = [
        Check("ring_expansion_rows", expansion_mismatches(), 0),
        Check("trace_rules", trace_rule_mismatches(), 0),
        Check("hensel_lift", hensel_mismatches(), 0),
        Check("commuting_sets_n1", commuting_set_mismatches(), 0),
        Check("shared_monomials_n2", shared_monomial_mismatches(), 0),
        Check("phase_equation", phase_equation_violation(n), 0),
    ]
    fam = family_build(n)
    rep = overlap_verify(fam)
    checks += [Check(f"overlap_{k}", v) for k, v in rep.as_dict().items()]
    checks += [Check(f"single_ququart_{k}", v) for k, v in single_ququart_laws().items()]
    if n <= 2:
        checks.append(Check("spectral_decomposition", spectral_violation(fam)))
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((fam.dim, fam.dim)) + 1j * rng.standard_normal((fam.dim, fam.dim))
    rho = g @ g.conj().T
    checks.append(Check("probability_relations", redundancy_check(born_probabilities(rho / np.trace(rho), fam))["max"]))
    fixtures = fixture_report()
    checks.append(Check("fixtures_match_family", sum(not (f["matches_direct"] or f["matches_conjugate"]) for f in fixtures), 0))
    return checks, {"fixtures": fixtures, "ring": fam.space.ring.describe()}
