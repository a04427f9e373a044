"""MU-like bases for N ququarts.

Ray bases ``|psi_k^lam> = V_lam |k>`` diagonalize ``{Z_g X_(lam g)}``; ideal
bases ``|psi~_k^mu> = F^-1 V_mu^dag |k>`` diagonalize ``{Z_(mu d) X_d}`` for
``mu`` in the ideal (2).  The phases ``c_(g,lam) = omega^(7 T_8(lam g^2))``
are evaluated in GR(8, N) after lifting ``g`` and ``lam`` digit by digit into
the Teichmuller-type representatives.

No global phase convention is imposed on basis columns; every comparison in
this module goes through squared overlaps or projectors.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import networkx as nx
import numpy as np

from .galois import RingContext, RingElem, lift_teichmuller, lifted_context
from .pauli import (
    IPOW,
    QuquartSpace,
    X4,
    commuting_sets,
    fourier_matrix,
    matrix_from_json,
    matrix_to_json,
    monomial_matrix,
    MonomialLabel,
    ququart_space,
)

OMEGA = (1 + 1j) / np.sqrt(2)
OMEGA_POW = OMEGA ** np.arange(8)
OMEGA_POW[[0, 2, 4, 6]] = [1, 1j, -1, -1j]


@dataclass(frozen=True)
class PhaseContext:
    """GR(4, N) together with its Hensel-lifted GR(8, N)."""

    space: QuquartSpace
    lifted: RingContext

    @cached_property
    def lifted_index(self) -> np.ndarray:
        """GR(8, N) index of the lift of the element at each position."""
        return np.array([lift_teichmuller(self.space.elem(p), self.lifted).index for p in range(self.space.dim)])

    @cached_property
    def exponents(self) -> np.ndarray:
        """``E[g, lam]`` with ``c_(g,lam) = omega^E``, ``E = 7 T_8(lam g^2) mod 8``."""
        ring = self.lifted
        g = self.lifted_index
        sq = ring.mul_many(g, g)
        prod = ring.mul_many(sq[:, None], g[None, :])
        e = (7 * ring.trace_table[prod]) % 8
        e.setflags(write=False)
        return e

    @property
    def omega(self) -> complex:
        return OMEGA


@lru_cache(maxsize=None)
def phase_context(n: int) -> PhaseContext:
    space = ququart_space(n)
    return PhaseContext(space, lifted_context(space.ring))


def phase_c(gamma: RingElem, lam: RingElem) -> complex:
    """``c_(gamma,lam) = omega^(7 T_8(lam gamma^2))``."""
    pc = phase_context(gamma.ctx.N)
    return complex(OMEGA_POW[pc.exponents[pc.space.pos(gamma), pc.space.pos(lam)]])


def phase_equation_violation(n: int) -> int:
    """Count of ``(a, g, lam)`` triples violating ``c_(a+g) c*_g = c_a i^(3T(a g lam))``.

    Works on integer exponents mod 8, so the check is exact.
    """
    pc = phase_context(n)
    sp = pc.space
    e = pc.exponents.astype(np.int64)
    bad = 0
    for lam in range(sp.dim):
        col = e[:, lam]
        lhs = (col[sp.add] - col[None, :]) % 8  # [a, g]
        tri = sp.trace[sp.mul[sp.mul, lam]]  # T(a g lam)
        rhs = (col[:, None] + 2 * 3 * tri) % 8
        bad += int(np.count_nonzero(lhs != rhs))
    return bad


def rotation_V(lam: RingElem) -> np.ndarray:
    """``V_lam = F diag(c_(beta,lam)) F^dag``, whose columns are ``|psi_k^lam>``."""
    pc = phase_context(lam.ctx.N)
    f = fourier_matrix(pc.space.n)
    c = OMEGA_POW[pc.exponents[:, pc.space.pos(lam)]]
    return (f * c[None, :]) @ f.conj().T


# ----------------------------------------------------------------------------
# Basis family
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SetupLabel:
    """Measurement setup: ``kind`` is 'ray' or 'ideal', ``pos`` the label's position."""

    kind: str
    pos: int
    elem: RingElem = field(compare=False)

    @property
    def text(self) -> str:
        return f"{self.kind}:{','.join(str(c) for c in self.elem.coeffs)}"


@dataclass(frozen=True, eq=False)
class BasisFamily:
    """All ``4^N + 2^N`` MU-like bases; ``matrices[s]`` holds basis ``s`` in its columns."""

    n: int
    space: QuquartSpace
    labels: tuple[SetupLabel, ...]
    matrices: np.ndarray

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def n_setups(self) -> int:
        return len(self.labels)

    @property
    def ray_bases(self) -> dict[RingElem, np.ndarray]:
        return {lab.elem: m for lab, m in zip(self.labels, self.matrices) if lab.kind == "ray"}

    @property
    def ideal_bases(self) -> dict[RingElem, np.ndarray]:
        return {lab.elem: m for lab, m in zip(self.labels, self.matrices) if lab.kind == "ideal"}

    def index(self, kind: str, elem: RingElem | int) -> int:
        pos = self.space.pos(elem)
        for i, lab in enumerate(self.labels):
            if lab.kind == kind and lab.pos == pos:
                return i
        raise KeyError(f"no {kind} setup for {elem!r}")

    @cached_property
    def is_ray(self) -> np.ndarray:
        return np.array([lab.kind == "ray" for lab in self.labels])

    @cached_property
    def group(self) -> np.ndarray:
        """Disjointness group of each setup: bar class for rays, ``2^N`` for ideal sets."""
        sp = self.space
        return np.array([sp.bar_class[lab.pos] if lab.kind == "ray" else 2 ** self.n for lab in self.labels])

    @cached_property
    def projectors(self) -> np.ndarray:
        """``P[s, k] = |u_k><u_k|`` for every setup ``s`` and outcome ``k``."""
        u = self.matrices
        return np.einsum("sik,sjk->skij", u, u.conj())


def _build_family(n: int) -> BasisFamily:
    space = ququart_space(n)
    pc = phase_context(n)
    f = fourier_matrix(n)
    labels, mats = [], []
    for p in range(space.dim):
        c = OMEGA_POW[pc.exponents[:, p]]
        labels.append(SetupLabel("ray", p, space.elem(p)))
        mats.append((f * c[None, :]) @ f.conj().T)
    for p in space.ideal:
        c = OMEGA_POW[pc.exponents[:, p]]
        v = (f * c[None, :]) @ f.conj().T
        labels.append(SetupLabel("ideal", int(p), space.elem(p)))
        mats.append(f.conj().T @ v.conj().T)
    matrices = np.array(mats)
    matrices.setflags(write=False)
    return BasisFamily(n, space, tuple(labels), matrices)


@lru_cache(maxsize=None)
def family_build(n: int) -> BasisFamily:
    """Construct (and cache) the MU-like basis family for ``n`` ququarts."""
    fam = _build_family(n)
    u = fam.matrices
    err = np.max(np.abs(np.einsum("sik,sil->skl", u.conj(), u) - np.eye(fam.dim)))
    if err > 1e-12:
        raise ArithmeticError(f"basis family for N={n} is not unitary (error {err:.2e})")
    return fam


def set_monomials(fam: BasisFamily, s: int) -> list[tuple[MonomialLabel, complex, np.ndarray]]:
    """Monomials of setup ``s`` with their predicted eigenvalues on the basis columns.

    ``Z_g X_(lam g) |psi_eta^lam> = c*_(g,lam) i^T(g eta) |psi_eta^lam>`` and the
    same with ``(mu d, d)`` for ideal setups.
    """
    sp = fam.space
    pc = phase_context(fam.n)
    lab = fam.labels[s]
    out = []
    for g in range(sp.dim):
        if lab.kind == "ray":
            m = MonomialLabel(sp.elem(g), sp.elem(sp.mul[lab.pos, g]))
        else:
            m = MonomialLabel(sp.elem(sp.mul[lab.pos, g]), sp.elem(g))
        c = OMEGA_POW[pc.exponents[g, lab.pos]]
        eig = np.conj(c) * IPOW[sp.trace[sp.mul[g]]]
        out.append((m, c, eig))
    return out


def spectral_violation(fam: BasisFamily) -> float:
    """Max deviation of ``M - c* sum_eta i^T(g eta) P_eta`` over every monomial of every set."""
    worst = 0.0
    for s in range(fam.n_setups):
        u = fam.matrices[s]
        for m, _, eig in set_monomials(fam, s):
            recon = (u * eig[None, :]) @ u.conj().T
            worst = max(worst, float(np.max(np.abs(recon - monomial_matrix(m)))))
    return worst


def family_to_json(fam: BasisFamily) -> str:
    """JSON object mapping ``ray:<coeffs>`` / ``ideal:<coeffs>`` to the basis matrix."""
    return json.dumps({lab.text: matrix_to_json(u) for lab, u in zip(fam.labels, fam.matrices)})


def family_from_json(text: str) -> dict[str, np.ndarray]:
    return {k: matrix_from_json(v) for k, v in json.loads(text).items()}


# ----------------------------------------------------------------------------
# Overlap laws and redundancy
# ----------------------------------------------------------------------------

def expected_overlaps(fam: BasisFamily, a: int, b: int) -> np.ndarray:
    """Predicted ``|<u^a_k | u^b_eta>|^2`` for every pair of outcomes."""
    sp, d, n = fam.space, fam.dim, fam.n
    la, lb = fam.labels[a], fam.labels[b]
    same_bar_outcome = (sp.bar[:, None] == sp.bar[None, :]).astype(float)
    if la == lb:
        return np.eye(d)
    if la.kind != lb.kind:
        return np.full((d, d), 1 / d)
    if la.kind == "ray" and sp.bar[la.pos] != sp.bar[lb.pos]:
        return np.full((d, d), 1 / d)
    return same_bar_outcome / 2 ** n


@dataclass
class OverlapReport:
    ray_ray: float
    ray_ideal: float
    ideal_ideal: float
    redundancy_ray: float
    redundancy_ideal: float

    @property
    def max_violation(self) -> float:
        return max(self.ray_ray, self.ray_ideal, self.ideal_ideal, self.redundancy_ray, self.redundancy_ideal)

    def as_dict(self) -> dict[str, float]:
        return {
            "ray_ray": self.ray_ray,
            "ray_ideal": self.ray_ideal,
            "ideal_ideal": self.ideal_ideal,
            "redundancy_ray": self.redundancy_ray,
            "redundancy_ideal": self.redundancy_ideal,
        }


def class_projectors(fam: BasisFamily) -> np.ndarray:
    """``Pi[s, c] = sum_(k in bar class c) P[s, k]``."""
    sp = fam.space
    out = np.zeros((fam.n_setups, 2 ** fam.n, fam.dim, fam.dim), dtype=complex)
    for c in range(2 ** fam.n):
        cols = np.flatnonzero(sp.bar_class == c)
        u = fam.matrices[:, :, cols]
        out[:, c] = np.einsum("sik,sjk->sij", u, u.conj())
    return out


def overlap_verify(fam: BasisFamily) -> OverlapReport:
    """Max violation of the three overlap laws and the projector redundancy identities."""
    u = fam.matrices
    worst = {"ray_ray": 0.0, "ray_ideal": 0.0, "ideal_ideal": 0.0}
    for a in range(fam.n_setups):
        gram = np.abs(np.einsum("ik,sil->skl", u[a].conj(), u)) ** 2
        for b in range(fam.n_setups):
            kinds = {fam.labels[a].kind, fam.labels[b].kind}
            key = "ray_ideal" if len(kinds) == 2 else f"{kinds.pop()}_" * 2
            key = key.rstrip("_")
            dev = float(np.max(np.abs(gram[b] - expected_overlaps(fam, a, b))))
            worst[key] = max(worst[key], dev)
    pi = class_projectors(fam)
    red = {"ray": 0.0, "ideal": 0.0}
    for s, lab in enumerate(fam.labels):
        if lab.kind == "ray":
            ref = fam.index("ray", int(fam.space.bar_rep[lab.pos]))
        else:
            ref = fam.index("ideal", 0)
        red[lab.kind] = max(red[lab.kind], float(np.max(np.abs(pi[s] - pi[ref]))))
    return OverlapReport(worst["ray_ray"], worst["ray_ideal"], worst["ideal_ideal"], red["ray"], red["ideal"])


# ----------------------------------------------------------------------------
# Censuses
# ----------------------------------------------------------------------------

def unbiased_graph(fam: BasisFamily, tol: float = 1e-10) -> nx.Graph:
    u = fam.matrices
    g = nx.Graph()
    g.add_nodes_from(range(fam.n_setups))
    for a in range(fam.n_setups):
        gram = np.abs(np.einsum("ik,sil->skl", u[a].conj(), u)) ** 2
        for b in range(a + 1, fam.n_setups):
            if np.max(np.abs(gram[b] - 1 / fam.dim)) <= tol:
                g.add_edge(a, b)
    return g


def mub_census(fam: BasisFamily) -> tuple[int, int]:
    """Size of the largest set of pairwise unbiased bases and how many such sets exist."""
    cliques = list(nx.find_cliques(unbiased_graph(fam)))
    size = max(len(c) for c in cliques)
    return size, sum(1 for c in cliques if len(c) == size)


def is_product_vector(v: np.ndarray, tol: float = 1e-8) -> bool:
    """True if ``v`` has Schmidt rank 1 across every (first k | rest) ququart cut."""
    d = v.shape[0]
    left = 4
    while left < d:
        sv = np.linalg.svd(v.reshape(left, d // left), compute_uv=False)
        if sv[1] > tol * sv[0]:
            return False
        left *= 4
    return True


def product_bases(fam: BasisFamily, tol: float = 1e-8) -> list[SetupLabel]:
    """Setups whose every basis vector is a product state."""
    return [
        lab for lab, u in zip(fam.labels, fam.matrices)
        if all(is_product_vector(u[:, k], tol) for k in range(fam.dim))
    ]


# ----------------------------------------------------------------------------
# Single-ququart fixtures
# ----------------------------------------------------------------------------

def fixtures_single_ququart() -> dict[str, np.ndarray]:
    """The six printed single-ququart bases, columns in the printed order.

    Keys are the printed headers: ``i``..``iv`` for ``Z^k X^(lk)``, ``l = 0..3``;
    ``v`` printed for ``Z^(2k) X^k`` and ``vi`` printed for ``X^k``.
    """
    w, wc = OMEGA, np.conj(OMEGA)
    p, m = 1 + 1j, 1 - 1j
    i = 1j
    cols = {
        "i": np.eye(4),
        "ii": [[w, 1, -w, 1], [1, w, 1, -w], [-w, 1, w, 1], [1, -w, 1, w]],
        "iii": [[p, 0, m, 0], [0, p, 0, m], [m, 0, p, 0], [0, m, 0, p]],
        "iv": [[-wc, 1, wc, 1], [1, -wc, 1, wc], [wc, 1, -wc, 1], [1, wc, 1, -wc]],
        "v": [[1, 1, 1, 1], [1, i, -1, -i], [1, -1, 1, -1], [1, -i, -1, i]],
        "vi": [[1, i, 1, i], [1, -1, -1, 1], [1, -i, 1, -i], [1, 1, -1, -1]],
    }
    out = {}
    for key, vecs in cols.items():
        if key == "i":
            out[key] = np.eye(4, dtype=complex)
        else:
            out[key] = np.array(vecs, dtype=complex).T / 2
    return out


FIXTURE_PRINTED_SET = {
    "i": ("ray", 0),
    "ii": ("ray", 1),
    "iii": ("ray", 2),
    "iv": ("ray", 3),
    "v": ("ideal", 2),
    "vi": ("ideal", 0),
}


def _eigenbasis_of(u: np.ndarray, mats: list[np.ndarray], tol: float = 1e-10) -> bool:
    for m in mats:
        mu = m @ u
        lam = np.einsum("ik,ik->k", u.conj(), mu)
        if np.max(np.abs(mu - u * lam[None, :])) > tol:
            return False
    return True


def same_basis_up_to_phases(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """True if the columns of ``a`` and ``b`` agree up to order and per-column phases."""
    ov = np.abs(a.conj().T @ b) ** 2
    return bool(np.all(np.abs(ov * (1 - ov)) <= tol) and np.allclose(ov.sum(0), 1) and np.allclose(ov.sum(1), 1))


@dataclass
class FixtureResult:
    key: str
    printed_set: str
    eigen_sets_direct: list[str]
    eigen_sets_conjugate: list[str]
    matches_direct: list[str]
    matches_conjugate: list[str]

    @property
    def consistent(self) -> bool:
        return bool(self.matches_direct or self.matches_conjugate)


def validate_fixtures() -> list[FixtureResult]:
    """Check each printed basis against the commuting sets and the built family.

    A fixture is reported as an eigenbasis of a set under the direct
    convention (``M v ~ v``) or the conjugate one (``conj(M) v ~ v``), and as
    matching a constructed basis directly or after complex conjugation.
    """
    fam = family_build(1)
    sets = commuting_sets(1)
    set_mats = {s.label: [monomial_matrix(m) for m in s.members] for s in sets}
    results = []
    for key, u in fixtures_single_ququart().items():
        kind, p = FIXTURE_PRINTED_SET[key]
        direct = [lab for lab, mats in set_mats.items() if _eigenbasis_of(u, mats)]
        conj = [lab for lab, mats in set_mats.items() if _eigenbasis_of(u, [m.conj() for m in mats])]
        m_direct = [lab.text for lab, v in zip(fam.labels, fam.matrices) if same_basis_up_to_phases(u, v)]
        m_conj = [lab.text for lab, v in zip(fam.labels, fam.matrices) if same_basis_up_to_phases(u.conj(), v)]
        results.append(FixtureResult(key, f"{kind}:{p}", direct, conj, m_direct, m_conj))
    return results


# ----------------------------------------------------------------------------
# CNOT_4
# ----------------------------------------------------------------------------

def cnot4() -> np.ndarray:
    """``sum_k |k~><k~| (x) X^k`` with ``|k~> = F_4^-1 |k>``; X acts on the second ququart."""
    f = fourier_matrix(1)
    out = np.zeros((16, 16), dtype=complex)
    for k in range(4):
        v = f.conj().T[:, k]
        out += np.kron(np.outer(v, v.conj()), np.linalg.matrix_power(X4, k))
    return out


@dataclass
class CnotRow:
    lam: str
    coords: tuple[int, ...]
    power: int
    local_after_removal: bool
    schmidt_rank_v: int
    schmidt_rank_cnot: int


def cnot4_check() -> list[CnotRow]:
    """Compare every ``V_lam`` at N=2 with ``CNOT_4^(l1+l2)``.

    ``local_after_removal`` says whether ``V_lam (CNOT_4^(l1+l2))^dag`` is a
    product operator; the operator Schmidt ranks of ``V_lam`` and of the CNOT
    power are also reported, being invariant under local unitaries on either
    side.
    """
    from .pauli import operator_schmidt_rank, is_product_operator

    sp = ququart_space(2)
    c = cnot4()
    rows = []
    for p in range(sp.dim):
        lam = sp.elem(p)
        coords = sp.ring.coords(lam)
        k = sum(coords) % 4
        v = rotation_V(lam)
        ck = np.linalg.matrix_power(c, k)
        rows.append(CnotRow(
            ",".join(str(x) for x in lam.coeffs), coords, k,
            is_product_operator(v @ ck.conj().T),
            operator_schmidt_rank(v), operator_schmidt_rank(ck),
        ))
    return rows


def single_ququart_laws() -> dict[str, float]:
    """Max deviation from the three printed single-ququart overlap laws."""
    fam = family_build(1)
    ray = {lab.pos: u for lab, u in zip(fam.labels, fam.matrices) if lab.kind == "ray"}
    ideal = {lab.pos: u for lab, u in zip(fam.labels, fam.matrices) if lab.kind == "ideal"}
    bar = np.arange(4) % 2
    out = {"ray_vs_ideal": 0.0, "ray_vs_ray": 0.0, "ideal_vs_ideal": 0.0}
    for l, u in ray.items():
        for m, v in ideal.items():
            out["ray_vs_ideal"] = max(out["ray_vs_ideal"], float(np.max(np.abs(np.abs(u.conj().T @ v) ** 2 - 0.25))))
    for l, lp in itertools.product(range(4), repeat=2):
        ov = np.abs(ray[l].conj().T @ ray[lp]) ** 2
        if l == lp:
            want = np.eye(4)
        elif l % 2 == lp % 2:
            want = (bar[:, None] == bar[None, :]) / 2
        else:
            want = np.full((4, 4), 0.25)
        out["ray_vs_ray"] = max(out["ray_vs_ray"], float(np.max(np.abs(ov - want))))
    ov = np.abs(ideal[0].conj().T @ ideal[2]) ** 2
    out["ideal_vs_ideal"] = float(np.max(np.abs(ov - (bar[:, None] == bar[None, :]) / 2)))
    return out


__all__ = [
    "OMEGA", "PhaseContext", "phase_context", "phase_c", "phase_equation_violation",
    "rotation_V", "SetupLabel", "BasisFamily", "family_build", "overlap_verify",
    "OverlapReport", "spectral_violation", "mub_census", "product_bases",
    "fixtures_single_ququart", "family_to_json", "family_from_json", "validate_fixtures", "cnot4", "cnot4_check",
    "single_ququart_laws", "class_projectors",
]
