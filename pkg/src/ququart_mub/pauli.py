"""Generalized Pauli monomials for N ququarts labelled by GR(4, N).

Matrices act on C^(4^N).  Row/column ``p`` is the computational state
``|k_1> (x) ... (x) |k_N>`` whose digits ``k_j = T(kappa theta*_j)`` are the
coordinates of the ring element ``kappa`` in the working basis (``k_1`` most
significant, matching ``np.kron``).  Monomials are always ``Z_gamma X_delta``
with ``Z`` on the left.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache, reduce

import networkx as nx
import numpy as np

from .galois import RingContext, RingElem, RingError, ring_context

IPOW = np.array([1, 1j, -1, -1j])

UNITARY_TOL = 1e-12
MATRIX_TOL = 1e-10


class QuquartSpace:
    """GR(4, N) laid out along the computational basis of ``n`` ququarts.

    All tables are indexed by computational-basis position rather than by
    ring index, so ``add[p, q]`` is the position of ``kappa_p + kappa_q``.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"number of ququarts must be >= 1, got {n}")
        self.n = n
        self.dim = 4 ** n
        self.ring: RingContext = ring_context(2, n)
        ring = self.ring
        pos = np.arange(self.dim)
        digits = (pos[:, None] // 4 ** np.arange(n - 1, -1, -1)[None, :]) % 4
        basis_idx = np.array([e.index for e in ring.basis])
        # kappa = sum_j k_j theta_j, accumulated in ring indices
        acc = np.zeros(self.dim, dtype=np.int64)
        for j in range(n):
            scaled = np.array([ring.scale_index(basis_idx[j], int(k)) for k in range(4)])
            acc = ring.add_index(acc, scaled[digits[:, j]])
        self.ring_index = acc
        self.position = np.empty(ring.order, dtype=np.int64)
        self.position[acc] = pos
        if not np.array_equal(np.sort(acc), pos):
            raise RingError("working basis does not span the ring")
        r = self.ring_index
        self.add = self.position[ring.add_index(r[:, None], r[None, :])]
        self.neg = self.position[ring.neg_index(r)]
        self.mul = self.position[ring.mul_index(r[:, None], r[None, :])]
        self.trace = ring.trace_table[r]
        self.bar = ring.bar_index(r)
        self.is_ideal = self.bar == 0
        self.ideal = pos[self.is_ideal]
        self.teich = self.position[[t.index for t in ring.teichmuller()]]
        # bar_class[p]: index into self.teich of p's bar class
        teich_bars = ring.bar_index(self.ring_index[self.teich])
        order = np.empty(1 << n, dtype=np.int64)
        order[teich_bars] = np.arange(1 << n)
        self.bar_class = order[self.bar]
        self.bar_rep = self.teich[self.bar_class]
        for arr in (self.add, self.neg, self.mul, self.trace, self.bar, self.bar_class, self.bar_rep):
            arr.setflags(write=False)

    def elem(self, p: int) -> RingElem:
        return self.ring[int(self.ring_index[p])]

    def pos(self, a: RingElem | int) -> int:
        if isinstance(a, RingElem):
            if a.ctx != self.ring:
                raise RingError(f"element of {a.ctx.name} used with {self.ring.name}")
            return int(self.position[a.index])
        return int(a)

    def elements(self) -> list[RingElem]:
        return [self.elem(p) for p in range(self.dim)]

    def label(self, p: int) -> str:
        return "(" + ",".join(str(c) for c in self.elem(p).coeffs) + ")"

    @cached_property
    def coord_digits(self) -> np.ndarray:
        pos = np.arange(self.dim)
        return (pos[:, None] // 4 ** np.arange(self.n - 1, -1, -1)[None, :]) % 4


@lru_cache(maxsize=None)
def ququart_space(n: int) -> QuquartSpace:
    return QuquartSpace(n)


def _space_of(a: RingElem) -> QuquartSpace:
    ring = a.ctx
    if ring.s != 2:
        raise RingError(f"Pauli labels live in GR(4,N), got {ring.name}")
    space = ququart_space(ring.N)
    if space.ring != ring:
        raise RingError(f"{ring!r} is not the default GR(4,{ring.N})")
    return space


@dataclass(frozen=True)
class MonomialLabel:
    """Index pair naming ``Z_gamma X_delta``."""

    gamma: RingElem
    delta: RingElem

    def __post_init__(self):
        if self.gamma.ctx != self.delta.ctx:
            raise RingError("gamma and delta must come from the same ring")

    def __repr__(self) -> str:
        return f"Z{self.gamma.coeffs}X{self.delta.coeffs}"


# ----------------------------------------------------------------------------
# Single-ququart building blocks
# ----------------------------------------------------------------------------

Z4 = np.diag(IPOW).astype(complex)
X4 = np.roll(np.eye(4, dtype=complex), 1, axis=0)
F4 = np.array([[IPOW[(j * k) % 4] for k in range(4)] for j in range(4)]) / 2


def _kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats)


# ----------------------------------------------------------------------------
# Operators
# ----------------------------------------------------------------------------

def z_phases(space: QuquartSpace, g: int) -> np.ndarray:
    """Exponents ``T(gamma kappa) mod 4`` along the diagonal of ``Z_gamma``."""
    return space.trace[space.mul[g]]


def z_matrix(gamma: RingElem) -> np.ndarray:
    """``Z_gamma = sum_kappa i^T(gamma kappa) |kappa><kappa|``."""
    space = _space_of(gamma)
    return np.diag(IPOW[z_phases(space, space.pos(gamma))])


def z_matrix_tensor(gamma: RingElem) -> np.ndarray:
    """``Z^g_1 (x) ... (x) Z^g_N`` with ``g_j = T(gamma theta_j)``."""
    ring = gamma.ctx
    g = [ring.trace(gamma * theta) for theta in ring.basis]
    return _kron_all([np.linalg.matrix_power(Z4, k) for k in g])


def x_matrix(delta: RingElem) -> np.ndarray:
    """``X_delta = sum_kappa |kappa + delta><kappa|``."""
    space = _space_of(delta)
    d = space.pos(delta)
    out = np.zeros((space.dim, space.dim), dtype=complex)
    cols = np.arange(space.dim)
    out[space.add[cols, d], cols] = 1
    return out


def x_matrix_tensor(delta: RingElem) -> np.ndarray:
    """``X^d_1 (x) ... (x) X^d_N`` with ``d_j = T(delta theta*_j)``."""
    ring = delta.ctx
    d = ring.coords(delta)
    return _kron_all([np.linalg.matrix_power(X4, k) for k in d])


def monomial_matrix(label: MonomialLabel) -> np.ndarray:
    """``Z_gamma X_delta`` as a dense matrix."""
    space = _space_of(label.gamma)
    g, d = space.pos(label.gamma), space.pos(label.delta)
    out = np.zeros((space.dim, space.dim), dtype=complex)
    cols = np.arange(space.dim)
    rows = space.add[cols, d]
    out[rows, cols] = IPOW[space.trace[space.mul[g, rows]]]
    return out


def commutation_phase(a: MonomialLabel, b: MonomialLabel) -> int:
    """Exponent ``e`` with ``M_a M_b = i^e M_b M_a``: ``T(delta' gamma) - T(delta gamma')``."""
    ring = a.gamma.ctx
    return (ring.trace(b.delta * a.gamma) - ring.trace(a.delta * b.gamma)) % 4


def fourier_matrix(n: int) -> np.ndarray:
    """``F = 2^-N sum i^T(alpha beta) |alpha><beta|``."""
    space = ququart_space(n)
    return IPOW[space.trace[space.mul]] / 2 ** n


def fourier_tensor(n: int) -> np.ndarray:
    return _kron_all([F4] * n)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def operator_schmidt_rank(op: np.ndarray, split: int = 4, tol: float = 1e-8) -> int:
    """Rank of ``op`` across the cut (first ququart | rest) after realignment."""
    d = op.shape[0]
    rest = d // split
    t = op.reshape(split, rest, split, rest).transpose(0, 2, 1, 3).reshape(split * split, rest * rest)
    sv = np.linalg.svd(t, compute_uv=False)
    return int(np.sum(sv > tol * sv[0]))


def is_product_operator(op: np.ndarray, tol: float = 1e-8) -> bool:
    """True if ``op`` factorizes as a tensor product over every ququart."""
    d = op.shape[0]
    n = round(np.log(d) / np.log(4))
    for k in range(1, n):
        left = 4 ** k
        right = d // left
        t = op.reshape(left, right, left, right).transpose(0, 2, 1, 3).reshape(left * left, right * right)
        sv = np.linalg.svd(t, compute_uv=False)
        if np.sum(sv > tol * sv[0]) != 1:
            return False
    return True


# ----------------------------------------------------------------------------
# Commuting sets
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CommutingSet:
    """``RAY(lambda) = {Z_g X_(lambda g)}`` or ``IDEAL(mu) = {Z_(mu d) X_d}``, mu in (2)."""

    kind: str
    param: RingElem
    members: tuple[MonomialLabel, ...]

    @property
    def label(self) -> str:
        return f"{self.kind}:{','.join(str(c) for c in self.param.coeffs)}"

    def positions(self) -> set[tuple[int, int]]:
        space = _space_of(self.param)
        return {(space.pos(m.gamma), space.pos(m.delta)) for m in self.members}


def ray_set(lam: RingElem) -> CommutingSet:
    members = tuple(MonomialLabel(g, lam * g) for g in _space_of(lam).elements())
    return CommutingSet("ray", lam, members)


def ideal_set(mu: RingElem) -> CommutingSet:
    space = _space_of(mu)
    if not space.is_ideal[space.pos(mu)]:
        raise RingError(f"{mu!r} is not in the ideal (2)")
    members = tuple(MonomialLabel(mu * d, d) for d in space.elements())
    return CommutingSet("ideal", mu, members)


def commuting_sets(n: int) -> list[CommutingSet]:
    """All ``4^N + 2^N`` commuting sets: rays in position order, then ideal sets."""
    space = ququart_space(n)
    out = [ray_set(space.elem(p)) for p in range(space.dim)]
    out += [ideal_set(space.elem(p)) for p in space.ideal]
    return out


def set_overlap(a: CommutingSet, b: CommutingSet) -> list[MonomialLabel]:
    """Monomials shared by two commuting sets (identity included)."""
    space = _space_of(a.param)
    shared = a.positions() & b.positions()
    return [MonomialLabel(space.elem(g), space.elem(d)) for g, d in sorted(shared)]


def expected_overlap(a: CommutingSet, b: CommutingSet) -> set[tuple[int, int]]:
    """Shared monomials predicted from the set labels alone.

    Two rays with the same bar share ``{Z_g X_(bar(lambda) g) : g in (2)}``;
    two ideal sets share ``{X_d : d in (2)}``; any other pair shares only
    the identity.
    """
    space = _space_of(a.param)
    la, lb = space.pos(a.param), space.pos(b.param)
    if a.kind == b.kind == "ray" and space.bar[la] == space.bar[lb]:
        rep = space.bar_rep[la]
        return {(int(g), int(space.mul[rep, g])) for g in space.ideal}
    if a.kind == b.kind == "ideal":
        return {(0, int(d)) for d in space.ideal}
    return {(0, 0)}


def disjointness_graph(sets: list[CommutingSet]) -> nx.Graph:
    """Graph with an edge between sets sharing nothing but the identity."""
    g = nx.Graph()
    g.add_nodes_from(range(len(sets)))
    pos = [s.positions() for s in sets]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if pos[i] & pos[j] == {(0, 0)}:
                g.add_edge(i, j)
    return g


def max_disjoint_selection(sets: list[CommutingSet]) -> int:
    """Largest number of pairwise disjoint commuting sets."""
    g = disjointness_graph(sets)
    return max(len(c) for c in nx.find_cliques(g))


# ----------------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------------

def matrix_to_json(m: np.ndarray) -> list:
    """Row-major nested list of ``[re, im]`` pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("expected rows of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]
