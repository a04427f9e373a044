"""Complete sets of MUBs for n qubits, used as the comparison scheme.

Elements of GF(2^n) are placed at matrix positions through their
coordinates in a self-dual basis (first coordinate most significant), so the
Fourier operator is the plain tensor power of the 2x2 Hadamard.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .galois import RingContext, lift_teichmuller, lifted_context, ring_context

MAX_QUBITS = 4
IPOW = np.array([1, 1j, -1, -1j])


@dataclass(frozen=True, eq=False)
class QubitMubFamily:
    """``bases[l]`` for field element at position ``l``, then the Fourier basis last."""

    n: int
    field: RingContext
    ring_index: np.ndarray
    bases: np.ndarray

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @cached_property
    def trace(self) -> np.ndarray:
        """``tr(a b)`` for positions ``a, b``."""
        f = self.field
        r = self.ring_index
        return f.trace_table[f.mul_index(r[:, None], r[None, :])]

    def phases(self) -> np.ndarray:
        """``E[g, lam]`` with ``c_(g,lam) = i^E = i^(3 T_4(lam g^2))`` on lifted elements."""
        return _phase_exponents(self.n)


def _positions(field: RingContext) -> np.ndarray:
    """Field index of the element sitting at each matrix position."""
    basis = field.basis.elems
    out = []
    for p in range(2 ** field.N):
        bits = [(p >> (field.N - 1 - j)) & 1 for j in range(field.N)]
        acc = field.zero
        for b, th in zip(bits, basis):
            if b:
                acc = acc + th
        out.append(acc.index)
    return np.array(out)


@lru_cache(maxsize=None)
def _phase_exponents(n: int) -> np.ndarray:
    field = ring_context(1, n)
    ring4 = lifted_context(field)
    pos = _positions(field)
    lifted = np.array([lift_teichmuller(field[int(i)], ring4).index for i in pos])
    sq = ring4.mul_many(lifted, lifted)
    prod = ring4.mul_many(sq[:, None], lifted[None, :])
    return (3 * ring4.trace_table[prod]) % 4


@lru_cache(maxsize=None)
def qubit_mub_build(n: int) -> QubitMubFamily:
    """The ``2^n + 1`` mutually unbiased bases for ``n`` qubits."""
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
    field = ring_context(1, n)
    pos = _positions(field)
    d = 2 ** n
    tr = field.trace_table[field.mul_index(pos[:, None], pos[None, :])]
    f = (-1.0) ** tr / np.sqrt(d)
    e = _phase_exponents(n)
    bases = [(f * IPOW[e[:, lam]][None, :]) @ f.T for lam in range(d)]
    bases.append(f.astype(complex))
    arr = np.array(bases)
    arr.setflags(write=False)
    return QubitMubFamily(n, field, pos, arr)


def qubit_phase_violation(n: int) -> int:
    """Triples violating ``c_(a+g) = c_a c_g (-1)^tr(a g lam)``."""
    fam = qubit_mub_build(n)
    field, pos = fam.field, fam.ring_index
    d = fam.dim
    where = {int(i): p for p, i in enumerate(pos)}
    add = np.array([[where[int(field.add_index(pos[a], pos[b]))] for b in range(d)] for a in range(d)])
    mul = np.array([[where[int(field.mul_index(pos[a], pos[b]))] for b in range(d)] for a in range(d)])
    e = fam.phases()
    bad = 0
    for lam in range(d):
        col = e[:, lam]
        lhs = col[add]
        rhs = (col[:, None] + col[None, :] + 2 * fam.trace[mul, lam]) % 4
        bad += int(np.count_nonzero(lhs != rhs))
    return bad


def qubit_probabilities(rho, fam: QubitMubFamily | None = None) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    fam = fam or qubit_mub_build(int(np.log2(rho.shape[0])))
    u = fam.bases
    return np.einsum("sik,ij,sjk->sk", u.conj(), rho, u).real


def qubit_reconstruct(probs, fam: QubitMubFamily) -> np.ndarray:
    """``rho = sum p |psi><psi| - I`` over all ``d + 1`` bases."""
    p = np.asarray(probs, dtype=float)
    if p.shape != (fam.dim + 1, fam.dim):
        raise ValueError(f"expected a ({fam.dim + 1}, {fam.dim}) probability table")
    if np.max(np.abs(p.sum(axis=1) - 1)) > 1e-9:
        raise ValueError("each basis must sum to 1")
    u = fam.bases
    return np.einsum("sik,sk,sjk->ij", u, p, u.conj()) - np.eye(fam.dim)


def qubit_mse_bound(rho) -> float:
    """``d + 1 - sum p^2`` over all outcomes of all ``d + 1`` bases."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    n = int(round(np.log2(d)))
    if 2 ** n != d:
        raise ValueError("state dimension must be a power of two")
    p = qubit_probabilities(rho, qubit_mub_build(n))
    return float(d + 1 - np.sum(p * p))
