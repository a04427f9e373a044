"""Exact arithmetic in GF(2^N) and the Galois rings GR(2^s, N), s <= 3.

Elements are stored in the additive representation
``a_1 + a_2 xi + ... + a_N xi^(N-1)`` where ``xi`` is a root of the defining
polynomial.  The canonical integer index of an element reads the coefficient
vector as a base-``2^s`` number, ``index = sum a_i (2^s)^(i-1)``.

A :class:`RingContext` is immutable once built; trace, bar-map and
Teichmuller lookups are precomputed so matrix construction downstream is
table driven.

Note on the defining polynomial: a basic primitive polynomial is required to
have a root with ``xi^(2^N - 1) = 1``, which is what makes the Teichmuller
set ``{0, 1, xi, ..., xi^(2^N - 2)}`` closed under multiplication.  (A
polynomial dividing ``x^(2^N) - 1`` would not give this.)  This condition is
what :func:`ring_context` enforces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

# Primitive polynomials over Z_2, low-order coefficient first.  N=3 uses
# x^3 + x^2 + 1 whose Z_4 lift is x^3 + 3x^2 + 2x + 3.
PRIMITIVE_POLYS: dict[int, tuple[int, ...]] = {
    1: (1, 1),
    2: (1, 1, 1),
    3: (1, 0, 1, 1),
    4: (1, 1, 0, 0, 1),
    5: (1, 0, 1, 0, 0, 1),
    6: (1, 1, 0, 0, 0, 0, 1),
    7: (1, 1, 0, 0, 0, 0, 0, 1),
    8: (1, 0, 1, 1, 1, 0, 0, 0, 1),
}

MAX_S = 3
_MUL_TABLE_LIMIT = 1024
_EXHAUSTIVE_SEARCH_BITS = 6
_SEARCH_BUDGET = 200_000


class RingError(ValueError):
    """Invalid ring description or operation across incompatible rings."""


# ----------------------------------------------------------------------------
# Polynomial helpers (coefficient lists, low order first)
# ----------------------------------------------------------------------------

def _trim(p: list[int]) -> list[int]:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(a: Sequence[int], b: Sequence[int], mod: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % mod
    return _trim(out)


def _poly_rem(a: Sequence[int], m: Sequence[int], mod: int) -> list[int]:
    """Remainder of ``a`` by the monic polynomial ``m`` over Z_mod."""
    a = [x % mod for x in a]
    n = len(m) - 1
    for k in range(len(a) - 1, n - 1, -1):
        c = a[k]
        if c:
            for j in range(n + 1):
                a[k - n + j] = (a[k - n + j] - c * m[j]) % mod
    return _trim(a[:n] if n > 0 else [0])


def _poly_powmod(base: Sequence[int], e: int, m: Sequence[int], mod: int) -> list[int]:
    result = [1]
    b = _poly_rem(base, m, mod)
    while e:
        if e & 1:
            result = _poly_rem(_poly_mul(result, b, mod), m, mod)
        b = _poly_rem(_poly_mul(b, b, mod), m, mod)
        e >>= 1
    return result


def is_irreducible_gf2(poly: Sequence[int]) -> bool:
    """Irreducibility over Z_2 by trial division with every lower-degree poly."""
    p = [c % 2 for c in poly]
    p = _trim(p)
    deg = len(p) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for bits in range(1 << d):
            cand = [(bits >> i) & 1 for i in range(d)] + [1]
            if _poly_rem(p, cand, 2) == [0]:
                return False
    return True


def _prime_factors(n: int) -> list[int]:
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def is_primitive_gf2(poly: Sequence[int]) -> bool:
    """True if ``poly`` is irreducible over Z_2 and x has order 2^deg - 1."""
    if not is_irreducible_gf2(poly):
        return False
    deg = len(_trim([c % 2 for c in poly])) - 1
    order = (1 << deg) - 1
    if order == 1:
        return True
    m = [c % 2 for c in poly]
    for r in _prime_factors(order):
        if _poly_powmod([0, 1], order // r, m, 2) == [1]:
            return False
    return True


def hensel_lift(poly: Sequence[int], s: int) -> tuple[int, ...]:
    """Lift a basic irreducible polynomial from Z_{2^s}[x] to Z_{2^(s+1)}[x].

    Uses the Graeffe step ``g(x^2) = (-1)^N f(x) f(-x)``: the roots of ``g``
    are the squares of the roots of ``f``, and for a Teichmuller root set the
    squaring map permutes the roots, so ``g`` is the unique monic lift.

    Parameters
    ----------
    poly : sequence of int
        Monic polynomial over Z_{2^s}, low-order coefficient first.
    s : int
        Current exponent of the coefficient ring.

    Returns
    -------
    tuple of int
        The lifted polynomial over Z_{2^(s+1)}.
    """
    q, q1 = 1 << s, 1 << (s + 1)
    f = [int(c) % q for c in poly]
    n = len(f) - 1
    if n < 1 or f[-1] != 1:
        raise RingError(f"hensel_lift needs a monic polynomial of degree >= 1, got {list(poly)}")
    if not is_irreducible_gf2(f):
        raise RingError(f"bar map of {list(poly)} is reducible over Z_2")
    f_neg = [c if i % 2 == 0 else -c for i, c in enumerate(f)]
    prod = [0] * (2 * n + 1)
    for i, a in enumerate(f):
        for j, b in enumerate(f_neg):
            prod[i + j] += a * b
    sign = -1 if n % 2 else 1
    if any(prod[k] % q1 for k in range(1, 2 * n + 1, 2)):
        raise RingError("Graeffe product has odd-degree terms")
    g = tuple((sign * prod[2 * k]) % q1 for k in range(n + 1))
    if g[-1] != 1 or any((a - b) % q for a, b in zip(g, f)):
        raise RingError(f"lift verification failed for {list(poly)}")
    if _poly_powmod([0, 1], (1 << n) - 1, g, q1) != [1]:
        raise RingError(f"root of lifted polynomial {list(g)} is not Teichmuller")
    return g


# ----------------------------------------------------------------------------
# Ring elements
# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RingElem:
    """One element of a :class:`RingContext`, identified by canonical index."""

    ctx: "RingContext"
    index: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.ctx.coeff_table[self.index])

    def _check(self, other: "RingElem") -> None:
        if not isinstance(other, RingElem):
            raise TypeError(f"expected RingElem, got {type(other).__name__}")
        if other.ctx != self.ctx:
            raise RingError(f"elements of {self.ctx.name} and {other.ctx.name} cannot be mixed")

    def __add__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return RingElem(self.ctx, int(self.ctx.add_index(self.index, other.index)))

    def __sub__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return RingElem(self.ctx, int(self.ctx.add_index(self.index, self.ctx.neg_index(other.index))))

    def __neg__(self) -> "RingElem":
        return RingElem(self.ctx, int(self.ctx.neg_index(self.index)))

    def __mul__(self, other: "RingElem | int") -> "RingElem":
        if isinstance(other, (int, np.integer)):
            return RingElem(self.ctx, int(self.ctx.scale_index(self.index, int(other))))
        self._check(other)
        return RingElem(self.ctx, int(self.ctx.mul_index(self.index, other.index)))

    def __rmul__(self, other: int) -> "RingElem":
        return self.__mul__(other)

    def __pow__(self, e: int) -> "RingElem":
        if e < 0:
            raise RingError("negative powers are not supported")
        result, base = self.ctx.one.index, self.index
        while e:
            if e & 1:
                result = int(self.ctx.mul_index(result, base))
            base = int(self.ctx.mul_index(base, base))
            e >>= 1
        return RingElem(self.ctx, result)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RingElem) and other.ctx == self.ctx and other.index == self.index

    def __hash__(self) -> int:
        return hash((self.ctx.key, self.index))

    def __repr__(self) -> str:
        return f"{self.ctx.name}{self.coeffs}"

    def is_zero(self) -> bool:
        return self.index == 0

    def is_unit(self) -> bool:
        return bool(self.ctx.bar_index(self.index))


@dataclass(frozen=True)
class TwoAdic:
    """2-adic digits ``alpha = a_1 + 2 a_2 + ... + 2^(s-1) a_s``.

    Each digit is a Teichmuller element given by its exponent ``k`` (meaning
    ``xi^k``) or ``None`` for zero.
    """

    parts: tuple[int | None, ...]

    def is_unit(self) -> bool:
        return self.parts[0] is not None


@dataclass(frozen=True)
class RingBasis:
    """A Z_{2^s}-basis of the ring; ``kind`` is 'plain', 'dual-pair' or 'self-dual'."""

    elems: tuple[RingElem, ...]
    kind: str = "plain"
    partner: "RingBasis | None" = field(default=None, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.elems)

    def __iter__(self):
        return iter(self.elems)

    def __getitem__(self, i: int) -> RingElem:
        return self.elems[i]


# ----------------------------------------------------------------------------
# Ring context
# ----------------------------------------------------------------------------

class RingContext:
    """GF(2^N) (``s = 1``) or the Galois ring GR(2^s, N).

    Parameters
    ----------
    s : int
        Characteristic exponent, ``1 <= s <= 3``.
    N : int
        Extension degree.
    poly : sequence of int, optional
        Monic defining polynomial over Z_{2^s}, low-order first.  Defaults to
        the Hensel lift of the built-in primitive polynomial over Z_2.
    """

    def __init__(self, s: int, N: int, poly: Sequence[int] | None = None):
        if not (isinstance(s, (int, np.integer)) and 1 <= s <= MAX_S):
            raise RingError(f"s must be in [1, {MAX_S}], got {s}")
        if not (isinstance(N, (int, np.integer)) and N >= 1):
            raise RingError(f"N must be a positive integer, got {N}")
        self.s, self.N = int(s), int(N)
        self.q = 1 << self.s
        if poly is None:
            poly = default_poly(self.s, self.N)
        poly = tuple(int(c) for c in poly)
        if len(poly) != self.N + 1:
            raise RingError(f"polynomial {list(poly)} does not have degree {N}")
        if poly[-1] != 1 or any(not 0 <= c < self.q for c in poly):
            raise RingError(f"polynomial {list(poly)} is not monic with coefficients in [0, {self.q})")
        if not is_irreducible_gf2(poly):
            raise RingError(f"bar map of {list(poly)} is reducible over Z_2")
        if _poly_powmod([0, 1], (1 << self.N) - 1, poly, self.q) != [1]:
            raise RingError(f"root of {list(poly)} fails xi^(2^N-1) = 1")
        if not is_primitive_gf2(poly):
            raise RingError(f"root of {list(poly)} does not generate the Teichmuller group")
        self.poly = poly
        self.order = self.q ** self.N
        self.key = (self.s, self.N, self.poly)
        self.name = f"GF(2^{self.N})" if self.s == 1 else f"GR({self.q},{self.N})"

        self._place = self.q ** np.arange(self.N)
        self.coeff_table = self._index_to_coeffs(np.arange(self.order))
        self.coeff_table.setflags(write=False)
        # reduction of x^k, k < 2N-1, to the additive representation
        red = np.zeros((2 * self.N - 1, self.N), dtype=np.int64)
        for k in range(2 * self.N - 1):
            r = _poly_rem([0] * k + [1], list(self.poly), self.q)
            red[k, : len(r)] = r
        self._reduce = red
        conv = np.zeros((self.N, self.N, 2 * self.N - 1), dtype=np.int64)
        for i in range(self.N):
            for j in range(self.N):
                conv[i, j, i + j] = 1
        self._conv = conv

        if self.order <= _MUL_TABLE_LIMIT:
            idx = np.arange(self.order)
            self._mul_table = self.mul_many(idx[:, None], idx[None, :])
            self._mul_table.setflags(write=False)
        else:
            self._mul_table = None

        self._build_teichmuller()
        self._build_trace()

    # -- identity ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RingContext) and other.key == self.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"RingContext({self.name}, poly={list(self.poly)})"

    # -- index <-> coefficients -------------------------------------------

    def _index_to_coeffs(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return (idx[..., None] // self._place) % self.q

    def _coeffs_to_index(self, coeffs: np.ndarray) -> np.ndarray:
        return (np.asarray(coeffs, dtype=np.int64) % self.q) @ self._place

    def elem(self, coeffs: Iterable[int] | int) -> RingElem:
        """Element from a coefficient sequence, or an integer of Z_{2^s}."""
        if isinstance(coeffs, (int, np.integer)):
            coeffs = [int(coeffs)] + [0] * (self.N - 1)
        coeffs = list(coeffs)
        if len(coeffs) != self.N:
            raise RingError(f"{self.name} elements need {self.N} coefficients, got {len(coeffs)}")
        return RingElem(self, int(self._coeffs_to_index(coeffs)))

    def __getitem__(self, index: int) -> RingElem:
        if not 0 <= index < self.order:
            raise IndexError(index)
        return RingElem(self, int(index))

    def elements(self) -> list[RingElem]:
        return [RingElem(self, i) for i in range(self.order)]

    @property
    def zero(self) -> RingElem:
        return RingElem(self, 0)

    @property
    def one(self) -> RingElem:
        return self.elem(1)

    @property
    def xi(self) -> RingElem:
        """The root of the defining polynomial."""
        if self.N == 1:
            return self.elem((-self.poly[0]) % self.q)
        return self.elem([0, 1] + [0] * (self.N - 2))

    # -- vectorised arithmetic on indices ---------------------------------

    def add_index(self, a, b):
        ca, cb = self._index_to_coeffs(a), self._index_to_coeffs(b)
        return self._coeffs_to_index(ca + cb)

    def neg_index(self, a):
        return self._coeffs_to_index(-self._index_to_coeffs(a))

    def scale_index(self, a, k: int):
        return self._coeffs_to_index(k * self._index_to_coeffs(a))

    def mul_many(self, a, b) -> np.ndarray:
        ca, cb = np.broadcast_arrays(self._index_to_coeffs(a), self._index_to_coeffs(b))
        prod = np.einsum("...i,...j,ijk->...k", ca, cb, self._conv)
        return self._coeffs_to_index((prod % self.q) @ self._reduce)

    def mul_index(self, a, b):
        if self._mul_table is not None:
            return self._mul_table[a, b]
        return self.mul_many(a, b)

    @property
    def mul_table(self) -> np.ndarray:
        if self._mul_table is None:
            raise RingError(f"{self.name} is too large for a full multiplication table")
        return self._mul_table

    # -- Frobenius, trace --------------------------------------------------

    def _power_index(self, k: int) -> int:
        return (self.xi ** k).index

    def frobenius_index(self, a, times: int = 1):
        """Apply ``phi^times`` by substituting ``xi -> xi^(2^times)``."""
        times %= self.N
        images = np.array(
            [self._power_index(j * (1 << times)) for j in range(self.N)], dtype=np.int64
        )
        image_coeffs = self._index_to_coeffs(images)
        return self._coeffs_to_index(self._index_to_coeffs(a) @ image_coeffs)

    def frobenius(self, a: RingElem, times: int = 1) -> RingElem:
        return RingElem(self, int(self.frobenius_index(a.index, times)))

    def _build_trace(self) -> None:
        basis_traces = []
        for j in range(self.N):
            acc = np.zeros(self.N, dtype=np.int64)
            for i in range(self.N):
                acc = acc + self._index_to_coeffs(self._power_index(j * (1 << i)))
            acc %= self.q
            if np.any(acc[1:]):
                raise RingError(f"trace of xi^{j} is not in Z_{self.q}")
            basis_traces.append(int(acc[0]))
        self._trace_of_power = np.array(basis_traces, dtype=np.int64)
        self.trace_table = (self.coeff_table @ self._trace_of_power) % self.q
        self.trace_table.setflags(write=False)

    def trace(self, a: RingElem) -> int:
        """Generalized trace ``T(a) = sum_i phi^i(a)`` as an integer mod 2^s."""
        self._same(a)
        return int(self.trace_table[a.index])

    def trace_index(self, a):
        return self.trace_table[a]

    def trace_direct(self, a: RingElem) -> int:
        """Trace summed from Frobenius images (slow path, no table)."""
        acc = self.zero
        for i in range(self.N):
            acc = acc + self.frobenius(a, i)
        c = acc.coeffs
        if any(c[1:]):
            raise RingError("trace left Z_{2^s}")
        return c[0]

    # -- bar map, Teichmuller, 2-adic -------------------------------------

    def bar_index(self, a):
        """Index of the bar image in GF(2^N) (coefficients mod 2)."""
        c = self._index_to_coeffs(a) % 2
        return c @ (1 << np.arange(self.N))

    @cached_property
    def field(self) -> "RingContext":
        """The residue field GF(2^N) built from the bar of the polynomial."""
        if self.s == 1:
            return self
        return ring_context(1, self.N, tuple(c % 2 for c in self.poly))

    def bar(self, a: RingElem) -> RingElem:
        self._same(a)
        return RingElem(self.field, int(self.bar_index(a.index)))

    def _build_teichmuller(self) -> None:
        size = (1 << self.N) - 1
        exps, cur = [], self.one.index
        xi = self.xi.index
        for _ in range(size):
            exps.append(cur)
            cur = int(self.mul_index(cur, xi))
        if cur != self.one.index:
            raise RingError("xi^(2^N-1) != 1")
        self.teichmuller_exps = np.array(exps, dtype=np.int64)  # xi^k -> index
        teich = [0] + exps
        by_bar = np.full(1 << self.N, -1, dtype=np.int64)
        for t in teich:
            by_bar[self.bar_index(t)] = t
        if np.any(by_bar < 0):
            raise RingError("Teichmuller set does not cover the residue field")
        self.teich_by_bar = by_bar
        self.exp_of_teich = {int(t): k for k, t in enumerate(exps)}

    def teichmuller(self) -> list[RingElem]:
        """``[0, 1, xi, ..., xi^(2^N - 2)]``."""
        return [self.zero] + [RingElem(self, int(t)) for t in self.teichmuller_exps]

    def teich_rep_index(self, a):
        """Index of the Teichmuller element in the bar class of ``a``."""
        return self.teich_by_bar[self.bar_index(a)]

    def two_adic(self, a: RingElem) -> TwoAdic:
        """Decompose ``a = a_1 + 2 a_2 + ...`` with Teichmuller digits."""
        self._same(a)
        rem = self._index_to_coeffs(a.index).astype(np.int64)
        parts: list[int | None] = []
        for level in range(self.s):
            digit_bar = (rem >> level) % 2
            t = int(self.teich_by_bar[digit_bar @ (1 << np.arange(self.N))])
            parts.append(None if t == 0 else self.exp_of_teich[t])
            rem = (rem - (1 << level) * self._index_to_coeffs(t)) % self.q
        assert not rem.any()
        return TwoAdic(tuple(parts))

    def from_two_adic(self, digits: TwoAdic | Sequence[int | None]) -> RingElem:
        parts = digits.parts if isinstance(digits, TwoAdic) else tuple(digits)
        acc = np.zeros(self.N, dtype=np.int64)
        for level, k in enumerate(parts):
            if k is not None:
                t = int(self.teichmuller_exps[k % ((1 << self.N) - 1)])
                acc = acc + (1 << level) * self._index_to_coeffs(t)
        return RingElem(self, int(self._coeffs_to_index(acc)))

    # -- subsets -----------------------------------------------------------

    def ideal2(self) -> list[RingElem]:
        """The maximal ideal (2): zero together with all zero divisors."""
        return [e for e in self.elements() if self.bar_index(e.index) == 0]

    def units(self) -> list[RingElem]:
        return [e for e in self.elements() if self.bar_index(e.index) != 0]

    def bar_classes(self) -> list[list[RingElem]]:
        """Cosets ``t + (2)`` ordered by their Teichmuller representative."""
        classes: dict[int, list[RingElem]] = {}
        for e in self.elements():
            classes.setdefault(int(self.teich_rep_index(e.index)), []).append(e)
        reps = [t.index for t in self.teichmuller()]
        return [classes[r] for r in reps]

    # -- bases ---------------------------------------------------------------

    def _same(self, a: RingElem) -> None:
        if not isinstance(a, RingElem) or a.ctx != self:
            raise RingError(f"element does not belong to {self.name}")

    def gram(self, elems: Sequence[RingElem]) -> np.ndarray:
        idx = np.array([e.index for e in elems])
        return self.trace_table[self.mul_many(idx[:, None], idx[None, :])]

    @cached_property
    def basis(self) -> RingBasis:
        """Working basis: self-dual where one is known or found, else powers of xi."""
        return _working_basis(self)

    @cached_property
    def dual(self) -> RingBasis:
        return self.basis.partner if self.basis.partner is not None else self.basis

    @cached_property
    def coord_table(self) -> np.ndarray:
        """``coord_table[a, i] = T(a theta*_i)``: coordinates in the working basis."""
        dual_idx = np.array([e.index for e in self.dual])
        table = self.trace_table[self.mul_many(np.arange(self.order)[:, None], dual_idx[None, :])]
        table.setflags(write=False)
        return table

    def coords(self, a: RingElem) -> tuple[int, ...]:
        self._same(a)
        return tuple(int(c) for c in self.coord_table[a.index])

    def from_coords(self, coords: Sequence[int]) -> RingElem:
        acc = self.zero
        for c, theta in zip(coords, self.basis):
            acc = acc + theta * int(c)
        return acc

    def describe(self) -> str:
        """Canonical text form used in reports."""
        basis = ",".join(str(e.coeffs) for e in self.basis)
        return f"GR(2^{self.s},{self.N}); poly={list(self.poly)}; basis=[{basis}]"


@lru_cache(maxsize=None)
def _cached_context(s: int, N: int, poly: tuple[int, ...] | None) -> RingContext:
    return RingContext(s, N, poly)


def ring_context(s: int, N: int, poly: Sequence[int] | None = None) -> RingContext:
    """Shared (cached) :class:`RingContext` for ``(s, N, poly)``."""
    return _cached_context(int(s), int(N), None if poly is None else tuple(int(c) for c in poly))


def lifted_context(ctx: RingContext) -> RingContext:
    """GR(2^(s+1), N) defined by the Hensel lift of ``ctx.poly``."""
    return ring_context(ctx.s + 1, ctx.N, hensel_lift(ctx.poly, ctx.s))


def lift_teichmuller(a: RingElem, target: RingContext | None = None) -> RingElem:
    """Representative in ``T_{s+1}`` of ``a``, lifting each 2-adic digit.

    The digit ``xi^k`` of GR(2^s, N) maps to ``xi'^k`` of GR(2^(s+1), N); the
    result reduces to ``a`` modulo 2^s.
    """
    ctx = a.ctx
    target = lifted_context(ctx) if target is None else target
    if target.s != ctx.s + 1 or target.N != ctx.N:
        raise RingError(f"cannot lift {ctx.name} into {target.name}")
    return target.from_two_adic(ctx.two_adic(a))


def reduce_mod(a: RingElem, target: RingContext) -> RingElem:
    """Coefficientwise reduction ``a mod 2^target.s``."""
    return target.elem([c % target.q for c in a.coeffs])


# ----------------------------------------------------------------------------
# Dual and self-dual bases
# ----------------------------------------------------------------------------

def _inverse_mod(mat: np.ndarray, q: int) -> np.ndarray:
    """Inverse over Z_q (q a power of 2) by Gauss-Jordan with odd pivots."""
    n = mat.shape[0]
    aug = np.concatenate([np.asarray(mat, dtype=np.int64) % q, np.eye(n, dtype=np.int64)], axis=1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r, col] % 2), None)
        if pivot is None:
            raise RingError("Gram determinant is a zero divisor")
        aug[[col, pivot]] = aug[[pivot, col]]
        aug[col] = (aug[col] * pow(int(aug[col, col]), -1, q)) % q
        for r in range(n):
            if r != col and aug[r, col]:
                aug[r] = (aug[r] - aug[r, col] * aug[col]) % q
    return aug[:, n:]


def dual_basis(basis: RingBasis | Sequence[RingElem]) -> RingBasis:
    """Basis ``{theta*_j}`` with ``T(theta_i theta*_j) = delta_ij``.

    Inverts the Gram matrix ``[T(theta_i theta_j)]`` over Z_{2^s}.
    """
    elems = tuple(basis.elems if isinstance(basis, RingBasis) else basis)
    ctx = elems[0].ctx
    if len(elems) != ctx.N:
        raise RingError(f"a basis of {ctx.name} needs {ctx.N} elements")
    inv = _inverse_mod(ctx.gram(elems), ctx.q)
    dual = []
    for j in range(ctx.N):
        acc = ctx.zero
        for k in range(ctx.N):
            acc = acc + elems[k] * int(inv[j, k])
        dual.append(acc)
    dual = tuple(dual)
    if dual == elems:
        return RingBasis(elems, "self-dual")
    return RingBasis(dual, "dual-pair", partner=RingBasis(elems, "dual-pair"))


def is_basis(elems: Sequence[RingElem]) -> bool:
    """Linear independence over Z_{2^s}: bars independent over Z_2."""
    ctx = elems[0].ctx
    if len(elems) != ctx.N:
        return False
    rows = [int(ctx.bar_index(e.index)) for e in elems]
    rank = 0
    for bit in range(ctx.N):
        piv = next((i for i in range(rank, len(rows)) if rows[i] >> bit & 1), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] >> bit & 1:
                rows[i] ^= rows[rank]
        rank += 1
    return rank == ctx.N


def is_self_dual(elems: Sequence[RingElem]) -> bool:
    ctx = elems[0].ctx
    return bool(np.array_equal(ctx.gram(elems), np.eye(len(elems), dtype=np.int64)))


def self_dual_basis_search(ctx: RingContext, exhaustive: bool | None = None) -> RingBasis | None:
    """Find a self-dual basis by backtracking over ``T(theta^2) = 1`` candidates.

    The search is exhaustive (a ``None`` result is definitive) when
    ``s * N <= 6``; beyond that it stops after a fixed node budget and
    ``None`` only means nothing was found.
    """
    if exhaustive is None:
        exhaustive = ctx.s * ctx.N <= _EXHAUSTIVE_SEARCH_BITS
    order = np.arange(ctx.order)
    squares = ctx.mul_many(order, order)
    cands = [int(i) for i in order if ctx.trace_table[squares[i]] == 1]
    budget = [_SEARCH_BUDGET]

    def trace_prod(a: int, b: int) -> int:
        return int(ctx.trace_table[ctx.mul_index(a, b)])

    def extend(chosen: list[int], start: int) -> list[int] | None:
        if len(chosen) == ctx.N:
            return chosen
        for pos in range(start, len(cands)):
            if not exhaustive:
                budget[0] -= 1
                if budget[0] < 0:
                    return None
            c = cands[pos]
            if all(trace_prod(c, b) == 0 for b in chosen):
                found = extend(chosen + [c], pos + 1)
                if found is not None:
                    return found
        return None

    found = extend([], 0)
    if found is None:
        return None
    elems = tuple(RingElem(ctx, i) for i in found)
    # a self-dual Gram matrix is the identity, so independence is automatic
    return RingBasis(elems, "self-dual")


# Self-dual basis of GR(4,3) for x^3 + 3x^2 + 2x + 3: {xi + 2xi^2, xi^2 + 2xi^4, xi^4 + 2xi}.
_KNOWN_SELF_DUAL = {
    (2, 3): ((1, 2), (2, 4), (4, 1)),
}


def default_poly(s: int, N: int) -> tuple[int, ...]:
    """Built-in defining polynomial of GR(2^s, N): lifted primitive poly over Z_2."""
    if N not in PRIMITIVE_POLYS:
        raise RingError(f"no built-in polynomial for N={N}; pass poly explicitly")
    p = PRIMITIVE_POLYS[N]
    for level in range(1, s):
        p = hensel_lift(p, level)
    return p


def _with_dual(elems: Sequence[RingElem]) -> RingBasis:
    dual = dual_basis(elems)
    if dual.kind == "self-dual":
        return dual
    return RingBasis(tuple(elems), "dual-pair", partner=RingBasis(dual.elems, "dual-pair"))


def _working_basis(ctx: RingContext) -> RingBasis:
    if ctx.N == 1:
        return _with_dual([ctx.one])
    xi = ctx.xi
    known = _KNOWN_SELF_DUAL.get((ctx.s, ctx.N))
    if known is not None and ctx.poly == default_poly(ctx.s, ctx.N):
        elems = [xi ** a + xi ** b * 2 for a, b in known]
        if is_self_dual(elems):
            return RingBasis(tuple(elems), "self-dual")
    if ctx.s == 1 or ctx.N % 2 == 1:
        found = self_dual_basis_search(ctx)
        if found is not None:
            return found
    return _with_dual([xi ** k for k in range(1, ctx.N + 1)])


def enumerate_subsets(ctx: RingContext, which: str):
    """Named subsets: 'units', 'ideal2', 'teichmuller' or 'bar-classes'."""
    which = which.replace("_", "-")
    if which == "units":
        return ctx.units()
    if which == "ideal2":
        return ctx.ideal2()
    if which == "teichmuller":
        return ctx.teichmuller()
    if which == "bar-classes":
        return ctx.bar_classes()
    raise ValueError(f"unknown subset {which!r}")


def all_pairs(ctx: RingContext) -> Iterable[tuple[RingElem, RingElem]]:
    return itertools.product(ctx.elements(), repeat=2)
