"""Reference values used by the conformance checks.

Ring elements are written as sums of terms ``c``, ``c*x`` or ``c*x^k`` with
``x`` the root of the defining polynomial, e.g. ``"1+2x^2"``.
"""

from __future__ import annotations

import re

from .galois import RingContext, RingElem

_TERM = re.compile(r"^(\d*)\*?(x(?:\^(\d+))?)?$")


def ring_expr(ctx: RingContext, text: str) -> RingElem:
    """Evaluate a sum of ``c x^k`` terms in ``ctx``."""
    acc = ctx.zero
    for term in text.replace(" ", "").split("+"):
        m = _TERM.match(term)
        if not term or m is None or (not m.group(1) and not m.group(2)):
            raise ValueError(f"cannot parse term {term!r} in {text!r}")
        coef = int(m.group(1)) if m.group(1) else 1
        power = 0 if not m.group(2) else int(m.group(3) or 1)
        acc = acc + (ctx.xi ** power) * coef
    return acc


# 2-adic digits (a1, a2) of a1 + 2 a2 and coordinates in the basis {x, x^2}, GR(4,2).
GR42_EXPANSION = [
    (("0", "0"), (0, 0)),
    (("0", "1"), (2, 2)),
    (("0", "x"), (2, 0)),
    (("0", "x^2"), (0, 2)),
    (("1", "0"), (3, 3)),
    (("1", "1"), (1, 1)),
    (("1", "x"), (1, 3)),
    (("1", "x^2"), (3, 1)),
    (("x", "0"), (1, 0)),
    (("x", "1"), (3, 2)),
    (("x", "x"), (3, 0)),
    (("x", "x^2"), (1, 2)),
    (("x^2", "0"), (0, 1)),
    (("x^2", "1"), (2, 3)),
    (("x^2", "x"), (2, 1)),
    (("x^2", "x^2"), (0, 3)),
]

# One ququart: (kind, parameter, non-identity members as exponent pairs (a, b) of Z^a X^b).
COMMUTING_SETS_N1 = [
    ("ray", 0, [(1, 0), (2, 0), (3, 0)]),
    ("ray", 2, [(1, 2), (2, 0), (3, 2)]),
    ("ray", 1, [(1, 1), (2, 2), (3, 3)]),
    ("ray", 3, [(1, 3), (2, 2), (3, 1)]),
    ("ideal", 0, [(0, 1), (0, 2), (0, 3)]),
    ("ideal", 2, [(2, 1), (0, 2), (2, 3)]),
]

# Two ququarts: (kind, parameters of the row, shared non-identity monomials (gamma, delta)).
SHARED_MONOMIALS_N2 = [
    ("ray", ["0", "2", "2x", "2x^2"], [("2", "0"), ("2x", "0"), ("2x^2", "0")]),
    ("ray", ["1", "3", "1+2x", "1+2x^2"], [("2", "2"), ("2x", "2x"), ("2x^2", "2x^2")]),
    ("ray", ["x", "x+2", "3x", "x+2x^2"], [("2", "2x"), ("2x", "2x^2"), ("2x^2", "2")]),
    ("ray", ["x^2", "x^2+2", "x^2+2x", "3x^2"], [("2", "2x^2"), ("2x", "2"), ("2x^2", "2x")]),
    ("ideal", ["0", "2", "2x", "2x^2"], [("0", "2"), ("0", "2x"), ("0", "2x^2")]),
]

# sqrt(<E^2>_min) averaged over 10^3 states: (scheme, ensemble) -> printed value.
BENCHMARK_CELLS = {
    ("ququart-1", "pure"): 1.72, ("ququart-1", "mixed"): 1.84,
    ("qubit-2", "pure"): 1.88, ("qubit-2", "mixed"): 1.95,
    ("sic-4", "pure"): 4.24, ("sic-4", "mixed"): 4.44,
    ("ququart-2", "pure"): 3.16, ("ququart-2", "mixed"): 3.54,
    ("qubit-4", "pure"): 3.87, ("qubit-4", "mixed"): 3.98,
    ("sic-16", "pure"): 16.43, ("sic-16", "mixed"): 16.49,
}

# Product (fully factorized) bases of two ququarts.
PRODUCT_RAYS_N2 = ["0", "2", "x+3x^2", "3x+x^2"]
PRODUCT_IDEALS_N2 = ["0", "2"]
