"""Q matrix, Fisher matrix and Cramer-Rao bounds of the linear estimator, plus the scheme benchmark table.

Independent parameters are grouped in ``2^N + 1`` blocks.  The block of a
bar-class representative ``t`` holds ``p^t_k`` for ``k != 0`` followed by
``p^(t+d)_(kb+g)`` for every nonzero ``d, g`` in (2) and every Teichmuller
representative ``kb``; the ideal block is laid out the same way around
``mu = 0``.  The eliminated probabilities follow from normalization and the
bar-class relations.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .mub import BasisFamily, family_build
from .qubit import qubit_mse_bound
from .reference_data import BENCHMARK_CELLS
from .tomography import born_probabilities, class_sums

DEFAULT_CLAMP = 1e-10
CLAMP_SWEEP = (1e-8, 1e-10, 1e-12)


class BlockSingularError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BlockLayout:
    """Independent parameters of one block: ``params[j] = (setup, outcome)``."""

    label: str
    base: int
    others: tuple[int, ...]
    params: tuple[tuple[int, int], ...]

    @property
    def setups(self) -> tuple[int, ...]:
        return (self.base,) + self.others

    @property
    def dim(self) -> int:
        return len(self.params)


@dataclass
class BlockMatrix:
    labels: list[str]
    blocks: list[np.ndarray]

    @property
    def total_dim(self) -> int:
        return sum(b.shape[0] for b in self.blocks)

    def dense(self) -> np.ndarray:
        return scipy.linalg.block_diag(*self.blocks)


def block_dim(n: int) -> int:
    return (4 ** n - 1) + 2 ** n * (2 ** n - 1) ** 2


@lru_cache(maxsize=None)
def block_layouts(n: int) -> tuple[BlockLayout, ...]:
    fam = family_build(n)
    sp = fam.space
    nz = [int(g) for g in sp.ideal if g != 0]
    layouts = []

    def build(label, base, others):
        params = [(base, k) for k in range(1, fam.dim)]
        params += [(o, int(sp.add[kb, g])) for o in others for kb in sp.teich for g in nz]
        return BlockLayout(label, base, tuple(others), tuple(params))

    for t in sp.teich:
        base = fam.index("ray", int(t))
        others = [fam.index("ray", int(sp.add[t, d])) for d in nz]
        layouts.append(build(fam.labels[base].text, base, others))
    base = fam.index("ideal", 0)
    layouts.append(build(fam.labels[base].text, base, [fam.index("ideal", m) for m in nz]))
    return tuple(layouts)


def block_jacobian(fam: BasisFamily, layout: BlockLayout) -> np.ndarray:
    """``J[i, k, j]``: change of ``p[layout.setups[i], k]`` per unit change of parameter ``j``."""
    sp, d = fam.space, fam.dim
    ns = len(layout.setups)
    row = {s: i for i, s in enumerate(layout.setups)}
    jac = np.zeros((ns, d, layout.dim))
    for j, (s, k) in enumerate(layout.params):
        jac[row[s], k, j] = 1.0
    jac[0, 0] = -jac[0].sum(axis=0)
    base_class = jac[0][sp.add[:, sp.ideal]].sum(axis=1)  # [k, j], class total of k
    nz = sp.ideal[sp.ideal != 0]
    for i in range(1, ns):
        for kb in sp.teich:
            jac[i, kb] = base_class[kb] - jac[i, sp.add[kb, nz]].sum(axis=0)
    return jac


def _projector_gram(fam: BasisFamily, setups) -> np.ndarray:
    """``K[(a,k), (b,l)] = Tr(P_ak P_bl) = |<u_ak|u_bl>|^2`` over the given setups."""
    u = fam.matrices[list(setups)]
    ov = np.abs(np.einsum("aik,bil->akbl", u.conj(), u)) ** 2
    n = len(setups) * fam.dim
    return ov.reshape(n, n)


def _coefficient_map(fam: BasisFamily, jac: np.ndarray) -> np.ndarray:
    """Projector coefficients produced by each parameter column."""
    sp, n = fam.space, fam.n
    sums = jac[:, sp.add[:, sp.ideal], :].sum(axis=2)
    return jac - (2 ** n - 1) / 4 ** n * sums


def q_bruteforce_oracle(n: int) -> BlockMatrix:
    """Quadratic form of ``Tr(drho^2)`` in the independent parameters, from basis overlaps.

    Each parameter is perturbed alone, the eliminated probabilities follow
    from the constraints, and the perturbation is pushed through the
    projector-form reconstruction.
    """
    fam = family_build(n)
    blocks, labels = [], []
    for lay in block_layouts(n):
        c = _coefficient_map(fam, block_jacobian(fam, lay))
        c = c.reshape(-1, lay.dim)
        q = c.T @ _projector_gram(fam, lay.setups) @ c
        blocks.append((q + q.T) / 2)
        labels.append(lay.label)
    return BlockMatrix(labels, blocks)


def _param_classes(fam: BasisFamily, lay: BlockLayout):
    sp = fam.space
    setup = np.array([s for s, _ in lay.params])
    outcome = np.array([k for _, k in lay.params])
    return setup, outcome, sp.bar_class[outcome], sp.is_ideal[outcome]


def q_matrix(n: int, symmetrize: bool = True) -> BlockMatrix:
    """Q blocks from the closed-form entries.

    The printed diagonal-setup entry is not symmetric in its two indices;
    only the symmetric part enters a quadratic form, so that is returned
    unless ``symmetrize`` is false.
    """
    fam = family_build(n)
    sp = fam.space
    two, four = 2 ** n, 4 ** n
    blocks, labels = [], []
    for lay in block_layouts(n):
        setup, k, kb, _ = _param_classes(fam, lay)
        base = setup == lay.base
        same_k = k[:, None] == k[None, :]
        same_bar = kb[:, None] == kb[None, :]
        gamma = np.array([_ideal_part(sp, x) for x in k])
        same_g = gamma[:, None] == gamma[None, :]
        bar0_k = (kb == 0)[:, None]
        bar0_e = (kb == 0)[None, :]
        q1 = ((four - two + 1) * (same_k + 1) + (two - 1) * (same_bar * (1 - same_g) - 2 * bar0_e * (bar0_k + 1))) / two
        q2 = same_k.astype(float) + same_bar
        q3 = -2.0 * (1 - bar0_k.astype(int) - bar0_e.astype(int))
        bb = base[:, None] & base[None, :]
        same_setup = (setup[:, None] == setup[None, :]) & ~bb
        cross = base[:, None] ^ base[None, :]
        q = np.where(bb, q1, 0.0) + np.where(same_setup, q2, 0.0) + np.where(cross, q3, 0.0)
        blocks.append((q + q.T) / 2 if symmetrize else q)
        labels.append(lay.label)
    return BlockMatrix(labels, blocks)


def _ideal_part(sp, k: int) -> int:
    """Position of ``g`` in ``k = kb + g`` with ``kb`` the Teichmuller representative."""
    return int(sp.add[k, sp.neg[sp.bar_rep[k]]])


# ----------------------------------------------------------------------------
# Fisher information
# ----------------------------------------------------------------------------

def _clamped(values: np.ndarray, clamp: float) -> np.ndarray:
    if not clamp > 0:
        raise ValueError("clamp must be positive")
    return np.maximum(values, clamp)


def _table_values(probs) -> np.ndarray:
    return probs.values if hasattr(probs, "values") else np.asarray(probs, dtype=float)


def fisher_exact(probs, n: int, clamp: float = DEFAULT_CLAMP) -> BlockMatrix:
    """Per-shot multinomial Fisher information ``J^T diag(1/p) J`` per block."""
    fam = family_build(n)
    p = _clamped(_table_values(probs), clamp)
    blocks, labels = [], []
    for lay in block_layouts(n):
        jac = block_jacobian(fam, lay).reshape(-1, lay.dim)
        w = 1.0 / p[list(lay.setups)].reshape(-1)
        blocks.append(jac.T @ (w[:, None] * jac))
        labels.append(lay.label)
    return BlockMatrix(labels, blocks)


def fisher_likelihood_oracle(probs, n: int, clamp: float = DEFAULT_CLAMP, step: float = 1e-6) -> BlockMatrix:
    """Fisher blocks as the covariance of the finite-differenced log-likelihood score.

    ``F = G^T Cov(n) G / M`` with ``G = d log p / d theta`` by central
    differences and ``Cov(n) = M (diag p - p p^T)`` per setup.
    """
    fam = family_build(n)
    p_all = _clamped(_table_values(probs), clamp)
    blocks, labels = [], []
    for lay in block_layouts(n):
        jac = block_jacobian(fam, lay)
        p = p_all[list(lay.setups)]
        grad = np.empty_like(jac)
        for j in range(lay.dim):
            hi = np.log(np.maximum(p + step * jac[:, :, j], clamp))
            lo = np.log(np.maximum(p - step * jac[:, :, j], clamp))
            grad[:, :, j] = (hi - lo) / (2 * step)
        f = np.zeros((lay.dim, lay.dim))
        for i in range(len(lay.setups)):
            cov = np.diag(p[i]) - np.outer(p[i], p[i])
            f += grad[i].T @ cov @ grad[i]
        blocks.append(f)
        labels.append(lay.label)
    return BlockMatrix(labels, blocks)


def fisher_matrix(probs, n: int, clamp: float = DEFAULT_CLAMP) -> BlockMatrix:
    """Fisher blocks from the closed-form entries (``delta*`` ranging over nonzero ideal elements).

    The diagonal-setup entry of a redundant setup is read with matching bar
    classes of its two outcomes, as for the printed cross-setup entry.
    """
    fam = family_build(n)
    sp = fam.space
    p = _clamped(_table_values(probs), clamp)
    blocks, labels = [], []
    for lay in block_layouts(n):
        setup, k, kb, _ = _param_classes(fam, lay)
        rep = sp.bar_rep[k]
        base = setup == lay.base
        m = lay.dim
        f = np.zeros((m, m))
        pb = p[lay.base]
        for a in range(m):
            for b in range(m):
                if base[a] and base[b]:
                    v = float(k[a] == k[b]) / pb[k[a]] + 1 / pb[0]
                    if kb[a] != 0 and kb[b] != 0:
                        v += sum(float(kb[a] == kb[b]) / p[o][rep[a]] + 1 / p[o][0] for o in lay.others)
                elif not base[a] and setup[a] == setup[b]:
                    if kb[a] != kb[b]:
                        continue
                    po = p[setup[a]]
                    v = float(k[a] == k[b]) / po[k[a]] + 1 / po[rep[a]]
                elif base[a] != base[b]:
                    i, o = (a, b) if base[a] else (b, a)
                    if kb[i] != kb[o]:
                        continue
                    v = -float(kb[i] != 0) / p[setup[o]][rep[o]]
                else:
                    continue
                f[a, b] = v
        blocks.append(f)
        labels.append(lay.label)
    return BlockMatrix(labels, blocks)


# ----------------------------------------------------------------------------
# Cramer-Rao
# ----------------------------------------------------------------------------

def trace_q_finv(q: BlockMatrix, f: BlockMatrix) -> float:
    """``sum_b Tr(Q_b F_b^-1)`` via a Cholesky (or LU fallback) solve per block."""
    total = 0.0
    for label, qb, fb in zip(q.labels, q.blocks, f.blocks):
        try:
            sol = scipy.linalg.cho_solve(scipy.linalg.cho_factor(fb), qb)
        except np.linalg.LinAlgError:
            try:
                sol = scipy.linalg.solve(fb, qb)
            except np.linalg.LinAlgError as exc:
                raise BlockSingularError(f"Fisher block {label} is singular") from exc
        total += float(np.trace(sol))
    if not np.isfinite(total):
        raise BlockSingularError("Cramer-Rao bound is not finite")
    return total


def cramer_rao(rho, n: int, clamp: float = DEFAULT_CLAMP, closed_form: bool = False) -> float:
    """Per-shot lower bound ``Tr(Q F^-1)`` on ``M * <Tr(rho - rho_est)^2>``.

    By default both Q and F come from the exact derivations; ``closed_form``
    switches both to the printed closed-form entries.
    """
    fam = family_build(n)
    probs = born_probabilities(rho, fam)
    if closed_form:
        return trace_q_finv(q_matrix(n), fisher_matrix(probs, n, clamp))
    return trace_q_finv(_q_exact(n), fisher_exact(probs, n, clamp))


@lru_cache(maxsize=None)
def _q_exact(n: int) -> BlockMatrix:
    return q_bruteforce_oracle(n)


def linear_estimator_mse(rho, n: int) -> float:
    """Exact per-shot ``M <Tr(rho - rho_est)^2>`` of the projector-form linear estimator.

    Basis projectors within a setup are orthonormal, so the error is
    ``sum_s Tr(A^2 Cov_s)`` with ``A`` the coefficient map of one setup and
    ``Cov_s = diag(p) - p p^T`` the single-shot multinomial covariance.
    """
    fam = family_build(n)
    p = born_probabilities(rho, fam).values
    a = np.eye(fam.dim) - (2 ** n - 1) / 4 ** n * class_sums(np.eye(fam.dim), fam)
    a2 = a @ a
    return float(sum(np.trace(a2 @ (np.diag(q) - np.outer(q, q))) for q in p))


def clamp_sweep(rho, n: int, clamps=CLAMP_SWEEP) -> dict[float, float]:
    return {c: cramer_rao(rho, n, c) for c in clamps}


def clamp_stable(sweep: dict[float, float], rel: float = 0.01) -> bool:
    vals = np.array(list(sweep.values()))
    return bool(np.ptp(vals) <= rel * np.abs(vals).max())


# ----------------------------------------------------------------------------
# Comparison bounds and ensembles
# ----------------------------------------------------------------------------

def sic_bound(rho) -> float:
    """``4^(2N) + 4^N - 1 - Tr(rho^2)`` with ``d = 4^N`` the dimension of ``rho``."""
    rho = np.asarray(rho)
    d = rho.shape[0]
    return float(d * d + d - 1 - np.einsum("ij,ji->", rho, rho).real)


@dataclass(frozen=True)
class StateEnsembleSpec:
    kind: str
    dim: int
    count: int
    seed: int

    def __post_init__(self):
        if self.kind not in ("pure", "mixed"):
            raise ValueError("ensemble kind must be 'pure' or 'mixed'")
        if self.dim < 1 or self.count < 1:
            raise ValueError("dimension and count must be positive")


def random_state(kind: str, dim: int, seed: int, index: int = 0) -> np.ndarray:
    """Haar-random pure state or Hilbert-Schmidt random mixed state, fixed by ``(seed, index)``."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    if kind == "pure":
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        return np.outer(v, v.conj())
    if kind == "mixed":
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rho = g @ g.conj().T
        return rho / np.trace(rho).real
    raise ValueError(f"unknown ensemble kind {kind!r}")


def random_states(spec: StateEnsembleSpec):
    for i in range(spec.count):
        yield random_state(spec.kind, spec.dim, spec.seed, i)


# ----------------------------------------------------------------------------
# Scheme benchmark table
# ----------------------------------------------------------------------------

SCHEMES = {
    1: ("ququart-1", "qubit-2", "sic-4"),
    2: ("ququart-2", "qubit-4", "sic-16"),
}


@dataclass
class Table3Row:
    scheme: str
    ensemble: str
    mean: float
    stderr: float
    mean_then_sqrt: float
    paper_value: float
    count: int
    values: np.ndarray = field(repr=False)

    @property
    def delta(self) -> float:
        return self.mean - self.paper_value


@dataclass
class ErrorReport:
    rows: list[Table3Row]
    seed: int
    count: int
    clamp: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("scheme", "ensemble", "mean", "stderr", "paper_value", "delta"))
        for r in self.rows:
            w.writerow((r.scheme, r.ensemble, f"{r.mean:.6f}", f"{r.stderr:.6f}", f"{r.paper_value:.2f}", f"{r.delta:+.6f}"))
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "seed": self.seed,
            "count": self.count,
            "clamp": self.clamp,
            "shots": "per setup",
            "rows": [
                {
                    "scheme": r.scheme, "ensemble": r.ensemble, "mean": r.mean, "stderr": r.stderr,
                    "sqrt_of_mean": r.mean_then_sqrt, "paper_value": r.paper_value, "delta": r.delta,
                }
                for r in self.rows
            ],
        }, indent=2)

    def row(self, scheme: str, ensemble: str) -> Table3Row:
        for r in self.rows:
            if (r.scheme, r.ensemble) == (scheme, ensemble):
                return r
        raise KeyError((scheme, ensemble))


def _scheme_bound(scheme: str, rho: np.ndarray, clamp: float) -> float:
    kind, size = scheme.split("-")
    if kind == "ququart":
        return cramer_rao(rho, int(size), clamp)
    if kind == "qubit":
        return qubit_mse_bound(rho)
    return sic_bound(rho)


def monte_carlo_table(
    n_values=(1, 2),
    ensembles=("pure", "mixed"),
    count: int = 1000,
    seed: int = 7,
    clamp: float = DEFAULT_CLAMP,
) -> ErrorReport:
    """Ensemble averages of ``sqrt(<E^2>_min)`` for every scheme of dimension ``4^N``.

    The same state sample feeds all three schemes of a given dimension.
    """
    if count < 1:
        raise ValueError("count must be positive")
    rows = []
    for n in n_values:
        dim = 4 ** n
        for ens in ensembles:
            states = list(random_states(StateEnsembleSpec(ens, dim, count, seed)))
            for scheme in SCHEMES[n]:
                vals = np.array([_scheme_bound(scheme, rho, clamp) for rho in states])
                roots = np.sqrt(vals)
                se = roots.std(ddof=1) / np.sqrt(count) if count > 1 else 0.0
                rows.append(Table3Row(scheme, ens, float(roots.mean()), float(se), float(np.sqrt(vals.mean())),
                                      BENCHMARK_CELLS[(scheme, ens)], count, vals))
    order = [s for n in n_values for s in SCHEMES[n]]
    rows.sort(key=lambda r: (order.index(r.scheme), ensembles.index(r.ensemble)))
    return ErrorReport(rows, seed, count, clamp)
