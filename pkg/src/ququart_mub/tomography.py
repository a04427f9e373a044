"""Born probabilities, linear-inversion reconstruction and simulated counts."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mub import OMEGA_POW, BasisFamily, family_build, phase_context
from .pauli import IPOW

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10


class TomographyError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """Outcome probabilities; row ``s`` follows ``family.labels[s]``, column ``k`` the outcome position."""

    family: BasisFamily
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.family.n_setups, self.family.dim):
            raise TomographyError(f"table shape {v.shape} does not match {self.family.n_setups} setups x {self.family.dim}")
        object.__setattr__(self, "values", v)

    @property
    def ray(self) -> dict:
        return {lab.elem: self.values[i] for i, lab in enumerate(self.family.labels) if lab.kind == "ray"}

    @property
    def ideal(self) -> dict:
        return {lab.elem: self.values[i] for i, lab in enumerate(self.family.labels) if lab.kind == "ideal"}

    def normalization_error(self) -> float:
        return float(np.max(np.abs(self.values.sum(axis=1) - 1)))


@dataclass(frozen=True, eq=False)
class CountTable:
    family: BasisFamily
    counts: np.ndarray
    shots: int

    def __post_init__(self):
        c = np.asarray(self.counts)
        if np.any(c < 0) or np.any(c.sum(axis=1) != self.shots):
            raise TomographyError("every setup must hold nonnegative counts summing to the shot number")

    def frequencies(self) -> ProbabilityTable:
        return ProbabilityTable(self.family, self.counts / self.shots)


# ----------------------------------------------------------------------------
# Validation helpers
# ----------------------------------------------------------------------------

def check_density_matrix(rho, dim: int | None = None, physical: bool = False) -> np.ndarray:
    """Return ``rho`` as a complex array after Hermiticity/trace (and optionally PSD) checks."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise TomographyError(f"density matrix must be square, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise TomographyError(f"expected dimension {dim}, got {rho.shape[0]}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise TomographyError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > HERMITIAN_TOL:
        raise TomographyError(f"density matrix trace is {np.trace(rho).real:.3g}, not 1")
    if physical and np.linalg.eigvalsh(rho)[0] < -1e-10:
        raise TomographyError("density matrix is not positive semidefinite")
    return rho


def check_probability_table(values, family: BasisFamily, normalized: bool = True) -> np.ndarray:
    """Validate a raw ``(n_setups, dim)`` array of probabilities or frequencies."""
    v = np.asarray(values, dtype=float)
    if v.shape != (family.n_setups, family.dim):
        raise TomographyError(f"table shape {v.shape} does not match {family.n_setups} setups x {family.dim}")
    if not np.all(np.isfinite(v)):
        raise TomographyError("table contains non-finite entries")
    if normalized and np.max(np.abs(v.sum(axis=1) - 1)) > 1e-9:
        raise TomographyError("each setup must sum to 1")
    return v


def _as_values(table, family: BasisFamily) -> np.ndarray:
    if isinstance(table, ProbabilityTable):
        return table.values
    return check_probability_table(table, family, normalized=False)


# ----------------------------------------------------------------------------
# Forward map and reconstruction
# ----------------------------------------------------------------------------

def born_probabilities(rho, family: BasisFamily) -> ProbabilityTable:
    """``p[s, k] = <u_k^s| rho |u_k^s>``, clipped to [0, 1] to strip rounding dust."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (family.dim, family.dim):
        raise TomographyError(f"state dimension {rho.shape} does not match family dimension {family.dim}")
    u = family.matrices
    p = np.einsum("sik,ij,sjk->sk", u.conj(), rho, u).real
    return ProbabilityTable(family, np.clip(p, 0.0, 1.0))


def class_sums(values: np.ndarray, family: BasisFamily) -> np.ndarray:
    """``S[s, k] = sum_(g in (2)) p[s, k + g]``, the bar-class total of outcome ``k``."""
    sp = family.space
    return values[:, sp.add[:, sp.ideal]].sum(axis=2)


def projector_coefficients(values: np.ndarray, family: BasisFamily) -> np.ndarray:
    n = family.n
    return values - (2 ** n - 1) / 4 ** n * class_sums(values, family)


def reconstruct_projector(table, family: BasisFamily | None = None) -> np.ndarray:
    """Linear inversion as a weighted sum of basis projectors minus ``I / 2^N``."""
    family = family or table.family
    c = projector_coefficients(_as_values(table, family), family)
    u = family.matrices
    rho = np.einsum("sik,sk,sjk->ij", u, c, u.conj())
    return rho - np.eye(family.dim) / 2 ** family.n


def monomial_coefficients(table, family: BasisFamily | None = None) -> np.ndarray:
    """``A[s, g]``: estimate of ``Tr(rho M^dag) / 4^N`` for the ``g``-th monomial of setup ``s``.

    Monomial ``g`` of a ray setup ``lam`` is ``Z_g X_(lam g)``; of an ideal
    setup ``mu`` it is ``Z_(mu g) X_g``.
    """
    family = family or table.family
    v = _as_values(table, family)
    sp = family.space
    pc = phase_context(family.n)
    w = IPOW[(-sp.trace[sp.mul]) % 4]  # i^(-T(g eta))
    pos = np.array([lab.pos for lab in family.labels])
    c = OMEGA_POW[pc.exponents[:, pos]].T  # [s, g]
    return c * (v @ w.T) / family.dim


def _monomial_weights(family: BasisFamily) -> np.ndarray:
    """Multiplicity correction: monomials shared by ``2^N`` sets get weight ``2^-N``, identity 0."""
    sp = family.space
    w = np.where(sp.is_ideal, 1.0 / 2 ** family.n, 1.0)
    w[0] = 0.0
    return w


def reconstruct_monomial(table, family: BasisFamily | None = None) -> np.ndarray:
    """Linear inversion as an expansion over the ``4^(2N)`` monomials, each counted once."""
    family = family or table.family
    sp, d = family.space, family.dim
    a = monomial_coefficients(table, family) * _monomial_weights(family)[None, :]
    rho = np.eye(d, dtype=complex) / d
    b = np.arange(d)
    for s, lab in enumerate(family.labels):
        g = np.arange(d)
        if lab.kind == "ray":
            zs, xs = g, sp.mul[lab.pos, g]
        else:
            zs, xs = sp.mul[lab.pos, g], g
        rows = sp.add[xs[:, None], b[None, :]]  # b + delta
        phase = IPOW[sp.trace[sp.mul[zs[:, None], rows]]]
        np.add.at(rho, (rows, np.broadcast_to(b, rows.shape)), a[s][:, None] * phase)
    return rho


def redundancy_check(table, family: BasisFamily | None = None) -> dict[str, float]:
    """Largest violations of the cross-setup relations and of per-setup normalization."""
    family = family or table.family
    v = _as_values(table, family)
    sp = family.space
    sums = class_sums(v, family)
    ray_dev, ideal_dev = 0.0, 0.0
    ref_ideal = family.index("ideal", 0)
    for s, lab in enumerate(family.labels):
        if lab.kind == "ray":
            ref = family.index("ray", int(sp.bar_rep[lab.pos]))
            ray_dev = max(ray_dev, float(np.max(np.abs(sums[s] - sums[ref]))))
        else:
            ideal_dev = max(ideal_dev, float(np.max(np.abs(sums[s] - sums[ref_ideal]))))
    norm = float(np.max(np.abs(v.sum(axis=1) - 1)))
    return {"ray": ray_dev, "ideal": ideal_dev, "normalization": norm, "max": max(ray_dev, ideal_dev, norm)}


def hermitian_basis(dim: int) -> np.ndarray:
    """A real-linear basis of the ``dim^2`` Hermitian matrices."""
    out = []
    for j in range(dim):
        e = np.zeros((dim, dim), complex)
        e[j, j] = 1
        out.append(e)
    for j in range(dim):
        for k in range(j + 1, dim):
            e = np.zeros((dim, dim), complex)
            e[j, k] = e[k, j] = 1
            out.append(e)
            f = np.zeros((dim, dim), complex)
            f[j, k], f[k, j] = -1j, 1j
            out.append(f)
    return np.array(out)


def born_map_rank(family: BasisFamily) -> int:
    """Rank of ``rho -> p`` on Hermitian matrices; ``4^(2N)`` means informational completeness."""
    u = family.matrices
    basis = hermitian_basis(family.dim)
    m = np.einsum("sik,bij,sjk->bsk", u.conj(), basis, u).real.reshape(len(basis), -1)
    return int(np.linalg.matrix_rank(m, tol=1e-9))


def independent_parameter_count(family: BasisFamily) -> int:
    """Number of free probabilities: rank of the Born map on traceless Hermitian matrices."""
    u = family.matrices
    basis = hermitian_basis(family.dim)
    traceless = basis[1:family.dim] - basis[0]  # E_jj - E_00
    basis = np.concatenate([traceless, basis[family.dim:]])
    m = np.einsum("sik,bij,sjk->bsk", u.conj(), basis, u).real.reshape(len(basis), -1)
    return int(np.linalg.matrix_rank(m, tol=1e-9))


# ----------------------------------------------------------------------------
# Sampling
# ----------------------------------------------------------------------------

def setup_rng(seed: int, repeat: int, setup: int) -> np.random.Generator:
    """Generator for one (repeat, setup) cell, independent of evaluation order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(repeat, setup)))


def sample_counts(table: ProbabilityTable, shots: int, seed: int, repeat: int = 0) -> CountTable:
    """Independent multinomial draws of ``shots`` outcomes per setup."""
    if shots < 1:
        raise TomographyError("shots must be positive")
    p = np.clip(table.values, 0.0, None)
    p = p / p.sum(axis=1, keepdims=True)
    counts = np.array([setup_rng(seed, repeat, s).multinomial(shots, p[s]) for s in range(len(p))])
    return CountTable(table.family, counts, shots)


def squared_errors(rho, family: BasisFamily, shots: int, repeats: int, seed: int) -> np.ndarray:
    """``Tr[(rho - rho_est)^2]`` for each of ``repeats`` simulated experiments."""
    if repeats < 1:
        raise TomographyError("repeats must be positive")
    rho = np.asarray(rho, dtype=complex)
    exact = born_probabilities(rho, family)
    out = np.empty(repeats)
    for r in range(repeats):
        est = reconstruct_projector(sample_counts(exact, shots, seed, r).frequencies())
        diff = rho - est
        out[r] = np.einsum("ij,ji->", diff, diff).real
    return out


def empirical_mse(rho, family: BasisFamily, shots: int, repeats: int, seed: int) -> float:
    """Mean Hilbert-Schmidt squared error of the linear estimator."""
    return float(squared_errors(rho, family, shots, repeats, seed).mean())


# ----------------------------------------------------------------------------
# CSV
# ----------------------------------------------------------------------------

TABLE_COLUMNS = ("setup_kind", "setup_elem", "outcome_elem", "value")


def _elem_text(family: BasisFamily, pos: int) -> str:
    return ",".join(str(c) for c in family.space.elem(pos).coeffs)


def table_to_csv(table, family: BasisFamily | None = None, out=None) -> str:
    """Serialize a probability or count table; returns the CSV text and writes to ``out`` if given."""
    if isinstance(table, CountTable):
        family, values, fmt = table.family, table.counts, str
    else:
        family = family or table.family
        values, fmt = _as_values(table, family), repr
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for s, lab in enumerate(family.labels):
        for k in range(family.dim):
            w.writerow((lab.kind, _elem_text(family, lab.pos), _elem_text(family, k), fmt(values[s, k].item())))
    text = buf.getvalue()
    if out is not None:
        Path(out).write_text(text)
    return text


def table_from_csv(source, n: int) -> ProbabilityTable:
    """Parse a table written by :func:`table_to_csv` from a path or CSV text."""
    family = family_build(n)
    is_text = isinstance(source, str) and "\n" in source
    text = source if is_text else Path(source).read_text()
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or tuple(rows[0].keys()) != TABLE_COLUMNS:
        raise TomographyError(f"expected CSV columns {','.join(TABLE_COLUMNS)}")
    elem_pos = {_elem_text(family, p): p for p in range(family.dim)}
    setup_index = {(lab.kind, lab.pos): i for i, lab in enumerate(family.labels)}
    values = np.full((family.n_setups, family.dim), np.nan)
    for row in rows:
        try:
            s = setup_index[(row["setup_kind"], elem_pos[row["setup_elem"]])]
            values[s, elem_pos[row["outcome_elem"]]] = float(row["value"])
        except KeyError as exc:
            raise TomographyError(f"unknown label in row {row}") from exc
    if np.isnan(values).any():
        raise TomographyError("CSV does not cover every (setup, outcome) cell")
    return ProbabilityTable(family, values)
