"""scikit-learn style wrapper around linear-inversion tomography."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .mub import family_build
from .tomography import (
    ProbabilityTable,
    born_probabilities,
    check_density_matrix,
    check_probability_table,
    reconstruct_monomial,
    reconstruct_projector,
)


class MuLikeTomography(TransformerMixin, BaseEstimator):
    """Map probability tables of the MU-like measurement family to density matrices.

    ``transform`` takes an array of shape ``(n_samples, n_setups, 4^N)`` (or a
    single table) and returns ``(n_samples, 4^N, 4^N)`` density matrices;
    ``inverse_transform`` is the Born map.

    Parameters
    ----------
    n_ququarts : int
        Number of ququarts, 1 to 3.
    method : {"projector", "monomial"}
        Which of the two equivalent reconstruction formulas to evaluate.
    normalized : bool
        Reject tables whose setups do not sum to one.
    """

    def __init__(self, n_ququarts: int = 1, method: str = "projector", normalized: bool = True):
        self.n_ququarts = n_ququarts
        self.method = method
        self.normalized = normalized

    def fit(self, X=None, y=None):
        if self.n_ququarts not in (1, 2, 3):
            raise ValueError(f"n_ququarts must be 1, 2 or 3, got {self.n_ququarts!r}")
        if self.method not in ("projector", "monomial"):
            raise ValueError(f"unknown method {self.method!r}")
        self.family_ = family_build(self.n_ququarts)
        self.dim_ = self.family_.dim
        self.n_setups_ = self.family_.n_setups
        self.setup_labels_ = [lab.text for lab in self.family_.labels]
        return self

    def _tables(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 2:
            X = X[None]
        if X.ndim != 3:
            raise ValueError(f"expected tables of shape (n_samples, {self.n_setups_}, {self.dim_})")
        for t in X:
            check_probability_table(t, self.family_, self.normalized)
        return X

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "family_")
        fn = reconstruct_projector if self.method == "projector" else reconstruct_monomial
        return np.array([fn(ProbabilityTable(self.family_, t)) for t in self._tables(X)])

    def inverse_transform(self, X) -> np.ndarray:
        check_is_fitted(self, "family_")
        rhos = np.asarray(X, dtype=complex)
        if rhos.ndim == 2:
            rhos = rhos[None]
        return np.array([born_probabilities(check_density_matrix(r, self.dim_), self.family_).values for r in rhos])

    def score(self, X, y) -> float:
        """Negative mean ``Tr[(rho - rho_est)^2]`` between reconstructions of ``X`` and states ``y``."""
        est = self.transform(X)
        y = np.asarray(y, dtype=complex).reshape(est.shape)
        diff = est - y
        return -float(np.mean(np.einsum("nij,nji->n", diff, diff).real))
