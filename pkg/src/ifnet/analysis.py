"""Centrality-based feature ranking and Markowitz weights from a precision matrix."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FilteredGraph
from .errors import InvalidInputError, NumericError, UndefinedCentralityError
from .logo import SparsePrecision

DEGREE = "degree"
EIGENVECTOR = "eigenvector"


@dataclass(frozen=True, eq=False)
class FeatureRanking:
    order: tuple[int, ...]
    scores: np.ndarray
    method: str

    def top(self, k: int) -> tuple[int, ...]:
        return self.order[:k]


def _eigenvector_scores(a: np.ndarray, tol: float = 1e-10, max_iter: int = 100_000) -> np.ndarray:
    # shifting by half the largest weighted degree keeps the Perron root
    # strictly dominant on bipartite graphs (stars, paths) without slowing
    # convergence much
    shift = 0.5 * a.sum(axis=1).max()
    m = a + shift * np.eye(a.shape[0])
    x = np.full(a.shape[0], 1.0 / a.shape[0])
    for _ in range(max_iter):
        y = m @ x
        y /= y.sum()
        if np.abs(y - x).sum() <= tol * np.abs(y).sum():
            return y
        x = y
    raise NumericError(f"power iteration did not converge in {max_iter} steps")


def feature_ranking(g: FilteredGraph, method: str = DEGREE) -> FeatureRanking:
    """Rank vertices by centrality, most central first.

    ``degree`` counts neighbours; ``eigenvector`` is the principal
    eigenvector of the weighted adjacency matrix (unit 1-norm), found by
    power iteration. Ties keep ascending vertex order.
    """
    if g.p == 0:
        raise InvalidInputError("cannot rank the vertices of an empty graph")
    if method == DEGREE:
        scores = np.array([g.degree(v) for v in range(g.p)], dtype=float)
    elif method == EIGENVECTOR:
        if g.n_edges == 0:
            raise UndefinedCentralityError("eigenvector centrality is undefined without edges")
        a = np.abs(g.adjacency_matrix(weighted=True))
        scores = _eigenvector_scores(a)
    else:
        raise InvalidInputError(f"unknown centrality {method!r}")
    # scores equal up to round-off count as ties
    key = np.round(scores / np.abs(scores).max(), 12) if scores.any() else scores
    order = tuple(int(i) for i in np.lexsort((np.arange(g.p), -key)))
    scores.setflags(write=False)
    return FeatureRanking(order, scores, method)


@dataclass(frozen=True, eq=False)
class PortfolioWeights:
    w: np.ndarray
    lam: float
    gamma: float


def markowitz_weights(j, mu, lam: float, gamma: float) -> PortfolioWeights:
    """Unnormalized optimal weights ``J (lam * mu + gamma * 1)``.

    ``j`` may be a dense precision or a :class:`SparsePrecision`.
    """
    jm = j.to_dense() if isinstance(j, SparsePrecision) else np.asarray(j, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if jm.ndim != 2 or jm.shape[0] != jm.shape[1] or mu.shape != (jm.shape[0],):
        raise InvalidInputError(f"precision shape {jm.shape} does not match mean vector {mu.shape}")
    w = jm @ (lam * mu + gamma * np.ones_like(mu))
    w.setflags(write=False)
    return PortfolioWeights(w, float(lam), float(gamma))
