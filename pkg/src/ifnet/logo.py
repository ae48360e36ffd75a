"""LoGo sparse precision, decomposed likelihoods, elliptical densities, regression.

Every quantity here is assembled from small dense blocks, one per clique
and separator of a clique tree, so nothing larger than the biggest clique is
ever factorized.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.special import gammaln

from .core import CliqueTree, DataMatrix, WeightMatrix
from .errors import InvalidInputError, NumericError

GAUSSIAN = "gaussian"
STUDENT_T = "student_t"
_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class SparsePrecision:
    """Symmetric precision matrix stored on ``support`` plus the diagonal.

    ``entries`` maps ``(i, j)`` with ``i <= j`` to the value.
    """

    p: int
    entries: dict
    support: frozenset
    names: tuple[str, ...] | None = None
    _dense: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dense = np.zeros((self.p, self.p))
        for (i, j), val in self.entries.items():
            dense[i, j] = dense[j, i] = val
        dense.setflags(write=False)
        object.__setattr__(self, "_dense", dense)

    def __getitem__(self, key) -> float:
        i, j = key
        return float(self._dense[i, j])

    def __eq__(self, other):
        if not isinstance(other, SparsePrecision):
            return NotImplemented
        return (self.p == other.p and self.entries == other.entries
                and self.support == other.support and self.names == other.names)

    def to_dense(self) -> np.ndarray:
        return self._dense.copy()

    def scaled(self, factor: float) -> "SparsePrecision":
        return SparsePrecision(self.p, {k: v * factor for k, v in self.entries.items()},
                               self.support, self.names)

    def is_positive_definite(self) -> bool:
        try:
            linalg.cholesky(self._dense, lower=True)
        except linalg.LinAlgError:
            return False
        return True


def _as_dense(j) -> np.ndarray:
    if isinstance(j, SparsePrecision):
        return j.to_dense()
    if isinstance(j, WeightMatrix):
        return np.array(j.values)
    return np.asarray(j, dtype=float)


def _block(cov: np.ndarray, idx, shrinkage: float) -> np.ndarray:
    sub = cov[np.ix_(idx, idx)]
    if shrinkage:
        sub = (1.0 - shrinkage) * sub + shrinkage * np.diag(np.diag(sub))
    return sub


def _chol(sub: np.ndarray, what: str):
    try:
        return linalg.cho_factor(sub, lower=True)
    except linalg.LinAlgError as exc:
        raise NumericError(f"{what} covariance block is singular or not positive definite") from exc


def _check(cov: WeightMatrix, tree: CliqueTree, shrinkage: float) -> np.ndarray:
    if cov.p != tree.p:
        raise InvalidInputError(f"covariance is {cov.p}x{cov.p} but the clique tree has p={tree.p}")
    if not 0.0 <= shrinkage <= 1.0:
        raise InvalidInputError(f"shrinkage must lie in [0, 1], got {shrinkage}")
    return cov.values


def _blocks(tree: CliqueTree):
    """(sign, members, label) for every clique then every separator."""
    for k, c in enumerate(tree.cliques):
        yield 1.0, c, f"clique {k} {list(c)}"
    for k, s in enumerate(tree.separators):
        yield -1.0, s.members, f"separator {k} {list(s.members)}"


def logo_precision(cov: WeightMatrix, tree: CliqueTree, shrinkage: float = 0.0) -> SparsePrecision:
    """Sparse inverse covariance assembled from clique and separator inverses.

    ``J_ij = sum_c (S_c^-1)_ij - sum_s (S_s^-1)_ij`` where the sums run over
    the cliques and separators holding both ``i`` and ``j``; every other
    entry is zero. With ``shrinkage`` each block is pulled toward its own
    diagonal before inversion.
    """
    s = _check(cov, tree, shrinkage)
    entries: dict[tuple[int, int], float] = {}
    for sign, idx, label in _blocks(tree):
        inv = linalg.cho_solve(_chol(_block(s, idx, shrinkage), label), np.eye(len(idx)))
        for a, i in enumerate(idx):
            for b in range(a, len(idx)):
                key = (i, idx[b])
                entries[key] = entries.get(key, 0.0) + sign * inv[a, b]
    entries = dict(sorted(entries.items()))
    return SparsePrecision(tree.p, entries, tree.edges(), tree.names)


def logo_logdet(cov: WeightMatrix, tree: CliqueTree, shrinkage: float = 0.0) -> float:
    """log det of the LoGo precision from the block determinants alone."""
    s = _check(cov, tree, shrinkage)
    total = 0.0
    for sign, idx, label in _blocks(tree):
        c, _ = _chol(_block(s, idx, shrinkage), label)
        total -= sign * 2.0 * float(np.sum(np.log(np.diag(c))))
    return total


def gaussian_loglik_rows(data, mu, cov: WeightMatrix, tree: CliqueTree,
                         shrinkage: float = 0.0) -> np.ndarray:
    """Per-observation Gaussian log-likelihood factorized over the clique tree.

    Each row contributes ``sum_c ln phi_c(x_c) - sum_s ln phi_s(x_s)`` with
    ``phi`` the Gaussian marginal density on the block.
    """
    s = _check(cov, tree, shrinkage)
    x = data.values if isinstance(data, DataMatrix) else np.atleast_2d(np.asarray(data, dtype=float))
    mu = np.asarray(mu, dtype=float)
    if x.shape[1] != tree.p or mu.shape != (tree.p,):
        raise InvalidInputError("data, mean and clique tree dimensions disagree")
    centred = x - mu
    out = np.zeros(x.shape[0])
    for sign, idx, label in _blocks(tree):
        chol = _chol(_block(s, idx, shrinkage), label)
        xc = centred[:, idx]
        maha = np.sum(xc * linalg.cho_solve(chol, xc.T).T, axis=1)
        logdet = 2.0 * float(np.sum(np.log(np.diag(chol[0]))))
        out += sign * -0.5 * (len(idx) * _LOG_2PI + logdet + maha)
    return out


def gaussian_loglik_decomposed(data, mu, cov: WeightMatrix, tree: CliqueTree,
                               shrinkage: float = 0.0) -> float:
    """Total of :func:`gaussian_loglik_rows` over the observations."""
    return float(np.sum(gaussian_loglik_rows(data, mu, cov, tree, shrinkage)))


# ---------------------------------------------------------------------------
# Elliptical densities
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EllipticalModel:
    """Elliptical density ``k_p |J|^(1/2) g(d^2)``.

    ``precision`` is the inverse *scale* matrix, dense or LoGo-sparse.
    Use :meth:`from_covariance` to build one from a covariance estimate,
    which takes care of the Student-t scale factor.
    """

    mu: np.ndarray
    precision: object
    generator: str = GAUSSIAN
    nu: float | None = None

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        if self.generator not in (GAUSSIAN, STUDENT_T):
            raise InvalidInputError(f"unknown density generator {self.generator!r}")
        if self.generator == STUDENT_T and not (self.nu is not None and self.nu > 2):
            raise InvalidInputError(f"Student-t needs nu > 2, got {self.nu}")
        if _as_dense(self.precision).shape != (mu.size, mu.size):
            raise InvalidInputError("precision and centroid dimensions disagree")

    @property
    def p(self) -> int:
        return self.mu.size

    @property
    def log_norm_constant(self) -> float:
        p = self.p
        if self.generator == GAUSSIAN:
            return -0.5 * p * _LOG_2PI
        nu = self.nu
        return float(gammaln((nu + p) / 2) - gammaln(nu / 2) - 0.5 * p * math.log(nu * math.pi))

    @property
    def norm_constant(self) -> float:
        return math.exp(self.log_norm_constant)

    @classmethod
    def from_covariance(cls, mu, cov: WeightMatrix, tree: CliqueTree | None = None,
                        generator: str = GAUSSIAN, nu: float | None = None,
                        shrinkage: float = 0.0) -> "EllipticalModel":
        """Model whose covariance matches ``cov``.

        With a tree the precision is the LoGo estimate, otherwise the dense
        inverse. For Student-t the scale is ``cov * (nu - 2) / nu``.
        """
        if tree is not None:
            j = logo_precision(cov, tree, shrinkage)
        else:
            j = linalg.cho_solve(_chol(_block(cov.values, list(range(cov.p)), shrinkage), "full"),
                                 np.eye(cov.p))
        if generator == STUDENT_T:
            if not (nu is not None and nu > 2):
                raise InvalidInputError(f"Student-t needs nu > 2, got {nu}")
            factor = nu / (nu - 2.0)
            j = j.scaled(factor) if isinstance(j, SparsePrecision) else j * factor
        return cls(mu, j, generator, nu)


def elliptical_logpdf(x, model: EllipticalModel) -> np.ndarray | float:
    j = _as_dense(model.precision)
    try:
        c = linalg.cholesky(j, lower=True)
    except linalg.LinAlgError as exc:
        raise NumericError("precision matrix is not positive definite") from exc
    half_logdet = float(np.sum(np.log(np.diag(c))))
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    d = np.atleast_2d(x) - model.mu
    if d.shape[1] != model.p:
        raise InvalidInputError(f"point has dimension {d.shape[1]}, model has {model.p}")
    d2 = np.sum((d @ j) * d, axis=1)
    if model.generator == GAUSSIAN:
        log_g = -0.5 * d2
    else:
        log_g = -0.5 * (model.nu + model.p) * np.log1p(d2 / model.nu)
    out = model.log_norm_constant + half_logdet + log_g
    return float(out[0]) if single else out


def elliptical_density(x, model: EllipticalModel) -> np.ndarray | float:
    """Density at ``x`` (a point or a stack of points)."""
    return np.exp(elliptical_logpdf(x, model))


# ---------------------------------------------------------------------------
# Regression
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RegressionModel:
    """Linear predictor of one variable from all the others.

    ``coefficients[k]`` multiplies variable ``predictors[k]``.
    """

    target: int
    predictors: tuple[int, ...]
    coefficients: np.ndarray
    intercept: float
    residual_variance: float

    def predict(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        return x[..., list(self.predictors)] @ self.coefficients + self.intercept


def ifn_regression(y: int, mu, jsp) -> RegressionModel:
    """Regression of variable ``y`` read off a precision matrix.

    ``beta_j = -J_yj / J_yy``. With a LoGo precision every variable outside
    the IFN neighbourhood of ``y`` gets an exact zero.
    """
    j = _as_dense(jsp)
    mu = np.asarray(mu, dtype=float)
    p = j.shape[0]
    if mu.shape != (p,) or not 0 <= y < p:
        raise InvalidInputError("target index or mean vector does not match the precision")
    jyy = j[y, y]
    if not jyy > 0:
        raise NumericError(f"precision diagonal J[{y},{y}] = {jyy} is not positive")
    predictors = tuple(k for k in range(p) if k != y)
    beta = -j[y, list(predictors)] / jyy + 0.0  # + 0.0 turns -0.0 into 0.0
    beta.setflags(write=False)
    intercept = float(mu[y] - beta @ mu[list(predictors)])
    return RegressionModel(y, predictors, beta, intercept, float(1.0 / jyy))
