"""Bootstrap ensembles of filtered networks and hypergeometric edge validation."""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, logsumexp

from .core import DataMatrix, FilteredGraph, is_chordal, is_planar
from .errors import DegenerateVariableError, InvalidInputError
from .pipeline import Recipe

_U64 = 1 << 64
MAX_REDRAWS = 10


@dataclass(frozen=True)
class EdgeEnsemble:
    """Edge appearance counts over ``r`` replicas (zero counts are omitted)."""

    p: int
    r: int
    freq: dict
    recipe: Recipe
    master_seed: int
    names: tuple[str, ...] | None = None
    subsample: float | None = None

    def __post_init__(self):
        freq = {}
        for (i, j), f in self.freq.items():
            key = (min(int(i), int(j)), max(int(i), int(j)))
            f = int(f)
            if not 0 < f <= self.r:
                raise InvalidInputError(f"edge {key} count {f} outside [1, {self.r}]")
            freq[key] = f
        object.__setattr__(self, "freq", dict(sorted(freq.items())))

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "r": self.r,
            "master_seed": self.master_seed,
            "subsample": self.subsample,
            "recipe": self.recipe.to_dict(),
            "vertices": list(self.names) if self.names else None,
            "freq": [[i, j, f] for (i, j), f in self.freq.items()],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "EdgeEnsemble":
        names = tuple(doc["vertices"]) if doc.get("vertices") else None
        return cls(int(doc["p"]), int(doc["r"]), {(i, j): f for i, j, f in doc["freq"]},
                   Recipe(**doc["recipe"]), int(doc["master_seed"]), names, doc.get("subsample"))


def replica_seed(master_seed: int, k: int, attempt: int = 0, r: int = 1) -> int:
    """Seed of replica ``k``: ``master_seed + k``, then ``+ r`` per re-draw, mod 2**64."""
    return (int(master_seed) + k + attempt * r) % _U64


def _resample(x: np.ndarray, seed: int, subsample: float | None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    n = x.shape[0]
    if subsample is None:
        idx = rng.integers(0, n, size=n)
    else:
        m = max(2, int(round(subsample * n)))
        idx = np.sort(rng.choice(n, size=m, replace=False))
    return x[idx]


def _replica_edges(data: DataMatrix, k: int, r: int, recipe: Recipe, master_seed: int,
                   subsample: float | None) -> frozenset:
    x = data.values
    for attempt in range(MAX_REDRAWS):
        sample = _resample(x, replica_seed(master_seed, k, attempt, r), subsample)
        flat = np.ptp(sample, axis=0) == 0
        if flat.any():
            continue
        return recipe.from_data(DataMatrix(sample, data.names)).graph.edge_set()
    raise DegenerateVariableError(
        int(np.argmax(flat)),
        f"replica {k}: column {data.names[int(np.argmax(flat))]} has zero variance "
        f"in {MAX_REDRAWS} consecutive draws")


def bootstrap_ensemble(data: DataMatrix, r: int, recipe: Recipe, master_seed: int,
                       subsample: float | None = None, workers: int = 1) -> EdgeEnsemble:
    """Count how often each edge appears across ``r`` resampled networks.

    Replica ``k`` resamples ``n`` rows with replacement (or a fraction
    ``subsample`` of the rows without replacement) using
    :func:`replica_seed`, so the counts do not depend on ``workers``.
    """
    if not isinstance(r, (int, np.integer)) or r < 1:
        raise InvalidInputError(f"replica count must be a positive integer, got {r!r}")
    if subsample is not None and not 0.0 < subsample <= 1.0:
        raise InvalidInputError(f"subsample fraction must lie in (0, 1], got {subsample}")
    if not isinstance(data, DataMatrix):
        data = DataMatrix(data)

    def job(k):
        return _replica_edges(data, k, r, recipe, master_seed, subsample)

    counts: Counter = Counter()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for edges in pool.map(job, range(r)):
                counts.update(edges)
    else:
        for k in range(r):
            counts.update(job(k))
    return EdgeEnsemble(data.p, r, dict(counts), recipe, int(master_seed) % _U64, data.names, subsample)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _log_comb(n: int, k: int) -> float:
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def edge_log_pvalue(f: int, r: int, p: int) -> float:
    """Natural log of :func:`edge_pvalue`."""
    pairs = p * (p - 1) // 2
    if not (0 <= f <= r) or r < 1 or pairs < r:
        raise InvalidInputError(f"need 0 <= f <= r <= p(p-1)/2, got f={f}, r={r}, p={p}")
    if f == 0:
        return 0.0
    terms = [_log_comb(r, k) + _log_comb(pairs - r, r - k)
             for k in range(f, r + 1) if r - k <= pairs - r]
    return min(0.0, float(logsumexp(terms)) - _log_comb(pairs, r))


def edge_pvalue(f: int, r: int, p: int) -> float:
    """Probability of ``f`` or more appearances under the hypergeometric null.

    ``sum_{k=f}^{r} C(r, k) C(M - r, r - k) / C(M, r)`` with
    ``M = p (p - 1) / 2``, summed in log space.
    """
    return math.exp(edge_log_pvalue(f, r, p))


def validated_network(ens: EdgeEnsemble, alpha: float) -> FilteredGraph:
    """Edges whose p-value is at most ``alpha``, weighted by ``freq / r``."""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidInputError(f"alpha must lie in [0, 1], got {alpha}")
    log_alpha = math.log(alpha) if alpha > 0 else -math.inf
    keep = {e: f / ens.r for e, f in ens.freq.items()
            if edge_log_pvalue(f, ens.r, ens.p) <= log_alpha}
    return FilteredGraph(ens.p, keep, ens.names)


class MergeReport(NamedTuple):
    graph: FilteredGraph
    chordal: bool
    planar: bool


def merge_report(ens: EdgeEnsemble, alpha: float) -> MergeReport:
    """Validated network plus its chordality and planarity; nothing is repaired."""
    g = validated_network(ens, alpha)
    return MergeReport(g, is_chordal(g).chordal, is_planar(g))
