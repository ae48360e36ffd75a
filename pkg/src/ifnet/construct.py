"""Greedy IFN constructors: MST (Prim, Kruskal), PMFG, TMFG and MFCF.

All constructors are deterministic. Whenever two candidates tie on weight
or gain, the one with the smaller vertex wins, and after that the
lexicographically smaller partner set.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, NamedTuple

import networkx as nx
import numpy as np
from scipy import linalg

from .core import CORRELATION, CliqueTree, FilteredGraph, Separator, WeightMatrix
from .errors import ConfigError, InvalidInputError, InvalidWeightError, NumericError

EDGE_WEIGHT = "edge_weight"
SUM_SQUARES = "sum_squared_correlation"
ELLIPTICAL_MI = "elliptical_mi"
GAIN_VARIANTS = (EDGE_WEIGHT, SUM_SQUARES, ELLIPTICAL_MI)

# 1 - R_vs R_ss^-1 R_sv at or below this counts as a singular (s + v) block
_SINGULAR_TOL = 1e-13


def _check_positive(w: WeightMatrix, min_p: int = 2) -> np.ndarray:
    v = w.values
    p = v.shape[0]
    if p < min_p:
        raise InvalidInputError(f"need at least {min_p} vertices, got {p}")
    off = ~np.eye(p, dtype=bool)
    bad = off & ~(v > 0)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise InvalidWeightError(f"weight ({i}, {j}) = {v[i, j]!r} is not positive")
    return v


def _graph(w: WeightMatrix, pairs: Iterable[tuple[int, int]]) -> FilteredGraph:
    v = w.values
    return FilteredGraph(w.p, {(i, j): v[i, j] for i, j in pairs}, w.names)


# ---------------------------------------------------------------------------
# Gain functions
# ---------------------------------------------------------------------------

def gain_sum_squares(candidate: int, subclique, r: WeightMatrix) -> float:
    """Sum of squared correlations between ``candidate`` and ``subclique``."""
    if candidate in subclique:
        raise InvalidInputError(f"vertex {candidate} already belongs to the sub-clique")
    row = r.values[candidate]
    return float(sum(row[j] ** 2 for j in sorted(subclique)))


def pairwise_mi_elliptical(rho: float) -> float:
    """Mutual information (nats) of two elliptical variables: -1/2 ln(1 - rho^2)."""
    if not abs(rho) < 1.0:
        raise NumericError(f"mutual information diverges at |rho| = {abs(rho)}")
    return -0.5 * math.log1p(-rho * rho)


def _logdet_block(r: np.ndarray, idx) -> float:
    sub = r[np.ix_(idx, idx)]
    try:
        c = linalg.cholesky(sub, lower=True)
    except linalg.LinAlgError as exc:
        raise NumericError(f"submatrix on {list(idx)} is singular or not positive definite") from exc
    return 2.0 * float(np.sum(np.log(np.diag(c))))


def gain_elliptical_mi(a, b, r: WeightMatrix) -> float:
    """Mutual information (nats) between two disjoint variable groups.

    ``1/2 ln(det R_a det R_b / det R_ab)`` for the elliptical family.
    """
    a, b = sorted(set(a)), sorted(set(b))
    if not a or not b:
        raise InvalidInputError("both groups must be non-empty")
    if set(a) & set(b):
        raise InvalidInputError(f"groups overlap on {sorted(set(a) & set(b))}")
    m = r.values
    return 0.5 * (_logdet_block(m, a) + _logdet_block(m, b) - _logdet_block(m, sorted(a + b)))


@dataclass(frozen=True)
class GainSpec:
    """Which gain an MFCF run maximizes and the matrix it is computed from.

    ``edge_weight`` sums ``reference[v, j]`` over the sub-clique,
    ``sum_squared_correlation`` sums squared correlations and
    ``elliptical_mi`` is the mutual information between the new vertex and
    the sub-clique. The last two need a correlation-kind reference.
    """

    variant: str
    reference: WeightMatrix

    def __post_init__(self):
        if self.variant not in GAIN_VARIANTS:
            raise ConfigError(f"unknown gain variant {self.variant!r}")
        if self.variant != EDGE_WEIGHT and self.reference.kind != CORRELATION:
            raise ConfigError(f"gain {self.variant!r} needs a correlation matrix, "
                              f"got kind {self.reference.kind!r}")

    def vector(self, s: tuple[int, ...]) -> np.ndarray:
        """Gain of attaching every vertex to sub-clique ``s``.

        Entries for members of ``s`` are meaningless. Singular blocks in the
        mutual-information variant come back as ``+inf`` so the caller can
        report them only if they would actually be chosen.
        """
        m = self.reference.values
        if self.variant == EDGE_WEIGHT:
            return _column_sum(m, s)
        if self.variant == SUM_SQUARES:
            return _column_sum(np.square(m), s)
        idx = list(s)
        try:
            chol = linalg.cho_factor(m[np.ix_(idx, idx)], lower=True)
        except linalg.LinAlgError as exc:
            raise NumericError(f"submatrix on {idx} is singular or not positive definite") from exc
        b = m[:, idx]
        q = np.sum(b.T * linalg.cho_solve(chol, b.T), axis=0)
        resid = 1.0 - q
        out = np.full(m.shape[0], np.inf)
        ok = resid > _SINGULAR_TOL
        out[ok] = -0.5 * np.log(resid[ok])
        return out

    def pair_matrix(self) -> np.ndarray:
        m = self.reference.values
        if self.variant == EDGE_WEIGHT:
            return m
        if self.variant == SUM_SQUARES:
            return np.square(m)
        r2 = np.minimum(np.square(m), 1.0)
        with np.errstate(divide="ignore"):
            return np.where(r2 < 1.0, -0.5 * np.log1p(-r2), np.inf)


def _column_sum(m: np.ndarray, s: tuple[int, ...]) -> np.ndarray:
    # fixed left-to-right order keeps TMFG and MFCF gains bit-identical
    g = m[:, s[0]].copy()
    for j in s[1:]:
        g += m[:, j]
    return g


# ---------------------------------------------------------------------------
# Spanning trees
# ---------------------------------------------------------------------------

def mst_prim(w: WeightMatrix) -> FilteredGraph:
    """Maximum spanning tree grown from vertex 0."""
    v = _check_positive(w)
    p = v.shape[0]
    inside = np.zeros(p, dtype=bool)
    inside[0] = True
    best = v[0].copy()
    partner = np.zeros(p, dtype=np.int64)
    pairs = []
    for _ in range(p - 1):
        cand = np.where(inside, -np.inf, best)
        j = int(np.argmax(cand))
        k = int(partner[j])
        pairs.append((min(j, k), max(j, k)))
        inside[j] = True
        row = v[j]
        better = ~inside & ((row > best) | ((row == best) & (j < partner)))
        best[better] = row[better]
        partner[better] = j
    return _graph(w, pairs)


def _sorted_pairs(v: np.ndarray) -> list[tuple[int, int]]:
    iu, ju = np.triu_indices(v.shape[0], 1)
    order = np.lexsort((ju, iu, -v[iu, ju]))
    return [(int(iu[k]), int(ju[k])) for k in order]


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def mst_kruskal(w: WeightMatrix) -> FilteredGraph:
    """Maximum spanning tree by descending-weight edge scan."""
    v = _check_positive(w)
    p = v.shape[0]
    ds = _DisjointSet(p)
    pairs = []
    for i, j in _sorted_pairs(v):
        if ds.union(i, j):
            pairs.append((i, j))
            if len(pairs) == p - 1:
                break
    return _graph(w, pairs)


# ---------------------------------------------------------------------------
# PMFG
# ---------------------------------------------------------------------------

def pmfg(w: WeightMatrix) -> FilteredGraph:
    """Planar maximally filtered graph.

    Edges are scanned in descending weight and kept whenever the graph stays
    planar, until the graph holds ``3p - 6`` edges.
    """
    v = _check_positive(w, min_p=3)
    p = v.shape[0]
    target = 3 * p - 6
    g = nx.Graph()
    g.add_nodes_from(range(p))
    ds = _DisjointSet(p)
    pairs = []
    for i, j in _sorted_pairs(v):
        # a bridge between components, or any graph with at most 8 edges, stays planar
        if ds.find(i) != ds.find(j) or len(pairs) < 8:
            ok = True
            g.add_edge(i, j)
        else:
            g.add_edge(i, j)
            ok = nx.check_planarity(g)[0]
            if not ok:
                g.remove_edge(i, j)
        if ok:
            ds.union(i, j)
            pairs.append((i, j))
            if len(pairs) == target:
                break
    return _graph(w, pairs)


# ---------------------------------------------------------------------------
# Clique expansion machinery shared by TMFG and MFCF
# ---------------------------------------------------------------------------

class GainStep(NamedTuple):
    vertex: int
    subclique: tuple[int, ...]
    gain: float


class CliqueForestResult(NamedTuple):
    """Output of the clique-expansion constructors.

    ``steps`` lists every vertex attachment in order, including those that
    build seed cliques, with the gain realized by each.
    """

    graph: FilteredGraph
    tree: CliqueTree
    steps: tuple[GainStep, ...] = ()

    @property
    def total_gain(self) -> float:
        return float(sum(s.gain for s in self.steps))


class _GainTable:
    """Per sub-clique cache of the best outside vertex.

    The outside set only shrinks, so a cached argmax stays valid until its
    vertex gets absorbed.
    """

    def __init__(self, vector: Callable[[tuple[int, ...]], np.ndarray], outside: np.ndarray):
        self._vector = vector
        self._vectors: dict[tuple[int, ...], np.ndarray] = {}
        self._best: dict[tuple[int, ...], tuple[float, int]] = {}
        self.outside = outside

    def vector(self, s):
        vec = self._vectors.get(s)
        if vec is None:
            vec = self._vector(s)
            self._vectors[s] = vec
        return vec

    def best_for(self, s) -> tuple[float, int] | None:
        cached = self._best.get(s)
        if cached is not None and self.outside[cached[1]]:
            return cached
        if not self.outside.any():
            return None
        masked = np.where(self.outside, self.vector(s), -np.inf)
        v = int(np.argmax(masked))
        if not self.outside[v]:
            return None
        out = (float(masked[v]), v)
        self._best[s] = out
        return out

    def select(self, cands: Iterable[tuple[int, ...]]):
        best = None
        for s in sorted(cands):
            hit = self.best_for(s)
            if hit is None:
                continue
            val, v = hit
            if best is None or val > best[0] or (val == best[0] and v < best[1]):
                best = (val, v, s)
        if best is not None and not math.isfinite(best[0]):
            raise NumericError(f"gain for attaching vertex {best[1]} to {list(best[2])} "
                               "is undefined (singular submatrix on "
                               f"{sorted(best[2] + (best[1],))})")
        return best


def _growth_steps(vector, members) -> list[GainStep]:
    """Gains realized by building a seed clique one vertex at a time."""
    out = []
    for n_in in range(1, len(members)):
        cur = tuple(sorted(members[:n_in]))
        val = float(vector(cur)[members[n_in]])
        if not math.isfinite(val):
            raise NumericError(f"singular submatrix on {sorted(members[:n_in + 1])}")
        out.append(GainStep(members[n_in], cur, val))
    return out


def _tree(p, cliques, seps, names) -> CliqueTree:
    return CliqueTree(p, tuple(tuple(c) for c in cliques), tuple(seps), names)


# ---------------------------------------------------------------------------
# TMFG
# ---------------------------------------------------------------------------

def tmfg_seed(w: WeightMatrix) -> tuple[int, ...]:
    """Seed tetrahedron of the TMFG.

    The triangle with the largest total edge weight, plus the outside vertex
    with the largest weight sum towards it. For ``p == 3`` the triangle.
    """
    v = _check_positive(w, min_p=3)
    p = v.shape[0]
    best, tri = -np.inf, None
    idx = np.arange(p)
    for a in range(p - 2):
        # s[b, c] = w_ab + w_bc + w_ac for a < b < c
        s = v[a, :, None] + v + v[a, None, :]
        mask = (idx[:, None] > a) & (idx[None, :] > idx[:, None])
        s = np.where(mask, s, -np.inf)
        k = int(np.argmax(s))
        if s.flat[k] > best:
            best, tri = s.flat[k], (a, k // p, k % p)
    if p == 3:
        return tri
    gains = np.where(np.isin(idx, tri), -np.inf, _column_sum(v, tri))
    return tri + (int(np.argmax(gains)),)


def tmfg(w: WeightMatrix) -> CliqueForestResult:
    """Triangulated maximally filtered graph.

    Starts from :func:`tmfg_seed` and repeatedly inserts the outside vertex
    with the largest weight sum to a free face triangle. Every face is used
    as a separator at most once. The clique tree records the tetrahedra in
    insertion order.
    """
    v = _check_positive(w, min_p=3)
    p = v.shape[0]
    seed = tmfg_seed(w)
    if p == 3:
        return CliqueForestResult(_graph(w, combinations(sorted(seed), 2)),
                                  _tree(p, [sorted(seed)], [], w.names))
    outside = np.ones(p, dtype=bool)
    outside[list(seed)] = False
    table = _GainTable(lambda s: _column_sum(v, s), outside)
    steps = _growth_steps(table.vector, seed)
    tetra = tuple(sorted(seed))
    cliques = [tetra]
    seps: list[Separator] = []
    faces = {f: 0 for f in combinations(tetra, 3)}
    pairs = set(combinations(tetra, 2))
    for _ in range(p - 4):
        val, x, face = table.select(faces)
        owner = faces.pop(face)
        new = tuple(sorted(face + (x,)))
        k = len(cliques)
        cliques.append(new)
        seps.append(Separator(face, owner, k))
        for f in combinations(new, 3):
            if x in f:
                faces[f] = k
        pairs.update((min(x, j), max(x, j)) for j in face)
        outside[x] = False
        steps.append(GainStep(x, face, val))
    return CliqueForestResult(_graph(w, sorted(pairs)), _tree(p, cliques, seps, w.names), tuple(steps))


# ---------------------------------------------------------------------------
# MFCF
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MfcfConfig:
    """Clique-size bounds, separator multiplicity cap and gain threshold.

    ``max_multiplicity=None`` means unbounded. When ``gain_threshold`` is
    set and the best attachment gain falls below it, a new component is
    seeded instead, so the result is a forest. ``seed_clique`` pins the
    vertices of the first seed clique (grown in the listed order); by
    default the seed is grown greedily from the best pair.
    """

    min_clique: int = 4
    max_clique: int = 4
    max_multiplicity: int | None = None
    gain_threshold: float | None = None
    seed_clique: tuple[int, ...] | None = None

    def __post_init__(self):
        problems = []
        if not isinstance(self.min_clique, (int, np.integer)) or self.min_clique < 2:
            problems.append(f"min_clique must be an integer >= 2, got {self.min_clique!r}")
        if not isinstance(self.max_clique, (int, np.integer)) or self.max_clique < self.min_clique:
            problems.append(f"max_clique must be an integer >= min_clique, got {self.max_clique!r}")
        mm = self.max_multiplicity
        if mm is not None and (not isinstance(mm, (int, np.integer)) or mm < 1):
            problems.append(f"max_multiplicity must be an integer >= 1 or None, got {mm!r}")
        if self.gain_threshold is not None and not math.isfinite(self.gain_threshold):
            problems.append("gain_threshold must be finite")
        if self.seed_clique is not None:
            seed = tuple(int(x) for x in self.seed_clique)
            if len(set(seed)) != len(seed):
                problems.append("seed_clique repeats a vertex")
            object.__setattr__(self, "seed_clique", seed)
        if problems:
            raise ConfigError("; ".join(problems))

    def check_dimension(self, p: int):
        if self.max_clique > p:
            raise ConfigError(f"max_clique={self.max_clique} exceeds the number of variables p={p}")
        seed = self.seed_clique
        if seed is not None:
            if not self.min_clique <= len(seed) <= self.max_clique:
                raise ConfigError(f"seed_clique size {len(seed)} outside "
                                  f"[{self.min_clique}, {self.max_clique}]")
            if min(seed) < 0 or max(seed) >= p:
                raise ConfigError(f"seed_clique has a vertex outside [0, {p})")


def mfcf(w: WeightMatrix, gain: GainSpec | str = EDGE_WEIGHT,
         cfg: MfcfConfig | None = None) -> CliqueForestResult:
    """Maximally filtered clique forest by clique expansion.

    Each step attaches the outside vertex ``v`` to the admissible sub-clique
    ``s`` (``min_clique - 1 <= |s| < max_clique``) with the largest gain.
    If ``s`` is itself a clique it grows in place; otherwise ``s | {v}``
    becomes a new clique hanging off the lowest-index clique holding ``s``,
    with ``s`` as separator. A sub-clique stops being admissible as a
    separator once it has been used ``max_multiplicity`` times.

    ``w`` supplies the output edge weights; a string ``gain`` means that
    variant computed on ``w``.
    """
    cfg = cfg or MfcfConfig()
    if isinstance(gain, str):
        gain = GainSpec(gain, w)
    p = w.p
    if gain.reference.p != p:
        raise InvalidInputError(f"gain matrix is {gain.reference.p}x{gain.reference.p}, weights are {p}x{p}")
    cfg.check_dimension(p)
    if gain.variant == EDGE_WEIGHT:
        _check_positive(gain.reference)
    wv = w.values
    lo, hi, cap = cfg.min_clique - 1, cfg.max_clique - 1, cfg.max_multiplicity

    outside = np.ones(p, dtype=bool)
    table = _GainTable(gain.vector, outside)
    pair_gain = None
    cliques: list[tuple[int, ...]] = []
    clique_index: dict[tuple[int, ...], int] = {}
    owner: dict[tuple[int, ...], int] = {}
    cands: set[tuple[int, ...]] = set()
    usage: Counter = Counter()
    seps: list[Separator] = []
    pairs: set[tuple[int, int]] = set()
    steps: list[GainStep] = []

    def register(k: int):
        c = cliques[k]
        for m in range(lo, min(hi, len(c)) + 1):
            for s in combinations(c, m):
                cands.add(s)
                if owner.get(s, k) >= k:
                    owner[s] = k

    def admissible(s) -> bool:
        return s in clique_index or cap is None or usage[s] < cap

    def seed_component(fixed=None):
        nonlocal pair_gain
        free = np.flatnonzero(outside)
        if fixed is not None:
            members = list(fixed)
        elif len(free) == 1:
            members = [int(free[0])]
        else:
            if pair_gain is None:
                pair_gain = gain.pair_matrix()
            sub = pair_gain[np.ix_(free, free)]
            sub = np.where(np.triu(np.ones_like(sub, dtype=bool), 1), sub, -np.inf)
            k = int(np.argmax(sub))
            members = [int(free[k // len(free)]), int(free[k % len(free)])]
            while len(members) < cfg.min_clique and len(members) < len(free):
                cur = tuple(sorted(members))
                vec = np.where(outside, table.vector(cur), -np.inf)
                vec[members] = -np.inf
                members.append(int(np.argmax(vec)))
        steps.extend(_growth_steps(table.vector, members))
        clique = tuple(sorted(members))
        outside[list(clique)] = False
        cliques.append(clique)
        clique_index[clique] = len(cliques) - 1
        register(len(cliques) - 1)
        pairs.update(combinations(clique, 2))

    seed_component(cfg.seed_clique)
    while outside.any():
        best = table.select(s for s in cands if admissible(s))
        if best is None or (cfg.gain_threshold is not None and best[0] < cfg.gain_threshold):
            seed_component()
            continue
        val, x, s = best
        new = tuple(sorted(s + (x,)))
        if s in clique_index:
            k = clique_index.pop(s)
            cliques[k] = new
        else:
            k = len(cliques)
            cliques.append(new)
            seps.append(Separator(s, owner[s], k))
            usage[s] += 1
        clique_index[new] = k
        register(k)
        outside[x] = False
        pairs.update((min(x, j), max(x, j)) for j in s)
        steps.append(GainStep(x, s, val))
    graph = FilteredGraph(p, {e: wv[e] for e in sorted(pairs)}, w.names)
    return CliqueForestResult(graph, _tree(p, cliques, seps, w.names), tuple(steps))
