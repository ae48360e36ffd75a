"""Data types and structural primitives.

Everything in here is immutable once built: array fields are copied and
flagged read-only, graph and tree containers are frozen dataclasses.
Vertices are 0-based integers; human-readable labels travel alongside in
``names`` and are only used when writing artifacts.
"""
from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import networkx as nx
import numpy as np

from .errors import (
    DegenerateVariableError,
    InvalidInputError,
    NotChordalError,
)

COVARIANCE = "covariance"
CORRELATION = "correlation"
SQUARED_CORRELATION = "squared_correlation"
GENERIC_SIMILARITY = "generic_similarity"
WEIGHT_KINDS = (COVARIANCE, CORRELATION, SQUARED_CORRELATION, GENERIC_SIMILARITY)

SYMMETRY_WARN_TOL = 1e-9
_UNIT_TOL = 1e-12


def default_names(p: int) -> tuple[str, ...]:
    return tuple(f"v{i}" for i in range(p))


def _frozen_array(values, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != ndim:
        raise InvalidInputError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _check_names(names, p: int, what: str) -> tuple[str, ...]:
    if names is None:
        return default_names(p)
    names = tuple(str(n) for n in names)
    if len(names) != p:
        raise InvalidInputError(f"{what}: expected {p} names, got {len(names)}")
    if len(set(names)) != p:
        dup = [n for n, c in Counter(names).items() if c > 1]
        raise InvalidInputError(f"{what}: duplicate variable names {dup}")
    return names


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DataMatrix:
    """n observations by p variables."""

    values: np.ndarray
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        arr = _frozen_array(self.values, 2, "data")
        n, p = arr.shape
        if n < 2 or p < 2:
            raise InvalidInputError(f"data needs at least 2 rows and 2 columns, got {n}x{p}")
        bad = np.argwhere(~np.isfinite(arr))
        if len(bad):
            r, c = bad[0]
            raise InvalidInputError(f"non-finite entry at row {r}, column {c}")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "names", _check_names(self.names, p, "data"))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, DataMatrix):
            return NotImplemented
        return self.names == other.names and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Symmetric p x p matrix tagged with what it measures.

    Inputs that are asymmetric by more than ``SYMMETRY_WARN_TOL`` trigger a
    warning; every input is replaced by ``(W + W.T) / 2``.
    """

    values: np.ndarray
    kind: str = GENERIC_SIMILARITY
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise InvalidInputError(f"unknown weight kind {self.kind!r}")
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidInputError(f"weight matrix must be square, got shape {arr.shape}")
        bad = np.argwhere(~np.isfinite(arr))
        if len(bad):
            i, j = bad[0]
            raise InvalidInputError(f"non-finite weight at ({i}, {j})")
        asym = float(np.max(np.abs(arr - arr.T))) if arr.size else 0.0
        if asym > SYMMETRY_WARN_TOL:
            warnings.warn(f"weight matrix asymmetric by {asym:.3g}; symmetrizing", stacklevel=3)
        arr = (arr + arr.T) / 2.0
        p = arr.shape[0]
        if self.kind == CORRELATION:
            if np.any(np.abs(np.diag(arr) - 1.0) > _UNIT_TOL):
                raise InvalidInputError("correlation matrix must have unit diagonal")
            if np.any(np.abs(arr) > 1.0 + _UNIT_TOL):
                i, j = np.argwhere(np.abs(arr) > 1.0 + _UNIT_TOL)[0]
                raise InvalidInputError(f"correlation entry ({i}, {j}) outside [-1, 1]")
            np.fill_diagonal(arr, 1.0)
            np.clip(arr, -1.0, 1.0, out=arr)
        elif self.kind in (SQUARED_CORRELATION, GENERIC_SIMILARITY):
            off = arr[~np.eye(p, dtype=bool)]
            if np.any(off < 0):
                i, j = np.argwhere((arr < 0) & ~np.eye(p, dtype=bool))[0]
                raise InvalidInputError(f"{self.kind} weight ({i}, {j}) is negative")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "names", _check_names(self.names, p, "weight matrix"))

    @property
    def p(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other):
        if not isinstance(other, WeightMatrix):
            return NotImplemented
        return (self.kind == other.kind and self.names == other.names
                and np.array_equal(self.values, other.values))


def _edge_key(i, j, p: int) -> tuple[int, int]:
    i, j = int(i), int(j)
    if i == j:
        raise InvalidInputError(f"self-loop on vertex {i}")
    if not (0 <= i < p and 0 <= j < p):
        raise InvalidInputError(f"edge ({i}, {j}) has an endpoint outside [0, {p})")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class FilteredGraph:
    """Undirected simple weighted graph on vertices ``0..p-1``.

    ``edges`` maps ``(i, j)`` with ``i < j`` to the edge weight. The
    constructor also accepts an iterable of ``(i, j)`` or ``(i, j, w)``
    tuples; listing the same pair twice is an error.
    """

    p: int
    edges: Mapping[tuple[int, int], float] = field(default_factory=dict)
    names: tuple[str, ...] | None = None
    _adj: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p = int(self.p)
        if p < 0:
            raise InvalidInputError("vertex count must be non-negative")
        items = self.edges.items() if isinstance(self.edges, Mapping) else (
            ((e[0], e[1]), e[2] if len(e) > 2 else 1.0) for e in self.edges
        )
        clean: dict[tuple[int, int], float] = {}
        for (i, j), w in items:
            key = _edge_key(i, j, p)
            if key in clean:
                raise InvalidInputError(f"duplicate edge {key}")
            clean[key] = float(w)
        clean = dict(sorted(clean.items()))
        adj = [set() for _ in range(p)]
        for i, j in clean:
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "edges", clean)
        object.__setattr__(self, "names", _check_names(self.names, p, "graph"))
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._adj[i]

    def total_weight(self) -> float:
        return float(sum(self.edges.values()))

    def adjacency_matrix(self, weighted: bool = True) -> np.ndarray:
        a = np.zeros((self.p, self.p))
        for (i, j), w in self.edges.items():
            a[i, j] = a[j, i] = w if weighted else 1.0
        return a

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.p))
        g.add_weighted_edges_from((i, j, w) for (i, j), w in self.edges.items())
        return g


@dataclass(frozen=True)
class Separator:
    members: tuple[int, ...]
    parent: int
    child: int


@dataclass(frozen=True)
class CliqueTree:
    """Cliques of a chordal graph joined into a junction forest.

    Cliques are stored as sorted vertex tuples, separators as
    :class:`Separator` records pointing at clique indices. The invariants
    (forest shape, separator = parent & child, cover, running intersection)
    are checked on construction.
    """

    p: int
    cliques: tuple[tuple[int, ...], ...]
    separators: tuple[Separator, ...] = ()
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        cliques = tuple(tuple(sorted(int(v) for v in c)) for c in self.cliques)
        seps = tuple(
            s if isinstance(s, Separator)
            else Separator(tuple(s["members"]), int(s["parent"]), int(s["child"]))
            for s in self.separators
        )
        seps = tuple(Separator(tuple(sorted(int(v) for v in s.members)), int(s.parent), int(s.child))
                     for s in seps)
        object.__setattr__(self, "cliques", cliques)
        object.__setattr__(self, "separators", seps)
        object.__setattr__(self, "names", _check_names(self.names, int(self.p), "clique tree"))
        self._validate()

    def _validate(self):
        p, cliques = self.p, self.cliques
        covered = np.zeros(p, dtype=int)
        for k, c in enumerate(cliques):
            if not c:
                raise InvalidInputError(f"clique {k} is empty")
            if len(set(c)) != len(c):
                raise InvalidInputError(f"clique {k} repeats a vertex")
            if c[0] < 0 or c[-1] >= p:
                raise InvalidInputError(f"clique {k} has a vertex outside [0, {p})")
            covered[list(c)] += 1
        if np.any(covered == 0):
            raise InvalidInputError(f"vertex {int(np.argmin(covered))} is in no clique")
        parent = list(range(len(cliques)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        sep_count = np.zeros(p, dtype=int)
        for k, s in enumerate(self.separators):
            for idx in (s.parent, s.child):
                if not 0 <= idx < len(cliques):
                    raise InvalidInputError(f"separator {k} points at missing clique {idx}")
            a, b = set(cliques[s.parent]), set(cliques[s.child])
            if set(s.members) != a & b:
                raise InvalidInputError(f"separator {k} is not the intersection of its cliques")
            if not (len(s.members) < len(a) and len(s.members) < len(b)):
                raise InvalidInputError(f"separator {k} is not strictly inside both cliques")
            ra, rb = find(s.parent), find(s.child)
            if ra == rb:
                raise InvalidInputError(f"separator {k} closes a cycle in the clique tree")
            parent[ra] = rb
            sep_count[list(s.members)] += 1
        # in a forest the cliques holding v induce a subforest; it is a
        # single subtree iff (#nodes - #edges) == 1
        bad = np.nonzero(covered - sep_count != 1)[0]
        if len(bad):
            raise InvalidInputError(f"running-intersection property fails at vertex {int(bad[0])}")

    @property
    def n_components(self) -> int:
        return len(self.cliques) - len(self.separators)

    @property
    def multiplicity(self) -> dict[tuple[int, ...], int]:
        """Usage count of each distinct separator member-set."""
        return dict(Counter(s.members for s in self.separators))

    def edges(self) -> frozenset[tuple[int, int]]:
        out = set()
        for c in self.cliques:
            for a in range(len(c)):
                for b in range(a + 1, len(c)):
                    out.add((c[a], c[b]))
        return frozenset(out)

    def to_graph(self, weights: np.ndarray | None = None) -> FilteredGraph:
        """Graph whose edges are all within-clique pairs."""
        edges = {e: (float(weights[e]) if weights is not None else 1.0) for e in self.edges()}
        return FilteredGraph(self.p, edges, self.names)


class SimplexSet(NamedTuple):
    """Complete subgraphs grouped by dimension (``by_dim[d]`` holds (d+1)-sets)."""

    by_dim: tuple[tuple[tuple[int, ...], ...], ...]

    def counts(self) -> list[int]:
        return [len(s) for s in self.by_dim]

    def all(self) -> list[tuple[int, ...]]:
        return [s for dim in self.by_dim for s in dim]

    def __contains__(self, simplex) -> bool:
        s = tuple(sorted(simplex))
        d = len(s) - 1
        return 0 <= d < len(self.by_dim) and s in set(self.by_dim[d])


class ChordalityResult(NamedTuple):
    chordal: bool
    ordering: tuple[int, ...] | None


# ---------------------------------------------------------------------------
# Covariance estimation
# ---------------------------------------------------------------------------

def _as_data(data) -> DataMatrix:
    return data if isinstance(data, DataMatrix) else DataMatrix(data)


def estimate_covariance(data, shrinkage: float = 0.0) -> WeightMatrix:
    """Unbiased sample covariance shrunk toward its own diagonal.

    Returns ``(1 - shrinkage) * S + shrinkage * diag(S)``.
    """
    if not 0.0 <= shrinkage <= 1.0:
        raise InvalidInputError(f"shrinkage must lie in [0, 1], got {shrinkage}")
    data = _as_data(data)
    s = np.cov(data.values, rowvar=False, ddof=1)
    if shrinkage:
        s = (1.0 - shrinkage) * s + shrinkage * np.diag(np.diag(s))
    return WeightMatrix(s, COVARIANCE, data.names)


def covariance_to_correlation(cov: WeightMatrix) -> WeightMatrix:
    """R_ij = S_ij / sqrt(S_ii S_jj); raises on a non-positive variance."""
    s = cov.values
    d = np.diag(s)
    bad = np.nonzero(~(d > 0))[0]
    if len(bad):
        k = int(bad[0])
        raise DegenerateVariableError(k, f"variable {cov.names[k]!r} (column {k}) has non-positive variance")
    sd = np.sqrt(d)
    r = s / np.outer(sd, sd)
    np.fill_diagonal(r, 1.0)
    np.clip(r, -1.0, 1.0, out=r)
    return WeightMatrix(r, CORRELATION, cov.names)


def squared_correlation(corr: WeightMatrix) -> WeightMatrix:
    return WeightMatrix(np.square(corr.values), SQUARED_CORRELATION, corr.names)


def default_weights(data, shrinkage: float = 0.0) -> tuple[WeightMatrix, WeightMatrix]:
    """The standard pipeline: covariance, correlation, squared correlation.

    Returns ``(correlation, squared_correlation)``.
    """
    corr = covariance_to_correlation(estimate_covariance(data, shrinkage))
    return corr, squared_correlation(corr)


# ---------------------------------------------------------------------------
# Chordality and clique trees
# ---------------------------------------------------------------------------

def _mcs(g: FilteredGraph) -> tuple[list[int], list[list[int]]]:
    """Maximum cardinality search.

    Returns the visit order and, for each visited vertex, its neighbours
    visited earlier (in visit order). Ties go to the smallest index, so the
    search starts at vertex 0.
    """
    p = g.p
    label = np.zeros(p, dtype=np.int64)
    visited = np.zeros(p, dtype=bool)
    pos = np.full(p, -1, dtype=np.int64)
    order: list[int] = []
    earlier: list[list[int]] = []
    masked = np.empty(p, dtype=np.int64)
    for step in range(p):
        np.copyto(masked, label)
        masked[visited] = -1
        v = int(np.argmax(masked))
        visited[v] = True
        pos[v] = step
        order.append(v)
        nb = [u for u in g.neighbors(v) if visited[u] and u != v]
        nb.sort(key=lambda u: pos[u])
        earlier.append(nb)
        for u in g.neighbors(v):
            if not visited[u]:
                label[u] += 1
    return order, earlier


def is_chordal(g: FilteredGraph) -> ChordalityResult:
    """Chordality test by maximum cardinality search plus fill-in check.

    When the graph is chordal the returned ordering is a perfect elimination
    ordering: eliminating vertices in that order never needs a fill edge.
    """
    order, earlier = _mcs(g)
    # Tarjan-Yannakakis: for each v, its earlier neighbours minus the most
    # recent one (u) must be adjacent to u
    for v, nb in zip(order, earlier):
        if len(nb) < 2:
            continue
        u = nb[-1]
        adj_u = g.neighbors(u)
        for w in nb[:-1]:
            if w not in adj_u:
                return ChordalityResult(False, None)
    return ChordalityResult(True, tuple(reversed(order)))


def extract_clique_tree(g: FilteredGraph) -> CliqueTree:
    """Maximal cliques of a chordal graph joined into a junction forest.

    Cliques come out in maximum-cardinality-search discovery order; each new
    clique hangs off the clique holding its most recently visited earlier
    neighbour (Blair & Peyton), which yields a valid junction tree without
    any pairwise intersection search.
    """
    if not is_chordal(g).chordal:
        raise NotChordalError("graph is not chordal")
    order, earlier = _mcs(g)
    cliques: list[list[int]] = []
    seps: list[Separator] = []
    clique_of = {}
    prev_card = 0
    for v, nb in zip(order, earlier):
        card = len(nb)
        if card <= prev_card or not cliques:
            cliques.append(nb + [v])
            k = len(cliques) - 1
            if card:
                u = nb[-1]
                seps.append(Separator(tuple(sorted(nb)), clique_of[u], k))
        else:
            cliques[-1].append(v)
            k = len(cliques) - 1
        clique_of[v] = k
        prev_card = card
    return CliqueTree(g.p, tuple(tuple(c) for c in cliques), tuple(seps), g.names)


# ---------------------------------------------------------------------------
# Planarity and simplices
# ---------------------------------------------------------------------------

def is_planar(g: FilteredGraph) -> bool:
    """True iff ``g`` embeds in the sphere without crossings (LR test)."""
    if g.n_edges <= 8 or g.p <= 4:
        return True  # K5 has 10 edges, K3,3 has 9
    return nx.check_planarity(g.to_networkx())[0]


def enumerate_simplices(g: FilteredGraph, d_max: int) -> SimplexSet:
    """All complete subgraphs with at most ``d_max + 1`` vertices."""
    if d_max < 0:
        raise InvalidInputError("d_max must be non-negative")
    levels = [tuple((v,) for v in range(g.p))]
    for _ in range(d_max):
        nxt = []
        for s in levels[-1]:
            common = set(g.neighbors(s[0]))
            for v in s[1:]:
                common &= g.neighbors(v)
            nxt.extend(s + (u,) for u in sorted(common) if u > s[-1])
        if not nxt:
            break
        levels.append(tuple(nxt))
    return SimplexSet(tuple(levels))

