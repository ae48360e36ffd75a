"""Invariants checked on generated inputs."""
from __future__ import annotations

import itertools

import networkx as nx
import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import random_weights
from ifnet import (
    FilteredGraph, MfcfConfig, WeightMatrix, edge_pvalue, enumerate_simplices, export_hnn,
    extract_clique_tree, is_chordal, is_planar, logo_logdet, logo_precision, mfcf, mst_kruskal,
    mst_prim, tmfg,
)
from ifnet.construct import EDGE_WEIGHT
from ifnet.core import COVARIANCE
from ifnet.io import format_edges, format_tree, parse_edges, parse_tree
from oracles import elimination_needs_fill

seeds = st.integers(0, 2**32 - 1)
SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def chordal_graphs(draw, max_p=10):
    p = draw(st.integers(2, max_p))
    pairs = list(itertools.combinations(range(p), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    g = nx.Graph(chosen)
    g.add_nodes_from(range(p))
    g = nx.complete_to_chordal_graph(g)[0]
    return FilteredGraph(p, [tuple(e) for e in g.edges()])


@SETTINGS
@given(chordal_graphs())
def test_clique_tree_reconstructs_graph(g):
    tree = extract_clique_tree(g)
    assert tree.edges() == g.edge_set()
    res = is_chordal(tree.to_graph())
    assert res.chordal
    assert not elimination_needs_fill(g.p, g.edges, res.ordering)
    assert len(tree.separators) == len(tree.cliques) - nx.number_connected_components(g.to_networkx())


@SETTINGS
@given(seeds, st.integers(2, 12))
def test_spanning_tree_algorithms_agree(seed, p):
    w = random_weights(np.random.default_rng(seed), p)
    a, b = mst_prim(w), mst_kruskal(w)
    assert a.edge_set() == b.edge_set() and a.n_edges == p - 1
    assert nx.is_tree(a.to_networkx())


@SETTINGS
@given(seeds, st.integers(4, 20))
def test_tmfg_structure(seed, p):
    res = tmfg(random_weights(np.random.default_rng(seed), p))
    assert res.graph.n_edges == 3 * p - 6
    assert is_planar(res.graph) and is_chordal(res.graph).chordal
    assert len(res.tree.cliques) == p - 3


@SETTINGS
@given(seeds, st.integers(5, 14), st.integers(2, 4), st.integers(0, 2), st.one_of(st.none(), st.integers(1, 3)))
def test_mfcf_respects_configuration(seed, p, lo, extra, mult):
    hi = min(lo + extra, p)
    res = mfcf(random_weights(np.random.default_rng(seed), p), EDGE_WEIGHT, MfcfConfig(lo, hi, mult))
    assert is_chordal(res.graph).chordal
    assert res.tree.edges() == res.graph.edge_set()
    assert all(lo <= len(c) <= hi for c in res.tree.cliques)
    if mult is not None:
        assert all(v <= mult for v in res.tree.multiplicity.values())


@SETTINGS
@given(chordal_graphs(8), seeds)
def test_logo_inverse_matches_covariance_on_support(g, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((g.p, 2 * g.p + 2))
    s = a @ a.T / a.shape[1] + 0.05 * np.eye(g.p)
    tree = extract_clique_tree(g)
    j = logo_precision(WeightMatrix(s, COVARIANCE), tree)
    inv = np.linalg.inv(j.to_dense())
    idx = np.array(sorted(set(tree.edges()) | {(v, v) for v in range(g.p)}))
    np.testing.assert_allclose(inv[idx[:, 0], idx[:, 1]], s[idx[:, 0], idx[:, 1]], atol=1e-8)
    assert abs(logo_logdet(WeightMatrix(s, COVARIANCE), tree) - np.linalg.slogdet(j.to_dense())[1]) < 1e-8


@SETTINGS
@given(st.integers(1, 12), st.data())
def test_pvalue_bounds_and_monotonicity(r, data):
    p = data.draw(st.integers(2, 14).filter(lambda q: q * (q - 1) // 2 >= r))
    vals = [edge_pvalue(f, r, p) for f in range(r + 1)]
    assert vals[0] == 1.0
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert all(x >= y for x, y in zip(vals, vals[1:]))


@SETTINGS
@given(chordal_graphs(7))
def test_simplices_are_closed_under_faces(g):
    simp = enumerate_simplices(g, 3)
    present = set(simp.all())
    for s in present:
        for k in range(len(s)):
            face = s[:k] + s[k + 1:]
            assert not face or face in present


@SETTINGS
@given(chordal_graphs(7), st.sampled_from(["layered", "flat"]))
def test_hnn_is_a_dag_into_final(g, mode):
    if g.n_edges == 0:
        return
    spec = export_hnn(g, mode, 3)
    dag = nx.DiGraph(list(spec.edges))
    assert nx.is_directed_acyclic_graph(dag)
    assert spec.successors(spec.final) == []
    assert all(nx.has_path(dag, n.id, spec.final) for n in spec.nodes if n.id in dag and n.id != spec.final)


@SETTINGS
@given(chordal_graphs(9), seeds)
def test_text_formats_round_trip(g, seed):
    rng = np.random.default_rng(seed)
    g = FilteredGraph(g.p, {e: float(rng.standard_normal()) for e in g.edges}, g.names)
    assert parse_edges(format_edges(g), g.names) == g
    tree = extract_clique_tree(g)
    assert parse_tree(format_tree(tree)) == tree
