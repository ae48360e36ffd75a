from __future__ import annotations

import math

import networkx as nx
import numpy as np
import pytest

from conftest import random_spd
from ifnet import (
    CliqueTree, FilteredGraph, HnnSpec, WeightMatrix, export_hnn, feature_ranking, logo_precision,
    markowitz_weights,
)
from ifnet.core import COVARIANCE
from ifnet.errors import InvalidInputError, UndefinedCentralityError

TRIANGLE_NAMES = ("1", "2", "3", "4")


class TestRanking:
    def test_degree_star(self):
        g = FilteredGraph(4, [(3, 0), (3, 1), (3, 2)])
        rk = feature_ranking(g, "degree")
        assert rk.order == (3, 0, 1, 2) and rk.top(1) == (3,)
        assert list(rk.scores) == [1, 1, 1, 3]

    def test_path_eigenvector(self):
        rk = feature_ranking(FilteredGraph(3, [(0, 1), (1, 2)]), "eigenvector")
        want = np.array([1, math.sqrt(2), 1]) / (2 + math.sqrt(2))
        np.testing.assert_allclose(rk.scores, want, atol=1e-9)
        assert rk.order == (1, 0, 2)

    def test_weighted_eigenvector_matches_networkx(self, rng):
        g = nx.gnp_random_graph(12, 0.4, seed=3)
        fg = FilteredGraph(12, [(i, j, rng.uniform(0.1, 1)) for i, j in g.edges()])
        ref = nx.eigenvector_centrality_numpy(fg.to_networkx(), weight="weight")
        ref = np.array([ref[v] for v in range(12)])
        np.testing.assert_allclose(feature_ranking(fg, "eigenvector").scores, ref / ref.sum(), atol=1e-8)

    def test_empty_graph(self):
        with pytest.raises(UndefinedCentralityError):
            feature_ranking(FilteredGraph(3, []), "eigenvector")
        assert feature_ranking(FilteredGraph(3, []), "degree").order == (0, 1, 2)
        with pytest.raises(InvalidInputError):
            feature_ranking(FilteredGraph(3, []), "pagerank")


class TestMarkowitz:
    def test_closed_form(self):
        j = np.array([[2.0, -1.0], [-1.0, 2.0]])
        w = markowitz_weights(j, [1.0, 0.0], lam=2.0, gamma=1.0)
        np.testing.assert_allclose(w.w, [5.0, -1.0])

    def test_sparse_equals_dense_on_full_clique(self, rng):
        s = random_spd(rng, 5)
        jsp = logo_precision(WeightMatrix(s, COVARIANCE), CliqueTree(5, [tuple(range(5))]))
        mu = rng.standard_normal(5)
        a = markowitz_weights(np.linalg.inv(s), mu, 0.5, 0.1).w
        b = markowitz_weights(jsp, mu, 0.5, 0.1).w
        np.testing.assert_allclose(a, b, atol=1e-10)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            markowitz_weights(np.eye(3), [1.0, 2.0], 1.0, 0.0)


class TestHnn:
    def test_triangle_with_tail_layered(self):
        g = FilteredGraph(4, [(0, 1), (0, 2), (1, 2), (2, 3)], TRIANGLE_NAMES)
        spec = export_hnn(g, "layered", 2)
        layers = {}
        for n in spec.nodes:
            layers.setdefault(n.layer, set()).add(n.id)
        assert layers[0] == {"1", "2", "3", "4"}
        assert layers[1] == {"1-2", "1-3", "2-3", "3-4"}
        assert layers[2] == {"1-2-3"}
        assert layers[3] == {"final"}
        assert set(spec.predecessors("final")) == {"1-2-3", "3-4"}
        assert set(spec.predecessors("1-2-3")) == {"1-2", "1-3", "2-3"}
        assert set(spec.predecessors("3-4")) == {"3", "4"}
        assert spec.successors("final") == []

    def test_single_triangle_flat(self):
        g = FilteredGraph(3, [(0, 1), (0, 2), (1, 2)], TRIANGLE_NAMES[:3])
        spec = export_hnn(g, "flat", 2)
        inputs = [n.id for n in spec.nodes if n.layer == 0]
        hidden = [n.id for n in spec.nodes if n.layer == 1]
        assert inputs == ["1", "2", "3"]
        assert set(hidden) == {"1-2", "1-3", "2-3", "1-2-3"}
        assert set(spec.predecessors("final")) == set(hidden)
        assert set(spec.predecessors("1-2-3")) == {"1", "2", "3"}

    def test_isolated_vertex_and_name_clash(self):
        g = FilteredGraph(3, [(0, 1)], ("final", "b", "c"))
        spec = export_hnn(g, "layered", 2)
        assert spec.final == "_final"
        # members follow vertex order, not name order
        assert set(spec.predecessors("_final")) == {"final-b", "c"}

    def test_acyclic_and_fed(self, rng):
        g = nx.gnp_random_graph(9, 0.5, seed=4)
        spec = export_hnn(FilteredGraph(9, list(g.edges())), "layered", 3)
        dag = nx.DiGraph(list(spec.edges))
        assert nx.is_directed_acyclic_graph(dag)
        for n in spec.nodes:
            if n.layer > 0:
                assert spec.predecessors(n.id)
            for t in spec.successors(n.id):
                assert spec.node(t).layer > n.layer

    def test_round_trip(self):
        g = FilteredGraph(4, [(0, 1), (0, 2), (1, 2), (2, 3)], TRIANGLE_NAMES)
        for mode in ("layered", "flat"):
            spec = export_hnn(g, mode, 2)
            assert HnnSpec.from_json(spec.to_json()) == spec

    def test_errors(self):
        with pytest.raises(InvalidInputError):
            export_hnn(FilteredGraph(3, []), "layered")
        with pytest.raises(InvalidInputError):
            export_hnn(FilteredGraph(2, [(0, 1)]), "spiral")
        with pytest.raises(InvalidInputError):
            HnnSpec.from_dict({"nodes": [], "edges": [], "final": "x", "mode": "odd"})
