from __future__ import annotations

import json
import math

import numpy as np
import pytest

from ifnet import (
    DataMatrix, EdgeEnsemble, Recipe, bootstrap_ensemble, edge_log_pvalue, edge_pvalue,
    merge_report, replica_seed, validated_network,
)
from ifnet.errors import DegenerateVariableError, InvalidInputError
from oracles import exact_pvalue


@pytest.fixture
def data(rng):
    base = rng.standard_normal((80, 3))
    mix = rng.standard_normal((3, 16))
    return DataMatrix(base @ mix + 0.5 * rng.standard_normal((80, 16)))


class TestPvalue:
    @pytest.mark.parametrize("f,r,p", [(0, 5, 6), (1, 5, 6), (3, 5, 6), (5, 5, 6), (4, 10, 8), (20, 20, 12)])
    def test_exact(self, f, r, p):
        assert edge_pvalue(f, r, p) == pytest.approx(float(exact_pvalue(f, r, p)), abs=1e-12)

    def test_frozen_value(self):
        # 167 / 1001 by exact rational summation
        assert edge_pvalue(3, 5, 6) == pytest.approx(167 / 1001, rel=1e-13)

    def test_monotone_and_log(self):
        vals = [edge_pvalue(f, 15, 10) for f in range(16)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert vals[0] == 1.0
        assert edge_log_pvalue(15, 15, 10) == pytest.approx(math.log(vals[-1]))

    @pytest.mark.parametrize("f,r,p", [(-1, 3, 5), (4, 3, 5), (1, 11, 5), (0, 0, 5)])
    def test_domain(self, f, r, p):
        with pytest.raises(InvalidInputError):
            edge_pvalue(f, r, p)

    def test_large_arguments_stay_finite(self):
        assert 0.0 <= edge_pvalue(900, 1000, 200) <= 1.0


class TestBootstrap:
    def test_seed_schedule(self):
        assert replica_seed(7, 3) == 10
        assert replica_seed(7, 3, attempt=2, r=100) == 210
        assert replica_seed(2**64 - 1, 1) == 0

    def test_counts_are_bounded(self, data):
        ens = bootstrap_ensemble(data, 12, Recipe("mst"), 3)
        assert ens.r == 12 and ens.p == 16
        assert sum(ens.freq.values()) == 12 * 15
        assert all(1 <= f <= 12 for f in ens.freq.values())

    def test_determinism_and_threads(self, data):
        recipe = Recipe("tmfg")
        a = bootstrap_ensemble(data, 10, recipe, 99)
        b = bootstrap_ensemble(data, 10, recipe, 99, workers=4)
        assert a == b
        assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
        assert bootstrap_ensemble(data, 10, recipe, 100) != a

    def test_subsample(self, data):
        ens = bootstrap_ensemble(data, 5, Recipe("mst"), 1, subsample=0.5)
        assert ens.subsample == 0.5 and sum(ens.freq.values()) == 5 * 15
        with pytest.raises(InvalidInputError):
            bootstrap_ensemble(data, 5, Recipe("mst"), 1, subsample=1.5)

    def test_full_subsample_is_constant(self, data):
        ens = bootstrap_ensemble(data, 4, Recipe("mst"), 1, subsample=1.0)
        assert set(ens.freq.values()) == {4}

    def test_redraws_flat_resamples(self):
        # the lone 1 is missed by about a third of the resamples
        x = np.c_[np.arange(40.0), np.r_[np.zeros(39), 1.0], np.arange(40.0) ** 0.5]
        ens = bootstrap_ensemble(DataMatrix(x), 30, Recipe("mst"), 0)
        assert sum(ens.freq.values()) == 60

    def test_gives_up_after_max_redraws(self, monkeypatch):
        from ifnet import ensemble
        seeds = []

        def flat(x, seed, subsample):
            seeds.append(seed)
            return np.c_[x[:, 0], np.zeros(len(x))]
        monkeypatch.setattr(ensemble, "_resample", flat)
        x = np.c_[np.arange(10.0), np.arange(10.0) ** 2]
        with pytest.raises(DegenerateVariableError, match="v1"):
            bootstrap_ensemble(DataMatrix(x), 3, Recipe("mst"), 5)
        assert seeds == [5 + 3 * a for a in range(ensemble.MAX_REDRAWS)]

    def test_round_trip(self, data):
        ens = bootstrap_ensemble(data, 6, Recipe("mfcf", max_clique=3, min_clique=2), 5)
        assert EdgeEnsemble.from_dict(json.loads(json.dumps(ens.to_dict()))) == ens

    def test_bad_counts(self):
        with pytest.raises(InvalidInputError):
            EdgeEnsemble(4, 2, {(0, 1): 3}, Recipe(), 0)


class TestValidation:
    def test_thresholding(self):
        ens = EdgeEnsemble(20, 30, {(0, 1): 30, (1, 2): 29, (2, 3): 1}, Recipe("mst"), 0)
        g = validated_network(ens, 0.05)
        assert g.edge_set() == {(0, 1), (1, 2)}
        assert g.edges[(1, 2)] == pytest.approx(29 / 30)
        assert validated_network(ens, 0.0).n_edges == 0
        assert validated_network(ens, 1.0).n_edges == 3

    def test_report_does_not_repair(self):
        cyc = {(0, 1): 30, (1, 2): 30, (2, 3): 30, (0, 3): 30}
        rep = merge_report(EdgeEnsemble(20, 30, cyc, Recipe("mst"), 0), 0.05)
        assert rep.graph.n_edges == 4 and not rep.chordal and rep.planar

    def test_alpha_domain(self):
        with pytest.raises(InvalidInputError):
            validated_network(EdgeEnsemble(5, 2, {}, Recipe(), 0), 1.5)
