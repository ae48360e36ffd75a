"""Construction recipes: data -> weights -> filtered network."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple

from .construct import (
    EDGE_WEIGHT, ELLIPTICAL_MI, SUM_SQUARES,
    GainSpec, MfcfConfig, mfcf, mst_kruskal, mst_prim, pmfg, tmfg,
)
from .core import (
    CliqueTree, DataMatrix, FilteredGraph, WeightMatrix,
    covariance_to_correlation, estimate_covariance, squared_correlation,
)
from .errors import ConfigError

METHODS = ("mst-prim", "mst-kruskal", "pmfg", "tmfg", "mfcf")
METHOD_ALIASES = {"mst": "mst-prim", "prim": "mst-prim", "kruskal": "mst-kruskal"}
GAINS = {"edge": EDGE_WEIGHT, "sumsq": SUM_SQUARES, "mi": ELLIPTICAL_MI}


class Network(NamedTuple):
    graph: FilteredGraph
    tree: CliqueTree | None


@dataclass(frozen=True)
class Recipe:
    """How to turn a covariance estimate into a filtered network.

    Edge-weight constructors run on squared correlations. For ``mfcf`` the
    ``gain`` picks ``edge`` (squared correlations), ``sumsq`` or ``mi``
    (both computed from the correlation matrix).
    """

    method: str = "tmfg"
    gain: str = "edge"
    min_clique: int = 4
    max_clique: int = 4
    max_multiplicity: int | None = 1
    gain_threshold: float | None = None
    shrinkage: float = 0.0

    def __post_init__(self):
        method = METHOD_ALIASES.get(self.method, self.method)
        object.__setattr__(self, "method", method)
        problems = []
        if method not in METHODS:
            problems.append(f"unknown method {self.method!r}")
        if self.gain not in GAINS:
            problems.append(f"unknown gain {self.gain!r}")
        if not 0.0 <= self.shrinkage <= 1.0:
            problems.append(f"shrinkage must lie in [0, 1], got {self.shrinkage}")
        if problems:
            raise ConfigError("; ".join(problems))
        if method == "mfcf":
            self.mfcf_config()

    def mfcf_config(self) -> MfcfConfig:
        return MfcfConfig(self.min_clique, self.max_clique, self.max_multiplicity, self.gain_threshold)

    def to_dict(self) -> dict:
        return asdict(self)

    def from_covariance(self, cov: WeightMatrix) -> Network:
        corr = covariance_to_correlation(cov)
        weights = squared_correlation(corr)
        if self.method == "mst-prim":
            return Network(mst_prim(weights), None)
        if self.method == "mst-kruskal":
            return Network(mst_kruskal(weights), None)
        if self.method == "pmfg":
            return Network(pmfg(weights), None)
        if self.method == "tmfg":
            res = tmfg(weights)
            return Network(res.graph, res.tree)
        variant = GAINS[self.gain]
        spec = GainSpec(variant, weights if variant == EDGE_WEIGHT else corr)
        res = mfcf(weights, spec, self.mfcf_config())
        return Network(res.graph, res.tree)

    def from_data(self, data: DataMatrix) -> Network:
        return self.from_covariance(estimate_covariance(data, self.shrinkage))
