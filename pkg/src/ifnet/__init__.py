"""Information filtering networks: sparse, topologically constrained dependency networks."""
from __future__ import annotations

from .analysis import FeatureRanking, PortfolioWeights, feature_ranking, markowitz_weights
from .construct import (
    EDGE_WEIGHT, ELLIPTICAL_MI, SUM_SQUARES, CliqueForestResult, GainSpec, GainStep, MfcfConfig,
    gain_elliptical_mi, gain_sum_squares, mfcf, mst_kruskal, mst_prim, pairwise_mi_elliptical,
    pmfg, tmfg, tmfg_seed,
)
from .core import (
    CORRELATION, COVARIANCE, GENERIC_SIMILARITY, SQUARED_CORRELATION,
    ChordalityResult, CliqueTree, DataMatrix, FilteredGraph, Separator, SimplexSet, WeightMatrix,
    covariance_to_correlation, default_weights, enumerate_simplices, estimate_covariance,
    extract_clique_tree, is_chordal, is_planar, squared_correlation,
)
from .ensemble import (
    EdgeEnsemble, MergeReport, bootstrap_ensemble, edge_log_pvalue, edge_pvalue, merge_report,
    replica_seed, validated_network,
)
from .errors import (
    ConfigError, DegenerateVariableError, IFNError, InvalidInputError, InvalidWeightError,
    NotChordalError, NumericError, UndefinedCentralityError,
)
from .hnn import HnnNode, HnnSpec, export_hnn
from .logo import (
    EllipticalModel, RegressionModel, SparsePrecision, elliptical_density, elliptical_logpdf,
    gaussian_loglik_decomposed, gaussian_loglik_rows, ifn_regression, logo_logdet, logo_precision,
)
from .pipeline import Network, Recipe

__version__ = "0.1.0"

__all__ = [
    "bootstrap_ensemble", "ChordalityResult", "CliqueForestResult", "CliqueTree", "ConfigError",
    "CORRELATION", "COVARIANCE", "covariance_to_correlation", "DataMatrix", "default_weights",
    "DegenerateVariableError", "edge_log_pvalue", "edge_pvalue", "EDGE_WEIGHT", "EdgeEnsemble",
    "elliptical_density", "elliptical_logpdf", "ELLIPTICAL_MI", "EllipticalModel",
    "enumerate_simplices", "estimate_covariance", "export_hnn", "extract_clique_tree",
    "feature_ranking", "FeatureRanking", "FilteredGraph", "gain_elliptical_mi", "gain_sum_squares",
    "GainSpec", "GainStep", "gaussian_loglik_decomposed", "gaussian_loglik_rows",
    "GENERIC_SIMILARITY", "HnnNode", "HnnSpec", "ifn_regression", "IFNError", "InvalidInputError",
    "InvalidWeightError", "is_chordal", "is_planar", "logo_logdet", "logo_precision",
    "markowitz_weights", "merge_report", "MergeReport", "mfcf", "MfcfConfig", "mst_kruskal",
    "mst_prim", "Network", "NotChordalError", "NumericError", "pairwise_mi_elliptical", "pmfg",
    "PortfolioWeights", "Recipe", "RegressionModel", "replica_seed", "Separator", "SimplexSet",
    "SparsePrecision", "SQUARED_CORRELATION", "squared_correlation", "SUM_SQUARES", "tmfg",
    "tmfg_seed", "UndefinedCentralityError", "validated_network", "WeightMatrix",
]
