"""dendrofit: learn, evaluate, and sample forest-structured Markov
network models of mixed discrete/Gaussian data.

Structures are found by maximum-weight forest search over pairwise
mutual information estimates, either unpenalized (spanning tree) or with
a per-edge parameter-count penalty (description-length forest).
"""

__version__ = "0.1.0"

from .core import (
    Dataset,
    Discrete,
    Forest,
    Gaussian,
    RootedForest,
    ScoredEdge,
    Variable,
    VariableSchema,
    orient_forest,
    validate_dataset,
)
from .estimators import (
    DiscretePair,
    GaussianPair,
    MixedPair,
    QuadratureSpec,
    collect_pair_stats,
    mi_discrete,
    mi_gaussian,
    mi_mixed,
)
from .forest import build_forest_suzuki, build_tree_chow_liu
from .model import (
    DendroidModel,
    DiscreteEdgeFactor,
    DiscreteMarginal,
    GaussianEdgeFactor,
    GaussianMarginal,
    MixedEdgeFactor,
    description_length,
    fit,
    log_likelihood,
    sample,
)
from .scoring import Criterion, penalty_weight, score_all_pairs

__all__ = [
    "__version__",
    "Criterion",
    "Dataset",
    "DendroidModel",
    "Discrete",
    "DiscreteEdgeFactor",
    "DiscreteMarginal",
    "DiscretePair",
    "Forest",
    "Gaussian",
    "GaussianEdgeFactor",
    "GaussianMarginal",
    "GaussianPair",
    "MixedEdgeFactor",
    "MixedPair",
    "QuadratureSpec",
    "RootedForest",
    "ScoredEdge",
    "Variable",
    "VariableSchema",
    "build_forest_suzuki",
    "build_tree_chow_liu",
    "collect_pair_stats",
    "description_length",
    "fit",
    "log_likelihood",
    "mi_discrete",
    "mi_gaussian",
    "mi_mixed",
    "orient_forest",
    "penalty_weight",
    "sample",
    "score_all_pairs",
    "validate_dataset",
]
