"""Topological molecular-graph featurization and classification toolkit."""

from .molgraph import BondType, GraphError, MolecularGraph, build_graph, degree
from .smiles import SmilesError, parse_smiles
from .descriptors import (
    EdgeScores,
    NodeDegreeProfile,
    adjusted_rand_index,
    degree_profile,
    edge_betweenness,
    edge_scores,
    scan_scores,
)
from .featurizer import (
    FeatureMatrix,
    FeaturizerConfig,
    FeaturizerModel,
    HistogramSpec,
    fit,
    transform,
    transform_collection,
)
from .forest import Forest, ForestConfig, feature_importance, predict_proba, train
from .metrics import (
    EvalReport,
    UndefinedMetricError,
    aggregate_importance,
    auroc,
    average_precision,
    multitask_auroc,
    wilcoxon_signed_rank,
)
from .datasets import (
    LabeledDataset,
    SplitSpec,
    load_csv_dataset,
    load_graph6,
    load_split,
)
from .expressivity import (
    TopoFingerprint,
    WLColoring,
    count_indistinguishable,
    topo_fingerprint,
    wl1_distinguishes,
    wl1_refine,
)

__version__ = "0.1.0"
