"""Unsupervised cross-domain recognition via compact joint subspaces.

Labeled source samples and unlabeled target samples are bridged by mining
small anchor subspaces in the target domain, assigning them class labels
through a subspace-distance Laplacian cost, fusing them with the per-class
source subspaces, and training one-vs-rest linear SVMs on the fused sample
sets.
"""

__version__ = "0.1.0"

from .classifier import (CompactJointSubspace, LinearOvrModel,
                         assemble_joint_subspaces, load_model, predict,
                         save_model, train_ovr_svm)
from .clustering import (AnchorSubspace, ClusteringParams,
                         build_anchor_subspaces, core_subgroup, kmeans)
from .data import (DomainDataset, LabelMatrix, load_dataset, merge_domains,
                   one_hot_encode, save_dataset)
from .errors import CJSError
from .labeling import (JointAffinity, LabelingProblem, LabelingResult,
                       assemble_joint_affinity, discretize, label_anchors_soft,
                       labeling_cost, resolve_rho)
from .linalg import (RankOneSylvesterSolver, orthonormal_basis,
                     principal_sines, solve_rank1_sylvester,
                     solve_sylvester_dense)
from .pipeline import (EvaluationReport, PipelineConfig, adapt_once,
                       class_distance_matrix, evaluate, run_pipeline, sweep)
from .subspaces import (AffinityPair, SourceSubspace, build_affinities,
                        build_class_subspaces, median_sigma,
                        subspace_distance)
from .synth import synth_generate

__all__ = [
    "AffinityPair", "AnchorSubspace", "CJSError", "ClusteringParams",
    "CompactJointSubspace", "DomainDataset", "EvaluationReport",
    "JointAffinity", "LabelMatrix", "LabelingProblem", "LabelingResult",
    "LinearOvrModel", "PipelineConfig", "RankOneSylvesterSolver",
    "SourceSubspace", "adapt_once", "assemble_joint_affinity",
    "assemble_joint_subspaces", "build_affinities", "build_anchor_subspaces",
    "build_class_subspaces", "class_distance_matrix", "core_subgroup",
    "discretize", "evaluate", "kmeans", "label_anchors_soft", "labeling_cost",
    "load_dataset", "load_model", "median_sigma", "merge_domains",
    "one_hot_encode", "orthonormal_basis", "predict", "principal_sines",
    "resolve_rho", "run_pipeline", "save_dataset", "save_model",
    "solve_rank1_sylvester", "solve_sylvester_dense", "subspace_distance",
    "sweep", "synth_generate", "train_ovr_svm",
]
