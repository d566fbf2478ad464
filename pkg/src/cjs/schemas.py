"""Pydantic request/response models shared by the HTTP service and the CLI."""
from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from .pipeline import PipelineConfig


class DatasetRef(BaseModel):
    """Paths of one dataset on the service host."""

    features: str
    labels: str | None = None


class AdaptSettings(BaseModel):
    """Hyperparameters shared by run/train/sweep requests.

    ``anchor_size`` also answers to its short alias ``N``; ``sigma=None``
    selects the median bandwidth and ``rho=None`` the balanced topology
    weight.
    """

    model_config = ConfigDict(populate_by_name=True)

    gamma: int = 20
    anchor_size: int = Field(5, alias="N")
    sigma: float | None = None
    rho: float | None = None
    mu: float = 1.0
    tol: float = 1e-6
    max_iter: int = 10000
    reg_c: float = 1.0
    rank_tol: float = 1e-10
    seed: int = 0
    one_based_labels: bool = False
    l2_normalize: bool = False


class RunRequest(AdaptSettings):
    sources: list[DatasetRef]
    targets: list[DatasetRef]
    runs: int = 20
    output: str | None = None

    def to_config(self) -> PipelineConfig:
        if any(s.labels is None for s in self.sources):
            raise ValueError("every source dataset needs labels")
        target_labels = [t.labels for t in self.targets]
        if any(lab is None for lab in target_labels):
            target_labels = []
        return PipelineConfig(
            source_features=[s.features for s in self.sources],
            source_labels=[s.labels for s in self.sources],
            target_features=[t.features for t in self.targets],
            target_labels=target_labels,
            gamma=self.gamma, anchor_size=self.anchor_size, sigma=self.sigma,
            rho=self.rho, mu=self.mu, tol=self.tol, max_iter=self.max_iter,
            reg_c=self.reg_c, rank_tol=self.rank_tol, runs=self.runs,
            seed=self.seed, one_based_labels=self.one_based_labels,
            l2_normalize=self.l2_normalize, output=self.output)


class RunResponse(BaseModel):
    schema_version: int
    per_run_accuracy: list[float] | None
    mean_accuracy: float | None
    std_accuracy: float | None
    confusion: list[list[int]] | None
    predictions: list[int]
    n_anchors: int
    labeling_converged: bool
    wall_time_s: float
    config: dict


class SweepRequest(RunRequest):
    param: Literal["gamma", "N"] = "gamma"
    values: list[int] = Field(default_factory=list)


class SweepRow(BaseModel):
    param: str
    value: int
    mean_accuracy: float | None
    std_accuracy: float | None


class SweepResponse(BaseModel):
    rows: list[SweepRow]
    csv: str


class SynthRequest(BaseModel):
    classes: int = 4
    dim: int = 50
    subspace_dim: int = 3
    samples_per_class: int = 100
    rotation_angle: float = 0.3
    noise: float = 0.01
    seed: int = 0
    out_dir: str


class SynthResponse(BaseModel):
    source_features: str
    source_labels: str
    target_features: str
    target_labels: str
    dim: int
    samples_per_domain: int


class TrainRequest(AdaptSettings):
    sources: list[DatasetRef]
    targets: list[DatasetRef]
    model_out: str


class TrainResponse(BaseModel):
    model_path: str
    n_anchors: int
    anchor_labels: list[int]
    labeling_converged: bool
    labeling_iterations: int
    constraint_residual: float


class PredictRequest(BaseModel):
    model_path: str
    features: str
    one_based_labels: bool = False
    l2_normalize: bool = False
    output: str | None = None


class PredictResponse(BaseModel):
    predictions: list[int]


class DistancesRequest(BaseModel):
    source: DatasetRef
    target: DatasetRef
    rank_tol: float = 1e-10
    one_based_labels: bool = False
    l2_normalize: bool = False


class DistancesResponse(BaseModel):
    matrix: list[list[float]]
    mean_same_class: float
    mean_cross_class: float


class HealthResponse(BaseModel):
    status: str
    version: str
