"""HTTP facade over the adaptation pipeline.

Every endpoint is a thin wrapper: validate the request model, call the
corresponding pipeline function, wrap the result. File paths in requests
refer to the service host's filesystem. The CLI reuses the handler
functions directly for in-process execution, so both entry points share one
code path.
"""
from __future__ import annotations

import os

import numpy as np
from fastapi import FastAPI, HTTPException

from . import __version__
from .classifier import load_model, predict as predict_samples, save_model
from .data import load_dataset, save_dataset
from .errors import CJSError
from .pipeline import (PipelineConfig, adapt_once, class_distance_matrix,
                       load_config_datasets, run_pipeline, sweep,
                       sweep_rows_to_csv)
from .schemas import (DistancesRequest, DistancesResponse, HealthResponse,
                      PredictRequest, PredictResponse, RunRequest,
                      RunResponse, SweepRequest, SweepResponse, SweepRow,
                      SynthRequest, SynthResponse, TrainRequest,
                      TrainResponse)
from .synth import synth_generate


def handle_run(request: RunRequest) -> RunResponse:
    report = run_pipeline(request.to_config())
    return RunResponse(**report.to_json_dict())


def handle_sweep(request: SweepRequest) -> SweepResponse:
    config = request.to_config()
    rows = sweep(config, request.param, request.values)
    return SweepResponse(rows=[SweepRow(**row) for row in rows],
                         csv=sweep_rows_to_csv(rows))


def handle_synth(request: SynthRequest) -> SynthResponse:
    source, target = synth_generate(
        request.classes, request.dim, request.subspace_dim,
        request.samples_per_class, request.rotation_angle, request.noise,
        request.seed)
    os.makedirs(request.out_dir, exist_ok=True)
    paths = {name: os.path.join(request.out_dir, f"{name}.csv")
             for name in ("source_features", "source_labels",
                          "target_features", "target_labels")}
    save_dataset(source, paths["source_features"], paths["source_labels"])
    save_dataset(target, paths["target_features"], paths["target_labels"])
    return SynthResponse(dim=source.dim, samples_per_domain=source.n_samples,
                         **paths)


def handle_train(request: TrainRequest) -> TrainResponse:
    config = PipelineConfig(
        source_features=[s.features for s in request.sources],
        source_labels=[s.labels or "" for s in request.sources],
        target_features=[t.features for t in request.targets],
        target_labels=[],
        gamma=request.gamma, anchor_size=request.anchor_size,
        sigma=request.sigma, rho=request.rho, mu=request.mu, tol=request.tol,
        max_iter=request.max_iter, reg_c=request.reg_c,
        rank_tol=request.rank_tol, runs=1, seed=request.seed,
        one_based_labels=request.one_based_labels,
        l2_normalize=request.l2_normalize)
    if any(not s.labels for s in request.sources):
        raise ValueError("every source dataset needs labels")
    source, target = load_config_datasets(config)
    result = adapt_once(source, target, config, seed=config.seed)
    save_model(result.model, request.model_out)
    return TrainResponse(model_path=request.model_out,
                         n_anchors=result.n_anchors,
                         anchor_labels=result.anchor_labels.tolist(),
                         labeling_converged=result.labeling.converged,
                         labeling_iterations=result.labeling.iterations,
                         constraint_residual=result.labeling.constraint_residual)


def handle_predict(request: PredictRequest) -> PredictResponse:
    model = load_model(request.model_path)
    dataset = load_dataset(request.features,
                           one_based_labels=request.one_based_labels,
                           l2_normalize=request.l2_normalize)
    predictions = predict_samples(model, dataset.features)
    if request.output:
        np.savetxt(request.output, predictions, fmt="%d")
    return PredictResponse(predictions=predictions.tolist())


def handle_distances(request: DistancesRequest) -> DistancesResponse:
    if request.source.labels is None or request.target.labels is None:
        raise ValueError("distances need labeled source and target datasets")
    source = load_dataset(request.source.features, request.source.labels,
                          one_based_labels=request.one_based_labels,
                          l2_normalize=request.l2_normalize)
    target = load_dataset(request.target.features, request.target.labels,
                          one_based_labels=request.one_based_labels,
                          l2_normalize=request.l2_normalize)
    matrix = class_distance_matrix(source, target, rank_tol=request.rank_tol)
    off_diag = ~np.eye(matrix.shape[0], dtype=bool)
    return DistancesResponse(
        matrix=matrix.tolist(),
        mean_same_class=float(np.mean(np.diag(matrix))),
        mean_cross_class=float(np.mean(matrix[off_diag])))


def create_app() -> FastAPI:
    app = FastAPI(title="cjs", version=__version__,
                  description="Cross-domain recognition via compact joint "
                              "subspaces")

    def _guard(func, request):
        try:
            return func(request)
        except FileNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except (CJSError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/run", response_model=RunResponse)
    def run(request: RunRequest) -> RunResponse:
        return _guard(handle_run, request)

    @app.post("/sweep", response_model=SweepResponse)
    def sweep_endpoint(request: SweepRequest) -> SweepResponse:
        return _guard(handle_sweep, request)

    @app.post("/synth", response_model=SynthResponse)
    def synth(request: SynthRequest) -> SynthResponse:
        return _guard(handle_synth, request)

    @app.post("/train", response_model=TrainResponse)
    def train(request: TrainRequest) -> TrainResponse:
        return _guard(handle_train, request)

    @app.post("/predict", response_model=PredictResponse)
    def predict(request: PredictRequest) -> PredictResponse:
        return _guard(handle_predict, request)

    @app.post("/distances", response_model=DistancesResponse)
    def distances(request: DistancesRequest) -> DistancesResponse:
        return _guard(handle_distances, request)

    return app


app = create_app()
