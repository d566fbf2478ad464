"""Command-line client for the adaptation service.

The CLI builds the same request models the HTTP endpoints consume. By
default it executes them in-process; with ``--server URL`` it posts them to
a running service instead. ``cjs serve`` launches the service.

A JSON config file (``--config``) supplies any request field; explicit
command-line flags override it.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import CJSError
from .schemas import (DatasetRef, DistancesRequest, PredictRequest,
                      RunRequest, SweepRequest, SynthRequest, TrainRequest)

_ENDPOINTS = {
    "run": ("/run", RunRequest),
    "sweep": ("/sweep", SweepRequest),
    "synth": ("/synth", SynthRequest),
    "train": ("/train", TrainRequest),
    "predict": ("/predict", PredictRequest),
    "distances": ("/distances", DistancesRequest),
}


def _dataset_refs(features: list[str], labels: list[str] | None) -> list[dict]:
    labels = labels or []
    refs = []
    for i, feat in enumerate(features):
        refs.append({"features": feat,
                     "labels": labels[i] if i < len(labels) else None})
    return refs


def _add_common_hyper_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("hyperparameters")
    group.add_argument("--gamma", type=int, help="desired average k-means "
                       "group size (default 20)")
    group.add_argument("--anchor-size", "-N", dest="anchor_size", type=int,
                       help="samples per anchor subspace (default 5)")
    group.add_argument("--sigma", type=float, help="fixed affinity bandwidth "
                       "(default: per-matrix median)")
    group.add_argument("--rho", type=float, help="topology weight "
                       "(default: classes / anchors)")
    group.add_argument("--mu", type=float, help="multiplier step (default 1.0)")
    group.add_argument("--tol", type=float, help="labeling tolerance "
                       "(default 1e-6)")
    group.add_argument("--max-iter", dest="max_iter", type=int,
                       help="labeling iteration cap (default 10000)")
    group.add_argument("--reg-c", dest="reg_c", type=float,
                       help="SVM regularization constant (default 1.0)")
    group.add_argument("--rank-tol", dest="rank_tol", type=float,
                       help="relative singular-value cutoff (default 1e-10)")
    group.add_argument("--seed", type=int, help="base RNG seed (default 0)")
    group.add_argument("--one-based-labels", dest="one_based_labels",
                       action="store_const", const=True,
                       help="label files count classes from 1")
    group.add_argument("--l2-normalize", dest="l2_normalize",
                       action="store_const", const=True,
                       help="L2-normalize every sample at load time")


def _add_dataset_flags(parser: argparse.ArgumentParser,
                       target_labels_help: str) -> None:
    parser.add_argument("--source-features", action="append", default=None,
                        metavar="CSV", help="source feature csv (repeatable)")
    parser.add_argument("--source-labels", action="append", default=None,
                        metavar="FILE", help="source label file (repeatable, "
                        "same order)")
    parser.add_argument("--target-features", action="append", default=None,
                        metavar="CSV", help="target feature csv (repeatable)")
    parser.add_argument("--target-labels", action="append", default=None,
                        metavar="FILE", help=target_labels_help)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cjs",
        description="Cross-domain recognition via compact joint subspaces")
    parser.add_argument("--server", metavar="URL",
                        help="send the request to a running service instead "
                        "of executing in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="full multi-run adaptation experiment")
    run.add_argument("--config", metavar="JSON", help="config file; flags "
                     "override its fields")
    _add_dataset_flags(run, "target label file for scoring (repeatable)")
    run.add_argument("--runs", type=int, help="number of repetitions "
                     "(default 20)")
    run.add_argument("--output", metavar="JSON", help="write the report here")
    _add_common_hyper_flags(run)

    swp = sub.add_parser("sweep", help="re-run the experiment over a "
                         "parameter grid, emit plot-ready CSV")
    swp.add_argument("--config", metavar="JSON")
    _add_dataset_flags(swp, "target label file for scoring (repeatable)")
    swp.add_argument("--runs", type=int)
    swp.add_argument("--param", choices=["gamma", "N"], required=True)
    swp.add_argument("--values", type=int, nargs="+", required=True)
    swp.add_argument("--output", metavar="CSV", help="write the sweep CSV here")
    _add_common_hyper_flags(swp)

    syn = sub.add_parser("synth", help="generate a synthetic benchmark pair")
    syn.add_argument("--out", dest="out_dir", required=True, metavar="DIR")
    syn.add_argument("--classes", type=int, default=4)
    syn.add_argument("--dim", type=int, default=50)
    syn.add_argument("--subspace-dim", dest="subspace_dim", type=int, default=3)
    syn.add_argument("--samples-per-class", dest="samples_per_class",
                     type=int, default=100)
    syn.add_argument("--rotation-angle", dest="rotation_angle", type=float,
                     default=0.3)
    syn.add_argument("--noise", type=float, default=0.01)
    syn.add_argument("--seed", type=int, default=0)

    trn = sub.add_parser("train", help="run one adaptation pass and save the "
                         "classifier")
    trn.add_argument("--config", metavar="JSON")
    _add_dataset_flags(trn, "(unused for training)")
    trn.add_argument("--model-out", dest="model_out", metavar="NPZ",
                     help="where to save the model")
    _add_common_hyper_flags(trn)

    prd = sub.add_parser("predict", help="label samples with a saved model")
    prd.add_argument("--model", dest="model_path", required=True,
                     metavar="NPZ")
    prd.add_argument("--features", required=True, metavar="CSV")
    prd.add_argument("--output", metavar="FILE", help="write one predicted "
                     "label per line")
    prd.add_argument("--l2-normalize", dest="l2_normalize",
                     action="store_const", const=True)

    dst = sub.add_parser("distances", help="dump the class-to-class "
                         "cross-domain subspace distance matrix")
    dst.add_argument("--source-features", required=True, metavar="CSV")
    dst.add_argument("--source-labels", required=True, metavar="FILE")
    dst.add_argument("--target-features", required=True, metavar="CSV")
    dst.add_argument("--target-labels", required=True, metavar="FILE")
    dst.add_argument("--rank-tol", dest="rank_tol", type=float)
    dst.add_argument("--one-based-labels", dest="one_based_labels",
                     action="store_const", const=True)
    dst.add_argument("--l2-normalize", dest="l2_normalize",
                     action="store_const", const=True)

    srv = sub.add_parser("serve", help="launch the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)

    return parser


def _merge_config(args: argparse.Namespace, keys: list[str]) -> dict:
    """Config-file values overridden by explicitly given flags."""
    payload: dict = {}
    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path, "r", encoding="utf-8") as handle:
            loaded = json.load(handle)
        if not isinstance(loaded, dict):
            raise CJSError(f"config file {config_path} must hold a JSON object")
        payload.update(loaded)
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            payload[key] = value
    return payload


_HYPER_KEYS = ["gamma", "anchor_size", "sigma", "rho", "mu", "tol",
               "max_iter", "reg_c", "rank_tol", "seed", "one_based_labels",
               "l2_normalize"]


def _build_request(args: argparse.Namespace):
    command = args.command
    if command in ("run", "sweep", "train"):
        payload = _merge_config(args, _HYPER_KEYS + ["runs", "output",
                                                     "model_out"])
        if args.source_features is not None:
            payload["sources"] = _dataset_refs(args.source_features,
                                               args.source_labels)
        if args.target_features is not None:
            payload["targets"] = _dataset_refs(args.target_features,
                                               args.target_labels)
        if command == "sweep":
            payload["param"] = args.param
            payload["values"] = args.values
            payload.pop("output", None)
        if command == "train":
            payload.pop("runs", None)
            payload.pop("output", None)
    elif command == "synth":
        payload = {k: getattr(args, k) for k in
                   ("classes", "dim", "subspace_dim", "samples_per_class",
                    "rotation_angle", "noise", "seed", "out_dir")}
    elif command == "predict":
        payload = {"model_path": args.model_path, "features": args.features}
        if args.output is not None:
            payload["output"] = args.output
        if args.l2_normalize is not None:
            payload["l2_normalize"] = args.l2_normalize
    elif command == "distances":
        payload = {"source": {"features": args.source_features,
                              "labels": args.source_labels},
                   "target": {"features": args.target_features,
                              "labels": args.target_labels}}
        for key in ("rank_tol", "one_based_labels", "l2_normalize"):
            value = getattr(args, key, None)
            if value is not None:
                payload[key] = value
    else:
        raise CJSError(f"unknown command {command}")
    _, model_cls = _ENDPOINTS[command]
    return model_cls.model_validate(payload)


def _execute_local(command: str, request) -> dict:
    from . import service

    handler = {"run": service.handle_run, "sweep": service.handle_sweep,
               "synth": service.handle_synth, "train": service.handle_train,
               "predict": service.handle_predict,
               "distances": service.handle_distances}[command]
    return handler(request).model_dump()


def _execute_remote(server: str, command: str, request) -> dict:
    import httpx

    path, _ = _ENDPOINTS[command]
    response = httpx.post(server.rstrip("/") + path,
                          json=request.model_dump(), timeout=600.0)
    if response.status_code != 200:
        raise CJSError(f"server returned {response.status_code}: "
                       f"{response.text}")
    return response.json()


def _summarize(command: str, result: dict) -> str:
    if command in ("run",):
        if result.get("mean_accuracy") is not None:
            return (f"runs={len(result['per_run_accuracy'])} "
                    f"mean_accuracy={result['mean_accuracy']:.4f} "
                    f"std={result['std_accuracy']:.4f} "
                    f"anchors={result['n_anchors']}")
        return (f"unlabeled target: {len(result['predictions'])} predictions "
                f"(anchors={result['n_anchors']})")
    if command == "sweep":
        return result["csv"].rstrip("\n")
    if command == "synth":
        return (f"wrote {result['source_features']} and "
                f"{result['target_features']} "
                f"({result['samples_per_domain']} samples/domain, "
                f"dim={result['dim']})")
    if command == "train":
        return (f"model saved to {result['model_path']} "
                f"(anchors={result['n_anchors']}, "
                f"converged={result['labeling_converged']})")
    if command == "predict":
        return f"{len(result['predictions'])} predictions"
    if command == "distances":
        return (f"mean same-class={result['mean_same_class']:.4f} "
                f"cross-class={result['mean_cross_class']:.4f}")
    return ""


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("cjs.service:app", host=args.host, port=args.port)
        return 0

    try:
        request = _build_request(args)
        if args.server:
            result = _execute_remote(args.server, args.command, request)
        else:
            result = _execute_local(args.command, request)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CJSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.command == "sweep" and getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(result["csv"])
    if args.command == "distances":
        print(json.dumps(result["matrix"]))
    print(_summarize(args.command, result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
