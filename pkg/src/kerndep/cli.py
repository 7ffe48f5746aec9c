"""Command-line interface.

Subcommands: hsic, smi, permtest, generate, train, probe, plot. Results
go to stdout as single JSON lines; logs and errors go to stderr. Exit
codes: 0 success, 2 usage or malformed input, 3 a computation that is
degenerate for this data (constant variable, singular system, unsplittable
labels), 4 an output directory that already exists without --force.

Commands that produce a run directory (generate, train) write a
manifest.json capturing the resolved parameters before doing any real
work; `kerndep train --config manifest.json` replays such a run exactly.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import backend_name
from .ae import (
    AeConfig,
    ProbeConfig,
    encode,
    generate_synthetic_sequences,
    load_checkpoint,
    load_dataset,
    probe_classifier,
    save_checkpoint,
    save_dataset,
    train,
)
from .errors import (
    AllPointsIdentical,
    ConfigError,
    DegenerateInput,
    DegenerateLabels,
    KerndepError,
    MissingSeries,
    OutputExists,
    SingularSystem,
)
from .hsic import hsic_normalized, hsic_unnormalized, permutation_test
from .kernels import KINDS, KernelSpec, gram
from .plane_svg import SERIES, render_plane_svg
from .samples import load_samples_csv
from .smi import (
    SmiConfig,
    fit_density_ratio,
    smi_cross_validated,
    smi_estimate,
    smi_fixed_theta,
)
from .trace import export_jsonl, import_jsonl

log = logging.getLogger("kerndep")

MANIFEST_SCHEMA = "kerndep-manifest-v1"
MANIFEST_FILE = "manifest.json"
MODEL_FILE = "model.bin"
TRACE_FILE = "trace.jsonl"

# Degenerate-data failures: the input parsed fine but this computation has
# no answer for it.
_DEGENERATE_ERRORS = (AllPointsIdentical, DegenerateInput, DegenerateLabels,
                      SingularSystem)


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _kernel(kind, bandwidth) -> KernelSpec:
    return KernelSpec(kind or "rbf", bandwidth)


def _load_pair(args):
    x = load_samples_csv(args.x)
    y = load_samples_csv(args.y)
    return x, y


def _run_dir(path, force) -> Path:
    out = Path(path)
    if out.exists():
        if not force:
            raise OutputExists(f"{out} already exists; pass --force to overwrite")
        if not out.is_dir():
            raise OutputExists(f"{out} exists and is not a directory")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out_dir: Path, command: str, run_args: dict) -> None:
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "version": __version__,
        "command": command,
        "args": run_args,
    }
    with open(out_dir / MANIFEST_FILE, "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


def cmd_hsic(args) -> int:
    x, y = _load_pair(args)
    gx = gram(x, _kernel(args.kernel_x, args.bandwidth_x))
    gy = gram(y, _kernel(args.kernel_y, args.bandwidth_y))
    est = hsic_normalized(gx, gy) if args.normalized else hsic_unnormalized(gx, gy)
    _emit(est.to_json())
    return 0


def cmd_smi(args) -> int:
    x, y = _load_pair(args)
    kx = _kernel(args.kernel_x, args.bandwidth_x)
    ky = _kernel(args.kernel_y, args.bandwidth_y)
    if args.fixed_theta:
        est = smi_fixed_theta(gram(x, kx), gram(y, ky))
        chosen = None
    elif args.lam is not None:
        model = fit_density_ratio(x, y, kx, ky, args.lam)
        est = smi_estimate(x, y, model)
        chosen = args.lam
    else:
        est, chosen = smi_cross_validated(x, y, kx, ky,
                                          SmiConfig(cv_folds=args.folds),
                                          seed=args.seed)
    out = est.to_json()
    out["lambda"] = chosen
    _emit(out)
    return 0


def cmd_permtest(args) -> int:
    x, y = _load_pair(args)
    result = permutation_test(x, y,
                              _kernel(args.kernel_x, args.bandwidth_x),
                              _kernel(args.kernel_y, args.bandwidth_y),
                              num_permutations=args.permutations,
                              seed=args.seed)
    _emit(result.to_json())
    return 0


def cmd_generate(args) -> int:
    out = _run_dir(args.out, args.force)
    run_args = {
        "sequences": args.sequences,
        "frames_per_sequence": args.frames_per_sequence,
        "side": args.side,
        "classes": args.classes,
        "seed": args.seed,
    }
    _write_manifest(out, "generate", run_args)
    dataset = generate_synthetic_sequences(args.sequences, args.frames_per_sequence,
                                           args.side, args.classes, args.seed)
    save_dataset(dataset, out)
    _emit({"out": str(out), "frames": int(dataset.frames.shape[0]),
           "side": dataset.side, "classes": dataset.num_classes,
           "sequences": dataset.num_sequences})
    return 0


def _default_dataset(config: AeConfig):
    side = round(config.input_dim ** 0.5)
    if side * side != config.input_dim:
        raise ConfigError(
            f"without --data, input_dim must be a perfect square to frame "
            f"synthetic data; got {config.input_dim}"
        )
    return generate_synthetic_sequences(
        num_sequences=100, frames_per_sequence=20, side=side,
        num_classes=4, seed=config.seed)


def _train_setup(args):
    """Resolve (config, kernels, smi_lambda, data path) from --config, which
    is either a bare AeConfig JSON or a manifest from an earlier run.
    Explicit flags win over manifest values."""
    with open(args.config) as fh:
        obj = json.load(fh)
    manifest_args = None
    if isinstance(obj, dict) and obj.get("schema") == MANIFEST_SCHEMA:
        if obj.get("command") != "train":
            raise ConfigError(f"{args.config}: manifest is not from a train run")
        manifest_args = obj.get("args")
        expected = {"config", "kernel_input", "kernel_latent", "smi_lambda", "data"}
        if not isinstance(manifest_args, dict) or set(manifest_args) != expected:
            raise ConfigError(f"{args.config}: malformed train manifest")
        config = AeConfig.from_dict(manifest_args["config"])
    else:
        config = AeConfig.from_dict(obj)

    def resolve_kernel(kind, bandwidth, manifest_key):
        if kind is not None or bandwidth is not None:
            return _kernel(kind, bandwidth)
        if manifest_args is not None:
            return KernelSpec.from_json(manifest_args[manifest_key])
        return _kernel(None, None)

    kernel_input = resolve_kernel(args.kernel_input, args.bandwidth_input,
                                  "kernel_input")
    kernel_latent = resolve_kernel(args.kernel_latent, args.bandwidth_latent,
                                   "kernel_latent")
    smi_lambda = args.smi_lambda
    if smi_lambda is None and manifest_args is not None:
        smi_lambda = manifest_args["smi_lambda"]
    if smi_lambda is not None:
        try:
            smi_lambda = float(smi_lambda)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"smi_lambda must be a number: {exc}") from exc
    data = args.data
    if data is None and manifest_args is not None:
        data = manifest_args["data"]
    return config, kernel_input, kernel_latent, smi_lambda, data


def cmd_train(args) -> int:
    config, kernel_input, kernel_latent, smi_lambda, data = _train_setup(args)
    out = _run_dir(args.out, args.force)
    _write_manifest(out, "train", {
        "config": config.to_dict(),
        "kernel_input": kernel_input.to_json(),
        "kernel_latent": kernel_latent.to_json(),
        "smi_lambda": smi_lambda,
        "data": str(data) if data is not None else None,
    })
    if data is not None:
        dataset = load_dataset(data)
        log.info("loaded %d frames from %s", dataset.frames.shape[0], data)
    else:
        dataset = _default_dataset(config)
        log.info("generated default synthetic dataset (%d frames)",
                 dataset.frames.shape[0])
    model, trace = train(config, dataset, kernel_input, kernel_latent, smi_lambda)
    save_checkpoint(out / MODEL_FILE, model,
                    extra={"config": config.to_dict(),
                           "fingerprint": trace.fingerprint})
    export_jsonl(trace, out / TRACE_FILE)
    first, last = trace.records[0], trace.records[-1]
    _emit({
        "out": str(out),
        "epochs": last.epoch,
        "first_train_loss": first.train_loss,
        "final_train_loss": last.train_loss,
        "final_val_loss": last.val_loss,
        "best_val_epoch": trace.best_val_epoch,
        "fingerprint": trace.fingerprint,
    })
    return 0


def cmd_probe(args) -> int:
    model, extra = load_checkpoint(args.model)
    dataset = load_dataset(args.data)
    codes = encode(model, dataset.frames)
    labels = dataset.labels
    if args.shuffle_labels is not None:
        labels = np.random.default_rng((args.shuffle_labels, 0)).permutation(labels)
    probe_config = ProbeConfig(hidden_width=args.hidden_width,
                               epochs=args.epochs,
                               learning_rate=args.learning_rate,
                               batch_size=args.batch_size,
                               test_fraction=args.test_fraction,
                               seed=args.seed)
    result = probe_classifier(codes, labels, probe_config)
    out = result.to_json()
    out["shuffle_seed"] = args.shuffle_labels
    out["task"] = (extra.get("config") or {}).get("task")
    _emit(out)
    return 0


def cmd_plot(args) -> int:
    traces = []
    field = "train_loss" if args.series == "loss" else args.series
    for path in args.traces:
        trace = import_jsonl(path)
        if all(getattr(r, field) is None for r in trace.records):
            raise MissingSeries(f"{path}: no numeric values for series {args.series!r}")
        traces.append(trace)
    svg = render_plane_svg(traces, args.series)
    with open(args.out, "w") as fh:
        fh.write(svg)
    log.info("wrote %s", args.out)
    _emit({"out": str(args.out), "series": args.series, "traces": len(traces)})
    return 0


def _add_kernel_flags(parser, first="x", second="y"):
    parser.add_argument(f"--kernel-{first}", choices=KINDS, default=None,
                        help=f"kernel for {first} (default rbf)")
    parser.add_argument(f"--kernel-{second}", choices=KINDS, default=None,
                        help=f"kernel for {second} (default rbf)")
    parser.add_argument(f"--bandwidth-{first}", type=float, default=None,
                        help="RBF bandwidth (default: median heuristic)")
    parser.add_argument(f"--bandwidth-{second}", type=float, default=None,
                        help="RBF bandwidth (default: median heuristic)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kerndep",
        description="Kernel dependence measures and the autoencoder harness.")
    parser.add_argument("--version", action="version",
                        version=f"kerndep {__version__} ({backend_name()} backend)")
    parser.add_argument("--verbose", action="store_true",
                        help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hsic", help="HSIC between two CSV sample files")
    p.add_argument("x")
    p.add_argument("y")
    _add_kernel_flags(p)
    p.add_argument("--normalized", action=argparse.BooleanOptionalAction,
                   default=True, help="normalize into [0, 1] (default on)")
    p.set_defaults(func=cmd_hsic)

    p = sub.add_parser("smi", help="squared-loss mutual information")
    p.add_argument("x")
    p.add_argument("y")
    _add_kernel_flags(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--lambda", dest="lam", type=float, default=None,
                       help="fixed regularization weight (skips cross-validation)")
    group.add_argument("--cv", action="store_true",
                       help="choose the weight by cross-validation (the default)")
    group.add_argument("--fixed-theta", action="store_true",
                       help="pinned-weight evaluation on centered Grams")
    p.add_argument("--folds", type=int, default=5, help="cross-validation folds")
    p.add_argument("--seed", type=int, default=0, help="fold-assignment seed")
    p.set_defaults(func=cmd_smi)

    p = sub.add_parser("permtest", help="permutation test of independence")
    p.add_argument("x")
    p.add_argument("y")
    _add_kernel_flags(p)
    p.add_argument("--permutations", type=int, default=199)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_permtest)

    p = sub.add_parser("generate", help="write a synthetic sequence dataset")
    p.add_argument("out")
    p.add_argument("--sequences", type=int, default=100)
    p.add_argument("--frames-per-sequence", type=int, default=20)
    p.add_argument("--side", type=int, default=16)
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train an autoencoder and trace dependence")
    p.add_argument("out")
    p.add_argument("--config", required=True,
                   help="AeConfig JSON, or a manifest.json from a previous run")
    p.add_argument("--data", default=None,
                   help="dataset directory (default: synthetic from the config seed)")
    _add_kernel_flags(p, "input", "latent")
    p.add_argument("--smi-lambda", type=float, default=None,
                   help="also trace SMI of (input, latent) at this lambda")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("probe", help="classify labels from latent codes")
    p.add_argument("model", help="model.bin checkpoint")
    p.add_argument("data", help="dataset directory")
    p.add_argument("--hidden-width", type=int, default=64)
    p.add_argument("--epochs", type=int, default=150)
    p.add_argument("--learning-rate", type=float, default=1e-2)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--test-fraction", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shuffle-labels", type=int, default=None, metavar="SEED",
                   help="shuffle labels with this seed first (null calibration)")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("plot", help="render trace series to SVG")
    p.add_argument("out", help="output .svg path")
    p.add_argument("traces", nargs="+", help="trace.jsonl files")
    p.add_argument("--series", choices=SERIES, required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format="%(message)s",
                        level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except OutputExists as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except _DEGENERATE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (KerndepError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
