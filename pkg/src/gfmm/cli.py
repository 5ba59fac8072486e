"""``gfmm`` command line: train, predict, evaluate, ensemble, prune, snapshot.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import ModelParams, as_patterns, fit_scaler
from .evaluation import (
    ALGORITHMS,
    ExperimentSpec,
    format_metrics_csv,
    format_summary_csv,
    parse_thetas,
    run_experiment,
    summarize,
)
from .io import DataError, ModelFormatError, load_csv, load_model, save_model
from .iol import train_iol
from .onln import train_online
from .prediction import STRATEGIES, predict_many
from .refinement import EnsembleModel, predict_ensemble_many, prune, train_ensemble
from .snapshot import UnsupportedDimensionError, render_svg

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _data_args(p, labels=True):
    p.add_argument("data", help="CSV file, one sample per row")
    p.add_argument("--no-header", dest="has_header", action="store_false", help="first row is data")
    if labels:
        p.add_argument("--label-column", type=int, default=-1, help="label column index (default: last)")


def _model_args(p):
    p.add_argument("--theta", type=float, default=0.1, help="maximum hyperbox size in (0, 1]")
    p.add_argument("--gamma", type=float, default=1.0, help="membership sensitivity")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gfmm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gfmm {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train one model on a CSV file")
    _data_args(p)
    _model_args(p)
    p.add_argument("--algorithm", choices=("onln", "iol"), default="iol")
    p.add_argument("--seed", type=int, default=None, help="shuffle the rows with this seed before training")
    p.add_argument("--out", required=True, help="model file to write")

    p = sub.add_parser("ensemble", help="train an ensemble over shuffled presentation orders")
    _data_args(p)
    _model_args(p)
    p.add_argument("--members", type=int, default=11)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("predict", help="classify the rows of a CSV file")
    p.add_argument("model")
    _data_args(p, labels=False)
    p.add_argument(
        "--label-column", type=int, default=None,
        help="column holding true labels, ignored for prediction (default: last column "
        "when the file has one column more than the model has features)",
    )
    p.add_argument("--tie", choices=STRATEGIES, default="cardinality")
    p.add_argument("--seed", type=int, default=0, help="seed for --tie random")
    p.add_argument("--out", default="-", help="predictions CSV (default: stdout)")

    p = sub.add_parser("evaluate", help="cross-validated theta sweep, metrics as CSV")
    _data_args(p)
    p.add_argument("--algorithm", action="append", choices=ALGORITHMS, help="repeatable (default: iol)")
    p.add_argument("--theta", default="0.1..0.7", help='e.g. "0.1..0.7", "0.1..0.7:0.05" or "0.1,0.4"')
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--folds", type=int, default=4)
    p.add_argument("--noise", type=float, default=0.0, help="fraction of training labels to corrupt")
    p.add_argument("--prune-threshold", type=float, default=None, help="enable pruning with this threshold")
    p.add_argument("--reps", type=int, default=1, help="shuffled repetitions per cell")
    p.add_argument("--members", type=int, default=11, help="ensemble size for iol-ensemble")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", default="-", help="metrics CSV (default: stdout)")
    p.add_argument("--summary", default=None, help="also write a summary CSV here")

    p = sub.add_parser("prune", help="drop boxes that do badly on a validation CSV")
    p.add_argument("model")
    _data_args(p)
    p.add_argument("--prune-threshold", type=float, default=0.5)
    p.add_argument("--out", required=True)

    p = sub.add_parser("snapshot", help="SVG drawing of a 2-feature model")
    p.add_argument("model")
    p.add_argument("--data", default=None, help="optional CSV of points to overlay")
    p.add_argument("--no-header", dest="has_header", action="store_false")
    p.add_argument("--label-column", type=int, default=-1)
    p.add_argument("--out", required=True)
    return parser


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _csv_width(path) -> int:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return len(next(r for r in csv.reader(fh) if r))
    except (OSError, StopIteration):
        return -1


def _unit_scale(scaler, X):
    return np.clip(scaler.transform(X), 0.0, 1.0)


def _unit(model, X):
    return _unit_scale(model.scaler, X)


def _labelled(model, ds):
    """Align a dataset's label ids with the model's class names."""
    if not model.class_names:
        return ds.y
    by_name = {name: i for i, name in model.class_names.items()}
    out = np.zeros_like(ds.y)
    for k, name in ds.class_names.items():
        out[ds.y == k] = by_name.get(name, -1)
    return out


def cmd_train(args):
    ds = load_csv(args.data, args.label_column, args.has_header)
    scaler = fit_scaler(ds.X)
    params = ModelParams.create(args.theta, ds.X.shape[1], args.gamma)
    order = np.arange(ds.n_samples)
    if args.seed is not None:
        order = np.random.default_rng(args.seed).permutation(order)
    patterns = as_patterns(_unit_scale(scaler, ds.X[order]), None, ds.y[order])
    trainer = train_iol if args.algorithm == "iol" else train_online
    model = trainer(patterns, params, scaler=scaler)
    model.class_names = dict(ds.class_names)
    save_model(model, args.out, algorithm=args.algorithm, seed=args.seed, source=str(args.data))
    logging.info("trained %d boxes from %d rows", model.n_boxes, ds.n_samples)


def cmd_ensemble(args):
    ds = load_csv(args.data, args.label_column, args.has_header)
    scaler = fit_scaler(ds.X)
    params = ModelParams.create(args.theta, ds.X.shape[1], args.gamma)
    patterns = as_patterns(_unit_scale(scaler, ds.X), None, ds.y)
    ens = train_ensemble(patterns, params, args.members, seed=args.seed, scaler=scaler)
    for m in ens.members:
        m.class_names = dict(ds.class_names)
    save_model(ens, args.out, algorithm="iol-ensemble", seed=args.seed, source=str(args.data))


def cmd_predict(args):
    model = load_model(args.model)
    label_col = args.label_column
    if label_col is None and _csv_width(args.data) == model.n_features + 1:
        label_col = -1
    ds = load_csv(args.data, label_col, args.has_header)
    X = ds.X
    if X.shape[1] != model.n_features:
        raise DataError(f"{args.data}: {X.shape[1]} feature columns, model expects {model.n_features}")
    U = _unit(model, X)
    if isinstance(model, EnsembleModel):
        ids = predict_ensemble_many(U, U, model, args.tie, args.seed)
    else:
        ids = predict_many(U, U, model, args.tie, args.seed)
    names = model.class_names
    lines = ["label"] + [names.get(int(i), str(int(i))) for i in ids]
    _write(args.out, "\n".join(lines) + "\n")
    if label_col is not None:
        truth = _labelled(model, ds)
        err = 100.0 * np.count_nonzero(ids != truth) / ids.size
        print(f"error_pct={err:.4f} n={ids.size}", file=sys.stderr)


def cmd_evaluate(args):
    spec = ExperimentSpec(
        dataset=args.data,
        folds=args.folds,
        thetas=parse_thetas(args.theta),
        algorithms=tuple(args.algorithm or ("iol",)),
        noise=args.noise,
        pruning=args.prune_threshold is not None,
        prune_threshold=0.5 if args.prune_threshold is None else args.prune_threshold,
        repetitions=args.reps,
        members=args.members,
        gamma=args.gamma,
        seed=args.seed,
        label_column=args.label_column,
        has_header=args.has_header,
    )
    ds = load_csv(spec.dataset, spec.label_column, spec.has_header)
    records = run_experiment(spec, ds.X, ds.y)
    expected = len(spec.algorithms) * spec.folds * len(spec.thetas) * spec.repetitions * (1 + spec.pruning)
    _write(args.out, format_metrics_csv(records, args.seed))
    if args.summary:
        _write(args.summary, format_summary_csv(summarize(records)))
    if len(records) != expected:
        print(f"{expected - len(records)} of {expected} cells failed; see log", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_prune(args):
    model = load_model(args.model)
    ds = load_csv(args.data, args.label_column, args.has_header)
    val = as_patterns(_unit(model, ds.X), None, _labelled(model, ds))
    if isinstance(model, EnsembleModel):
        model = EnsembleModel([prune(m, val, args.prune_threshold) for m in model.members], model.seeds)
    else:
        model = prune(model, val, args.prune_threshold)
    save_model(model, args.out, pruned_with=str(args.data), prune_threshold=args.prune_threshold)


def cmd_snapshot(args):
    model = load_model(args.model)
    if isinstance(model, EnsembleModel):
        model = model.members[0]
    points = labels = None
    if args.data:
        ds = load_csv(args.data, args.label_column, args.has_header)
        if ds.X.shape[1] == model.n_features:
            points, labels = _unit(model, ds.X), _labelled(model, ds)
    Path(args.out).write_text(render_svg(model, points, labels, title=Path(args.model).name), encoding="utf-8")


COMMANDS = {
    "train": cmd_train,
    "ensemble": cmd_ensemble,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "prune": cmd_prune,
    "snapshot": cmd_snapshot,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args) or EXIT_OK
    except (DataError, ModelFormatError, UnsupportedDimensionError, FileNotFoundError) as exc:
        print(f"gfmm {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"gfmm {args.command}: invalid argument: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - last-resort diagnostic
        print(f"gfmm {args.command}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
