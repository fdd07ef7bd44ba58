"""Command-line front end.

Exit codes: 0 success, 1 computation or output failure, 2 usage or
validation failure.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .data import CsvError, Dataset, DatasetKind, generate_dataset, load_csv, write_csv
from .divergences import DivergenceKind
from .forest import RandomForestModel, fit_random_forest
from .ks_bounds import BoundInfeasibleError
from .report import build_report
from .shapley import (BoundMethod, CoalitionContext, CoalitionError, ExplanationConfig, Mode,
                      imprecise_shapley)

log = logging.getLogger("impshap")

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class ComputeError(Exception):
    pass


def _float_list(text: str, what: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if not values or not all(np.isfinite(values)):
        raise UsageError(f"{what}: values must be finite")
    return values


def _parse_epsilons(text: str) -> list[float]:
    eps = _float_list(text, "--epsilons")
    if any(not 0.0 <= e <= 1.0 for e in eps):
        raise UsageError("--epsilons: every value must lie in [0, 1]")
    if any(b <= a for a, b in zip(eps, eps[1:])):
        raise UsageError(f"--epsilons must be strictly increasing, got {text!r}")
    return eps


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--train", required=True, type=Path, help="training CSV")
    p.add_argument("--label", default="label", help="label column name (default: label)")
    p.add_argument("--model", type=Path, help="serialized forest; skips retraining")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)


def _add_explain_args(p: argparse.ArgumentParser) -> None:
    _add_model_args(p)
    p.add_argument("--point", required=True, help='instance, e.g. "1.5,2.5"')
    p.add_argument("--baseline", help="removal values (default: training means)")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.DISTRIBUTION.value)
    p.add_argument("--distance", choices=["ks", "kl", "chi2"] + [d.value for d in DivergenceKind],
                   default="ks")
    p.add_argument("--method", choices=["lp", "mc"], default="lp")
    p.add_argument("--samples", type=int, default=1000, help="Monte-Carlo samples per term")
    p.add_argument("--out", required=True, type=Path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="impshap",
                                     description="Interval-valued Shapley explanations.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic train/test split")
    g.add_argument("--dataset", required=True, choices=[k.value for k in DatasetKind])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, type=Path, help="output directory")

    t = sub.add_parser("train", help="fit and serialize a random forest")
    _add_model_args(t)
    t.add_argument("--out", required=True, type=Path, help="output JSON path")

    e = sub.add_parser("explain", help="interval Shapley values for one instance")
    _add_explain_args(e)
    e.add_argument("--epsilon", type=float, default=0.1)
    e.add_argument("--eta", type=float, default=0.5, help="strategy mixing weight in [0, 1]")

    s = sub.add_parser("sweep", help="intervals over a grid of epsilon values (CSV)")
    _add_explain_args(s)
    s.add_argument("--epsilons", required=True, help='strictly increasing, e.g. "0,0.05,0.1"')
    return parser


def _load_training(args) -> Dataset:
    try:
        return load_csv(args.train, args.label)
    except FileNotFoundError:
        raise UsageError(f"{args.train}: no such file") from None
    except CsvError as exc:
        raise UsageError(str(exc)) from None


def _model(args, data: Dataset) -> RandomForestModel:
    if args.model is not None:
        try:
            model = RandomForestModel.load(args.model)
        except FileNotFoundError:
            raise UsageError(f"{args.model}: no such file") from None
        except (ValueError, KeyError) as exc:
            raise UsageError(f"{args.model}: not a usable forest ({exc})") from None
        if model.n_features != data.n_features:
            raise UsageError(f"{args.model}: forest expects {model.n_features} features, "
                             f"training data has {data.n_features}")
        return model
    if args.trees < 1 or args.depth < 1:
        raise UsageError("--trees and --depth must be >= 1")
    try:
        return fit_random_forest(data, args.trees, args.depth, seed=args.seed)
    except ValueError as exc:
        raise UsageError(f"cannot train on {args.train}: {exc}") from None


def _config(args, epsilon: float) -> ExplanationConfig:
    try:
        return ExplanationConfig(mode=args.mode, distance=args.distance, epsilon=epsilon,
                                 bound_method=BoundMethod.parse(args.method),
                                 mc_samples=args.samples, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _context(args, data: Dataset, model: RandomForestModel) -> tuple[CoalitionContext, list[float]]:
    point = _float_list(args.point, "--point")
    if len(point) != data.n_features:
        raise UsageError(f"--point has {len(point)} values, training data has "
                         f"{data.n_features} features {data.feature_names}")
    baseline = data.means if args.baseline is None else _float_list(args.baseline, "--baseline")
    if len(baseline) != data.n_features:
        raise UsageError(f"--baseline has {len(baseline)} values, expected {data.n_features}")
    try:
        return CoalitionContext(model, point, baseline), point
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _explain_once(ctx: CoalitionContext, config: ExplanationConfig):
    try:
        return imprecise_shapley(ctx, config)
    except (CoalitionError, BoundInfeasibleError) as exc:
        raise ComputeError(str(exc)) from exc
    except (ValueError, ArithmeticError) as exc:
        raise ComputeError(f"computation failed: {exc}") from exc


def _config_echo(config: ExplanationConfig, **extra) -> dict:
    echo = {"mode": config.mode.value, "distance": config.distance.value,
            "bound_method": config.bound_method.value, "seed": config.seed}
    if config.bound_method is BoundMethod.MONTE_CARLO:
        echo["mc_samples"] = config.mc_samples
    echo.update(extra)
    return echo


def cmd_generate(args) -> None:
    train, test = generate_dataset(args.dataset, args.seed)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        write_csv(train, args.out / "train.csv")
        write_csv(test, args.out / "test.csv")
    except OSError as exc:
        raise ComputeError(f"cannot write to {args.out}: {exc}") from exc
    print(f"wrote {train.n_rows} training and {test.n_rows} test rows to {args.out}")


def cmd_train(args) -> None:
    data = _load_training(args)
    model = _model(args, data)
    try:
        model.save(args.out)
    except OSError as exc:
        raise ComputeError(f"cannot write {args.out}: {exc}") from exc
    print(f"forest of {model.tree_count} trees written to {args.out} (oob accuracy "
          f"{model.oob_accuracy if model.oob_accuracy is not None else 'n/a'})")


def cmd_explain(args) -> None:
    if not 0.0 <= args.eta <= 1.0:
        raise UsageError(f"--eta must lie in [0, 1], got {args.eta}")
    config = _config(args, args.epsilon)
    data = _load_training(args)
    t0 = time.perf_counter()
    model = _model(args, data)
    t1 = time.perf_counter()
    ctx, point = _context(args, data, model)
    result = _explain_once(ctx, config)
    t2 = time.perf_counter()
    report = build_report(result, point, data.feature_names,
                          _config_echo(config, epsilon=config.epsilon, eta=args.eta),
                          {"model_seconds": t1 - t0, "explain_seconds": t2 - t1},
                          etas=(args.eta,))
    if result.warning:
        log.warning(result.warning)
    try:
        report.save(args.out)
    except OSError as exc:
        raise ComputeError(f"cannot write {args.out}: {exc}") from exc
    for f in report.features:
        print(f"{f.name}: precise {f.precise:.6g}  raw [{f.raw[0]:.6g}, {f.raw[1]:.6g}]  "
              f"reduced [{f.reduced[0]:.6g}, {f.reduced[1]:.6g}]")


SWEEP_HEADER = ["feature", "epsilon", "precise", "raw_lo", "raw_hi", "reduced_lo", "reduced_hi",
                "gain_lo", "gain_hi"]


def cmd_sweep(args) -> None:
    epsilons = _parse_epsilons(args.epsilons)
    configs = [_config(args, e) for e in epsilons]
    data = _load_training(args)
    model = _model(args, data)
    ctx, _ = _context(args, data, model)
    results = [_explain_once(ctx, c) for c in configs]
    rows = []
    for k, name in enumerate(data.feature_names):
        for eps, res in zip(epsilons, results):
            raw, red = res.raw[k], res.reduced[k]
            rows.append([name, repr(eps), repr(res.precise[k]), repr(raw.lo), repr(raw.hi),
                         repr(red.lo), repr(red.hi), repr(res.gain.lo), repr(res.gain.hi)])
    try:
        with args.out.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SWEEP_HEADER)
            writer.writerows(rows)
    except OSError as exc:
        raise ComputeError(f"cannot write {args.out}: {exc}") from exc
    for res, eps in zip(results, epsilons):
        if res.warning:
            log.warning("epsilon %g: %s", eps, res.warning)
    print(f"{len(rows)} rows written to {args.out}")


COMMANDS = {"generate": cmd_generate, "train": cmd_train, "explain": cmd_explain,
            "sweep": cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad flags
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"impshap {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ComputeError as exc:
        print(f"impshap {args.command}: failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
