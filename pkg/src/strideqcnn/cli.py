"""Command-line driver: run experiments, estimate resources, train weights,
emit loss comparisons, self-test the simulator, and synthesize datasets."""

from __future__ import annotations

import argparse
import sys

from .experiment import (
    ExperimentConfig,
    config_from_mapping,
    emit_loss_comparison,
    parse_config_file,
    run_experiment,
    summary_lines,
    train_and_save_weights,
)


def _experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value settings file")
    parser.add_argument("--images", help="IDX image file")
    parser.add_argument("--labels", help="IDX label file")
    parser.add_argument("--digits", help="digit pair, e.g. 6,9")
    parser.add_argument("--samples", type=int, help="evaluation image count")
    parser.add_argument("--train-samples", type=int, dest="train_samples")
    parser.add_argument("--stride-conv", type=int, dest="conv_stride")
    parser.add_argument("--stride-pool", type=int, dest="pool_stride")
    parser.add_argument("--backend", choices=("exact", "circuit"))
    parser.add_argument("--qae-bits", type=int, dest="qae_bits")
    parser.add_argument("--angle-bits", type=int, dest="angle_bits")
    parser.add_argument("--shots", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--weights", dest="weights_path")
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--sweep", help="stride pairs, e.g. '1,1;1,2;2,1'")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip PNG rendering")
    parser.add_argument("--out", dest="out_dir", help="output directory")


def _resolve_config(args) -> ExperimentConfig:
    config = ExperimentConfig()
    if args.config:
        config = config_from_mapping(parse_config_file(args.config), config)
    overrides = {}
    for key in ("images", "labels", "digits", "samples", "train_samples",
                "conv_stride", "pool_stride", "backend", "qae_bits",
                "angle_bits", "shots", "seed", "epochs", "weights_path",
                "jobs", "sweep", "out_dir"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = str(value)
    config = config_from_mapping(overrides, config)
    if getattr(args, "no_figures", False):
        config = config_from_mapping({"figures": "false"}, config)
    return config


def _cmd_run(args) -> int:
    config = _resolve_config(args)
    summaries = run_experiment(config)
    for summary in summaries:
        print("\n".join(summary_lines(summary)))
        print()
    print(f"report written to {config.out_dir}/report.txt")
    return 0


def _cmd_estimate(args) -> int:
    from .resources import estimate_resources, format_budget

    budget = estimate_resources(args.m, args.n, args.m_out, args.n_pool,
                                args.angle_bits, 2.0 ** -args.qae_bits,
                                stride=args.stride, pool_stride=args.pool_stride)
    print(format_budget(budget), end="")
    return 0


def _cmd_train(args) -> int:
    config = _resolve_config(args)
    train_and_save_weights(config, args.weights_out)
    print(f"weights written to {args.weights_out}")
    return 0


def _cmd_losses(args) -> int:
    config = _resolve_config(args)
    histories = emit_loss_comparison(config)
    for name, history in sorted(histories.items()):
        train_loss, val_loss = history[-1]
        print(f"{name}: final train {train_loss:.4f}, validation {val_loss:.4f}, "
              f"gap {val_loss - train_loss:+.4f}")
    print(f"curves written to {config.out_dir}/losses_*.csv")
    return 0


def _cmd_synth(args) -> int:
    from .mnist import write_synthetic_dataset

    digits = tuple(int(d) for d in args.digits.replace(",", " ").split())
    write_synthetic_dataset(args.images_out, args.labels_out, digits,
                            args.count, args.seed)
    print(f"wrote {args.count} synthetic images of digits {digits}")
    return 0


def _cmd_selftest(args) -> int:
    from . import selftest

    return selftest.run(verbose=not args.quiet)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="strideqcnn",
        description="Stride-flexible quantum CNN simulator and experiment "
                    "harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a classification experiment")
    _experiment_flags(run)
    run.set_defaults(func=_cmd_run)

    estimate = sub.add_parser("estimate", help="print the qubit cost ledger")
    estimate.add_argument("--m", type=int, required=True, help="image side")
    estimate.add_argument("--n", type=int, required=True, help="kernel side")
    estimate.add_argument("--m-out", type=int, required=True, dest="m_out",
                          help="convolution output side")
    estimate.add_argument("--n-pool", type=int, default=2, dest="n_pool",
                          help="pooling window side")
    estimate.add_argument("--angle-bits", type=int, default=12,
                          dest="angle_bits")
    estimate.add_argument("--qae-bits", type=int, default=6, dest="qae_bits")
    estimate.add_argument("--stride", type=int, default=1)
    estimate.add_argument("--pool-stride", type=int, default=1,
                          dest="pool_stride")
    estimate.set_defaults(func=_cmd_estimate)

    train = sub.add_parser("train", help="train fully connected weights")
    _experiment_flags(train)
    train.add_argument("--weights-out", required=True, dest="weights_out")
    train.set_defaults(func=_cmd_train)

    losses = sub.add_parser("losses",
                            help="compare pooled vs double-conv training loss")
    _experiment_flags(losses)
    losses.set_defaults(func=_cmd_losses)

    synth = sub.add_parser("synth", help="write a synthetic IDX dataset")
    synth.add_argument("--images-out", required=True, dest="images_out")
    synth.add_argument("--labels-out", required=True, dest="labels_out")
    synth.add_argument("--digits", default="6,9")
    synth.add_argument("--count", type=int, default=512)
    synth.add_argument("--seed", type=int, default=7)
    synth.set_defaults(func=_cmd_synth)

    selftest = sub.add_parser("selftest", help="run the invariant suite")
    selftest.add_argument("--quiet", action="store_true")
    selftest.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
