"""CLI: build-dataset, train, predict, evaluate."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dataset import (
    DatasetError,
    SplitSpec,
    build_dataset,
    read_dataset,
    read_steps,
    split_dataset,
    write_dataset,
)
from .model import evaluate_model, load_model, predict_tsv, save_model, train_model


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stepclassify")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build-dataset", help="rule-label a corpus into a balanced dataset")
    build.add_argument("--corpus", required=True, help="line-per-step text corpus")
    build.add_argument("--per-class", type=int, default=218)
    build.add_argument("--seed", type=int, default=0)
    build.add_argument("--out", required=True, help="output dataset TSV")

    train = sub.add_parser("train", help="train the bag-of-words classifier")
    train.add_argument("--dataset", required=True)
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--out", required=True, help="output model file")
    train.add_argument("--report", help="metrics JSON (test accuracy + confusion matrix)")

    predict = sub.add_parser("predict", help="emit ranked predictions TSV for steps")
    predict.add_argument("--model", required=True)
    predict.add_argument("--steps", required=True,
                         help="document profile JSON or step_id/text TSV")
    predict.add_argument("--out", required=True)

    evaluate = sub.add_parser("evaluate", help="score a model on the held-out test split")
    evaluate.add_argument("--model", required=True)
    evaluate.add_argument("--dataset", required=True)
    evaluate.add_argument("--seed", type=int, default=0, help="split seed used at train time")
    evaluate.add_argument("--report", help="metrics JSON output")
    return parser


def cmd_build(args) -> int:
    lines = Path(args.corpus).read_text().splitlines()
    data = build_dataset(lines, per_class=args.per_class, seed=args.seed)
    write_dataset(data, args.out)
    print(f"wrote {len(data)} rows ({args.per_class} per label) to {args.out}")
    return 0


def cmd_train(args) -> int:
    data = read_dataset(args.dataset)
    train, _, test = split_dataset(data, SplitSpec(seed=args.seed))
    model = train_model(train, seed=args.seed)
    save_model(model, args.out)
    metrics = evaluate_model(model, test)
    if args.report:
        Path(args.report).write_text(metrics.to_json() + "\n")
    print(f"trained on {len(train)} rows; test accuracy {metrics.accuracy:.4f} on {len(test)} rows")
    print(f"model written to {args.out}")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    steps = read_steps(args.steps)
    Path(args.out).write_text(predict_tsv(model, steps))
    print(f"wrote predictions for {len(steps)} steps to {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    data = read_dataset(args.dataset)
    _, _, test = split_dataset(data, SplitSpec(seed=args.seed))
    metrics = evaluate_model(model, test)
    if args.report:
        Path(args.report).write_text(metrics.to_json() + "\n")
    print(f"test accuracy {metrics.accuracy:.4f} on {len(test)} rows")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "build-dataset":
            return cmd_build(args)
        if args.command == "train":
            return cmd_train(args)
        if args.command == "predict":
            return cmd_predict(args)
        if args.command == "evaluate":
            return cmd_evaluate(args)
    except (DatasetError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
