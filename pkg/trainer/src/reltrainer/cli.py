"""Command-line front end: train on instance files, predict to tuple files."""

import argparse
import json
import sys

from reltrainer.data import parse_instances, write_predictions
from reltrainer.model import CONFIG_KEYS, TrainConfig
from reltrainer.train import load_model, predict, save_model, train

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"error: {message}\n")


def _build_parser():
    parser = _Parser(prog="reltrainer", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    cmd = commands.add_parser("train", help="train a classifier on an instance file")
    cmd.add_argument("--instances", required=True, help="instance JSON-lines file")
    cmd.add_argument("--out-dir", required=True, help="artifact output directory")
    cmd.add_argument("--config", help="JSON config file (flags override it)")
    cmd.add_argument("--model-name", help="architecture preset")
    cmd.add_argument("--epochs", type=int)
    cmd.add_argument("--batch-size", type=int)
    cmd.add_argument("--learning-rate", type=float)
    cmd.add_argument("--max-seq-len", type=int, dest="max_sequence_length")
    cmd.add_argument("--seed", type=int)

    cmd = commands.add_parser("predict", help="write one prediction row per instance")
    cmd.add_argument("--model-dir", required=True, help="saved artifact directory")
    cmd.add_argument("--instances", required=True, help="instance JSON-lines file")
    cmd.add_argument("--out", required=True, help="prediction tuple file")
    cmd.add_argument("--batch-size", type=int, default=32)
    return parser


def _resolve_config(args):
    raw = {}
    if args.config:
        with open(args.config, encoding="utf-8") as handle:
            raw = json.load(handle)
        if not isinstance(raw, dict):
            raise ValueError("config file must hold a JSON object")
    overrides = {
        "model_name": args.model_name,
        "epochs": args.epochs,
        "batch_size": args.batch_size,
        "learning_rate": args.learning_rate,
        "max_sequence_length": args.max_sequence_length,
        "seed": args.seed,
    }
    for field, value in overrides.items():
        if value is not None:
            raw[CONFIG_KEYS[field]] = value
    return TrainConfig.from_json_dict(raw)


def _read(path):
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _cmd_train(args):
    config = _resolve_config(args)
    instances = parse_instances(_read(args.instances))
    trained, truncated = train(instances, config)
    save_model(trained, args.out_dir)
    print(
        f"trained on {len(instances)} instances:"
        f" {len(trained.labels)} labels,"
        f" {len(trained.tokenizer)} vocabulary items,"
        f" {truncated} truncated"
    )
    return EXIT_OK


def _cmd_predict(args):
    trained = load_model(args.model_dir)
    instances = parse_instances(_read(args.instances))
    labels = predict(trained, instances, batch_size=args.batch_size)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(write_predictions(instances, labels))
    print(f"{len(labels)} predictions")
    return EXIT_OK


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "train":
            return _cmd_train(args)
        return _cmd_predict(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
