"""Command line for producing the scoring core's inputs: `extract` writes
UMX1 usage matrices per target per period; `finetune` adapts the language
model to a corpus first. Exit codes: 0 success, 2 usage error, 1 runtime
error."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .config import ExtractionConfig, epochs_for_language
from .conllu import collect_surface_forms, index_usages, read_conllu, read_targets_tsv
from .extract import extract_usage_matrices, load_model
from .finetune import DEFAULT_BATCH_SIZE, DEFAULT_MAX_LENGTH, finetune

log = logging.getLogger(__name__)


def _existing_file(value: str) -> Path:
    path = Path(value)
    if not path.is_file():
        raise argparse.ArgumentTypeError(f"no such file: {value}")
    return path


def _layers(value: str):
    if value == "all":
        return "all"
    return [int(part) for part in value.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lscd-extract",
        description="Produce usage matrices of contextualised embeddings.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    extract = sub.add_parser("extract", help="write UMX1 matrices per target per period")
    extract.add_argument("--corpus-t1", type=_existing_file, required=True)
    extract.add_argument("--corpus-t2", type=_existing_file, required=True)
    extract.add_argument("--targets", type=_existing_file, required=True)
    extract.add_argument("--model", required=True,
                         help="model directory or identifier")
    extract.add_argument("--out-dir", type=Path, required=True,
                         help="t1/ and t2/ are created underneath")
    extract.add_argument("--max-context-length", type=int, default=256)
    extract.add_argument("--batch-size", type=int, default=32)
    extract.add_argument("--layers", type=_layers, default="all",
                         help='"all" (transformer layers) or comma-separated '
                              "hidden-state indices (0 = embedding output)")
    extract.set_defaults(run=cmd_extract)

    tune = sub.add_parser("finetune", help="masked-LM fine-tuning on a corpus")
    tune.add_argument("--corpus", type=_existing_file, nargs="+", required=True)
    tune.add_argument("--model", required=True)
    tune.add_argument("--out", type=Path, required=True)
    group = tune.add_mutually_exclusive_group(required=True)
    group.add_argument("--epochs", type=int)
    group.add_argument("--language", help="pick the per-language epoch setting")
    tune.add_argument("--targets", type=_existing_file, default=None,
                      help="collect these targets' surface forms into the vocabulary")
    tune.add_argument("--max-length", type=int, default=DEFAULT_MAX_LENGTH)
    tune.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE)
    tune.add_argument("--learning-rate", type=float, default=5e-5)
    tune.add_argument("--seed", type=int, default=0)
    tune.set_defaults(run=cmd_finetune)

    return parser


def cmd_extract(args: argparse.Namespace) -> None:
    config = ExtractionConfig(
        model=args.model,
        max_context_length=args.max_context_length,
        batch_size=args.batch_size,
        layers=args.layers,
    )
    targets = read_targets_tsv(args.targets)
    tokenizer, model = load_model(config.model)
    manifest = {"command": "extract", "model": args.model, "periods": {}}
    for period, corpus_path in (("t1", args.corpus_t1), ("t2", args.corpus_t2)):
        sentences = list(read_conllu(corpus_path))
        occurrences = index_usages(sentences, targets)
        report = extract_usage_matrices(
            sentences, occurrences, config,
            args.out_dir / period, tokenizer=tokenizer, model=model,
        )
        if not report.reconciles():
            raise RuntimeError(f"row counts do not reconcile for {period}")
        manifest["periods"][period] = report.to_json_dict()
    manifest_path = args.out_dir / "extraction.manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def cmd_finetune(args: argparse.Namespace) -> None:
    sentences = []
    for path in args.corpus:
        sentences.extend(read_conllu(path))
    epochs = args.epochs if args.epochs is not None else epochs_for_language(args.language)
    added_vocabulary: list[str] = []
    if args.targets is not None:
        targets = read_targets_tsv(args.targets)
        forms = collect_surface_forms(sentences, targets)
        added_vocabulary = sorted(set().union(*forms.values()))
    finetune(
        sentences,
        model_path=args.model,
        out_dir=args.out,
        epochs=epochs,
        max_length=args.max_length,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        seed=args.seed,
        added_vocabulary=added_vocabulary,
    )


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("LSCD_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.run(args)
    except Exception as err:
        print(f"lscd-extract {args.subcommand}: error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
