"""Command-line pipeline: each stage reads and writes plain files (CoNLL-U,
TSV, UMX1, JSON) so methods can be composed, swapped and re-run one at a
time. Exit codes: 0 success, 2 usage error, 1 runtime error."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from . import changepoint as _changepoint
from . import contextual as _contextual
from . import corpus as _corpus
from . import evaluation as _evaluation
from . import profiles as _profiles
from . import scoring as _scoring
from . import static as _static
from .corpus import Period
from .manifest import RunManifest, capture_warnings

log = logging.getLogger(__name__)

METRICS = ("apd", "prt", "apd-prt", "jsd")


def _existing_file(value: str) -> Path:
    path = Path(value)
    if not path.is_file():
        raise argparse.ArgumentTypeError(f"no such file: {value}")
    return path


def _existing_dir(value: str) -> Path:
    path = Path(value)
    if not path.is_dir():
        raise argparse.ArgumentTypeError(f"no such directory: {value}")
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lscd",
        description="Detect and quantify lexical semantic change between two periods.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    profile = sub.add_parser(
        "profile", help="score targets by grammatical profile distance"
    )
    profile.add_argument("--corpus-t1", type=_existing_file, nargs="+", required=True)
    profile.add_argument("--corpus-t2", type=_existing_file, nargs="+", required=True)
    profile.add_argument("--targets", type=_existing_file, required=True)
    profile.add_argument(
        "--kind", choices=[k.value for k in _profiles.ProfileKind], required=True
    )
    profile.add_argument("--out", type=Path, required=True)
    profile.add_argument("--profiles-dir", type=Path, default=None,
                         help="where to dump per-lemma profile JSON (default: <out>.profiles)")
    profile.add_argument("--case-fold", action="store_true")
    profile.add_argument("--min-count", type=float, default=0.0,
                         help="drop categories with combined count below this")
    profile.add_argument("--strict", action="store_true",
                         help="abort on malformed CoNLL-U lines instead of skipping")
    profile.set_defaults(run=cmd_profile)

    embed = sub.add_parser(
        "embed-score", help="score targets from usage matrices of token embeddings"
    )
    embed.add_argument("--umx-t1", type=_existing_dir, required=True)
    embed.add_argument("--umx-t2", type=_existing_dir, required=True)
    embed.add_argument("--metric", choices=METRICS, required=True)
    embed.add_argument("--out", type=Path, required=True)
    embed.add_argument("--seed", type=int, default=0)
    embed.add_argument("--max-usages", type=int, default=None,
                       help="seeded uniform cap on rows per matrix")
    embed.set_defaults(run=cmd_embed_score)

    static = sub.add_parser(
        "static-score", help="score targets in Procrustes-aligned static spaces"
    )
    static.add_argument("--vec-t1", type=_existing_file, required=True)
    static.add_argument("--vec-t2", type=_existing_file, required=True)
    static.add_argument("--targets", type=_existing_file, required=True)
    static.add_argument("--mode", choices=[m.value for m in _static.AlignmentMode],
                        required=True)
    static.add_argument("--out", type=Path, required=True)
    static.add_argument("--dump-q", type=Path, default=None,
                        help="write the alignment map as a UMX1 file")
    static.set_defaults(run=cmd_static_score)

    ens = sub.add_parser("ensemble", help="geometric-mean ensemble of two score tables")
    ens.add_argument("--in", dest="inputs", type=_existing_file, nargs=2, required=True)
    ens.add_argument("--out", type=Path, required=True)
    ens.set_defaults(run=cmd_ensemble)

    classify = sub.add_parser(
        "classify", help="binarize a score table via change point detection"
    )
    classify.add_argument("--in", dest="inputs", type=_existing_file, required=True)
    classify.add_argument("--out", type=Path, required=True)
    classify.set_defaults(run=cmd_classify)

    evaluate = sub.add_parser("evaluate", help="evaluate predictions against gold")
    evaluate.add_argument("--pred", type=_existing_file, required=True)
    evaluate.add_argument("--gold", type=_existing_file, required=True)
    evaluate.add_argument("--task", choices=("rank", "class"), required=True)
    evaluate.add_argument("--out", type=Path, required=True)
    evaluate.add_argument("--tsv-out", type=Path, default=None,
                          help="also write a one-row TSV summary")
    evaluate.set_defaults(run=cmd_evaluate)

    correlate = sub.add_parser(
        "correlate", help="pairwise Spearman correlations between method predictions"
    )
    correlate.add_argument("--in", dest="inputs", type=_existing_file, nargs="+",
                           required=True)
    correlate.add_argument("--out", type=Path, required=True)
    correlate.set_defaults(run=cmd_correlate)

    return parser


def _manifest(args: argparse.Namespace, inputs: list[Path]) -> RunManifest:
    config = {
        key: (str(value) if isinstance(value, Path)
              else [str(v) for v in value] if isinstance(value, list)
              else value)
        for key, value in vars(args).items()
        if key != "run"
    }
    manifest = RunManifest(
        command=args.subcommand,
        config=config,
        tool_version=__version__,
        seed=getattr(args, "seed", None),
    )
    manifest.add_inputs(inputs)
    return manifest


def cmd_profile(args: argparse.Namespace) -> None:
    targets = _corpus.read_targets_tsv(args.targets)
    kind = _profiles.ProfileKind(args.kind)
    profiles = {}
    for period, paths in ((Period.T1, args.corpus_t1), (Period.T2, args.corpus_t2)):
        stats = _corpus.ParseStats()

        def sentences(paths=paths, stats=stats):
            for path in paths:
                yield from _corpus.read_conllu(path, strict=args.strict, stats=stats)

        lexicon = _corpus.TargetLexicon(
            entries=[
                _corpus.TargetEntry(lemma=lemma, pos_filter=pos)
                for lemma, pos in targets
            ]
        )
        profiles[period] = _profiles.build_profiles(
            sentences(), lexicon, period, case_fold=args.case_fold
        )
        if stats.skipped_lines:
            log.warning(
                "%s: skipped %d malformed line(s)", period.value, len(stats.skipped_lines)
            )

    scores: dict[str, float | None] = {}
    for lemma, _ in targets:
        scores[lemma] = _profiles.score_profiles(
            profiles[Period.T1][lemma],
            profiles[Period.T2][lemma],
            kind,
            min_count=args.min_count,
        )
        if scores[lemma] is None:
            log.warning("no shared categories for %r; score missing", lemma)
    table = _scoring.ChangeScoreTable(method_id=kind.value.upper(), scores=scores)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    _scoring.write_scores_tsv(args.out, table)
    profiles_dir = args.profiles_dir or Path(f"{args.out}.profiles")
    for period_profiles in profiles.values():
        for profile in period_profiles.values():
            _profiles.dump_profile(profile, profiles_dir)


def _load_umx_dir(directory: Path, period: Period) -> dict[str, _contextual.UsageMatrix]:
    matrices = {}
    for path in sorted(directory.glob("*.umx")):
        matrices[path.stem] = _contextual.read_usage_matrix(path, period)
    if not matrices:
        raise ValueError(f"no .umx files in {directory}")
    return matrices


def cmd_embed_score(args: argparse.Namespace) -> None:
    t1 = _load_umx_dir(args.umx_t1, Period.T1)
    t2 = _load_umx_dir(args.umx_t2, Period.T2)
    for lemma in sorted(set(t1) ^ set(t2)):
        log.warning("lemma %r present in only one period; score missing", lemma)
    scores: dict[str, float | None] = {lemma: None for lemma in set(t1) | set(t2)}
    metric = args.metric
    for lemma in sorted(set(t1) & set(t2)):
        u1, u2 = t1[lemma], t2[lemma]
        if args.max_usages is not None:
            u1 = _contextual.subsample_rows(u1, args.max_usages, args.seed)
            u2 = _contextual.subsample_rows(u2, args.max_usages, args.seed + 1)
        if metric == "apd":
            scores[lemma] = _contextual.apd(u1, u2)
        elif metric == "prt":
            scores[lemma] = _contextual.prt(u1, u2)
        elif metric == "apd-prt":
            scores[lemma] = _contextual.apd_prt(u1, u2)
        else:
            result = _contextual.jsd_result(u1, u2)
            scores[lemma] = None if result is None else result.score
    table = _scoring.ChangeScoreTable(method_id=metric.upper(), scores=scores)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    _scoring.write_scores_tsv(args.out, table)


def cmd_static_score(args: argparse.Namespace) -> None:
    space_t1 = _static.read_word2vec_text(args.vec_t1)
    space_t2 = _static.read_word2vec_text(args.vec_t2)
    alignment = _static.procrustes_align(space_t1, space_t2)
    targets = _corpus.read_targets_tsv(args.targets)
    scores = _static.score_targets(alignment, [lemma for lemma, _ in targets])
    mode = _static.AlignmentMode(args.mode)
    table = _scoring.ChangeScoreTable(method_id=f"SGNS-{mode.value}", scores=scores)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    _scoring.write_scores_tsv(args.out, table)
    if args.dump_q is not None:
        _contextual.write_umx(args.dump_q, alignment.q)


def cmd_ensemble(args: argparse.Namespace) -> None:
    table_a = _scoring.read_scores_tsv(args.inputs[0])
    table_b = _scoring.read_scores_tsv(args.inputs[1])
    combined = _scoring.ensemble(table_a, table_b)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    _scoring.write_scores_tsv(args.out, combined)


def cmd_classify(args: argparse.Namespace) -> None:
    table = _scoring.read_scores_tsv(args.inputs)
    labels = _changepoint.binarize(table)
    log.warning("change point n = %d of %d ranked lemmas",
                labels.change_point_n, len(labels.labels))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    _changepoint.write_labels_tsv(args.out, labels)


def cmd_evaluate(args: argparse.Namespace) -> None:
    gold = _corpus.read_gold_tsv(args.gold)
    if args.task == "rank":
        table = _scoring.read_scores_tsv(args.pred)
        gold_graded = {lemma: graded for lemma, (graded, _) in gold.items()}
        report = _evaluation.evaluate_ranking(table, gold_graded)
    else:
        labels = _changepoint.read_labels_tsv(args.pred)
        gold_binary = {
            lemma: binary for lemma, (_, binary) in gold.items() if binary is not None
        }
        if not gold_binary:
            raise ValueError(f"{args.gold}: no binary labels for the class task")
        report = _evaluation.evaluate_classification(labels, gold_binary)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(
        json.dumps(report.to_json_dict(), indent=2, sort_keys=True, ensure_ascii=False)
        + "\n",
        encoding="utf-8",
    )
    if args.tsv_out is not None:
        fields = (
            report.method_id,
            "NA" if report.spearman is None else repr(report.spearman),
            "NA" if report.p_value is None else repr(report.p_value),
            "NA" if report.accuracy is None else repr(report.accuracy),
            str(report.n_evaluated),
        )
        args.tsv_out.write_text("\t".join(fields) + "\n", encoding="utf-8")


def cmd_correlate(args: argparse.Namespace) -> None:
    tables = [_scoring.read_scores_tsv(path) for path in args.inputs]
    methods, matrix = _evaluation.method_correlation_matrix(tables)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    _evaluation.write_matrix_tsv(args.out, methods, matrix)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("LSCD_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs = []
    for key in ("corpus_t1", "corpus_t2", "targets", "vec_t1", "vec_t2",
                "pred", "gold", "inputs"):
        value = getattr(args, key, None)
        if isinstance(value, Path):
            inputs.append(value)
        elif isinstance(value, list):
            inputs.extend(value)
    try:
        with capture_warnings() as warnings:
            args.run(args)
            manifest = _manifest(args, inputs)
            manifest.warnings = warnings
            manifest.write(args.out)
    except Exception as err:
        print(f"lscd {args.subcommand}: error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
