"""Command-line front end for the harmonization pipeline.

Subcommands compose the library: harmonize one corpus, merge harmonized
corpora, emit candidate instances, split or subsample, score predictions,
print statistics, and run the co-occurrence baseline.  All file writes are
atomic (temp file + rename) and every run is deterministic: identical
invocations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .evaluate import (
    RelationTuple,
    baseline_predict,
    corpus_stats,
    kfold_split,
    parse_tuples,
    render_stats,
    score,
    stats_to_json,
    subsample,
    write_tuples,
)
from .formats import (
    load_builtin_profile,
    parse_instances,
    parse_profile,
    parse_pubtator,
    parse_repository,
    write_instances,
)
from .harmonize import (
    corpus_from_json,
    corpus_to_json,
    harmonize_corpus,
    merge_corpora,
    render_report,
)
from .instances import TaggingError, generate_instances
from .model import EntityType, ValidationError
from .textspan import load_lexicon

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _write_atomic(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(
        dir=str(path.parent) or ".", prefix=f".{path.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _read(path):
    return Path(path).read_text(encoding="utf-8")


def _load_profile(spec):
    path = Path(spec)
    if path.exists():
        return parse_profile(_read(path))
    if path.suffix == "" and "/" not in spec and "\\" not in spec:
        return load_builtin_profile(spec)
    raise ValidationError(f"profile file not found: {spec}")


def _looks_like_pubtator(text):
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("|", 2)
        return len(parts) == 3 and parts[1] == "t"
    return False


def _repository_pair_types(profile):
    if len(profile.allowed_pairs) != 1:
        raise ValidationError(
            "repository input needs a profile with exactly one allowed pair"
        )
    (pair,) = profile.allowed_pairs
    kinds = sorted(pair)
    if len(kinds) == 1:
        kinds = [kinds[0], kinds[0]]
    return EntityType(kinds[0]), EntityType(kinds[1])


def _doc_ids_from_input(text):
    """Doc ids from either an instance file or a plain id-per-line file."""
    stripped = [line for line in text.splitlines() if line.strip()]
    if stripped and stripped[0].lstrip().startswith("{"):
        ids = []
        seen = set()
        for inst in parse_instances(text):
            if inst.doc_id not in seen:
                seen.add(inst.doc_id)
                ids.append(inst.doc_id)
        return ids, "instances"
    return [line.strip() for line in stripped], "ids"


def _cmd_harmonize(args):
    profile = _load_profile(args.profile)
    input_text = _read(args.input)
    annotations = parse_pubtator(_read(args.annotations)) if args.annotations else None
    lexicon = load_lexicon(_read(args.lexicon)) if args.lexicon else None
    if _looks_like_pubtator(input_text):
        source = parse_pubtator(input_text)
    else:
        source = parse_repository(input_text, _repository_pair_types(profile))
    corpus, report = harmonize_corpus(
        source,
        profile,
        annotations=annotations,
        lexicon=lexicon,
        threads=args.threads,
    )
    _write_atomic(args.out, corpus_to_json(corpus))
    if args.report:
        _write_atomic(args.report, render_report(report))
    kept = corpus.labeled_pair_count
    print(f"{profile.name}: {len(corpus.entries)} documents, {kept} labeled pairs,"
          f" {len(report)} report records")
    return EXIT_OK


def _cmd_merge(args):
    corpora = [corpus_from_json(_read(path)) for path in args.input]
    merged = merge_corpora(corpora)
    _write_atomic(args.out, corpus_to_json(merged))
    print(f"{merged.tag}: {merged.labeled_pair_count} labeled pairs")
    return EXIT_OK


def _cmd_instances(args):
    corpus = corpus_from_json(_read(args.input))
    instances = generate_instances(corpus, corpus_tag=args.corpus_tag)
    _write_atomic(args.out, write_instances(instances))
    print(f"{len(instances)} instances")
    return EXIT_OK


def _cmd_split(args):
    ids, _ = _doc_ids_from_input(_read(args.input))
    folds = kfold_split(ids, args.k, args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for index, fold in enumerate(folds):
        text = "\n".join(fold) + "\n" if fold else ""
        _write_atomic(out_dir / f"fold_{index:02d}.txt", text)
    print(f"{len(folds)} folds under {out_dir}")
    return EXIT_OK


def _cmd_subsample(args):
    text = _read(args.input)
    ids, kind = _doc_ids_from_input(text)
    picked = subsample(ids, fraction=args.fraction, count=args.count, seed=args.seed)
    if kind == "instances":
        keep = set(picked)
        instances = [inst for inst in parse_instances(text) if inst.doc_id in keep]
        _write_atomic(args.out, write_instances(instances))
        print(f"{len(picked)} documents, {len(instances)} instances")
    else:
        _write_atomic(args.out, "\n".join(picked) + "\n" if picked else "")
        print(f"{len(picked)} documents")
    return EXIT_OK


def _format_score_line(name, entry):
    return (
        f"{name}  P={entry.precision:.3f} R={entry.recall:.3f} F={entry.f1:.3f}"
        f" (tp={entry.tp} fp={entry.fp} fn={entry.fn})"
    )


def _cmd_score(args):
    gold = parse_tuples(_read(args.gold))
    pred = parse_tuples(_read(args.pred))
    report = score(gold, pred)
    for kind_pair, entry in report.per_pair_type.items():
        print(_format_score_line(f"pair {kind_pair[0]}|{kind_pair[1]}", entry))
    print(_format_score_line("micro", report))
    if report.undefined_precision:
        print("note: no predictions after filtering; precision reported as 0")
    if report.undefined_recall:
        print("note: empty gold after filtering; recall reported as 0")
    if args.out:
        payload = {
            "tp": report.tp,
            "fp": report.fp,
            "fn": report.fn,
            "precision": report.precision,
            "recall": report.recall,
            "f1": report.f1,
            "undefined_precision": report.undefined_precision,
            "undefined_recall": report.undefined_recall,
            "per_pair_type": {
                f"{k[0]}|{k[1]}": {
                    "tp": v.tp,
                    "fp": v.fp,
                    "fn": v.fn,
                    "precision": v.precision,
                    "recall": v.recall,
                    "f1": v.f1,
                }
                for k, v in report.per_pair_type.items()
            },
        }
        _write_atomic(args.out, json.dumps(payload, indent=1) + "\n")
    return EXIT_OK


def _cmd_stats(args):
    text = _read(args.input)
    if _looks_like_pubtator(text):
        stats = corpus_stats(parse_pubtator(text), name=Path(args.input).stem)
    else:
        stats = corpus_stats(corpus_from_json(text))
    sys.stdout.write(render_stats(stats))
    if args.out:
        _write_atomic(args.out, stats_to_json(stats))
    return EXIT_OK


def _cmd_baseline(args):
    instances = parse_instances(_read(args.input))
    predictions = baseline_predict(instances)
    _write_atomic(args.out, write_tuples(predictions))
    if args.gold_out:
        gold = [
            RelationTuple(
                inst.doc_id,
                inst.concept_id1,
                inst.type1,
                inst.concept_id2,
                inst.type2,
                inst.label,
            )
            for inst in instances
        ]
        _write_atomic(args.gold_out, write_tuples(gold))
    print(f"{len(predictions)} predictions")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="relmerge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("harmonize", help="adjust one corpus per its profile")
    p.add_argument("--input", required=True, help="corpus file (PubTator-style or repository triples)")
    p.add_argument("--profile", required=True, help="profile file path or built-in profile name")
    p.add_argument("--annotations", help="PubTator-style file with recovered entity spans")
    p.add_argument("--lexicon", help="surface-form lexicon for dictionary matching")
    p.add_argument("--out", required=True, help="harmonized corpus output (JSON)")
    p.add_argument("--report", help="drop/conflict report output (JSON lines)")
    p.add_argument("--threads", type=int, default=1, help="worker threads (outputs unchanged)")
    p.set_defaults(func=_cmd_harmonize)

    p = sub.add_parser("merge", help="merge harmonized corpora")
    p.add_argument("--input", required=True, nargs="+", help="harmonized corpus files")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_merge)

    p = sub.add_parser("instances", help="emit candidate instances")
    p.add_argument("--input", required=True, help="harmonized corpus file")
    p.add_argument("--out", required=True, help="instance file (JSON lines)")
    p.add_argument("--corpus-tag", help="override the prompt's corpus name")
    p.set_defaults(func=_cmd_instances)

    p = sub.add_parser("split", help="deterministic k-fold split of document ids")
    p.add_argument("--input", required=True, help="instance file or one doc id per line")
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("subsample", help="seeded sample of documents")
    p.add_argument("--input", required=True, help="instance file or one doc id per line")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--fraction", type=float)
    group.add_argument("--count", type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_subsample)

    p = sub.add_parser("score", help="micro P/R/F over relation tuples")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--out", help="structured score report (JSON)")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("--input", required=True, help="harmonized corpus or PubTator-style file")
    p.add_argument("--out", help="structured stats output (JSON)")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("baseline", help="co-occurrence baseline predictions")
    p.add_argument("--input", required=True, help="instance file")
    p.add_argument("--out", required=True, help="prediction tuples (TSV)")
    p.add_argument("--gold-out", help="also write gold tuples from instance labels")
    p.set_defaults(func=_cmd_baseline)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, TaggingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
