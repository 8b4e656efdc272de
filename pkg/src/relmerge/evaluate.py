"""Measurement apparatus: tuple scoring, significance testing, fold
splitting, subsampling, a trivial co-occurrence baseline, and corpus
statistics."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

from .formats import ParseError
from .instances import strip_boundary_tags
from .model import (
    ASSOCIATION,
    NONE_LABEL,
    EntityType,
    RelationLabel,
    ValidationError,
    canonicalize_pair,
    label_text,
    parse_entity_type,
    parse_label,
    render_entity_type,
    render_label,
)
from .textspan import segment_sentences


@dataclass(frozen=True)
class RelationTuple:
    """One scored prediction or gold assertion, pair in canonical order."""

    doc_id: str
    concept_id1: str
    type1: EntityType
    concept_id2: str
    type2: EntityType
    label: RelationLabel

    def __post_init__(self):
        (id1, t1), (id2, t2) = canonicalize_pair(
            self.concept_id1, self.type1, self.concept_id2, self.type2
        )
        object.__setattr__(self, "concept_id1", id1)
        object.__setattr__(self, "type1", t1)
        object.__setattr__(self, "concept_id2", id2)
        object.__setattr__(self, "type2", t2)

    def match_key(self):
        return (
            self.doc_id,
            self.concept_id1,
            render_entity_type(self.type1),
            self.concept_id2,
            render_entity_type(self.type2),
            render_label(self.label),
        )

    def kind_pair(self):
        kinds = sorted(
            (
                self.type1.kind or self.type1.name,
                self.type2.kind or self.type2.name,
            )
        )
        return (kinds[0], kinds[1])


def write_tuples(tuples):
    """Gold/prediction file: docId, id1, type1, id2, type2, label (TSV)."""
    lines = []
    for t in tuples:
        lines.append(
            "\t".join(
                (
                    t.doc_id,
                    t.concept_id1,
                    render_entity_type(t.type1),
                    t.concept_id2,
                    render_entity_type(t.type2),
                    render_label(t.label),
                )
            )
        )
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def parse_tuples(text):
    """Inverse of write_tuples; `#` comments and blank lines are skipped."""
    tuples = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 6:
            raise ParseError(
                line_no, f"expected 6 tab-separated fields, got {len(fields)}"
            )
        doc_id, id1, type1, id2, type2, label = fields
        try:
            tuples.append(
                RelationTuple(
                    doc_id,
                    id1,
                    parse_entity_type(type1),
                    id2,
                    parse_entity_type(type2),
                    parse_label(label),
                )
            )
        except ValidationError as exc:
            raise ParseError(line_no, str(exc)) from exc
    return tuples


@dataclass(frozen=True)
class PairTypeScore:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    per_pair_type: dict
    undefined_precision: bool
    undefined_recall: bool


def _prf(tp, fp, fn):
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def _dedup_keys(tuples, side):
    keys = set()
    for t in tuples:
        key = t.match_key()
        if key in keys:
            raise ValidationError(f"duplicate tuple in {side} set: {key}")
        keys.add(key)
    return keys


def score(gold, pred):
    """Micro precision/recall/F over exact relation-tuple matches.

    None and corpus-internal None tuples are absence markers and are
    excluded from both sides before counting.  Exact duplicates within one
    side (after exclusion) are rejected.
    """
    gold = [t for t in gold if not t.label.is_none]
    pred = [t for t in pred if not t.label.is_none]
    gold_keys = _dedup_keys(gold, "gold")
    pred_keys = _dedup_keys(pred, "prediction")
    by_pair = {}
    for t in gold:
        bucket = by_pair.setdefault(t.kind_pair(), [0, 0, 0])
        if t.match_key() in pred_keys:
            bucket[0] += 1
        else:
            bucket[2] += 1
    for t in pred:
        if t.match_key() not in gold_keys:
            by_pair.setdefault(t.kind_pair(), [0, 0, 0])[1] += 1
    per_pair = {}
    for kind_pair in sorted(by_pair):
        tp, fp, fn = by_pair[kind_pair]
        precision, recall, f1 = _prf(tp, fp, fn)
        per_pair[kind_pair] = PairTypeScore(tp, fp, fn, precision, recall, f1)
    tp = sum(s.tp for s in per_pair.values())
    fp = sum(s.fp for s in per_pair.values())
    fn = sum(s.fn for s in per_pair.values())
    precision, recall, f1 = _prf(tp, fp, fn)
    return EvalReport(
        tp,
        fp,
        fn,
        precision,
        recall,
        f1,
        per_pair,
        undefined_precision=(tp + fp == 0),
        undefined_recall=(tp + fn == 0),
    )


def regularized_incomplete_beta(a, b, x):
    """I_x(a, b) via the continued-fraction expansion (Lentz evaluation)."""
    if a <= 0 or b <= 0:
        raise ValidationError("shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    # The continued fraction converges fast only for x below the split
    # point; above it, use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(ln_front) * _beta_continued_fraction(a, b, x) / a
    return 1.0 - math.exp(ln_front) * _beta_continued_fraction(b, a, 1.0 - x) / b


def _beta_continued_fraction(a, b, x, max_iterations=300, eps=1e-16):
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iterations + 1):
        m2 = 2 * m
        numerator = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + numerator * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + numerator / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        numerator = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + numerator * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + numerator / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def student_t_two_tailed(t, df):
    """Two-tailed tail mass of the t distribution with df degrees."""
    if df <= 0:
        raise ValidationError("degrees of freedom must be positive")
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))


@dataclass(frozen=True)
class TTestResult:
    statistic: float
    pvalue: float
    degenerate: bool


def paired_t_test(xs, ys):
    """Paired two-tailed t test on per-sample differences.

    Uses the sample standard deviation (n-1).  All-zero differences give
    (t=0, p=1); zero variance with nonzero mean is degenerate and reported
    as (signed infinity, p=0) with the flag set.
    """
    xs = list(xs)
    ys = list(ys)
    if len(xs) != len(ys):
        raise ValidationError(
            f"paired samples differ in length: {len(xs)} vs {len(ys)}"
        )
    n = len(xs)
    if n < 2:
        raise ValidationError("paired t test needs at least 2 sample pairs")
    diffs = [x - y for x, y in zip(xs, ys)]
    mean = sum(diffs) / n
    variance = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    if variance == 0.0:
        if mean == 0.0:
            return TTestResult(0.0, 1.0, False)
        return TTestResult(math.copysign(math.inf, mean), 0.0, True)
    t = mean / math.sqrt(variance / n)
    return TTestResult(t, student_t_two_tailed(t, n - 1), False)


def kfold_split(doc_ids, k, seed):
    """Seeded shuffle then round-robin assignment into k folds."""
    doc_ids = list(doc_ids)
    if len(set(doc_ids)) != len(doc_ids):
        raise ValidationError("fold splitting requires unique ids")
    if k < 2:
        raise ValidationError("k must be at least 2")
    if k > len(doc_ids):
        raise ValidationError(f"k={k} exceeds the {len(doc_ids)} available ids")
    shuffled = list(doc_ids)
    random.Random(seed).shuffle(shuffled)
    folds = [[] for _ in range(k)]
    for index, doc_id in enumerate(shuffled):
        folds[index % k].append(doc_id)
    return folds


def subsample(doc_ids, *, fraction=None, count=None, seed):
    """Seeded sample without replacement, input order preserved."""
    doc_ids = list(doc_ids)
    if (fraction is None) == (count is None):
        raise ValidationError("give exactly one of fraction or count")
    size = count if count is not None else round(fraction * len(doc_ids))
    if not 0 < size <= len(doc_ids):
        raise ValidationError(
            f"sample size {size} out of range 1..{len(doc_ids)}"
        )
    picked = sorted(random.Random(seed).sample(range(len(doc_ids)), size))
    return [doc_ids[index] for index in picked]


def baseline_predict(instances):
    """Co-occurrence baseline: Association when the pair shares a sentence.

    Sentence-level instances are Association by construction.  For
    document-level instances the tagged regions are recovered from the
    context; a pair co-occurs when one sentence holds regions of both
    members' tag codes (two regions when the codes coincide).  A single
    composite span covering both ids counts only once, so such pairs read
    as non-co-occurring; None marks the absence of a prediction.
    """
    predictions = []
    for inst in instances:
        if inst.level == "sentence":
            label = ASSOCIATION
        else:
            code1 = inst.type1.tag_code
            code2 = inst.type2.tag_code
            plain, regions = strip_boundary_tags(inst.context, {code1, code2})
            found = False
            for sentence in segment_sentences(plain):
                inside = [
                    code
                    for code, start, end in regions
                    if sentence.start <= start and end <= sentence.end
                ]
                if code1 == code2:
                    found = inside.count(code1) >= 2
                else:
                    found = code1 in inside and code2 in inside
                if found:
                    break
            label = ASSOCIATION if found else NONE_LABEL
        predictions.append(
            RelationTuple(
                inst.doc_id,
                inst.concept_id1,
                inst.type1,
                inst.concept_id2,
                inst.type2,
                label,
            )
        )
    return predictions


@dataclass(frozen=True)
class CorpusStats:
    corpus: str
    documents: int
    relations: int
    pair_types: dict
    levels: dict
    labels: dict


def _sorted_counts(counter):
    return dict(sorted(counter.items()))


def corpus_stats(source, name="input"):
    """Per-corpus statistics: document and relation counts plus pair-type,
    level, and label histograms.

    source is a HarmonizedCorpus or a plain list of documents; relation
    counts exclude None-style labels.
    """
    if hasattr(source, "entries"):
        grouped = {}
        for entry in source.entries:
            grouped.setdefault(entry.corpus, []).append(entry)
        stats = []
        for corpus in sorted(grouped):
            entries = grouped[corpus]
            pair_types = {}
            levels = {}
            labels = {}
            relations = 0
            for entry in entries:
                for pair in entry.pairs:
                    kinds = sorted(
                        (
                            pair.type1.kind or pair.type1.name,
                            pair.type2.kind or pair.type2.name,
                        )
                    )
                    key = f"{kinds[0]}|{kinds[1]}"
                    pair_types[key] = pair_types.get(key, 0) + 1
                    levels[pair.level] = levels.get(pair.level, 0) + 1
                    text = render_label(pair.label)
                    labels[text] = labels.get(text, 0) + 1
                    if not pair.label.is_none:
                        relations += 1
            stats.append(
                CorpusStats(
                    corpus,
                    len(entries),
                    relations,
                    _sorted_counts(pair_types),
                    _sorted_counts(levels),
                    _sorted_counts(labels),
                )
            )
        return stats
    docs = list(source)
    pair_types = {}
    labels = {}
    relations = 0
    for doc in docs:
        for rel in doc.relations:
            names = sorted(
                (
                    "?" if rel.type1 is None else (rel.type1.kind or rel.type1.name),
                    "?" if rel.type2 is None else (rel.type2.kind or rel.type2.name),
                )
            )
            key = f"{names[0]}|{names[1]}"
            pair_types[key] = pair_types.get(key, 0) + 1
            text = label_text(rel.label)
            labels[text] = labels.get(text, 0) + 1
            relations += 1
    return [
        CorpusStats(
            name,
            len(docs),
            relations,
            _sorted_counts(pair_types),
            {},
            _sorted_counts(labels),
        )
    ]


def render_stats(stats):
    """Aligned-column text rendering of corpus statistics."""
    lines = []
    for s in stats:
        lines.append(f"corpus {s.corpus}")
        lines.append(f"  documents  {s.documents}")
        lines.append(f"  relations  {s.relations}")
        for heading, counts in (
            ("pair types", s.pair_types),
            ("levels", s.levels),
            ("labels", s.labels),
        ):
            lines.append(f"  {heading}")
            if counts:
                width = max(len(key) for key in counts)
                for key, value in counts.items():
                    lines.append(f"    {key.ljust(width)}  {value}")
            else:
                lines.append("    (none)")
    return "\n".join(lines) + "\n"


def stats_to_json(stats):
    payload = [
        {
            "corpus": s.corpus,
            "documents": s.documents,
            "relations": s.relations,
            "pair_types": s.pair_types,
            "levels": s.levels,
            "labels": s.labels,
        }
        for s in stats
    ]
    return json.dumps(payload, ensure_ascii=False, indent=1) + "\n"
