"""Profile-driven corpus adjustment and merging.

Each corpus passes through the same pipeline: span recovery, entity
retagging, per-pair context delimitation, label mapping, and the negative
policy.  Every input relation either survives as a labeled pair or shows
up in the drop report with a stage and reason; nothing vanishes silently.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .formats import ParseError, RepositoryRecord
from .instances import enumerate_pairs
from .model import (
    ASSOCIATION,
    CANONICAL_RELATION_TYPES,
    Document,
    EntityMention,
    EntityType,
    NONE_LABEL,
    RelationAnnotation,
    RelationLabel,
    ValidationError,
    label_text,
    parse_entity_type,
    parse_label,
    render_entity_type,
    render_label,
)
from .textspan import attach_annotations, dictionary_match, find_cooccurrence


class LabelConflictError(ValidationError):
    """Two annotations give one pair different labels in one document."""

    def __init__(self, doc_id, id1, id2, label_a, label_b):
        super().__init__(
            f"document {doc_id}: conflicting labels for pair ({id1}, {id2}):"
            f" {label_a!r} vs {label_b!r}"
        )
        self.doc_id = doc_id
        self.pair = (id1, id2)


@dataclass(frozen=True)
class LabeledPair:
    """One canonical concept pair with its mapped label and context."""

    concept_id1: str
    type1: EntityType
    concept_id2: str
    type2: EntityType
    label: RelationLabel
    level: str
    span: tuple[int, int]


@dataclass(frozen=True)
class HarmonizedDocument:
    """A post-adjustment document plus its labeled pairs."""

    corpus: str
    document: Document
    pairs: tuple[LabeledPair, ...]


@dataclass(frozen=True)
class HarmonizedCorpus:
    """One or more adjusted corpora in the shared format."""

    tag: str
    entries: tuple[HarmonizedDocument, ...]

    @property
    def labeled_pair_count(self):
        return sum(len(entry.pairs) for entry in self.entries)


@dataclass(frozen=True)
class ReportRecord:
    """One drop/warning event: what was lost, where, and why."""

    corpus: str
    doc_id: str
    concept_id1: str
    concept_id2: str
    label: str
    stage: str
    reason: str


# Report stages that account for a dropped input relation.  "attach"
# records are mention-level warnings and do not consume a relation.
RELATION_STAGES = ("span", "context", "policy", "conflict")


def _mention_map(annotations):
    """Normalize an annotation source to a doc-id -> mentions mapping."""
    if annotations is None:
        return None
    if isinstance(annotations, dict):
        return annotations
    mapping = {}
    for doc in annotations:
        if doc.id in mapping:
            raise ValidationError(f"duplicate document id in annotations: {doc.id}")
        mapping[doc.id] = doc.mentions
    return mapping


def recover_spans(docs, solution, *, annotations=None, lexicon=None, corpus=""):
    """Apply the span-recovery solution to documents.

    a1 keeps documents unchanged.  a2 attaches recovered mentions and keeps
    a relation only when both its concept ids have a mention anywhere; a3
    additionally requires both ids to co-occur in one sentence.  Returns
    (documents, report records).
    """
    if solution == "a1":
        return list(docs), []
    annotations = _mention_map(annotations)
    if annotations is None and lexicon is None:
        raise ValidationError(
            f"span recovery {solution} requires an annotation source"
            " (annotation file and/or lexicon)"
        )
    out = []
    records = []
    for doc in docs:
        auto = list(annotations.get(doc.id, ())) if annotations else []
        if lexicon is not None:
            auto.extend(dictionary_match(doc.combined_text, lexicon))
        attached, warnings = attach_annotations(doc, auto)
        for mention, reason in warnings:
            records.append(
                ReportRecord(
                    corpus,
                    doc.id,
                    mention.concept_ids[0],
                    "",
                    "",
                    "attach",
                    f"auto mention {mention.text!r} rejected: {reason}",
                )
            )
        mention_ids = {cid for m in attached.mentions for cid in m.concept_ids}
        kept = []
        for rel in attached.relations:
            missing = [
                cid
                for cid in (rel.concept_id1, rel.concept_id2)
                if cid not in mention_ids
            ]
            if missing:
                records.append(
                    ReportRecord(
                        corpus,
                        doc.id,
                        rel.concept_id1,
                        rel.concept_id2,
                        label_text(rel.label),
                        "span",
                        f"entity not found: {','.join(missing)}",
                    )
                )
                continue
            if solution == "a3" and find_cooccurrence(
                attached, rel.concept_id1, rel.concept_id2
            ) is None:
                records.append(
                    ReportRecord(
                        corpus,
                        doc.id,
                        rel.concept_id1,
                        rel.concept_id2,
                        label_text(rel.label),
                        "span",
                        "no co-occurring sentence",
                    )
                )
                continue
            kept.append(rel)
        out.append(replace(attached, relations=tuple(kept)))
    return out, records


def _resolve_type(mentions, concept_id):
    for m in mentions:
        if concept_id in m.concept_ids:
            return m.entity_type
    return None


def retag_entities(docs, profile):
    """Map mention entity types through the profile's entity_type_map.

    Unmapped type names pass through unchanged.  Relation member types are
    refreshed from the retagged mentions.
    """
    out = []
    for doc in docs:
        mentions = sorted(
            (
                replace(
                    m,
                    entity_type=profile.entity_type_map.get(
                        m.entity_type.name, m.entity_type
                    ),
                )
                for m in doc.mentions
            ),
            key=lambda m: m.sort_key(),
        )
        relations = tuple(
            RelationAnnotation(
                rel.concept_id1,
                rel.concept_id2,
                _resolve_type(mentions, rel.concept_id1),
                _resolve_type(mentions, rel.concept_id2),
                rel.label,
            )
            for rel in doc.relations
        )
        out.append(replace(doc, mentions=tuple(mentions), relations=relations))
    return out


def delimit_context(doc, id1, id2, level):
    """Context span for a pair: b1 the whole combined text, b2 the first
    co-occurring sentence.  Returns ((start, end), level name) or None when
    b2 finds no co-occurring sentence."""
    if level == "b1":
        return (0, len(doc.combined_text)), "document"
    sentence = find_cooccurrence(doc, id1, id2)
    if sentence is None:
        return None
    return (sentence.start, sentence.end), "sentence"


def map_label(text, profile):
    """Map source label text to a canonical relation label.

    d2 collapses everything to Association.  d1 looks the text up in the
    profile's label_map; text already naming a canonical type maps to
    itself, anything else unmapped becomes Association.
    """
    if profile.granularity == "d2":
        return ASSOCIATION
    mapped = profile.label_map.get(text)
    if mapped is not None:
        return mapped
    if text in CANONICAL_RELATION_TYPES:
        return RelationLabel(text)
    return ASSOCIATION


def apply_negative_policy(doc, profile):
    """Label every allowed candidate pair of one document.

    Annotated pairs keep their mapped label; unannotated pairs become the
    corpus-internal negative (c1), the shared None (c2), or are omitted
    (c3).  Returns (labeled pairs, report records).  Conflicting labels on
    one pair raise LabelConflictError.
    """
    annotated = {}
    first_rel = {}
    records = []
    for rel in doc.relations:
        key = frozenset((rel.concept_id1, rel.concept_id2))
        text = label_text(rel.label)
        if key in annotated:
            if annotated[key] != text:
                raise LabelConflictError(
                    doc.id, rel.concept_id1, rel.concept_id2, annotated[key], text
                )
            records.append(
                ReportRecord(
                    profile.name,
                    doc.id,
                    rel.concept_id1,
                    rel.concept_id2,
                    text,
                    "policy",
                    "duplicate annotation",
                )
            )
            continue
        annotated[key] = text
        first_rel[key] = rel
    pairs = []
    matched = set()
    for (id1, type1, id2, type2), _support in enumerate_pairs(doc, profile.allowed_pairs):
        key = frozenset((id1, id2))
        context = delimit_context(doc, id1, id2, profile.level)
        if key in annotated:
            matched.add(key)
            if context is None:
                records.append(
                    ReportRecord(
                        profile.name,
                        doc.id,
                        id1,
                        id2,
                        annotated[key],
                        "context",
                        "no co-occurring sentence",
                    )
                )
                continue
            label = map_label(annotated[key], profile)
        else:
            if context is None:
                continue
            if profile.negative_policy == "c1":
                label = RelationLabel.internal_none(profile.name)
            elif profile.negative_policy == "c2":
                label = NONE_LABEL
            else:
                continue
        (start, end), level_name = context
        pairs.append(LabeledPair(id1, type1, id2, type2, label, level_name, (start, end)))
    mention_ids = {cid for m in doc.mentions for cid in m.concept_ids}
    for key, text in annotated.items():
        if key in matched:
            continue
        rel = first_rel[key]
        missing = [
            cid for cid in (rel.concept_id1, rel.concept_id2) if cid not in mention_ids
        ]
        reason = (
            f"entity not found: {','.join(missing)}"
            if missing
            else "pair type not allowed"
        )
        records.append(
            ReportRecord(
                profile.name,
                doc.id,
                rel.concept_id1,
                rel.concept_id2,
                text,
                "policy",
                reason,
            )
        )
    return pairs, records


def _documents_from_records(records, annotation_docs, profile):
    """Build documents for repository input: text and mentions come from
    the annotation corpus, relations from the records."""
    grouped = {}
    for rec in records:
        grouped.setdefault(rec.doc_id, []).append(rec)
    docs = []
    dropped = []
    for doc in annotation_docs:
        recs = grouped.pop(doc.id, [])
        relations = list(doc.relations)
        for rec in recs:
            relations.append(
                RelationAnnotation(
                    rec.concept_id1,
                    rec.concept_id2,
                    rec.type1,
                    rec.type2,
                    label_text(rec.label),
                )
            )
        docs.append(replace(doc, relations=tuple(relations)))
    for doc_id, recs in grouped.items():
        for rec in recs:
            dropped.append(
                ReportRecord(
                    profile.name,
                    doc_id,
                    rec.concept_id1,
                    rec.concept_id2,
                    label_text(rec.label),
                    "span",
                    "document not found",
                )
            )
    return docs, dropped


def _harmonize_document(doc, profile, annotations, lexicon):
    recovered, records = recover_spans(
        [doc],
        profile.span_solution,
        annotations=annotations,
        lexicon=lexicon,
        corpus=profile.name,
    )
    retagged = retag_entities(recovered, profile)[0]
    try:
        pairs, policy_records = apply_negative_policy(retagged, profile)
    except LabelConflictError as exc:
        conflict_records = [
            ReportRecord(
                profile.name,
                retagged.id,
                rel.concept_id1,
                rel.concept_id2,
                label_text(rel.label),
                "conflict",
                str(exc),
            )
            for rel in retagged.relations
        ]
        return None, records + conflict_records
    entry = HarmonizedDocument(profile.name, retagged, tuple(pairs))
    return entry, records + policy_records


def harmonize_corpus(source, profile, *, annotations=None, lexicon=None, threads=1):
    """Adjust one corpus per its profile.

    source is either a list of documents (PubTator-style corpora) or a
    list of repository records; repository input additionally requires an
    annotation corpus carrying document text.  Returns (HarmonizedCorpus,
    report records).  A document with conflicting annotations is dropped
    whole, with every one of its relations reported.
    """
    source = list(source)
    pre_records = []
    if source and isinstance(source[0], RepositoryRecord):
        if not annotations or isinstance(annotations, dict):
            raise ValidationError(
                "repository input requires an annotation corpus with document text"
            )
        docs, pre_records = _documents_from_records(source, annotations, profile)
    else:
        docs = source
    mention_map = _mention_map(annotations)
    entries = []
    records = list(pre_records)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(
                    lambda doc: _harmonize_document(doc, profile, mention_map, lexicon),
                    docs,
                )
            )
    else:
        results = [
            _harmonize_document(doc, profile, mention_map, lexicon) for doc in docs
        ]
    for entry, doc_records in results:
        if entry is not None:
            entries.append(entry)
        records.extend(doc_records)
    return HarmonizedCorpus(profile.name, tuple(entries)), records


def merge_corpora(corpora):
    """Concatenate harmonized corpora; corpus tags must be distinct."""
    entries = []
    tags = []
    seen = set()
    for corpus in corpora:
        corpus_tags = []
        for entry in corpus.entries:
            if entry.corpus not in corpus_tags:
                corpus_tags.append(entry.corpus)
        if not corpus_tags:
            corpus_tags = [corpus.tag]
        for tag in corpus_tags:
            if tag in seen:
                raise ValidationError(f"duplicate corpus tag: {tag}")
            seen.add(tag)
            tags.append(tag)
        entries.extend(corpus.entries)
    return HarmonizedCorpus("+".join(tags), tuple(entries))


def _document_to_json(doc):
    return {
        "id": doc.id,
        "title": doc.title,
        "abstract": doc.abstract,
        "mentions": [
            {
                "start": m.start,
                "end": m.end,
                "text": m.text,
                "type": render_entity_type(m.entity_type),
                "ids": list(m.concept_ids),
            }
            for m in doc.mentions
        ],
        "relations": [
            {
                "id1": rel.concept_id1,
                "type1": None if rel.type1 is None else render_entity_type(rel.type1),
                "id2": rel.concept_id2,
                "type2": None if rel.type2 is None else render_entity_type(rel.type2),
                "label": label_text(rel.label),
            }
            for rel in doc.relations
        ],
    }


def _document_from_json(raw):
    mentions = tuple(
        EntityMention(
            m["start"],
            m["end"],
            m["text"],
            parse_entity_type(m["type"]),
            tuple(m["ids"]),
        )
        for m in raw["mentions"]
    )
    relations = tuple(
        RelationAnnotation(
            r["id1"],
            r["id2"],
            None if r["type1"] is None else parse_entity_type(r["type1"]),
            None if r["type2"] is None else parse_entity_type(r["type2"]),
            r["label"],
        )
        for r in raw["relations"]
    )
    return Document(raw["id"], raw["title"], raw["abstract"], mentions, relations)


def corpus_to_json(corpus):
    """Deterministic JSON serialization of a HarmonizedCorpus."""
    payload = {
        "tag": corpus.tag,
        "entries": [
            {
                "corpus": entry.corpus,
                "document": _document_to_json(entry.document),
                "pairs": [
                    {
                        "id1": pair.concept_id1,
                        "type1": render_entity_type(pair.type1),
                        "id2": pair.concept_id2,
                        "type2": render_entity_type(pair.type2),
                        "label": render_label(pair.label),
                        "level": pair.level,
                        "span": list(pair.span),
                    }
                    for pair in entry.pairs
                ],
            }
            for entry in corpus.entries
        ],
    }
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":")) + "\n"


def corpus_from_json(text):
    """Inverse of corpus_to_json."""
    try:
        raw = json.loads(text)
        entries = tuple(
            HarmonizedDocument(
                entry["corpus"],
                _document_from_json(entry["document"]),
                tuple(
                    LabeledPair(
                        p["id1"],
                        parse_entity_type(p["type1"]),
                        p["id2"],
                        parse_entity_type(p["type2"]),
                        parse_label(p["label"]),
                        p["level"],
                        (p["span"][0], p["span"][1]),
                    )
                    for p in entry["pairs"]
                ),
            )
            for entry in raw["entries"]
        )
        return HarmonizedCorpus(raw["tag"], entries)
    except (json.JSONDecodeError, KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"not a harmonized corpus file: {exc}") from exc


def render_report(records):
    """Drop report as one JSON object per line."""
    lines = []
    for rec in records:
        lines.append(
            json.dumps(
                {
                    "corpus": rec.corpus,
                    "doc_id": rec.doc_id,
                    "id1": rec.concept_id1,
                    "id2": rec.concept_id2,
                    "label": rec.label,
                    "stage": rec.stage,
                    "reason": rec.reason,
                },
                ensure_ascii=False,
                separators=(",", ":"),
            )
        )
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def parse_report(text):
    """Inverse of render_report."""
    records = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            records.append(
                ReportRecord(
                    raw["corpus"],
                    raw["doc_id"],
                    raw["id1"],
                    raw["id2"],
                    raw["label"],
                    raw["stage"],
                    raw["reason"],
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(line_no, f"bad report record: {exc}") from exc
    return records
