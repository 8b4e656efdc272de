"""Parsers and writers for the on-disk formats.

Four formats live here: PubTator-style corpora, repository triple lists,
profile files, and the line-delimited instance stream.  Parsers are strict
(every error carries a line number) and writers produce canonical,
byte-stable serializations so round-trips are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .model import (
    ASSOCIATION,
    CANONICAL_KINDS,
    CorpusProfile,
    CandidateInstance,
    Document,
    EntityMention,
    EntityType,
    RelationAnnotation,
    ValidationError,
    entity_type_from_source,
    label_text,
    parse_label,
    render_entity_type,
    render_label,
)


class ParseError(ValueError):
    """Malformed input; carries the 1-based line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class RepositoryRecord:
    """A span-less relation triple from a curated repository export."""

    doc_id: str
    concept_id1: str
    concept_id2: str
    type1: EntityType
    type2: EntityType
    label: object

    def __post_init__(self):
        if not self.doc_id:
            raise ValidationError("repository record needs a document id")
        if not self.concept_id1 or not self.concept_id2:
            raise ValidationError("repository record needs two concept ids")


def _resolve_relation_types(mentions, concept_id):
    for m in mentions:
        if concept_id in m.concept_ids:
            return m.entity_type
    return None


def _finish_document(doc_id, title, abstract, mentions, pending, seen_ids, line_no):
    """Assemble one block into a Document; pending holds raw relation rows."""
    if abstract is None:
        raise ParseError(line_no, f"document {doc_id}: missing abstract line")
    mentions = sorted(mentions, key=lambda m: m.sort_key())
    relations = []
    for rel_line_no, label, id1, id2 in pending:
        try:
            relations.append(
                RelationAnnotation(
                    id1,
                    id2,
                    _resolve_relation_types(mentions, id1),
                    _resolve_relation_types(mentions, id2),
                    label,
                )
            )
        except ValidationError as exc:
            raise ParseError(rel_line_no, str(exc)) from exc
    try:
        doc = Document(doc_id, title, abstract, tuple(mentions), tuple(relations))
    except ValidationError as exc:
        raise ParseError(line_no, str(exc)) from exc
    if doc.id in seen_ids:
        raise ParseError(line_no, f"duplicate document id: {doc.id}")
    seen_ids.add(doc.id)
    return doc


def parse_pubtator(text):
    """Parse a PubTator-style corpus into documents.

    Blocks are blank-line separated: a `ID|t|TITLE` line, a `ID|a|ABSTRACT`
    line, then annotation lines (6 tab-separated fields) and relation lines
    (4 fields, or 5 with a trailing novelty marker that is discarded).
    Offsets index title + single space + abstract.  Lines starting with
    `#` are comments.
    """
    docs = []
    seen_ids = set()
    doc_id = title = abstract = None
    combined = None
    mentions = []
    pending = []
    block_line = 0

    def flush(line_no):
        nonlocal doc_id, title, abstract, combined, mentions, pending
        if doc_id is None:
            return
        docs.append(
            _finish_document(
                doc_id, title, abstract, mentions, pending, seen_ids, line_no
            )
        )
        doc_id = title = abstract = combined = None
        mentions = []
        pending = []

    line_no = 0
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            flush(block_line)
            continue
        if line.startswith("#"):
            continue
        if doc_id is None:
            parts = line.split("|", 2)
            if len(parts) != 3 or parts[1] != "t":
                raise ParseError(line_no, f"expected a title line, got {line!r}")
            doc_id, _, title = parts
            block_line = line_no
            continue
        if abstract is None:
            parts = line.split("|", 2)
            if len(parts) != 3 or parts[1] != "a" or parts[0] != doc_id:
                raise ParseError(
                    line_no, f"expected abstract line for document {doc_id}"
                )
            abstract = parts[2]
            combined = f"{title} {abstract}"
            continue
        fields = line.split("\t")
        if len(fields) not in (4, 5, 6):
            raise ParseError(
                line_no,
                f"expected 6 annotation or 4 relation fields, got {len(fields)}",
            )
        if fields[0] != doc_id:
            raise ParseError(
                line_no,
                f"line belongs to document {fields[0]!r}, expected {doc_id!r}",
            )
        if len(fields) == 6:
            _, start_text, end_text, surface, type_text, ids_text = fields
            try:
                start, end = int(start_text), int(end_text)
            except ValueError as exc:
                raise ParseError(line_no, f"bad offsets: {start_text!r}, {end_text!r}") from exc
            if end > len(combined):
                raise ParseError(
                    line_no,
                    f"offset {end} outside combined text of length {len(combined)}",
                )
            concept_ids = tuple(ids_text.split(","))
            try:
                mention = EntityMention(
                    start, end, surface, entity_type_from_source(type_text), concept_ids
                )
            except ValidationError as exc:
                raise ParseError(line_no, str(exc)) from exc
            if combined[start:end] != surface:
                raise ParseError(
                    line_no,
                    f"mention text {surface!r} does not match slice"
                    f" {combined[start:end]!r}",
                )
            mentions.append(mention)
        else:
            _, label, id1, id2 = fields[:4]
            if not label.strip():
                raise ParseError(line_no, "relation label must be non-empty")
            pending.append((line_no, label, id1, id2))
    flush(line_no + 1)
    return docs


def write_pubtator(docs):
    """Serialize documents to the PubTator-style format.

    Annotations are written sorted by (start, end, conceptIds); relations
    keep input order.  A relation whose concept id has no mention gets a
    marker comment line before it rather than being dropped.
    """
    lines = []
    for doc in docs:
        lines.append(f"{doc.id}|t|{doc.title}")
        lines.append(f"{doc.id}|a|{doc.abstract}")
        mention_ids = set()
        for m in sorted(doc.mentions, key=lambda m: m.sort_key()):
            mention_ids.update(m.concept_ids)
            lines.append(
                "\t".join(
                    (
                        doc.id,
                        str(m.start),
                        str(m.end),
                        m.text,
                        render_entity_type(m.entity_type),
                        ",".join(m.concept_ids),
                    )
                )
            )
        for rel in doc.relations:
            text = label_text(rel.label)
            if "\t" in text or "\n" in text:
                raise ValidationError(f"relation label not writable: {text!r}")
            missing = [
                cid
                for cid in (rel.concept_id1, rel.concept_id2)
                if cid not in mention_ids
            ]
            if missing:
                lines.append(
                    f"# unresolved relation: no mention for {','.join(missing)}"
                )
            lines.append(
                "\t".join((doc.id, text, rel.concept_id1, rel.concept_id2))
            )
        lines.append("")
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def parse_repository(text, pair_types):
    """Parse a repository triple list.

    Lines are `DOCID<TAB>ID1<TAB>ID2[<TAB>LABEL]`; the label defaults to
    Association.  pair_types gives the entity types of the two id columns.
    `#` comments and blank lines are skipped.
    """
    type1, type2 = pair_types
    records = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) == 3:
            doc_id, id1, id2 = fields
            label = ASSOCIATION
        elif len(fields) == 4:
            doc_id, id1, id2, label = fields
            if not label.strip():
                raise ParseError(line_no, "relation label must be non-empty")
        else:
            raise ParseError(
                line_no, f"expected 3 or 4 tab-separated fields, got {len(fields)}"
            )
        if id1 == id2:
            raise ParseError(line_no, f"record relates {id1!r} to itself")
        try:
            records.append(RepositoryRecord(doc_id, id1, id2, type1, type2, label))
        except ValidationError as exc:
            raise ParseError(line_no, str(exc)) from exc
    return records


_PROFILE_KEYS = (
    "name",
    "span_solution",
    "level",
    "negative_policy",
    "granularity",
    "entity_policy",
    "label_map",
    "entity_type_map",
    "allowed_pairs",
)


def _profile_entity_type(value, source):
    if isinstance(value, str):
        if value not in CANONICAL_KINDS:
            raise ValidationError(
                f"entity_type_map: target for {source!r} must be a canonical"
                f" kind or an object with name and base, got {value!r}"
            )
        return EntityType(value)
    if isinstance(value, dict) and set(value) == {"name", "base"}:
        return EntityType(value["name"], value["base"])
    raise ValidationError(
        f"entity_type_map: bad target for {source!r}: {value!r}"
    )


def parse_profile(text):
    """Parse and validate a JSON profile file into a CorpusProfile."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"profile is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError("profile must be a JSON object")
    missing = [key for key in _PROFILE_KEYS if key not in raw]
    if missing:
        raise ValidationError(f"profile missing keys: {', '.join(missing)}")
    unknown = [key for key in raw if key not in _PROFILE_KEYS]
    if unknown:
        raise ValidationError(f"profile has unknown keys: {', '.join(unknown)}")
    for key in ("label_map", "entity_type_map"):
        if not isinstance(raw[key], dict):
            raise ValidationError(f"{key} must be a JSON object")
    label_map = {
        source: parse_label(target) for source, target in raw["label_map"].items()
    }
    entity_type_map = {
        source: _profile_entity_type(target, source)
        for source, target in raw["entity_type_map"].items()
    }
    if not isinstance(raw["allowed_pairs"], list):
        raise ValidationError("allowed_pairs must be a JSON array")
    pairs = set()
    for entry in raw["allowed_pairs"]:
        if not isinstance(entry, list) or len(entry) != 2:
            raise ValidationError(
                f"allowed_pairs: each entry must be a two-item array: {entry!r}"
            )
        pairs.add(frozenset(entry))
    return CorpusProfile(
        name=raw["name"],
        span_solution=raw["span_solution"],
        level=raw["level"],
        negative_policy=raw["negative_policy"],
        granularity=raw["granularity"],
        entity_policy=raw["entity_policy"],
        label_map=label_map,
        entity_type_map=entity_type_map,
        allowed_pairs=frozenset(pairs),
    )


def builtin_profile_names():
    """Names of the profile files shipped with the package."""
    root = resources.files("relmerge.resources").joinpath("profiles")
    return sorted(
        entry.name[: -len(".json")]
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def load_builtin_profile(name):
    """Load a shipped profile by file stem (case-insensitive)."""
    stem = name.lower()
    if stem not in builtin_profile_names():
        raise ValidationError(
            f"unknown built-in profile {name!r};"
            f" available: {', '.join(builtin_profile_names())}"
        )
    text = (
        resources.files("relmerge.resources")
        .joinpath("profiles")
        .joinpath(f"{stem}.json")
        .read_text("utf-8")
    )
    return parse_profile(text)


_INSTANCE_KEYS = (
    "doc_id",
    "corpus",
    "id1",
    "type1",
    "id2",
    "type2",
    "prompt",
    "context",
    "label",
    "level",
)


def _type_to_json(etype):
    if etype.is_canonical:
        return etype.name
    return {"name": etype.name, "base": etype.base}


def _type_from_json(value, line_no):
    if isinstance(value, str):
        if value not in CANONICAL_KINDS:
            raise ParseError(line_no, f"unknown canonical kind: {value!r}")
        return EntityType(value)
    if isinstance(value, dict) and set(value) == {"name", "base"}:
        try:
            return EntityType(value["name"], value["base"])
        except (ValidationError, TypeError) as exc:
            raise ParseError(line_no, str(exc)) from exc
    raise ParseError(line_no, f"bad entity type value: {value!r}")


def write_instances(instances):
    """Serialize instances to one JSON object per line, fixed key order."""
    lines = []
    for inst in instances:
        record = {
            "doc_id": inst.doc_id,
            "corpus": inst.corpus,
            "id1": inst.concept_id1,
            "type1": _type_to_json(inst.type1),
            "id2": inst.concept_id2,
            "type2": _type_to_json(inst.type2),
            "prompt": inst.prompt,
            "context": inst.context,
            "label": render_label(inst.label),
            "level": inst.level,
        }
        lines.append(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def parse_instances(text):
    """Inverse of write_instances."""
    instances = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(line_no, f"invalid record: {exc}") from exc
        if not isinstance(record, dict):
            raise ParseError(line_no, "record must be a JSON object")
        missing = [key for key in _INSTANCE_KEYS if key not in record]
        if missing:
            raise ParseError(line_no, f"record missing keys: {', '.join(missing)}")
        unknown = [key for key in record if key not in _INSTANCE_KEYS]
        if unknown:
            raise ParseError(line_no, f"record has unknown keys: {', '.join(unknown)}")
        try:
            instances.append(
                CandidateInstance(
                    doc_id=record["doc_id"],
                    corpus=record["corpus"],
                    concept_id1=record["id1"],
                    type1=_type_from_json(record["type1"], line_no),
                    concept_id2=record["id2"],
                    type2=_type_from_json(record["type2"], line_no),
                    prompt=record["prompt"],
                    context=record["context"],
                    label=parse_label(record["label"]),
                    level=record["level"],
                )
            )
        except (ValidationError, TypeError) as exc:
            raise ParseError(line_no, str(exc)) from exc
    return instances
