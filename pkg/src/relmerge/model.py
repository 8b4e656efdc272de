"""Shared domain types for the corpus harmonization pipeline.

Everything downstream (parsers, harmonization passes, instance generation,
scoring) speaks in terms of these types.  All of them are frozen: transforms
build new values instead of mutating.
"""

from __future__ import annotations

from dataclasses import dataclass, field

CANONICAL_KINDS = ("Gene", "Chemical", "Disease")

CANONICAL_RELATION_TYPES = (
    "PositiveCorrelation",
    "NegativeCorrelation",
    "Association",
    "Bind",
    "DrugInteraction",
    "Cotreatment",
    "Comparison",
    "Conversion",
)

NONE_LABEL_NAME = "None"

# Source type names folded into Gene when corpora are read: variants are
# treated as the gene they occur in.
VARIANT_TYPE_NAMES = ("Variant", "Mutation")

_KIND_TAG_CODES = {"Gene": "G", "Chemical": "C", "Disease": "D"}

# Characters banned from corpus-internal type names: whitespace breaks the
# tab-separated file columns, angle brackets break boundary tags, and the
# colon is reserved for the "name:base" serialized form.
_BANNED_IN_NAME = set("<>:|")


class ValidationError(ValueError):
    """A domain invariant was violated."""


def _check_token(value, what):
    """Reject empty strings and strings with whitespace or banned chars."""
    if not value:
        raise ValidationError(f"{what} must be non-empty")
    if any(ch.isspace() for ch in value):
        raise ValidationError(f"{what} must not contain whitespace: {value!r}")
    if _BANNED_IN_NAME & set(value):
        raise ValidationError(
            f"{what} must not contain any of '<>:|': {value!r}"
        )


@dataclass(frozen=True)
class EntityType:
    """An entity type: one of the canonical kinds or a corpus-internal kind.

    Internal kinds rename a canonical kind inside a single corpus.  Their
    ``base`` records which canonical kind they stand for; internal kinds read
    straight from a source file have no declared base until a profile retags
    them, and such types never satisfy a pair-kind filter.
    """

    name: str
    base: str | None = None

    def __post_init__(self):
        if self.name in CANONICAL_KINDS:
            if self.base is not None:
                raise ValidationError(
                    f"canonical kind {self.name} must not declare a base"
                )
            return
        _check_token(self.name, "entity type name")
        if self.base is not None and self.base not in CANONICAL_KINDS:
            raise ValidationError(
                f"base of internal type {self.name} must be canonical,"
                f" got {self.base!r}"
            )

    @property
    def is_canonical(self):
        return self.name in CANONICAL_KINDS

    @property
    def kind(self):
        """Canonical kind used for pair filtering; None when undeclared."""
        if self.is_canonical:
            return self.name
        return self.base

    @property
    def tag_code(self):
        """Boundary tag name: G/C/D for canonical kinds, else the own name."""
        return _KIND_TAG_CODES.get(self.name, self.name)


GENE = EntityType("Gene")
CHEMICAL = EntityType("Chemical")
DISEASE = EntityType("Disease")


def entity_type_from_source(raw):
    """Entity type for a raw source type tag.

    Canonical names map to themselves, variant/mutation names fold into
    Gene, a trailing ":Kind" declares a canonical base, and anything else
    becomes an internal kind with no declared base.
    """
    if raw in CANONICAL_KINDS:
        return EntityType(raw)
    if raw in VARIANT_TYPE_NAMES:
        return GENE
    return parse_entity_type(raw)


def render_entity_type(etype):
    """Serialized form: the plain name, or "name:base" for declared bases."""
    if etype.base is None:
        return etype.name
    return f"{etype.name}:{etype.base}"


def parse_entity_type(text):
    """Inverse of render_entity_type."""
    if ":" in text:
        name, base = text.rsplit(":", 1)
        if base in CANONICAL_KINDS and name:
            return EntityType(name, base)
    return EntityType(text)


@dataclass(frozen=True)
class RelationLabel:
    """A relation label: one of the canonical types, None, or a
    corpus-internal negative ("None" scoped to one corpus)."""

    name: str
    corpus: str | None = None

    def __post_init__(self):
        if self.name != NONE_LABEL_NAME and self.name not in CANONICAL_RELATION_TYPES:
            raise ValidationError(f"unknown relation label name: {self.name!r}")
        if self.corpus is not None:
            if self.name != NONE_LABEL_NAME:
                raise ValidationError(
                    "only None labels may be scoped to a corpus"
                )
            if not self.corpus or any(ch.isspace() for ch in self.corpus):
                raise ValidationError(
                    f"corpus scope must be a non-empty token: {self.corpus!r}"
                )

    @classmethod
    def none(cls):
        return cls(NONE_LABEL_NAME)

    @classmethod
    def internal_none(cls, corpus):
        return cls(NONE_LABEL_NAME, corpus)

    @property
    def is_none(self):
        """True for both the shared None and corpus-internal negatives."""
        return self.name == NONE_LABEL_NAME


ASSOCIATION = RelationLabel("Association")
POSITIVE_CORRELATION = RelationLabel("PositiveCorrelation")
NEGATIVE_CORRELATION = RelationLabel("NegativeCorrelation")
NONE_LABEL = RelationLabel.none()


def render_label(label):
    if label.corpus is not None:
        return f"{NONE_LABEL_NAME}-{label.corpus}"
    return label.name


def parse_label(text):
    """Inverse of render_label; rejects anything else."""
    if text in CANONICAL_RELATION_TYPES or text == NONE_LABEL_NAME:
        return RelationLabel(text)
    prefix = NONE_LABEL_NAME + "-"
    if text.startswith(prefix) and len(text) > len(prefix):
        return RelationLabel.internal_none(text[len(prefix):])
    raise ValidationError(f"unknown relation label: {text!r}")


def label_text(label):
    """Display text for either a mapped label or raw source label text."""
    if isinstance(label, RelationLabel):
        return render_label(label)
    return label


def _check_concept_id(cid):
    if not cid:
        raise ValidationError("concept id must be non-empty")
    if any(ch.isspace() for ch in cid) or "," in cid:
        raise ValidationError(
            f"concept id must not contain whitespace or commas: {cid!r}"
        )


@dataclass(frozen=True)
class EntityMention:
    """One annotated span.  Offsets index the document's combined text and
    are 0-based half-open.  A mention with several concept ids is a
    composite (e.g. one span naming two diseases)."""

    start: int
    end: int
    text: str
    entity_type: EntityType
    concept_ids: tuple[str, ...]

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise ValidationError(
                f"bad mention offsets [{self.start}, {self.end})"
            )
        if len(self.text) != self.end - self.start:
            raise ValidationError(
                f"mention text length {len(self.text)} does not match span"
                f" [{self.start}, {self.end})"
            )
        if not self.concept_ids:
            raise ValidationError("mention must carry at least one concept id")
        if len(set(self.concept_ids)) != len(self.concept_ids):
            raise ValidationError(
                f"duplicate concept ids in mention: {self.concept_ids}"
            )
        for cid in self.concept_ids:
            _check_concept_id(cid)

    def sort_key(self):
        return (self.start, self.end, self.concept_ids, self.entity_type.name)


def canonicalize_pair(id_a, type_a, id_b, type_b):
    """Stable unordered-pair normal form.

    Members are ordered by (type display name, concept id); a missing type
    sorts as the empty name.  Equal ids are rejected: a pair relates two
    distinct concepts.
    """
    if id_a == id_b:
        raise ValidationError(f"pair must relate two distinct concepts: {id_a}")
    key_a = ("" if type_a is None else type_a.name, id_a)
    key_b = ("" if type_b is None else type_b.name, id_b)
    if key_a <= key_b:
        return (id_a, type_a), (id_b, type_b)
    return (id_b, type_b), (id_a, type_a)


@dataclass(frozen=True)
class RelationAnnotation:
    """A labeled concept pair as asserted by a source corpus.

    The label is raw source text until harmonization maps it; entity types
    are resolved from mentions and stay None when a concept id has no
    mention.  Members are stored in canonical pair order.
    """

    concept_id1: str
    concept_id2: str
    type1: EntityType | None
    type2: EntityType | None
    label: object

    def __post_init__(self):
        _check_concept_id(self.concept_id1)
        _check_concept_id(self.concept_id2)
        (i1, t1), (i2, t2) = canonicalize_pair(
            self.concept_id1, self.type1, self.concept_id2, self.type2
        )
        object.__setattr__(self, "concept_id1", i1)
        object.__setattr__(self, "type1", t1)
        object.__setattr__(self, "concept_id2", i2)
        object.__setattr__(self, "type2", t2)
        if isinstance(self.label, str):
            if not self.label.strip():
                raise ValidationError("relation label text must be non-empty")
        elif not isinstance(self.label, RelationLabel):
            raise ValidationError(
                f"label must be text or a RelationLabel: {self.label!r}"
            )


@dataclass(frozen=True)
class Document:
    """A title-plus-abstract record with mentions and relations.

    Offsets index the combined text, which is the title, one space, then
    the abstract.  Every mention's text must equal its combined-text slice;
    this is revalidated each time a transform builds a new Document.
    """

    id: str
    title: str
    abstract: str
    mentions: tuple[EntityMention, ...] = ()
    relations: tuple[RelationAnnotation, ...] = ()

    def __post_init__(self):
        if not self.id or any(ch.isspace() for ch in self.id):
            raise ValidationError(f"document id must be a non-empty token: {self.id!r}")
        if "|" in self.id or self.id.startswith("#"):
            raise ValidationError(f"document id must not contain '|' or start with '#': {self.id!r}")
        for part, what in ((self.title, "title"), (self.abstract, "abstract")):
            if "\n" in part or "\t" in part:
                raise ValidationError(f"{what} must not contain newlines or tabs")
        combined = self.combined_text
        for m in self.mentions:
            if m.end > len(combined):
                raise ValidationError(
                    f"document {self.id}: mention [{m.start}, {m.end})"
                    f" exceeds text length {len(combined)}"
                )
            if combined[m.start:m.end] != m.text:
                raise ValidationError(
                    f"document {self.id}: mention text {m.text!r} does not"
                    f" match span [{m.start}, {m.end})"
                )

    @property
    def combined_text(self):
        return f"{self.title} {self.abstract}"


@dataclass(frozen=True)
class CorpusProfile:
    """Per-corpus harmonization settings along the five adjustment axes.

    span_solution: a1 spans as annotated, a2 recover anywhere in the
    document, a3 recover and require same-sentence co-occurrence.
    level: b1 whole-document context, b2 co-occurring sentence.
    negative_policy: c1 corpus-internal negatives, c2 shared None
    negatives, c3 no negatives.
    granularity: d1 map source labels through label_map, d2 collapse all
    to Association.
    entity_policy: e1 retag through entity_type_map introducing internal
    kinds, e2 canonical kinds only.
    """

    name: str
    span_solution: str
    level: str
    negative_policy: str
    granularity: str
    entity_policy: str
    label_map: dict = field(default_factory=dict)
    entity_type_map: dict = field(default_factory=dict)
    allowed_pairs: frozenset = frozenset()

    def __post_init__(self):
        _check_token(self.name, "corpus name")
        axes = (
            ("span_solution", self.span_solution, ("a1", "a2", "a3")),
            ("level", self.level, ("b1", "b2")),
            ("negative_policy", self.negative_policy, ("c1", "c2", "c3")),
            ("granularity", self.granularity, ("d1", "d2")),
            ("entity_policy", self.entity_policy, ("e1", "e2")),
        )
        for axis, value, allowed in axes:
            if value not in allowed:
                raise ValidationError(
                    f"{axis}: unknown code {value!r}, expected one of {allowed}"
                )
        if self.granularity == "d2" and self.label_map:
            raise ValidationError(
                "granularity: d2 collapses every label, label_map must be empty"
            )
        if self.granularity == "d1" and not self.label_map:
            raise ValidationError(
                "granularity: d1 requires a non-empty label_map"
            )
        for source, target in self.label_map.items():
            if not isinstance(source, str) or not source.strip():
                raise ValidationError("label_map: source labels must be non-empty text")
            if not isinstance(target, RelationLabel):
                raise ValidationError(
                    f"label_map: target for {source!r} must be a relation label"
                )
        internal_targets = 0
        for source, target in self.entity_type_map.items():
            if not isinstance(source, str) or not source.strip():
                raise ValidationError("entity_type_map: source names must be non-empty text")
            if not isinstance(target, EntityType):
                raise ValidationError(
                    f"entity_type_map: target for {source!r} must be an entity type"
                )
            if not target.is_canonical:
                if target.base is None:
                    raise ValidationError(
                        f"entity_type_map: internal target {target.name!r}"
                        " must declare its canonical base"
                    )
                internal_targets += 1
        if self.entity_policy == "e1" and internal_targets == 0:
            raise ValidationError(
                "entity_policy: e1 requires at least one corpus-internal"
                " target in entity_type_map"
            )
        if self.entity_policy == "e2" and internal_targets:
            raise ValidationError(
                "entity_policy: e2 allows only canonical targets in"
                " entity_type_map"
            )
        if not self.allowed_pairs:
            raise ValidationError("allowed_pairs must not be empty")
        for pair in self.allowed_pairs:
            if not isinstance(pair, frozenset) or not 1 <= len(pair) <= 2:
                raise ValidationError(
                    f"allowed_pairs: each entry must hold one or two kinds: {pair!r}"
                )
            for kind in pair:
                if kind not in CANONICAL_KINDS:
                    raise ValidationError(
                        f"allowed_pairs: unknown canonical kind {kind!r}"
                    )


@dataclass(frozen=True)
class CandidateInstance:
    """One classifier example: a concept pair in its delimited context."""

    doc_id: str
    corpus: str
    concept_id1: str
    type1: EntityType
    concept_id2: str
    type2: EntityType
    prompt: str
    context: str
    label: RelationLabel
    level: str

    def __post_init__(self):
        if self.level not in ("document", "sentence"):
            raise ValidationError(f"unknown context level: {self.level!r}")
        ordered = canonicalize_pair(
            self.concept_id1, self.type1, self.concept_id2, self.type2
        )
        if ordered != ((self.concept_id1, self.type1), (self.concept_id2, self.type2)):
            raise ValidationError(
                f"instance pair not in canonical order:"
                f" ({self.concept_id1}, {self.concept_id2})"
            )
        if not isinstance(self.label, RelationLabel):
            raise ValidationError("instance label must be a relation label")
        if not self.prompt or not self.context:
            raise ValidationError("instance prompt and context must be non-empty")

    def pair_key(self):
        return (
            self.concept_id1,
            self.type1.name,
            self.concept_id2,
            self.type2.name,
        )
