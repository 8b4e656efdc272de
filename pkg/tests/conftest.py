"""Shared builders and random generators for the test suite."""

import random
import re

from relmerge.model import (
    CHEMICAL,
    DISEASE,
    GENE,
    Document,
    EntityMention,
    EntityType,
    RelationAnnotation,
)

WORDS = (
    "aspirin",
    "fever",
    "induces",
    "binds",
    "p53",
    "BRCA1",
    "COX-2",
    "tumor",
    "growth",
    "naive",
    "alpha-synuclein",
    "mice",
    "treated",
    "with",
    "reduced",
    "levels",
    "of",
    "dopamine",
    "receptor",
    "signaling",
)

TYPE_POOL = (
    GENE,
    CHEMICAL,
    DISEASE,
    EntityType("Foo-Type"),
    EntityType("DrugProt-Chem", "Chemical"),
)

ID_POOL = (
    "N1",
    "N2",
    "C7",
    "D03",
    "MESH:D001943",
    "MESH:D010051",
    "Q9",
    "X44",
)

LABEL_POOL = ("Association", "CID", "INHIBITOR", "binds_to", "REL-2")


def find_occurrence(text, surface, occurrence=0):
    """Offsets of the nth occurrence of surface in text."""
    start = -1
    for _ in range(occurrence + 1):
        start = text.index(surface, start + 1)
    return start, start + len(surface)


def mention_at(combined, surface, etype, concept_ids, occurrence=0):
    start, end = find_occurrence(combined, surface, occurrence)
    return EntityMention(start, end, surface, etype, tuple(concept_ids))


def resolve_type(mentions, concept_id):
    """First-mention type resolution, mirroring the parser's rule."""
    for m in mentions:
        if concept_id in m.concept_ids:
            return m.entity_type
    return None


def make_document(doc_id, title, abstract, mention_specs=(), relation_specs=()):
    """Document builder computing offsets from surface forms.

    mention_specs: (surface, EntityType, concept_ids[, occurrence]);
    relation_specs: (label text, id1, id2).
    """
    combined = f"{title} {abstract}"
    mentions = sorted(
        (mention_at(combined, *spec) for spec in mention_specs),
        key=lambda m: m.sort_key(),
    )
    relations = tuple(
        RelationAnnotation(
            id1,
            id2,
            resolve_type(mentions, id1),
            resolve_type(mentions, id2),
            label,
        )
        for label, id1, id2 in relation_specs
    )
    return Document(doc_id, title, abstract, tuple(mentions), relations)


def random_document(rng, doc_id, composite_rate=0.25, ghost_rate=0.15):
    """A random but valid document with mentions and relations."""

    def sentence():
        return " ".join(rng.choice(WORDS) for _ in range(rng.randint(2, 6))) + "."

    title = sentence()
    abstract = " ".join(sentence() for _ in range(rng.randint(1, 3)))
    combined = f"{title} {abstract}"
    token_spans = [m.span() for m in re.finditer(r"[^\s.]+", combined)]
    mentions = []
    used_ids = []
    for _ in range(rng.randint(0, 6)):
        start, end = rng.choice(token_spans)
        if rng.random() < composite_rate:
            concept_ids = tuple(rng.sample(ID_POOL, rng.randint(2, 3)))
        else:
            concept_ids = (rng.choice(ID_POOL),)
        mentions.append(
            EntityMention(
                start, end, combined[start:end], rng.choice(TYPE_POOL), concept_ids
            )
        )
        used_ids.extend(concept_ids)
    mentions.sort(key=lambda m: m.sort_key())
    relations = []
    seen_pairs = set()
    id_pool = list(dict.fromkeys(used_ids)) or ["N1", "N2"]
    if rng.random() < ghost_rate:
        id_pool.append("GHOST9")
    for _ in range(rng.randint(0, 3)):
        if len(id_pool) < 2:
            break
        id1, id2 = rng.sample(id_pool, 2)
        if frozenset((id1, id2)) in seen_pairs:
            continue
        seen_pairs.add(frozenset((id1, id2)))
        relations.append(
            RelationAnnotation(
                id1,
                id2,
                resolve_type(mentions, id1),
                resolve_type(mentions, id2),
                rng.choice(LABEL_POOL),
            )
        )
    return Document(doc_id, title, abstract, tuple(mentions), tuple(relations))


def random_corpus(rng, max_docs=5):
    return [
        random_document(rng, f"{rng.randint(1000, 9999)}{index}")
        for index in range(rng.randint(0, max_docs))
    ]
