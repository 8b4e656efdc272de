"""Turns harmonized corpora into classifiable candidate instances.

A candidate instance is one concept pair inside its delimited context,
with boundary tags wrapped around every mention of either pair member and
a natural-language prompt naming the pair.
"""

from __future__ import annotations

from itertools import combinations

from .model import (
    CandidateInstance,
    ValidationError,
    canonicalize_pair,
)

DEFAULT_CORPUS_TAG = "BioRED"

PROMPT_TEMPLATE = "What is the relation in {corpus_tag} between {name1} and {name2}?"


class TaggingError(RuntimeError):
    """Boundary tags cannot be placed; signals a broken precondition."""


def _pair_sort_key(pair):
    id1, type1, id2, type2 = pair
    return (type1.name, id1, type2.name, id2)


def enumerate_pairs(doc, allowed_pairs):
    """All canonical pairs of distinct concept ids whose kind pair is allowed.

    Composite mentions are expanded: each concept id on a mention counts as
    its own virtual entity.  An id's type is the type of its first mention
    in document order.  Each pair carries every mention of either id.
    """
    first_type = {}
    by_id = {}
    for m in sorted(doc.mentions, key=lambda m: m.sort_key()):
        for cid in m.concept_ids:
            first_type.setdefault(cid, m.entity_type)
            by_id.setdefault(cid, []).append(m)
    pairs = []
    for id_a, id_b in combinations(sorted(first_type), 2):
        type_a, type_b = first_type[id_a], first_type[id_b]
        if type_a.kind is None or type_b.kind is None:
            continue
        if frozenset((type_a.kind, type_b.kind)) not in allowed_pairs:
            continue
        (id1, type1), (id2, type2) = canonicalize_pair(id_a, type_a, id_b, type_b)
        support = sorted(
            dict.fromkeys(by_id[id_a] + by_id[id_b]), key=lambda m: m.sort_key()
        )
        pairs.append(((id1, type1, id2, type2), tuple(support)))
    pairs.sort(key=lambda entry: _pair_sort_key(entry[0]))
    return pairs


def tag_context(context_text, context_offset, mentions, pair_ids):
    """Insert boundary tags around every mention inside the context.

    Mentions are given in document offsets; context_offset translates them.
    Tags nest by span containment; identical spans nest the first pair
    member outermost.  A mention partially overlapping an already placed
    one is skipped, but every pair id must end up tagged at least once.
    """
    n = len(context_text)
    id1, id2 = pair_ids
    items = []
    for m in mentions:
        start = m.start - context_offset
        end = m.end - context_offset
        if start < 0 or end > n:
            raise TaggingError(
                f"mention [{m.start}, {m.end}) lies outside the context span"
            )
        member = 0 if id1 in m.concept_ids else 1
        items.append((start, end, member, m))
    # Sort into nesting order: outermost first at equal starts.
    items.sort(key=lambda it: (it[0], -it[1], it[2], it[3].concept_ids))
    accepted = []
    for start, end, member, m in items:
        crossing = any(
            start < a_end and a_start < end
            and not (a_start <= start and end <= a_end)
            and not (start <= a_start and a_end <= end)
            for a_start, a_end, _, _ in accepted
        )
        if not crossing:
            accepted.append((start, end, member, m))
    for pid in pair_ids:
        if not any(pid in m.concept_ids for _, _, _, m in accepted):
            raise TaggingError(f"no taggable mention for concept {pid}")
    opens = {}
    closes = {}
    for item in accepted:
        opens.setdefault(item[0], []).append(item)
        closes.setdefault(item[1], []).append(item)
    out = []
    last = 0
    for pos in sorted(set(opens) | set(closes)):
        out.append(context_text[last:pos])
        for item in reversed(closes.get(pos, [])):
            out.append(f"</{item[3].entity_type.tag_code}>")
        for item in opens.get(pos, ()):
            out.append(f"<{item[3].entity_type.tag_code}>")
        last = pos
    out.append(context_text[last:])
    return "".join(out)


def strip_boundary_tags(text, codes):
    """Remove boundary tags for the given codes from tagged text.

    Returns (plain text, regions) where regions are (code, start, end)
    triples over the plain text.  Unbalanced or crossing tags are rejected.
    """
    markers = []
    for code in codes:
        markers.append((f"</{code}>", "close", code))
        markers.append((f"<{code}>", "open", code))
    markers.sort(key=lambda m: -len(m[0]))
    out = []
    regions = []
    stack = []
    pos = 0
    i = 0
    while i < len(text):
        hit = None
        for marker, kind, code in markers:
            if text.startswith(marker, i):
                hit = (marker, kind, code)
                break
        if hit is None:
            out.append(text[i])
            pos += 1
            i += 1
            continue
        marker, kind, code = hit
        if kind == "open":
            stack.append((code, pos))
        else:
            if not stack or stack[-1][0] != code:
                raise ValidationError(f"unbalanced boundary tag </{code}>")
            _, start = stack.pop()
            regions.append((code, start, pos))
        i += len(marker)
    if stack:
        raise ValidationError(f"unclosed boundary tag <{stack[-1][0]}>")
    return "".join(out), regions


def build_prompt(corpus_tag, name1, name2):
    """The fixed prompt naming the corpus and the two entities."""
    if not corpus_tag:
        corpus_tag = DEFAULT_CORPUS_TAG
    if not name1 or not name2:
        raise ValidationError("entity display names must be non-empty")
    return PROMPT_TEMPLATE.format(corpus_tag=corpus_tag, name1=name1, name2=name2)


def generate_instances(harmonized, corpus_tag=None):
    """One CandidateInstance per labeled pair of a harmonized corpus.

    corpus_tag overrides the prompt's corpus name; the instance's corpus
    field always records the source corpus.  Output is sorted by
    (corpus, document id, canonical pair).
    """
    out = []
    for entry in harmonized.entries:
        doc = entry.document
        first_mention = {}
        for m in sorted(doc.mentions, key=lambda m: m.sort_key()):
            for cid in m.concept_ids:
                first_mention.setdefault(cid, m)
        for pair in entry.pairs:
            start, end = pair.span
            support = [
                m
                for m in doc.mentions
                if (pair.concept_id1 in m.concept_ids or pair.concept_id2 in m.concept_ids)
                and start <= m.start
                and m.end <= end
            ]
            tagged = tag_context(
                doc.combined_text[start:end],
                start,
                support,
                (pair.concept_id1, pair.concept_id2),
            )
            name1 = first_mention[pair.concept_id1].text
            name2 = first_mention[pair.concept_id2].text
            prompt = build_prompt(corpus_tag or entry.corpus, name1, name2)
            out.append(
                CandidateInstance(
                    doc_id=doc.id,
                    corpus=entry.corpus,
                    concept_id1=pair.concept_id1,
                    type1=pair.type1,
                    concept_id2=pair.concept_id2,
                    type2=pair.type2,
                    prompt=prompt,
                    context=tagged,
                    label=pair.label,
                    level=pair.level,
                )
            )
    out.sort(key=lambda inst: (inst.corpus, inst.doc_id, inst.pair_key()))
    return out
