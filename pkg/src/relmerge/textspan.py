"""Sentence segmentation, dictionary-based span recovery, and co-occurrence
search over documents.

Segmentation is rule-based and deterministic: a sentence ends at '.', '!'
or '?' followed by whitespace and an uppercase letter or digit, except when
the text before a period is a known abbreviation or a single uppercase
initial.  The document title is always one sentence of its own.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources

from .formats import ParseError
from .model import EntityMention, ValidationError, entity_type_from_source

_TERMINALS = ".!?"

_ABBREVIATIONS = None


def _abbreviations():
    global _ABBREVIATIONS
    if _ABBREVIATIONS is None:
        data = (
            resources.files("relmerge.resources")
            .joinpath("abbreviations.txt")
            .read_text("utf-8")
        )
        _ABBREVIATIONS = tuple(
            sorted(
                {
                    line.strip().lower()
                    for line in data.splitlines()
                    if line.strip() and not line.startswith("#")
                }
            )
        )
    return _ABBREVIATIONS


@dataclass(frozen=True)
class SentenceSpan:
    """One sentence as offsets over combined document text."""

    start: int
    end: int
    index: int


def _is_boundary(text, i):
    """True when the terminal at position i ends a sentence."""
    ch = text[i]
    if ch not in _TERMINALS:
        return False
    j = i + 1
    if j >= len(text) or not text[j].isspace():
        return False
    while j < len(text) and text[j].isspace():
        j += 1
    if j >= len(text):
        return False
    follower = text[j]
    if not (follower.isupper() or follower.isdigit()):
        return False
    if ch == ".":
        # Single uppercase initials ("J. Smith") never end a sentence.
        k = i
        while k > 0 and text[k - 1].isalnum():
            k -= 1
        token = text[k:i]
        if len(token) == 1 and token.isalpha() and token.isupper():
            return False
        lowered = text[:i].lower()
        for abbr in _abbreviations():
            if lowered.endswith(abbr):
                b = i - len(abbr)
                if b == 0 or not text[b - 1].isalnum():
                    return False
    return True


def _trimmed(text, start, end):
    """Shrink [start, end) to its non-whitespace core; empty -> no span."""
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if start == end:
        return []
    return [(start, end)]


def segment_sentences(text, title_end=None):
    """Split text into sentence spans.

    When title_end is given, [0, title_end) is emitted as one sentence and
    rule-based segmentation starts after it.
    """
    pieces = []
    region_start = 0
    if title_end:
        pieces.extend(_trimmed(text, 0, title_end))
        region_start = title_end
    prev = region_start
    for i in range(region_start, len(text)):
        if _is_boundary(text, i):
            pieces.extend(_trimmed(text, prev, i + 1))
            prev = i + 1
    pieces.extend(_trimmed(text, prev, len(text)))
    return [SentenceSpan(start, end, index) for index, (start, end) in enumerate(pieces)]


def segment_document(doc):
    """Sentence spans of a document's combined text, title kept whole."""
    return segment_sentences(doc.combined_text, title_end=len(doc.title))


class Lexicon:
    """Case-insensitive surface-form dictionary used for span recovery.

    entries maps surface text to (EntityType, concept id sequence).
    Surfaces are trimmed; duplicates after case-folding are rejected.
    """

    def __init__(self, entries):
        prepared = {}
        for surface, (etype, concept_ids) in entries.items():
            key = surface.strip().lower()
            if not key:
                raise ValidationError("lexicon surface form is empty")
            if key in prepared:
                raise ValidationError(f"duplicate lexicon surface: {key!r}")
            prepared[key] = (etype, tuple(concept_ids))
        self._size = len(prepared)
        self._by_first = {}
        # Longest surface first realizes longest-match-wins in one pass.
        for key in sorted(prepared, key=lambda s: (-len(s), s)):
            etype, concept_ids = prepared[key]
            self._by_first.setdefault(key[0], []).append((key, etype, concept_ids))

    def __len__(self):
        return self._size

    def candidates(self, first_char):
        return self._by_first.get(first_char, ())


def load_lexicon(text):
    """Parse a lexicon file: SURFACE<TAB>TYPE<TAB>CONCEPTIDS per line,
    concept ids comma-joined, `#` comments."""
    entries = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(
                line_no, f"expected 3 tab-separated fields, got {len(fields)}"
            )
        surface, type_text, ids_text = fields
        key = surface.strip().lower()
        if key in entries:
            raise ParseError(line_no, f"duplicate lexicon surface: {key!r}")
        try:
            entries[key] = (
                entity_type_from_source(type_text),
                tuple(ids_text.split(",")),
            )
        except ValidationError as exc:
            raise ParseError(line_no, str(exc)) from exc
    try:
        return Lexicon(entries)
    except ValidationError as exc:
        raise ParseError(0, str(exc)) from exc


def dictionary_match(text, lexicon):
    """Greedy left-to-right, longest-match-wins dictionary matching.

    Matches only at token boundaries: the characters adjacent to a match
    are non-alphanumeric or string edges.  Matches never overlap.
    """
    mentions = []
    n = len(text)
    i = 0
    while i < n:
        matched = False
        if i == 0 or not text[i - 1].isalnum():
            for surface, etype, concept_ids in lexicon.candidates(text[i].lower()):
                end = i + len(surface)
                if (
                    end <= n
                    and text[i:end].lower() == surface
                    and (end == n or not text[end].isalnum())
                ):
                    mentions.append(
                        EntityMention(i, end, text[i:end], etype, concept_ids)
                    )
                    i = end
                    matched = True
                    break
        if not matched:
            i += 1
    return mentions


def attach_annotations(doc, auto):
    """Merge automatically recovered mentions into a document.

    Returns (new document, warnings).  Mentions are de-duplicated on
    (start, end, conceptIds) with existing mentions winning; an auto
    mention that does not match the document text yields a warning tuple
    (mention, reason) instead of aborting.
    """
    combined = doc.combined_text
    kept = list(doc.mentions)
    seen = {(m.start, m.end, m.concept_ids) for m in kept}
    warnings = []
    for m in auto:
        if m.end > len(combined) or combined[m.start : m.end] != m.text:
            warnings.append(
                (m, f"span [{m.start}, {m.end}) does not match document text")
            )
            continue
        key = (m.start, m.end, m.concept_ids)
        if key in seen:
            continue
        kept.append(m)
        seen.add(key)
    kept.sort(key=lambda m: m.sort_key())
    return replace(doc, mentions=tuple(kept)), warnings


def find_cooccurrence(doc, id1, id2):
    """First sentence containing mentions of both concept ids, else None.

    A mention counts for a sentence when its span lies fully inside; one
    composite mention carrying both ids satisfies both sides.
    """
    for span in segment_document(doc):
        inside = [
            m for m in doc.mentions if span.start <= m.start and m.end <= span.end
        ]
        if any(id1 in m.concept_ids for m in inside) and any(
            id2 in m.concept_ids for m in inside
        ):
            return span
    return None
