"""Instance-file reading and prediction-file writing.

The trainer talks to the harmonization toolkit only through its files:
JSON-lines instance records in, tab-separated relation tuples out.  The
schemas here mirror those file contracts and nothing else.
"""

import json
from dataclasses import dataclass

INSTANCE_KEYS = (
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

# Canonical entity kinds use single-letter boundary-tag codes; any other
# type name tags with the name itself.
_KIND_TAG_CODES = {"Gene": "G", "Chemical": "C", "Disease": "D"}


class DataError(ValueError):
    """Raised for malformed instance files."""


@dataclass(frozen=True)
class Instance:
    """One training/prediction record from an instance file.

    Entity types are kept in their rendered text form ("Gene" or
    "Name:Base") since the trainer never inspects them beyond tagging
    and pass-through into prediction rows.
    """

    doc_id: str
    corpus: str
    concept_id1: str
    type1: str
    concept_id2: str
    type2: str
    prompt: str
    context: str
    label: str
    level: str

    def tag_codes(self):
        """Boundary-tag codes contributed by this instance's pair."""
        return (tag_code(self.type1), tag_code(self.type2))


def tag_code(rendered_type):
    """Map a rendered entity type to its context boundary-tag code."""
    name = rendered_type.split(":", 1)[0]
    return _KIND_TAG_CODES.get(name, name)


def _render_type(value, line_no):
    if isinstance(value, str) and value:
        return value
    if (
        isinstance(value, dict)
        and set(value) == {"name", "base"}
        and all(isinstance(v, str) and v for v in value.values())
    ):
        return f"{value['name']}:{value['base']}"
    raise DataError(f"line {line_no}: bad entity type: {value!r}")


def parse_instances(text):
    """Parse a JSON-lines instance file into Instance records."""
    instances = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"line {line_no}: not a JSON record: {exc}") from None
        if not isinstance(record, dict):
            raise DataError(f"line {line_no}: not a JSON object")
        missing = [key for key in INSTANCE_KEYS if key not in record]
        if missing:
            raise DataError(
                f"line {line_no}: record missing keys: {', '.join(missing)}"
            )
        unknown = [key for key in record if key not in INSTANCE_KEYS]
        if unknown:
            raise DataError(
                f"line {line_no}: unknown keys: {', '.join(sorted(unknown))}"
            )
        for key in INSTANCE_KEYS:
            if key in ("type1", "type2"):
                continue
            if not isinstance(record[key], str):
                raise DataError(f"line {line_no}: {key} must be text")
        instances.append(
            Instance(
                doc_id=record["doc_id"],
                corpus=record["corpus"],
                concept_id1=record["id1"],
                type1=_render_type(record["type1"], line_no),
                concept_id2=record["id2"],
                type2=_render_type(record["type2"], line_no),
                prompt=record["prompt"],
                context=record["context"],
                label=record["label"],
                level=record["level"],
            )
        )
    return instances


def write_predictions(instances, labels):
    """Serialize one scorer tuple row per instance with its predicted label."""
    if len(instances) != len(labels):
        raise DataError("one predicted label per instance required")
    lines = []
    for inst, label in zip(instances, labels):
        fields = (
            inst.doc_id,
            inst.concept_id1,
            inst.type1,
            inst.concept_id2,
            inst.type2,
            label,
        )
        lines.append("\t".join(fields))
    if not lines:
        return ""
    return "\n".join(lines) + "\n"
