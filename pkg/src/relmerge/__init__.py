"""relmerge: harmonize heterogeneous biomedical relation corpora into one
shared training format.

Corpora differ along five axes (entity spans, context level, negative
policy, label granularity, entity typing); a per-corpus profile describes
the adjustments, and the pipeline applies them, merges the results, and
emits classifier-ready candidate instances plus evaluation tooling.
"""

from .model import (
    CANONICAL_KINDS,
    CANONICAL_RELATION_TYPES,
    CandidateInstance,
    CorpusProfile,
    Document,
    EntityMention,
    EntityType,
    RelationAnnotation,
    RelationLabel,
    ValidationError,
    canonicalize_pair,
    parse_label,
    render_label,
)
from .formats import (
    ParseError,
    RepositoryRecord,
    builtin_profile_names,
    load_builtin_profile,
    parse_instances,
    parse_profile,
    parse_pubtator,
    parse_repository,
    write_instances,
    write_pubtator,
)
from .textspan import (
    Lexicon,
    SentenceSpan,
    attach_annotations,
    dictionary_match,
    find_cooccurrence,
    load_lexicon,
    segment_sentences,
)
from .harmonize import (
    HarmonizedCorpus,
    HarmonizedDocument,
    LabelConflictError,
    LabeledPair,
    ReportRecord,
    apply_negative_policy,
    corpus_from_json,
    corpus_to_json,
    delimit_context,
    harmonize_corpus,
    map_label,
    merge_corpora,
    recover_spans,
    render_report,
    retag_entities,
)
from .instances import (
    build_prompt,
    enumerate_pairs,
    generate_instances,
    strip_boundary_tags,
    tag_context,
)
from .evaluate import (
    EvalReport,
    RelationTuple,
    TTestResult,
    baseline_predict,
    corpus_stats,
    kfold_split,
    paired_t_test,
    parse_tuples,
    score,
    subsample,
    write_tuples,
)

__version__ = "0.1.0"
