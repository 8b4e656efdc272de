"""Core data model invariants: entity types, labels, mentions, documents."""

import random

import pytest

from relmerge.model import (
    CANONICAL_KINDS,
    CANONICAL_RELATION_TYPES,
    CHEMICAL,
    DISEASE,
    GENE,
    CandidateInstance,
    Document,
    EntityMention,
    EntityType,
    RelationAnnotation,
    RelationLabel,
    ValidationError,
    canonicalize_pair,
    entity_type_from_source,
    label_text,
    parse_entity_type,
    parse_label,
    render_entity_type,
    render_label,
)


class TestEntityType:
    def test_canonical_constants(self):
        assert GENE.name == "Gene" and GENE.base is None
        assert CHEMICAL.name == "Chemical"
        assert DISEASE.name == "Disease"
        assert set(CANONICAL_KINDS) == {"Gene", "Chemical", "Disease"}

    def test_kind_of_canonical_is_itself(self):
        assert GENE.kind == "Gene"
        assert DISEASE.kind == "Disease"

    def test_internal_type_kind_comes_from_base(self):
        t = EntityType("DrugProt-Chem", "Chemical")
        assert t.kind == "Chemical"
        assert t.name == "DrugProt-Chem"

    def test_internal_type_without_base_has_no_kind(self):
        assert EntityType("protein").kind is None

    def test_canonical_name_with_base_rejected(self):
        with pytest.raises(ValidationError):
            EntityType("Gene", "Chemical")

    def test_base_must_be_canonical(self):
        with pytest.raises(ValidationError):
            EntityType("X-Type", "Protein")

    @pytest.mark.parametrize("bad", ["", "a b", "a\tb", "a<b", "a>b", "a:b", "a|b"])
    def test_invalid_names_rejected(self, bad):
        with pytest.raises(ValidationError):
            EntityType(bad)

    def test_variant_and_mutation_fold_to_gene(self):
        assert entity_type_from_source("Variant") == GENE
        assert entity_type_from_source("Mutation") == GENE
        assert entity_type_from_source("Gene") == GENE
        assert entity_type_from_source("protein") == EntityType("protein")

    def test_render_parse_round_trip(self):
        for t in (GENE, EntityType("protein"), EntityType("BC5CDR-Dis", "Disease")):
            assert parse_entity_type(render_entity_type(t)) == t

    def test_render_forms(self):
        assert render_entity_type(GENE) == "Gene"
        assert render_entity_type(EntityType("DrugProt-Chem", "Chemical")) == (
            "DrugProt-Chem:Chemical"
        )

    def test_tag_codes(self):
        assert GENE.tag_code == "G"
        assert CHEMICAL.tag_code == "C"
        assert DISEASE.tag_code == "D"
        assert EntityType("DrugProt-Chem", "Chemical").tag_code == "DrugProt-Chem"


class TestRelationLabel:
    def test_canonical_inventory(self):
        assert CANONICAL_RELATION_TYPES == (
            "PositiveCorrelation",
            "NegativeCorrelation",
            "Association",
            "Bind",
            "DrugInteraction",
            "Cotreatment",
            "Comparison",
            "Conversion",
        )

    def test_none_and_internal_none(self):
        assert RelationLabel.none().is_none
        assert RelationLabel.internal_none("AIMed").is_none
        assert not RelationLabel("Association").is_none

    def test_internal_none_renders_with_corpus_suffix(self):
        assert render_label(RelationLabel.internal_none("AIMed")) == "None-AIMed"
        assert render_label(RelationLabel.none()) == "None"
        assert render_label(RelationLabel("Bind")) == "Bind"

    def test_parse_round_trip(self):
        for text in ("None", "None-BC5CDR", "Association", "Conversion"):
            assert render_label(parse_label(text)) == text

    def test_corpus_only_allowed_on_none(self):
        with pytest.raises(ValidationError):
            RelationLabel("Association", "AIMed")

    def test_non_canonical_label_rejected(self):
        with pytest.raises(ValidationError):
            RelationLabel("CID")

    def test_label_text_passthrough(self):
        assert label_text("CID") == "CID"
        assert label_text(RelationLabel.internal_none("DDI")) == "None-DDI"


class TestCanonicalPairOrder:
    def _random_item(self, rng):
        types = [GENE, CHEMICAL, DISEASE, EntityType("protein"), None]
        return rng.choice(["A", "B", "C9", "MESH:D1"]), rng.choice(types)

    def test_symmetry_brute_force(self):
        rng = random.Random(11)
        for _ in range(500):
            (id_a, type_a), (id_b, type_b) = self._random_item(rng), self._random_item(rng)
            if id_a == id_b:
                continue
            left = canonicalize_pair(id_a, type_a, id_b, type_b)
            right = canonicalize_pair(id_b, type_b, id_a, type_a)
            assert left == right

    def test_idempotence(self):
        rng = random.Random(12)
        for _ in range(500):
            (id_a, type_a), (id_b, type_b) = self._random_item(rng), self._random_item(rng)
            if id_a == id_b:
                continue
            (i1, t1), (i2, t2) = canonicalize_pair(id_a, type_a, id_b, type_b)
            assert canonicalize_pair(i1, t1, i2, t2) == ((i1, t1), (i2, t2))

    def test_order_is_by_type_name_then_id(self):
        assert canonicalize_pair("Z1", CHEMICAL, "A1", GENE) == (
            ("Z1", CHEMICAL),
            ("A1", GENE),
        )
        assert canonicalize_pair("Z1", GENE, "A1", GENE) == (
            ("A1", GENE),
            ("Z1", GENE),
        )

    def test_missing_type_sorts_before_named(self):
        assert canonicalize_pair("B", GENE, "A", None) == (("A", None), ("B", GENE))

    def test_self_pair_rejected(self):
        with pytest.raises(ValidationError):
            canonicalize_pair("A", GENE, "A", GENE)


class TestEntityMention:
    def test_valid_mention(self):
        m = EntityMention(0, 7, "aspirin", CHEMICAL, ("MESH:D001241",))
        assert m.sort_key() == (0, 7, ("MESH:D001241",), "Chemical")

    def test_bad_offsets(self):
        with pytest.raises(ValidationError):
            EntityMention(5, 5, "", CHEMICAL, ("C1",))
        with pytest.raises(ValidationError):
            EntityMention(-1, 3, "abcd", CHEMICAL, ("C1",))

    def test_text_length_must_match_span(self):
        with pytest.raises(ValidationError):
            EntityMention(0, 3, "abcd", CHEMICAL, ("C1",))

    def test_concept_ids_must_be_present_and_unique(self):
        with pytest.raises(ValidationError):
            EntityMention(0, 1, "a", CHEMICAL, ())
        with pytest.raises(ValidationError):
            EntityMention(0, 1, "a", CHEMICAL, ("C1", "C1"))

    def test_concept_id_cannot_contain_comma_or_whitespace(self):
        with pytest.raises(ValidationError):
            EntityMention(0, 1, "a", CHEMICAL, ("C,1",))
        with pytest.raises(ValidationError):
            EntityMention(0, 1, "a", CHEMICAL, ("C 1",))

    def test_composite_mention_keeps_id_order(self):
        m = EntityMention(0, 1, "a", DISEASE, ("D010051", "D001943"))
        assert m.concept_ids == ("D010051", "D001943")


class TestRelationAnnotation:
    def test_pair_is_canonicalized_on_construction(self):
        r = RelationAnnotation("Z", "A", GENE, GENE, "Association")
        assert (r.concept_id1, r.concept_id2) == ("A", "Z")
        r = RelationAnnotation("G1", "C1", GENE, CHEMICAL, "CID")
        assert (r.type1, r.type2) == (CHEMICAL, GENE)
        assert (r.concept_id1, r.concept_id2) == ("C1", "G1")

    def test_label_may_be_raw_text_or_label(self):
        assert RelationAnnotation("A", "B", GENE, GENE, "CID").label == "CID"
        lab = RelationLabel("Association")
        assert RelationAnnotation("A", "B", GENE, GENE, lab).label is lab

    def test_empty_label_rejected(self):
        with pytest.raises(ValidationError):
            RelationAnnotation("A", "B", GENE, GENE, "")

    def test_self_relation_rejected(self):
        with pytest.raises(ValidationError):
            RelationAnnotation("A", "A", GENE, GENE, "CID")


class TestDocument:
    def test_combined_text_has_single_space_joint(self):
        doc = Document("1", "A.", "B binds C.", (), ())
        assert doc.combined_text == "A. B binds C."

    def test_mention_must_match_slice(self):
        good = EntityMention(3, 4, "B", GENE, ("G1",))
        Document("1", "A.", "B binds C.", (good,), ())
        bad = EntityMention(3, 4, "X", GENE, ("G1",))
        with pytest.raises(ValidationError):
            Document("1", "A.", "B binds C.", (bad,), ())

    def test_mention_may_straddle_title_boundary(self):
        m = EntityMention(0, 4, "A. B", GENE, ("G1",))
        doc = Document("1", "A.", "B binds C.", (m,), ())
        assert doc.combined_text[0:4] == "A. B"

    def test_doc_id_constraints(self):
        for bad in ("", "a b", "a\tb", "a|b", "#a"):
            with pytest.raises(ValidationError):
                Document(bad, "T.", "A.", (), ())

    def test_no_newlines_or_tabs_in_text(self):
        with pytest.raises(ValidationError):
            Document("1", "T.\nX", "A.", (), ())
        with pytest.raises(ValidationError):
            Document("1", "T.", "A.\tX", (), ())

    def test_empty_abstract_allowed(self):
        doc = Document("1", "Only title.", "", (), ())
        assert doc.combined_text == "Only title. "


class TestCandidateInstance:
    def _make(self, **overrides):
        fields = dict(
            doc_id="1",
            corpus="BC5CDR",
            concept_id1="C1",
            type1=CHEMICAL,
            concept_id2="D1",
            type2=DISEASE,
            prompt="What is the relation in BC5CDR between a and b?",
            context="some text",
            label=RelationLabel("Association"),
            level="document",
        )
        fields.update(overrides)
        return CandidateInstance(**fields)

    def test_valid_instance(self):
        inst = self._make()
        assert inst.pair_key() == ("C1", "Chemical", "D1", "Disease")

    def test_level_must_be_known(self):
        with pytest.raises(ValidationError):
            self._make(level="paragraph")

    def test_pair_must_already_be_canonical(self):
        with pytest.raises(ValidationError):
            self._make(concept_id1="D1", type1=DISEASE, concept_id2="C1", type2=CHEMICAL)

    def test_label_must_be_relation_label(self):
        with pytest.raises(ValidationError):
            self._make(label="Association")

    def test_prompt_and_context_must_be_non_empty(self):
        with pytest.raises(ValidationError):
            self._make(prompt="")
        with pytest.raises(ValidationError):
            self._make(context="")
