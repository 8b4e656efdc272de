"""Tokenizer, configuration, training, and prediction contracts."""

import pytest
import torch

from reltrainer.data import parse_instances
from reltrainer.model import PRESETS, TrainConfig
from reltrainer.tokenizer import SPECIAL_TOKENS, Tokenizer
from reltrainer.train import load_model, predict, predict_logits, save_model, train
from toycorpus import instance_line, to_text, toy_corpus

FAST = TrainConfig(epochs=1, batch_size=16, max_sequence_length=32, seed=5)


def toy_instances(count, seed=0):
    return parse_instances(to_text(toy_corpus(count, seed=seed)))


class TestTokenizer:
    def test_layout(self):
        tokenizer = Tokenizer.build(toy_instances(20))
        assert tokenizer.tokens[:4] == SPECIAL_TOKENS
        assert tokenizer.tokens[4:8] == ("<C>", "</C>", "<G>", "</G>")
        assert len(set(tokenizer.tokens)) == len(tokenizer.tokens)

    def test_tags_are_atomic(self):
        tokenizer = Tokenizer.build(toy_instances(5))
        tokens = tokenizer.tokenize("<G>GENE1</G> binds <C>chem1</C>.")
        assert tokens == ["<G>", "gene1", "</G>", "binds", "<C>", "chem1", "</C>", "."]

    def test_unknown_tag_splits_to_characters(self):
        tokenizer = Tokenizer.build(toy_instances(5))
        assert tokenizer.tokenize("<Q>x</Q>") == ["<", "q", ">", "x", "<", "/", "q", ">"]

    def test_encode_layout_and_unknowns(self):
        instances = toy_instances(5)
        tokenizer = Tokenizer.build(instances)
        ids, truncated = tokenizer.encode(instances[0], 64)
        assert not truncated
        assert ids[0] == tokenizer.ids["[CLS]"]
        sep = tokenizer.ids["[SEP]"]
        assert ids.count(sep) == 1
        prompt_len = len(tokenizer.tokenize(instances[0].prompt))
        assert ids.index(sep) == 1 + prompt_len
        assert 0 not in ids

    def test_encode_truncates_from_end(self):
        instances = toy_instances(5)
        tokenizer = Tokenizer.build(instances)
        full, _ = tokenizer.encode(instances[0], 512)
        short, truncated = tokenizer.encode(instances[0], 4)
        assert truncated
        assert short == full[:4]

    def test_vocabulary_is_deterministic(self):
        a = Tokenizer.build(toy_instances(40, seed=3))
        b = Tokenizer.build(toy_instances(40, seed=3))
        assert a.tokens == b.tokens

    def test_rejects_bad_layouts(self):
        with pytest.raises(ValueError, match="special tokens"):
            Tokenizer(["[PAD]", "[UNK]", "[CLS]", "x"])
        with pytest.raises(ValueError, match="duplicate"):
            Tokenizer(list(SPECIAL_TOKENS) + ["a", "a"])


class TestVocabularyContract:
    def test_internal_tag_adds_exactly_two_items(self):
        base = toy_corpus(20)
        with_internal = base + [
            dict(
                base[0],
                doc_id="x9999",
                type1={"name": "DrugProt-Chem", "base": "Chemical"},
                context=base[0]["context"]
                .replace("<C>", "<DrugProt-Chem>")
                .replace("</C>", "</DrugProt-Chem>"),
            )
        ]
        plain = Tokenizer.build(parse_instances(to_text(base)))
        grown = Tokenizer.build(parse_instances(to_text(with_internal)))
        added = set(grown.tokens) - set(plain.tokens)
        assert added == {"<DrugProt-Chem>", "</DrugProt-Chem>"}
        assert len(grown) == len(plain) + 2

    def test_growth_equals_distinct_tags(self):
        instances = toy_instances(10)
        tokenizer = Tokenizer.build(instances)
        codes = {code for inst in instances for code in inst.tag_codes()}
        assert len(tokenizer.tag_tokens) == 2 * len(codes)


class TestTrainConfig:
    def test_defaults(self):
        config = TrainConfig()
        assert config.model_name == "tiny"
        assert config.model_name in PRESETS

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"model_name": "huge"},
            {"epochs": 0},
            {"epochs": 2.5},
            {"batch_size": -1},
            {"learning_rate": 0.0},
            {"max_sequence_length": 0},
            {"seed": "x"},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)

    def test_json_round_trip(self):
        config = TrainConfig(model_name="small", epochs=3, seed=7)
        raw = config.to_json_dict()
        assert raw["modelName"] == "small"
        assert raw["batchSize"] == 32
        assert TrainConfig.from_json_dict(raw) == config

    def test_unknown_json_key(self):
        with pytest.raises(ValueError, match="unknown config keys: dropout"):
            TrainConfig.from_json_dict({"dropout": 0.5})


class TestTrain:
    def test_label_inventory_matches_file(self):
        instances = toy_instances(30)
        trained, _ = train(instances, FAST)
        assert trained.labels == tuple(sorted({i.label for i in instances}))

    def test_same_seed_same_setup(self):
        instances = toy_instances(30)
        first, _ = train(instances, FAST)
        second, _ = train(instances, FAST)
        assert first.labels == second.labels
        assert len(first.tokenizer) == len(second.tokenizer)

    def test_truncation_counter(self):
        instances = toy_instances(12)
        config = TrainConfig(epochs=1, batch_size=4, max_sequence_length=6, seed=5)
        trained, truncated = train(instances, config)
        assert truncated == 12
        _, none_truncated = train(instances, FAST)
        assert none_truncated == 0
        assert len(predict(trained, instances)) == 12

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="no training instances"):
            train([], FAST)


class TestPredict:
    def test_one_prediction_per_instance(self):
        instances = toy_instances(17)
        trained, _ = train(instances, FAST)
        labels = predict(trained, instances)
        assert len(labels) == 17
        assert set(labels) <= set(trained.labels)

    def test_identical_instances_identical_predictions(self):
        instances = parse_instances(
            "".join(instance_line(f"d{i}") + "\n" for i in range(9))
        )
        trained, _ = train(instances, FAST)
        assert len(set(predict(trained, instances))) == 1

    def test_unknown_label_rejected(self):
        trained, _ = train(toy_instances(10), FAST)
        stranger = parse_instances(instance_line("d1", label="Cotreatment") + "\n")
        with pytest.raises(ValueError, match="unknown label at prediction time"):
            predict(trained, stranger)

    def test_batch_composition_does_not_change_logits(self):
        instances = toy_instances(23)
        trained, _ = train(instances, FAST)
        one_by_one = predict_logits(trained, instances, batch_size=1)
        all_at_once = predict_logits(trained, instances, batch_size=23)
        ragged = predict_logits(trained, instances, batch_size=7)
        assert (one_by_one - all_at_once).abs().max().item() < 1e-5
        assert (one_by_one - ragged).abs().max().item() < 1e-5
        assert torch.equal(one_by_one.argmax(dim=1), all_at_once.argmax(dim=1))

    def test_bad_batch_size(self):
        trained, _ = train(toy_instances(5), FAST)
        with pytest.raises(ValueError, match="batch_size"):
            predict_logits(trained, toy_instances(5), batch_size=0)


class TestArtifacts:
    def test_save_load_round_trip(self, tmp_path):
        instances = toy_instances(25)
        trained, _ = train(instances, FAST)
        save_model(trained, str(tmp_path / "model"))
        names = sorted(p.name for p in (tmp_path / "model").iterdir())
        assert names == ["config.json", "labels.json", "model.pt", "vocab.json"]
        loaded = load_model(str(tmp_path / "model"))
        assert loaded.labels == trained.labels
        assert loaded.tokenizer.tokens == trained.tokenizer.tokens
        assert loaded.config == trained.config
        assert predict(loaded, instances) == predict(trained, instances)
