"""Trainer command-line behavior."""

import json

import pytest

from reltrainer.cli import main
from toycorpus import instance_line, to_text, toy_corpus


def write_corpus(path, count, seed=0):
    path.write_text(to_text(toy_corpus(count, seed=seed)), encoding="utf-8")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestTrainCommand:
    def test_happy_path(self, tmp_path, capsys):
        instances = tmp_path / "train.jsonl"
        write_corpus(instances, 40)
        code, stdout, _ = run(
            capsys,
            "train",
            "--instances",
            str(instances),
            "--out-dir",
            str(tmp_path / "model"),
            "--epochs",
            "1",
            "--max-seq-len",
            "32",
        )
        assert code == 0
        assert "trained on 40 instances: 4 labels" in stdout
        assert "0 truncated" in stdout
        saved = json.loads((tmp_path / "model" / "config.json").read_text())
        assert saved["epochs"] == 1
        assert saved["modelName"] == "tiny"

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        instances = tmp_path / "train.jsonl"
        write_corpus(instances, 20)
        config = tmp_path / "config.json"
        config.write_text(
            json.dumps({"modelName": "tiny", "epochs": 4, "maxSequenceLength": 32}),
            encoding="utf-8",
        )
        code, _, _ = run(
            capsys,
            "train",
            "--instances",
            str(instances),
            "--out-dir",
            str(tmp_path / "model"),
            "--config",
            str(config),
            "--epochs",
            "1",
        )
        assert code == 0
        saved = json.loads((tmp_path / "model" / "config.json").read_text())
        assert saved["epochs"] == 1
        assert saved["maxSequenceLength"] == 32

    def test_bad_config_key(self, tmp_path, capsys):
        instances = tmp_path / "train.jsonl"
        write_corpus(instances, 5)
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"warmup": 10}), encoding="utf-8")
        code, _, stderr = run(
            capsys,
            "train",
            "--instances",
            str(instances),
            "--out-dir",
            str(tmp_path / "model"),
            "--config",
            str(config),
        )
        assert code == 1
        assert "unknown config keys" in stderr

    def test_missing_instances_file(self, tmp_path, capsys):
        code, _, stderr = run(
            capsys,
            "train",
            "--instances",
            str(tmp_path / "missing.jsonl"),
            "--out-dir",
            str(tmp_path / "model"),
        )
        assert code == 2
        assert "i/o error:" in stderr

    def test_malformed_instances(self, tmp_path, capsys):
        instances = tmp_path / "bad.jsonl"
        instances.write_text("not json\n", encoding="utf-8")
        code, _, stderr = run(
            capsys,
            "train",
            "--instances",
            str(instances),
            "--out-dir",
            str(tmp_path / "model"),
        )
        assert code == 1
        assert "line 1" in stderr


class TestPredictCommand:
    @pytest.fixture()
    def model_dir(self, tmp_path, capsys):
        instances = tmp_path / "train.jsonl"
        write_corpus(instances, 40)
        assert (
            main(
                [
                    "train",
                    "--instances",
                    str(instances),
                    "--out-dir",
                    str(tmp_path / "model"),
                    "--epochs",
                    "1",
                    "--max-seq-len",
                    "32",
                ]
            )
            == 0
        )
        capsys.readouterr()
        return tmp_path / "model"

    def test_happy_path(self, model_dir, tmp_path, capsys):
        instances = tmp_path / "test.jsonl"
        write_corpus(instances, 15, seed=9)
        out = tmp_path / "pred.tsv"
        code, stdout, _ = run(
            capsys,
            "predict",
            "--model-dir",
            str(model_dir),
            "--instances",
            str(instances),
            "--out",
            str(out),
        )
        assert code == 0
        assert "15 predictions" in stdout
        rows = out.read_text(encoding="utf-8").splitlines()
        assert len(rows) == 15
        assert all(len(row.split("\t")) == 6 for row in rows)

    def test_unknown_label_rejected(self, model_dir, tmp_path, capsys):
        instances = tmp_path / "test.jsonl"
        instances.write_text(
            instance_line("d1", label="Comparison") + "\n", encoding="utf-8"
        )
        code, _, stderr = run(
            capsys,
            "predict",
            "--model-dir",
            str(model_dir),
            "--instances",
            str(instances),
            "--out",
            str(tmp_path / "pred.tsv"),
        )
        assert code == 1
        assert "unknown label at prediction time: Comparison" in stderr

    def test_missing_model_dir(self, tmp_path, capsys):
        instances = tmp_path / "test.jsonl"
        write_corpus(instances, 3)
        code, _, stderr = run(
            capsys,
            "predict",
            "--model-dir",
            str(tmp_path / "nowhere"),
            "--instances",
            str(instances),
            "--out",
            str(tmp_path / "pred.tsv"),
        )
        assert code == 2
        assert "i/o error:" in stderr


class TestUsage:
    def test_no_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 1
        capsys.readouterr()

    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["train", "--instances", "x"])
        assert exc.value.code == 1
        capsys.readouterr()
