import json
from pathlib import Path

import pytest

from codeswitch.cli import main, parse_config_file
from codeswitch.corpus import load_dataset
from codeswitch.errors import ConfigError


@pytest.fixture(scope="module")
def toy_files(tmp_path_factory):
    out = tmp_path_factory.mktemp("toy")
    assert main(["toygen", "--out-dir", str(out), "--n-train", "80", "--n-test", "20", "--seed", "5"]) == 0
    return out


@pytest.fixture(scope="module")
def model_dir(tmp_path_factory, toy_files):
    out = tmp_path_factory.mktemp("model")
    code = main([
        "train",
        "--data", f"aa={toy_files / 'aa_train.tsv'}",
        "--out-dir", str(out),
        "--epochs", "40",
        "--seed", "0",
        "--quiet",
    ])
    assert code == 0
    return out


class TestToygen:
    def test_writes_all_files(self, toy_files):
        names = {p.name for p in toy_files.iterdir()}
        assert {
            "aa_train.tsv", "aa_test.tsv", "bb_train.tsv", "bb_test.tsv",
            "lexicon.aa-bb.tsv", "alignments.aa-bb.tsv", "config.txt",
        } <= names

    def test_counts(self, toy_files):
        assert len(load_dataset(toy_files / "aa_train.tsv", "aa")) == 80
        assert len(load_dataset(toy_files / "aa_test.tsv", "aa")) == 20


class TestTrain:
    def test_model_written(self, model_dir):
        assert (model_dir / "model.json").is_file()
        assert (model_dir / "config.txt").is_file()

    def test_missing_dataset_path_exits_2(self, tmp_path):
        code = main([
            "train", "--data", f"aa={tmp_path / 'missing.tsv'}",
            "--out-dir", str(tmp_path / "out"),
        ])
        assert code == 2

    def test_langs_filter(self, toy_files, tmp_path):
        code = main([
            "train",
            "--data", f"aa={toy_files / 'aa_train.tsv'}",
            "--data", f"bb={toy_files / 'bb_train.tsv'}",
            "--langs", "aa",
            "--out-dir", str(tmp_path / "out"),
            "--epochs", "2",
            "--quiet",
        ])
        assert code == 0

    def test_langs_filter_no_match_exits_2(self, toy_files, tmp_path):
        code = main([
            "train",
            "--data", f"aa={toy_files / 'aa_train.tsv'}",
            "--langs", "zz",
            "--out-dir", str(tmp_path / "out"),
        ])
        assert code == 2


class TestAttack:
    def test_word_mode_outputs(self, toy_files, model_dir, tmp_path):
        out = tmp_path / "attack"
        code = main([
            "attack",
            "--data", f"aa={toy_files / 'aa_test.tsv'}",
            "--model", str(model_dir / "model.json"),
            "--mode", "word",
            "--embedded-lang", "bb",
            "--lexicon", str(toy_files / "lexicon.aa-bb.tsv"),
            "--seed", "1",
            "--out-dir", str(out),
        ])
        assert code == 0
        lines = (out / "results.jsonl").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 20
        for line in lines:
            trace = json.loads(line)["loss_trace"]
            assert all(a <= b for a, b in zip(trace, trace[1:]))
        adv = load_dataset(out / "adversarial.tsv", "aa")
        assert len(adv) == 20
        summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
        assert summary["n_attacked"] == 20
        assert summary["seed"] == 1

    def test_phrase_mode_without_alignments_exits_2(self, toy_files, model_dir, tmp_path):
        code = main([
            "attack",
            "--data", f"aa={toy_files / 'aa_test.tsv'}",
            "--model", str(model_dir / "model.json"),
            "--mode", "phrase",
            "--embedded-lang", "bb",
            "--out-dir", str(tmp_path / "out"),
        ])
        assert code == 2

    def test_endpoint_down_exits_3(self, toy_files, tmp_path):
        code = main([
            "attack",
            "--data", f"aa={toy_files / 'aa_test.tsv'}",
            "--endpoint", "127.0.0.1:1",
            "--mode", "word",
            "--embedded-lang", "bb",
            "--lexicon", str(toy_files / "lexicon.aa-bb.tsv"),
            "--out-dir", str(tmp_path / "out"),
        ])
        assert code == 3


class TestAugment:
    def test_phrase_mode_outputs(self, toy_files, tmp_path):
        out = tmp_path / "aug"
        code = main([
            "augment",
            "--data", f"aa={toy_files / 'aa_train.tsv'}",
            "--langs", "bb",
            "--alignments", f"bb={toy_files / 'alignments.aa-bb.tsv'}",
            "--seed", "2",
            "--out-dir", str(out),
        ])
        assert code == 0
        mixed = load_dataset(out / "mixed.tsv", "mix")
        assert len(mixed) == 80  # full coverage: one output per pivot utterance
        train = load_dataset(out / "train.tsv", "mix")
        test = load_dataset(out / "test.tsv", "mix")
        assert (len(train), len(test)) == (72, 8)

    def test_lang_column_flag(self, toy_files, tmp_path):
        out = tmp_path / "aug5"
        code = main([
            "augment",
            "--data", f"aa={toy_files / 'aa_train.tsv'}",
            "--langs", "bb",
            "--mode", "word",
            "--lexicon", f"bb={toy_files / 'lexicon.aa-bb.tsv'}",
            "--lang-column",
            "--out-dir", str(out),
        ])
        assert code == 0
        header = (out / "mixed.tsv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "id\tlang\tutterance\tslot_labels\tintent"
        mixed = load_dataset(out / "mixed.tsv", "mix")
        assert all(u.lang == "bb" for u in mixed)

    def test_empty_test_split_rejected(self, toy_files, tmp_path):
        code = main([
            "augment",
            "--data", f"aa={toy_files / 'aa_train.tsv'}",
            "--langs", "bb",
            "--alignments", f"bb={toy_files / 'alignments.aa-bb.tsv'}",
            "--split", "1:0",
            "--out-dir", str(tmp_path / "out"),
        ])
        assert code == 2


class TestEvalAndReport:
    def test_eval_memorized_data_is_perfect(self, toy_files, model_dir, tmp_path):
        out = tmp_path / "eval"
        code = main([
            "eval",
            "--data", f"aa={toy_files / 'aa_train.tsv'}",
            "--model", str(model_dir / "model.json"),
            "--out-dir", str(out),
        ])
        assert code == 0
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        assert report["per_lang"]["aa"]["intent_accuracy"] == 1.0
        assert report["per_lang"]["aa"]["semantic_accuracy"] == 1.0

    def test_report_combines_conditions(self, toy_files, model_dir, tmp_path):
        clean_dir = tmp_path / "clean"
        assert main([
            "eval",
            "--data", f"aa={toy_files / 'aa_test.tsv'}",
            "--model", str(model_dir / "model.json"),
            "--out-dir", str(clean_dir),
        ]) == 0
        out_file = tmp_path / "table.tsv"
        code = main([
            "report",
            "--inputs", f"clean={clean_dir / 'report.json'}",
            "--inputs", f"again={clean_dir / 'report.json'}",
            "--out", str(out_file),
        ])
        assert code == 0
        text = out_file.read_text(encoding="utf-8")
        assert "# intent_accuracy" in text
        assert "clean\t" in text and "again\t" in text

    def test_missing_report_exits_2(self, tmp_path):
        assert main(["report", "--inputs", f"x={tmp_path / 'nope.json'}"]) == 2


class TestConfigFile:
    def test_parse(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\nepochs = 3\nout-dir = /tmp/x\n\n", encoding="utf-8")
        assert parse_config_file(cfg) == {"epochs": "3", "out_dir": "/tmp/x"}

    def test_bad_line(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("not a pair\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            parse_config_file(cfg)

    def test_flags_override_config(self, toy_files, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"data = aa={toy_files / 'aa_train.tsv'}\nepochs = 2\nseed = 9\nquiet = true\n",
            encoding="utf-8",
        )
        out = tmp_path / "out"
        assert main(["train", "--config", str(cfg), "--out-dir", str(out), "--epochs", "1"]) == 0
        echoed = (out / "config.txt").read_text(encoding="utf-8")
        assert "epochs = 1" in echoed  # flag beat the file
        assert "seed = 9" in echoed
