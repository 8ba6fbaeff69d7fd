import json

import pytest

from cspos.cli import main, read_config
from cspos.corpus import parse_corpus
from cspos.pipeline import ROW_KEYS, TrainConfig, evaluate_all, run_bench
from cspos.synth import SynthConfig

SMALL = ["--n-sentences", "300", "--vocab-per-lang", "150", "--tagset-size", "8"]


def test_evaluate_all_rows(small_synth, small_bundle):
    _, r = small_synth
    rows, info = evaluate_all(small_bundle, r.test, workers=1)
    assert len(rows) == len(ROW_KEYS) == 9
    assert rows[0].name == "BASE:MonoLT-L1"
    assert rows[5].name == "COMB4:MonoLT-SVM"
    assert rows[4].ties is not None
    assert info["comb1_comb2_differing_sentences"] >= 0


def test_parallel_prediction_matches_serial(small_synth, small_bundle):
    _, r = small_synth
    a, _ = evaluate_all(small_bundle, r.test, workers=1)
    b, _ = evaluate_all(small_bundle, r.test, workers=2)
    assert [x.counts for x in a] == [x.counts for x in b]


def test_small_bench_is_deterministic():
    cfg = SynthConfig(seed=1, n_sentences=300, vocab_per_lang=150, tagset_size=8)
    tc = TrainConfig(folds=3, epochs=2)
    a, b = run_bench(cfg, tc, workers=1), run_bench(cfg, tc, workers=1)
    assert a.report_text() == b.report_text()
    assert a.report_json() == b.report_json()


def test_cli_end_to_end(tmp_path, capsys):
    d = tmp_path / "data"
    assert main(["synth", "--preset", "far-pair", "--seed", "2", *SMALL, "--out-dir", str(d)]) == 0
    train = parse_corpus(d / "train.tsv")
    assert len(train) == 240
    assert json.loads((d / "manifest.json").read_text())["config"]["seed"] == 2

    assert main(["stats", "--input", str(d / "test.tsv"), "--json"]) == 0
    assert json.loads(capsys.readouterr().out.splitlines()[-1])["n_sentences"] == 60

    bundle = tmp_path / "bundle"
    assert main(["bench", "--preset", "far-pair", "--seed", "2", *SMALL, "--folds", "3",
                 "--epochs", "2", "--out-dir", str(tmp_path / "rep"),
                 "--save-bundle", str(bundle)]) == 0
    table = capsys.readouterr().out
    assert "COMB4:MonoLT-SVM" in table and "INT3:AllMonoData+CSD" in table
    assert (tmp_path / "rep" / "report.json").exists()

    pred = tmp_path / "pred.tsv"
    assert main(["run", "--condition", "comb4", "--bundle", str(bundle),
                 "--input", str(d / "test.tsv"), "--output", str(pred)]) == 0
    assert main(["evaluate", "--gold", str(d / "test.tsv"), "--pred", str(pred),
                 "--name", "COMB4", "--json-out", str(tmp_path / "e.json")]) == 0
    out = capsys.readouterr().out
    rep = json.loads((tmp_path / "rep" / "report.json").read_text())
    comb4 = next(r for r in rep["rows"] if r["approach"] == "COMB4:MonoLT-SVM")
    assert f"{comb4['overall']:.2f}" in out


def test_cli_training_commands(tmp_path, capsys):
    d = tmp_path / "data"
    main(["synth", "--seed", "4", *SMALL, "--out-dir", str(d)])
    test = d / "test.tsv"
    assert main(["train-tagger", "--input", str(d / "train.tsv"), "--output", str(tmp_path / "t.json")]) == 0
    assert main(["train-lid", "--l1", str(test), "--l2", str(test), "--order", "3",
                 "--output", str(tmp_path / "lid.json")]) == 0
    assert main(["train-stacker", "--tagger-l1", str(tmp_path / "t.json"),
                 "--tagger-l2", str(tmp_path / "t.json"), "--input", str(test), "--folds", "3",
                 "--output", str(tmp_path / "s.json")]) == 0
    assert "3-fold validation accuracy" in capsys.readouterr().out


def test_cli_map_tags(tmp_path):
    src = tmp_path / "raw.tsv"
    src.write_text("perro\tL2\tN.M.SG\nand\tL1\tCONJ\n", encoding="utf-8")
    out = tmp_path / "mapped.tsv"
    assert main(["map-tags", "--input", str(src), "--table", "bangor_to_universal",
                 "--output", str(out)]) == 0
    assert parse_corpus(out)[0].tags[1].value == "CCONJ"


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.tsv"
    bad.write_text("a\tL1\n", encoding="utf-8")
    assert main(["stats", "--input", str(bad)]) == 1
    assert "bad.tsv:1" in capsys.readouterr().err
    assert main(["stats", "--input", str(tmp_path / "missing.tsv")]) == 1
    with pytest.raises(SystemExit) as e:
        main(["run", "--condition", "COMB9", "--bundle", "x", "--input", "x", "--output", "y"])
    assert e.value.code == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# synthetic\nn-sentences = 100\nvocab-per-lang=80\nseed=9\n", encoding="utf-8")
    assert read_config(cfg) == {"n_sentences": "100", "vocab_per_lang": "80", "seed": "9"}
    d = tmp_path / "d"
    assert main(["synth", "--config", str(cfg), "--n-sentences", "50", "--out-dir", str(d)]) == 0
    m = json.loads((d / "manifest.json").read_text())["config"]
    assert (m["n_sentences"], m["vocab_per_lang"], m["seed"]) == (50, 80, 9)
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense-key=1\n", encoding="utf-8")
    with pytest.raises(SystemExit):
        main(["synth", "--config", str(bad)])
