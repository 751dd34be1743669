"""CLI exit codes, manifests, determinism, and report formats."""

import json

import pytest

from cscprobe.cli import main
from cscprobe.manifest import file_digest


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "decomp.tsv").write_text(
        "称\t禾 尔\n程\t禾 口 王\n城\t土 成\n彦\t产 彡\n", encoding="utf-8"
    )
    (tmp_path / "pinyin.tsv").write_text(
        "称\tcheng1,chen4\n程\tcheng2\n城\tcheng2\n产\tchan3\n", encoding="utf-8"
    )
    (tmp_path / "vocab.txt").write_text("称\n程\n城\n彦\n", encoding="utf-8")
    (tmp_path / "allchars.txt").write_text(
        "称\n程\n城\n彦\n禾\n尔\n口\n王\n土\n成\n产\n彡\n", encoding="utf-8"
    )
    (tmp_path / "train.tsv").write_text(
        "t1\t他程了\t他城了\nt2\t禾口禾\t禾尔禾\nt3\t我称你\t我称你\n", encoding="utf-8"
    )
    (tmp_path / "test.tsv").write_text(
        "e1\t他程去\t他城去\ne2\t又程走\t又城走\n", encoding="utf-8"
    )
    (tmp_path / "scored.tsv").write_text(
        "s1\t他程去\t他城去\t他城去\ns2\t天程好\t天城好\t天程好\n", encoding="utf-8"
    )
    return tmp_path


def test_build_glyph_writes_dataset_and_manifest(workdir, capsys):
    code = main([
        "build-glyph-probe", "--decomposition", "decomp.tsv", "--vocab", "vocab.txt",
        "--seed", "7", "--out", "glyph.tsv", "--format", "json",
    ])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["valid"] is True
    manifest = json.loads((workdir / "glyph.manifest.json").read_text(encoding="utf-8"))
    assert manifest["command"] == "build-glyph-probe"
    assert manifest["seeds"] == [7]
    assert manifest["inputs"]["decomp.tsv"] == file_digest(workdir / "decomp.tsv")
    assert manifest["outputs"]["glyph.tsv"] == file_digest(workdir / "glyph.tsv")


def test_missing_input_file_is_usage_error(workdir, capsys):
    code = main([
        "build-glyph-probe", "--decomposition", "nope.tsv", "--vocab", "vocab.txt",
        "--seed", "7", "--out", "glyph.tsv",
    ])
    assert code == 2
    assert "nope.tsv" in capsys.readouterr().err


def test_unknown_flag_is_usage_error(workdir, capsys):
    assert main(["score", "--corpus", "scored.tsv", "--bogus"]) == 2
    assert main(["nonsense-command"]) == 2


def test_validation_error_exit_one(workdir, capsys):
    (workdir / "bad.tsv").write_text("称\t禾 尔\tjunk\n", encoding="utf-8")
    code = main([
        "build-glyph-probe", "--decomposition", "bad.tsv", "--vocab", "vocab.txt",
        "--seed", "7", "--out", "glyph.tsv",
    ])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_random_embeddings_deterministic(workdir):
    argv = ["random-embeddings", "--vocab", "allchars.txt", "--dim", "12",
            "--seed", "3", "--out", "a.cemb"]
    assert main(argv) == 0
    assert main(argv[:-1] + ["b.cemb"]) == 0
    assert (workdir / "a.cemb").read_bytes() == (workdir / "b.cemb").read_bytes()


def test_train_eval_pipeline(workdir, capsys):
    assert main([
        "build-glyph-probe", "--decomposition", "decomp.tsv", "--vocab", "vocab.txt",
        "--seed", "7", "--test-fraction", "0.25", "--out", "glyph.tsv",
    ]) == 0
    assert main([
        "random-embeddings", "--vocab", "allchars.txt", "--dim", "12",
        "--seed", "3", "--out", "emb.cemb",
    ]) == 0
    capsys.readouterr()
    assert main([
        "train-probe", "--dataset", "glyph.tsv", "--embeddings", "emb.cemb",
        "--layers", "2", "--seed", "1", "--epochs", "3",
        "--out-model", "m.cmlp", "--out-report", "r.json", "--format", "json",
    ]) == 0
    train_report = json.loads(capsys.readouterr().out)
    saved = json.loads((workdir / "r.json").read_text(encoding="utf-8"))
    assert saved == train_report
    assert len(saved["epoch_losses"]) == 3
    assert "wall_time_s" not in saved
    assert main([
        "eval-probe", "--model", "m.cmlp", "--dataset", "glyph.tsv",
        "--embeddings", "emb.cemb", "--format", "json",
    ]) == 0
    eval_report = json.loads(capsys.readouterr().out)
    assert eval_report["accuracy"] == train_report["final_accuracy"]


def test_train_probe_rerun_byte_identical(workdir):
    main(["build-glyph-probe", "--decomposition", "decomp.tsv", "--vocab",
          "vocab.txt", "--seed", "7", "--test-fraction", "0.25", "--out", "glyph.tsv"])
    main(["random-embeddings", "--vocab", "allchars.txt", "--dim", "12",
          "--seed", "3", "--out", "emb.cemb"])
    argv = ["train-probe", "--dataset", "glyph.tsv", "--embeddings", "emb.cemb",
            "--layers", "2", "--seed", "1", "--epochs", "3"]
    assert main(argv + ["--out-model", "m1.cmlp", "--out-report", "r1.json"]) == 0
    assert main(argv + ["--out-model", "m2.cmlp", "--out-report", "r2.json"]) == 0
    assert (workdir / "m1.cmlp").read_bytes() == (workdir / "m2.cmlp").read_bytes()
    assert (workdir / "r1.json").read_bytes() == (workdir / "r2.json").read_bytes()


def test_train_probe_multi_seed(workdir, capsys):
    main(["build-glyph-probe", "--decomposition", "decomp.tsv", "--vocab",
          "vocab.txt", "--seed", "7", "--test-fraction", "0.25", "--out", "glyph.tsv"])
    main(["random-embeddings", "--vocab", "allchars.txt", "--dim", "12",
          "--seed", "3", "--out", "emb.cemb"])
    capsys.readouterr()
    assert main([
        "train-probe", "--dataset", "glyph.tsv", "--embeddings", "emb.cemb",
        "--layers", "1", "--epochs", "2", "--seeds", "1,2",
        "--out-report", "agg.json", "--format", "json",
    ]) == 0
    agg = json.loads(capsys.readouterr().out)
    assert set(agg["per_seed"]) == {"1", "2"}
    assert agg["min"] <= agg["mean"] <= agg["max"]
    # --seeds with --out-model is contradictory
    assert main([
        "train-probe", "--dataset", "glyph.tsv", "--embeddings", "emb.cemb",
        "--seeds", "1,2", "--out-model", "m.cmlp",
    ]) == 2


def test_cccr_command(workdir, capsys):
    rows = [
        {"id": "r1", "gold_char": "称", "noise_char": "程",
         "p_gold_masked": 0.1, "p_noise_masked": 0.3,
         "p_gold_noisy": 0.6, "p_noise_noisy": 0.2},
        {"id": "r2", "gold_char": "城", "noise_char": "程",
         "p_gold_masked": 0.2, "p_noise_masked": 0.5,
         "p_gold_noisy": 0.1, "p_noise_noisy": 0.7},
    ]
    (workdir / "p.jsonl").write_text(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8"
    )
    assert main(["cccr", "--predictions", "p.jsonl", "--format", "json",
                 "--out", "cccr.json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["n_mlm"] == 2
    assert report["cccr"] == 0.5
    assert report["baseline_mode"] == "printed"
    assert json.loads((workdir / "cccr.json").read_text(encoding="utf-8")) == report
    assert (workdir / "cccr.manifest.json").is_file()
    assert main(["cccr", "--predictions", "p.jsonl", "--baseline-mode",
                 "renormalized", "--format", "json"]) == 0
    renorm = json.loads(capsys.readouterr().out)
    assert renorm["baseline"] == pytest.approx((0.1 / 0.7 + 0.2 / 0.5) / 2)


def test_isolate_command(workdir, capsys):
    assert main(["isolate", "--train", "train.tsv", "--test", "test.tsv",
                 "--out-dir", "iso", "--format", "json"]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["overlap_pair_count"] == 1
    assert (workdir / "iso" / "isolated_train.tsv").is_file()
    assert (workdir / "iso" / "deduped_test.tsv").is_file()
    assert (workdir / "iso" / "isolation_stats.json").is_file()
    manifest = json.loads((workdir / "iso" / "isolate.manifest.json").read_text(encoding="utf-8"))
    assert set(manifest["outputs"]) == {
        "iso/isolated_train.tsv", "iso/deduped_test.tsv", "iso/isolation_stats.json",
    }


def test_score_command(workdir, capsys):
    assert main(["score", "--corpus", "scored.tsv", "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["detection_precision"] == 1.0
    assert report["correction_recall"] == 0.5


def test_score_validation_error(workdir, capsys):
    (workdir / "clean.tsv").write_text("s1\tabc\tabc\tabc\n", encoding="utf-8")
    assert main(["score", "--corpus", "clean.tsv"]) == 1


def test_human_format_default(workdir, capsys):
    main(["score", "--corpus", "scored.tsv"])
    out = capsys.readouterr().out
    assert "precision" in out and "detection" in out
