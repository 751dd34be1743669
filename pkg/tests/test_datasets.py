"""Probe dataset construction: balance, disjoint splits, label truth."""

import numpy as np
import pytest

from cscprobe.chars import DecompositionTable, PinyinTable, Vocabulary
from cscprobe.datasets import (
    DatasetFormatError,
    ProbeDataset,
    ProbePair,
    build_glyph_dataset,
    build_phonetic_dataset,
    read_dataset,
    validate_dataset,
    write_dataset,
)


def glyph_table(entries):
    return DecompositionTable(entries={k: tuple(v) for k, v in entries.items()})


def pinyin_table(entries):
    toned = {k: tuple(v) for k, v in entries.items()}
    base = {k: frozenset(f.rstrip("12345") for f in v) for k, v in entries.items()}
    return PinyinTable(toned=toned, base=base)


def test_toy_glyph_forced_negative():
    # vocab {称}, components 禾 and 尔, universe {禾, 尔, 产}: the only
    # eligible negative component is 产, used twice to stay balanced
    table = glyph_table({"称": ["禾", "尔"], "广": ["产"]})
    vocab = Vocabulary(chars=("称",))
    ds = build_glyph_dataset(table, vocab, seed=0)
    positives = sorted((p.left, p.right) for p in ds.pairs if p.label == 1)
    negatives = sorted((p.left, p.right) for p in ds.pairs if p.label == 0)
    assert positives == [("尔", "称"), ("禾", "称")]
    assert negatives == [("产", "称"), ("产", "称")]


def test_toy_phonetic_forced():
    table = pinyin_table({"称": ["cheng1"], "程": ["cheng2"], "产": ["chan3"]})
    vocab = Vocabulary(chars=("称",))
    ds = build_phonetic_dataset(table, vocab, seed=0)
    positives = [(p.left, p.right) for p in ds.pairs if p.label == 1]
    negatives = [(p.left, p.right) for p in ds.pairs if p.label == 0]
    assert positives == [("程", "称")]
    assert negatives == [("产", "称")]


def big_glyph_table(n_chars=120, n_comps=40, seed=1):
    rng = np.random.default_rng(seed)
    comps = [chr(0x4E00 + i) for i in range(n_comps)]
    chars = [chr(0x6000 + i) for i in range(n_chars)]
    entries = {}
    for c in chars:
        k = int(rng.integers(1, 5))
        idx = rng.choice(n_comps, size=k, replace=False)
        entries[c] = [comps[i] for i in idx]
    return glyph_table(entries), Vocabulary(chars=tuple(chars))


def test_glyph_balance_and_split_disjointness():
    table, vocab = big_glyph_table()
    for seed in range(5):
        ds = build_glyph_dataset(table, vocab, seed=seed)
        pos = [p for p in ds.pairs if p.label == 1]
        neg = [p for p in ds.pairs if p.label == 0]
        assert len(pos) == len(neg)
        train_rights = {p.right for p in ds.split_pairs("train")}
        test_rights = {p.right for p in ds.split_pairs("test")}
        assert not train_rights & test_rights
        # balance also holds per right character for the glyph builder
        for r in train_rights | test_rights:
            assert sum(1 for p in pos if p.right == r) == sum(
                1 for p in neg if p.right == r
            )


def test_glyph_labels_truthful():
    table, vocab = big_glyph_table()
    ds = build_glyph_dataset(table, vocab, seed=3)
    for p in ds.pairs:
        truth = p.left in table.components_of(p.right)
        assert truth == bool(p.label)


def test_glyph_test_fraction():
    table, vocab = big_glyph_table()
    ds = build_glyph_dataset(table, vocab, seed=0, test_fraction=0.25)
    rights = {p.right for p in ds.pairs}
    test_rights = {p.right for p in ds.split_pairs("test")}
    assert len(test_rights) == round(0.25 * len(rights))


def test_glyph_skips_unsplittable_chars():
    table = glyph_table({"称": ["禾", "尔"], "广": ["产"]})
    vocab = Vocabulary(chars=("称", "口"))  # 口 has no entry: skipped
    ds = build_glyph_dataset(table, vocab, seed=0)
    assert {p.right for p in ds.pairs} == {"称"}


def test_glyph_empty_dataset_is_error():
    table = glyph_table({"称": ["禾", "尔"]})
    vocab = Vocabulary(chars=("口", "王"))
    with pytest.raises(ValueError):
        build_glyph_dataset(table, vocab, seed=0)


def test_phonetic_empty_dataset_is_error():
    table = pinyin_table({"称": ["cheng1"], "产": ["chan3"]})
    # no character has a same-phonetic partner
    vocab = Vocabulary(chars=("称", "产"))
    with pytest.raises(ValueError):
        build_phonetic_dataset(table, vocab, seed=0)


def test_phonetic_labels_truthful():
    entries = {}
    rng = np.random.default_rng(2)
    syllables = ["cheng", "chan", "li", "wang", "zhang"]
    for i in range(80):
        c = chr(0x7000 + i)
        syl = syllables[int(rng.integers(0, len(syllables)))]
        entries[c] = [f"{syl}{int(rng.integers(1, 6))}"]
    table = pinyin_table(entries)
    vocab = Vocabulary(chars=tuple(entries))
    ds = build_phonetic_dataset(table, vocab, seed=4)
    for p in ds.pairs:
        base_l = {f.rstrip("12345") for f in table.toned[p.left]}
        base_r = {f.rstrip("12345") for f in table.toned[p.right]}
        assert bool(base_l & base_r) == bool(p.label)
        assert p.left != p.right


def test_phonetic_tone_sensitive_mode():
    table = pinyin_table({"称": ["cheng1"], "程": ["cheng2"], "城": ["cheng2"], "产": ["chan3"]})
    vocab = Vocabulary(chars=("程",))
    ds = build_phonetic_dataset(table, vocab, seed=0, tone_sensitive=True)
    positives = [(p.left, p.right) for p in ds.pairs if p.label == 1]
    # only 城 shares the exact toned form cheng2
    assert positives == [("城", "程")]
    report = validate_dataset(ds, table, tone_sensitive=True)
    assert report.valid


def test_rebuild_same_seed_identical_bytes(tmp_path):
    table, vocab = big_glyph_table()
    a = tmp_path / "a.tsv"
    b = tmp_path / "b.tsv"
    write_dataset(build_glyph_dataset(table, vocab, seed=9), a)
    write_dataset(build_glyph_dataset(table, vocab, seed=9), b)
    assert a.read_bytes() == b.read_bytes()
    write_dataset(build_glyph_dataset(table, vocab, seed=10), b)
    assert a.read_bytes() != b.read_bytes()


def test_validate_fresh_dataset_clean():
    table, vocab = big_glyph_table()
    ds = build_glyph_dataset(table, vocab, seed=1)
    report = validate_dataset(ds, table)
    assert report.valid
    assert report.balanced
    assert report.split_violations == ()
    assert report.label_violations == ()


def test_validate_planted_split_violation():
    table = glyph_table({"称": ["禾", "尔"], "广": ["产"]})
    pairs = (
        ProbePair("禾", "称", 1, "train"),
        ProbePair("产", "称", 0, "test"),  # same right char in both splits
    )
    ds = ProbeDataset(kind="glyph", pairs=pairs, seed=0, test_fraction=0.2)
    report = validate_dataset(ds, table)
    assert report.split_violations == ("称",)
    assert not report.valid


def test_validate_planted_label_violation():
    table = glyph_table({"称": ["禾", "尔"], "广": ["产"]})
    pairs = (
        ProbePair("产", "称", 1, "train"),  # 产 is not a component of 称
        ProbePair("禾", "称", 0, "train"),  # 禾 is one
    )
    ds = ProbeDataset(kind="glyph", pairs=pairs, seed=0, test_fraction=0.2)
    report = validate_dataset(ds, table)
    assert set(report.label_violations) == {("产", "称", 1), ("禾", "称", 0)}


def test_dataset_file_round_trip(tmp_path):
    table, vocab = big_glyph_table()
    ds = build_glyph_dataset(table, vocab, seed=6, test_fraction=0.3)
    p = tmp_path / "ds.tsv"
    write_dataset(ds, p)
    back = read_dataset(p)
    assert back == ds


def test_read_dataset_header_errors(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("#kind=glyph\n禾\t称\t1\ttrain\n", encoding="utf-8")
    with pytest.raises(DatasetFormatError):
        read_dataset(p)  # missing seed/test_fraction headers
    p.write_text("#kind=odd\n#seed=1\n#test_fraction=0.2\n", encoding="utf-8")
    with pytest.raises(DatasetFormatError):
        read_dataset(p)
    p.write_text(
        "#kind=glyph\n#seed=1\n#test_fraction=0.2\n禾\t称\t2\ttrain\n", encoding="utf-8"
    )
    with pytest.raises(DatasetFormatError):
        read_dataset(p)


def test_invalid_test_fraction():
    table = glyph_table({"称": ["禾", "尔"]})
    vocab = Vocabulary(chars=("称",))
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            build_glyph_dataset(table, vocab, seed=0, test_fraction=bad)
