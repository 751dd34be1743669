"""Decomposition, pinyin, and vocabulary table loading."""

import pytest

from cscprobe.chars import (
    DecompositionTable,
    TableFormatError,
    components_of,
    load_decomposition,
    load_pinyin,
    load_stoplist,
    load_vocabulary,
    same_phonetic,
    strip_tone,
)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_decomposition_basic(tmp_path):
    p = write(tmp_path, "d.tsv", "称\t禾 尔\n彦\t产 彡\n")
    table = load_decomposition(p)
    assert table.components_of("称") == ("禾", "尔")
    assert table.components_of("彦") == ("产", "彡")
    assert len(table.entries) == 2


def test_load_decomposition_comments_and_blank_lines(tmp_path):
    p = write(tmp_path, "d.tsv", "# header\n\n称\t禾 尔\n\n")
    table = load_decomposition(p)
    assert len(table.entries) == 1


def test_empty_decomposition_file(tmp_path):
    table = load_decomposition(write(tmp_path, "d.tsv", ""))
    assert table.entries == {}


def test_components_of_absent_is_empty(tmp_path):
    table = load_decomposition(write(tmp_path, "d.tsv", "称\t禾 尔\n"))
    assert table.components_of("禾") == ()
    assert components_of(table, "产") == ()


def test_decomposition_self_component_rejected(tmp_path):
    p = write(tmp_path, "d.tsv", "禾\t禾\n")
    with pytest.raises(TableFormatError):
        load_decomposition(p)


def test_decomposition_duplicate_key_rejected(tmp_path):
    p = write(tmp_path, "d.tsv", "称\t禾 尔\n称\t禾\n")
    with pytest.raises(TableFormatError):
        load_decomposition(p)


def test_decomposition_multi_scalar_key_rejected(tmp_path):
    p = write(tmp_path, "d.tsv", "称呼\t禾 尔\n")
    with pytest.raises(TableFormatError) as err:
        load_decomposition(p)
    assert ":1" in str(err.value)  # line number reported


def test_decomposition_wrong_field_count_rejected(tmp_path):
    p = write(tmp_path, "d.tsv", "称\t禾 尔\tjunk\n")
    with pytest.raises(TableFormatError):
        load_decomposition(p)


def test_decomposition_empty_components_rejected(tmp_path):
    p = write(tmp_path, "d.tsv", "称\t\n")
    with pytest.raises(TableFormatError):
        load_decomposition(p)


def test_component_set_is_sorted_union(tmp_path):
    p = write(tmp_path, "d.tsv", "称\t禾 尔\n彦\t产 彡\n")
    table = load_decomposition(p)
    assert table.component_set() == tuple(sorted({"禾", "尔", "产", "彡"}))


def test_strip_tone():
    assert strip_tone("cheng1") == "cheng"
    assert strip_tone("cheng") == "cheng"
    assert strip_tone("lv3") == "lv"


def test_load_pinyin_and_same_phonetic(tmp_path):
    p = write(tmp_path, "p.tsv", "称\tcheng1,chen4\n程\tcheng2\n产\tchan3\n")
    table = load_pinyin(p)
    # tone-insensitive syllable match: cheng1 vs cheng2
    assert same_phonetic(table, "称", "程") is True
    assert same_phonetic(table, "称", "产") is False
    # reflexive and symmetric
    assert same_phonetic(table, "程", "程") is True
    assert same_phonetic(table, "程", "称") is True


def test_same_phonetic_tone_sensitive(tmp_path):
    p = write(tmp_path, "p.tsv", "称\tcheng1\n程\tcheng2\n城\tcheng2\n")
    table = load_pinyin(p)
    assert same_phonetic(table, "称", "程", tone_sensitive=True) is False
    assert same_phonetic(table, "城", "程", tone_sensitive=True) is True


def test_same_phonetic_absent_char_names_it(tmp_path):
    table = load_pinyin(write(tmp_path, "p.tsv", "称\tcheng1\n"))
    with pytest.raises(KeyError) as err:
        same_phonetic(table, "称", "程")
    assert "程" in str(err.value)


def test_pinyin_polyphone_base_forms(tmp_path):
    table = load_pinyin(write(tmp_path, "p.tsv", "行\txing2,hang2\n杭\thang2\n"))
    assert same_phonetic(table, "行", "杭") is True


def test_pinyin_duplicate_key_rejected(tmp_path):
    p = write(tmp_path, "p.tsv", "称\tcheng1\n称\tchen4\n")
    with pytest.raises(TableFormatError):
        load_pinyin(p)


def test_pinyin_bad_syllable_rejected(tmp_path):
    with pytest.raises(TableFormatError):
        load_pinyin(write(tmp_path, "p.tsv", "称\tChEng9\n"))
    with pytest.raises(TableFormatError):
        load_pinyin(write(tmp_path, "p.tsv", "称\t\n"))


def test_vocabulary_order_and_duplicates(tmp_path):
    vocab = load_vocabulary(write(tmp_path, "v.txt", "称\n程\n产\n"))
    assert vocab.chars == ("称", "程", "产")
    with pytest.raises(TableFormatError):
        load_vocabulary(write(tmp_path, "v2.txt", "称\n称\n"))


def test_vocabulary_stoplist(tmp_path):
    stop = load_stoplist(write(tmp_path, "s.txt", "程\n"))
    vocab = load_vocabulary(write(tmp_path, "v.txt", "称\n程\n产\n"), stop_chars=stop)
    assert vocab.chars == ("称", "产")


def test_vocabulary_multi_scalar_line_rejected(tmp_path):
    with pytest.raises(TableFormatError):
        load_vocabulary(write(tmp_path, "v.txt", "称呼\n"))


def test_table_reload_identical(tmp_path):
    p = write(tmp_path, "d.tsv", "称\t禾 尔\n彦\t产 彡\n")
    assert load_decomposition(p) == load_decomposition(p)
    q = write(tmp_path, "p.tsv", "称\tcheng1,chen4\n")
    assert load_pinyin(q) == load_pinyin(q)


def test_decomposition_table_direct_construction_validates():
    with pytest.raises(ValueError):
        DecompositionTable(entries={"称": ()})
    with pytest.raises(ValueError):
        DecompositionTable(entries={"称": ("称",)})
