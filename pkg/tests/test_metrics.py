"""Sentence-level detection/correction scoring."""

import numpy as np
import pytest

from cscprobe.metrics import (
    CorpusFormatError,
    MetricsReport,
    ScoredSentence,
    read_scored_corpus,
    score,
    write_scored_corpus,
)


def ss(sid, source, gold, predicted):
    return ScoredSentence(id=sid, source=source, gold=gold, predicted=predicted)


def test_perfect_predictor_all_ones():
    corpus = [
        ss("s1", "abc", "adc", "adc"),
        ss("s2", "xyz", "xaz", "xaz"),
    ]
    r = score(corpus)
    assert r.to_dict() == {
        "detection_precision": 1.0,
        "detection_recall": 1.0,
        "detection_f1": 1.0,
        "correction_precision": 1.0,
        "correction_recall": 1.0,
        "correction_f1": 1.0,
    }


def test_two_sentence_hand_example():
    # one perfectly corrected, one flagged at wrong positions; both have
    # gold errors -> detection P = 1/2, R = 1/2, F1 = 1/2
    corpus = [
        ss("s1", "abc", "adc", "adc"),
        ss("s2", "xyz", "xaz", "byz"),  # gold error at 1, prediction changes 0
    ]
    r = score(corpus)
    assert r.detection_precision == 0.5
    assert r.detection_recall == 0.5
    assert r.detection_f1 == 0.5
    assert r.correction_precision == 0.5
    assert r.correction_recall == 0.5
    assert r.correction_f1 == 0.5


def test_right_positions_wrong_characters():
    # flagged at exactly the gold positions but with the wrong replacement:
    # detection TP, not correction TP
    corpus = [ss("s1", "abc", "adc", "aec")]
    r = score(corpus)
    assert r.detection_f1 == 1.0
    assert r.correction_f1 == 0.0


def test_unflagged_sentences_not_in_precision_denominator():
    corpus = [
        ss("s1", "abc", "adc", "adc"),  # correct
        ss("s2", "xyz", "xaz", "xyz"),  # unflagged miss
    ]
    r = score(corpus)
    assert r.detection_precision == 1.0
    assert r.detection_recall == 0.5


def test_error_free_sentence_counts_as_false_positive_only():
    corpus = [
        ss("s1", "abc", "abc", "adc"),  # false flag on a clean sentence
        ss("s2", "xyz", "xaz", "xaz"),
    ]
    r = score(corpus)
    assert r.detection_precision == 0.5
    assert r.detection_recall == 1.0  # one gold-error sentence, recovered


def test_no_flags_zero_precision_and_f1():
    corpus = [ss("s1", "abc", "adc", "abc")]
    r = score(corpus)
    assert r.detection_precision == 0.0
    assert r.detection_recall == 0.0
    assert r.detection_f1 == 0.0
    assert r.correction_f1 == 0.0


def test_empty_and_errorless_corpora_rejected():
    with pytest.raises(ValueError):
        score([])
    with pytest.raises(ValueError):
        score([ss("s1", "abc", "abc", "abc")])


def test_duplicate_ids_rejected():
    corpus = [ss("s1", "abc", "adc", "adc"), ss("s1", "xyz", "xaz", "xaz")]
    with pytest.raises(CorpusFormatError):
        score(corpus)


def test_reorder_invariance():
    corpus = [
        ss("s1", "abc", "adc", "adc"),
        ss("s2", "xyz", "xaz", "byz"),
        ss("s3", "pqr", "pqr", "pqs"),
        ss("s4", "mno", "mxo", "mno"),
    ]
    assert score(corpus) == score(list(reversed(corpus)))


def test_correction_never_beats_detection_random_corpora():
    rng = np.random.default_rng(1)
    alphabet = "abcdefg"

    def mutate(text, p):
        out = list(text)
        for i in range(len(out)):
            if rng.random() < p:
                out[i] = alphabet[int(rng.integers(0, len(alphabet)))]
        return "".join(out)

    for trial in range(50):
        corpus = []
        for i in range(12):
            src = "".join(alphabet[int(j)] for j in rng.integers(0, len(alphabet), 6))
            corpus.append(ss(f"s{i}", src, mutate(src, 0.3), mutate(src, 0.3)))
        if all(s.gold == s.source for s in corpus):
            continue
        r = score(corpus)
        assert r.correction_f1 <= r.detection_f1 + 1e-12
        for v in r.to_dict().values():
            assert 0.0 <= v <= 1.0


def test_lengths_must_match():
    with pytest.raises(CorpusFormatError):
        ss("s1", "abc", "abcd", "abc")


def test_scored_file_round_trip(tmp_path):
    corpus = [ss("s1", "他程去", "他城去", "他城去")]
    p = tmp_path / "scored.tsv"
    write_scored_corpus(corpus, p)
    assert read_scored_corpus(p) == corpus
    p.write_text("s1\tabc\tadc\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError):
        read_scored_corpus(p)


def test_report_render():
    r = MetricsReport(1.0, 0.5, 2 / 3, 0.5, 0.25, 1 / 3)
    text = r.render()
    assert "detection" in text and "correction" in text
    assert "100.00" in text
