"""Leakage isolation for spell-checking corpora.

A correction pair is the (wrong character, right character) type at a
position where a source sentence and its corrected target disagree. When
the same pair type occurs in both the training and the test corpus, a model
can score on the test set by memorizing the pair rather than understanding
the sentence. :func:`isolate` removes that route:

- every training sentence containing an overlapping pair type is dropped
  whole (sentences are never edited, the text must stay natural);
- the test corpus is deduplicated at pair-type granularity: a test sentence
  is kept only if none of its pair types occurred in an earlier retained
  test sentence.

The operation is idempotent and only ever shrinks the corpora.
"""

from __future__ import annotations

from dataclasses import dataclass

CORPUS_COLUMNS = 3


class CorpusFormatError(ValueError):
    """A corpus line or sentence pair violates the format."""


@dataclass(frozen=True)
class SentencePair:
    id: str
    source: str
    target: str

    def __post_init__(self):
        if not self.id:
            raise CorpusFormatError("sentence id must be nonempty")
        if len(self.source) != len(self.target):
            raise CorpusFormatError(
                f"sentence {self.id}: source length {len(self.source)} != "
                f"target length {len(self.target)}"
            )


@dataclass(frozen=True, order=True)
class CorrectionPair:
    wrong: str
    right: str

    def __post_init__(self):
        if self.wrong == self.right:
            raise ValueError(f"correction pair maps {self.wrong!r} to itself")


def extract_pairs(sp: SentencePair) -> list[CorrectionPair]:
    """One pair per differing position, in position order, duplicates kept."""
    return [
        CorrectionPair(wrong=s, right=t)
        for s, t in zip(sp.source, sp.target)
        if s != t
    ]


@dataclass(frozen=True)
class IsolationStats:
    train_pair_count: int
    test_pair_count: int
    overlap_pair_count: int
    union_pair_count: int
    isolated_train_pair_count: int
    isolated_train_sentence_count: int
    isolated_test_sentence_count: int
    removed_fraction: float
    train_sentence_count: int  # before isolation, informational
    test_sentence_count: int

    def to_dict(self) -> dict:
        return {
            "train_pair_count": self.train_pair_count,
            "test_pair_count": self.test_pair_count,
            "overlap_pair_count": self.overlap_pair_count,
            "union_pair_count": self.union_pair_count,
            "isolated_train_pair_count": self.isolated_train_pair_count,
            "isolated_train_sentence_count": self.isolated_train_sentence_count,
            "isolated_test_sentence_count": self.isolated_test_sentence_count,
            "removed_fraction": self.removed_fraction,
            "train_sentence_count": self.train_sentence_count,
            "test_sentence_count": self.test_sentence_count,
        }

    def render(self) -> str:
        rows = [
            ("distinct train pairs", f"{self.train_pair_count}"),
            ("distinct test pairs", f"{self.test_pair_count}"),
            ("overlapping pairs", f"{self.overlap_pair_count}"),
            ("union of pairs", f"{self.union_pair_count}"),
            ("train pairs after isolation", f"{self.isolated_train_pair_count}"),
            ("train sentences", f"{self.train_sentence_count} -> {self.isolated_train_sentence_count}"),
            ("test sentences", f"{self.test_sentence_count} -> {self.isolated_test_sentence_count}"),
            ("train sentences removed", f"{self.removed_fraction * 100.0:.3f}%"),
        ]
        width = max(len(label) for label, _ in rows)
        return "\n".join(f"{label.ljust(width)}  {value}" for label, value in rows)


def distinct_pairs(sentences) -> set[CorrectionPair]:
    out: set[CorrectionPair] = set()
    for sp in sentences:
        out.update(extract_pairs(sp))
    return out


def isolate(train, test) -> tuple[list[SentencePair], list[SentencePair], IsolationStats]:
    """Remove train/test pair overlap and test duplicates; report counts.

    Pair counts in the stats are distinct pair types; the removed fraction
    is the share of training sentences dropped.
    """
    train = list(train)
    test = list(test)
    train_pairs = distinct_pairs(train)
    test_pairs = distinct_pairs(test)
    overlap = train_pairs & test_pairs

    isolated_train = [
        sp for sp in train if not any(p in overlap for p in extract_pairs(sp))
    ]

    deduped_test: list[SentencePair] = []
    seen: set[CorrectionPair] = set()
    for sp in test:
        pairs = extract_pairs(sp)
        if any(p in seen for p in pairs):
            continue
        seen.update(pairs)
        deduped_test.append(sp)

    removed = 1.0 - len(isolated_train) / len(train) if train else 0.0
    stats = IsolationStats(
        train_pair_count=len(train_pairs),
        test_pair_count=len(test_pairs),
        overlap_pair_count=len(overlap),
        union_pair_count=len(train_pairs | test_pairs),
        isolated_train_pair_count=len(distinct_pairs(isolated_train)),
        isolated_train_sentence_count=len(isolated_train),
        isolated_test_sentence_count=len(deduped_test),
        removed_fraction=removed,
        train_sentence_count=len(train),
        test_sentence_count=len(test),
    )
    return isolated_train, deduped_test, stats


def read_corpus(path) -> list[SentencePair]:
    """TSV, one `<id>\\t<source>\\t<target>` per line; # starts a comment."""
    out: list[SentencePair] = []
    seen_ids: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != CORPUS_COLUMNS:
                raise CorpusFormatError(
                    f"{path}:{lineno}: expected {CORPUS_COLUMNS} tab-separated "
                    f"fields, got {len(fields)}"
                )
            sid, source, target = fields
            if sid in seen_ids:
                raise CorpusFormatError(f"{path}:{lineno}: duplicate sentence id {sid!r}")
            seen_ids.add(sid)
            try:
                out.append(SentencePair(id=sid, source=source, target=target))
            except CorpusFormatError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: {exc}") from exc
    return out


def write_corpus(sentences, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sp in sentences:
            fh.write(f"{sp.id}\t{sp.source}\t{sp.target}\n")
