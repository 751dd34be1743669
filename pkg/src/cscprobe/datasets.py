"""Balanced, character-disjoint probe datasets for glyph and phonetic relations.

A dataset is a list of labeled (left, right) character pairs. For the glyph
kind, ``left`` is a candidate component of the probed character ``right``;
for the phonetic kind, ``left`` is a candidate homophone. Positives and
negatives are balanced one-to-one, and the train/test split partitions the
*right* characters so the probe can never memorize a probed character across
the split boundary (left characters may recur; the validation report counts
them).

Builders are pure functions of (tables, vocabulary, seed): rebuilding with
the same inputs yields a byte-identical dataset file. Pair order in the
final dataset is canonical: sorted by right codepoint, then left, then label.

Dataset file layout (UTF-8, LF):

    #kind=glyph|phonetic
    #seed=<n>
    #test_fraction=<x>
    <left>\\t<right>\\t<0|1>\\t<train|test>
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .chars import DecompositionTable, PinyinTable, Vocabulary, same_phonetic

logger = logging.getLogger(__name__)

KINDS = ("glyph", "phonetic")
SPLITS = ("train", "test")


class DatasetFormatError(ValueError):
    """A dataset file violates the header/line format."""


@dataclass(frozen=True)
class ProbePair:
    left: str
    right: str
    label: int  # 1 = positive
    split: str  # train | test


@dataclass(frozen=True)
class ProbeDataset:
    kind: str
    pairs: tuple[ProbePair, ...]
    seed: int
    test_fraction: float

    def split_pairs(self, split: str) -> tuple[ProbePair, ...]:
        return tuple(p for p in self.pairs if p.split == split)

    def characters(self) -> tuple[str, ...]:
        """Every character the dataset mentions, sorted, deduped."""
        seen = {c for p in self.pairs for c in (p.left, p.right)}
        return tuple(sorted(seen))


def _canonical(pairs: list[ProbePair]) -> tuple[ProbePair, ...]:
    return tuple(sorted(pairs, key=lambda p: (ord(p.right), ord(p.left), p.label)))


def _assign_splits(rights: list[str], rng: np.random.Generator, test_fraction: float):
    """Partition right-characters (1 - test_fraction):test_fraction, seeded."""
    perm = rng.permutation(len(rights))
    n_test = int(round(test_fraction * len(rights)))
    test_rights = {rights[i] for i in perm[:n_test]}
    return lambda right: "test" if right in test_rights else "train"


def _check_fraction(test_fraction: float):
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0,1), got {test_fraction}")


def build_glyph_dataset(
    decomp: DecompositionTable,
    vocab: Vocabulary,
    seed: int,
    test_fraction: float = 0.2,
) -> ProbeDataset:
    """Component-containment pairs over the vocabulary.

    For each vocabulary character ``w`` with distinct components u_1..u_k:
    k positives (u_j, w) and k negatives (u, w) with ``u`` drawn seeded and
    uniformly from the table-wide component set minus w's own components.
    Negatives are drawn without replacement when the eligible pool allows,
    with replacement otherwise (tiny pools only). Characters without a
    decomposition entry are skipped and counted, not errors.
    """
    _check_fraction(test_fraction)
    rng = np.random.default_rng(seed)
    universe = decomp.component_set()
    pairs: list[ProbePair] = []
    per_right: dict[str, list[tuple[str, str, int]]] = {}
    skipped_no_entry = 0
    skipped_no_negative = 0
    for w in sorted(vocab.chars):
        comps = list(dict.fromkeys(decomp.components_of(w)))
        if not comps:
            skipped_no_entry += 1
            continue
        comp_set = set(comps)
        pool = [u for u in universe if u not in comp_set and u != w]
        if not pool:
            skipped_no_negative += 1
            continue
        k = len(comps)
        replace = len(pool) < k
        neg_idx = rng.choice(len(pool), size=k, replace=replace)
        triples = [(u, w, 1) for u in comps]
        triples += [(pool[i], w, 0) for i in neg_idx]
        per_right[w] = triples
    if not per_right:
        raise ValueError("empty dataset: no vocabulary character has a usable decomposition")
    if skipped_no_entry or skipped_no_negative:
        logger.info(
            "glyph builder skipped %d characters without decomposition, "
            "%d without an eligible negative component",
            skipped_no_entry,
            skipped_no_negative,
        )
    rights = sorted(per_right)
    split_of = _assign_splits(rights, rng, test_fraction)
    for w, triples in per_right.items():
        split = split_of(w)
        pairs.extend(ProbePair(left, right, label, split) for left, right, label in triples)
    return ProbeDataset("glyph", _canonical(pairs), seed, test_fraction)


def build_phonetic_dataset(
    pinyin: PinyinTable,
    vocab: Vocabulary,
    seed: int,
    test_fraction: float = 0.2,
    tone_sensitive: bool = False,
) -> ProbeDataset:
    """Shared-pronunciation pairs over the vocabulary.

    For each vocabulary character ``w`` in the pinyin table that has at
    least one same-phonetic partner and one different-phonetic partner
    among the table's characters, draws (seeded, uniform) one positive and
    one negative partner. Characters failing either condition are skipped
    and counted.
    """
    _check_fraction(test_fraction)
    rng = np.random.default_rng(seed)
    all_chars = tuple(sorted(pinyin.toned))
    pos_of = {c: i for i, c in enumerate(all_chars)}
    forms = pinyin.toned if tone_sensitive else pinyin.base
    groups: dict[str, list[int]] = {}
    for c, syls in forms.items():
        for s in set(syls):
            groups.setdefault(s, []).append(pos_of[c])
    n = len(all_chars)
    pairs: list[ProbePair] = []
    per_right: dict[str, list[tuple[str, str, int]]] = {}
    skipped_missing = 0
    skipped_unpaired = 0
    for w in sorted(vocab.chars):
        if w not in pinyin.toned:
            skipped_missing += 1
            continue
        mask = np.zeros(n, dtype=bool)
        for s in set(forms[w]):
            mask[groups[s]] = True
        same = np.flatnonzero(mask)
        same = same[same != pos_of[w]]
        diff = np.flatnonzero(~mask)
        if len(same) == 0 or len(diff) == 0:
            skipped_unpaired += 1
            continue
        u = all_chars[same[rng.integers(len(same))]]
        s = all_chars[diff[rng.integers(len(diff))]]
        per_right[w] = [(u, w, 1), (s, w, 0)]
    if not per_right:
        raise ValueError("empty dataset: no vocabulary character has a same-phonetic partner")
    if skipped_missing or skipped_unpaired:
        logger.info(
            "phonetic builder skipped %d characters without pinyin, "
            "%d without both partner kinds",
            skipped_missing,
            skipped_unpaired,
        )
    rights = sorted(per_right)
    split_of = _assign_splits(rights, rng, test_fraction)
    for w, triples in per_right.items():
        split = split_of(w)
        pairs.extend(ProbePair(left, right, label, split) for left, right, label in triples)
    return ProbeDataset("phonetic", _canonical(pairs), seed, test_fraction)


@dataclass(frozen=True)
class ValidationReport:
    kind: str
    n_pairs: int
    n_positive: int
    n_negative: int
    split_violations: tuple[str, ...]  # right chars seen in both splits
    label_violations: tuple[tuple[str, str, int], ...]  # (left, right, label)
    duplicate_triples: int  # informational
    left_in_both_splits: int  # informational: lefts recurring across splits

    @property
    def balanced(self) -> bool:
        return self.n_positive == self.n_negative

    @property
    def valid(self) -> bool:
        return self.balanced and not self.split_violations and not self.label_violations

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n_pairs": self.n_pairs,
            "n_positive": self.n_positive,
            "n_negative": self.n_negative,
            "balanced": self.balanced,
            "split_violations": list(self.split_violations),
            "label_violations": [list(v) for v in self.label_violations],
            "duplicate_triples": self.duplicate_triples,
            "left_in_both_splits": self.left_in_both_splits,
            "valid": self.valid,
        }


def validate_dataset(ds: ProbeDataset, table, tone_sensitive: bool = False) -> ValidationReport:
    """Re-check a dataset against its ground-truth table. Report-only.

    ``table`` is a :class:`DecompositionTable` for glyph datasets or a
    :class:`PinyinTable` for phonetic ones; ``tone_sensitive`` must match
    the setting the phonetic dataset was built with. Each pair's label is
    re-derived from the table; pairs whose label cannot be verified
    (character missing from the table) count as label violations.
    """
    rights_by_split: dict[str, set[str]] = {"train": set(), "test": set()}
    lefts_by_split: dict[str, set[str]] = {"train": set(), "test": set()}
    label_violations: list[tuple[str, str, int]] = []
    triples_seen: dict[tuple[str, str, int], int] = {}
    n_pos = n_neg = 0
    for p in ds.pairs:
        rights_by_split[p.split].add(p.right)
        lefts_by_split[p.split].add(p.left)
        if p.label == 1:
            n_pos += 1
        else:
            n_neg += 1
        triples_seen[(p.left, p.right, p.label)] = (
            triples_seen.get((p.left, p.right, p.label), 0) + 1
        )
        if ds.kind == "glyph":
            truth = p.left in table.components_of(p.right)
        else:
            try:
                truth = same_phonetic(table, p.left, p.right, tone_sensitive=tone_sensitive)
            except KeyError:
                truth = None
        if truth is None or truth != bool(p.label):
            label_violations.append((p.left, p.right, p.label))
    split_violations = tuple(sorted(rights_by_split["train"] & rights_by_split["test"]))
    dupes = sum(c - 1 for c in triples_seen.values() if c > 1)
    left_overlap = len(lefts_by_split["train"] & lefts_by_split["test"])
    return ValidationReport(
        kind=ds.kind,
        n_pairs=len(ds.pairs),
        n_positive=n_pos,
        n_negative=n_neg,
        split_violations=split_violations,
        label_violations=tuple(label_violations),
        duplicate_triples=dupes,
        left_in_both_splits=left_overlap,
    )


def write_dataset(ds: ProbeDataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#kind={ds.kind}\n")
        fh.write(f"#seed={ds.seed}\n")
        fh.write(f"#test_fraction={ds.test_fraction!r}\n")
        for p in ds.pairs:
            fh.write(f"{p.left}\t{p.right}\t{p.label}\t{p.split}\n")


def read_dataset(path) -> ProbeDataset:
    header: dict[str, str] = {}
    pairs: list[ProbePair] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                header[key] = value
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise DatasetFormatError(f"{path}:{lineno}: want 4 tab-separated fields")
            left, right, label, split = fields
            if len(left) != 1 or len(right) != 1:
                raise DatasetFormatError(f"{path}:{lineno}: non-scalar character")
            if label not in ("0", "1"):
                raise DatasetFormatError(f"{path}:{lineno}: label must be 0 or 1")
            if split not in SPLITS:
                raise DatasetFormatError(f"{path}:{lineno}: split must be train or test")
            pairs.append(ProbePair(left, right, int(label), split))
    for key in ("kind", "seed", "test_fraction"):
        if key not in header:
            raise DatasetFormatError(f"{path}: missing #{key}= header")
    if header["kind"] not in KINDS:
        raise DatasetFormatError(f"{path}: unknown kind {header['kind']!r}")
    return ProbeDataset(
        kind=header["kind"],
        pairs=tuple(pairs),
        seed=int(header["seed"]),
        test_fraction=float(header["test_fraction"]),
    )
