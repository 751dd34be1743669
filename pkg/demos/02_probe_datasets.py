#!/usr/bin/env python3
"""Build balanced glyph and phonetic probe datasets from synthetic tables.

Generates a few hundred synthetic characters with random decompositions
and pronunciations, builds both probe datasets, and prints the balance and
split-disjointness evidence from the validation report. The right-hand
(probed) characters never straddle the train/test boundary, so a probe can
only succeed by reading the relation out of the embeddings.
"""

import numpy as np

from cscprobe.chars import DecompositionTable, PinyinTable, Vocabulary
from cscprobe.datasets import (
    build_glyph_dataset,
    build_phonetic_dataset,
    validate_dataset,
)

SYLLABLES = ["cheng", "chan", "wang", "li", "zhang", "shi", "ming", "hua"]


def synthetic_tables(n_chars=300, n_components=60, seed=0):
    rng = np.random.default_rng(seed)
    components = [chr(0x2F00 + i) for i in range(n_components)]
    chars = [chr(0x4E00 + i) for i in range(n_chars)]
    decomp_entries = {}
    pinyin_entries = {}
    for c in chars:
        k = int(rng.integers(1, 4))
        picks = rng.choice(n_components, size=k, replace=False)
        decomp_entries[c] = tuple(components[int(i)] for i in picks)
        syl = SYLLABLES[int(rng.integers(0, len(SYLLABLES)))]
        tone = int(rng.integers(1, 6))
        pinyin_entries[c] = (f"{syl}{tone}",)
    decomp = DecompositionTable(entries=decomp_entries)
    pinyin = PinyinTable(
        toned=pinyin_entries,
        base={c: frozenset(f.rstrip("12345") for f in forms) for c, forms in pinyin_entries.items()},
    )
    return decomp, pinyin, Vocabulary(chars=tuple(chars))


def describe(name, ds, report):
    train = ds.split_pairs("train")
    test = ds.split_pairs("test")
    print(f"== {name} dataset ==")
    print(f"  pairs: {report.n_pairs} ({report.n_positive} positive, {report.n_negative} negative)")
    print(f"  split: {len(train)} train / {len(test)} test")
    train_rights = {p.right for p in train}
    test_rights = {p.right for p in test}
    print(f"  probed characters: {len(train_rights)} train, {len(test_rights)} test, "
          f"{len(train_rights & test_rights)} shared (must be 0)")
    print(f"  label violations: {len(report.label_violations)}, valid: {report.valid}")


def main():
    decomp, pinyin, vocab = synthetic_tables()
    glyph = build_glyph_dataset(decomp, vocab, seed=42)
    describe("glyph", glyph, validate_dataset(glyph, decomp))
    print()
    phonetic = build_phonetic_dataset(pinyin, vocab, seed=42)
    describe("phonetic", phonetic, validate_dataset(phonetic, pinyin))
    print("\nsample glyph pairs (left, probed, label, split):")
    for p in glyph.pairs[:6]:
        print(f"  {p.left}  {p.right}  {p.label}  {p.split}")


if __name__ == "__main__":
    main()
