#!/usr/bin/env python3
"""Load character knowledge tables and query glyph/phonetic relations.

Builds tiny decomposition and pinyin tables in a scratch directory, then
walks through the queries the probe builders rely on: which components a
character contains, and which characters sound alike once tones are
stripped.
"""

import tempfile
from pathlib import Path

from cscprobe.chars import (
    load_decomposition,
    load_pinyin,
    load_vocabulary,
    same_phonetic,
    strip_tone,
)

DECOMP = """\
# character <tab> space-separated components
称\t禾 尔
程\t禾 口 王
城\t土 成
彦\t产 彡
"""

PINYIN = """\
称\tcheng1,chen4
程\tcheng2
城\tcheng2
产\tchan3
"""

VOCAB = "称\n程\n城\n彦\n"


def main():
    scratch = Path(tempfile.mkdtemp(prefix="cscprobe_demo_"))
    (scratch / "decomp.tsv").write_text(DECOMP, encoding="utf-8")
    (scratch / "pinyin.tsv").write_text(PINYIN, encoding="utf-8")
    (scratch / "vocab.txt").write_text(VOCAB, encoding="utf-8")

    decomp = load_decomposition(scratch / "decomp.tsv")
    pinyin = load_pinyin(scratch / "pinyin.tsv")
    vocab = load_vocabulary(scratch / "vocab.txt")

    print("== glyph relation (component containment) ==")
    for char in vocab.chars:
        comps = decomp.components_of(char)
        print(f"  {char} -> {' '.join(comps) if comps else '(no decomposition entry)'}")
    print(f"  component universe: {' '.join(decomp.component_set())}")

    print("\n== phonetic relation (tone-stripped syllable match) ==")
    for forms in ("cheng1", "cheng2", "chan3"):
        print(f"  {forms} strips to {strip_tone(forms)}")
    probes = [("称", "程"), ("称", "产"), ("城", "程")]
    for a, b in probes:
        verdict = "same" if same_phonetic(pinyin, a, b) else "different"
        toned = "same" if same_phonetic(pinyin, a, b, tone_sensitive=True) else "different"
        print(f"  {a} vs {b}: {verdict} phonetic (tone-insensitive), {toned} with tones")

    print(f"\nscratch files in {scratch}")


if __name__ == "__main__":
    main()
