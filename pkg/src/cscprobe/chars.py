"""Ground-truth character knowledge: glyph decomposition, pinyin, vocabulary.

All three tables are immutable after load and safe for concurrent reads.

File formats (UTF-8, LF):
    decomposition   ``<char>\\t<comp1> <comp2> ...`` one record per line,
                    ``#``-prefixed comment lines ignored
    pinyin          ``<char>\\t<toned1>,<toned2>,...`` tones as trailing
                    digits 1-5 (``cheng1``); base form = digit stripped
    vocabulary      one character per line
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

logger = logging.getLogger(__name__)

_TONED_RE = re.compile(r"[a-z]+[1-5]?")


class TableFormatError(ValueError):
    """A knowledge-table file violates its line format."""


def _require_scalar(text, what, path, lineno):
    if len(text) != 1:
        raise TableFormatError(
            f"{path}:{lineno}: {what} must be a single character, got {text!r}"
        )
    return text


@dataclass(frozen=True)
class DecompositionTable:
    """Maps a character to the ordered sequence of its direct components.

    Characters without a decomposition are simply absent. A character never
    lists itself among its components.
    """

    entries: dict[str, tuple[str, ...]]

    def __post_init__(self):
        for char, comps in self.entries.items():
            if len(char) != 1:
                raise TableFormatError(f"key {char!r} is not a single character")
            if not comps:
                raise TableFormatError(f"{char!r} maps to an empty component sequence")
            for comp in comps:
                if len(comp) != 1:
                    raise TableFormatError(f"component {comp!r} of {char!r} is not a single character")
                if comp == char:
                    raise TableFormatError(f"{char!r} lists itself as a component")

    def __len__(self):
        return len(self.entries)

    def __contains__(self, char):
        return char in self.entries

    def components_of(self, char: str) -> tuple[str, ...]:
        """Stored component sequence, or () when ``char`` is absent."""
        return self.entries.get(char, ())

    def component_set(self) -> tuple[str, ...]:
        """All distinct components across the table, sorted by codepoint."""
        seen = set()
        for comps in self.entries.values():
            seen.update(comps)
        return tuple(sorted(seen))


def load_decomposition(path) -> DecompositionTable:
    entries: dict[str, tuple[str, ...]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise TableFormatError(
                    f"{path}:{lineno}: expected '<char>\\t<components>', "
                    f"got {len(fields)} tab-separated fields"
                )
            char = _require_scalar(fields[0], "key", path, lineno)
            comps = fields[1].split()
            if not comps:
                raise TableFormatError(f"{path}:{lineno}: no components listed")
            for comp in comps:
                _require_scalar(comp, "component", path, lineno)
                if comp == char:
                    raise TableFormatError(
                        f"{path}:{lineno}: {char!r} lists itself as a component"
                    )
            if char in entries:
                raise TableFormatError(f"{path}:{lineno}: duplicate key {char!r}")
            entries[char] = tuple(comps)
    logger.info("loaded %d decomposition entries from %s", len(entries), path)
    return DecompositionTable(entries)


def components_of(table: DecompositionTable, char: str) -> tuple[str, ...]:
    return table.components_of(char)


@dataclass(frozen=True)
class PinyinTable:
    """Maps a character to its toned syllables and tone-stripped base forms."""

    toned: dict[str, tuple[str, ...]]
    base: dict[str, frozenset[str]]

    def __len__(self):
        return len(self.toned)

    def __contains__(self, char):
        return char in self.toned

    def chars(self) -> tuple[str, ...]:
        """All characters in the table, sorted by codepoint."""
        return tuple(sorted(self.toned))


def strip_tone(form: str) -> str:
    return form[:-1] if form and form[-1] in "12345" else form


def load_pinyin(path) -> PinyinTable:
    toned: dict[str, tuple[str, ...]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise TableFormatError(
                    f"{path}:{lineno}: expected '<char>\\t<toned,...>', "
                    f"got {len(fields)} tab-separated fields"
                )
            char = _require_scalar(fields[0], "key", path, lineno)
            forms = fields[1].split(",")
            if not forms or any(not f for f in forms):
                raise TableFormatError(f"{path}:{lineno}: empty syllable")
            for form in forms:
                if not _TONED_RE.fullmatch(form):
                    raise TableFormatError(
                        f"{path}:{lineno}: bad syllable {form!r} "
                        "(want lowercase latin with optional trailing tone 1-5)"
                    )
            if char in toned:
                raise TableFormatError(f"{path}:{lineno}: duplicate key {char!r}")
            toned[char] = tuple(forms)
    base = {c: frozenset(strip_tone(f) for f in forms) for c, forms in toned.items()}
    logger.info("loaded %d pinyin entries from %s", len(toned), path)
    return PinyinTable(toned=toned, base=base)


def same_phonetic(table: PinyinTable, a: str, b: str, tone_sensitive: bool = False) -> bool:
    """True iff the pronunciation sets of ``a`` and ``b`` intersect.

    Tone-insensitive by default: characters sharing a base syllable in any
    tone count as same-phonetic. ``tone_sensitive=True`` compares the toned
    forms instead. Raises ``KeyError`` naming any character absent from the
    table.
    """
    for c in (a, b):
        if c not in table.toned:
            raise KeyError(f"character {c!r} not in pinyin table")
    if tone_sensitive:
        return bool(set(table.toned[a]) & set(table.toned[b]))
    return bool(table.base[a] & table.base[b])


@dataclass(frozen=True)
class Vocabulary:
    """Ordered, duplicate-free character set under probe. Iteration follows
    file order."""

    chars: tuple[str, ...]

    def __len__(self):
        return len(self.chars)

    def __iter__(self):
        return iter(self.chars)

    def __contains__(self, char):
        return char in set(self.chars)


def load_vocabulary(path, stop_chars=()) -> Vocabulary:
    """Load one character per line; ``stop_chars`` are dropped silently."""
    stop = set(stop_chars)
    chars: list[str] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            char = _require_scalar(line, "vocabulary entry", path, lineno)
            if char in seen:
                raise TableFormatError(f"{path}:{lineno}: duplicate character {char!r}")
            seen.add(char)
            if char in stop:
                continue
            chars.append(char)
    logger.info("loaded %d vocabulary characters from %s", len(chars), path)
    return Vocabulary(tuple(chars))


def load_stoplist(path) -> frozenset[str]:
    """Stop-list file: same one-character-per-line layout as a vocabulary."""
    chars: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            chars.add(_require_scalar(line, "stop-list entry", path, lineno))
    return frozenset(chars)
