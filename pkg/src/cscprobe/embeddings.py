"""Frozen character-embedding tables.

Canonical storage is a little-endian binary file:

    magic  b"CEMB"
    u16    format version (= 1)
    u32    entry count
    u32    dimension (>= 1)
    per entry, sorted strictly by codepoint:
        u8      UTF-8 byte length of the character
        bytes   the character
        f32[d]  the vector
    u32    CRC32 of all preceding bytes

Vectors are stored in 32-bit precision; consumers doing arithmetic get
64-bit copies via :meth:`EmbeddingTable.matrix64`. A TSV import path
(``<char>\\t<v1> <v2> ...``) exists for interchange; binary is canonical.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from .chars import Vocabulary

MAGIC = b"CEMB"
VERSION = 1


class EmbeddingFormatError(ValueError):
    """Embedding file is malformed, truncated, or fails its checksum."""


@dataclass
class EmbeddingTable:
    """Ordered character -> vector mapping with a fixed dimension.

    Lookup of an absent character raises ``KeyError``; there is no silent
    zero-vector fallback.
    """

    dim: int
    chars: tuple[str, ...]
    vectors: np.ndarray  # (n, dim) float32
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise EmbeddingFormatError("dim must be positive")
        if self.vectors.shape != (len(self.chars), self.dim):
            raise EmbeddingFormatError(
                f"vector block has shape {self.vectors.shape}, "
                f"want {(len(self.chars), self.dim)}"
            )
        if not np.isfinite(self.vectors).all():
            raise EmbeddingFormatError("non-finite vector payload")
        self._index = {}
        for i, c in enumerate(self.chars):
            if len(c) != 1:
                raise EmbeddingFormatError(f"key {c!r} is not a single character")
            if c in self._index:
                raise EmbeddingFormatError(f"duplicate character {c!r}")
            self._index[c] = i

    def __len__(self):
        return len(self.chars)

    def __contains__(self, char):
        return char in self._index

    def vector(self, char: str) -> np.ndarray:
        """Stored float32 vector for ``char``; KeyError when absent."""
        return self.vectors[self._index[char]]

    def matrix64(self, chars) -> np.ndarray:
        """Rows for ``chars`` as float64, for 64-bit arithmetic downstream."""
        idx = [self._index[c] for c in chars]
        return self.vectors[idx].astype(np.float64)

    def missing(self, chars) -> tuple[str, ...]:
        """Characters from ``chars`` absent from the table, sorted, deduped."""
        return tuple(sorted({c for c in chars if c not in self._index}))


def _canonical_order(chars, vectors):
    order = sorted(range(len(chars)), key=lambda i: ord(chars[i]))
    return tuple(chars[i] for i in order), vectors[order] if len(order) else vectors


def write_embeddings(table: EmbeddingTable, path) -> None:
    """Serialize in canonical byte layout (entries sorted by codepoint)."""
    chars, vectors = _canonical_order(table.chars, table.vectors)
    out = bytearray()
    out += MAGIC
    out += struct.pack("<HII", VERSION, len(chars), table.dim)
    for char, vec in zip(chars, vectors):
        raw = char.encode("utf-8")
        out += struct.pack("<B", len(raw))
        out += raw
        out += vec.astype("<f4", copy=False).tobytes()
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    with open(path, "wb") as fh:
        fh.write(bytes(out))


def read_embeddings(path) -> EmbeddingTable:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4 + 2 + 4 + 4 + 4:
        raise EmbeddingFormatError(f"{path}: truncated file")
    if data[:4] != MAGIC:
        raise EmbeddingFormatError(f"{path}: bad magic {data[:4]!r}")
    (stored_crc,) = struct.unpack("<I", data[-4:])
    if zlib.crc32(data[:-4]) & 0xFFFFFFFF != stored_crc:
        raise EmbeddingFormatError(f"{path}: CRC32 mismatch")
    body = data[:-4]
    off = 4
    version, count, dim = struct.unpack_from("<HII", body, off)
    off += 10
    if version != VERSION:
        raise EmbeddingFormatError(f"{path}: unsupported version {version}")
    if dim == 0:
        raise EmbeddingFormatError(f"{path}: dim must be positive")
    chars: list[str] = []
    vectors = np.empty((count, dim), dtype=np.float32)
    vec_bytes = 4 * dim
    prev_cp = -1
    for i in range(count):
        if off + 1 > len(body):
            raise EmbeddingFormatError(f"{path}: truncated at entry {i}")
        blen = body[off]
        off += 1
        if off + blen + vec_bytes > len(body):
            raise EmbeddingFormatError(f"{path}: truncated at entry {i}")
        try:
            char = body[off : off + blen].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EmbeddingFormatError(f"{path}: bad UTF-8 at entry {i}") from exc
        off += blen
        if len(char) != 1:
            raise EmbeddingFormatError(f"{path}: entry {i} key {char!r} is not one character")
        if ord(char) <= prev_cp:
            raise EmbeddingFormatError(
                f"{path}: entries not in strictly increasing codepoint order at {char!r}"
            )
        prev_cp = ord(char)
        vectors[i] = np.frombuffer(body, dtype="<f4", count=dim, offset=off)
        off += vec_bytes
        chars.append(char)
    if off != len(body):
        raise EmbeddingFormatError(f"{path}: {len(body) - off} trailing bytes")
    if not np.isfinite(vectors).all():
        raise EmbeddingFormatError(f"{path}: NaN/Inf payload")
    return EmbeddingTable(dim=dim, chars=tuple(chars), vectors=vectors)


def import_tsv(path) -> EmbeddingTable:
    """Read the interchange layout ``<char>\\t<v1> <v2> ...``."""
    chars: list[str] = []
    rows: list[np.ndarray] = []
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise EmbeddingFormatError(f"{path}:{lineno}: want '<char>\\t<values>'")
            char = fields[0]
            try:
                vec = np.array([float(v) for v in fields[1].split()], dtype=np.float32)
            except ValueError as exc:
                raise EmbeddingFormatError(f"{path}:{lineno}: bad float") from exc
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise EmbeddingFormatError(
                    f"{path}:{lineno}: dim {len(vec)} != {dim} from first row"
                )
            chars.append(char)
            rows.append(vec)
    if dim is None or dim == 0:
        raise EmbeddingFormatError(f"{path}: no usable rows")
    return EmbeddingTable(dim=dim, chars=tuple(chars), vectors=np.stack(rows))


def random_table(vocab: Vocabulary, dim: int, seed: int) -> EmbeddingTable:
    """Control table: i.i.d. Gaussian(0, 0.02) entries, fully seeded.

    A probe trained on this carries no glyph or phonetic signal, so its
    accuracy pins down the chance level.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    vectors = rng.normal(0.0, 0.02, size=(len(vocab), dim)).astype(np.float32)
    return EmbeddingTable(dim=dim, chars=tuple(vocab.chars), vectors=vectors)
