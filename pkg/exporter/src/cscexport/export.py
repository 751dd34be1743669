"""Dump probe-ready artifacts from a pretrained masked language model.

``export_embeddings`` reads the model's input-embedding matrix and writes
one row per vocabulary character in the binary CEMB format the probe
pipeline reads. ``export_predictions`` runs the model over a corpus of
single-substitution sentence pairs twice per record, once with the error
position masked and once with the misspelled character in place, and
writes the four probabilities the coverage-rate analysis consumes.

Both exports are deterministic given the checkpoint: the model is put in
eval mode, nothing samples, and every report carries a SHA-256 digest of
the weights so reruns are attributable to exact parameters. Models whose
tokenizer has no usable mask token are rejected; the masked condition is
undefined for them.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass

import numpy as np
import torch
from transformers import AutoModelForMaskedLM, AutoTokenizer

from cscprobe.chars import load_vocabulary
from cscprobe.coverage import PredictionRecord, write_records
from cscprobe.embeddings import EmbeddingTable, write_embeddings
from cscprobe.isolation import read_corpus

logger = logging.getLogger(__name__)

SOFTMAX_SUM_TOL = 1e-5

SKIP_REASONS = ("not_single_error", "char_not_in_vocab", "too_long")


class ExportError(ValueError):
    """Model or corpus cannot be exported as requested."""


@dataclass(frozen=True)
class ExportSpec:
    """What to export from where.

    ``vocab_path`` drives the embedding export and ``corpus_path`` the
    prediction export; each function requires its own and ignores the
    other. ``device`` is a torch device string such as ``cpu`` or
    ``cuda:0``.
    """

    model: str
    out_path: str
    vocab_path: str | None = None
    corpus_path: str | None = None
    device: str = "cpu"
    batch_size: int = 16

    def __post_init__(self):
        if not self.model:
            raise ExportError("model identifier must be nonempty")
        if self.batch_size < 1:
            raise ExportError(f"batch_size must be positive, got {self.batch_size}")


def load_model(spec: ExportSpec):
    """Tokenizer and masked-LM head for ``spec.model``, eval mode, on device."""
    try:
        tokenizer = AutoTokenizer.from_pretrained(spec.model)
        model = AutoModelForMaskedLM.from_pretrained(spec.model)
    except Exception as exc:  # transformers raises a zoo of types here
        raise ExportError(f"cannot load model {spec.model!r}: {exc}") from exc
    model.eval()
    model.to(spec.device)
    return tokenizer, model


def weights_digest(model) -> str:
    """SHA-256 over every parameter tensor, pinning the exact weights used."""
    h = hashlib.sha256()
    state = model.state_dict()
    for name in sorted(state):
        tensor = state[name].detach().cpu().contiguous()
        h.update(name.encode("utf-8"))
        h.update(str(tuple(tensor.shape)).encode("ascii"))
        h.update(str(tensor.dtype).encode("ascii"))
        try:
            payload = tensor.numpy()
        except TypeError:  # dtypes numpy lacks (bfloat16); digest their f32 view
            payload = tensor.to(torch.float32).numpy()
        h.update(payload.tobytes())
    return h.hexdigest()


def _single_token_id(tokenizer, char: str):
    """Vocabulary id when ``char`` maps to exactly one known token, else None."""
    tokens = tokenizer.tokenize(char)
    if len(tokens) != 1:
        return None
    tid = tokenizer.convert_tokens_to_ids(tokens[0])
    if tid is None or tid == tokenizer.unk_token_id:
        return None
    return tid


# ---------------------------------------------------------------------------
# embedding export


@dataclass
class EmbeddingExportReport:
    model: str
    weights_sha256: str
    dim: int
    exported: int
    skipped: tuple[str, ...]  # characters without a single-token id

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "weights_sha256": self.weights_sha256,
            "dim": self.dim,
            "exported": self.exported,
            "skipped_count": len(self.skipped),
            "skipped": list(self.skipped),
        }

    def render(self) -> str:
        return "\n".join(
            [
                f"model                {self.model}",
                f"weights sha256       {self.weights_sha256}",
                f"embedding dim        {self.dim}",
                f"characters exported  {self.exported}",
                f"characters skipped   {len(self.skipped)}",
            ]
        )


def export_embeddings(spec: ExportSpec) -> EmbeddingExportReport:
    """Write one input-embedding row per single-token vocabulary character.

    Characters the tokenizer cannot map to exactly one known token are
    logged and skipped with a count. The output file is canonical CEMB:
    exporting twice from the same weights gives identical bytes.
    """
    if spec.vocab_path is None:
        raise ExportError("embedding export needs a vocabulary file")
    vocab = load_vocabulary(spec.vocab_path)
    if len(vocab) == 0:
        raise ExportError(f"{spec.vocab_path}: vocabulary is empty")
    tokenizer, model = load_model(spec)
    matrix = model.get_input_embeddings().weight.detach().cpu().numpy()

    chars: list[str] = []
    rows: list[np.ndarray] = []
    skipped: list[str] = []
    for char in vocab:
        tid = _single_token_id(tokenizer, char)
        if tid is None:
            skipped.append(char)
            continue
        chars.append(char)
        rows.append(matrix[tid])
    if skipped:
        logger.info("skipped %d characters without a single-token id", len(skipped))
    if not chars:
        raise ExportError("no vocabulary character maps to a single known token")

    table = EmbeddingTable(
        dim=int(matrix.shape[1]),
        chars=tuple(chars),
        vectors=np.asarray(rows, dtype=np.float32),
    )
    write_embeddings(table, spec.out_path)
    return EmbeddingExportReport(
        model=spec.model,
        weights_sha256=weights_digest(model),
        dim=table.dim,
        exported=len(chars),
        skipped=tuple(skipped),
    )


# ---------------------------------------------------------------------------
# prediction export


@dataclass(frozen=True)
class _Prepared:
    """Token sequences for one record; masked and noisy share the position."""

    record_id: str
    gold_char: str
    noise_char: str
    gold_id: int
    noise_id: int
    masked_ids: tuple[int, ...]
    noisy_ids: tuple[int, ...]
    position: int  # token index of the error in both sequences


def usable_mask_token_id(tokenizer) -> int:
    mid = tokenizer.mask_token_id
    if mid is None or mid == tokenizer.unk_token_id:
        raise ExportError(
            "tokenizer has no usable mask token; the masked condition is "
            "undefined, so this model is unsupported"
        )
    return mid


def _prepare(sp, tokenizer, mask_id: int, max_positions):
    """(_Prepared, None) for an eligible sentence pair, (None, reason) else.

    Eligible means: source and target differ in exactly one position, both
    the gold and the misspelled character map to single known tokens, and
    the token sequence fits the model's position capacity. Context
    characters may fall back to the unknown token; only the tracked pair
    must be in-vocabulary.
    """
    diffs = [i for i, (s, t) in enumerate(zip(sp.source, sp.target)) if s != t]
    if len(diffs) != 1:
        return None, "not_single_error"
    pos = diffs[0]
    gold_char, noise_char = sp.target[pos], sp.source[pos]
    gold_id = _single_token_id(tokenizer, gold_char)
    noise_id = _single_token_id(tokenizer, noise_char)
    if gold_id is None or noise_id is None:
        return None, "char_not_in_vocab"

    unk = tokenizer.unk_token_id
    body = []
    for ch in sp.source:
        tid = _single_token_id(tokenizer, ch)
        body.append(unk if tid is None else tid)
    prefix = [] if tokenizer.cls_token_id is None else [tokenizer.cls_token_id]
    suffix = [] if tokenizer.sep_token_id is None else [tokenizer.sep_token_id]
    noisy = prefix + body + suffix
    token_pos = len(prefix) + pos
    if max_positions is not None and len(noisy) > max_positions:
        return None, "too_long"
    masked = list(noisy)
    masked[token_pos] = mask_id
    return (
        _Prepared(
            record_id=sp.id,
            gold_char=gold_char,
            noise_char=noise_char,
            gold_id=gold_id,
            noise_id=noise_id,
            masked_ids=tuple(masked),
            noisy_ids=tuple(noisy),
            position=token_pos,
        ),
        None,
    )


def _logits_rows(model, device: str, sequences, pad_id: int):
    """Output logits at each (ids, position), one padded forward per call."""
    max_len = max(len(ids) for ids, _ in sequences)
    n = len(sequences)
    input_ids = torch.full((n, max_len), pad_id, dtype=torch.long)
    attention = torch.zeros((n, max_len), dtype=torch.long)
    for i, (ids, _) in enumerate(sequences):
        input_ids[i, : len(ids)] = torch.tensor(ids, dtype=torch.long)
        attention[i, : len(ids)] = 1
    with torch.no_grad():
        out = model(input_ids=input_ids.to(device), attention_mask=attention.to(device))
    logits = out.logits.to(torch.float64).cpu().numpy()
    return [logits[i, pos, :] for i, (_, pos) in enumerate(sequences)]


def _pair_probs(logits, gold_id: int, noise_id: int, record_id: str, condition: str):
    """(p_gold, p_noise) from the position's softmax, normalization re-checked."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max()
    e = np.exp(z)
    probs = e / e.sum()
    total = float(probs.sum())
    if abs(total - 1.0) > SOFTMAX_SUM_TOL:
        raise ExportError(
            f"record {record_id}: {condition} softmax sums to {total!r}, not 1"
        )
    return float(probs[gold_id]), float(probs[noise_id])


@dataclass
class PredictionExportReport:
    model: str
    weights_sha256: str
    records_total: int
    records_exported: int
    skipped: dict[str, int]  # reason -> count, eligible reasons only

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "weights_sha256": self.weights_sha256,
            "records_total": self.records_total,
            "records_exported": self.records_exported,
            "skipped": {k: self.skipped[k] for k in sorted(self.skipped)},
        }

    def render(self) -> str:
        lines = [
            f"model             {self.model}",
            f"weights sha256    {self.weights_sha256}",
            f"corpus records    {self.records_total}",
            f"records exported  {self.records_exported}",
        ]
        for reason in sorted(self.skipped):
            lines.append(f"skipped ({reason})  {self.skipped[reason]}")
        return "\n".join(lines)


def export_predictions(spec: ExportSpec) -> PredictionExportReport:
    """Write one prediction record per eligible corpus sentence pair.

    Each pair must differ in exactly one position; that position is run
    through the model twice, once masked and once with the misspelled
    character in place, and the gold/noise probabilities are read from the
    full-vocabulary softmax at that position. Pairs with zero or several
    substitutions, tracked characters outside the model vocabulary, or
    token sequences beyond the model's position capacity are skipped and
    counted. Records are written in corpus order.
    """
    if spec.corpus_path is None:
        raise ExportError("prediction export needs a corpus file")
    sentences = read_corpus(spec.corpus_path)
    tokenizer, model = load_model(spec)
    mask_id = usable_mask_token_id(tokenizer)
    max_positions = getattr(model.config, "max_position_embeddings", None)
    pad_id = tokenizer.pad_token_id if tokenizer.pad_token_id is not None else 0

    prepared: list[_Prepared] = []
    skipped: dict[str, int] = {}
    for sp in sentences:
        prep, reason = _prepare(sp, tokenizer, mask_id, max_positions)
        if prep is None:
            skipped[reason] = skipped.get(reason, 0) + 1
            logger.info("skipping record %s: %s", sp.id, reason)
            continue
        prepared.append(prep)
    if not prepared:
        raise ExportError("no corpus record is eligible; nothing to export")

    records: list[PredictionRecord] = []
    for start in range(0, len(prepared), spec.batch_size):
        chunk = prepared[start : start + spec.batch_size]
        sequences = []
        for p in chunk:
            sequences.append((p.masked_ids, p.position))
            sequences.append((p.noisy_ids, p.position))
        rows = _logits_rows(model, spec.device, sequences, pad_id)
        for i, p in enumerate(chunk):
            pgm, pnm = _pair_probs(rows[2 * i], p.gold_id, p.noise_id, p.record_id, "masked")
            pgn, pnn = _pair_probs(rows[2 * i + 1], p.gold_id, p.noise_id, p.record_id, "noisy")
            records.append(
                PredictionRecord(
                    id=p.record_id,
                    gold_char=p.gold_char,
                    noise_char=p.noise_char,
                    p_gold_masked=pgm,
                    p_noise_masked=pnm,
                    p_gold_noisy=pgn,
                    p_noise_noisy=pnn,
                )
            )
    write_records(records, spec.out_path)
    return PredictionExportReport(
        model=spec.model,
        weights_sha256=weights_digest(model),
        records_total=len(sentences),
        records_exported=len(records),
        skipped=skipped,
    )
