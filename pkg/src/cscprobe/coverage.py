"""Correct character coverage rate (CCCR) over masked/noisy prediction pairs.

Each record captures one corrupted position in a sentence, scored twice by
a masked language model:

- masked pass: the position is replaced by the mask token;
  ``p_gold_masked`` and ``p_noise_masked`` are the probabilities of the
  correct character and of the typo character at that position.
- noisy pass: the position holds the typo character itself;
  ``p_gold_noisy`` and ``p_noise_noisy`` are read off the same way.

A record belongs to the MLM set when context alone is not enough, i.e. the
masked pass ranks the typo above the correct character
(``p_noise_masked > p_gold_masked``, strictly). It belongs to the homonym
set when seeing the typo flips the ranking back
(``p_gold_noisy > p_noise_noisy``, strictly). CCCR is the fraction of the
MLM set that the homonym set covers: how often the model recovers the
correct character only because the typo itself is visible.

The guessing baseline estimates how much of that coverage random guessing
over the remaining probability mass would achieve.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

BASELINE_MODES = ("printed", "renormalized")

_PROB_FIELDS = ("p_gold_masked", "p_noise_masked", "p_gold_noisy", "p_noise_noisy")
_PAIR_SUM_TOL = 1e-9
_JSON_KEYS = ("id", "gold_char", "noise_char") + _PROB_FIELDS


class RecordFormatError(ValueError):
    """A prediction record violates the format or its probability bounds."""


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    gold_char: str
    noise_char: str
    p_gold_masked: float
    p_noise_masked: float
    p_gold_noisy: float
    p_noise_noisy: float

    def __post_init__(self):
        if not self.id:
            raise RecordFormatError("record id must be nonempty")
        for name in ("gold_char", "noise_char"):
            value = getattr(self, name)
            if len(value) != 1:
                raise RecordFormatError(
                    f"record {self.id}: {name} must be a single character, got {value!r}"
                )
        if self.gold_char == self.noise_char:
            raise RecordFormatError(
                f"record {self.id}: gold and noise characters are both {self.gold_char!r}"
            )
        for name in _PROB_FIELDS:
            p = getattr(self, name)
            if not (isinstance(p, (int, float)) and math.isfinite(p)):
                raise RecordFormatError(f"record {self.id}: {name} is not a finite number")
            if not 0.0 <= p <= 1.0:
                raise RecordFormatError(f"record {self.id}: {name}={p} outside [0,1]")
        for a, b, pass_name in (
            (self.p_gold_masked, self.p_noise_masked, "masked"),
            (self.p_gold_noisy, self.p_noise_noisy, "noisy"),
        ):
            if a + b > 1.0 + _PAIR_SUM_TOL:
                raise RecordFormatError(
                    f"record {self.id}: {pass_name} probabilities sum to {a + b} > 1"
                )


def classify_record(record: PredictionRecord) -> tuple[bool, bool]:
    """(in MLM set, in homonym set); both comparisons are strict, so ties
    fall outside the sets."""
    in_mlm = record.p_noise_masked > record.p_gold_masked
    in_homonym = record.p_gold_noisy > record.p_noise_noisy
    return in_mlm, in_homonym


@dataclass(frozen=True)
class CccrReport:
    n_records: int
    n_mlm: int
    n_homonym: int
    n_intersection: int
    cccr: float | None  # None when the MLM set is empty
    baseline: float | None
    baseline_mode: str

    @property
    def defined(self) -> bool:
        return self.cccr is not None

    def to_dict(self) -> dict:
        return {
            "n_records": self.n_records,
            "n_mlm": self.n_mlm,
            "n_homonym": self.n_homonym,
            "n_intersection": self.n_intersection,
            "cccr": self.cccr,
            "cccr_percent": None if self.cccr is None else round(self.cccr * 100.0, 2),
            "baseline": self.baseline,
            "baseline_percent": None if self.baseline is None else round(self.baseline * 100.0, 2),
            "baseline_mode": self.baseline_mode,
        }

    def render(self) -> str:
        lines = [
            f"records            {self.n_records}",
            f"MLM set            {self.n_mlm}",
            f"homonym set        {self.n_homonym}",
            f"intersection       {self.n_intersection}",
        ]
        if self.cccr is None:
            lines.append("CCCR               undefined (empty MLM set)")
            lines.append(f"baseline ({self.baseline_mode})  undefined (empty MLM set)")
        else:
            lines.append(f"CCCR               {self.cccr * 100.0:.2f}%")
            lines.append(f"baseline ({self.baseline_mode})  {self.baseline * 100.0:.2f}%")
        return "\n".join(lines)


def compute_cccr(records, baseline_mode: str = "printed") -> CccrReport:
    """Set sizes, CCCR, and the guessing baseline in one pass.

    An empty record list is an error; an empty MLM set is not, it yields a
    report with ``cccr is None`` so callers cannot mistake it for 0.
    """
    records = list(records)
    if not records:
        raise ValueError("no prediction records")
    if baseline_mode not in BASELINE_MODES:
        raise ValueError(f"baseline_mode must be one of {BASELINE_MODES}, got {baseline_mode!r}")
    seen_ids = set()
    for r in records:
        if r.id in seen_ids:
            raise RecordFormatError(f"duplicate record id {r.id!r}")
        seen_ids.add(r.id)
    n_mlm = n_homonym = n_both = 0
    mlm_records = []
    for r in records:
        in_mlm, in_homonym = classify_record(r)
        if in_mlm:
            n_mlm += 1
            mlm_records.append(r)
        if in_homonym:
            n_homonym += 1
        if in_mlm and in_homonym:
            n_both += 1
    if n_mlm == 0:
        return CccrReport(
            n_records=len(records),
            n_mlm=0,
            n_homonym=n_homonym,
            n_intersection=0,
            cccr=None,
            baseline=None,
            baseline_mode=baseline_mode,
        )
    return CccrReport(
        n_records=len(records),
        n_mlm=n_mlm,
        n_homonym=n_homonym,
        n_intersection=n_both,
        cccr=n_both / n_mlm,
        baseline=compute_baseline(mlm_records, mode=baseline_mode),
        baseline_mode=baseline_mode,
    )


def compute_baseline(mlm_records, mode: str = "printed") -> float:
    """Mean per-record guessing chance over an already-filtered MLM set.

    printed:       p_noise_masked / (1 - p_noise_masked)
    renormalized:  p_gold_masked / (1 - p_noise_masked)

    The printed form is the odds of the typo character under the masked
    pass; it can exceed 1 for a single record. The renormalized form is the
    masked-pass probability of the correct character after excluding the
    typo's share of the mass, and stays within [0,1].
    """
    mlm_records = list(mlm_records)
    if not mlm_records:
        raise ValueError("baseline needs a nonempty MLM set")
    if mode not in BASELINE_MODES:
        raise ValueError(f"baseline mode must be one of {BASELINE_MODES}, got {mode!r}")
    total = 0.0
    for r in mlm_records:
        denom = 1.0 - r.p_noise_masked
        if denom <= 0.0:
            raise ValueError(
                f"record {r.id}: p_noise_masked={r.p_noise_masked} leaves no "
                "probability mass for guessing"
            )
        numer = r.p_noise_masked if mode == "printed" else r.p_gold_masked
        total += numer / denom
    return total / len(mlm_records)


def write_records(records, path) -> None:
    """One JSON object per line, keys in a fixed order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            row = {key: getattr(r, key) for key in _JSON_KEYS}
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_records(path) -> list[PredictionRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(row, dict):
                raise RecordFormatError(f"{path}:{lineno}: expected a JSON object")
            missing = [key for key in _JSON_KEYS if key not in row]
            if missing:
                raise RecordFormatError(f"{path}:{lineno}: missing keys {missing}")
            extra = [key for key in row if key not in _JSON_KEYS]
            if extra:
                raise RecordFormatError(f"{path}:{lineno}: unknown keys {extra}")
            try:
                records.append(
                    PredictionRecord(
                        id=str(row["id"]),
                        gold_char=row["gold_char"],
                        noise_char=row["noise_char"],
                        p_gold_masked=float(row["p_gold_masked"]),
                        p_noise_masked=float(row["p_noise_masked"]),
                        p_gold_noisy=float(row["p_gold_noisy"]),
                        p_noise_noisy=float(row["p_noise_noisy"]),
                    )
                )
            except (RecordFormatError, TypeError, ValueError) as exc:
                raise RecordFormatError(f"{path}:{lineno}: {exc}") from exc
    return records
