"""Sentence-level detection and correction metrics for spell checking.

A sentence is flagged when the predicted target differs from the source.
Detection counts a flagged sentence as a true positive when the set of
positions it changes equals the set of positions where the gold target
differs from the source; correction requires the predicted target to match
the gold target exactly. Precision divides by flagged sentences, recall by
sentences that contain gold errors, and each F1 is the harmonic mean
(0 when precision + recall = 0).

Exact correction implies exact detection, so correction F1 never exceeds
detection F1.
"""

from __future__ import annotations

from dataclasses import dataclass

SCORED_COLUMNS = 4


class CorpusFormatError(ValueError):
    """A scored corpus line or triple violates the format."""


@dataclass(frozen=True)
class ScoredSentence:
    id: str
    source: str
    gold: str
    predicted: str

    def __post_init__(self):
        if not self.id:
            raise CorpusFormatError("sentence id must be nonempty")
        if not (len(self.source) == len(self.gold) == len(self.predicted)):
            raise CorpusFormatError(
                f"sentence {self.id}: lengths differ "
                f"(source {len(self.source)}, gold {len(self.gold)}, "
                f"predicted {len(self.predicted)})"
            )


@dataclass(frozen=True)
class MetricsReport:
    detection_precision: float
    detection_recall: float
    detection_f1: float
    correction_precision: float
    correction_recall: float
    correction_f1: float

    def to_dict(self) -> dict:
        return {
            "detection_precision": self.detection_precision,
            "detection_recall": self.detection_recall,
            "detection_f1": self.detection_f1,
            "correction_precision": self.correction_precision,
            "correction_recall": self.correction_recall,
            "correction_f1": self.correction_f1,
        }

    def render(self) -> str:
        header = f"{'':<12}{'precision':>10}{'recall':>10}{'F1':>10}"
        det = (
            f"{'detection':<12}{self.detection_precision * 100.0:>10.2f}"
            f"{self.detection_recall * 100.0:>10.2f}{self.detection_f1 * 100.0:>10.2f}"
        )
        cor = (
            f"{'correction':<12}{self.correction_precision * 100.0:>10.2f}"
            f"{self.correction_recall * 100.0:>10.2f}{self.correction_f1 * 100.0:>10.2f}"
        )
        return "\n".join([header, det, cor])


def _diff_positions(a: str, b: str) -> frozenset[int]:
    return frozenset(i for i, (x, y) in enumerate(zip(a, b)) if x != y)


def _prf(tp: int, flagged: int, with_errors: int) -> tuple[float, float, float]:
    # no flagged sentences means no true positives either; precision is
    # pinned to 0 rather than left undefined
    precision = tp / flagged if flagged else 0.0
    recall = tp / with_errors
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def score(corpus) -> MetricsReport:
    """Six sentence-level metrics; order of the corpus does not matter."""
    corpus = list(corpus)
    if not corpus:
        raise ValueError("empty corpus")
    seen_ids = set()
    for s in corpus:
        if s.id in seen_ids:
            raise CorpusFormatError(f"duplicate sentence id {s.id!r}")
        seen_ids.add(s.id)
    with_errors = sum(1 for s in corpus if s.gold != s.source)
    if with_errors == 0:
        raise ValueError("corpus has no sentences with gold errors; recall is undefined")
    flagged = 0
    detection_tp = 0
    correction_tp = 0
    for s in corpus:
        if s.predicted == s.source:
            continue
        flagged += 1
        if _diff_positions(s.predicted, s.source) == _diff_positions(s.gold, s.source):
            detection_tp += 1
        if s.predicted == s.gold:
            correction_tp += 1
    dp, dr, df = _prf(detection_tp, flagged, with_errors)
    cp, cr, cf = _prf(correction_tp, flagged, with_errors)
    return MetricsReport(
        detection_precision=dp,
        detection_recall=dr,
        detection_f1=df,
        correction_precision=cp,
        correction_recall=cr,
        correction_f1=cf,
    )


def read_scored_corpus(path) -> list[ScoredSentence]:
    """TSV, one `<id>\\t<source>\\t<gold>\\t<predicted>` per line."""
    out: list[ScoredSentence] = []
    seen_ids: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != SCORED_COLUMNS:
                raise CorpusFormatError(
                    f"{path}:{lineno}: expected {SCORED_COLUMNS} tab-separated "
                    f"fields, got {len(fields)}"
                )
            sid, source, gold, predicted = fields
            if sid in seen_ids:
                raise CorpusFormatError(f"{path}:{lineno}: duplicate sentence id {sid!r}")
            seen_ids.add(sid)
            try:
                out.append(ScoredSentence(id=sid, source=source, gold=gold, predicted=predicted))
            except CorpusFormatError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: {exc}") from exc
    return out


def write_scored_corpus(sentences, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in sentences:
            fh.write(f"{s.id}\t{s.source}\t{s.gold}\t{s.predicted}\n")
