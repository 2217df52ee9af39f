"""Report emitters: per-event score streams, moving averages, plots, tables.

Every emitter's byte output is a pure function of its inputs and flags, so
reports can be diffed and committed as goldens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .base import DataFormatError
from .evaluate import ComparisonReport, EvalReport
from .ngram import ScoredEvent

SCORE_HEADER = (
    "position,event_id,occurrence,probability,"
    "ma_occ_100,ma_occ_1000,ma_prob_100,ma_prob_1000"
)
REPORT_HEADER = "dataset,model,n,accuracy,correct,total,unique_ngrams,train_s,infer_s"
COMPARISON_HEADER = "session_id,acc_a,acc_b,outcome"

SMOOTHING_WINDOWS = (100, 1000)


def moving_average(values: Sequence[float], window: int) -> np.ndarray:
    """Trailing mean with partial head windows; never peeks ahead.

    output[i] = mean(values[max(0, i-window+1) ..= i]); same length as input.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return arr
    sums = np.concatenate(([0.0], np.cumsum(arr)))
    idx = np.arange(arr.size)
    starts = np.maximum(0, idx - window + 1)
    return (sums[idx + 1] - sums[starts]) / (idx - starts + 1)


@dataclass
class ScoreRecord:
    position: int
    event_id: int
    occurrence: int
    probability: float
    ma_occ_100: float
    ma_occ_1000: float
    ma_prob_100: float
    ma_prob_1000: float


@dataclass
class PlotSpec:
    """What to draw: raw per-event scores plus moving-average overlays."""

    metric: str = "occurrence_log"  # or "probability"
    overlays: tuple[str, ...] = ("raw", "ma100", "ma1000")
    output: str = "scores.svg"

    def __post_init__(self) -> None:
        if self.metric not in ("occurrence_log", "probability"):
            raise ValueError(f"unknown metric {self.metric!r}")
        unknown = set(self.overlays) - {"raw", "ma100", "ma1000"}
        if unknown:
            raise ValueError(f"unknown overlays: {sorted(unknown)}")


def score_records(scored: Sequence[ScoredEvent]) -> list[ScoreRecord]:
    """Attach 100- and 1000-event moving averages to a scored sequence."""
    occurrences = [s.score.occurrence for s in scored]
    probabilities = [s.score.probability for s in scored]
    ma_occ = {w: moving_average(occurrences, w) for w in SMOOTHING_WINDOWS}
    ma_prob = {w: moving_average(probabilities, w) for w in SMOOTHING_WINDOWS}
    return [
        ScoreRecord(
            position=s.position,
            event_id=s.event,
            occurrence=s.score.occurrence,
            probability=s.score.probability,
            ma_occ_100=float(ma_occ[100][i]),
            ma_occ_1000=float(ma_occ[1000][i]),
            ma_prob_100=float(ma_prob[100][i]),
            ma_prob_1000=float(ma_prob[1000][i]),
        )
        for i, s in enumerate(scored)
    ]


def write_scores(records: Iterable[ScoreRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SCORE_HEADER + "\n")
        for r in records:
            fh.write(
                f"{r.position},{r.event_id},{r.occurrence},{r.probability:.6f},"
                f"{r.ma_occ_100:.6f},{r.ma_occ_1000:.6f},"
                f"{r.ma_prob_100:.6f},{r.ma_prob_1000:.6f}\n"
            )


def read_scores(path) -> list[ScoreRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != SCORE_HEADER:
            raise DataFormatError(f"not a score file: {path}")
        for lineno, raw in enumerate(fh, start=2):
            fields = raw.rstrip("\n").split(",")
            if len(fields) != 8:
                raise DataFormatError(f"{path}:{lineno}: expected 8 fields")
            try:
                records.append(
                    ScoreRecord(
                        int(fields[0]), int(fields[1]), int(fields[2]),
                        float(fields[3]), float(fields[4]), float(fields[5]),
                        float(fields[6]), float(fields[7]),
                    )
                )
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: malformed row") from None
    return records


def occurrence_log_transform(count: float) -> float:
    """log10(count + 1): keeps zero counts (the most anomalous events) visible."""
    return float(np.log10(count + 1.0))


def render_plot(records: Sequence[ScoreRecord], spec: PlotSpec) -> None:
    """Scatter the per-event metric with moving-average overlays into a
    standalone vector-graphics file (format from the output extension)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    positions = [r.position for r in records]
    if spec.metric == "occurrence_log":
        raw = [occurrence_log_transform(r.occurrence) for r in records]
        ma100 = moving_average(raw, 100)
        ma1000 = moving_average(raw, 1000)
        ylabel = "occurrence count, log10(count + 1)"
    else:
        raw = [r.probability for r in records]
        ma100 = [r.ma_prob_100 for r in records]
        ma1000 = [r.ma_prob_1000 for r in records]
        ylabel = "probability"

    fig, ax = plt.subplots(figsize=(14, 4.5))
    if "raw" in spec.overlays and records:
        ax.scatter(positions, raw, s=2, color="tab:blue", alpha=0.35, label="per event")
    if "ma100" in spec.overlays and records:
        ax.plot(positions, ma100, color="tab:orange", linewidth=1.2, label="moving average 100")
    if "ma1000" in spec.overlays and records:
        ax.plot(positions, ma1000, color="tab:red", linewidth=1.4, label="moving average 1000")
    ax.set_xlabel("event position")
    ax.set_ylabel(ylabel)
    if records:
        ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(spec.output)
    plt.close(fig)


def write_report_table(reports: Iterable[EvalReport], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(REPORT_HEADER + "\n")
        for r in reports:
            fh.write(
                f"{r.dataset_id},{r.model_name},{r.n},{r.accuracy:.6f},"
                f"{r.correct},{r.total_predictions},{r.unique_ngrams},"
                f"{r.train_seconds:.3f},{r.infer_seconds:.3f}\n"
            )


def write_comparison(report: ComparisonReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(COMPARISON_HEADER + "\n")
        for sid, ca, ta, cb, tb in report.per_sequence:
            lhs, rhs = ca * tb, cb * ta
            outcome = "a" if lhs > rhs else "b" if lhs < rhs else "tie"
            fh.write(f"{sid},{ca / ta:.6f},{cb / tb:.6f},{outcome}\n")
