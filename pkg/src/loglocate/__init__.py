"""loglocate: pinpoint anomalous events inside long test-execution logs.

Train an n-gram next-event model on normal runs, then score each event of a
suspect run by how often, and how probably, it followed its context during
training. Low scores mark the places worth reading first.
"""

from .base import (
    OVERFLOW_EVENT,
    SEQUENCE_END,
    SEQUENCE_START,
    DataFormatError,
    EventSequence,
    Label,
)
from .corpus import (
    LabeledCorpus,
    RawLogRecord,
    SessionRecords,
    SplitSpec,
    filter_min_length,
    load_hdfs,
    load_per_file,
    split_corpus,
    split_sequences,
)
from .evaluate import (
    ComparisonReport,
    DummyPredictor,
    EvalReport,
    compare,
    compare_rows,
    evaluate,
    sweep,
    time_phase,
)
from .ngram import AnomalyScore, NGramModel, Prediction, ScoredEvent, merge, pad
from .pipeline import IngestStats, ingest_and_parse_hdfs
from .reports import PlotSpec, ScoreRecord, moving_average, render_plot, score_records
from .seqfile import read_predictions, read_sequences, write_predictions, write_sequences
from .synthetic import anomaly_run, markov_corpus
from .templates import HDFS_MASKS, Template, TemplateMiner, parse_corpus

__version__ = "0.1.0"

__all__ = [
    "AnomalyScore",
    "ComparisonReport",
    "DataFormatError",
    "DummyPredictor",
    "EvalReport",
    "EventSequence",
    "HDFS_MASKS",
    "IngestStats",
    "Label",
    "LabeledCorpus",
    "NGramModel",
    "OVERFLOW_EVENT",
    "PlotSpec",
    "Prediction",
    "RawLogRecord",
    "ScoreRecord",
    "ScoredEvent",
    "SEQUENCE_END",
    "SEQUENCE_START",
    "SessionRecords",
    "SplitSpec",
    "Template",
    "TemplateMiner",
    "anomaly_run",
    "compare",
    "compare_rows",
    "evaluate",
    "filter_min_length",
    "ingest_and_parse_hdfs",
    "load_hdfs",
    "load_per_file",
    "markov_corpus",
    "merge",
    "moving_average",
    "pad",
    "parse_corpus",
    "read_predictions",
    "read_sequences",
    "render_plot",
    "score_records",
    "split_corpus",
    "split_sequences",
    "sweep",
    "time_phase",
    "write_predictions",
    "write_sequences",
]
