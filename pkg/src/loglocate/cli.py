"""Command-line surface.

Exit codes: 0 success, 1 usage error, 2 data/format/IO error.
"""

from __future__ import annotations

import sys

import click

from .base import DataFormatError, Label
from .corpus import SplitSpec, filter_min_length, load_hdfs, load_per_file, split_sequences
from .evaluate import DummyPredictor, compare_rows, evaluate, sweep, time_phase
from .ngram import NGramModel
from .reports import (
    PlotSpec,
    render_plot,
    score_records,
    write_comparison,
    write_report_table,
    write_scores,
)
from .seqfile import prediction_rows, read_predictions, read_sequences, write_sequences
from .templates import HDFS_MASKS, TemplateMiner, parse_corpus

# Expected corpus statistics for the public HDFS benchmark; mismatches are
# reported, never silently reconciled.
HDFS_EXPECTED_TOTAL_SEQUENCES = 575_061
HDFS_EXPECTED_NORMAL_SEQUENCES = 558_223
HDFS_EXPECTED_NORMAL_EVENTS = 10_887_379
HDFS_EXPECTED_UNIQUE_TEMPLATES = (9, 25)  # 17 with a parser-config tolerance of 8


def _parse_n_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(text)]
    except ValueError:
        raise click.UsageError(f"--n expects an integer or LO..HI range, got {text!r}")
    if not values or min(values) < 2:
        raise click.UsageError(f"--n values must be >= 2, got {text!r}")
    return values


@click.group()
def cli() -> None:
    """Localize anomalous events in long test logs with n-gram next-event models."""


@cli.command()
@click.option("--hdfs-log", type=click.Path(), help="HDFS log file (session per block id).")
@click.option("--hdfs-labels", type=click.Path(), help="HDFS BlockId,Label table.")
@click.option("--log-dir", type=click.Path(), help="Directory of one-run-per-file logs.")
@click.option("--anomaly-name", default=None,
              help="With --log-dir: label files whose name contains this as Anomaly.")
@click.option("--seq-out", required=True, type=click.Path(), help="Sequence file to write.")
@click.option("--catalog-out", required=True, type=click.Path(), help="Template catalog to write.")
@click.option("--min-len", default=0, show_default=True,
              help="Drop sequences with fewer raw records.")
@click.option("--masks", "masks_preset", type=click.Choice(["hdfs", "none"]), default="hdfs",
              show_default=True, help="Masking preset applied before tokenization.")
@click.option("--depth", default=4, show_default=True, help="Parse-tree depth.")
@click.option("--threshold", default=0.4, show_default=True, help="Similarity threshold.")
@click.option("--max-children", default=100, show_default=True, help="Tree fan-out cap.")
def parse(hdfs_log, hdfs_labels, log_dir, anomaly_name, seq_out, catalog_out,
          min_len, masks_preset, depth, threshold, max_children):
    """Mine templates from raw logs and write a sequence file plus catalog."""
    if log_dir:
        if hdfs_log or hdfs_labels:
            raise click.UsageError("use either --log-dir or --hdfs-log/--hdfs-labels")
        label_fn = None
        if anomaly_name is not None:
            label_fn = lambda name: Label.ANOMALY if anomaly_name in name else Label.NORMAL
        corpus = load_per_file(log_dir, label_fn)
    elif hdfs_log and hdfs_labels:
        corpus = load_hdfs(hdfs_log, hdfs_labels)
    else:
        raise click.UsageError("provide --log-dir or both --hdfs-log and --hdfs-labels")

    if min_len:
        corpus = filter_min_length(corpus, min_len)
    miner = TemplateMiner(
        tree_depth=depth,
        similarity_threshold=threshold,
        max_children=max_children,
        masks=HDFS_MASKS if masks_preset == "hdfs" else (),
    )
    sequences, templates = parse_corpus(corpus, miner)
    write_sequences(seq_out, sequences, vocab_size=len(templates))
    miner.save(catalog_out)
    click.echo(f"parsed {corpus.total_records()} records into {len(sequences)} sequences, "
               f"{len(templates)} templates")


@cli.command("split")
@click.argument("seqfile", type=click.Path())
@click.argument("train_out", type=click.Path())
@click.argument("test_out", type=click.Path())
@click.option("--split", "ratio", type=click.FloatRange(0, 1, min_open=True, max_open=True),
              default=0.5, show_default=True,
              help="Training fraction of the Normal sequences.")
@click.option("--seed", default=42, show_default=True, help="Shuffle seed.")
@click.option("--min-len", type=click.IntRange(min=0), default=0, show_default=True,
              help="Drop sequences with fewer events first.")
def split_cmd(seqfile, train_out, test_out, ratio, seed, min_len):
    """Partition the Normal sequences into reproducible train/test files.

    Both outputs keep the input's vocab header, so downstream trainers of
    any implementation see a consistent id space.
    """
    sequences, vocab_size = read_sequences(seqfile)
    normal = [s for s in sequences if s.label is Label.NORMAL]
    if min_len:
        normal = [s for s in normal if len(s.events) >= min_len]
    train_seqs, test_seqs = split_sequences(normal, SplitSpec(ratio=ratio, seed=seed))
    write_sequences(train_out, train_seqs, vocab_size)
    write_sequences(test_out, test_seqs, vocab_size)
    click.echo(f"split {len(normal)} Normal sequences into "
               f"{len(train_seqs)} train / {len(test_seqs)} test")


@cli.command()
@click.argument("seqfile", type=click.Path())
@click.argument("model_out", type=click.Path())
@click.option("--n", type=click.IntRange(min=2), default=5, show_default=True,
              help="Sliding-window size.")
def train(seqfile, model_out, n):
    """Train an n-gram model on the Normal sequences of a sequence file."""
    sequences, _ = read_sequences(seqfile)
    normal = [s.events for s in sequences if s.label is Label.NORMAL]
    model, seconds = time_phase(NGramModel(n=n).fit, normal)
    model.save(model_out)
    click.echo(f"trained n={n} on {len(normal)} sequences "
               f"({model.trained_positions_} positions, "
               f"{model.unique_ngrams_} unique n-grams) in {seconds:.3f}s")


@cli.command("eval")
@click.argument("model_path", type=click.Path())
@click.argument("seqfile", type=click.Path())
@click.option("--dataset-id", default="", help="Dataset column for the report row.")
@click.option("--report-out", type=click.Path(), help="Write the one-row report table here.")
@click.option("--pred-out", type=click.Path(), help="Write per-position predictions here.")
def eval_cmd(model_path, seqfile, dataset_id, report_out, pred_out):
    """Evaluate next-event accuracy of a model on Normal test sequences."""
    model = NGramModel.load(model_path)
    sequences, _ = read_sequences(seqfile)
    normal = [s for s in sequences if s.label is Label.NORMAL]
    report = evaluate(model, normal, dataset_id=dataset_id, model_name="ngram",
                      n=model.n, unique_ngrams=model.unique_ngrams_)
    click.echo(f"accuracy {report.accuracy:.6f} "
               f"({report.correct}/{report.total_predictions}) "
               f"inference {report.infer_seconds:.3f}s")
    if report_out:
        write_report_table([report], report_out)
    if pred_out:
        from .seqfile import write_predictions

        write_predictions(pred_out, prediction_rows(model, normal))


@cli.command()
@click.argument("seqfile", type=click.Path())
@click.option("--n", "n_range", default="2..10", show_default=True,
              help="Window size or LO..HI range.")
@click.option("--split", "ratio", type=click.FloatRange(0, 1, min_open=True, max_open=True),
              default=0.5, show_default=True,
              help="Training fraction of the Normal sequences.")
@click.option("--seed", default=42, show_default=True, help="Split shuffle seed.")
@click.option("--min-len", type=click.IntRange(min=0), default=0, show_default=True,
              help="Drop sequences with fewer events before splitting.")
@click.option("--dataset-id", default="", help="Dataset column for report rows.")
@click.option("--report-out", type=click.Path(), help="Write the report table here.")
def sweep_cmd(seqfile, n_range, ratio, seed, min_len, dataset_id, report_out):
    """Train/evaluate one model per window size over a seeded 50:50-style split."""
    n_values = _parse_n_range(n_range)
    sequences, _ = read_sequences(seqfile)
    normal = [s for s in sequences if s.label is Label.NORMAL]
    if min_len:
        normal = [s for s in normal if len(s.events) >= min_len]
    train_seqs, test_seqs = split_sequences(normal, SplitSpec(ratio=ratio, seed=seed))
    if not train_seqs or not test_seqs:
        raise DataFormatError("split produced an empty side; not enough Normal sequences")
    reports = sweep(train_seqs, test_seqs, n_values, dataset_id=dataset_id)
    click.echo(f"{'n':>3} {'accuracy':>9} {'correct':>12} {'total':>12} "
               f"{'unique_ngrams':>14} {'train_s':>8} {'infer_s':>8}")
    for r in reports:
        click.echo(f"{r.n:>3} {r.accuracy:>9.4f} {r.correct:>12} {r.total_predictions:>12} "
                   f"{r.unique_ngrams:>14} {r.train_seconds:>8.2f} {r.infer_seconds:>8.2f}")
    if report_out:
        write_report_table(reports, report_out)


@cli.command()
@click.argument("model_path", type=click.Path())
@click.argument("seqfile", type=click.Path())
@click.option("--session", default=None, help="Session id to score (default: first).")
@click.option("--scores-out", required=True, type=click.Path(), help="Score CSV to write.")
@click.option("--plot-out", type=click.Path(), help="Optional vector-graphics plot.")
@click.option("--metric", type=click.Choice(["occurrence_log", "probability"]),
              default="occurrence_log", show_default=True)
@click.option("--overlays", default="raw,ma100,ma1000", show_default=True,
              help="Comma-separated subset of raw,ma100,ma1000.")
def score(model_path, seqfile, session, scores_out, plot_out, metric, overlays):
    """Score one sequence event-by-event and emit the score stream."""
    model = NGramModel.load(model_path)
    sequences, _ = read_sequences(seqfile)
    if not sequences:
        raise DataFormatError(f"{seqfile} holds no sequences")
    if session is None:
        target = sequences[0]
    else:
        matches = [s for s in sequences if s.session_id == session]
        if not matches:
            raise DataFormatError(f"session {session!r} not found in {seqfile}")
        target = matches[0]
    records = score_records(model.score_sequence(target.events))
    write_scores(records, scores_out)
    click.echo(f"scored {len(records)} positions of session {target.session_id!r}")
    if plot_out:
        try:
            spec = PlotSpec(metric=metric, overlays=tuple(overlays.split(",")), output=plot_out)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from exc
        render_plot(records, spec)
        click.echo(f"plot written to {plot_out}")


@cli.command()
@click.argument("pred_a", type=click.Path())
@click.argument("pred_b", type=click.Path())
@click.option("--out", type=click.Path(), help="Write the per-session comparison CSV here.")
def compare(pred_a, pred_b, out):
    """Compare two prediction files sequence-by-sequence (exact-tie semantics)."""
    try:
        report = compare_rows(read_predictions(pred_a), read_predictions(pred_b))
    except ValueError as exc:
        raise DataFormatError(str(exc)) from exc
    click.echo(f"wins_a={report.wins_a} wins_b={report.wins_b} ties={report.ties}")
    if out:
        write_comparison(report, out)


@cli.command("bench-hdfs")
@click.argument("hdfs_log", type=click.Path())
@click.argument("hdfs_labels", type=click.Path())
@click.option("--out-dir", required=True, type=click.Path(), help="Directory for artifacts.")
@click.option("--n", "n_range", default="2..10", show_default=True)
@click.option("--split", "ratio", type=click.FloatRange(0, 1, min_open=True, max_open=True),
              default=0.5, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--min-len", type=click.IntRange(min=0), default=0, show_default=True)
def bench_hdfs(hdfs_log, hdfs_labels, out_dir, n_range, ratio, seed, min_len):
    """End-to-end benchmark on the public HDFS corpus, with expectation checks."""
    import pathlib

    from .pipeline import ingest_and_parse_hdfs

    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_values = _parse_n_range(n_range)

    miner = TemplateMiner(masks=HDFS_MASKS)
    (sequences, templates, stats), ingest_s = time_phase(
        ingest_and_parse_hdfs, hdfs_log, hdfs_labels, miner
    )
    click.echo(f"total sequences: {stats.total_sequences} "
               f"(public label table lists {HDFS_EXPECTED_TOTAL_SEQUENCES})")
    _check("normal sequences", stats.normal_sequences, HDFS_EXPECTED_NORMAL_SEQUENCES)
    _check("normal events", stats.normal_events, HDFS_EXPECTED_NORMAL_EVENTS)
    lo, hi = HDFS_EXPECTED_UNIQUE_TEMPLATES
    status = "OK" if lo <= len(templates) <= hi else "MISMATCH"
    click.echo(f"unique templates: got {len(templates)}, expected {lo}..{hi} ({status})")
    click.echo(f"ingest+parse {ingest_s:.1f}s "
               f"(dropped {stats.dropped_no_session} block-less lines, "
               f"{stats.unlabeled_sessions} unlabeled blocks)")

    miner.save(out / "catalog.txt")
    write_sequences(out / "normal.seq", sequences, vocab_size=len(templates))

    if min_len:
        sequences = [s for s in sequences if len(s.events) >= min_len]
    train_seqs, test_seqs = split_sequences(sequences, SplitSpec(ratio=ratio, seed=seed))
    reports = sweep(train_seqs, test_seqs, n_values, dataset_id="hdfs")
    for r in reports:
        click.echo(f"n={r.n} accuracy={r.accuracy:.4f} unique_ngrams={r.unique_ngrams} "
                   f"train={r.train_seconds:.1f}s infer={r.infer_seconds:.1f}s")

    dummy, dummy_train_s = time_phase(DummyPredictor().fit, [s.events for s in train_seqs])
    dummy_report = evaluate(dummy, test_seqs, dataset_id="hdfs", model_name="dummy",
                            train_seconds=dummy_train_s)
    click.echo(f"dummy accuracy={dummy_report.accuracy:.4f}")
    write_report_table(reports + [dummy_report], out / "report.csv")
    click.echo(f"artifacts in {out}")


def _check(name: str, got: int, expected: int) -> None:
    status = "OK" if got == expected else "MISMATCH"
    click.echo(f"{name}: got {got}, expected {expected} ({status})")


def main(argv=None) -> int:
    """Invoke the CLI with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        if exc.ctx is not None:
            click.echo(exc.ctx.get_help(), err=True)
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except (DataFormatError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
