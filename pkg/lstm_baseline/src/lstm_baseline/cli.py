"""CLI: train an LSTM next-event baseline and emit prediction files."""

from __future__ import annotations

import click

from .model import LstmConfig


@click.group()
def cli() -> None:
    """LSTM next-event baseline over shared sequence/prediction files."""


@cli.command()
@click.argument("seqfile", type=click.Path(exists=True))
@click.argument("artifact_out", type=click.Path())
@click.option("--log-out", required=True, type=click.Path(),
              help="Training log (epoch,loss,val_accuracy).")
@click.option("--n", type=click.IntRange(min=2), default=5, show_default=True,
              help="Sliding-window size.")
@click.option("--epochs", type=click.IntRange(min=1), default=60, show_default=True)
@click.option("--batch-size", type=click.IntRange(min=1), default=64, show_default=True)
@click.option("--learning-rate", type=click.FloatRange(min=0, min_open=True),
              default=1e-3, show_default=True)
@click.option("--seed", default=7, show_default=True)
def train(seqfile, artifact_out, log_out, n, epochs, batch_size, learning_rate, seed):
    """Train on the Normal sequences of SEQFILE and save the artifact."""
    from .train import train_model

    config = LstmConfig(window_n=n, epochs=epochs, batch_size=batch_size,
                        learning_rate=learning_rate, seed=seed)
    summary = train_model(seqfile, artifact_out, log_out, config)
    click.echo(
        f"trained {summary['epochs_run']} epochs on {summary['train_windows']} windows "
        f"(loss {summary['final_loss']:.4f}, val accuracy {summary['val_accuracy']:.4f})"
    )


@cli.command()
@click.argument("artifact", type=click.Path(exists=True))
@click.argument("seqfile", type=click.Path(exists=True))
@click.argument("predictions_out", type=click.Path())
def predict(artifact, seqfile, predictions_out):
    """Write argmax predictions for every position of SEQFILE."""
    from .predict import predict_to_file

    rows = predict_to_file(artifact, seqfile, predictions_out)
    click.echo(f"wrote {rows} prediction rows to {predictions_out}")


if __name__ == "__main__":
    cli()
