"""Command line: serve a model artifact or train a demo model."""

from __future__ import annotations

import sys

import click

from .models import ModelError, load_model, train_demo


@click.group()
def main():
    """Reference model server for the HTTP prediction protocol."""


@main.command("serve")
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--class-index", type=int, default=None,
              help="Class whose probability is served (classification).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8090, show_default=True)
def cmd_serve(model_path, class_index, host, port):
    """Serve POST /predict and GET /health for a saved model artifact."""
    import uvicorn

    from .app import create_app

    try:
        model = load_model(model_path, class_index=class_index)
    except ModelError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    uvicorn.run(create_app(model), host=host, port=port, log_level="warning")


@main.command("train-demo")
@click.option("--data", "dataset_csv", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--task", type=click.Choice(["regression", "classification"]),
              required=True)
@click.option("--out", "out_model_path", required=True, type=click.Path())
@click.option("--model-type", type=click.Choice(["forest", "mlp"]),
              default="forest", show_default=True)
@click.option("--target-col", default=None,
              help="Target column name (default: last column).")
@click.option("--seed", type=int, default=0, show_default=True)
def cmd_train_demo(dataset_csv, task, out_model_path, model_type, target_col,
                   seed):
    """Train a small forest or MLP on a CSV and save it with its sidecar."""
    try:
        out = train_demo(
            dataset_csv, task, out_model_path,
            model_type=model_type, target_col=target_col, seed=seed,
        )
    except ModelError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"trained {model_type} ({task}) -> {out}")


if __name__ == "__main__":
    main()
