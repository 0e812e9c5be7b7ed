"""Staged command line interface.

The pipeline is split into stages that expose each step's inputs and
outputs: parse -> (human revision) -> generate -> simulate -> remediate,
plus retrain for the augment-and-retrain loop and serve for the HTTP API
with the review dashboard.

Exit codes: 0 success, 2 invalid input (syntax/schema/invariants),
3 stage-order violation or refusal to overwrite. Failures print one
machine-readable JSON object to stderr.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from ..errors import DialogForgeError
from ..generator.goals import UnrevisedMapError
from ..jsonio import dumps
from ..schema import BotSyntaxError, SchemaError, ValidationError
from .config import PipelineConfig
from .pipeline import (
    OutputExistsError,
    StageOrderError,
    generate_stage,
    parse_stage,
    remediate_stage,
    retrain_stage,
    simulate_stage,
)

EXIT_INVALID_INPUT = 2
EXIT_STAGE_ORDER = 3

PORT_ENV = "DIALOGFORGE_PORT"
DB_ENV = "DIALOGFORGE_DB"


def _fail(error: DialogForgeError, code: int) -> None:
    click.echo(dumps(error.to_dict(), indent=None), err=True)
    sys.exit(code)


def _run_stage(stage_fn, *args, **kwargs) -> dict:
    try:
        return stage_fn(*args, **kwargs)
    except (BotSyntaxError, SchemaError, ValidationError) as exc:
        _fail(exc, EXIT_INVALID_INPUT)
    except (StageOrderError, OutputExistsError, UnrevisedMapError) as exc:
        _fail(exc, EXIT_STAGE_ORDER)
    except DialogForgeError as exc:
        _fail(exc, EXIT_INVALID_INPUT)


def _load_config(out_dir: str | None, config_path: str | None, seed: int | None) -> PipelineConfig:
    """--config wins; otherwise the snapshot written by parse; otherwise defaults."""
    path = config_path
    if path is None and out_dir is not None:
        snapshot = Path(out_dir) / "config_snapshot.json"
        if snapshot.exists():
            path = str(snapshot)
    config = PipelineConfig.load(path)
    if seed is not None:
        config.seed = seed
    return config


@click.group()
def main():
    """Evaluate, diagnose and remediate task-oriented dialog bots."""


@main.command()
@click.argument("bot_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False), help="artifact directory")
@click.option("--utterances", type=click.Path(exists=True, dir_okay=False),
              help="intent utterance sidecar file")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None)
@click.option("--force", is_flag=True, help="overwrite existing artifacts")
def parse(bot_path, out, utterances, config_path, seed, force):
    """Parse a bot definition into dialog-act maps, ontology and graph."""
    config = _load_config(None, config_path, seed)
    summary = _run_stage(
        parse_stage, bot_path, out, config, utterances_sidecar=utterances, force=force
    )
    click.echo(dumps(summary))


@main.command()
@click.option("--out", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--cap", type=int, default=None, help="override per-intent goal cap")
@click.option("--source", type=click.Choice(["paraphrases", "training"]), default=None)
@click.option("--paraphrase-mode", type=click.Choice(["rule_based", "ingest"]), default=None)
@click.option("--ingest", type=click.Path(exists=True, dir_okay=False),
              help="external paraphrase file (with --paraphrase-mode ingest)")
@click.option("--seed", type=int, default=None)
def generate(out, config_path, cap, source, paraphrase_mode, ingest, seed):
    """Generate simulation goals from revised maps and the ontology."""
    config = _load_config(out, config_path, seed)
    if cap is not None:
        config.per_intent_cap = cap
    if source is not None:
        config.goal_source = source
    if paraphrase_mode is not None:
        config.paraphrase.mode = paraphrase_mode
    if ingest is not None:
        config.paraphrase.ingest_path = ingest
    summary = _run_stage(generate_stage, out, config)
    click.echo(dumps(summary))


@main.command()
@click.option("--out", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--endpoint", default=None, help="chat endpoint URL (default: embedded runtime)")
@click.option("--parallelism", type=int, default=None)
@click.option("--seed", type=int, default=None)
def simulate(out, config_path, endpoint, parallelism, seed):
    """Simulate every goal against the bot runtime."""
    config = _load_config(out, config_path, seed)
    if endpoint is not None:
        config.runtime_endpoint = endpoint
    if parallelism is not None:
        config.parallelism = parallelism
    summary = _run_stage(simulate_stage, out, config)
    click.echo(dumps(summary))


@main.command()
@click.option("--out", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def remediate(out, config_path):
    """Aggregate episodes into the health report."""
    config = _load_config(out, config_path, None)
    summary = _run_stage(remediate_stage, out, config)
    click.echo(dumps(summary))


@main.command()
@click.option("--out", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--eval-utterances", required=True, type=click.Path(exists=True, dir_okay=False),
              help="held-out utterances file (JSON map intent -> utterances)")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def retrain(out, eval_utterances, config_path):
    """Augment training sets with failing queries, retrain, compare F1."""
    config = _load_config(out, config_path, None)
    summary = _run_stage(retrain_stage, out, eval_utterances, config)
    click.echo(_format_comparison(summary))


def _format_comparison(summary: dict) -> str:
    lines = ["intent  train-orig  train-aug  F1 before         F1 after          gain"]
    for intent, row in summary["intents"].items():
        before, after = row["before"]["f1"], row["after"]["f1"]
        lines.append(
            f"{intent:<7} {row['train_original']:>9}  {row['train_augmented']:>9}  "
            f"{before['point']:.3f} [{before['ci_low']:.3f},{before['ci_high']:.3f}]  "
            f"{after['point']:.3f} [{after['ci_low']:.3f},{after['ci_high']:.3f}]  "
            f"{row['f1_gain']:+.3f}"
        )
    lines.append(
        f"macro F1: {summary['macro_f1_before']:.3f} -> {summary['macro_f1_after']:.3f}"
    )
    return "\n".join(lines)


@main.command()
@click.option("--port", type=int, default=None, help=f"port (default ${PORT_ENV} or 8600)")
@click.option("--db", "db_path", type=click.Path(dir_okay=False), default=None,
              help=f"session store path (default ${DB_ENV} or ./dialogforge.db)")
@click.option("--data-dir", type=click.Path(file_okay=False), default=None,
              help="root directory for session artifacts")
def serve(port, db_path, data_dir):
    """Serve the HTTP API and the review dashboard."""
    import uvicorn

    from .api import create_api
    from .store import SessionStore

    resolved_port = port or int(os.environ.get(PORT_ENV, 8600))
    resolved_db = db_path or os.environ.get(DB_ENV, "dialogforge.db")
    root = Path(data_dir) if data_dir else Path(resolved_db).resolve().parent / "sessions"
    store = SessionStore(resolved_db)
    app = create_api(store, root)
    uvicorn.run(app, host="0.0.0.0", port=resolved_port)


if __name__ == "__main__":
    main()
