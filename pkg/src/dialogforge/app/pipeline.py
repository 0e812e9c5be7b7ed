"""Stage implementations shared by the CLI and the HTTP API.

Every stage reads its predecessor's artifacts from one working directory
and writes its own through the canonical JSON writer, so the CLI-stage
composition and the API-driven pipeline produce byte-identical artifacts
for identical configs and seeds.

Artifact layout inside a session directory:
    bot.json               canonical copy of the parsed definition
    config_snapshot.json   config the pipeline was started with
    maps/<Dialog>.json     aggregated dialog-act map per evaluation dialog
    ontology.json          per-dialog entity values
    graph.json             conversation graph (vertices + edges)
    goals.jsonl            simulation goals
    episodes.jsonl         episode records
    simulation_meta.json   injection counters and outcome tallies
    report.json            remediation report
    retrain/               augmented sets and before/after comparison
"""

from __future__ import annotations

import shutil
from pathlib import Path

from ..errors import DialogForgeError
from ..generator import (
    DialogActMap,
    Ontology,
    aggregate_map,
    build_graph,
    extract_ontology,
    generate_goals,
    generate_paraphrases,
    infer_success_acts,
    pools_from_paraphrases,
    pools_from_training,
)
from ..generator.goals import SimulationGoal, UnrevisedMapError
from ..jsonio import dump_json, dump_jsonl, load_json, load_jsonl
from ..remediator import compose_report
from ..remediator.report import bootstrap_label_scores
from ..runtime import (
    BotRuntime,
    InProcessClient,
    classify,
    train_intent_model,
)
from ..schema import BotDefinition, load_bot_definition, serialize
from ..simulator import (
    EpisodeRecord,
    HttpChatClient,
    ResponseTemplateSet,
    SimulatorConfig,
    run_simulation,
)
from .config import PipelineConfig

BOT_FILE = "bot.json"
CONFIG_FILE = "config_snapshot.json"
MAPS_DIR = "maps"
ONTOLOGY_FILE = "ontology.json"
GRAPH_FILE = "graph.json"
GOALS_FILE = "goals.jsonl"
EPISODES_FILE = "episodes.jsonl"
SIMULATION_META_FILE = "simulation_meta.json"
REPORT_FILE = "report.json"
RETRAIN_DIR = "retrain"


class StageOrderError(DialogForgeError):
    """A stage ran before its predecessor produced the required artifacts."""

    code = "stage_order"


class OutputExistsError(DialogForgeError):
    """Refusing to overwrite existing artifacts without --force."""

    code = "output_exists"


def _require(path: Path, what: str) -> Path:
    if not path.exists():
        raise StageOrderError(f"missing {what}: run the previous stage first", path=str(path))
    return path


def dialog_to_intent(definition: BotDefinition) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for intent in definition.intents:
        mapping.setdefault(intent.entry_dialog, intent.name)
    return mapping


# ---------------------------------------------------------------------------
# parse


def parse_stage(
    bot_path: str | Path,
    out_dir: str | Path,
    config: PipelineConfig | None = None,
    utterances_sidecar: str | Path | None = None,
    force: bool = False,
) -> dict:
    """Parse + aggregate + infer + extract; writes maps, ontology and graph."""
    config = config or PipelineConfig()
    out = Path(out_dir)
    maps_dir = out / MAPS_DIR
    if maps_dir.exists():
        if not force:
            raise OutputExistsError(
                f"{maps_dir} already exists; pass force to overwrite", path=str(maps_dir)
            )
        shutil.rmtree(maps_dir)
    out.mkdir(parents=True, exist_ok=True)
    maps_dir.mkdir()

    definition = load_bot_definition(bot_path, utterance_sidecar=utterances_sidecar)
    graph = build_graph(definition)

    evaluation_dialogs = []
    seen = set()
    for intent in definition.intents:
        if intent.entry_dialog not in seen:
            seen.add(intent.entry_dialog)
            evaluation_dialogs.append(intent.entry_dialog)

    maps: dict[str, DialogActMap] = {}
    for dialog_name in evaluation_dialogs:
        aggregated = aggregate_map(graph, dialog_name, list(definition.success_dialogs))
        intent_success, dialog_success = infer_success_acts(
            definition.dialog(dialog_name), graph, list(definition.success_dialogs)
        )
        aggregated.intent_success_message = intent_success
        aggregated.dialog_success_message = dialog_success
        maps[dialog_name] = aggregated
        dump_json(maps_dir / f"{dialog_name}.json", aggregated.to_doc())

    ontology = extract_ontology(definition, maps, config.seed, config.ontology)
    dump_json(out / ONTOLOGY_FILE, ontology.to_doc())
    dump_json(out / GRAPH_FILE, graph.to_doc())
    dump_json(out / BOT_FILE, serialize(definition))
    dump_json(out / CONFIG_FILE, config.to_doc())

    return {
        "dialogs": len(definition.dialogs),
        "evaluation_dialogs": evaluation_dialogs,
        "intents": [i.name for i in definition.intents],
        "map_files": [f"{MAPS_DIR}/{d}.json" for d in evaluation_dialogs],
        "edges": len(graph.edges),
    }


def load_maps(out_dir: str | Path) -> dict[str, DialogActMap]:
    maps_dir = _require(Path(out_dir) / MAPS_DIR, "dialog-act maps")
    maps = {}
    for path in sorted(maps_dir.glob("*.json")):
        dact = DialogActMap.from_doc(load_json(path))
        maps[dact.dialog] = dact
    if not maps:
        raise StageOrderError("dialog-act map directory is empty", path=str(maps_dir))
    return maps


def save_maps(out_dir: str | Path, maps: dict[str, DialogActMap]) -> None:
    maps_dir = Path(out_dir) / MAPS_DIR
    maps_dir.mkdir(parents=True, exist_ok=True)
    for dialog, dact in maps.items():
        dump_json(maps_dir / f"{dialog}.json", dact.to_doc())


def load_definition(out_dir: str | Path) -> BotDefinition:
    return load_bot_definition(_require(Path(out_dir) / BOT_FILE, "parsed bot definition"))


def load_ontology(out_dir: str | Path) -> Ontology:
    return Ontology.from_doc(load_json(_require(Path(out_dir) / ONTOLOGY_FILE, "ontology")))


# ---------------------------------------------------------------------------
# generate


def generate_stage(out_dir: str | Path, config: PipelineConfig | None = None) -> dict:
    """Paraphrase (or reuse training utterances) and emit simulation goals.

    Refuses to run on maps that have not been marked revised: reviewing the
    inferred golden labels is the pipeline's one mandatory human step.
    """
    config = config or PipelineConfig()
    out = Path(out_dir)
    maps = load_maps(out)
    for dact in maps.values():
        if not dact.revised:
            raise UnrevisedMapError(
                f"dialog-act map for {dact.dialog!r} has not been reviewed; "
                "revise it (or confirm it unchanged) before generating goals",
                dialog=dact.dialog,
            )
    ontology = load_ontology(out)
    definition = load_definition(out)

    paraphrase_count = 0
    if config.goal_source == "training":
        pools = pools_from_training(definition)
    else:
        pset = generate_paraphrases(list(definition.intents), config.paraphrase)
        paraphrase_count = pset.count()
        pools = pools_from_paraphrases(definition, pset)

    goals = generate_goals(maps, ontology, pools, config.per_intent_cap, config.seed)
    dump_jsonl(out / GOALS_FILE, (g.to_doc() for g in goals))
    per_intent: dict[str, int] = {}
    for goal in goals:
        per_intent[goal.dialog] = per_intent.get(goal.dialog, 0) + 1
    return {
        "goals": len(goals),
        "per_dialog": dict(sorted(per_intent.items())),
        "paraphrases": paraphrase_count,
        "source": config.goal_source,
    }


def load_goals(out_dir: str | Path) -> list[SimulationGoal]:
    path = _require(Path(out_dir) / GOALS_FILE, "goals file")
    return [SimulationGoal.from_doc(doc) for doc in load_jsonl(path)]


# ---------------------------------------------------------------------------
# simulate


def simulate_stage(out_dir: str | Path, config: PipelineConfig | None = None) -> dict:
    """Run every goal against the configured runtime and log the episodes."""
    config = config or PipelineConfig()
    out = Path(out_dir)
    goals = load_goals(out)
    maps = load_maps(out)
    definition = load_definition(out)
    templates = ResponseTemplateSet.bundled()

    simulator_config = SimulatorConfig(
        fuzzy_threshold=config.fuzzy_threshold,
        max_turns=config.max_turns,
        nlg_seed=config.seed,
        dialog_to_intent=dialog_to_intent(definition),
    )

    runtime = None
    if config.runtime_endpoint:
        client = HttpChatClient(config.runtime_endpoint)
    else:
        model = train_intent_model(list(definition.intents), config.confidence_threshold)
        runtime = BotRuntime(definition, model, config.injection)
        client = InProcessClient(runtime)

    episodes = run_simulation(
        goals, maps, templates, client, simulator_config, parallelism=config.parallelism
    )
    dump_jsonl(out / EPISODES_FILE, (e.to_doc() for e in episodes))

    outcomes: dict[str, int] = {}
    for episode in episodes:
        outcomes[episode.outcome] = outcomes.get(episode.outcome, 0) + 1
    meta = {
        "episodes": len(episodes),
        "outcomes": dict(sorted(outcomes.items())),
        "injections": {
            "total": len(runtime.injection_log) if runtime else None,
            "by_entity": runtime.injection_counts() if runtime else None,
        },
    }
    dump_json(out / SIMULATION_META_FILE, meta)
    return meta


def load_episodes(out_dir: str | Path) -> list[EpisodeRecord]:
    path = _require(Path(out_dir) / EPISODES_FILE, "episodes file")
    return [EpisodeRecord.from_doc(doc) for doc in load_jsonl(path)]


# ---------------------------------------------------------------------------
# remediate


def remediate_stage(
    out_dir: str | Path,
    config: PipelineConfig | None = None,
    history: list[dict] | None = None,
) -> dict:
    """Aggregate episodes into the health report."""
    config = config or PipelineConfig()
    out = Path(out_dir)
    episodes = load_episodes(out)
    definition = load_definition(out)
    graph_doc = load_json(_require(out / GRAPH_FILE, "graph file"))

    report = compose_report(
        episodes,
        label_map=dialog_to_intent(definition),
        history=history or [],
        graph_doc=graph_doc,
        success_dialogs=list(definition.success_dialogs),
        iterations=config.bootstrap_iterations,
        level=config.bootstrap_level,
        seed=config.seed,
        merge_threshold=config.merge_threshold,
    )
    dump_json(out / REPORT_FILE, report)
    return {
        "completion_rate": report["summary"]["completion_rate"],
        "macro_f1": report["summary"]["macro_f1"],
        "suggestions": len(report["intent_remediation"]),
    }


# ---------------------------------------------------------------------------
# retrain


def retrain_stage(
    out_dir: str | Path,
    eval_utterances_path: str | Path,
    config: PipelineConfig | None = None,
) -> dict:
    """Augment-and-retrain loop over the reference runtime's intent model.

    The training sets are extended with the simulated queries the model got
    wrong, a fresh model is trained, and both models are scored on the
    held-out utterances (per-intent F1 with bootstrap CIs).
    """
    from ..remediator.rootcause import is_intent_failure

    config = config or PipelineConfig()
    out = Path(out_dir)
    episodes = load_episodes(out)
    definition = load_definition(out)
    eval_doc = load_json(_require(Path(eval_utterances_path), "held-out utterances file"))

    labels = dialog_to_intent(definition)
    original = {i.name: list(i.training_utterances) for i in definition.intents}

    augmented = {name: list(utts) for name, utts in original.items()}
    added: dict[str, int] = {name: 0 for name in augmented}
    for episode in episodes:
        if episode.outcome == "aborted" or not is_intent_failure(episode):
            continue
        intent = labels.get(episode.goal.dialog)
        if intent is None:
            continue
        query = episode.goal.intent_query
        if query not in augmented[intent]:
            augmented[intent].append(query)
            added[intent] += 1

    model_before = train_intent_model(original, config.confidence_threshold)
    model_after = train_intent_model(augmented, config.confidence_threshold)

    pairs_before: list[tuple[str, str | None]] = []
    pairs_after: list[tuple[str, str | None]] = []
    for intent_name, utterances in sorted(eval_doc.items()):
        for utterance in utterances:
            pairs_before.append((intent_name, classify(model_before, utterance)[0]))
            pairs_after.append((intent_name, classify(model_after, utterance)[0]))

    comparison: dict[str, dict] = {}
    for intent_name in sorted(eval_doc):
        before = bootstrap_label_scores(
            pairs_before, intent_name, config.bootstrap_iterations,
            config.bootstrap_level, config.seed,
        )
        after = bootstrap_label_scores(
            pairs_after, intent_name, config.bootstrap_iterations,
            config.bootstrap_level, config.seed,
        )
        comparison[intent_name] = {
            "before": before,
            "after": after,
            "f1_gain": round(after["f1"]["point"] - before["f1"]["point"], 6),
            "train_original": len(original.get(intent_name, [])),
            "train_augmented": len(augmented.get(intent_name, [])),
        }

    retrain_dir = out / RETRAIN_DIR
    retrain_dir.mkdir(parents=True, exist_ok=True)
    dump_json(retrain_dir / "augmented_utterances.json", augmented)
    result = {
        "intents": comparison,
        "added_queries": dict(sorted(added.items())),
        "macro_f1_before": round(
            sum(v["before"]["f1"]["point"] for v in comparison.values()) / len(comparison), 6
        ),
        "macro_f1_after": round(
            sum(v["after"]["f1"]["point"] for v in comparison.values()) / len(comparison), 6
        ),
    }
    dump_json(retrain_dir / "comparison.json", result)
    return result
