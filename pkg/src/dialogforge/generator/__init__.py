"""Bot-definition parsing, graph aggregation, ontology, paraphrases, goals."""

from .goals import QueryPool, SimulationGoal, UnrevisedMapError, generate_goals
from .goals import pools_from_paraphrases, pools_from_training
from .graph import ConversationGraph, NoPathError, aggregate_map, build_graph
from .maps import (
    DialogActMap,
    HeuristicUnavailable,
    RevisionDocument,
    UnknownTarget,
    apply_revisions,
    infer_success_acts,
    parse_local_maps,
)
from .ontology import MissingOntologyValue, Ontology, OntologyConfig, extract_ontology
from .paraphrase import (
    EmptyLexicon,
    Lexicon,
    ParaphraseConfig,
    ParaphraseSet,
    generate_paraphrases,
    ingest_paraphrases,
)

__all__ = [
    "ConversationGraph",
    "DialogActMap",
    "EmptyLexicon",
    "HeuristicUnavailable",
    "Lexicon",
    "MissingOntologyValue",
    "NoPathError",
    "Ontology",
    "OntologyConfig",
    "ParaphraseConfig",
    "ParaphraseSet",
    "QueryPool",
    "RevisionDocument",
    "SimulationGoal",
    "UnknownTarget",
    "UnrevisedMapError",
    "aggregate_map",
    "apply_revisions",
    "build_graph",
    "extract_ontology",
    "generate_goals",
    "generate_paraphrases",
    "infer_success_acts",
    "ingest_paraphrases",
    "parse_local_maps",
    "pools_from_paraphrases",
    "pools_from_training",
]
