"""Pipeline configuration: one document drives every stage."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..generator.ontology import OntologyConfig
from ..generator.paraphrase import ParaphraseConfig
from ..jsonio import load_json
from ..runtime.session import ErrorInjectionConfig


@dataclass
class PipelineConfig:
    seed: int = 7
    fuzzy_threshold: float = 0.85
    max_turns: int = 20
    parallelism: int = 4
    per_intent_cap: int | None = 100
    goal_source: str = "paraphrases"  # paraphrases | training
    confidence_threshold: float = 0.02
    bootstrap_iterations: int = 10_000
    bootstrap_level: float = 0.95
    merge_threshold: float = 0.1
    runtime_endpoint: str | None = None  # None -> embedded reference runtime
    paraphrase: ParaphraseConfig = field(default_factory=ParaphraseConfig)
    ontology: OntologyConfig = field(default_factory=OntologyConfig)
    injection: ErrorInjectionConfig = field(default_factory=ErrorInjectionConfig)

    def validate(self) -> None:
        if not 0 < self.fuzzy_threshold <= 1:
            raise ValueError("fuzzy_threshold must be in (0, 1]")
        if self.max_turns < 1:
            raise ValueError("max_turns must be >= 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if self.per_intent_cap is not None and self.per_intent_cap < 1:
            raise ValueError("per_intent_cap must be >= 1 or null")
        if self.goal_source not in ("paraphrases", "training"):
            raise ValueError("goal_source must be 'paraphrases' or 'training'")
        if not 0 < self.bootstrap_level < 1:
            raise ValueError("bootstrap_level must be in (0, 1)")
        if self.bootstrap_iterations < 1:
            raise ValueError("bootstrap_iterations must be >= 1")
        if not 0 <= self.confidence_threshold <= 1:
            raise ValueError("confidence_threshold must be in [0, 1]")
        for probability in list(self.injection.ner_miss_probability.values()) + [
            self.injection.default_miss_probability
        ]:
            if not 0 <= probability <= 1:
                raise ValueError("injection probabilities must be in [0, 1]")

    def to_doc(self) -> dict:
        doc = asdict(self)
        doc["ontology"]["number_range"] = list(doc["ontology"]["number_range"])
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "PipelineConfig":
        doc = dict(doc)
        paraphrase = ParaphraseConfig(**doc.pop("paraphrase", {}))
        ontology_doc = doc.pop("ontology", {})
        if "number_range" in ontology_doc:
            ontology_doc["number_range"] = tuple(ontology_doc["number_range"])
        ontology = OntologyConfig(**ontology_doc)
        injection = ErrorInjectionConfig.from_doc(doc.pop("injection", {}))
        config = cls(**doc, paraphrase=paraphrase, ontology=ontology, injection=injection)
        config.validate()
        return config

    @classmethod
    def load(cls, path: str | Path | None) -> "PipelineConfig":
        if path is None:
            return cls()
        return cls.from_doc(load_json(path))
