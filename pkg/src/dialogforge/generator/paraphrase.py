"""Paraphrase generation for intent queries.

Two providers share one output shape: a rule-based provider that composes
synonym substitution, stopword deletion, leading-phrase prepending and
comma-clause reordering over a bundled lexicon, and an ingestion provider
that reads externally produced paraphrases (e.g. from an LM) verbatim.
Either way, outputs that normalize to their origin and normalized
duplicates are filtered, so every surviving paraphrase is a genuine
variant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import DialogForgeError
from ..schema import IntentDefinition
from ..textnorm import normalize_space


class EmptyLexicon(DialogForgeError):
    """Rule-based mode configured with no usable lexicon."""

    code = "empty_lexicon"


@dataclass
class Lexicon:
    synonyms: dict[str, list[str]]
    stopwords: list[str]
    leading_phrases: list[str]

    @classmethod
    def bundled(cls) -> "Lexicon":
        raw = resources.files("dialogforge.data").joinpath("lexicon.json").read_text("utf-8")
        return cls.from_doc(json.loads(raw))

    @classmethod
    def from_doc(cls, doc: dict) -> "Lexicon":
        return cls(
            synonyms={k: list(v) for k, v in doc.get("synonyms", {}).items()},
            stopwords=list(doc.get("stopwords", [])),
            leading_phrases=list(doc.get("leading_phrases", [])),
        )


@dataclass
class ParaphraseConfig:
    mode: str = "rule_based"  # rule_based | ingest
    max_variants: int = 12
    lexicon_path: str | None = None
    ingest_path: str | None = None


@dataclass
class ParaphraseSet:
    provenance: str
    intents: dict[str, dict[str, list[str]]] = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {"provenance": self.provenance, "intents": self.intents}

    @classmethod
    def from_doc(cls, doc: dict) -> "ParaphraseSet":
        return cls(
            provenance=doc.get("provenance", "ingested"),
            intents={
                intent: {origin: list(paras) for origin, paras in origins.items()}
                for intent, origins in doc.get("intents", {}).items()
            },
        )

    def count(self, intent: str | None = None) -> int:
        names = [intent] if intent else list(self.intents)
        return sum(len(p) for n in names for p in self.intents.get(n, {}).values())


def _synonym_variants(words: list[str], lexicon: Lexicon) -> list[str]:
    """Single-position substitutions in position order, then the all-positions one."""
    variants: list[str] = []
    hits = [(i, lexicon.synonyms[w]) for i, w in enumerate(words) if w in lexicon.synonyms]
    for i, synonyms in hits:
        for synonym in synonyms:
            swapped = list(words)
            swapped[i] = synonym
            variants.append(" ".join(swapped))
    if len(hits) > 1:
        swapped = list(words)
        for i, synonyms in hits:
            swapped[i] = synonyms[0]
        variants.append(" ".join(swapped))
    return variants


def _delete_stopwords(text: str, stopwords: set[str]) -> str | None:
    words = text.split()
    kept = [w for w in words if w.lower().strip(",.!?") not in stopwords]
    if len(kept) == len(words) or len(kept) < 2:
        return None
    return " ".join(kept)


def _reorder_commas(text: str) -> str | None:
    if ", " not in text:
        return None
    head, tail = text.split(", ", 1)
    if not head or not tail:
        return None
    return f"{tail}, {head}"


def rule_based_paraphrases(utterance: str, lexicon: Lexicon, max_variants: int) -> list[str]:
    """Deterministic composition of the four rewrite rules, capped."""
    base = normalize_space(utterance)
    words = base.split()
    stopwords = set(lexicon.stopwords)

    synonym_forms = _synonym_variants(words, lexicon)
    ordered: list[str] = list(synonym_forms)

    for form in [base] + synonym_forms:
        reordered = _reorder_commas(form)
        if reordered:
            ordered.append(reordered)

    deleted_forms: list[str] = []
    for form in [base] + synonym_forms:
        shortened = _delete_stopwords(form, stopwords)
        if shortened:
            deleted_forms.append(shortened)
    ordered.extend(deleted_forms)

    for phrase in lexicon.leading_phrases:
        for form in [base] + synonym_forms + deleted_forms:
            bare = phrase.rstrip(",:")
            if form.startswith(bare):
                continue
            ordered.append(f"{phrase} {form}")

    origin_norm = normalize_space(utterance)
    out: list[str] = []
    seen: set[str] = set()
    for variant in ordered:
        key = normalize_space(variant)
        if key == origin_norm or key in seen:
            continue
        seen.add(key)
        out.append(variant)
        if len(out) >= max_variants:
            break
    return out


def generate_paraphrases(
    intents: list[IntentDefinition], config: ParaphraseConfig | None = None
) -> ParaphraseSet:
    """Paraphrase every training utterance of every intent."""
    config = config or ParaphraseConfig()
    if config.mode == "ingest":
        return ingest_paraphrases(config.ingest_path, intents=intents)

    if config.lexicon_path:
        lexicon = Lexicon.from_doc(json.loads(Path(config.lexicon_path).read_text("utf-8")))
    else:
        lexicon = Lexicon.bundled()
    if not lexicon.synonyms and not lexicon.stopwords and not lexicon.leading_phrases:
        raise EmptyLexicon("rule-based paraphrasing configured with an empty lexicon")

    pset = ParaphraseSet(provenance="rule_based")
    for intent in intents:
        origins: dict[str, list[str]] = {}
        for utterance in intent.training_utterances:
            variants = rule_based_paraphrases(utterance, lexicon, config.max_variants)
            if variants:
                origins[utterance] = variants
        pset.intents[intent.name] = origins
    return pset


def ingest_paraphrases(path: str | Path | None, intents: list[IntentDefinition] | None = None) -> ParaphraseSet:
    """Read an external paraphrase file, filtering duplicates and origins."""
    if path is None:
        raise EmptyLexicon("ingestion mode requires a paraphrase file path")
    doc = json.loads(Path(path).read_text("utf-8"))
    known = {i.name for i in intents} if intents is not None else None
    pset = ParaphraseSet(provenance="ingested")
    for intent_name, origins in doc.items():
        if known is not None and intent_name not in known:
            continue
        cleaned: dict[str, list[str]] = {}
        for origin, paraphrases in origins.items():
            origin_norm = normalize_space(origin)
            seen: set[str] = set()
            kept: list[str] = []
            for paraphrase in paraphrases:
                key = normalize_space(paraphrase)
                if key == origin_norm or key in seen or not key:
                    continue
                seen.add(key)
                kept.append(paraphrase)
            if kept:
                cleaned[origin] = kept
        pset.intents[intent_name] = cleaned
    return pset
