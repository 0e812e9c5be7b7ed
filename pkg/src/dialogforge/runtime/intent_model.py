"""TF-IDF nearest-centroid intent classifier for the reference runtime.

Deliberately simple: deterministic to train, improves under training-data
augmentation and misclassifies genuinely hard paraphrases, which is
exactly the behavior the augment-and-retrain loop needs to demonstrate.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..errors import DialogForgeError
from ..schema import IntentDefinition
from ..textnorm import tokenize


class EmptyTrainingSet(DialogForgeError):
    code = "empty_training_set"


@dataclass
class IntentModel:
    intent_names: list[str]  # sorted; ties in classify resolve to the first row
    vocabulary: dict[str, int]
    idf: np.ndarray
    centroids: np.ndarray  # shape (n_intents, n_terms), rows L2-normalized
    confidence_threshold: float = 0.3
    warnings: list[str] = field(default_factory=list)

    def vectorize(self, text: str) -> np.ndarray:
        vec = np.zeros(len(self.vocabulary))
        for term, count in Counter(tokenize(text)).items():
            idx = self.vocabulary.get(term)
            if idx is not None:
                vec[idx] = count * self.idf[idx]
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec


def train_intent_model(
    intents: list[IntentDefinition] | dict[str, list[str]],
    confidence_threshold: float = 0.3,
) -> IntentModel:
    """Train centroids from training utterances.

    Accepts IntentDefinitions or a plain ``{intent: [utterances]}`` map
    (the augmented-retraining path).
    """
    if isinstance(intents, dict):
        training = {name: list(utts) for name, utts in intents.items()}
    else:
        training = {i.name: list(i.training_utterances) for i in intents}
    if not training or any(not utts for utts in training.values()):
        raise EmptyTrainingSet("every intent needs at least one training utterance")

    warnings_out: list[str] = []
    seen: dict[str, str] = {}
    for name in sorted(training):
        for utterance in training[name]:
            key = " ".join(tokenize(utterance))
            if key in seen and seen[key] != name:
                warnings_out.append(
                    f"utterance {utterance!r} appears in both {seen[key]!r} and {name!r}; "
                    "ties break lexicographically"
                )
            else:
                seen.setdefault(key, name)

    docs = [(name, tokenize(u)) for name in sorted(training) for u in training[name]]
    vocabulary = {term: i for i, term in enumerate(sorted({t for _, ts in docs for t in ts}))}
    n_docs = len(docs)
    df = np.zeros(len(vocabulary))
    for _, terms in docs:
        for term in set(terms):
            df[vocabulary[term]] += 1
    # classic log(N/df): terms shared across intents shrink towards zero
    # weight so short utterances are decided by their rare content words
    idf = np.log(n_docs / df)

    intent_names = sorted(training)
    centroids = np.zeros((len(intent_names), len(vocabulary)))
    for row, name in enumerate(intent_names):
        for utterance in training[name]:
            vec = np.zeros(len(vocabulary))
            for term, count in Counter(tokenize(utterance)).items():
                vec[vocabulary[term]] = count * idf[vocabulary[term]]
            norm = np.linalg.norm(vec)
            if norm > 0:
                vec /= norm
            centroids[row] += vec
        norm = np.linalg.norm(centroids[row])
        if norm > 0:
            centroids[row] /= norm

    return IntentModel(
        intent_names=intent_names,
        vocabulary=vocabulary,
        idf=idf,
        centroids=centroids,
        confidence_threshold=confidence_threshold,
        warnings=warnings_out,
    )


def classify(model: IntentModel, query: str) -> tuple[str | None, float]:
    """Cosine to each centroid; ``(None, score)`` marks the fallback path."""
    vec = model.vectorize(query)
    if not np.any(vec):
        return None, 0.0
    scores = model.centroids @ vec
    best = int(np.argmax(scores))
    confidence = float(scores[best])
    if confidence < model.confidence_threshold:
        return None, confidence
    return model.intent_names[best], confidence


def evaluate(
    model: IntentModel, labelled_queries: list[tuple[str, str]]
) -> list[tuple[str, str | None]]:
    """(true intent, predicted intent or None) for each (query, intent) pair."""
    out = []
    for query, true_intent in labelled_queries:
        predicted, _ = classify(model, query)
        out.append((true_intent, predicted))
    return out


def accuracy(pairs: list[tuple[str, str | None]]) -> float:
    if not pairs:
        return 0.0
    return sum(1 for t, p in pairs if t == p) / len(pairs)


def macro_f1(pairs: list[tuple[str, str | None]]) -> float:
    """Macro F1 over true labels; fallback predictions count as misses."""
    labels = sorted({t for t, _ in pairs})
    if not labels:
        return 0.0
    scores = []
    for label in labels:
        tp = sum(1 for t, p in pairs if t == label and p == label)
        fp = sum(1 for t, p in pairs if t != label and p == label)
        fn = sum(1 for t, p in pairs if t == label and p != label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        scores.append(f1)
    return float(sum(scores) / len(scores))


def idf_weight(n_docs: int, doc_frequency: int) -> float:
    """The idf used by the model (exposed for tests)."""
    return math.log(n_docs / doc_frequency)
