"""Reference bot runtime: executes a BotDefinition over a chat channel.

The first user message routes through the intent model to the intent's
entry dialog; subsequent messages feed the pending Collect/Confirm step.
Entity extraction is pattern-based per entity kind, and a configurable
injection layer discards successful extractions with a given probability
(re-emitting the Collect prompt), which is the observable symptom of an
NER failure through the chat channel.
"""

from __future__ import annotations

import random
import re
import threading
from dataclasses import dataclass, field

from ..errors import DialogForgeError
from ..schema import BotDefinition, DialogDefinition, EntityDefinition
from ..simulator.client import ChatClientInterface, TransportError
from .intent_model import IntentModel, classify

FALLBACK_MESSAGE = "Sorry, I didn't understand that. Could you rephrase?"

_EMAIL = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")
_NUMBER = re.compile(r"\d+")
_ALNUM_ID = re.compile(r"\b[A-Za-z0-9]{6,}\b")
_AFFIRMATIONS = {"yes", "yeah", "yep", "correct", "right", "sure", "ok", "okay"}
_NEGATIONS = {"no", "not", "nope", "wrong", "incorrect"}
_PLACEHOLDER = re.compile(r"\{([A-Za-z0-9_]+)\}")

# guard against router loops in unvalidated hand-written definitions
_MAX_DIALOG_HOPS = 25


class SessionClosed(DialogForgeError):
    code = "session_closed"


@dataclass
class ErrorInjectionConfig:
    ner_miss_probability: dict[str, float] = field(default_factory=dict)
    default_miss_probability: float = 0.0
    forced_intent_map: dict[str, str] = field(default_factory=dict)
    seed: int = 0

    def probability_for(self, entity: str) -> float:
        return self.ner_miss_probability.get(entity, self.default_miss_probability)

    @classmethod
    def from_doc(cls, doc: dict) -> "ErrorInjectionConfig":
        probs = doc.get("ner_miss_probability", {})
        if isinstance(probs, (int, float)):
            return cls(
                default_miss_probability=float(probs),
                forced_intent_map=dict(doc.get("forced_intent_map", {})),
                seed=int(doc.get("seed", 0)),
            )
        return cls(
            ner_miss_probability={k: float(v) for k, v in probs.items()},
            default_miss_probability=float(doc.get("default_miss_probability", 0.0)),
            forced_intent_map=dict(doc.get("forced_intent_map", {})),
            seed=int(doc.get("seed", 0)),
        )


@dataclass
class RuntimeSession:
    session_id: str
    hint: str | None
    rng: random.Random
    current_dialog: str | None = None
    pending_step: int = 0
    collected: dict[str, str] = field(default_factory=dict)
    closed: bool = False


def extract_entity(entity: EntityDefinition, text: str) -> str | None:
    if entity.kind == "email":
        found = _EMAIL.search(text)
        return found.group(0) if found else None
    if entity.kind == "number":
        found = _NUMBER.search(text)
        return found.group(0) if found else None
    if entity.kind == "alphanumeric_id":
        for token in _ALNUM_ID.findall(text):
            if any(c.isdigit() for c in token) or token.isupper():
                return token
        return None
    if entity.kind == "enumeration":
        lowered = text.lower()
        for value in entity.values:
            if value.lower() in lowered:
                return value
        return None
    return text.strip() or None  # free_text: verbatim


class BotRuntime:
    """Executes a definition; sessions are isolated and lock-protected."""

    def __init__(
        self,
        definition: BotDefinition,
        model: IntentModel,
        injection: ErrorInjectionConfig | None = None,
    ):
        self.definition = definition
        self.model = model
        self.injection = injection or ErrorInjectionConfig()
        self.sessions: dict[str, RuntimeSession] = {}
        self.injection_log: list[tuple[str, str]] = []  # (session_id, entity)
        self._lock = threading.Lock()
        self._counter = 0

    # -- session lifecycle --------------------------------------------------

    def start_session(self, hint: str | None = None) -> RuntimeSession:
        with self._lock:
            self._counter += 1
            session_id = f"s-{self._counter:06d}"
        # seeding by hint keeps injection streams per-goal deterministic
        # regardless of the order concurrent sessions are opened in
        rng = random.Random(f"{self.injection.seed}:{hint or session_id}")
        session = RuntimeSession(session_id=session_id, hint=hint, rng=rng)
        with self._lock:
            self.sessions[session_id] = session
        return session

    def end_session(self, session_id: str) -> None:
        with self._lock:
            self.sessions.pop(session_id, None)

    def injection_counts(self) -> dict[str, int]:
        with self._lock:
            counts: dict[str, int] = {}
            for _, entity in self.injection_log:
                counts[entity] = counts.get(entity, 0) + 1
            return counts

    # -- turn handling ------------------------------------------------------

    def step_session(self, session_id: str, text: str) -> tuple[list[str], bool]:
        with self._lock:
            session = self.sessions.get(session_id)
        if session is None or session.closed:
            raise SessionClosed(f"session {session_id!r} is not live", session_id=session_id)

        if session.current_dialog is None:
            return self._route_intent(session, text)
        return self._consume_input(session, text)

    def _route_intent(self, session: RuntimeSession, text: str) -> tuple[list[str], bool]:
        intent_name = self._forced_intent(text)
        if intent_name is None:
            intent_name, _confidence = classify(self.model, text)
        if intent_name is None:
            return [FALLBACK_MESSAGE], False
        entry = None
        for intent in self.definition.intents:
            if intent.name == intent_name:
                entry = intent.entry_dialog
                break
        if entry is None:
            return [FALLBACK_MESSAGE], False
        session.current_dialog = entry
        session.pending_step = 0
        return self._emit_until_input(session, [])

    def _forced_intent(self, text: str) -> str | None:
        lowered = text.lower()
        for fragment, intent in self.injection.forced_intent_map.items():
            if fragment.lower() in lowered:
                return intent
        return None

    def _consume_input(self, session: RuntimeSession, text: str) -> tuple[list[str], bool]:
        dialog = self.definition.dialog(session.current_dialog)
        step = dialog.steps[session.pending_step]
        prompt = self._render(step.text, session)

        if step.action == "Collect":
            entity = self.definition.entity(step.entity_type or step.slot)
            value = extract_entity(entity, text)
            if value is None:
                return [prompt], False  # genuine extraction miss: re-request
            if session.rng.random() < self.injection.probability_for(entity.name):
                with self._lock:
                    self.injection_log.append((session.session_id, entity.name))
                return [prompt], False  # injected NER miss: discard and re-request
            session.collected[step.slot] = value
            session.pending_step += 1
            return self._emit_until_input(session, [])

        if step.action == "Confirm":
            tokens = set(re.sub(r"[^\w\s]", "", text.lower()).split())
            if tokens & _AFFIRMATIONS and not tokens & _NEGATIONS:
                session.pending_step += 1
                return self._emit_until_input(session, [])
            return [prompt], False

        # a pending Say step should not happen; emit and continue defensively
        return self._emit_until_input(session, [])

    def _emit_until_input(
        self, session: RuntimeSession, messages: list[str]
    ) -> tuple[list[str], bool]:
        hops = 0
        while True:
            dialog = self.definition.dialog(session.current_dialog)
            if session.pending_step < len(dialog.steps):
                step = dialog.steps[session.pending_step]
                if step.action == "Say":
                    messages.append(self._render(step.text, session))
                    session.pending_step += 1
                    continue
                messages.append(self._render(step.text, session))
                return messages, False  # Collect/Confirm await user input
            nxt = self._next_dialog(dialog)
            if nxt is None:
                session.closed = True
                return messages, True
            session.current_dialog = nxt
            session.pending_step = 0
            hops += 1
            if hops > _MAX_DIALOG_HOPS:
                messages.append(FALLBACK_MESSAGE)
                session.closed = True
                return messages, True

    def _next_dialog(self, dialog: DialogDefinition) -> str | None:
        for condition in ("on_success", "always"):
            for rule in dialog.transitions:
                if rule.condition == condition:
                    return rule.target
        return None

    def _render(self, text: str, session: RuntimeSession) -> str:
        return _PLACEHOLDER.sub(
            lambda m: session.collected.get(m.group(1), m.group(0)), text
        )


class InProcessClient(ChatClientInterface):
    """ChatClientInterface over a runtime in the same process (no network)."""

    def __init__(self, runtime: BotRuntime):
        self.runtime = runtime

    def start_session(self, hint: str | None = None) -> str:
        return self.runtime.start_session(hint).session_id

    def send(self, session_id: str, text: str) -> tuple[list[str], bool]:
        try:
            return self.runtime.step_session(session_id, text)
        except SessionClosed as exc:
            raise TransportError(str(exc)) from exc

    def end(self, session_id: str) -> None:
        self.runtime.end_session(session_id)
