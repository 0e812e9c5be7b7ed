"""Episode runner: one simulated conversation per goal.

The loop mirrors a live exchange: the user opens with the intent query,
every bot message of a turn is matched to a dialog act, the agenda policy
produces the user dialog acts, the NLG realizes them and the client ships
the reply, until a terminal outcome. The full trace (matches, user acts,
agenda snapshots) is recorded for the remediator's backtracking.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..generator.goals import SimulationGoal
from ..generator.maps import DialogActMap
from .agenda import (
    ABORTED,
    IN_PROGRESS,
    MAX_TURNS_EXCEEDED,
    AgendaState,
    UserDialogAct,
    advance_turn,
    pop_intent_inform,
)
from .client import ChatClientInterface, TransportError
from .nlg import ResponseTemplateSet, realize
from .nlu import MatchIndex, NLUMatch

EPISODE_SCHEMA_VERSION = 1


@dataclass
class SimulatorConfig:
    fuzzy_threshold: float = 0.85
    max_turns: int = 20
    nlg_seed: int = 0
    dialog_to_intent: dict[str, str] = field(default_factory=dict)


@dataclass
class TurnRecord:
    turn: int
    bot_messages: list[str]
    matches: list[NLUMatch]
    user_acts: list[UserDialogAct]
    user_utterance: str | None
    agenda_after: list[str]

    def to_doc(self) -> dict:
        return {
            "turn": self.turn,
            "bot_messages": self.bot_messages,
            "matches": [m.to_doc() for m in self.matches],
            "user_acts": [a.to_doc() for a in self.user_acts],
            "user_utterance": self.user_utterance,
            "agenda_after": self.agenda_after,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "TurnRecord":
        return cls(
            turn=doc["turn"],
            bot_messages=list(doc.get("bot_messages", [])),
            matches=[NLUMatch.from_doc(m) for m in doc.get("matches", [])],
            user_acts=[
                UserDialogAct(kind=a["kind"], slot=a.get("slot"), value=a.get("value"))
                for a in doc.get("user_acts", [])
            ],
            user_utterance=doc.get("user_utterance"),
            agenda_after=list(doc.get("agenda_after", [])),
        )


@dataclass
class EpisodeRecord:
    goal_id: str
    goal: SimulationGoal
    outcome: str
    turns: list[TurnRecord] = field(default_factory=list)
    error_turn: int | None = None
    error_detail: str | None = None
    predicted_dialog: str | None = None
    predicted_intent: str | None = None
    informed: dict[str, str] = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {
            "schema_version": EPISODE_SCHEMA_VERSION,
            "goal_id": self.goal_id,
            "goal": self.goal.to_doc(),
            "outcome": self.outcome,
            "error_turn": self.error_turn,
            "error_detail": self.error_detail,
            "predicted_dialog": self.predicted_dialog,
            "predicted_intent": self.predicted_intent,
            "informed": self.informed,
            "turns": [t.to_doc() for t in self.turns],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "EpisodeRecord":
        return cls(
            goal_id=doc["goal_id"],
            goal=SimulationGoal.from_doc(doc["goal"]),
            outcome=doc["outcome"],
            turns=[TurnRecord.from_doc(t) for t in doc.get("turns", [])],
            error_turn=doc.get("error_turn"),
            error_detail=doc.get("error_detail"),
            predicted_dialog=doc.get("predicted_dialog"),
            predicted_intent=doc.get("predicted_intent"),
            informed=dict(doc.get("informed", {})),
        )


def _realize_turn(
    acts: list[UserDialogAct], templates: ResponseTemplateSet, rng: random.Random
) -> str:
    parts = [realize(act, templates, rng) for act in acts if act.kind != "bye"]
    return ". ".join(p for p in parts if p)


def run_episode(
    goal: SimulationGoal,
    maps: dict[str, DialogActMap],
    templates: ResponseTemplateSet,
    client: ChatClientInterface,
    config: SimulatorConfig | None = None,
) -> EpisodeRecord:
    """Drive one conversation to a terminal outcome, recording the trace."""
    config = config or SimulatorConfig()
    index = MatchIndex(maps)
    dact_map = maps[goal.dialog]
    state = AgendaState(goal=goal)
    rng = random.Random(f"{config.nlg_seed}:{goal.goal_id}")
    record = EpisodeRecord(goal_id=goal.goal_id, goal=goal, outcome=IN_PROGRESS)

    session_id: str | None = None
    try:
        session_id = client.start_session(hint=goal.goal_id)

        # the user always opens with the intent query
        opening = pop_intent_inform(state)
        utterance = realize(opening, templates, rng)
        record.turns.append(
            TurnRecord(0, [], [], [opening], utterance, list(state.agenda))
        )
        messages, closed = client.send(session_id, utterance)

        while True:
            state.turn_index += 1
            matches = [
                index.match(m, goal.dialog, config.fuzzy_threshold) for m in messages
            ]
            acts = advance_turn(state, matches, dact_map)
            turn = TurnRecord(
                state.turn_index, list(messages), matches, acts, None, list(state.agenda)
            )
            record.turns.append(turn)

            if state.terminal():
                break
            if state.turn_index >= config.max_turns:
                state.outcome = MAX_TURNS_EXCEEDED
                state.error_turn = state.turn_index
                state.error_detail = f"no terminal outcome within {config.max_turns} turns"
                break
            if closed:
                # runtime hung up without a recognizable terminal message
                state.outcome = "other_error"
                state.error_turn = state.turn_index
                state.error_detail = "session closed by runtime without a terminal match"
                break

            utterance = _realize_turn(acts, templates, rng) or "ok"
            turn.user_utterance = utterance
            messages, closed = client.send(session_id, utterance)
    except TransportError as exc:
        record.outcome = ABORTED
        record.error_detail = str(exc)
        record.error_turn = state.turn_index
        record.informed = dict(state.informed)
        return record
    finally:
        if session_id is not None:
            try:
                client.end(session_id)
            except TransportError:
                pass

    record.outcome = state.outcome
    record.error_turn = state.error_turn
    record.error_detail = state.error_detail
    record.predicted_dialog = state.predicted_dialog
    record.informed = dict(state.informed)
    if state.predicted_dialog is not None:
        record.predicted_intent = config.dialog_to_intent.get(
            state.predicted_dialog, state.predicted_dialog
        )
    return record


def run_simulation(
    goals: list[SimulationGoal],
    maps: dict[str, DialogActMap],
    templates: ResponseTemplateSet,
    client: ChatClientInterface,
    config: SimulatorConfig | None = None,
    parallelism: int = 1,
) -> list[EpisodeRecord]:
    """Run every goal; output order equals goal order regardless of scheduling.

    Transport failures abort their own episode (outcome ``aborted``) without
    taking the batch down.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    if not goals:
        return []
    if parallelism == 1:
        return [run_episode(g, maps, templates, client, config) for g in goals]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = [
            pool.submit(run_episode, goal, maps, templates, client, config)
            for goal in goals
        ]
        return [f.result() for f in futures]
