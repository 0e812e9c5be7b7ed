"""Agenda-based user simulation: NLU, policy, NLG, episode runner."""

from .agenda import (
    ABORTED,
    IN_PROGRESS,
    INTENT_ERROR,
    MAX_TURNS_EXCEEDED,
    NER_ERROR,
    OTHER_ERROR,
    SUCCESS,
    TERMINAL_OUTCOMES,
    AgendaState,
    IllegalState,
    UserDialogAct,
    advance_turn,
    next_user_acts,
)
from .client import ChatClientInterface, HttpChatClient, TransportError
from .episode import EpisodeRecord, SimulatorConfig, TurnRecord, run_episode, run_simulation
from .nlg import MissingTemplate, ResponseTemplateSet, realize
from .nlu import MatchIndex, NLUMatch, match_dialog_act, token_set_score

__all__ = [
    "ABORTED",
    "AgendaState",
    "ChatClientInterface",
    "EpisodeRecord",
    "HttpChatClient",
    "IN_PROGRESS",
    "INTENT_ERROR",
    "IllegalState",
    "MAX_TURNS_EXCEEDED",
    "MatchIndex",
    "MissingTemplate",
    "NER_ERROR",
    "NLUMatch",
    "OTHER_ERROR",
    "ResponseTemplateSet",
    "SUCCESS",
    "SimulatorConfig",
    "TERMINAL_OUTCOMES",
    "TransportError",
    "TurnRecord",
    "UserDialogAct",
    "advance_turn",
    "match_dialog_act",
    "next_user_acts",
    "realize",
    "run_episode",
    "run_simulation",
    "token_set_score",
]
