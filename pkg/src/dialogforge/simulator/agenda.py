"""Agenda-based user policy.

The simulated user keeps a stack of pending dialog acts: a report-success
sentinel at the bottom and the initial intent inform on top. Bot dialog
acts (from the fuzzy NLU) drive rule-based transitions that emit user
dialog acts, grow the informed-slot record and decide the terminal
outcome. The rules live in :func:`next_user_acts` so alternative policies
can replace them wholesale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import DialogForgeError
from ..generator.goals import SimulationGoal
from ..generator.maps import DialogActMap
from .nlu import DIALOG_SUCCESS, INTENT_SUCCESS, UNMATCHED, NLUMatch, act_priority

IN_PROGRESS = "in_progress"
SUCCESS = "success"
INTENT_ERROR = "intent_error"
NER_ERROR = "ner_error"
OTHER_ERROR = "other_error"
MAX_TURNS_EXCEEDED = "max_turns_exceeded"
ABORTED = "aborted"

TERMINAL_OUTCOMES = (SUCCESS, INTENT_ERROR, NER_ERROR, OTHER_ERROR, MAX_TURNS_EXCEEDED, ABORTED)

REPORT_SUCCESS = "report_success"
INFORM_INTENT = "inform_intent"


class IllegalState(DialogForgeError):
    code = "illegal_state"


@dataclass
class UserDialogAct:
    kind: str  # inform_intent | inform_slot | confirm_affirm | bye
    slot: str | None = None
    value: str | None = None

    def to_doc(self) -> dict:
        return {"kind": self.kind, "slot": self.slot, "value": self.value}


@dataclass
class AgendaState:
    goal: SimulationGoal
    agenda: list[str] = field(default_factory=lambda: [REPORT_SUCCESS, INFORM_INTENT])
    informed: dict[str, str] = field(default_factory=dict)
    turn_index: int = 0
    outcome: str = IN_PROGRESS
    error_turn: int | None = None
    predicted_dialog: str | None = None
    error_detail: str | None = None

    def terminal(self) -> bool:
        return self.outcome != IN_PROGRESS

    def _finish(self, outcome: str, detail: str | None = None) -> None:
        self.outcome = outcome
        if outcome not in (SUCCESS,):
            self.error_turn = self.turn_index
        if detail:
            self.error_detail = detail
        # nothing stays pending after a terminal outcome
        self.agenda.clear()


def pop_intent_inform(state: AgendaState) -> UserDialogAct:
    """Take the initial intent inform off the agenda (always the first user act)."""
    if INFORM_INTENT not in state.agenda:
        raise IllegalState("intent inform already delivered")
    state.agenda.remove(INFORM_INTENT)
    return UserDialogAct(kind=INFORM_INTENT, value=state.goal.intent_query)


def next_user_acts(
    state: AgendaState,
    match: NLUMatch,
    dact_map: DialogActMap | None = None,
) -> tuple[list[UserDialogAct], AgendaState]:
    """Apply the policy rules for one matched bot message.

    ``dact_map`` (the goal dialog's aggregated map) enables a liveness
    guard: when the matched act is a success label or ``say`` whose exact
    candidate text also realizes a request/confirm act, the slot response
    is emitted as well, so a Collect prompt doubling as a dialog's first
    message cannot deadlock the exchange.
    """
    if state.terminal():
        raise IllegalState("next_user_acts called after terminal outcome")

    acts: list[UserDialogAct] = []
    goal = state.goal

    def emit_slot(entity: str) -> None:
        if entity in state.informed:
            state._finish(NER_ERROR, detail=f"slot {entity!r} re-requested after being informed")
            return
        value = goal.inform_slots.get(entity)
        if value is None:
            state._finish(
                OTHER_ERROR, detail=f"bot requested {entity!r} which the goal does not constrain"
            )
            return
        state.informed[entity] = value
        acts.append(UserDialogAct(kind="inform_slot", slot=entity, value=value))

    act = match.act
    if act == DIALOG_SUCCESS:
        if REPORT_SUCCESS in state.agenda:
            state.agenda.remove(REPORT_SUCCESS)
        state.outcome = SUCCESS
        state.agenda.clear()
        acts.append(UserDialogAct(kind="bye"))
    elif act == INTENT_SUCCESS:
        if match.dialog == goal.dialog:
            state.predicted_dialog = match.dialog
            if INFORM_INTENT in state.agenda:
                state.agenda.remove(INFORM_INTENT)
        else:
            state.predicted_dialog = match.dialog
            state._finish(
                INTENT_ERROR,
                detail=f"matched intent_success_message of dialog {match.dialog!r}",
            )
    elif act.startswith("request_"):
        emit_slot(act[len("request_") :])
    elif act.startswith("confirm_"):
        acts.append(UserDialogAct(kind="confirm_affirm", slot=act[len("confirm_") :]))
    elif act == UNMATCHED:
        state._finish(OTHER_ERROR, detail=f"unmatched bot message: {match.bot_message!r}")
    # plain `say` advances nothing by itself

    if (
        not state.terminal()
        and dact_map is not None
        and act in (INTENT_SUCCESS, "say")
    ):
        for other_act, candidates in dact_map.entries.items():
            if match.matched_candidate in candidates:
                if other_act.startswith("request_"):
                    entity = other_act[len("request_") :]
                    if entity not in state.informed:
                        emit_slot(entity)
                elif other_act.startswith("confirm_"):
                    acts.append(
                        UserDialogAct(kind="confirm_affirm", slot=other_act[len("confirm_") :])
                    )

    return acts, state


def _processing_priority(state: AgendaState, match: NLUMatch) -> int:
    """Order in which a turn's matches are applied.

    A foreign dialog's golden label is definitive evidence the conversation
    left the goal, so it must be applied before the shared dialog-success
    message: a misroute into a short terminal dialog emits both in one turn
    and must read as an intent error, not a completion.
    """
    if match.act == UNMATCHED:
        return 0
    foreign = match.dialog != state.goal.dialog
    if match.act == INTENT_SUCCESS and foreign:
        return 110
    return act_priority(match.act) * 10


def advance_turn(
    state: AgendaState,
    matches: list[NLUMatch],
    dact_map: DialogActMap | None = None,
) -> list[UserDialogAct]:
    """Process one full bot turn (possibly several messages).

    Messages are handled in processing-priority order so the decisive
    terminal match wins the turn; processing stops at the first terminal
    outcome.
    """
    ordered = sorted(
        matches,
        key=lambda m: _processing_priority(state, m),
        reverse=True,
    )
    acts: list[UserDialogAct] = []
    for match in ordered:
        if state.terminal():
            break
        emitted, _ = next_user_acts(state, match, dact_map)
        acts.extend(emitted)

    if not state.terminal() and not acts and INFORM_INTENT in state.agenda:
        acts.append(pop_intent_inform(state))
    return acts
