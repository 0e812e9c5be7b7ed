import random

import pytest

from dialogforge.simulator.agenda import UserDialogAct
from dialogforge.simulator.nlg import MissingTemplate, ResponseTemplateSet, realize


def test_inform_intent_is_verbatim_passthrough():
    templates = ResponseTemplateSet.bundled()
    act = UserDialogAct(kind="inform_intent", value="where is my order")
    assert realize(act, templates, 0) == "where is my order"


def test_inform_slot_substitution():
    templates = ResponseTemplateSet(templates={"inform_slot": ["it is {value}"]})
    act = UserDialogAct(kind="inform_slot", slot="Email", value="user1@example.com")
    assert realize(act, templates, 0) == "it is user1@example.com"


def test_seeded_choice_golden():
    # frozen from one seeded run over the bundled three-template set
    templates = ResponseTemplateSet.bundled()
    rng = random.Random(99)
    act = UserDialogAct(kind="confirm_affirm", slot="Email")
    picks = [realize(act, templates, rng) for _ in range(4)]
    assert picks == ["yes, that is right", "yes, that is right", "yes", "correct"]


def test_same_seed_same_choice():
    templates = ResponseTemplateSet.bundled()
    act = UserDialogAct(kind="bye")
    assert realize(act, templates, 7) == realize(act, templates, 7)


def test_per_slot_override_wins():
    templates = ResponseTemplateSet(
        templates={
            "inform_slot": ["it is {value}"],
            "inform_slot.Email": ["my email is {value}"],
        }
    )
    act = UserDialogAct(kind="inform_slot", slot="Email", value="a@b.co")
    assert realize(act, templates, 0) == "my email is a@b.co"
    other = UserDialogAct(kind="inform_slot", slot="CaseNumber", value="42")
    assert realize(other, templates, 0) == "it is 42"


def test_missing_template_kind_raises():
    templates = ResponseTemplateSet(templates={})
    with pytest.raises(MissingTemplate):
        realize(UserDialogAct(kind="confirm_affirm"), templates, 0)


def test_template_file_round_trip(tmp_path):
    import json

    path = tmp_path / "templates.json"
    path.write_text(json.dumps({"inform_intent": ["{value}"], "bye": ["bye"]}))
    templates = ResponseTemplateSet.from_file(path)
    assert realize(UserDialogAct(kind="bye"), templates, 0) == "bye"
