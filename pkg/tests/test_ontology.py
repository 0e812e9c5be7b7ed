import re

import pytest

from dialogforge.generator import aggregate_map, build_graph, extract_ontology
from dialogforge.generator.ontology import MissingOntologyValue, Ontology, OntologyConfig
from dialogforge.schema import decode_bot_definition

from conftest import chain_bot_doc

EMAIL = re.compile(r"^user\d+@example\.com$")


def chain_setup(seed=7, config=None):
    definition = decode_bot_definition(chain_bot_doc())
    graph = build_graph(definition)
    maps = {"A": aggregate_map(graph, "A", ["End_Chat"])}
    return definition, maps, extract_ontology(definition, maps, seed, config)


def test_enumeration_values_pass_through_verbatim(template_bot):
    graph = build_graph(template_bot)
    maps = {"Connect_With_Sales": aggregate_map(graph, "Connect_With_Sales", ["End_Chat"])}
    ontology = extract_ontology(template_bot, maps, seed=1)
    assert ontology.dialogs["Connect_With_Sales"]["ProductLine"] == [
        "Starter",
        "Professional",
        "Enterprise",
    ]


def test_same_seed_is_deterministic():
    _, _, first = chain_setup(seed=123)
    _, _, second = chain_setup(seed=123)
    assert first.to_doc() == second.to_doc()


def test_different_seed_changes_values():
    _, _, first = chain_setup(seed=1)
    _, _, second = chain_setup(seed=2)
    assert first.dialogs != second.dialogs


def test_email_seed7_golden():
    # frozen from the seeded generator's first verified run
    _, _, ontology = chain_setup(seed=7)
    assert ontology.dialogs["A"]["Email"] == [
        "user32393@example.com",
        "user79270@example.com",
        "user61631@example.com",
        "user82598@example.com",
        "user45083@example.com",
    ]
    assert len(set(ontology.dialogs["A"]["Email"])) == 5
    for value in ontology.dialogs["A"]["Email"]:
        assert EMAIL.match(value)


def test_number_values_respect_range():
    config = OntologyConfig(values_per_entity=8, number_range=(10, 99))
    _, _, ontology = chain_setup(seed=3, config=config)
    numbers = ontology.dialogs["A"]["CaseNumber"]
    assert len(numbers) == 8
    assert all(10 <= int(n) <= 99 for n in numbers)


def test_every_request_act_is_covered():
    definition, maps, ontology = chain_setup()
    for act in maps["A"].entries:
        if act.startswith("request_"):
            assert ontology.values("A", act[len("request_") :])


def test_missing_value_error():
    ontology = Ontology(seed=0, dialogs={"A": {}})
    with pytest.raises(MissingOntologyValue):
        ontology.values("A", "Email")


def test_alphanumeric_id_shape(mini_bot):
    graph = build_graph(mini_bot)
    maps = {"Check_Order": aggregate_map(graph, "Check_Order", ["End_Chat"])}
    ontology = extract_ontology(mini_bot, maps, seed=7, config=OntologyConfig(id_length=10))
    for value in ontology.dialogs["Check_Order"]["OrderNumber"]:
        assert re.match(r"^[A-Z0-9]{10}$", value)


def test_doc_round_trip():
    _, _, ontology = chain_setup()
    assert Ontology.from_doc(ontology.to_doc()).to_doc() == ontology.to_doc()
