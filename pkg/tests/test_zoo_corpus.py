from fractions import Fraction

import pytest

from qfasim import corpus, zoo
from qfasim.evolution import step_simulate
from qfasim.model import MachineError, validate_wellformed


@pytest.mark.parametrize("name", ["a3", "coin", "l_eps", "accept", "reject"])
def test_behavior_rows_certify(name):
    entry = zoo.get(name)
    assert all(ok for _, _, ok in entry.certify())


def test_a3_membership_predicate():
    assert [n for n in range(1, 90) if zoo.in_a3(n)] == [1, 9, 81]


def test_l_eps_binary_value():
    spec = zoo.get("l_eps(1/2)").spec
    for x in ("0", "1", "01", "110"):
        assert step_simulate(spec, x[::-1]).p_acc == zoo.binary_fraction(x)


def test_l_eps_parameter():
    entry = zoo.get("l_eps(3/4)")
    assert entry.params or entry.spec.name


def test_rotation_prediction_matches_simulation():
    entry = zoo.get("rotation")
    tr = step_simulate(entry.spec, "a" * 9)
    theta = entry.params["theta_over_pi"]
    pred = zoo.rotation_prediction(9, theta, entry.params["shift"])
    assert abs(float(tr.p_acc) - pred) < 1e-9


def test_unknown_and_citation_ids():
    with pytest.raises(MachineError):
        zoo.get("nonexistent")


def test_behavior_export_is_plain():
    d = zoo.get("coin").behavior_dict()
    assert d["rows"][0]["p_acc"] == "9/25"


def test_random_machine_wellformed_and_deterministic():
    a = corpus.random_machine(4)
    b = corpus.random_machine(4)
    assert a == b
    assert validate_wellformed(a, 2).ok


def test_random_corpus_halting_filter():
    specs = corpus.random_corpus(5, seed=100, require_halting=True)
    assert len(specs) == 5
    for s in specs:
        assert corpus.completely_halting(s, ["", "a"])
