from fractions import Fraction

import pytest

from qfasim import corpus, zoo
from qfasim.evolution import (ACCEPT, REJECT, UNDETERMINED, ConfigurationSpace, Criterion, build_evolution,
                              classify, classify_probabilities, step_simulate)
from qfasim.linalg import Matrix


def test_configuration_indexing_round_trip():
    spec = zoo.get("a3").spec
    space = ConfigurationSpace.of(spec, "aaa")
    for idx in range(space.dim):
        state, pos = space.config(idx)
        assert space.index(state, pos) == idx


def test_evolution_is_unitary_on_coin():
    spec = zoo.get("coin").spec
    u, *_ = build_evolution(spec, "aa")
    assert (u.adjoint() @ u).allclose(Matrix.identity(u.rows))


def test_coin_probabilities_exact():
    tr = step_simulate(zoo.get("coin").spec, "a")
    assert tr.backend == "EXACT"
    assert tr.p_acc == Fraction(9, 25) and tr.p_rej == Fraction(16, 25)
    assert tr.residual == 0 and tr.verdict == "HALTED_ALL"
    assert tr.conservation_error() == 0


def test_float_backend_agrees():
    spec = corpus.random_machine(3)
    ex = step_simulate(spec, "aa", t_max=300)
    fl = step_simulate(spec, "aa", t_max=300, backend="FLOAT")
    assert abs(float(ex.p_acc) - fl.p_acc) < 1e-12


def test_truncation_reports_residual():
    spec = corpus.random_machine(5)
    tr = step_simulate(spec, "a", t_max=2)
    assert tr.verdict == "TRUNCATED"
    assert tr.p_acc + tr.p_rej + tr.residual == 1


def test_trace_json():
    tr = step_simulate(zoo.get("coin").spec, "")
    d = tr.to_dict()
    assert d["p_acc"] == "9/25" and len(d["steps"]) == len(tr.steps)


@pytest.mark.parametrize("text, kind", [("BOUNDED(1/3)", "BOUNDED"), ("unbounded", "UNBOUNDED"),
                                         ("EXACT_CUTPOINT(1/2)", "EXACT_CUTPOINT")])
def test_criterion_parse(text, kind):
    assert Criterion.parse(text).kind == kind


def test_criterion_range_checked():
    with pytest.raises(ValueError):
        Criterion.parse("BOUNDED(1/2)")


def test_classification_uses_intervals():
    c = Criterion.parse("BOUNDED(1/3)")
    assert classify_probabilities(Fraction(2, 3), Fraction(1, 3), 0, c).verdict == ACCEPT
    assert classify_probabilities(Fraction(1, 2), Fraction(0), Fraction(1, 2), c).verdict == UNDETERMINED
    assert classify_probabilities(Fraction(0), Fraction(9, 10), Fraction(1, 10), c).verdict == REJECT
    cut = Criterion.parse("EXACT_CUTPOINT(1/2)")
    assert classify_probabilities(Fraction(1, 2), Fraction(1, 2), 0, cut).verdict == ACCEPT


def test_a3_membership():
    spec = zoo.get("a3").spec
    c = Criterion.parse("BOUNDED(1/3)")
    assert classify(spec, "a" * 9, c).verdict == ACCEPT
    assert classify(spec, "a" * 3, c).verdict == REJECT
