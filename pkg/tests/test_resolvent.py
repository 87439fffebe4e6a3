import random
from fractions import Fraction

import pytest

from qfasim import corpus, resolvent, zoo
from qfasim.evolution import step_simulate
from qfasim.linalg import LinAlgError, Matrix, determinant
from qfasim.resolvent import (acceptance_resolvent, clow_determinant, clow_sequences, cofactor_resolvent,
                              conf_star_order, series_check, split_positive_negative)


def test_conf_star_order_is_lexicographic():
    spec = zoo.get("coin").spec
    order = conf_star_order(spec, 1)
    keys = [order.key(order.element(i)) for i in range(order.size)]
    assert keys == sorted(keys)
    assert all(order.index(order.element(i)) == i for i in range(order.size))


def test_split_reassembles_d():
    spec = zoo.get("coin").spec
    sp = split_positive_negative(spec, "a")
    assert sp.kron_matrix().rows == (2 * sp.space.dim) ** 2


@pytest.mark.parametrize("name, x", [("coin", "aa"), ("a3", "a" * 3), ("l_eps", "011"), ("accept", "")])
def test_resolvent_matches_simulation(name, x):
    spec = zoo.get(name).spec
    res = acceptance_resolvent(spec, x)
    tr = step_simulate(spec, x)
    assert res.p_acc == tr.p_acc and res.p_rej == tr.p_rej


def test_resolvent_on_non_absolutely_halting_machine():
    spec = corpus.random_machine(11)
    res = acceptance_resolvent(spec, "a")
    tr = step_simulate(spec, "a", t_max=20_000, backend="FLOAT")
    assert res.backend == "EXACT"
    assert abs(float(res.p_acc) - tr.p_acc) < 1e-9


def test_cofactor_form_exact_and_clows():
    spec = zoo.get("coin").spec
    a = cofactor_resolvent(spec, "a")
    b = cofactor_resolvent(spec, "a", use_clows=True)
    assert a.p_acc == b.p_acc == Fraction(9, 25)
    assert a.det == b.det


def test_clow_cap_refuses_large_blocks():
    with pytest.raises(LinAlgError):
        cofactor_resolvent(zoo.get("a3").spec, "a" * 9, use_clows=True, cap=4)


def test_series_converges_to_resolvent():
    spec = zoo.get("coin").spec
    s = series_check(spec, "a", terms=10)
    assert s[0] == Fraction(9, 25)


def test_literal_series_vanishes():
    spec = zoo.get("coin").spec
    s = series_check(spec, "a", terms=10, literal=True)
    assert s[0] == 0


def test_clow_determinant_small():
    rng = random.Random(9)
    for n in range(1, 5):
        m = Matrix.exact([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
        assert clow_determinant(m) == determinant(m)


def test_clow_sequences_sum_to_det():
    m = Matrix.exact([[1, 2, 0], [3, 1, 1], [0, 2, 5]])
    total = sum(sign * w for _, sign, w in clow_sequences(m))
    assert total == determinant(m)
