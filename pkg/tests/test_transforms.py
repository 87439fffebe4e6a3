from fractions import Fraction

import pytest

from qfasim import corpus, transforms, zoo
from qfasim.evolution import step_simulate
from qfasim.model import MachineError, validate_wellformed

XS = ["", "a", "aa"]


@pytest.mark.parametrize("label, out, cert, ins", corpus.transform_corpus(), ids=lambda v: v if isinstance(v, str) else "")
def test_corpus_relations(label, out, cert, ins):
    assert validate_wellformed(out, 2).ok
    for x in XS:
        assert transforms.check_relation(cert, ins, out, x).ok, (label, x)


def test_complement_is_involution():
    coin = zoo.get("coin").spec
    twice = transforms.complement(transforms.complement(coin))
    assert twice.accepting == coin.accepting and twice.rejecting == coin.rejecting


def test_damp_values():
    coin = zoo.get("coin").spec
    out = transforms.damp(coin, Fraction(9, 25))
    tr = step_simulate(out, "a")
    assert tr.backend == "EXACT"
    assert tr.p_acc == Fraction(16, 25) * Fraction(9, 25)
    # irrational square roots fall back to FLOAT
    tr = step_simulate(transforms.damp(coin, Fraction(1, 4)), "a")
    assert tr.backend == "FLOAT" and abs(tr.p_acc - 0.27) < 1e-12


def test_damp_range():
    with pytest.raises(MachineError):
        transforms.damp(zoo.get("coin").spec, 1)


def test_half_split_halves_acceptance():
    out = transforms.half_split(zoo.get("accept").spec)
    tr = step_simulate(out, "a")
    assert tr.p_acc == Fraction(1, 2) and tr.p_rej == Fraction(1, 2)


def test_product_and_square_pair():
    coin = zoo.get("coin").spec
    p = step_simulate(transforms.product(coin, coin), "a").p_acc
    assert p == Fraction(81, 625)
    sq = step_simulate(transforms.square_pair(coin), "a")
    assert sq.p_acc == Fraction(81 + 256, 625)
    assert sq.p_rej == 2 * Fraction(9 * 16, 625)


def test_product_needs_one_head():
    coin = zoo.get("coin").spec
    two = transforms.product(coin, coin)
    with pytest.raises(MachineError):
        transforms.product(two, coin)


def test_affine_combine():
    coin, acc, _ = corpus.coin_corpus()
    out, cert = transforms.certify("affine_combine", [coin, acc], alpha="1/3", beta="1/2")
    tr = step_simulate(out, "a")
    assert abs(tr.p_acc - float(Fraction(1, 3) * Fraction(9, 25) + Fraction(1, 2))) < 1e-12


@pytest.mark.parametrize("r", [Fraction(0), Fraction(1, 4), Fraction(2), Fraction(7, 3), Fraction(23, 5)])
def test_rational_squares(r):
    parts = transforms.rational_squares(r)
    assert len(parts) <= 4 and sum(p * p for p in parts) == r


def test_certificate_names_fresh_states():
    out, cert = transforms.certify("damp", [zoo.get("coin").spec], alpha=Fraction(1, 2))
    assert cert.states_out == len(out.states)
    assert any(k.startswith("fresh:") for k in cert.renaming)
    assert cert.to_dict()["params"] == {"alpha": "1/2"}


def test_unknown_transform():
    with pytest.raises(MachineError):
        transforms.certify("nope", [])
