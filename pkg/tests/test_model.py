import json
from fractions import Fraction

import pytest

from qfasim import zoo
from qfasim.linalg import QI
from qfasim.model import (Amplitude, MachineError, ParseError, make_spec, parse_machine, serialize_machine,
                          spec_from_dict, spec_to_dict, validate_wellformed)


@pytest.mark.parametrize("text, value", [
    ("1/2", Fraction(1, 2)),
    ("-3/5", Fraction(-3, 5)),
    ("sqrt(1/4)", Fraction(1, 2)),
    ("sqrt(1/2)*sqrt(1/2)", Fraction(1, 2)),
    ("cos(0 pi)", Fraction(1)),
    ("cos(2/3 pi)", Fraction(-1, 2)),
    ("sin(1/2 pi)", Fraction(1)),
])
def test_amplitude_exact_values(text, value):
    amp = Amplitude.parse(text)
    assert amp.exact == value


def test_irrational_amplitude_is_float_only():
    amp = Amplitude.parse("sqrt(2)")
    assert amp.exact is None
    assert abs(amp.numeric - 2 ** 0.5) < 1e-12


def test_complex_amplitude():
    assert Amplitude.of(QI(0, 1)).exact == QI(0, 1)


@pytest.mark.parametrize("bad", ["", "1/", "sqrt(x)", "2**3"])
def test_malformed_weight(bad):
    with pytest.raises(ParseError):
        Amplitude.parse(bad)


def test_json_round_trip():
    spec = zoo.get("coin").spec
    again = parse_machine(serialize_machine(spec))
    assert spec_to_dict(again) == spec_to_dict(spec)
    assert again.is_exact


def test_missing_key_rejected():
    d = spec_to_dict(zoo.get("coin").spec)
    del d["initial"]
    with pytest.raises(MachineError):
        spec_from_dict(d)


def test_halting_states_must_be_disjoint():
    with pytest.raises(MachineError):
        make_spec("QFA", 1, ["q", "h"], "q", ["h"], ["h"], ["a"], [])


def test_wellformed_coin_and_broken_copy():
    spec = zoo.get("coin").spec
    assert validate_wellformed(spec, 3).ok
    trans = [(t.source, t.scan, t.target, t.move, t.weight.exact * 2 if t.source == "q0" else t.weight.exact)
             for t in spec.transitions]
    broken = make_spec(spec.kind, spec.heads, spec.states, spec.initial, spec.accepting, spec.rejecting,
                       spec.alphabet, trans, spec.head_motion)
    rep = validate_wellformed(broken, 1)
    assert not rep.ok and rep.max_deviation > 0
    json.dumps(rep.to_dict())


def test_zoo_machines_wellformed():
    for name in ("a3", "coin", "l_eps", "accept", "reject"):
        assert validate_wellformed(zoo.get(name).spec, 3).ok, name
