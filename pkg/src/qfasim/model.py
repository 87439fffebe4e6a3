"""Machine descriptions, the amplitude-expression grammar and JSON I/O.

A machine is a k-head automaton on a circular tape ``< x_1 ... x_n >``.  The
transition table maps (state, scanned-symbol tuple) to a list of
(target state, move tuple, weight).  Quantum machines carry amplitudes,
probabilistic ones carry transition probabilities; both share one type.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product as iproduct
from typing import Iterable, Mapping, Sequence

from .linalg import QI, abs2, conj, exact_scalar

QFA = "QFA"
PFA = "PFA"
TWO_WAY = "TWO_WAY"
ONE_WAY = "ONE_WAY"
LEFT_END = "<"
RIGHT_END = ">"
ENDMARKERS = (LEFT_END, RIGHT_END)
ANY = "*"   # scan entry matching every symbol


class MachineError(ValueError):
    """Malformed machine description."""


class ParseError(MachineError):
    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


# ---------------------------------------------------------------------------
# amplitude expressions

_NUM = r"\d+(?:/\d+)?"
_RAT_RE = re.compile(rf"^({_NUM})$")
_CPLX_RE = re.compile(rf"^(-?{_NUM})([+-])({_NUM})?i$")
_SQRT_RE = re.compile(rf"^sqrt\(({_NUM})\)$")
_TRIG_RE = re.compile(rf"^(cos|sin)\((-?{_NUM}) ?pi\)$")


def _frac_text(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _exact_sqrt(r: Fraction):
    if r < 0:
        return None
    p, q = math.isqrt(r.numerator), math.isqrt(r.denominator)
    if p * p == r.numerator and q * q == r.denominator:
        return Fraction(p, q)
    return None


def _exact_trig(kind: str, r: Fraction):
    """cos/sin(r*pi) when the value is rational, else None."""
    t = r % 2
    if kind == "sin":
        t = (Fraction(1, 2) - t) % 2
    table = {Fraction(0): 1, Fraction(1, 2): 0, Fraction(1): -1, Fraction(3, 2): 0,
             Fraction(1, 3): Fraction(1, 2), Fraction(2, 3): Fraction(-1, 2),
             Fraction(4, 3): Fraction(-1, 2), Fraction(5, 3): Fraction(1, 2)}
    v = table.get(t)
    return None if v is None else Fraction(v)


@dataclass(frozen=True)
class Amplitude:
    """Signed product of grammar factors.

    ``factors`` holds (kind, value) pairs with kind in rat/cplx/sqrt/cos/sin.
    """

    negative: bool
    factors: tuple

    @staticmethod
    def parse(text: str) -> "Amplitude":
        s = text.strip()
        if not s:
            raise ParseError(f"empty weight expression")
        neg = False
        parts = s.split("*")
        if parts[0].startswith("-") and not _CPLX_RE.match(parts[0].strip()):
            neg, parts[0] = True, parts[0][1:]
        factors = []
        for part in parts:
            part = part.strip()
            if m := _RAT_RE.match(part):
                factors.append(("rat", Fraction(m.group(1))))
            elif m := _CPLX_RE.match(part):
                im = Fraction(m.group(3) or 1)
                factors.append(("cplx", (Fraction(m.group(1)), im if m.group(2) == "+" else -im)))
            elif m := _SQRT_RE.match(part):
                factors.append(("sqrt", Fraction(m.group(1))))
            elif m := _TRIG_RE.match(part):
                factors.append((m.group(1), Fraction(m.group(2))))
            else:
                raise ParseError(f"malformed weight expression {text!r}")
        return Amplitude(neg, tuple(factors)).simplified()

    @staticmethod
    def of(value) -> "Amplitude":
        """Wrap an exact scalar (int, Fraction or QI)."""
        if isinstance(value, Amplitude):
            return value
        if isinstance(value, str):
            return Amplitude.parse(value)
        v = exact_scalar(value)
        if isinstance(v, QI):
            return Amplitude(False, (("cplx", (v.re, v.im)),))
        return Amplitude(v < 0, (("rat", abs(v)),))

    @staticmethod
    def sqrt(r) -> "Amplitude":
        r = Fraction(r)
        root = _exact_sqrt(r)
        if root is not None:
            return Amplitude(False, (("rat", root),))
        return Amplitude(False, (("sqrt", r),))

    @staticmethod
    def trig(kind: str, r) -> "Amplitude":
        return Amplitude(False, ((kind, Fraction(r)),))

    def __mul__(self, other: "Amplitude") -> "Amplitude":
        other = Amplitude.of(other)
        return Amplitude(self.negative != other.negative, self.factors + other.factors).simplified()

    def __neg__(self) -> "Amplitude":
        return Amplitude(not self.negative, self.factors)

    def simplified(self) -> "Amplitude":
        """Fold all rational factors into one and all square roots into one."""
        rat = Fraction(1)
        rad = Fraction(1)
        rest = []
        for kind, v in self.factors:
            if kind == "rat":
                rat *= v
            elif kind == "sqrt":
                rad *= v
            else:
                rest.append((kind, v))
        if rad != 1:
            root = _exact_sqrt(rad)
            if root is not None:
                rat *= root
            else:
                rest.insert(0, ("sqrt", rad))
        if rat == 0:
            return Amplitude(False, (("rat", Fraction(0)),))
        if rat != 1 or not rest:
            rest.insert(0, ("rat", rat))
        return Amplitude(self.negative, tuple(rest))

    def text(self) -> str:
        parts = []
        factors = list(self.factors)
        negative = self.negative
        if negative and factors and factors[0][0] == "cplx":
            re_, im = factors[0][1]
            factors[0] = ("cplx", (-re_, -im))
            negative = False
        for kind, v in factors:
            if kind == "rat":
                parts.append(_frac_text(v))
            elif kind == "cplx":
                re_, im = v
                parts.append(f"{_frac_text(re_)}{'+' if im >= 0 else '-'}{_frac_text(abs(im))}i")
            elif kind == "sqrt":
                parts.append(f"sqrt({_frac_text(v)})")
            else:
                parts.append(f"{kind}({_frac_text(v)} pi)")
        return ("-" if negative else "") + "*".join(parts)

    __str__ = text

    @cached_property
    def exact(self):
        """Exact value (Fraction or QI) or None when irrational."""
        val = Fraction(1)
        for kind, v in self.factors:
            if kind == "rat":
                f = v
            elif kind == "cplx":
                f = QI.make(*v)
            elif kind == "sqrt":
                f = _exact_sqrt(v)
            else:
                f = _exact_trig(kind, v)
            if f is None:
                return None
            val = val * f
        val = exact_scalar(val)
        return -val if self.negative else val

    @cached_property
    def numeric(self) -> complex:
        val = 1 + 0j
        for kind, v in self.factors:
            if kind == "rat":
                val *= float(v)
            elif kind == "cplx":
                val *= complex(float(v[0]), float(v[1]))
            elif kind == "sqrt":
                val *= math.sqrt(v)
            elif kind == "cos":
                val *= math.cos(float(v) * math.pi)
            else:
                val *= math.sin(float(v) * math.pi)
        return -val if self.negative else val

    def value(self, exact: bool):
        if exact:
            v = self.exact
            if v is None:
                raise MachineError(f"weight {self.text()} is not exactly representable")
            return v
        return self.numeric

    def is_zero(self) -> bool:
        ex = self.exact
        return ex == 0 if ex is not None else self.numeric == 0


# ---------------------------------------------------------------------------
# machine specs


@dataclass(frozen=True)
class Transition:
    source: str
    scan: tuple
    target: str
    move: tuple
    weight: Amplitude


@dataclass(frozen=True)
class MachineSpec:
    kind: str
    heads: int
    states: tuple
    initial: str
    accepting: frozenset
    rejecting: frozenset
    alphabet: tuple
    transitions: tuple
    head_motion: str = TWO_WAY
    name: str = ""

    def __post_init__(self):
        _check_shape(self)

    # lookup -----------------------------------------------------------------
    @cached_property
    def table(self) -> Mapping:
        """(state, scan) -> tuple of (target, move, weight) for concrete scans."""
        out: dict = {}
        for t in self.transitions:
            if ANY not in t.scan:
                out.setdefault((t.source, t.scan), []).append((t.target, t.move, t.weight))
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def patterns(self) -> Mapping:
        """state -> list of (scan pattern, target, move, weight) for rules using ANY."""
        out: dict = {}
        for t in self.transitions:
            if ANY in t.scan:
                out.setdefault(t.source, []).append((t.scan, t.target, t.move, t.weight))
        return out

    @cached_property
    def _lookup_cache(self) -> dict:
        return {}

    def lookup(self, state: str, scan: tuple) -> tuple:
        """All rules applying to ``state`` reading ``scan``; wildcard rules add to concrete ones."""
        pats = self.patterns.get(state)
        if not pats:
            return self.table.get((state, scan), ())
        key = (state, scan)
        hit = self._lookup_cache.get(key)
        if hit is None:
            hit = list(self.table.get(key, ()))
            for pat, target, move, w in pats:
                if all(p == ANY or p == s for p, s in zip(pat, scan)):
                    hit.append((target, move, w))
            hit = self._lookup_cache[key] = tuple(hit)
        return hit

    @cached_property
    def state_index(self) -> Mapping:
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def symbols(self) -> tuple:
        """Tape alphabet including endmarkers."""
        return (LEFT_END,) + tuple(self.alphabet) + (RIGHT_END,)

    @cached_property
    def is_exact(self) -> bool:
        return all(t.weight.exact is not None for t in self.transitions)

    @cached_property
    def is_real(self) -> bool:
        if self.is_exact:
            return all(not isinstance(t.weight.exact, QI) for t in self.transitions)
        return all(t.weight.numeric.imag == 0 for t in self.transitions)

    @property
    def backend(self) -> str:
        return "EXACT" if self.is_exact else "FLOAT"

    def is_halting(self, state: str) -> bool:
        return state in self.accepting or state in self.rejecting

    @property
    def non_halting(self) -> tuple:
        return tuple(q for q in self.states if not self.is_halting(q))

    def with_changes(self, **changes) -> "MachineSpec":
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return MachineSpec(**data)


def _check_shape(spec: MachineSpec):
    if spec.kind not in (QFA, PFA):
        raise MachineError(f"unknown kind {spec.kind!r}")
    if spec.heads < 1:
        raise MachineError("heads must be >= 1")
    if spec.head_motion not in (TWO_WAY, ONE_WAY):
        raise MachineError(f"unknown head motion {spec.head_motion!r}")
    states = set(spec.states)
    if len(states) != len(spec.states):
        raise MachineError("duplicate state names")
    if spec.initial not in states:
        raise MachineError(f"initial state {spec.initial!r} is not a state")
    for label, group in (("accepting", spec.accepting), ("rejecting", spec.rejecting)):
        unknown = set(group) - states
        if unknown:
            raise MachineError(f"unknown {label} state(s) {sorted(unknown)}")
    if spec.accepting & spec.rejecting:
        raise MachineError("accepting and rejecting sets overlap")
    for sym in spec.alphabet:
        if sym in ENDMARKERS or len(sym) != 1:
            raise MachineError(f"bad alphabet symbol {sym!r}")
    symbols = set(spec.alphabet) | set(ENDMARKERS)
    for i, t in enumerate(spec.transitions):
        where = f"transition {i}"
        if t.source not in states:
            raise ParseError(f"unknown state {t.source!r}", where)
        if t.target not in states:
            raise ParseError(f"unknown state {t.target!r}", where)
        if len(t.scan) != spec.heads:
            raise ParseError(f"scan arity {len(t.scan)} does not match {spec.heads} heads", where)
        if len(t.move) != spec.heads:
            raise ParseError(f"move arity {len(t.move)} does not match {spec.heads} heads", where)
        for s in t.scan:
            if s not in symbols and s != ANY:
                raise ParseError(f"symbol {s!r} not in alphabet", where)
        for d in t.move:
            if d not in (-1, 0, 1):
                raise ParseError(f"direction {d!r} not in {{-1,0,1}}", where)
        if spec.head_motion == ONE_WAY and any(d != 1 for d in t.move):
            raise ParseError("one-way machines move every head right", where)
        if spec.kind == PFA:
            w = t.weight.exact
            val = w if w is not None else t.weight.numeric
            if isinstance(val, QI) or (isinstance(val, complex) and val.imag != 0):
                raise ParseError("probabilistic weight must be real", where)
            real = val if not isinstance(val, complex) else val.real
            if real < 0 or real > 1:
                raise ParseError(f"probability {t.weight.text()} outside [0,1]", where)


def make_spec(kind: str, heads: int, states: Iterable[str], initial: str, accepting: Iterable[str],
              rejecting: Iterable[str], alphabet: Iterable[str], transitions: Iterable,
              head_motion: str = TWO_WAY, name: str = "", drop_zero: bool = True) -> MachineSpec:
    """Convenience constructor; transitions as (src, scan, dst, move, weight) tuples."""
    trans = []
    for src, scan, dst, move, w in transitions:
        amp = Amplitude.of(w)
        if drop_zero and amp.is_zero():
            continue
        trans.append(Transition(src, tuple(scan), dst, tuple(move), amp))
    return MachineSpec(kind, heads, tuple(states), initial, frozenset(accepting), frozenset(rejecting),
                       tuple(alphabet), tuple(trans), head_motion, name)


# ---------------------------------------------------------------------------
# JSON I/O

_KEYS = ("kind", "heads", "states", "initial", "accepting", "rejecting", "alphabet", "transitions")


def spec_to_dict(spec: MachineSpec) -> dict:
    d = {
        "kind": spec.kind,
        "heads": spec.heads,
        "states": list(spec.states),
        "initial": spec.initial,
        "accepting": [q for q in spec.states if q in spec.accepting],
        "rejecting": [q for q in spec.states if q in spec.rejecting],
        "alphabet": list(spec.alphabet),
        "transitions": [
            {"from": t.source, "scan": list(t.scan), "to": t.target, "move": list(t.move), "weight": t.weight.text()}
            for t in spec.transitions
        ],
    }
    if spec.head_motion != TWO_WAY:
        d["head_motion"] = spec.head_motion
    if spec.name:
        d["name"] = spec.name
    return d


def serialize_machine(spec: MachineSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=1, ensure_ascii=False)


def parse_machine(text: str) -> MachineSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    return spec_from_dict(data)


def spec_from_dict(data) -> MachineSpec:
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    for k in _KEYS:
        if k not in data:
            raise ParseError(f"missing key {k!r}")
    heads = data["heads"]
    if not isinstance(heads, int) or isinstance(heads, bool):
        raise ParseError("heads must be an integer", "heads")
    trans = []
    for i, t in enumerate(data["transitions"]):
        where = f"transitions[{i}]"
        if not isinstance(t, dict):
            raise ParseError("transition must be an object", where)
        for k in ("from", "scan", "to", "move", "weight"):
            if k not in t:
                raise ParseError(f"missing field {k!r}", where)
        try:
            amp = Amplitude.parse(str(t["weight"]))
        except ParseError as exc:
            raise ParseError(str(exc), f"{where}.weight") from None
        if not isinstance(t["scan"], list) or not isinstance(t["move"], list):
            raise ParseError("scan and move must be lists", where)
        trans.append(Transition(t["from"], tuple(t["scan"]), t["to"], tuple(t["move"]), amp))
    try:
        return MachineSpec(
            kind=data["kind"], heads=heads, states=tuple(data["states"]), initial=data["initial"],
            accepting=frozenset(data["accepting"]), rejecting=frozenset(data["rejecting"]),
            alphabet=tuple(data["alphabet"]), transitions=tuple(trans),
            head_motion=data.get("head_motion", TWO_WAY), name=data.get("name", ""),
        )
    except ParseError:
        raise
    except MachineError as exc:
        raise ParseError(str(exc)) from None


def load_machine(path) -> MachineSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_machine(fh.read())


# ---------------------------------------------------------------------------
# validation


@dataclass
class LengthResult:
    n: int
    inputs_checked: int
    sampled: bool
    ok: bool
    max_deviation: object
    offending: list = field(default_factory=list)


@dataclass
class ValidationReport:
    kind: str
    backend: str
    per_length: list

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.per_length)

    @property
    def max_deviation(self):
        devs = [r.max_deviation for r in self.per_length]
        return max(devs) if devs else 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "backend": self.backend, "ok": self.ok,
            "max_deviation": str(self.max_deviation),
            "per_length": [
                {"n": r.n, "inputs": r.inputs_checked, "sampled": r.sampled, "ok": r.ok,
                 "max_deviation": str(r.max_deviation), "offending": [list(map(str, p)) for p in r.offending[:10]]}
                for r in self.per_length
            ],
        }


def sample_inputs(alphabet: Sequence[str], n: int, cap: int = 256, n_random: int = 64, seed: int = 0):
    """All strings of length n, or a seeded sample when there are more than ``cap``."""
    k = len(alphabet)
    if k == 0:
        return ([""] if n == 0 else []), False
    if k ** n <= cap:
        return ["".join(p) for p in iproduct(alphabet, repeat=n)], False
    rng = random.Random(seed * 1_000_003 + n)
    out = [a * n for a in alphabet]
    seen = set(out)
    while len(out) < len(alphabet) + n_random:
        s = "".join(rng.choice(alphabet) for _ in range(n))
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out, True


def column_deviation(spec: MachineSpec, x: str, exact: bool):
    """Max deviation from orthonormality (QFA) or stochasticity (PFA) on input x."""
    from .evolution import ConfigurationSpace, sparse_columns

    space = ConfigurationSpace.of(spec, x)
    cols = sparse_columns(spec, space, exact)
    zero = Fraction(0) if exact else 0.0
    worst = zero
    offending = []
    tol = 0 if exact else 1e-9
    if spec.kind == PFA:
        for j, col in enumerate(cols):
            s = sum(col.values(), zero)
            dev = abs(s - 1)
            neg = [v for v in col.values() if (v.real if isinstance(v, complex) else v) < 0]
            if neg:
                dev = max(dev, max(-(v.real if isinstance(v, complex) else v) for v in neg))
            if dev > worst:
                worst = dev
            if dev > tol:
                offending.append((space.describe(j), space.describe(j)))
        return worst, offending
    rows: dict = {}
    for j, col in enumerate(cols):
        for i, v in col.items():
            rows.setdefault(i, []).append((j, v))
    gram: dict = {}
    for entries in rows.values():
        for a, va in entries:
            cva = conj(va)
            for b, vb in entries:
                if b >= a:
                    gram[(a, b)] = gram.get((a, b), zero) + cva * vb
    for j in range(space.dim):
        g = gram.get((j, j), zero)
        dev = abs(g - 1) if exact else abs(complex(g) - 1)
        if dev > worst:
            worst = dev
        if dev > tol:
            offending.append((space.describe(j), space.describe(j)))
    for (a, b), g in gram.items():
        if a == b:
            continue
        dev = abs2(g) if exact else abs(complex(g))
        if exact:
            # compare squared magnitude against zero; report magnitude bound
            dev = Fraction(dev) if dev == 0 else _sqrt_upper(dev)
        if dev > worst:
            worst = dev
        if dev > tol:
            offending.append((space.describe(a), space.describe(b)))
    return worst, offending


def _sqrt_upper(r: Fraction) -> Fraction:
    """A rational upper bound on sqrt(r) (used only for reporting)."""
    root = _exact_sqrt(Fraction(r))
    if root is not None:
        return root
    return Fraction(math.sqrt(float(r))).limit_denominator(10 ** 12) + Fraction(1, 10 ** 12)


def validate_wellformed(spec: MachineSpec, n_max: int, sample_cap: int = 256, seed: int = 0,
                        force_float: bool = False) -> ValidationReport:
    """Check unitarity (QFA) or stochasticity (PFA) of the evolution on every
    input length up to ``n_max``."""
    exact = spec.is_exact and not force_float
    out = []
    for n in range(n_max + 1):
        inputs, sampled = sample_inputs(spec.alphabet, n, cap=sample_cap, seed=seed)
        worst = Fraction(0) if exact else 0.0
        offending = []
        for x in inputs:
            dev, off = column_deviation(spec, x, exact)
            worst = max(worst, dev)
            offending.extend((x, *p) for p in off)
        ok = worst == 0 if exact else worst <= 1e-9
        out.append(LengthResult(n, len(inputs), sampled, ok, worst, offending))
    return ValidationReport(spec.kind, "EXACT" if exact else "FLOAT", out)
