"""Concrete machines used as fixtures across the toolkit.

Every entry carries a behavior table (input -> expected acceptance probability
or verdict) that :meth:`ZooEntry.certify` re-derives by simulation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping

from .model import (LEFT_END, ONE_WAY, PFA, QFA, RIGHT_END, Amplitude, MachineError, MachineSpec,
                    make_spec)

A = "a"


@dataclass(frozen=True)
class BehaviorRow:
    input: str
    p_acc: object          # Fraction, float or None when only the verdict is pinned
    verdict: str = ""      # ACCEPT / REJECT / ""
    note: str = ""


@dataclass(frozen=True)
class ZooEntry:
    id: str
    spec: MachineSpec
    citation: str
    behavior: tuple
    notes: tuple = ()
    params: Mapping = field(default_factory=dict)

    def certify(self, tol: float = 1e-9) -> list:
        """Re-simulate every behavior row; returns (row, observed p_acc, ok) triples."""
        from .evolution import step_simulate
        out = []
        for row in self.behavior:
            trace = step_simulate(self.spec, row.input)
            p = trace.p_acc
            ok = True
            if row.p_acc is not None:
                if isinstance(row.p_acc, Fraction) and self.spec.is_exact:
                    ok = p == row.p_acc
                else:
                    ok = abs(complex(p) - complex(row.p_acc)) <= tol
            if row.verdict == "ACCEPT":
                ok = ok and float(p) > 0.5
            elif row.verdict == "REJECT":
                ok = ok and float(trace.p_rej) > 0.5
            out.append((row, p, ok))
        return out

    def behavior_dict(self) -> dict:
        return {
            "id": self.id,
            "citation": self.citation,
            "rows": [{"input": r.input, "p_acc": None if r.p_acc is None else str(r.p_acc),
                      "verdict": r.verdict, "note": r.note} for r in self.behavior],
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# reversible completion

def complete_unidirectional(states, halting, scans, partial, direction, weight_one=1):
    """Turn a partial unidirectional table into a unitary one.

    ``partial[scan]`` maps source -> list of (target, weight); the listed columns
    must already be orthonormal with targets closed under the used set.  Sources
    left unspecified are mapped one-to-one onto unused targets.  Moves come from
    ``direction[target]``.  Returns transition tuples for :func:`make_spec`.
    """
    trans = []
    for scan in scans:
        rules = partial.get(scan, {})
        used = {t for outs in rules.values() for t, _ in outs}
        free = [q for q in states if q not in used]
        idle = [q for q in states if q not in rules]
        if len(free) != len(idle):
            raise MachineError(f"cannot complete scan {scan}: {len(idle)} sources, {len(free)} targets")
        table = dict(rules)
        for q, t in zip(idle, free):
            table[q] = [(t, weight_one)]
        for q in states:
            for t, w in table[q]:
                trans.append((q, scan, t, direction[t], w))
    return trans


# ---------------------------------------------------------------------------
# A3 = {a^n : n = 3^(2m)}

# Walk summary: head 1 and head 2 alternate as the "runner".  A round moves the
# runner 3 cells per backward step of the other head, so after round j the
# runner sits on cell 3^j.  The Y phase runs head 1, the X phase head 2.
# "." matches any symbol.
_A3_RULES = (
    ("S", LEFT_END, LEFT_END, "YD"),
    ("YD", A, A, "YB"), ("YD", A, LEFT_END, "YE"), ("YD", RIGHT_END, ".", "REJ"),
    ("YB", A, ".", "YC"), ("YB", RIGHT_END, ".", "REJ"),
    ("YC", A, ".", "YD"), ("YC", RIGHT_END, ".", "REJ"),
    ("YE", RIGHT_END, LEFT_END, "ACC"), ("YE", A, LEFT_END, "YF"),
    ("YF", A, LEFT_END, "XB"),
    ("XB", ".", A, "XC"), ("XB", ".", RIGHT_END, "REJ"),
    ("XC", ".", A, "XD"), ("XC", ".", RIGHT_END, "REJ"),
    ("XD", A, A, "XB"), ("XD", LEFT_END, A, "XE"), ("XD", ".", RIGHT_END, "REJ"),
    ("XE", LEFT_END, RIGHT_END, "REJ"), ("XE", LEFT_END, A, "XF"),
    ("XF", LEFT_END, A, "YB"),
)
_A3_CORE = ("S", "YB", "YC", "YD", "YE", "YF", "XB", "XC", "XD", "XE", "XF")
_A3_MOVES = {
    "S": (0, 0), "YD": (1, 0), "YB": (1, -1), "YC": (1, 0), "YE": (1, 0), "YF": (-1, 0),
    "XB": (-1, 1), "XC": (0, 1), "XD": (0, 1), "XE": (0, 1), "XF": (0, -1), "ACC": (0, 0),
}
_SCANS2 = tuple(product((LEFT_END, A, RIGHT_END), repeat=2))


def _a3_maps():
    """scan pair -> {source: target} with rejecting targets numbered apart."""
    maps = {}
    for s1, s2 in _SCANS2:
        m = {}
        k = 0
        for q, p1, p2, t in _A3_RULES:
            if p1 in (".", s1) and p2 in (".", s2):
                if t == "REJ":
                    t = f"REJ{k}"
                    k += 1
                m[q] = t
        maps[(s1, s2)] = m
    n_rej = max(sum(1 for t in m.values() if t.startswith("REJ")) for m in maps.values())
    return maps, tuple(f"REJ{i}" for i in range(n_rej))


def in_a3(n: int) -> bool:
    m = 1
    while m < n:
        m *= 9
    return m == n


def machine_a3() -> ZooEntry:
    maps, rejs = _a3_maps()
    states = _A3_CORE + ("ACC",) + rejs
    moves = dict(_A3_MOVES, **{r: (0, 0) for r in rejs})
    partial = {sc: {q: [(t, 1)] for q, t in m.items()} for sc, m in maps.items()}
    trans = complete_unidirectional(states, None, _SCANS2, partial, moves)
    spec = make_spec(QFA, 2, states, "S", ["ACC"], rejs, [A], trans, name="a3")
    rows = tuple(BehaviorRow(A * n, Fraction(int(in_a3(n))), "ACCEPT" if in_a3(n) else "REJECT")
                 for n in (1, 3, 5, 9, 27, 81))
    return ZooEntry(
        "a3", spec,
        "two-head reversible recognizer of {a^n : n = 3^(2m)} (round-based head leapfrog)",
        rows,
        notes=(
            "rounds alternate the runner head; the runner advances 3 cells per backward step of the other",
            "unspecified (state, scan pair) cells are completed one-to-one onto unused targets, "
            "so every column is a basis vector and U is a permutation",
            "distinct rejecting states REJ0.. keep rejecting moves injective",
            "n = 1 (3^0) is accepted",
        ))


# ---------------------------------------------------------------------------
# rotation machine over A3

def rotation_theta(members, m_max: int, flip_sign: bool = False) -> Fraction:
    """theta / pi for the truncated series over n = 9^0 .. 9^m_max."""
    total = Fraction(0)
    for i in range(m_max + 1):
        n = 9 ** i
        bit = int(n in members) ^ int(flip_sign)
        total += Fraction((-1) ** bit, 9 * n)
    return 2 * total


def rotation_prediction(n: int, theta_pi: Fraction, shift_pi: Fraction) -> float:
    """sin^2(n theta + shift), computed from exact multiples of pi."""
    r = (n * theta_pi + shift_pi) % 2
    return math.sin(float(r) * math.pi) ** 2


def machine_rotation(members=(9,), m_max: int = 2, shift=Fraction(7, 18), flip_sign: bool = False) -> ZooEntry:
    """A3 front-end followed by the rotation sweep.

    ``shift`` is the final rotation angle as a multiple of pi.  ``flip_sign``
    swaps the sign attached to members in the series for theta.
    """
    members = frozenset(int(m) for m in members)
    if m_max < 0 or m_max > 3:
        raise MachineError("m_max must lie in 0..3")
    for m in members:
        if not in_a3(m) or m > 9 ** m_max:
            raise MachineError(f"member {m} is not 9^i with i <= m_max")
    shift = Fraction(shift)
    theta = rotation_theta(members, m_max, flip_sign)
    maps, rejs = _a3_maps()
    states = _A3_CORE + ("G1", "G2", "ACC", "REJR") + rejs
    moves = dict(_A3_MOVES, G1=(-1, 0), G2=(-1, 0), REJR=(0, 0), **{r: (0, 0) for r in rejs})
    cos_t, sin_t = Amplitude.trig("cos", theta), Amplitude.trig("sin", theta)
    cos_s, sin_s = Amplitude.trig("cos", shift), Amplitude.trig("sin", shift)
    partial = {}
    for sc, m in maps.items():
        rules = {q: [("G1" if t == "ACC" else t, 1)] for q, t in m.items()}
        if sc[0] == A:
            rules["G1"] = [("G1", cos_t), ("G2", sin_t)]
            rules["G2"] = [("G1", -sin_t), ("G2", cos_t)]
        elif sc[0] == LEFT_END:
            rules["G1"] = [("REJR", cos_s), ("ACC", sin_s)]
            rules["G2"] = [("REJR", -sin_s), ("ACC", cos_s)]
        partial[sc] = rules
    trans = complete_unidirectional(states, None, _SCANS2, partial, moves)
    spec = make_spec(QFA, 2, states, "S", ["ACC"], ("REJR",) + rejs, [A], trans, name="rotation")
    rows = []
    for n in sorted({1, 5, 9, 81} | set(members)):
        if in_a3(n):
            p = rotation_prediction(n, theta, shift)
            rows.append(BehaviorRow(A * n, p, note="sin^2(n theta + shift)"))
        else:
            rows.append(BehaviorRow(A * n, 0.0, "REJECT", "rejected by the A3 front-end"))
    tail = 2 * Fraction(1, 9 * 9 ** (m_max + 1)) * Fraction(9, 8)
    return ZooEntry(
        "rotation", spec,
        "A3 front-end, R_theta sweep of head 1, final rotation by the shift, relabel, measure",
        tuple(rows),
        notes=(
            f"theta/pi = {theta} (series truncated at 9^{m_max})",
            f"truncation changes theta/pi by at most {tail} in absolute value",
            f"shift/pi = {shift}; flip_sign = {flip_sign}",
            "for n = 9^m, n*theta is +-2pi/9 modulo 2pi plus a tail of at most 2pi/72, "
            "so the shifted angle sits near 110 or 30 degrees rather than 90 or 0",
        ),
        params={"members": sorted(members), "m_max": m_max, "shift": shift, "flip_sign": flip_sign,
                "theta_over_pi": theta})


# ---------------------------------------------------------------------------
# L_eps one-way pfa

def l_eps_matrices(eps) -> dict:
    """Column-stochastic 5x5 matrices for the three-register walk plus halting pair."""
    eps = Fraction(eps)
    if not (0 < eps <= 1):
        raise MachineError("eps must lie in (0, 1]")
    c = 1 / (2 * eps)
    a_cent = [[c, 0, 0], [0, 0, 0], [1 - c, 1, 1]]
    if any(v < 0 for row in a_cent for v in row):
        raise MachineError(f"eps = {eps} makes (2eps-1)/2eps negative; need eps >= 1/2")
    h = Fraction(1, 2)
    a0 = [[1, h, 0], [0, h, 0], [0, 0, 1]]
    a1 = [[h, 0, 0], [h, 1, 0], [0, 0, 1]]
    b = [[0, 1, 0], [1, 0, 1]]

    def block(a):
        m = [[Fraction(0)] * 5 for _ in range(5)]
        for i in range(3):
            for j in range(3):
                m[i][j] = Fraction(a[i][j])
        m[3][3] = m[4][4] = Fraction(1)
        return m

    end = [[Fraction(0)] * 5 for _ in range(5)]
    for i in range(2):
        for j in range(3):
            end[3 + i][j] = Fraction(b[i][j])
    end[3][3] = end[4][4] = Fraction(1)
    return {LEFT_END: block(a_cent), "0": block(a0), "1": block(a1), RIGHT_END: end}


def machine_l_eps(eps=Fraction(1, 2)) -> ZooEntry:
    eps = Fraction(eps)
    mats = l_eps_matrices(eps)
    states = ("v1", "v2", "v3", "acc", "rej")
    trans = []
    for sym, m in mats.items():
        for j, src in enumerate(states[:3]):
            for i, dst in enumerate(states):
                if m[i][j]:
                    trans.append((src, (sym,), dst, (1,), m[i][j]))
        for q in ("acc", "rej"):
            trans.append((q, (sym,), q, (1,), 1))
    spec = make_spec(PFA, 1, states, "v1", ["acc"], ["rej"], ["0", "1"], trans, head_motion=ONE_WAY,
                     name="l_eps")
    rows = tuple(BehaviorRow(x, l_eps_expected(x, eps)) for x in ("", "1", "11", "01", "10", "0110"))
    return ZooEntry(
        "l_eps", spec,
        "one-way pfa whose acceptance probability is a binary fraction of the reversed input",
        rows,
        notes=(
            "p_acc(y_1..y_n) = 0.y_n..y_1 / (2 eps): the last symbol read is the most significant bit",
            "so p_acc(x reversed) = 0.x / (2 eps); e.g. p_acc('01') = 1/2, p_acc('10') = 1/4",
            "only eps >= 1/2 keeps the left-endmarker column nonnegative",
        ),
        params={"eps": eps})


def binary_fraction(bits: str) -> Fraction:
    return sum((Fraction(1, 2 ** (i + 1)) for i, b in enumerate(bits) if b == "1"), Fraction(0))


def l_eps_expected(x: str, eps=Fraction(1, 2)) -> Fraction:
    return binary_fraction(x[::-1]) / (2 * Fraction(eps))


# ---------------------------------------------------------------------------
# small fixtures

def _stationary(states, initial, accepting, rejecting, alphabet, columns, name, kind=QFA):
    """One-head machine applying the same local map on every symbol without moving."""
    trans = []
    for sym in (LEFT_END,) + tuple(alphabet) + (RIGHT_END,):
        for src, outs in columns.items():
            for dst, w in outs:
                trans.append((src, (sym,), dst, (0,), w))
    return make_spec(kind, 1, states, initial, accepting, rejecting, alphabet, trans, name=name)


def machine_coin() -> ZooEntry:
    cols = {
        "q0": [("acc", Fraction(3, 5)), ("rej", Fraction(4, 5))],
        "acc": [("acc", Fraction(4, 5)), ("rej", Fraction(-3, 5))],
        "rej": [("q0", 1)],
    }
    spec = _stationary(("q0", "acc", "rej"), "q0", ["acc"], ["rej"], [A], cols, "coin")
    rows = tuple(BehaviorRow(x, Fraction(9, 25)) for x in ("", "a", "aa", "aaa"))
    return ZooEntry(
        "coin", spec,
        "rational-amplitude coin: the first step splits into accept/reject with amplitudes 3/5, 4/5",
        rows,
        notes=("a third state is needed so the column for q0 extends to an orthogonal 3x3 map",
               "the same map is used on every symbol, so D = U Pi_non is nilpotent"))


def machine_accept() -> ZooEntry:
    spec = _stationary(("q0", "acc"), "q0", ["acc"], [], [A],
                       {"q0": [("acc", 1)], "acc": [("q0", 1)]}, "accept")
    return ZooEntry("accept", spec, "accepts every input in one step",
                    tuple(BehaviorRow(x, Fraction(1), "ACCEPT") for x in ("", "a", "aa")))


def machine_reject() -> ZooEntry:
    spec = _stationary(("q0", "rej"), "q0", [], ["rej"], [A],
                       {"q0": [("rej", 1)], "rej": [("q0", 1)]}, "reject")
    return ZooEntry("reject", spec, "rejects every input in one step",
                    tuple(BehaviorRow(x, Fraction(0), "REJECT") for x in ("", "a", "aa")))


CITATIONS = {
    "upal": "UPal = {a^n b^n}: one-way quantum recognizer with unbounded error (Kondacs-Watrous); reference only",
    "l_nh": "L_NH: language witnessing non-halting unbounded-error recognition; reference only",
}

_BUILDERS: dict[str, Callable] = {
    "a3": machine_a3,
    "coin": machine_coin,
    "l_eps": machine_l_eps,
    "rotation": machine_rotation,
    "accept": machine_accept,
    "reject": machine_reject,
}


def zoo_ids() -> tuple:
    return tuple(_BUILDERS)


def _parse_args(text: str) -> list:
    args = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if part.startswith("{") and part.endswith("}"):
            args.append(tuple(int(v) for v in part[1:-1].split(";") if v.strip()))
        else:
            args.append(Fraction(part))
    return args


def get(name: str) -> ZooEntry:
    """Look up an entry by id, optionally with arguments: ``l_eps(3/4)``, ``rotation({9;81},2)``."""
    m = re.fullmatch(r"([a-z_0-9]+)(?:\((.*)\))?", name.strip())
    if not m or m.group(1) not in _BUILDERS:
        if m and m.group(1) in CITATIONS:
            raise MachineError(f"{m.group(1)} is catalogued as a citation only: {CITATIONS[m.group(1)]}")
        raise MachineError(f"unknown zoo id {name!r}; known: {', '.join(_BUILDERS)}")
    builder = _BUILDERS[m.group(1)]
    args = _parse_args(m.group(2) or "")
    if m.group(1) == "rotation" and len(args) > 1:
        args[1] = int(args[1])
    return builder(*args)
