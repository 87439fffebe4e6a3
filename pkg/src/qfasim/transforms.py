"""Machine-to-machine constructions with a certified probability relation.

Every builder returns a new :class:`MachineSpec`; :func:`certify` also returns
a :class:`TransformCert` recording the claimed relation and the renaming of
states.  Fresh states carry a ``#k`` suffix with k above any suffix already
present, so repeated transforms never collide.

Two patterns keep the outputs unitary:

* a state-local rotation W applied after U (``_mix``).  Because W only mixes
  target states, W·U is unitary whenever U is.  It is used to split amplitude
  off the initial state (damp, affine_combine); the relation then needs the
  initial state to be re-entered only from halting states, which is checked.
* column exchange for sequential composition (product, square_pair): when the
  first machine halts in a branch state, that state takes over the columns of
  a copy of the second machine's initial state running on head 2.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .evolution import step_simulate
from .linalg import QI
from .model import (ONE_WAY, PFA, QFA, TWO_WAY, Amplitude, MachineError, MachineSpec, Transition)

_SUFFIX = re.compile(r"#(\d+)$")


@dataclass
class TransformCert:
    transform: str
    inputs: tuple
    relation: str
    params: dict = field(default_factory=dict)
    states_in: tuple = ()
    states_out: int = 0
    renaming: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"transform": self.transform, "inputs": list(self.inputs), "relation": self.relation,
                "params": {k: str(v) for k, v in self.params.items()},
                "states_in": list(self.states_in), "states_out": self.states_out,
                "renaming": dict(self.renaming)}


# ---------------------------------------------------------------------------
# helpers


class _Fresh:
    """Per-transform '#k' counter starting above every suffix in use."""

    def __init__(self, *specs: MachineSpec):
        used = [int(m.group(1)) for s in specs for q in s.states if (m := _SUFFIX.search(q))]
        self.k = max(used, default=0)

    def next(self) -> int:
        self.k += 1
        return self.k


def _strip(name: str) -> str:
    return _SUFFIX.sub("", name)


def _rename(spec: MachineSpec, k: int) -> dict:
    return {q: f"{_strip(q)}#{k}" for q in spec.states}


def _scans(symbols: Sequence[str], heads: int):
    return list(itertools.product(symbols, repeat=heads))


def _fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def _require(spec: MachineSpec, what: str, kind: str | None = QFA, heads: int | None = None):
    if kind is not None and spec.kind != kind:
        raise MachineError(f"{what} needs a {kind} machine, got {spec.kind}")
    if heads is not None and spec.heads != heads:
        raise MachineError(f"{what} needs a {heads}-head machine, got {spec.heads} heads")


def initial_entries(spec: MachineSpec) -> set:
    """States with a nonzero transition into the initial state."""
    return {t.source for t in spec.transitions if t.target == spec.initial and not t.weight.is_zero()}


def require_entry_free(spec: MachineSpec, what: str):
    """The initial state may be re-entered only from halting states."""
    bad = sorted(q for q in initial_entries(spec) if not spec.is_halting(q))
    if bad:
        raise MachineError(f"{what}: initial state {spec.initial!r} is re-entered from non-halting "
                           f"state(s) {bad}; the relation would not hold")


def _mix(transitions: list, w: dict) -> list:
    """Compose with a state-local rotation: target t becomes sum_t' W[t', t] t'."""
    out = []
    for src, scan, dst, move, amp in transitions:
        if dst in w:
            for t2, c in w[dst]:
                a = amp * c
                if not a.is_zero():
                    out.append((src, scan, t2, move, a))
        else:
            out.append((src, scan, dst, move, amp))
    return out


def _emit(kind, heads, states, initial, accepting, rejecting, alphabet, transitions, name,
          head_motion=TWO_WAY) -> MachineSpec:
    trans = tuple(Transition(s, tuple(sc), d, tuple(m), Amplitude.of(w)) for s, sc, d, m, w in transitions)
    return MachineSpec(kind, heads, tuple(states), initial, frozenset(accepting), frozenset(rejecting),
                       tuple(alphabet), trans, head_motion, name)


def _raw(spec: MachineSpec, ren: dict | None = None) -> list:
    ren = ren or {q: q for q in spec.states}
    return [(ren[t.source], t.scan, ren[t.target], t.move, t.weight) for t in spec.transitions]


ONE = Amplitude.of(1)


# ---------------------------------------------------------------------------
# complement and complex_to_real


def complement(spec: MachineSpec) -> MachineSpec:
    """Swap the accepting and rejecting sets."""
    return spec.with_changes(accepting=spec.rejecting, rejecting=spec.accepting,
                             name=f"complement({spec.name})" if spec.name else "")


def split_amplitude(amp: Amplitude) -> tuple:
    """(Re, Im) of a grammar amplitude, each again a grammar amplitude.

    Complex literals are multiplied together into one Gaussian rational; the
    remaining factors are real.
    """
    c = QI.make(1, 0)
    real = []
    for kind, v in amp.factors:
        if kind == "cplx":
            c = c * QI.make(*v)
        else:
            real.append((kind, v))
    re_, im = (c.re, c.im) if isinstance(c, QI) else (Fraction(c), Fraction(0))
    base = Amplitude(amp.negative, tuple(real))
    return (base * Amplitude.of(re_), base * Amplitude.of(im))


def complex_to_real(spec: MachineSpec) -> MachineSpec:
    """Real simulation on Q×{R,I}.

    (q,R)->(p,R) and (q,I)->(p,I) carry Re δ, (q,R)->(p,I) carries Im δ and
    (q,I)->(p,R) carries -Im δ, so the amplitude a+bi of |p> sits as a on
    (p,R) and b on (p,I).
    """
    _require(spec, "complex_to_real")
    r = {q: f"{q}.R" for q in spec.states}
    i = {q: f"{q}.I" for q in spec.states}
    trans = []
    for t in spec.transitions:
        re_, im = split_amplitude(t.weight)
        for src, dst, w in ((r, r, re_), (i, i, re_), (r, i, im), (i, r, -im)):
            if not w.is_zero():
                trans.append((src[t.source], t.scan, dst[t.target], t.move, w))
    states = [r[q] for q in spec.states] + [i[q] for q in spec.states]
    acc = [r[q] for q in spec.accepting] + [i[q] for q in spec.accepting]
    rej = [r[q] for q in spec.rejecting] + [i[q] for q in spec.rejecting]
    return _emit(QFA, spec.heads, states, r[spec.initial], acc, rej, spec.alphabet, trans,
                 f"real({spec.name})" if spec.name else "", spec.head_motion)


# ---------------------------------------------------------------------------
# damp and half_split


def damp(spec: MachineSpec, alpha) -> MachineSpec:
    """First step splits √α into a fresh rejecting state, √(1-α) into the run."""
    _require(spec, "damp")
    alpha = _fraction(alpha)
    if not 0 < alpha < 1:
        raise MachineError("damp needs 0 < alpha < 1")
    require_entry_free(spec, "damp")
    fresh = _Fresh(spec)
    k = fresh.next()
    s, r = f"start#{k}", f"rej#{k}"
    q0 = spec.initial
    a, b = Amplitude.sqrt(alpha), Amplitude.sqrt(1 - alpha)
    still = (0,) * spec.heads
    trans = _raw(spec)
    for scan in _scans(spec.symbols, spec.heads):
        trans.append((s, scan, r, still, ONE))
        trans.append((r, scan, s, still, ONE))
    w = {r: [(q0, b), (r, a)], q0: [(q0, a), (r, -b)]}
    trans = _mix(trans, w)
    return _emit(QFA, spec.heads, list(spec.states) + [s, r], s, spec.accepting, set(spec.rejecting) | {r},
                 spec.alphabet, trans, f"damp({spec.name},{alpha})", spec.head_motion)


_H4 = ((1, 1, 1, 1), (1, 1, -1, -1), (1, -1, 1, -1), (1, -1, -1, 1))


def half_split(spec: MachineSpec) -> MachineSpec:
    """Each accepting state now fans out with amplitude 1/2 into two fresh
    accepting and two fresh rejecting states."""
    _require(spec, "half_split")
    fresh = _Fresh(spec)
    half = Amplitude.of(Fraction(1, 2))
    still = (0,) * spec.heads
    trans = [t for t in _raw(spec) if t[0] not in spec.accepting]
    states = list(spec.states)
    acc = set(spec.accepting)
    rej = set(spec.rejecting)
    for q in sorted(spec.accepting, key=spec.states.index):
        k = fresh.next()
        a1, a2, r1, r2 = (f"{_strip(q)}.{tag}#{k}" for tag in ("a1", "a2", "r1", "r2"))
        quad = (a1, a2, r1, r2)
        states += quad
        acc.discard(q)
        acc |= {a1, a2}
        rej |= {r1, r2}
        for t in spec.transitions:
            if t.source == q:
                trans.append((a1, t.scan, t.target, t.move, t.weight))
        for scan in _scans(spec.symbols, spec.heads):
            for src, row in zip((q, a2, r1, r2), _H4):
                for dst, sgn in zip(quad, row):
                    trans.append((src, scan, dst, still, half if sgn > 0 else -half))
    return _emit(QFA, spec.heads, states, spec.initial, acc, rej, spec.alphabet, trans,
                 f"half_split({spec.name})", spec.head_motion)


# ---------------------------------------------------------------------------
# two-head constructions


def _on_head(spec: MachineSpec, ren: dict, head: int, symbols: Sequence[str]) -> dict:
    """Transitions of a 1-head spec lifted to 2 heads, driven by ``head``;
    the other head stays put.  Keyed by source state."""
    out: dict = {ren[q]: [] for q in spec.states}
    for scan in _scans(symbols, 2):
        for t in spec.transitions:
            if t.scan[0] != scan[head]:
                continue
            move = (t.move[0], 0) if head == 0 else (0, t.move[0])
            out[ren[t.source]].append((ren[t.source], scan, ren[t.target], move, t.weight))
    return out


def _same_alphabet(f: MachineSpec, g: MachineSpec, what: str):
    if tuple(f.alphabet) != tuple(g.alphabet):
        raise MachineError(f"{what}: alphabets differ ({f.alphabet} vs {g.alphabet})")


def _sequential(first: MachineSpec, branches: Sequence, fresh: _Fresh, name: str):
    """Run ``first`` on head 1; on entering branch state h run a copy of the
    paired machine on head 2.  ``branches`` holds (h, machine, swap) where swap
    exchanges the copy's accepting and rejecting roles."""
    symbols = first.symbols
    k1 = fresh.next()
    ren1 = _rename(first, k1)
    renaming = {f"first:{q}": v for q, v in ren1.items()}
    cols = _on_head(first, ren1, 0, symbols)
    states = list(ren1.values())
    acc = {ren1[q] for q in first.accepting}
    rej = {ren1[q] for q in first.rejecting}
    for h, machine, swap in branches:
        require_entry_free(machine, name)
        k = fresh.next()
        ren = _rename(machine, k)
        renaming.update({f"{h}:{q}": v for q, v in ren.items()})
        sub = _on_head(machine, ren, 1, symbols)
        states += ren.values()
        m_acc = {ren[q] for q in machine.accepting}
        m_rej = {ren[q] for q in machine.rejecting}
        if swap:
            m_acc, m_rej = m_rej, m_acc
        acc |= m_acc
        rej |= m_rej
        hh, r0 = ren1[h], ren[machine.initial]
        acc.discard(hh)
        rej.discard(hh)
        cols.update(sub)
        cols[hh], cols[r0] = ([(hh,) + c[1:] for c in sub[r0]], [(r0,) + c[1:] for c in cols[hh]])
    trans = [c for q in states for c in cols[q]]
    return states, ren1[first.initial], acc, rej, trans, renaming


def product(f: MachineSpec, g: MachineSpec) -> MachineSpec:
    """p_acc = f·g: g runs on head 2 after f accepts."""
    return _product(f, g)[0]


def _product(f: MachineSpec, g: MachineSpec):
    for m in (f, g):
        _require(m, "product", heads=1)
    _same_alphabet(f, g, "product")
    fresh = _Fresh(f, g)
    branches = [(h, g, False) for h in sorted(f.accepting, key=f.states.index)]
    states, init, acc, rej, trans, ren = _sequential(f, branches, fresh, "product")
    return _emit(QFA, 2, states, init, acc, rej, f.alphabet, trans, f"product({f.name},{g.name})"), ren


def square_pair(spec: MachineSpec) -> MachineSpec:
    """Accept on (acc,acc) or (rej,rej), reject on mixed outcomes."""
    return _square_pair(spec)[0]


def _square_pair(spec: MachineSpec):
    _require(spec, "square_pair", heads=1)
    if not spec.is_real:
        raise MachineError("square_pair needs real amplitudes; apply complex_to_real first")
    fresh = _Fresh(spec)
    branches = [(h, spec, h in spec.rejecting) for h in spec.states if spec.is_halting(h)]
    states, init, acc, rej, trans, ren = _sequential(spec, branches, fresh, "square_pair")
    return _emit(QFA, 2, states, init, acc, rej, spec.alphabet, trans, f"square_pair({spec.name})"), ren


def rational_squares(r: Fraction) -> list:
    """Fewest rationals (at most four) whose squares sum to r >= 0."""
    r = Fraction(r)
    den = r.denominator
    n = r.numerator * den
    for k in range(1, 5):
        hit = _int_squares(n, k)
        if hit is not None:
            return [Fraction(x, den) for x in hit]
    raise AssertionError("four squares always suffice")


def _int_squares(n: int, k: int):
    if k == 1:
        s = math.isqrt(n)
        return [s] if s * s == n else None
    for a in range(math.isqrt(n), 0, -1):
        rest = _int_squares(n - a * a, k - 1) if n - a * a else None
        if rest is not None:
            return [a] + rest
    return None


def _reflection(v: Sequence[Amplitude]) -> list:
    """Orthogonal matrix (rows of Amplitudes) whose first column is the unit vector v.

    A Householder reflection pivoting on a rational coordinate v_j keeps every
    entry a product of grammar factors.
    """
    n = len(v)
    piv = next(j for j, x in enumerate(v) if isinstance(x.exact, Fraction))
    vj = v[piv].exact
    zero = Amplitude.of(0)
    if vj == 1:
        h = [[ONE if i == k else zero for k in range(n)] for i in range(n)]
    else:
        s = Fraction(1) / (1 - vj)
        w = [v[i] if i != piv else Amplitude.of(vj - 1) for i in range(n)]
        h = [[(w[i] * w[k] * Amplitude.of(-s)) for k in range(n)] for i in range(n)]
        for i in range(n):
            sq = (w[i] * w[i]).exact
            if not isinstance(sq, Fraction):
                raise MachineError("affine_combine: squared coefficient is not rational")
            h[i][i] = Amplitude.of(1 - sq * s)
    order = [piv] + [k for k in range(n) if k != piv]
    return [[h[i][k] for k in order] for i in range(n)]


def affine_combine(f: MachineSpec, g: MachineSpec, alpha, beta) -> MachineSpec:
    """p_acc = α·f + β·g on two heads."""
    return _affine(f, g, alpha, beta)[0]


def _affine(f: MachineSpec, g: MachineSpec, alpha, beta):
    for m in (f, g):
        _require(m, "affine_combine", heads=1)
    _same_alphabet(f, g, "affine_combine")
    alpha, beta = _fraction(alpha), _fraction(beta)
    gamma = 1 - alpha - beta
    if alpha < 0 or beta < 0 or gamma < 0:
        raise MachineError("affine_combine needs alpha, beta >= 0 and alpha + beta <= 1")
    require_entry_free(f, "affine_combine")
    require_entry_free(g, "affine_combine")
    fresh = _Fresh(f, g)
    kf, kg, k = fresh.next(), fresh.next(), fresh.next()
    rf, rg = _rename(f, kf), _rename(g, kg)
    parts = rational_squares(gamma) if gamma else [Fraction(0)]
    q0, q1 = f"start#{k}", f"turn#{k}"
    rrs = [f"rej{i}#{k}" if i else f"rej#{k}" for i in range(len(parts))]
    symbols = f.symbols
    cols = _on_head(f, rf, 0, symbols)
    cols.update(_on_head(g, rg, 0, symbols))
    trans = [c for v in cols.values() for c in v]
    for scan in _scans(symbols, 2):
        trans += [(q0, scan, q1, (0, -1), ONE), (q1, scan, rrs[0], (0, 1), ONE), (rrs[0], scan, q0, (0, 0), ONE)]
        trans += [(r, scan, r, (0, 0), ONE) for r in rrs[1:]]
    v = [Amplitude.of(p) for p in parts] + [Amplitude.sqrt(alpha), Amplitude.sqrt(beta)]
    order = rrs + [rf[f.initial], rg[g.initial]]
    h = _reflection(v)
    n = len(order)
    w = {order[j]: [(order[i], h[i][j]) for i in range(n) if not h[i][j].is_zero()] for j in range(n)}
    trans = _mix(trans, w)
    states = [q0, q1] + rrs + list(rf.values()) + list(rg.values())
    acc = {rf[q] for q in f.accepting} | {rg[q] for q in g.accepting}
    rej = {rf[q] for q in f.rejecting} | {rg[q] for q in g.rejecting} | set(rrs)
    ren = {**{f"f:{q}": v for q, v in rf.items()}, **{f"g:{q}": v for q, v in rg.items()}}
    return _emit(QFA, 2, states, q0, acc, rej, f.alphabet, trans,
                 f"affine({f.name},{g.name},{alpha},{beta})"), ren


# ---------------------------------------------------------------------------
# one-way embedding

SPLIT = "split"
ALL_REJECT = "reject"


def one_way_embed(spec: MachineSpec, variant: str = SPLIT) -> MachineSpec:
    """After the right endmarker, surviving mass halts: split evenly between
    fresh accepting and rejecting states, or rejected outright.

    The quantum split fans each non-halting state out with amplitude 1/2 into
    two accepting and two rejecting states, which keeps rational machines
    exact.
    """
    if spec.head_motion != ONE_WAY:
        raise MachineError("one_way_embed needs a ONE_WAY machine")
    if spec.heads != 1:
        raise MachineError("one_way_embed needs a 1-head machine")
    if variant not in (SPLIT, ALL_REJECT):
        raise MachineError(f"unknown variant {variant!r}")
    quantum = spec.kind == QFA
    k = _Fresh(spec).next()
    end = ">"
    non = [q for q in spec.states if not spec.is_halting(q)]
    if variant == ALL_REJECT:
        tags, signs = ("rej",), ((1,),)
    elif quantum:
        tags, signs = ("a1", "a2", "r1", "r2"), _H4
    else:
        tags, signs = ("acc", "rej"), ((1, 1),)
    fresh = {q: [f"{_strip(q)}.{t}#{k}" for t in tags] for q in non}
    weight = Amplitude.of(Fraction(1, 2)) if len(tags) > 1 else ONE
    w_end = {q: [(f, weight) for f in fresh[q]] for q in non}
    trans = []
    for t in spec.transitions:
        row = [(t.source, t.scan, t.target, t.move, t.weight)]
        trans += _mix(row, w_end) if t.scan[0] == end else row
    acc, rej = set(spec.accepting), set(spec.rejecting)
    for q in non:
        group = fresh[q]
        acc |= {f for f, tag in zip(group, tags) if tag[0] == "a"}
        rej |= {f for f, tag in zip(group, tags) if tag[0] == "r"}
        for sym in spec.symbols:
            scan = (sym,)
            if sym != end or not quantum:
                trans += [(f, scan, f, (1,), ONE) for f in group]
                continue
            # columns completing the endmarker step to a unitary
            trans.append((group[0], scan, q, (1,), ONE))
            for src, row in zip(group[1:], signs[1:]):
                trans += [(src, scan, dst, (1,), weight if sg > 0 else -weight) for dst, sg in zip(group, row)]
    states = list(spec.states) + [f for q in non for f in fresh[q]]
    return _emit(spec.kind, 1, states, spec.initial, acc, rej, spec.alphabet, trans,
                 f"embed({spec.name},{variant})", TWO_WAY)


# ---------------------------------------------------------------------------
# certificates

RELATIONS = {
    "complement": "p_out,acc = p_in,rej; p_out,rej = p_in,acc",
    "complex_to_real": "p_out,acc = p_in,acc; p_out,rej = p_in,rej",
    "damp": "p_out,acc = (1-α)·p_in,acc; p_out,rej = α + (1-α)·p_in,rej",
    "half_split": "p_out,acc = p_in,acc/2; p_out,rej = p_in,rej + p_in,acc/2",
    "affine_combine": "p_out,acc = α·p_f,acc + β·p_g,acc; p_out,rej = α·p_f,rej + β·p_g,rej + (1-α-β)",
    "product": "p_out,acc = p_f,acc·p_g,acc; p_out,rej = p_f,rej + p_f,acc·p_g,rej",
    "square_pair": "p_out,acc = p_in,acc² + p_in,rej²; p_out,rej = 2·p_in,acc·p_in,rej",
    "one_way_embed": "split: p_out = p_in + m/2 each; reject: p_out,rej = p_in,rej + m (m = mass left after $)",
}


def _predict(name: str, params: dict, probs: list) -> tuple:
    """Expected (p_acc, p_rej) of the output from the inputs' (p_acc, p_rej, residual)."""
    pa, pr, m = probs[0]
    if name == "complement":
        return pr, pa
    if name == "complex_to_real":
        return pa, pr
    if name == "damp":
        a = params["alpha"]
        return (1 - a) * pa, a + (1 - a) * pr
    if name == "half_split":
        return pa / 2, pr + pa / 2
    if name == "affine_combine":
        a, b = params["alpha"], params["beta"]
        ga, gr, _ = probs[1]
        return a * pa + b * ga, a * pr + b * gr + (1 - a - b)
    if name == "product":
        ga, gr, _ = probs[1]
        return pa * ga, pr + pa * gr
    if name == "square_pair":
        return pa * pa + pr * pr, 2 * pa * pr
    if name == "one_way_embed":
        if params.get("variant", SPLIT) == SPLIT:
            return pa + m / 2, pr + m / 2
        return pa, pr + m
    raise KeyError(name)


_BUILDERS: dict[str, Callable] = {
    "complement": lambda s, **p: (complement(s[0]), {}),
    "complex_to_real": lambda s, **p: (complex_to_real(s[0]), {f"{q}": f"{q}.R" for q in s[0].states}),
    "damp": lambda s, **p: (damp(s[0], p["alpha"]), {}),
    "half_split": lambda s, **p: (half_split(s[0]), {}),
    "affine_combine": lambda s, **p: _affine(s[0], s[1], p["alpha"], p["beta"]),
    "product": lambda s, **p: _product(s[0], s[1]),
    "square_pair": lambda s, **p: _square_pair(s[0]),
    "one_way_embed": lambda s, **p: (one_way_embed(s[0], p.get("variant", SPLIT)), {}),
}

ARITY = {"affine_combine": 2, "product": 2}


def transform_names() -> list:
    return list(_BUILDERS)


def certify(name: str, inputs: Sequence[MachineSpec], **params) -> tuple:
    """Build the output of transform ``name`` together with its certificate."""
    if name not in _BUILDERS:
        raise MachineError(f"unknown transform {name!r}; choose from {', '.join(_BUILDERS)}")
    need = ARITY.get(name, 1)
    if len(inputs) != need:
        raise MachineError(f"{name} takes {need} machine(s), got {len(inputs)}")
    for key in ("alpha", "beta"):
        if key in params:
            params[key] = _fraction(params[key])
    out, ren = _BUILDERS[name](list(inputs), **params)
    new = set(out.states) - {q for s in inputs for q in s.states}
    if not ren:
        ren = {}
    for q in sorted(new):
        ren.setdefault(f"fresh:{q}", q)
    cert = TransformCert(name, tuple(s.name or "?" for s in inputs), RELATIONS[name], dict(params),
                         tuple(len(s.states) for s in inputs), len(out.states), ren)
    return out, cert


@dataclass
class RelationCheck:
    input: str
    expected: tuple
    observed: tuple
    ok: bool


def check_relation(cert: TransformCert, inputs: Sequence[MachineSpec], output: MachineSpec, x: str,
                   tol: float = 1e-9) -> RelationCheck:
    """Simulate inputs and output on x and compare against the certified relation."""
    probs = []
    for spec in inputs:
        t_max = len(x) + 2 if cert.transform == "one_way_embed" else None
        tr = step_simulate(spec, x, t_max=t_max)
        probs.append((tr.p_acc, tr.p_rej, tr.residual))
    exp = _predict(cert.transform, cert.params, probs)
    tr = step_simulate(output, x)
    obs = (tr.p_acc, tr.p_rej)
    exact = all(isinstance(v, Fraction) for v in exp + obs)
    if exact:
        ok = exp == obs
    else:
        ok = all(abs(complex(e) - complex(o)) <= tol for e, o in zip(exp, obs))
    return RelationCheck(x, exp, obs, ok)
