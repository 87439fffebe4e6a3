"""Clow-walk generators for det(I - D~ (x) D~) and its signed cofactors.

A generator is a multi-head PFA assembled from the subroutine machines.  It
walks clow sequences over T = I - D~ (x) D~: clow heads and successors are
drawn with the equiprobable generator, every edge c1 -> c2 survives with
probability |T[c1, c2]|, and the sign of the sequence sits in the finite
control.  Discarded paths accept and reject with probability 1/2 each, so
they cancel in p_acc - p_rej.

Head layout (0-based): conf0 on 0-1, conf1 on 2-3, conf2 on 4-5, counter on
6-7, generator work heads 8-9, comparator and offset work heads 10-12, and
for the cofactor variants the target position on 13-14.

Two evaluations are provided.  ``GeneratorMachine`` tabulates the composite
lazily, so ``pfa_run_exact`` propagates it step by step; that is affordable
only for shortened counters.  ``evaluate`` propagates the same program one
walk edge at a time, with every subroutine replaced by its exit distribution
computed from exact runs of the subroutine machine, and sums the
zero-probability branches in bulk.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence

from ..model import LEFT_END as L, QFA, RIGHT_END as R, MachineError, MachineSpec
from ..resolvent import PLUS, SIGNS
from . import subroutines as sub
from .propagate import run_kernel, tape_of

C0, C1, C2, CNT, EW, CW, TG = (0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11, 12), (13, 14)
ACC, REJ = "ACC", "REJ"

DET, SCALED, MINORS = "det", "det-scaled", "minors"


class Regs(NamedTuple):
    h0: int = 0
    h1: int = 0
    h2: int = 0
    par: int = 0
    cnt: str = "c0"
    d1: frozenset = frozenset()
    d2: frozenset = frozenset()
    e1: frozenset = frozenset()
    e2: frozenset = frozenset()
    tgt: tuple | None = None     # (accepting state index, s1, s2) of the cofactor column
    seek: int = 0                # cells head 13 still has to travel (fixed-target variant)


# ---------------------------------------------------------------------------
# entries of T from the transition table


class PairWeights:
    """|T[c1, c2]| and its sign, read off the source machine's transitions.

    Rows are targets, columns sources: T[c1, c2] = [c1 = c2] - D~[c1a, c2a] D~[c1b, c2b]
    with D~[(p, m, b), (q, l, a)] the positive part of D[(p, m), (q, l)] if
    a = b and the negative part otherwise.
    """

    def __init__(self, qfa: MachineSpec):
        if qfa.kind != QFA or qfa.heads != 1:
            raise MachineError("generators take one-head quantum machines")
        if not qfa.is_exact or not qfa.is_real:
            raise MachineError("generators need real rational amplitudes")
        self.qfa = qfa
        self.states = tuple(qfa.states)
        self.nq = len(self.states)
        self.nb = sub.n_blocks(self.nq)
        self.delta: dict = {}
        for t in qfa.transitions:
            if qfa.is_halting(t.source):
                continue
            key = (t.source, t.scan[0], t.target, t.move[0])
            self.delta[key] = self.delta.get(key, 0) + t.weight.exact
        self.accepting = [q for q in self.states if q in qfa.accepting]

    def block(self, q1: str, q2: str, b1: int, b2: int) -> int:
        i1, i2 = self.states.index(q1), self.states.index(q2)
        return ((i1 * self.nq + i2) * 2 + SIGNS.index(b1)) * 2 + SIGNS.index(b2)

    def unblock(self, h: int) -> tuple:
        h, s2 = divmod(h, 2)
        h, s1 = divmod(h, 2)
        i1, i2 = divmod(h, self.nq)
        return self.states[i1], self.states[i2], SIGNS[s1], SIGNS[s2]

    @cached_property
    def i0_block(self) -> int:
        q0 = self.qfa.initial
        return self.block(q0, q0, PLUS, PLUS)

    def target_block(self, tgt: tuple) -> int:
        j, b1, b2 = tgt
        q = self.accepting[j]
        return self.block(q, q, b1, b2)

    def _tilde(self, q: str, sym: str, p: str, ds, a: int, b: int) -> Fraction:
        v = sum((self.delta.get((q, sym, p, d), 0) for d in ds), Fraction(0))
        if a == b:
            return v if v > 0 else Fraction(0)
        return -v if v < 0 else Fraction(0)

    def entry(self, h_row: int, h_col: int, d1, d2, sym1: str, sym2: str) -> tuple:
        """(|T[row, col]|, negative?) where d_i lists offsets with row_pos = col_pos + d."""
        p1, p2, b1, b2 = self.unblock(h_row)
        q1, q2, a1, a2 = self.unblock(h_col)
        m = self._tilde(q1, sym1, p1, d1, a1, b1) * self._tilde(q2, sym2, p2, d2, a2, b2)
        if h_row == h_col and 0 in d1 and 0 in d2:
            return 1 - m, False
        return m, m != 0


# ---------------------------------------------------------------------------
# composite machine


@dataclass(frozen=True)
class Call:
    frag: MachineSpec
    heads: tuple
    entry: object        # regs -> fragment state
    exit: object         # (regs, exit state) -> (regs, label)


@dataclass(frozen=True)
class Step:
    fn: object           # (regs, scan) -> [(prob, regs, label, move dict)]


class GeneratorMachine:
    """Lazily tabulated k-head PFA running one of the clow-walk programs.

    ``mode`` is DET (plain determinant), SCALED (determinant damped to the
    cofactor scale) or MINORS (signed sum of cofactors over accepting
    targets).  ``target`` = (accepting state index, s1, s2, cell) pins a
    single cofactor column in DET mode; head 13 walks to the cell first.
    ``block`` shortens the counter to block*(n+2)^2 steps (for cross-checks).
    """

    kind = "PFA"

    def __init__(self, qfa: MachineSpec, mode: str = DET, block: int | None = None, target: tuple | None = None):
        if mode not in (DET, SCALED, MINORS):
            raise MachineError(f"unknown generator mode {mode!r}")
        if target is not None and mode != DET:
            raise MachineError("a fixed cofactor column needs mode 'det'")
        self.w = PairWeights(qfa)
        if target is not None and not 0 <= target[0] < len(self.w.accepting):
            raise MachineError("cofactor column must name an accepting state")
        self.qfa = qfa
        self.mode = mode
        self.block_len = block
        self.fixed_target = target
        self.alphabet = tuple(qfa.alphabet)
        self.accepting = frozenset({ACC})
        self.rejecting = frozenset({REJ})
        self.name = f"gen[{mode}]({qfa.name})"
        al = self.alphabet
        self.frags = {
            "equi": sub.build_equiprob(self.w.nq, al),
            "pos": sub.build_equiprob(self.w.nq, al, with_block=False),
            "cmp": sub.build_comparator(self.w.nq, al),
            "off": sub.build_offset(al),
            "copy1": sub.build_copy(2, al),
            "copy2": sub.build_copy(3, al),
            "zero2": sub.build_zero(2, al),
            "zero4": sub.build_zero(4, al),
            "counter": sub.build_counter(self.w.nq, al, block),
        }
        self.ops = self._program()
        used = {h for op in self.ops.values() if isinstance(op, Call) for h in op.heads}
        self.heads = max(used) + 1
        self.initial = self._resolve(self._initial_regs(), self._first_label())
        self._cache: dict = {}

    # -- program ------------------------------------------------------------
    def _first_label(self) -> str:
        if self.fixed_target is not None:
            return "seek"
        return "g0" if self.mode == DET else "pick"

    def _initial_regs(self) -> Regs:
        if self.fixed_target is None:
            return Regs()
        return Regs(tgt=tuple(self.fixed_target[:3]), seek=self.fixed_target[3])

    def n_accepting_choices(self) -> int:
        return max(1, len(self.w.accepting))

    def _program(self) -> dict:
        f = self.frags
        w = self.w
        minor = self.mode == MINORS or self.fixed_target is not None
        ops: dict = {}

        def equi_exit(target_slot, nxt):
            def ex(r, q):
                if q == "fail":
                    return r, "NEU"
                return r._replace(**{target_slot: int(q.split(".")[1])}), nxt
            return ex

        def go(nxt, **upd):
            return lambda r, q: (r._replace(**upd) if upd else r, nxt)

        def off_exit(slot, nxt):
            return lambda r, q: (r._replace(**{slot: sub.parse_offset_exit(q)}), nxt)

        # prefix of the scaled and cofactor variants: choose the column, then its position
        def pick(r, scan):
            k = self.n_accepting_choices()
            outs = []
            for j in range(k):
                for s1 in SIGNS:
                    for s2 in SIGNS:
                        p = Fraction(1, 4 * k)
                        if self.mode == MINORS and w.accepting:
                            outs.append((p, r._replace(tgt=(j, s1, s2)), "gl", None))
                        elif self.mode == SCALED and (j, s1, s2) == (0, PLUS, PLUS):
                            outs.append((p, r, "gl", None))
                        else:
                            outs.append((p, r, "NEU", None))
            return outs

        if self.mode != DET:
            ops["pick"] = Step(pick)
            ops["gl"] = Call(f["pos"], (TG[0], TG[1], EW[0], EW[1]), lambda r: f["pos"].initial,
                             lambda r, q: (r, "NEU" if q == "fail" else "gl2"))

        def gl2(r, scan):
            ok = scan[TG[1]] == L and (self.mode == MINORS or scan[TG[0]] == L)
            return [(1, r, "g0" if ok else "NEU", None)]

        if self.mode != DET:
            ops["gl2"] = Step(gl2)

        def seek(r, scan):
            if r.seek == 0:
                return [(1, r, "g0", None)]
            if scan[TG[0]] == R:
                return [(1, r, "NEU", None)]
            return [(1, r._replace(seek=r.seek - 1), "seek", {TG[0]: 1})]

        if self.fixed_target is not None:
            ops["seek"] = Step(seek)

        # stage 1: clow head, conf1 := conf0, first counter tick
        ops["g0"] = Call(f["equi"], (C0[0], C0[1], EW[0], EW[1]), lambda r: f["equi"].initial, equi_exit("h0", "c01a"))
        ops["c01a"] = Call(f["copy1"], (C0[0], C1[0], CW[2]), lambda r: f["copy1"].initial, go("c01b"))

        # the walk has L = |CONF_*| edges with L even, so the clow sign (-1)^(L + #clows) starts odd
        def start_sign(r, q):
            flip = 1 if (r.tgt is not None and r.tgt[1] != r.tgt[2]) else 0
            return r._replace(h1=r.h0, par=1 ^ flip), "inc"

        ops["c01b"] = Call(f["copy1"], (C0[1], C1[1], CW[2]), lambda r: f["copy1"].initial, start_sign)

        counter = f["counter"]

        def inc(r, scan):
            (target, move, _), = counter.lookup(r.cnt, (scan[CNT[0]], scan[CNT[1]]))
            mv = {CNT[0]: move[0], CNT[1]: move[1]}
            if target in counter.accepting:
                return [(1, r._replace(cnt=counter.initial), "cl1", mv)]
            return [(1, r._replace(cnt=target), "g2", mv)]

        ops["inc"] = Step(inc)

        # stage 2a: successor conf2 >= conf0
        cmp_heads = lambda a, b: (a[0], a[1], b[0], b[1]) + CW  # noqa: E731
        ops["g2"] = Call(f["equi"], (C2[0], C2[1], EW[0], EW[1]), lambda r: f["equi"].initial, equi_exit("h2", "cA"))
        ops["cA"] = Call(f["cmp"], cmp_heads(C2, C0), lambda r: f"cmp.{r.h2}.{r.h0}",
                         lambda r, q: (r, "oA1" if q == "ge" else "NEU"))
        # stage 2b: edge conf1 -> conf2 with probability |T[conf1, conf2]|
        ops["oA1"] = Call(f["off"], (C1[0], C2[0]) + CW, lambda r: "start", off_exit("d1", "oA2"))
        ops["oA2"] = Call(f["off"], (C1[1], C2[1]) + CW, lambda r: "start", off_exit("d2", "mA1" if minor else "wA"))
        if minor:
            ops["mA1"] = Call(f["off"], (C2[0], TG[0]) + CW, lambda r: "start", off_exit("e1", "mA2"))
        if minor:
            ops["mA2"] = Call(f["off"], (C2[1], TG[0]) + CW, lambda r: "start", off_exit("e2", "wA"))

        def weigh(col_heads, row_slot_h, col_slot_h, nxt):
            def fn(r, scan):
                h_row, h_col = getattr(r, row_slot_h), getattr(r, col_slot_h)
                if r.tgt is not None and h_row == w.i0_block and scan[C1[0]] == L and scan[C1[1]] == L:
                    hit = h_col == w.target_block(r.tgt) and 0 in r.e1 and 0 in r.e2
                    p, neg = (Fraction(1) if hit else Fraction(0)), False
                else:
                    p, neg = w.entry(h_row, h_col, r.d1, r.d2, scan[col_heads[0]], scan[col_heads[1]])
                clean = dict(d1=frozenset(), d2=frozenset(), e1=frozenset(), e2=frozenset())
                outs = []
                if p:
                    outs.append((p, r._replace(par=r.par ^ int(neg), **clean), nxt, None))
                if p != 1:
                    outs.append((1 - p, r._replace(**clean), "NEU", None))
                return outs
            return fn

        ops["wA"] = Step(weigh(C2, "h1", "h2", "cB"))
        ops["cB"] = Call(f["cmp"], cmp_heads(C0, C2), lambda r: f"cmp.{r.h0}.{r.h2}",
                         lambda r, q: (r, "zd1" if q == "ge" else "zc1"))
        # stage 2c: continue the clow, conf1 := conf2, then the dummy draw must hit i0
        ops["zc1"] = Call(f["zero2"], C1, lambda r: f["zero2"].initial, go("cc1"))
        ops["cc1"] = Call(f["copy1"], (C2[0], C1[0], CW[2]), lambda r: f["copy1"].initial, go("cc2"))
        ops["cc2"] = Call(f["copy1"], (C2[1], C1[1], CW[2]), lambda r: f["copy1"].initial,
                          lambda r, q: (r._replace(h1=r.h2), "zc2"))
        ops["zc2"] = Call(f["zero2"], C2, lambda r: f["zero2"].initial, go("gd"))
        ops["gd"] = Call(f["equi"], (C2[0], C2[1], EW[0], EW[1]), lambda r: f["equi"].initial, equi_exit("h2", "chk"))

        def chk(r, scan):
            ok = r.h2 == w.i0_block and scan[C2[0]] == L and scan[C2[1]] == L
            return [(1, r, "inc" if ok else "NEU", None)]

        ops["chk"] = Step(chk)
        # stage 2d: clow closed; a new head conf3 > conf0 becomes conf0 and conf1
        ops["zd1"] = Call(f["zero2"], C2, lambda r: f["zero2"].initial, go("g3"))
        ops["g3"] = Call(f["equi"], (C2[0], C2[1], EW[0], EW[1]), lambda r: f["equi"].initial, equi_exit("h2", "cC"))
        ops["cC"] = Call(f["cmp"], cmp_heads(C0, C2), lambda r: f"cmp.{r.h0}.{r.h2}",
                         lambda r, q: (r, "zd2" if q == "lt" else "NEU"))
        ops["zd2"] = Call(f["zero4"], C0 + C1, lambda r: f["zero4"].initial, go("cd1"))
        ops["cd1"] = Call(f["copy2"], (C2[0], C0[0], C1[0], CW[2]), lambda r: f["copy2"].initial, go("cd2"))
        ops["cd2"] = Call(f["copy2"], (C2[1], C0[1], C1[1], CW[2]), lambda r: f["copy2"].initial,
                          lambda r, q: (r._replace(h0=r.h2, h1=r.h2, par=r.par ^ 1), "zd3"))
        ops["zd3"] = Call(f["zero2"], C2, lambda r: f["zero2"].initial, go("inc"))
        # stage 3: closing edge conf1 -> conf0
        ops["cl1"] = Call(f["off"], (C1[0], C0[0]) + CW, lambda r: "start", off_exit("d1", "cl2"))
        ops["cl2"] = Call(f["off"], (C1[1], C0[1]) + CW, lambda r: "start", off_exit("d2", "mC1" if minor else "wC"))
        if minor:
            ops["mC1"] = Call(f["off"], (C0[0], TG[0]) + CW, lambda r: "start", off_exit("e1", "mC2"))
        if minor:
            ops["mC2"] = Call(f["off"], (C0[1], TG[0]) + CW, lambda r: "start", off_exit("e2", "wC"))
        ops["wC"] = Step(weigh(C0, "h1", "h0", "fin"))
        # stage 4
        ops["fin"] = Step(lambda r, scan: [(1, r, ACC if r.par == 0 else REJ, None)])
        ops["NEU"] = Step(lambda r, scan: [(Fraction(1, 2), r, ACC, None), (Fraction(1, 2), r, REJ, None)])
        return ops

    # -- tabulation ---------------------------------------------------------
    def _resolve(self, regs: Regs, label: str):
        if label in (ACC, REJ):
            return label
        op = self.ops[label]
        if isinstance(op, Call):
            return (label, regs, op.entry(regs))
        return (label, regs, None)

    def lookup(self, state, scan: tuple) -> tuple:
        key = (state, scan)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if state in (ACC, REJ):
            return ((state, (0,) * self.heads, Fraction(1)),)
        label, regs, fstate = state
        op = self.ops[label]
        outs = []
        if isinstance(op, Call):
            sscan = tuple(scan[h] for h in op.heads)
            halting = op.frag.accepting | op.frag.rejecting
            for target, move, wt in op.frag.lookup(fstate, sscan):
                mv = [0] * self.heads
                for h, d in zip(op.heads, move):
                    mv[h] = d
                if target in halting:
                    r2, nxt = op.exit(regs, target)
                    dst = self._resolve(r2, nxt)
                else:
                    dst = (label, regs, target)
                outs.append((dst, tuple(mv), wt.exact))
        else:
            for p, r2, nxt, move in op.fn(regs, scan):
                mv = [0] * self.heads
                for h, d in (move or {}).items():
                    mv[h] = d
                outs.append((self._resolve(r2, nxt), tuple(mv), Fraction(p)))
        hit = self._cache[key] = tuple(outs)
        return hit


# ---------------------------------------------------------------------------
# edge-level evaluation


@dataclass
class Kernels:
    """Exit distributions of every subroutine on one input, from exact runs of the machines."""

    n: int
    gen: dict                    # (h, l1, l2) -> mass
    gen_fail: Fraction
    pos: dict                    # (l1, l2) -> mass
    pos_fail: Fraction
    g: Fraction
    length: int                  # counter ticks until done
    offsets: dict                # (A, B) -> frozenset of d
    order_ok: bool
    worst: dict = field(default_factory=dict)


_KERNELS: dict = {}


def kernels(gm: GeneratorMachine, x: str) -> Kernels:
    n = len(x)
    key = (gm.w.nq, gm.alphabet, x, gm.block_len)
    if key in _KERNELS:
        return _KERNELS[key]
    tape = tape_of(x)
    width = n + 2
    f = gm.frags
    worst = {}
    raw, worst["equi"] = run_kernel(f["equi"], tape, f["equi"].initial, (0,) * 4)
    gen, gen_fail = {}, Fraction(0)
    for (q, p), m in raw.items():
        if q == "fail":
            gen_fail += m
        else:
            if p[2] or p[3]:
                raise MachineError("generator left a work head off cell 0")
            gen[(int(q.split(".")[1]), p[0], p[1])] = m
    raw, worst["pos"] = run_kernel(f["pos"], tape, f["pos"].initial, (0,) * 4)
    pos, pos_fail = {}, Fraction(0)
    for (q, p), m in raw.items():
        if q == "fail":
            pos_fail += m
        else:
            pos[(p[0], p[1])] = m
    values = set(gen.values())
    if len(values) != 1:
        raise MachineError("generator marginal is not uniform")
    g = values.pop()
    # counter
    cnt = f["counter"]
    state, cpos, ticks = cnt.initial, (0, 0), 0
    while state not in cnt.accepting:
        (state, move, _), = cnt.lookup(state, (tape[cpos[0]], tape[cpos[1]]))
        cpos = tuple((a + d) % width for a, d in zip(cpos, move))
        ticks += 1
    if cpos != (0, 0):
        raise MachineError("counter heads not back on cell 0")
    # offsets and copies
    offsets = {}
    worst["off"] = 0
    for a in range(width):
        for b in range(width):
            out, st = run_kernel(f["off"], tape, "start", (a, b, 0, 0, 0))
            ((q, p), _), = out.items()
            offsets[(a, b)] = sub.parse_offset_exit(q)
            worst["off"] = max(worst["off"], st)
    worst["copy"] = 0
    for h in range(width):
        out, st = run_kernel(f["copy2"], tape, "a", (h, 0, 0, 0))
        if list(out) != [("done", (h, h, h, 0))]:
            raise MachineError("copy subroutine misbehaves")
        worst["copy"] = max(worst["copy"], st)
    worst["zero"] = 4 * (width - 1) + 4
    order_ok, worst["cmp"] = _check_order(gm, tape, width)
    k = Kernels(n, gen, gen_fail, pos, pos_fail, g, ticks, offsets, order_ok, worst)
    _KERNELS[key] = k
    return k


def _check_order(gm: GeneratorMachine, tape: str, width: int) -> tuple:
    """The comparator realizes the CONF_* order: decisions between blocks need no heads, equal blocks compare positions."""
    cmp = gm.frags["cmp"]
    nb = gm.w.nb
    ok = True
    for h1 in range(nb):
        for h2 in range(nb):
            if h1 == h2:
                continue
            out, _ = run_kernel(cmp, tape, f"cmp.{h1}.{h2}", (0,) * 7)
            ((q, _), _), = out.items()
            ok &= (q == "ge") == (h1 > h2)
    worst = 0
    for l1 in range(width):
        for l2 in range(width):
            for m1 in range(width):
                for m2 in range(width):
                    out, st = run_kernel(cmp, tape, "cmp.0.0", (l1, l2, m1, m2, 0, 0, 0))
                    ((q, p), _), = out.items()
                    worst = max(worst, st)
                    ok &= p == (l1, l2, m1, m2, 0, 0, 0)
                    ok &= (q == "ge") == ((l1, l2) >= (m1, m2))
    return ok, worst


@dataclass
class BodyResult:
    value: Fraction      # scaled signed mass, (+) for accepting walks
    exponent: int        # true mass = scaled mass * g^exponent

    def gap(self, g: Fraction) -> Fraction:
        return self.value * g ** self.exponent


def _body(gm: GeneratorMachine, x: str, k: Kernels, target: tuple | None, tpos: int | None) -> BodyResult:
    """Stages 1-4 propagated edge by edge over (clow head, current vertex) with signed masses.

    Masses are scaled by g per generation; the exponent is tracked apart.
    """
    w = gm.w
    width = k.n + 2
    tape = tape_of(x)
    confs = sorted(k.gen)                     # (h, l1, l2) in CONF_* order
    scale = {c: m / k.g for c, m in k.gen.items()}
    i0 = (w.i0_block, 0, 0)
    jt = (w.target_block(target), tpos, tpos) if target is not None else None
    flip0 = 1 if (target is not None and target[1] != target[2]) else 0

    def edge(c1, c2):
        if jt is not None and c1 == i0:
            return (Fraction(1), False) if c2 == jt else (Fraction(0), False)
        d1, d2 = k.offsets[(c1[1], c2[1])], k.offsets[(c1[2], c2[2])]
        if not d1 or not d2:
            return Fraction(0), False
        return w.entry(c1[0], c2[0], d1, d2, tape[c2[1]], tape[c2[2]])

    near = {}
    for m1 in range(width):
        for m2 in range(width):
            near[(m1, m2)] = [(l1, l2) for l1 in range(width) for l2 in range(width)
                              if k.offsets[(m1, l1)] and k.offsets[(m2, l2)]]
    cand_cache: dict = {}

    def candidates(c1):
        hit = cand_cache.get(c1)
        if hit is None:
            hit = []
            pool = [jt] if (jt is not None and c1 == i0) else \
                [(h, l1, l2) for (l1, l2) in near[(c1[1], c1[2])] for h in range(w.nb)]
            for c2 in pool:
                p, neg = edge(c1, c2)
                if p:
                    hit.append((c2, -p * scale[c2] if neg else p * scale[c2]))
            cand_cache[c1] = hit
        return hit

    sign0 = -1 if (1 ^ flip0) else 1
    state = {(c, c): sign0 * scale[c] for c in confs}
    exponent = 1
    dummy = scale[i0]
    for _ in range(k.length - 1):
        new: dict = {}
        closed: dict = {}
        for (c0, c1), m in state.items():
            for c2, pw in candidates(c1):
                if c2 < c0:
                    continue
                if c2 == c0:
                    closed[c0] = closed.get(c0, 0) + m * pw
                else:
                    key = (c0, c2)
                    new[key] = new.get(key, 0) + m * pw * dummy
        if closed:
            run = Fraction(0)
            for c3 in confs:
                if run:
                    key = (c3, c3)
                    new[key] = new.get(key, 0) - run * scale[c3]
                run += closed.get(c3, 0)
        state = {key: m for key, m in new.items() if m}
        exponent += 2
    value = Fraction(0)
    for (c0, c1), m in state.items():
        p, neg = edge(c1, c0)
        if p:
            value += -m * p if neg else m * p
    return BodyResult(value, exponent)


@dataclass
class GeneratorValue:
    p_acc: Fraction
    p_rej: Fraction
    gap: Fraction
    length: int
    g: Fraction
    runs: int

    def to_dict(self) -> dict:
        return {"p_acc": str(self.p_acc), "p_rej": str(self.p_rej), "gap": str(self.gap),
                "length": self.length, "g": str(self.g), "runs": self.runs}


def evaluate(gm: GeneratorMachine, x: str) -> GeneratorValue:
    """Exact (p_acc, p_rej) of the generator on x, propagated one walk edge at a time.

    Every path ends in ACC or REJ; paths not decided by the sign go through
    the 1/2-1/2 exit, so p_acc = (1 + gap) / 2.
    """
    k = kernels(gm, x)
    if not k.order_ok:
        raise MachineError("comparator kernel disagrees with the CONF_* order")
    runs = 0
    if gm.fixed_target is not None:
        j, s1, s2, cell = gm.fixed_target
        gap = Fraction(0)
        if cell <= k.n + 1:
            gap = _body(gm, x, k, (j, s1, s2), cell).gap(k.g)
            runs = 1
    elif gm.mode == DET:
        gap = _body(gm, x, k, None, None).gap(k.g)
        runs = 1
    else:
        choices = gm.n_accepting_choices()
        weight = Fraction(1, 4 * choices)
        gap = Fraction(0)
        if gm.mode == SCALED:
            gap = weight * k.pos.get((0, 0), 0) * _body(gm, x, k, None, None).gap(k.g)
            runs = 1
        elif gm.w.accepting:
            for j in range(len(gm.w.accepting)):
                for s1 in SIGNS:
                    for s2 in SIGNS:
                        for (l1, l2), m in sorted(k.pos.items()):
                            if l2 != 0:
                                continue
                            gap += weight * m * _body(gm, x, k, (j, s1, s2), l1).gap(k.g)
                            runs += 1
    return GeneratorValue((1 + gap) / 2, (1 - gap) / 2, gap, k.length, k.g, runs)


def step_bound(gm: GeneratorMachine, x: str) -> int:
    """Worst-case running time on x, assembled from the exhaustively propagated subroutine worst cases."""
    k = kernels(gm, x)
    wd = k.worst
    width = k.n + 2
    zero = lambda heads: heads * width   # noqa: E731  (each head walks at most n+1 cells, then one exit step)
    minor = gm.mode != DET or gm.fixed_target is not None
    offs = (4 if minor else 2) * wd["off"]
    prefix = 0
    if gm.fixed_target is not None:
        prefix = width + 1
    elif gm.mode != DET:
        prefix = 1 + wd["pos"] + 1
    stage1 = wd["equi"] + 2 * wd["copy"] + 1
    path_c = zero(2) + 2 * wd["copy"] + zero(2) + wd["equi"] + 1
    path_d = zero(2) + wd["equi"] + wd["cmp"] + zero(4) + 2 * wd["copy"] + zero(2)
    round_ = wd["equi"] + wd["cmp"] + offs + 1 + wd["cmp"] + max(path_c, path_d) + 1
    closing = offs + 1 + 1
    return prefix + stage1 + (k.length - 1) * round_ + closing
