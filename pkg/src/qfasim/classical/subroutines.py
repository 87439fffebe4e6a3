"""Subroutine machines: counter, head copy, equiprobable generation, comparison.

All machines run on the circular tape, read only endmarkers, and are exact
rational PFAs.  Halting states double as subroutine exits: the generator
module embeds these machines and wires their exits to its own control.

CONF_* blocks h = (q1, q2, b1, b2) are encoded as integers
((i1 * |Q| + i2) * 2 + s1) * 2 + s2 with s = 0 for +1 and 1 for -1, so the
integer order is the block order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log2
from typing import Sequence

from ..model import LEFT_END as L, RIGHT_END as R, MachineSpec
from .asm import Asm
from .propagate import pfa_run_exact, run_kernel, tape_of

UNARY = ("a",)


def n_blocks(n_states: int) -> int:
    return 4 * n_states * n_states


def conf_count(n_states: int, n: int) -> int:
    """|CONF_*| for a one-head machine on inputs of length n."""
    return n_blocks(n_states) * (n + 2) ** 2


def bits_for(n: int) -> int:
    """ceil(log2(n + 2)): number of coin flips per generated head position."""
    return max(1, ceil(log2(n + 2)))


def generation_probability(n_states: int, n: int) -> Fraction:
    """(1/4|Q|^2) 2^(-2 ceil(log2(n+2)))."""
    return Fraction(1, n_blocks(n_states) * 4 ** bits_for(n))


# ---------------------------------------------------------------------------
# counter


def build_counter(n_states: int, alphabet: Sequence[str] = UNARY, block: int | None = None) -> MachineSpec:
    """2-head deterministic counter entering "done" after exactly block*(n+2)^2 steps.

    Head 1 idles ``block - 1`` steps on every cell and then moves right, so a
    sweep over the circular tape takes block*(n+2) steps and ends back on
    cell 0.  Head 2 advances once per sweep; the sweep that starts with head 2
    on the right endmarker is the last.  Both heads end on cell 0.
    ``block`` defaults to 4|Q|^2.
    """
    k = n_blocks(n_states) if block is None else block
    a = Asm(2, alphabet, f"counter[{k}]")
    for i in range(k - 1):
        a.rule(f"c{i}", {}, f"c{i + 1}")
    last = f"c{k - 1}"
    a.rule(last, {0: "!>"}, "c0", {0: 1})
    a.rule(last, {0: R, 1: "!>"}, "c0", {0: 1, 1: 1})
    a.rule(last, {0: R, 1: R}, "done", {0: 1, 1: 1})
    return a.build("c0", ["done"])


def counter_length(n_states: int, n: int, block: int | None = None) -> int:
    k = n_blocks(n_states) if block is None else block
    return k * (n + 2) ** 2


# ---------------------------------------------------------------------------
# copy and reset


def build_copy(t: int, alphabet: Sequence[str] = UNARY) -> MachineSpec:
    """(t+1)-head copier: head 1 sits on cell h, heads 2..t and the working head t+1 on cell 0.

    Heads 2..t end on cell h, head 1 back on h, the working head on cell 0.
    Takes 2h + 2 steps.
    """
    a = Asm(t + 1, alphabet, f"copy[{t}]")
    work = t
    out = {h: 1 for h in range(1, t + 1)}
    a.rule("a", {0: L}, "b")
    a.rule("a", {0: "!<"}, "a", {0: -1, **out})
    a.rule("b", {work: L}, "done")
    a.rule("b", {work: "!<"}, "b", {work: -1, 0: 1})
    return a.build("a", ["done"])


def build_zero(k: int, alphabet: Sequence[str] = UNARY) -> MachineSpec:
    """Moves each of k heads left until it reads the left endmarker, one head at a time."""
    a = Asm(k, alphabet, f"zero[{k}]")
    for i in range(k):
        nxt = f"z{i + 1}" if i + 1 < k else "done"
        a.rule(f"z{i}", {i: L}, nxt)
        a.rule(f"z{i}", {i: "!<"}, f"z{i}", {i: -1})
    return a.build("z0", ["done"])


# ---------------------------------------------------------------------------
# equiprobable generation


def _position_stage(a: Asm, tag: str, target: int, work: tuple, fail: str, done: str):
    """Uniform head position in [0, 2^K) with K = ceil(log2(n+2)), rejecting values past the right endmarker.

    Three heads rotate through the roles value V, timer T and free F.  Each
    round doubles the timer (T -> 2T + 1 in F) and then the value
    (V -> 2V + c in the old timer head).  The timer sits at 2^k - 1 after k
    rounds; the round that pushes it onto or past the right endmarker is the
    last.  The value then moves into the target head and the timer head
    returns to cell 0.
    """
    def nm(stage, roles, *flags):
        return f"{tag}.{stage}.{''.join(map(str, roles))}" + "".join(f".{f}" for f in flags)

    pool = (target,) + tuple(work)
    rotations = []
    roles = (target, work[0], work[1])
    while roles not in rotations:
        rotations.append(roles)
        v, t, f = roles
        roles = (t, f, v)
    for roles in rotations:
        v, t, f = roles
        for s in (0, 1):
            # timer doubling: per unit of T, F moves two cells
            a.rule(nm("tA", roles, s), {t: L}, nm("tP", roles, s))
            a.rule(nm("tA", roles, s), {t: "!<", f: R}, nm("tB", roles, 1), {t: -1})
            a.rule(nm("tA", roles, s), {t: "!<", f: "!>"}, nm("tB", roles, s), {t: -1, f: 1})
            a.rule(nm("tB", roles, s), {f: R}, nm("tA", roles, 1))
            a.rule(nm("tB", roles, s), {f: "!>"}, nm("tA", roles, s), {f: 1})
            a.rule(nm("tP", roles, s), {f: R}, nm("chk", roles, 1))
            a.rule(nm("tP", roles, s), {f: "!>"}, nm("chk", roles, s), {f: 1})
            a.rule(nm("chk", roles, s), {f: R}, nm("coin", roles, 1))
            a.rule(nm("chk", roles, s), {f: "!>"}, nm("coin", roles, s))
        nxt_roles = (t, f, v)
        for last in (0, 1):
            a.branch(nm("coin", roles, last), {},
                     [(nm("vA", roles, c, last), None, Fraction(1, 2)) for c in (0, 1)])
            for c in (0, 1):
                # value doubling into the old timer head t (now on cell 0)
                a.rule(nm("vA", roles, c, last), {v: L}, nm("vP", roles, c, last))
                a.rule(nm("vA", roles, c, last), {v: "!<", t: R}, fail)
                a.rule(nm("vA", roles, c, last), {v: "!<", t: "!>"}, nm("vB", roles, c, last), {v: -1, t: 1})
                a.rule(nm("vB", roles, c, last), {t: R}, fail)
                a.rule(nm("vB", roles, c, last), {t: "!>"}, nm("vA", roles, c, last), {t: 1})
                after = nm("fin", nxt_roles) if last else nm("tA", nxt_roles, 0)
                if c == 0:
                    a.rule(nm("vP", roles, c, last), {}, after)
                else:
                    a.rule(nm("vP", roles, c, last), {t: R}, fail)
                    a.rule(nm("vP", roles, c, last), {t: "!>"}, after, {t: 1})
        # finish with roles (value, timer, free)
        fv, ft, _ = nxt_roles
        a.rule(nm("fin", nxt_roles), {ft: L}, nm("mv", nxt_roles))
        a.rule(nm("fin", nxt_roles), {ft: "!<"}, nm("fin", nxt_roles), {ft: -1})
        if fv == target:
            a.rule(nm("mv", nxt_roles), {}, done)
        else:
            a.rule(nm("mv", nxt_roles), {fv: L}, done)
            a.rule(nm("mv", nxt_roles), {fv: "!<"}, nm("mv", nxt_roles), {fv: -1, target: 1})
    assert set(pool) == {target, *work}
    return nm("tA", (target, work[0], work[1]), 0)


def build_equiprob(n_states: int, alphabet: Sequence[str] = UNARY, with_block: bool = True) -> MachineSpec:
    """4-head generator of CONF_* elements on heads 1-2 (heads 3-4 work).

    Head 1's position, then head 2's, is drawn uniformly from [0, 2^K); a
    value beyond the right endmarker enters "fail".  Finally the block
    (q1, q2, b1, b2) is drawn with probability 1/(4|Q|^2) and the machine
    halts in "done.<h>".  Every CONF_* element ends up with mass
    (1/4|Q|^2) 2^(-2K), heads 3-4 back on cell 0.  Without the block stage
    the single exit is "done".
    """
    a = Asm(4, alphabet, f"equiprob[{n_states}]")
    fail = "fail"
    mid, end = "g2", "blk" if with_block else "done"
    start = _position_stage(a, "p1", 0, (2, 3), fail, mid)
    second = _position_stage(a, "p2", 1, (2, 3), fail, end)
    a.rule(mid, {}, second)
    exits = ["done"]
    if with_block:
        nb = n_blocks(n_states)
        exits = [f"done.{h}" for h in range(nb)]
        a.branch("blk", {}, [(e, None, Fraction(1, nb)) for e in exits])
    # the initial state must come first for readability of dumps
    return a.build(start, exits, [fail])


# ---------------------------------------------------------------------------
# comparison


def _stage_compare(a: Asm, tag: str, first: int, second: int, on_equal: str, ge: str, lt: str,
                   equal_is_ge: bool):
    """Move copies (heads 5, 6) left together and decide which reaches the left endmarker first."""
    c1, c2 = 4, 5
    loop = f"{tag}.loop"
    a.rule(loop, {c1: L, c2: L}, ge if equal_is_ge else on_equal)
    a.rule(loop, {c1: "!<", c2: L}, f"{tag}.z1")        # second copy first: m < l
    a.rule(loop, {c1: L, c2: "!<"}, f"{tag}.z2")        # first copy first: l < m
    a.rule(loop, {c1: "!<", c2: "!<"}, loop, {c1: -1, c2: -1})
    a.rule(f"{tag}.z1", {c1: L}, ge)
    a.rule(f"{tag}.z1", {c1: "!<"}, f"{tag}.z1", {c1: -1})
    a.rule(f"{tag}.z2", {c2: L}, lt)
    a.rule(f"{tag}.z2", {c2: "!<"}, f"{tag}.z2", {c2: -1})
    return loop


def build_comparator(n_states: int = 1, alphabet: Sequence[str] = UNARY) -> MachineSpec:
    """7-head comparator: conf1 on heads 1-2, conf2 on heads 3-4, heads 5-7 work.

    The blocks sit in the finite control: entry state "cmp.<h1>.<h2>".
    Different blocks are decided in one step without moving a head; equal
    blocks go to "pos", which copies heads 1 and 3 onto heads 5 and 6 (head 7
    working), compares by a joint left walk, and on a tie repeats with heads
    2 and 4.  Exits "ge" (conf1 >= conf2) and "lt"; all work heads end on
    cell 0 and heads 1-4 are untouched.  Accepting "ge" means accept iff
    conf1 >= conf2.
    """
    a = Asm(7, alphabet, "comparator")
    copy = build_copy(2, alphabet)
    nb = n_blocks(n_states)
    for h1 in range(nb):
        for h2 in range(nb):
            src = f"cmp.{h1}.{h2}"
            a.rule(src, {}, "ge" if h2 < h1 else "lt" if h2 > h1 else "pos")
    s4 = "s4.loop"
    s5 = "s5"
    s6 = "s6.loop"
    c3b = a.embed(copy, "s3b.", (2, 5, 6), {"done": s4})
    c3a = a.embed(copy, "s3a.", (0, 4, 6), {"done": c3b})
    a.rule("pos", {}, c3a)
    _stage_compare(a, "s4", 0, 2, s5, "ge", "lt", equal_is_ge=False)
    c5b = a.embed(copy, "s5b.", (3, 5, 6), {"done": s6})
    c5a = a.embed(copy, "s5a.", (1, 4, 6), {"done": c5b})
    a.rule(s5, {}, c5a)
    _stage_compare(a, "s6", 1, 3, "ge", "ge", "lt", equal_is_ge=True)
    return a.build("pos", ["ge"], ["lt"])


def offset_exit(ds) -> str:
    """Exit name for the set of offsets d with A = B + d (mod n+2)."""
    return "d[" + ",".join(str(d) for d in sorted(ds)) + "]"


OFFSET_EXITS = tuple(offset_exit(s) for s in ((), (0,), (1,), (-1,), (-1, 1)))


def parse_offset_exit(name: str) -> frozenset:
    body = name[2:-1]
    return frozenset(int(v) for v in body.split(",")) if body else frozenset()


def build_offset(alphabet: Sequence[str] = UNARY) -> MachineSpec:
    """5-head offset test: heads A (1) and B (2), copies on heads 3-4, working head 5.

    Exits "d[...]" list every d in {-1, 0, +1} with A = B + d modulo n+2.
    After copying, the copies walk left together; when one reaches cell 0 the
    other sits on the absolute difference, which is checked against 1 and
    n+1 (the wrap-around neighbour).  Copies and the working head end on
    cell 0.
    """
    a = Asm(5, alphabet, "offset")
    copy = build_copy(2, alphabet)
    cb = a.embed(copy, "cb.", (1, 3, 4), {"done": "loop"})
    ca = a.embed(copy, "ca.", (0, 2, 4), {"done": cb})
    a.rule("start", {}, ca)
    a.rule("loop", {2: L, 3: L}, offset_exit({0}))
    a.rule("loop", {2: "!<", 3: "!<"}, "loop", {2: -1, 3: -1})
    # head gap on copy c: adjacent (gap 1) gives `near`, wrap (gap n+1) gives `far`
    for c, other, near, far in ((2, 3, 1, -1), (3, 2, -1, 1)):
        tag = f"g{c}"
        a.rule("loop", {c: "!<", other: L}, f"{tag}.w0")
        a.rule(f"{tag}.w0", {c: R}, f"{tag}.s1", {c: -1})
        a.rule(f"{tag}.w0", {c: "!>"}, f"{tag}.s0", {c: -1})
        for wrap in (0, 1):
            base = {far} if wrap else set()
            a.rule(f"{tag}.s{wrap}", {c: L}, offset_exit(base | {near}))
            a.rule(f"{tag}.s{wrap}", {c: "!<"}, f"{tag}.z{wrap}", {c: -1})
            a.rule(f"{tag}.z{wrap}", {c: L}, offset_exit(base))
            a.rule(f"{tag}.z{wrap}", {c: "!<"}, f"{tag}.z{wrap}", {c: -1})
    return a.build("start", list(OFFSET_EXITS))


# ---------------------------------------------------------------------------
# certificates


@dataclass
class SubroutineCert:
    name: str
    ok: bool
    rows: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "rows": self.rows}


def counter_certificate(n_states: int, n_values: Sequence[int], alphabet: Sequence[str] = UNARY) -> SubroutineCert:
    """Propagates the counter and checks "done" is entered exactly at step 4|Q|^2 (n+2)^2."""
    spec = build_counter(n_states, alphabet)
    rows, ok = [], True
    for n in n_values:
        x = alphabet[0] * n
        run = pfa_run_exact(spec, x, keep_halted=True)
        want = counter_length(n_states, n)
        good = (run.p_acc == 1 and run.steps == want and run.max_support == 1
                and list(run.halted) == [("done", (0, 0))])
        ok &= good
        rows.append({"n": n, "steps": run.steps, "expected": want, "deterministic": run.max_support == 1,
                     "ok": good})
    return SubroutineCert("counter", ok, rows)


def equiprob_kernel(n_states: int, n: int, alphabet: Sequence[str] = UNARY, with_block: bool = True):
    """({(h, l1, l2): mass}, fail mass, worst-case steps) from exact propagation of the generator."""
    spec = build_equiprob(n_states, alphabet, with_block)
    tape = tape_of(alphabet[0] * n)
    halted, worst = run_kernel(spec, tape, spec.initial, (0, 0, 0, 0))
    gen, fail = {}, Fraction(0)
    for (q, pos), m in halted.items():
        if q == "fail":
            fail += m
            continue
        if pos[2] or pos[3]:
            raise AssertionError(f"work heads not reset: {pos}")
        h = int(q.split(".")[1]) if with_block else 0
        gen[(h, pos[0], pos[1])] = gen.get((h, pos[0], pos[1]), 0) + m
    return gen, fail, worst
