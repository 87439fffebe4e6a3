"""A small assembler for multi-head probabilistic machines.

Rules name the heads they care about; every other head is matched by the
wildcard and stays put.  A condition "!<" means "any symbol except the left
endmarker" and is expanded into concrete alternatives.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from ..model import ANY, LEFT_END, PFA, RIGHT_END, MachineError, MachineSpec, make_spec


class Asm:
    def __init__(self, heads: int, alphabet: Sequence[str], name: str = ""):
        self.heads = heads
        self.alphabet = tuple(alphabet)
        self.symbols = (LEFT_END,) + self.alphabet + (RIGHT_END,)
        self.name = name
        self.states: list = []
        self._seen: set = set()
        self.rules: list = []

    def state(self, name: str) -> str:
        if name not in self._seen:
            self._seen.add(name)
            self.states.append(name)
        return name

    def _expand(self, cond: Mapping) -> list:
        choices = []
        for h in range(self.heads):
            c = cond.get(h, ANY)
            if c == ANY:
                choices.append((ANY,))
            elif c.startswith("!"):
                choices.append(tuple(s for s in self.symbols if s != c[1:]))
            else:
                if c not in self.symbols:
                    raise MachineError(f"unknown symbol {c!r}")
                choices.append((c,))
        return list(product(*choices))

    def _move(self, move: Mapping | None) -> tuple:
        move = move or {}
        return tuple(move.get(h, 0) for h in range(self.heads))

    def branch(self, src: str, cond: Mapping, outs: Sequence):
        """outs: (target, move dict, probability)."""
        self.state(src)
        for scan in self._expand(cond):
            for dst, move, p in outs:
                self.state(dst)
                self.rules.append((src, scan, dst, self._move(move), Fraction(p)))

    def rule(self, src: str, cond: Mapping, dst: str, move: Mapping | None = None):
        self.branch(src, cond, [(dst, move, 1)])

    def embed(self, sub: MachineSpec, prefix: str, head_map: Sequence[int], exits: Mapping) -> str:
        """Copy ``sub`` with states renamed ``prefix + name`` and heads mapped.

        Transitions into a halting state of ``sub`` go to ``exits[state]``.
        Returns the renamed initial state.
        """
        if len(head_map) != sub.heads:
            raise MachineError("head map does not match the subroutine")
        halting = sub.accepting | sub.rejecting
        missing = halting - set(exits)
        if missing:
            raise MachineError(f"unmapped exits {sorted(missing)}")
        for t in sub.transitions:
            if t.source in halting:
                continue
            scan = [ANY] * self.heads
            move = [0] * self.heads
            for i, h in enumerate(head_map):
                scan[h] = t.scan[i]
                move[h] = t.move[i]
            dst = exits[t.target] if t.target in halting else prefix + t.target
            self.state(prefix + t.source)
            self.state(dst)
            self.rules.append((prefix + t.source, tuple(scan), dst, tuple(move), t.weight.exact))
        return prefix + sub.initial

    def build(self, initial: str, accepting: Sequence[str], rejecting: Sequence[str] = ()) -> MachineSpec:
        """MachineSpec with a stationary self-loop on every halting state (keeps columns stochastic)."""
        rules = list(self.rules)
        for q in list(accepting) + list(rejecting):
            self.state(q)
            rules.append((q, (ANY,) * self.heads, q, (0,) * self.heads, 1))
        self.state(initial)
        return make_spec(PFA, self.heads, self.states, initial, accepting, rejecting, self.alphabet, rules,
                         name=self.name)
