"""Exact distribution propagation for multi-head probabilistic machines.

Works on anything exposing the machine interface used here: ``heads``,
``initial``, ``lookup(state, scan)``, ``accepting`` and ``rejecting``.  That
covers MachineSpec as well as the lazily tabulated composite machines of the
generator module.  Halting mass is captured and removed at every step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..model import LEFT_END, PFA, RIGHT_END, MachineError, MachineSpec


def tape_of(x: str) -> str:
    return LEFT_END + x + RIGHT_END


@dataclass
class DistributionState:
    """Live distribution over (state, head positions) plus captured mass."""

    live: dict
    p_acc: Fraction = Fraction(0)
    p_rej: Fraction = Fraction(0)
    steps: int = 0
    halted: dict = field(default_factory=dict)

    @property
    def residual(self) -> Fraction:
        return sum(self.live.values(), Fraction(0))

    def total(self) -> Fraction:
        return self.p_acc + self.p_rej + self.residual


@dataclass
class PfaRun:
    p_acc: Fraction
    p_rej: Fraction
    residual: Fraction
    steps: int
    halted: dict
    max_support: int

    def __iter__(self):
        return iter((self.p_acc, self.p_rej, self.residual))


def _weight(w) -> Fraction:
    v = w.exact if hasattr(w, "exact") else w
    if v is None:
        raise MachineError("exact propagation needs rational weights")
    return v if isinstance(v, Fraction) else Fraction(v)


def step(machine, tape: str, dist: DistributionState, keep_halted: bool = False, check: bool = True):
    """One synchronous step of every live configuration, in place."""
    width = len(tape)
    new: dict = {}
    acc, rej = machine.accepting, machine.rejecting
    for (q, pos), m in dist.live.items():
        scan = tuple(tape[p] for p in pos)
        outs = machine.lookup(q, scan)
        if check:
            total = sum((_weight(w) for _, _, w in outs), Fraction(0))
            if total != 1:
                raise MachineError(f"not stochastic at state {q!r} scanning {''.join(scan)!r}: sum {total}")
        for target, move, w in outs:
            p = _weight(w)
            if not p:
                continue
            npos = tuple((a + d) % width for a, d in zip(pos, move))
            mass = m * p
            if target in acc or target in rej:
                if target in acc:
                    dist.p_acc += mass
                else:
                    dist.p_rej += mass
                if keep_halted:
                    key = (target, npos)
                    dist.halted[key] = dist.halted.get(key, 0) + mass
            else:
                key = (target, npos)
                new[key] = new.get(key, 0) + mass
    dist.live = new
    dist.steps += 1
    return dist


def pfa_run_exact(spec, x: str, t_max: int = 100_000, start: tuple | None = None, keep_halted: bool = False,
                  check: bool = True) -> PfaRun:
    """Propagate the full distribution for ``t_max`` steps or until nothing is live.

    ``start`` overrides the initial configuration as (state, positions).
    """
    if isinstance(spec, MachineSpec) and spec.kind != PFA:
        raise MachineError("pfa_run_exact needs a probabilistic machine")
    tape = tape_of(x)
    if start is None:
        start = (spec.initial, (0,) * spec.heads)
    q, pos = start
    if len(pos) != spec.heads:
        raise MachineError("start positions do not match the head count")
    dist = DistributionState({(q, tuple(pos)): Fraction(1)})
    if q in spec.accepting or q in spec.rejecting:
        raise MachineError("start state is halting")
    peak = 1
    while dist.live and dist.steps < t_max:
        step(spec, tape, dist, keep_halted, check)
        peak = max(peak, len(dist.live))
    return PfaRun(dist.p_acc, dist.p_rej, dist.residual, dist.steps, dist.halted, peak)


def run_kernel(spec, tape: str, state: str, positions: Sequence[int], t_max: int = 100_000) -> tuple:
    """Exit distribution {(halting state, positions): mass} and the worst-case step count."""
    dist = DistributionState({(state, tuple(positions)): Fraction(1)})
    worst = 0
    while dist.live:
        if dist.steps >= t_max:
            raise MachineError(f"subroutine did not finish within {t_max} steps")
        before = dist.p_acc + dist.p_rej
        step(spec, tape, dist, keep_halted=True, check=False)
        if dist.p_acc + dist.p_rej != before:
            worst = dist.steps
    return dist.halted, worst
