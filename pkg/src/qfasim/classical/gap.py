"""Gap pairs and the cut-point combiner.

For a real rational qfa M, the determinant generator N1 has gap f1(x) det T,
its damped twin N1' has gap f2(x) det T, and the cofactor generator N2 has
gap f2(x) sum_t s(t) C[i0, t].  Whenever det T != 0 this gives

    gap(N2) = gap(N1') * p_acc(M).

The combiner mixes N1' (with its outcomes swapped), N2 and a fair exit, so
that its own gap is gap(N1') (2 p_acc(M) - 1) / 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..model import MachineError, MachineSpec
from ..resolvent import acceptance_resolvent
from . import subroutines as sub
from .generator import ACC, DET, MINORS, REJ, SCALED, GeneratorMachine, evaluate, kernels, step_bound
from .oracle import det_t, pair_system, signed_cofactor_sum


@dataclass
class GapCheck:
    x: str
    det: Fraction
    cofactor_sum: Fraction
    p_acc: Fraction                 # acceptance_resolvent
    gap_n1: Fraction
    gap_n1_scaled: Fraction
    gap_n2: Fraction
    f1: Fraction
    f2: Fraction
    step_bound: int
    det_identity: bool
    minor_identity: bool
    product_identity: bool
    combiner_gap: Fraction
    combiner_sign: bool

    @property
    def ok(self) -> bool:
        return self.det_identity and self.minor_identity and self.product_identity and self.combiner_sign

    def to_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = str(v) if isinstance(v, Fraction) else v
        out["ok"] = self.ok
        return out


@dataclass
class GapPair:
    """N1 (plain determinant), N1' (f2-damped) and N2 (summed cofactors) for one qfa."""

    qfa: MachineSpec
    n1: GeneratorMachine
    n1_scaled: GeneratorMachine
    n2: GeneratorMachine
    checks: list = field(default_factory=list)

    @property
    def heads(self) -> int:
        return max(self.n1.heads, self.n1_scaled.heads, self.n2.heads)

    @property
    def n_states(self) -> int:
        return len(self.qfa.states)

    def g(self, n: int) -> Fraction:
        return sub.generation_probability(self.n_states, n)

    def f1(self, n: int) -> Fraction:
        """g^(2 L - 1) with L = 4|Q|^2 (n+2)^2 walk edges."""
        return self.g(n) ** (2 * sub.counter_length(self.n_states, n) - 1)

    def f2(self, n: int) -> Fraction:
        """f1 times the chance of the cofactor column prefix (column choice and a cell pair on cell 0)."""
        choices = self.n2.n_accepting_choices()
        return self.f1(n) * Fraction(1, 4 * choices) / 4 ** sub.bits_for(n)

    def verify(self, x: str) -> GapCheck:
        n = len(x)
        ps = pair_system(self.qfa, x)
        det = det_t(ps)
        cof = signed_cofactor_sum(ps, det) if det else Fraction(0)
        p = acceptance_resolvent(self.qfa, x).p_acc
        g1 = evaluate(self.n1, x).gap
        g1s = evaluate(self.n1_scaled, x).gap
        g2 = evaluate(self.n2, x).gap
        f1, f2 = self.f1(n), self.f2(n)
        comb = combined_gap(g1s, g2)
        sign_ok = (comb > 0) if 2 * p > 1 else (comb <= 0)
        bound = max(step_bound(m, x) for m in (self.n1, self.n1_scaled, self.n2))
        chk = GapCheck(x, det, cof, p, g1, g1s, g2, f1, f2, bound,
                       det_identity=det == g1 / f1 and g1s == f2 * det,
                       minor_identity=cof == g2 / f2,
                       product_identity=g2 == g1s * p,
                       combiner_gap=comb, combiner_sign=sign_ok)
        self.checks.append(chk)
        return chk

    def to_dict(self) -> dict:
        ns = sorted({len(c.x) for c in self.checks})
        return {
            "qfa": self.qfa.name,
            "heads": {"N1": self.n1.heads, "N1'": self.n1_scaled.heads, "N2": self.n2.heads, "k": self.heads},
            "f1": {str(n): str(self.f1(n)) for n in ns},
            "f2": {str(n): str(self.f2(n)) for n in ns},
            "checks": [c.to_dict() for c in self.checks],
        }


def build_det_generator(qfa: MachineSpec, minor: tuple | None = None, mode: str = DET,
                        block: int | None = None) -> GeneratorMachine:
    """Clow-walk generator; ``minor`` = (accepting state index, s1, s2, cell) pins one cofactor column."""
    return GeneratorMachine(qfa, mode, block=block, target=minor)


def assemble_gap_pair(qfa: MachineSpec, inputs=(), block: int | None = None) -> GapPair:
    """Build N1, N1' and N2; every input in ``inputs`` is verified against the oracles."""
    pair = GapPair(qfa, GeneratorMachine(qfa, DET, block), GeneratorMachine(qfa, SCALED, block),
                   GeneratorMachine(qfa, MINORS, block))
    for x in inputs:
        chk = pair.verify(x)
        if not chk.ok:
            raise MachineError(f"gap identities fail on {x!r}")
    return pair


def combined_gap(gap_n1_scaled: Fraction, gap_n2: Fraction) -> Fraction:
    """p_acc - p_rej of the combiner: -gap(N1')/4 + gap(N2)/2."""
    return -gap_n1_scaled / 4 + gap_n2 / 2


class CombinedMachine:
    """With probability 1/4 run N1' with swapped outcomes, 1/2 run N2, 1/4 halt fairly.

    p_acc = p_{N1',rej}/4 + p_{N2,acc}/2 + 1/8.
    """

    kind = "PFA"

    def __init__(self, pair: GapPair):
        self.pair = pair
        self.parts = {"A": pair.n1_scaled, "B": pair.n2}
        self.heads = pair.heads
        self.initial = ("top",)
        self.accepting = frozenset({ACC})
        self.rejecting = frozenset({REJ})
        self.name = f"combine({pair.qfa.name})"

    def _wrap(self, tag: str, state):
        if state in (ACC, REJ):
            if tag == "A":
                return REJ if state == ACC else ACC
            return state
        return (tag, state)

    def lookup(self, state, scan: tuple) -> tuple:
        still = (0,) * self.heads
        if state in (ACC, REJ):
            return ((state, still, Fraction(1)),)
        if state == ("top",):
            return ((self._wrap("A", self.parts["A"].initial), still, Fraction(1, 4)),
                    (self._wrap("B", self.parts["B"].initial), still, Fraction(1, 2)),
                    (ACC, still, Fraction(1, 8)), (REJ, still, Fraction(1, 8)))
        tag, inner = state
        part = self.parts[tag]
        out = []
        for dst, move, w in part.lookup(inner, scan[:part.heads]):
            out.append((self._wrap(tag, dst), tuple(move) + (0,) * (self.heads - part.heads), w))
        return tuple(out)

    def evaluate(self, x: str) -> tuple:
        a = evaluate(self.parts["A"], x)
        b = evaluate(self.parts["B"], x)
        p_acc = a.p_rej / 4 + b.p_acc / 2 + Fraction(1, 8)
        p_rej = a.p_acc / 4 + b.p_rej / 2 + Fraction(1, 8)
        return p_acc, p_rej


def cutpoint_combine(pair: GapPair) -> CombinedMachine:
    return CombinedMachine(pair)


__all__ = ["GapCheck", "GapPair", "CombinedMachine", "assemble_gap_pair", "build_det_generator",
           "combined_gap", "cutpoint_combine", "kernels"]
