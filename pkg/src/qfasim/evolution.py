"""Time evolution, step-wise measurement and acceptance criteria.

Configurations of a k-head machine on input x are pairs (state, positions)
with every position in [0, n+1] taken mod n+2.  Index layout:
``state_index * (n+2)**k + mixed-radix(positions)`` with head 0 most
significant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Sequence

from .linalg import EXACT, FLOAT, Matrix, abs2
from .model import LEFT_END, PFA, RIGHT_END, MachineError, MachineSpec

FLOAT_HALT_EPS = 1e-12


@dataclass(frozen=True)
class ConfigurationSpace:
    spec: MachineSpec
    x: str
    tape: tuple
    width: int
    dim: int

    @staticmethod
    def of(spec: MachineSpec, x: str) -> "ConfigurationSpace":
        for ch in x:
            if ch not in spec.alphabet:
                raise MachineError(f"symbol {ch!r} is not in the alphabet {list(spec.alphabet)}")
        tape = (LEFT_END,) + tuple(x) + (RIGHT_END,)
        width = len(tape)
        return ConfigurationSpace(spec, x, tape, width, len(spec.states) * width ** spec.heads)

    @property
    def n(self) -> int:
        return len(self.x)

    def index(self, state: str, positions: Sequence[int]) -> int:
        idx = self.spec.state_index[state]
        for p in positions:
            idx = idx * self.width + (p % self.width)
        return idx

    def config(self, idx: int) -> tuple:
        pos = []
        for _ in range(self.spec.heads):
            idx, p = divmod(idx, self.width)
            pos.append(p)
        return self.spec.states[idx], tuple(reversed(pos))

    def describe(self, idx: int) -> str:
        q, pos = self.config(idx)
        return f"{q}@{','.join(map(str, pos))}"

    def state_of(self, idx: int) -> str:
        return self.spec.states[idx // self.width ** self.spec.heads]

    def initial_index(self) -> int:
        return self.index(self.spec.initial, (0,) * self.spec.heads)

    def __iter__(self):
        return iter(range(self.dim))


def sparse_columns(spec: MachineSpec, space: ConfigurationSpace, exact: bool) -> list[dict]:
    """Column j of the evolution operator as {row: value}; weights of
    coinciding targets accumulate."""
    cols = []
    w = space.width
    zero = Fraction(0) if exact else 0j
    per_head = w ** spec.heads
    for q in spec.states:
        for pos in iproduct(range(w), repeat=spec.heads):
            scan = tuple(space.tape[p] for p in pos)
            col: dict = {}
            for target, move, amp in spec.lookup(q, scan):
                idx = spec.state_index[target]
                for p, d in zip(pos, move):
                    idx = idx * w + (p + d) % w
                col[idx] = col.get(idx, zero) + amp.value(exact)
            cols.append({k: v for k, v in col.items() if v != 0})
    assert len(cols) == len(spec.states) * per_head
    return cols


def _projection_masks(spec: MachineSpec, space: ConfigurationSpace):
    block = space.width ** spec.heads
    acc, rej = [], []
    for i, q in enumerate(spec.states):
        if q in spec.accepting:
            acc.append((i * block, (i + 1) * block))
        elif q in spec.rejecting:
            rej.append((i * block, (i + 1) * block))
    return acc, rej


def build_evolution(spec: MachineSpec, x: str, backend: str | None = None):
    """(U, Pi_acc, Pi_rej, Pi_non) as dense matrices."""
    space = ConfigurationSpace.of(spec, x)
    if backend is None:
        backend = EXACT if spec.is_exact else FLOAT
    exact = backend == EXACT
    cols = sparse_columns(spec, space, exact)
    entries = {(i, j): v for j, col in enumerate(cols) for i, v in col.items()}
    u = Matrix.from_sparse(space.dim, space.dim, entries, backend)
    diag_acc, diag_rej, diag_non = {}, {}, {}
    for j in range(space.dim):
        q = space.state_of(j)
        target = diag_acc if q in spec.accepting else diag_rej if q in spec.rejecting else diag_non
        target[(j, j)] = 1
    mk = lambda d: Matrix.from_sparse(space.dim, space.dim, d, backend)  # noqa: E731
    return u, mk(diag_acc), mk(diag_rej), mk(diag_non)


# ---------------------------------------------------------------------------
# simulation


@dataclass
class StepRecord:
    t: int
    p_acc: object
    p_rej: object
    remaining: object


@dataclass
class RunTrace:
    spec_name: str
    x: str
    backend: str
    steps: list
    p_acc: object
    p_rej: object
    residual: object
    t_max: int
    verdict: str
    final_vector: dict | None = field(default=None, repr=False)

    def conservation_error(self):
        """max over steps of |captured + remaining - 1|."""
        worst = Fraction(0) if self.backend == EXACT else 0.0
        ca = cr = Fraction(0) if self.backend == EXACT else 0.0
        for r in self.steps:
            ca += r.p_acc
            cr += r.p_rej
            worst = max(worst, abs(ca + cr + r.remaining - 1))
        return worst

    def to_dict(self) -> dict:
        fmt = format_scalar
        return {
            "machine": self.spec_name, "input": self.x, "backend": self.backend,
            "p_acc": fmt(self.p_acc), "p_rej": fmt(self.p_rej), "residual": fmt(self.residual),
            "t_max": self.t_max, "verdict": self.verdict,
            "steps": [{"t": r.t, "p_acc": fmt(r.p_acc), "p_rej": fmt(r.p_rej), "remaining": fmt(r.remaining)}
                      for r in self.steps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def format_scalar(v) -> str:
    """Exact values as fractions, floats to 12 significant digits."""
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, complex):
        if v.imag == 0:
            v = v.real
        else:
            return f"{v.real:.12g}{v.imag:+.12g}i"
    return f"{float(v):.12g}"


def default_t_max(spec: MachineSpec, x: str) -> int:
    return len(spec.states) * (len(x) + 2) * 64


def _mass(v, quantum: bool):
    return abs2(v) if quantum else v


def step_simulate(spec: MachineSpec, x: str, t_max: int | None = None, backend: str | None = None,
                  keep_vector: bool = False) -> RunTrace:
    """Measure-many evolution: phi_i = Pi_non U phi_{i-1}, capturing the
    accepting/rejecting mass of U phi_{i-1} at every step.  PFAs are run the
    same way with linear (not squared) masses."""
    space = ConfigurationSpace.of(spec, x)
    if backend is None:
        backend = EXACT if spec.is_exact else FLOAT
    exact = backend == EXACT
    if t_max is None:
        t_max = default_t_max(spec, x)
    quantum = spec.kind != PFA
    block = space.width ** spec.heads
    kind_of = []
    for q in spec.states:
        kind_of.append(1 if q in spec.accepting else 2 if q in spec.rejecting else 0)
    cols = _ColumnCache(spec, space, exact)
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    vec = {space.initial_index(): one if exact else 1 + 0j}
    if kind_of[space.initial_index() // block] != 0:
        raise MachineError("initial state must be non-halting")
    steps = []
    p_acc = p_rej = zero
    remaining = one
    verdict = "TRUNCATED"
    for t in range(1, t_max + 1):
        new: dict = {}
        for j, a in vec.items():
            for i, u in cols[j].items():
                new[i] = new.get(i, 0) + u * a
        acc = rej = non = zero
        keep = {}
        for i, a in new.items():
            if a == 0:
                continue
            k = kind_of[i // block]
            m = _mass(a, quantum)
            if not exact:
                m = float(m.real) if isinstance(m, complex) else float(m)
            if k == 0:
                keep[i] = a
                non += m
            elif k == 1:
                acc += m
            else:
                rej += m
        vec = keep
        p_acc += acc
        p_rej += rej
        remaining = non
        steps.append(StepRecord(t, acc, rej, non))
        if (exact and not vec) or (not exact and remaining < FLOAT_HALT_EPS):
            verdict = "HALTED_ALL"
            break
    if t_max == 0 and not vec:
        verdict = "HALTED_ALL"
    return RunTrace(spec.name, x, backend, steps, p_acc, p_rej, remaining, t_max, verdict,
                    dict(vec) if keep_vector else None)


class _ColumnCache:
    """Lazily computed sparse columns of U."""

    def __init__(self, spec: MachineSpec, space: ConfigurationSpace, exact: bool):
        self.spec, self.space, self.exact = spec, space, exact
        self.cache: dict = {}

    def __getitem__(self, j: int) -> dict:
        col = self.cache.get(j)
        if col is None:
            spec, space = self.spec, self.space
            q, pos = space.config(j)
            scan = tuple(space.tape[p] for p in pos)
            col = {}
            w = space.width
            for target, move, amp in spec.lookup(q, scan):
                idx = spec.state_index[target]
                for p, d in zip(pos, move):
                    idx = idx * w + (p + d) % w
                col[idx] = col.get(idx, 0) + amp.value(self.exact)
            col = {k: v for k, v in col.items() if v != 0}
            self.cache[j] = col
        return col


# ---------------------------------------------------------------------------
# acceptance criteria

BOUNDED = "BOUNDED"
UNBOUNDED = "UNBOUNDED"
EXACT_CUTPOINT = "EXACT_CUTPOINT"
ZERO_CUTPOINT = "ZERO_CUTPOINT"
ERROR_FREE = "ERROR_FREE"
ONE_SIDED = "ONE_SIDED"
ACCEPT, REJECT, UNDETERMINED = "ACCEPT", "REJECT", "UNDETERMINED"


@dataclass(frozen=True)
class Criterion:
    kind: str
    param: object = None

    def __post_init__(self):
        if self.kind in (BOUNDED, ONE_SIDED):
            eps = self.param
            if eps is None or not (0 <= eps < Fraction(1, 2)):
                raise ValueError(f"error bound must lie in [0, 1/2), got {eps}")
        elif self.kind == EXACT_CUTPOINT:
            eta = self.param
            if eta is None or not (0 < eta <= 1):
                raise ValueError(f"cut point must lie in (0, 1], got {eta}")
        elif self.kind not in (UNBOUNDED, ZERO_CUTPOINT, ERROR_FREE):
            raise ValueError(f"unknown criterion {self.kind!r}")

    @staticmethod
    def parse(text: str) -> "Criterion":
        """'BOUNDED(1/3)', 'UNBOUNDED', 'EXACT_CUTPOINT(1/2)', ..."""
        text = text.strip()
        if "(" in text:
            name, arg = text.split("(", 1)
            arg = arg.rstrip(")")
            return Criterion(name.strip().upper(), Fraction(arg.strip()))
        return Criterion(text.upper())

    def __str__(self):
        return self.kind if self.param is None else f"{self.kind}({self.param})"


@dataclass(frozen=True)
class Verdict:
    verdict: str
    acc_interval: tuple
    rej_interval: tuple

    def __str__(self):
        return self.verdict


def classify_probabilities(p_acc, p_rej, residual, criterion: Criterion, exact: bool | None = None) -> Verdict:
    """Threshold test on the rigorous intervals [captured, captured + residual]."""
    if exact is None:
        exact = all(isinstance(v, (int, Fraction)) for v in (p_acc, p_rej, residual))
    tol = 0 if exact else 1e-9
    if not exact:
        p_acc, p_rej, residual = float(p_acc), float(p_rej), float(max(residual, 0))
    a_lo, a_hi = p_acc, p_acc + residual
    r_lo, r_hi = p_rej, p_rej + residual
    k, prm = criterion.kind, criterion.param
    half = Fraction(1, 2)
    if k == BOUNDED:
        if a_lo >= 1 - prm - tol:
            v = ACCEPT
        elif r_lo >= 1 - prm - tol:
            v = REJECT
        else:
            v = UNDETERMINED
    elif k == UNBOUNDED:
        if a_lo > half + tol:
            v = ACCEPT
        elif r_lo >= half - tol:
            v = REJECT
        else:
            v = UNDETERMINED
    elif k == EXACT_CUTPOINT:
        if abs(a_lo - prm) <= tol and residual <= tol:
            v = ACCEPT
        elif a_hi < prm - tol or a_lo > prm + tol:
            v = REJECT
        else:
            v = UNDETERMINED
    elif k == ZERO_CUTPOINT:
        if a_lo > tol:
            v = ACCEPT
        elif a_hi <= tol:
            v = REJECT
        else:
            v = UNDETERMINED
    elif k == ERROR_FREE:
        if a_lo >= 1 - tol:
            v = ACCEPT
        elif r_lo >= 1 - tol:
            v = REJECT
        else:
            v = UNDETERMINED
    elif k == ONE_SIDED:
        if a_lo >= 1 - prm - tol:
            v = ACCEPT
        elif r_lo >= 1 - tol:
            v = REJECT
        else:
            v = UNDETERMINED
    else:  # pragma: no cover - guarded by Criterion
        raise ValueError(k)
    return Verdict(v, (a_lo, a_hi), (r_lo, r_hi))


def classify(spec: MachineSpec, x: str, criterion: Criterion, t_max: int | None = None) -> Verdict:
    trace = step_simulate(spec, x, t_max)
    return classify_probabilities(trace.p_acc, trace.p_rej, trace.residual, criterion,
                                  exact=trace.backend == EXACT)
