"""Acceptance probabilities through the nonnegative splitting of D = U Pi_non.

D is written as D+ - D- with nonnegative parts and embedded in the sign-doubled
matrix D~ = [[D+, D-], [D-, D+]].  Pairs of doubled configurations form CONF_*,
on which M = D~ (x) D~ acts with nonnegative entries.  A target pair carrying
signs (b1, b2) contributes with weight b1*b2; that weighting annihilates every
sector except the one where M acts as D (x) D, so

    p_acc = sum_t s(t) (I - M)^-1 [t, i0]

whenever I - M is invertible.  Only configurations reachable from i0 matter,
and (I - M) is block triangular with respect to that set, so all solves and
cofactors are taken on the reachable block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .evolution import ConfigurationSpace, sparse_columns
from .linalg import EXACT, FLOAT, LinAlgError, Matrix, determinant, minor_determinant, to_complex
from .model import PFA, MachineError, MachineSpec

PLUS, MINUS = 1, -1
SIGNS = (PLUS, MINUS)
CLOW_CAP = 7
STATIONARY_TOL = 1e-8


class SingularResolventError(LinAlgError):
    """det(I - D~ (x) D~) vanishes on the reachable block."""


# ---------------------------------------------------------------------------
# CONF_* ordering


@dataclass(frozen=True)
class ConfStar:
    """Q^2 x positions^2 x {+-1}^2 with its linear order.

    Elements are tuples (q1, q2, pos1, pos2, b1, b2) where pos is the mixed-radix
    index of the head-position tuple.  The block h = (q1, q2, b1, b2) is compared
    lexicographically (state indices, then +1 before -1), then pos1, then pos2.
    """

    states: tuple
    width: int      # number of head-position tuples, (n+2)^k

    @property
    def size(self) -> int:
        return 4 * len(self.states) ** 2 * self.width ** 2

    def key(self, conf) -> tuple:
        q1, q2, l1, l2, b1, b2 = conf
        si = {q: i for i, q in enumerate(self.states)}
        return (si[q1], si[q2], SIGNS.index(b1), SIGNS.index(b2), l1, l2)

    def index(self, conf) -> int:
        i1, i2, s1, s2, l1, l2 = self.key(conf)
        nq = len(self.states)
        return ((((i1 * nq + i2) * 2 + s1) * 2 + s2) * self.width + l1) * self.width + l2

    def element(self, idx: int) -> tuple:
        idx, l2 = divmod(idx, self.width)
        idx, l1 = divmod(idx, self.width)
        idx, s2 = divmod(idx, 2)
        idx, s1 = divmod(idx, 2)
        i1, i2 = divmod(idx, len(self.states))
        return (self.states[i1], self.states[i2], l1, l2, SIGNS[s1], SIGNS[s2])

    def __iter__(self):
        return (self.element(i) for i in range(self.size))

    @staticmethod
    def leq(states, conf2, conf1) -> bool:
        """conf2 <= conf1: h2 < h1, or h2 = h1 and m1 < l1, or h2 = h1, m1 = l1 and m2 <= l2."""
        si = {q: i for i, q in enumerate(states)}
        p1, p2, m1, m2, b1, b2 = conf2
        q1, q2, l1, l2, a1, a2 = conf1
        h2 = (si[p1], si[p2], SIGNS.index(b1), SIGNS.index(b2))
        h1 = (si[q1], si[q2], SIGNS.index(a1), SIGNS.index(a2))
        if h2 != h1:
            return h2 < h1
        if m1 != l1:
            return m1 < l1
        return m2 <= l2


def conf_star_order(spec: MachineSpec, n: int) -> ConfStar:
    return ConfStar(tuple(spec.states), (n + 2) ** spec.heads)


# ---------------------------------------------------------------------------
# splitting


def _d_columns(spec: MachineSpec, x: str, exact: bool):
    """Sparse columns of D = U Pi_non (halting columns emptied)."""
    space = ConfigurationSpace.of(spec, x)
    cols = sparse_columns(spec, space, exact)
    for j in range(space.dim):
        if spec.is_halting(space.state_of(j)):
            cols[j] = {}
    return space, cols


def _real(v, exact: bool):
    if exact:
        if not isinstance(v, Fraction):
            raise MachineError("complex amplitude in the splitting; apply complex_to_real first")
        return v
    c = complex(v)
    if abs(c.imag) > 1e-15:
        raise MachineError("complex amplitude in the splitting; apply complex_to_real first")
    return c.real


@dataclass
class SplitEvolution:
    space: ConfigurationSpace
    d_plus: Matrix
    d_minus: Matrix
    d_tilde: Matrix
    order: ConfStar
    y_ini: dict
    y_acc: dict
    y_rej: dict

    def tilde_index(self, cfg: int, sign: int) -> int:
        """Row/column of D~ for configuration index ``cfg`` carrying ``sign``."""
        return SIGNS.index(sign) * self.space.dim + cfg

    def kron_matrix(self) -> Matrix:
        """D~ (x) D~ in CONF_* coordinates (dense; small instances only)."""
        sp, dt = self.space, self.d_tilde
        size = self.order.size
        entries = {}
        for col in range(size):
            q1, q2, l1, l2, b1, b2 = self.order.element(col)
            c1 = self.tilde_index(sp.index(q1, _unflatten(l1, sp)), b1)
            c2 = self.tilde_index(sp.index(q2, _unflatten(l2, sp)), b2)
            for r1 in range(dt.rows):
                v1 = dt[r1, c1]
                if v1 == 0:
                    continue
                for r2 in range(dt.rows):
                    v2 = dt[r2, c2]
                    if v2 == 0:
                        continue
                    row = self._conf_of(r1, r2)
                    entries[(row, col)] = v1 * v2
        return Matrix.from_sparse(size, size, entries, dt.backend)

    def _conf_of(self, r1: int, r2: int) -> int:
        sp = self.space
        s1, c1 = divmod(r1, sp.dim)
        s2, c2 = divmod(r2, sp.dim)
        return self.order.index(_conf_tuple(sp, c1, SIGNS[s1], c2, SIGNS[s2]))


def _unflatten(pos_index: int, space: ConfigurationSpace) -> tuple:
    out = []
    for _ in range(space.spec.heads):
        pos_index, p = divmod(pos_index, space.width)
        out.append(p)
    return tuple(reversed(out))


def _conf_tuple(space: ConfigurationSpace, c1: int, b1: int, c2: int, b2: int) -> tuple:
    block = space.width ** space.spec.heads
    return (space.state_of(c1), space.state_of(c2), c1 % block, c2 % block, b1, b2)


def split_positive_negative(spec: MachineSpec, x: str) -> SplitEvolution:
    if spec.kind == PFA:
        raise MachineError("the splitting applies to quantum machines")
    exact = spec.is_exact
    backend = EXACT if exact else FLOAT
    space, cols = _d_columns(spec, x, exact)
    n = space.dim
    plus, minus, tilde = {}, {}, {}
    for j, col in enumerate(cols):
        for i, v in col.items():
            r = _real(v, exact)
            if r > 0:
                plus[(i, j)] = r
                tilde[(i, j)] = tilde[(n + i, n + j)] = r
            elif r < 0:
                minus[(i, j)] = -r
                tilde[(n + i, j)] = tilde[(i, n + j)] = -r
    order = conf_star_order(spec, space.n)
    block = space.width ** spec.heads
    q0 = spec.initial

    def vec(states, same_sign_only=True):
        out = {}
        for a in SIGNS:
            for q in states:
                for l in range(block):
                    out.setdefault(a, []).append(order.index((q, q, l, l, a, a)))
        return out

    y_ini = {a: [order.index((q0, q0, 0, 0, a, a))] for a in SIGNS}
    return SplitEvolution(space, Matrix.from_sparse(n, n, plus, backend), Matrix.from_sparse(n, n, minus, backend),
                          Matrix.from_sparse(2 * n, 2 * n, tilde, backend), order, y_ini,
                          vec(sorted(spec.accepting)), vec(sorted(spec.rejecting)))


# ---------------------------------------------------------------------------
# sparse machinery on CONF_*


class _PairOperator:
    """Column access to M = D~ (x) D~ without materializing it."""

    def __init__(self, spec: MachineSpec, x: str, exact: bool):
        self.spec = spec
        self.exact = exact
        self.space, cols = _d_columns(spec, x, exact)
        self.order = conf_star_order(spec, self.space.n)
        self.block = self.space.width ** spec.heads
        self.tilde = []   # per config: list of (target config, value, sign flip)
        for col in cols:
            out = []
            for i, v in col.items():
                r = _real(v, exact)
                if r:
                    out.append((i, abs(r), r < 0))
            self.tilde.append(out)

    def start(self) -> tuple:
        c0 = self.space.initial_index()
        return (c0, PLUS, c0, PLUS)

    def column(self, node: tuple) -> list:
        c1, b1, c2, b2 = node
        out = []
        for i1, v1, f1 in self.tilde[c1]:
            for i2, v2, f2 in self.tilde[c2]:
                out.append(((i1, -b1 if f1 else b1, i2, -b2 if f2 else b2), v1 * v2))
        return out

    def conf(self, node: tuple) -> tuple:
        c1, b1, c2, b2 = node
        return _conf_tuple(self.space, c1, b1, c2, b2)

    def conf_index(self, node: tuple) -> int:
        return self.order.index(self.conf(node))

    def target_sign(self, node: tuple, states) -> int:
        """b1*b2 if node is a diagonal pair on ``states``, else 0."""
        c1, b1, c2, b2 = node
        if c1 != c2 or self.space.state_of(c1) not in states:
            return 0
        return b1 * b2

    def reachable(self, limit: int | None = None) -> list:
        seen = {self.start()}
        stack = [self.start()]
        while stack:
            node = stack.pop()
            for nxt, _ in self.column(node):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
                    if limit is not None and len(seen) > limit:
                        raise MemoryError(f"reachable CONF_* block exceeds {limit} elements")
        return sorted(seen, key=self.conf_index)


class _PfaOperator:
    """The same column interface over plain configurations of a probabilistic machine (M = D)."""

    def __init__(self, spec: MachineSpec, x: str, exact: bool):
        self.spec = spec
        self.exact = exact
        self.space, self.cols = _d_columns(spec, x, exact)

    def start(self) -> int:
        return self.space.initial_index()

    def column(self, node: int) -> list:
        return list(self.cols[node].items())

    def conf(self, node: int) -> tuple:
        return (self.space.state_of(node), _unflatten(node % self.space.width ** self.spec.heads, self.space))

    def target_sign(self, node: int, states) -> int:
        return 1 if self.space.state_of(node) in states else 0

    def reachable(self, limit: int | None = None) -> list:
        seen, stack = {self.start()}, [self.start()]
        while stack:
            for nxt, _ in self.column(stack.pop()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
                    if limit is not None and len(seen) > limit:
                        raise MemoryError(f"reachable block exceeds {limit} configurations")
        return sorted(seen)


def _operator(spec: MachineSpec, x: str):
    """Column operator for the resolvent: M = D for a pfa, D~ (x) D~ for a real qfa."""
    if spec.kind == PFA:
        return spec, _PfaOperator(spec, x, spec.is_exact)
    if not spec.is_real:
        from .transforms import complex_to_real
        spec = complex_to_real(spec)
    return spec, _PairOperator(spec, x, spec.is_exact)


def _solve_sparse_exact(nodes: Sequence, columns: dict, rhs: dict) -> dict:
    """Solve (I - M) v = rhs over Fractions with row-by-row elimination.

    ``columns[node]`` lists (row node, value) of M.  Rows are eliminated in the
    given node order; for walk-like M the system is close to triangular.
    """
    pos = {v: i for i, v in enumerate(nodes)}
    rows = [dict() for _ in nodes]
    for j, node in enumerate(nodes):
        rows[j][j] = rows[j].get(j, 0) + 1
        for r, v in columns[node]:
            i = pos[r]
            rows[i][j] = rows[i].get(j, 0) - v
    b = [Fraction(0)] * len(nodes)
    for node, v in rhs.items():
        b[pos[node]] = v
    n = len(nodes)
    # column-wise elimination with sparse pivot choice
    col_rows: dict = {}
    for i, row in enumerate(rows):
        for j in row:
            col_rows.setdefault(j, set()).add(i)
    done = [False] * n
    pivot_of = {}
    for j in range(n):
        cands = [i for i in col_rows.get(j, ()) if not done[i] and rows[i].get(j, 0) != 0]
        if not cands:
            raise SingularResolventError("det(I - D~(x)D~) = 0 on the reachable block")
        p = min(cands, key=lambda i: (len(rows[i]), i))
        done[p] = True
        pivot_of[j] = p
        prow = rows[p]
        pv = prow[j]
        for i in cands:
            if i == p:
                continue
            row = rows[i]
            f = row[j] / pv
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv == 0:
                    row.pop(k, None)
                    if k in col_rows:
                        col_rows[k].discard(i)
                else:
                    row[k] = nv
                    col_rows.setdefault(k, set()).add(i)
            b[i] -= f * b[p]
    x = [Fraction(0)] * n
    for j in reversed(range(n)):
        p = pivot_of[j]
        row = rows[p]
        s = b[p] - sum(v * x[k] for k, v in row.items() if k != j)
        x[j] = s / row[j]
    return {node: x[i] for i, node in enumerate(nodes)}


def _solve_sparse_float(nodes: Sequence, columns: dict, rhs: dict) -> dict:
    pos = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    r_idx, c_idx, vals = list(range(n)), list(range(n)), [1.0] * n
    for j, node in enumerate(nodes):
        for r, v in columns[node]:
            r_idx.append(pos[r])
            c_idx.append(j)
            vals.append(-float(v))
    a = scipy.sparse.csc_matrix((vals, (r_idx, c_idx)), shape=(n, n))
    b = np.zeros(n)
    for node, v in rhs.items():
        b[pos[node]] = float(v)
    try:
        lu = scipy.sparse.linalg.splu(a)
    except RuntimeError as exc:
        raise SingularResolventError(str(exc)) from exc
    diag = np.abs(lu.U.diagonal())
    if diag.size and diag.min() < 1e-12 * max(1.0, diag.max()):
        raise SingularResolventError("pivot below 1e-12 in I - D~(x)D~")
    sol = lu.solve(b)
    return {node: sol[i] for i, node in enumerate(nodes)}


# ---------------------------------------------------------------------------
# acceptance


@dataclass
class ResolventResult:
    p_acc: object
    p_rej: object
    backend: str
    method: str
    reachable: int
    fallback: bool = False
    note: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        from .evolution import format_scalar
        return {"p_acc": format_scalar(self.p_acc), "p_rej": format_scalar(self.p_rej), "backend": self.backend,
                "method": self.method, "reachable": self.reachable, "fallback": self.fallback, "note": self.note,
                **{k: format_scalar(v) if not isinstance(v, (str, int, list)) else v
                   for k, v in self.extra.items()}}


def _pfa_resolvent(spec: MachineSpec, x: str) -> ResolventResult:
    """p_acc = sum over accepting c of (I - P Pi_non)^-1 [c, c0] for a probabilistic machine."""
    exact = spec.is_exact
    space, cols = _d_columns(spec, x, exact)
    c0 = space.initial_index()
    seen, stack = {c0}, [c0]
    while stack:
        j = stack.pop()
        for i in cols[j]:
            if i not in seen:
                seen.add(i)
                stack.append(i)
    nodes = sorted(seen)
    columns = {j: list(cols[j].items()) for j in nodes}
    solver = _solve_sparse_exact if exact else _solve_sparse_float
    v = solver(nodes, columns, {c0: Fraction(1) if exact else 1.0})
    p_acc = sum((v[c] for c in nodes if space.state_of(c) in spec.accepting), Fraction(0) if exact else 0.0)
    p_rej = sum((v[c] for c in nodes if space.state_of(c) in spec.rejecting), Fraction(0) if exact else 0.0)
    return ResolventResult(p_acc, p_rej, EXACT if exact else FLOAT, "linear-resolvent", len(nodes))


def _check_initial(spec: MachineSpec):
    if spec.is_halting(spec.initial):
        raise MachineError("the resolvent formula needs a non-halting initial state")


def acceptance_resolvent(spec: MachineSpec, x: str, reachable_limit: int = 200_000) -> ResolventResult:
    """(p_acc, p_rej) from the signed resolvent of D~ (x) D~.

    Falls back to the stationary-subspace restricted solve when I - M is
    singular on the reachable block.
    """
    _check_initial(spec)
    if spec.kind == PFA:
        return _pfa_resolvent(spec, x)
    if not spec.is_real:
        from .transforms import complex_to_real
        spec = complex_to_real(spec)
    exact = spec.is_exact
    op = _PairOperator(spec, x, exact)
    nodes = op.reachable(reachable_limit)
    columns = {node: op.column(node) for node in nodes}
    solver = _solve_sparse_exact if exact else _solve_sparse_float
    one = Fraction(1) if exact else 1.0
    try:
        v = solver(nodes, columns, {op.start(): one})
    except SingularResolventError as exc:
        res = restricted_resolvent(spec, x)
        res.note = f"SINGULAR_RESOLVENT ({exc}); used the stationary-subspace restricted solve"
        return res
    zero = Fraction(0) if exact else 0.0
    p_acc = sum((op.target_sign(nd, spec.accepting) * v[nd] for nd in nodes), zero)
    p_rej = sum((op.target_sign(nd, spec.rejecting) * v[nd] for nd in nodes), zero)
    return ResolventResult(p_acc, p_rej, EXACT if exact else FLOAT, "resolvent", len(nodes))


def restricted_resolvent(spec: MachineSpec, x: str) -> ResolventResult:
    """Halting-mass limit with the norm-preserving part of D projected out.

    For the contraction D = U Pi_non the eigenvectors with |lambda| = 1 span a
    reducing subspace S inside the non-halting configurations; nothing in S is
    ever measured, so p_acc = sum_k ||Pi_acc D^k (I - P_S) e_0||^2, a convergent
    series summed through (I - D'(x)D')^-1 with D' = D (I - P_S).
    """
    space, cols = _d_columns(spec, x, False)
    n = space.dim
    d = np.zeros((n, n), dtype=np.complex128)
    for j, col in enumerate(cols):
        for i, v in col.items():
            d[i, j] = complex(v)
    t, z, sdim = scipy.linalg.schur(d, output="complex", sort=lambda lam: abs(abs(lam) - 1) <= STATIONARY_TOL)
    zs = z[:, :sdim]
    proj = np.eye(n) - zs @ zs.conj().T
    dp = d @ proj
    psi = proj[:, space.initial_index()]
    big = np.kron(dp, dp)
    try:
        sol = np.linalg.solve(np.eye(n * n) - big, np.kron(psi, psi))
    except np.linalg.LinAlgError as exc:
        raise SingularResolventError(f"restricted system singular: {exc}") from exc
    acc = [c for c in range(n) if space.state_of(c) in spec.accepting]
    rej = [c for c in range(n) if space.state_of(c) in spec.rejecting]
    p_acc = float(sum(sol[c * n + c].real for c in acc))
    p_rej = float(sum(sol[c * n + c].real for c in rej))
    return ResolventResult(p_acc, p_rej, FLOAT, "restricted-resolvent", n * n, fallback=True,
                           extra={"stationary_dim": int(sdim)})


def series_check(spec: MachineSpec, x: str, terms: int = 200, literal: bool = False):
    """Truncated sum_k M^k applied to the initial pair.

    With ``literal`` the targets are the same-sign pairs only and the (-,-)
    series is subtracted from the (+,+) one; every sign flip is a symmetry of
    D~, so that difference vanishes identically.  The default weights every
    target pair by b1*b2 starting from (+,+).
    """
    _check_initial(spec)
    if literal and spec.kind == PFA:
        raise MachineError("the literal pair targets apply to quantum machines")
    spec, op = _operator(spec, x)
    exact = spec.is_exact
    zero = Fraction(0) if exact else 0.0

    def run(start):
        vec = {start: Fraction(1) if exact else 1.0}
        acc = rej = zero
        for _ in range(terms):
            for node, val in vec.items():
                if literal and (node[1] != start[1] or node[3] != start[3]):
                    continue
                s_a = op.target_sign(node, spec.accepting)
                s_r = op.target_sign(node, spec.rejecting)
                w = 1 if literal else None
                acc += (w if literal else s_a) * val if s_a else zero
                rej += (w if literal else s_r) * val if s_r else zero
            nxt: dict = {}
            for node, val in vec.items():
                for r, m in op.column(node):
                    nxt[r] = nxt.get(r, zero) + m * val
            vec = nxt
            if not vec:
                break
        return acc, rej

    c0 = op.space.initial_index()
    if literal:
        pa, pr = run((c0, PLUS, c0, PLUS))
        ma, mr = run((c0, MINUS, c0, MINUS))
        return pa - ma, pr - mr
    return run(op.start())


# ---------------------------------------------------------------------------
# clow determinants


def clow_determinant(t: Matrix, cap: int = CLOW_CAP):
    """det(T) as the signed sum over clow sequences of total length dim(T).

    A clow is a closed walk whose first vertex (its head) is its smallest; a
    sequence has strictly increasing heads.  Partial sums are memoized on
    (current head, current vertex, length used), which is the usual dynamic
    program over clow sequences.  Sign of a sequence with k clows: (-1)^(n+k).
    """
    n = t.rows
    if t.cols != n:
        raise LinAlgError("clow_determinant needs a square matrix")
    if n > cap:
        raise LinAlgError(f"dimension {n} exceeds the clow cap {cap}")
    if n == 0:
        return Fraction(1) if t.backend == EXACT else 1.0
    a = t.tolist()
    zero = Fraction(0) if t.backend == EXACT else 0j

    @lru_cache(maxsize=None)
    def g(head: int, v: int, used: int):
        total = zero
        nxt = used + 1
        # close the current clow back to its head
        w = a[v][head]
        if w != 0:
            if nxt == n:
                total -= w
            else:
                for h2 in range(head + 1, n):
                    total -= w * g(h2, h2, nxt)
        if nxt < n:
            for u in range(head + 1, n):
                w = a[v][u]
                if w != 0:
                    total += w * g(head, u, nxt)
        return total

    total = sum((g(h, h, 0) for h in range(n)), zero)
    return total if n % 2 == 0 else -total


def clow_sequences(t: Matrix, cap: int = 5):
    """Explicit enumeration of clow sequences (small n): list of (clows, sign, weight)."""
    n = t.rows
    if n > cap:
        raise LinAlgError(f"dimension {n} exceeds the enumeration cap {cap}")
    a = t.tolist()
    out = []

    def extend(seq, head, walk, used):
        v = walk[-1]
        if used + 1 <= n:
            closed = seq + [tuple(walk)]
            if used + 1 == n:
                out.append(closed)
            else:
                for h2 in range(head + 1, n):
                    extend(closed, h2, [h2], used + 1)
        if used + 1 < n:
            for u in range(head + 1, n):
                extend(seq, head, walk + [u], used + 1)

    for h in range(n):
        extend([], h, [h], 0)
    res = []
    for seq in out:
        w = 1
        for clow in seq:
            for i, c in enumerate(clow):
                w *= a[c][clow[(i + 1) % len(clow)]]
        res.append((seq, (-1) ** (n + len(seq)), w))
    return res


@dataclass
class CofactorReport:
    nodes: list
    det: object
    numerator_acc: object
    numerator_rej: object
    p_acc: object
    p_rej: object
    method: str


def cofactor_resolvent(spec: MachineSpec, x: str, use_clows: bool = False, cap: int = CLOW_CAP) -> CofactorReport:
    """Laplace form on the reachable block: p = sum_t s(t) (-1)^(i0+t) det[T minus row i0, col t] / det T.

    Positions are 0-based within the CONF_*-ordered reachable block.  With
    ``use_clows`` every determinant is computed through clow sequences.
    """
    _check_initial(spec)
    spec, op = _operator(spec, x)
    exact = spec.is_exact
    nodes = op.reachable(10_000)
    if use_clows and len(nodes) > cap:
        raise LinAlgError(f"reachable CONF_* block has {len(nodes)} elements; clow cap is {cap}")
    pos = {nd: i for i, nd in enumerate(nodes)}
    n = len(nodes)
    zero = Fraction(0) if exact else 0.0
    grid = [[zero] * n for _ in range(n)]
    for j, nd in enumerate(nodes):
        grid[j][j] += 1
        for r, v in op.column(nd):
            grid[pos[r]][j] -= v
    t = Matrix.exact(grid) if exact else Matrix.floating(np.array(grid, dtype=float))
    det_fn = (lambda m: clow_determinant(m, cap)) if use_clows else determinant
    det = det_fn(t)
    i0 = pos[op.start()]

    def minor(row: int, col: int):
        if n == 1:
            return Fraction(1) if exact else 1.0
        keep_r = [r for r in range(n) if r != row]
        keep_c = [c for c in range(n) if c != col]
        return det_fn(t.submatrix(keep_r, keep_c)) if use_clows else minor_determinant(t, row, col)

    num_acc = num_rej = zero
    for nd, j in pos.items():
        for states, which in ((spec.accepting, "acc"), (spec.rejecting, "rej")):
            s = op.target_sign(nd, states)
            if s:
                cof = (-1) ** (i0 + j) * minor(i0, j) * s
                if which == "acc":
                    num_acc += cof
                else:
                    num_rej += cof
    if det == 0 or (not exact and abs(det) < 1e-12):
        raise SingularResolventError("det(I - D~(x)D~) = 0 on the reachable block")
    return CofactorReport([op.conf(nd) for nd in nodes], det, num_acc, num_rej, num_acc / det, num_rej / det,
                          "clow" if use_clows else "bareiss")
