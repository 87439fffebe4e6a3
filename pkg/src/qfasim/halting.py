"""Absolute-halting analysis via the kernel chain of U Pi_non.

W_i = null((U Pi_non)^(i+1)) grows strictly until it stabilizes at some d,
after which every vector of W_d halts within d+1 steps.  A machine halts
absolutely on x when its initial configuration lies in W_d.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .evolution import ConfigurationSpace, build_evolution, sparse_columns, step_simulate
from .linalg import (EXACT, FLOAT, Matrix, SubspaceBasis, nullspace, span, subspace_equal,
                     subspace_image, subspace_intersection, subspace_sum)
from .model import MachineError, MachineSpec, sample_inputs

STATIONARY_TOL = 1e-8


@dataclass
class HaltingReport:
    dims: list
    d: int
    halts_absolutely: bool
    worst_case_steps: int | None
    N: int
    bound: int | None = None
    bound_check: bool | None = None
    initial_steps: int | None = None
    recursion_check: bool | None = None
    method: str = "kernel-powers"

    def to_dict(self) -> dict:
        return asdict(self)


def _bound_fields(report: HaltingReport, bound: int | None):
    report.bound = bound
    if bound is not None and report.halts_absolutely:
        report.bound_check = report.worst_case_steps <= bound
    return report


def _is_monomial(u: Matrix) -> bool:
    if u.backend == FLOAT:
        a = u.to_numpy()
        return bool(np.all(np.count_nonzero(np.abs(a) > 1e-12, axis=0) == 1))
    return all(sum(1 for v in u.column(j) if v != 0) == 1 for j in range(u.cols))


def _chain_from_map(succ: Sequence, initial: int) -> HaltingReport:
    """Chain for a partial injective map (U Pi_non on a permutation machine).

    ``succ[j]`` is the next configuration or None when j is halting.  With an
    injective map no cancellation can happen, so W_i is spanned by the basis
    vectors that fall off the map within i+1 applications.
    """
    n = len(succ)
    pred = [None] * n
    for j, t in enumerate(succ):
        if t is not None:
            pred[t] = j
    steps = [0] * n
    frontier = [j for j in range(n) if succ[j] is None]
    for j in frontier:
        steps[j] = 1
    while frontier:
        nxt = []
        for j in frontier:
            p = pred[j]
            if p is not None and steps[p] == 0:
                steps[p] = steps[j] + 1
                nxt.append(p)
        frontier = nxt
    top = max(steps) if n else 0
    counts = [0] * (top + 2)
    for s in steps:
        if s:
            counts[s] += 1
    dims, acc = [], 0
    for i in range(top + 1):
        acc += counts[i + 1]
        dims.append(acc)
    d = max(top - 1, 0)
    dims = dims[: d + 2] if len(dims) > d + 1 else dims + [acc]
    init = steps[initial] if n else 0
    return HaltingReport(dims=dims[: d + 2], d=d, halts_absolutely=init > 0,
                         worst_case_steps=d + 1 if init > 0 else None, N=n,
                         initial_steps=init or None, method="permutation-walk")


def _basis_vector(n: int, i: int, backend: str):
    zero, one = (Fraction(0), Fraction(1)) if backend == EXACT else (0j, 1 + 0j)
    return [one if k == i else zero for k in range(n)]


def dimension_chain(u: Matrix, pi_non: Matrix, initial: int | Sequence = 0, bound: int | None = None,
                    check_recursion: bool = False, fast: bool = True) -> HaltingReport:
    """Kernel chain of U Pi_non, stabilization index d and absolute-halting verdict."""
    n = u.rows
    backend = u.backend
    non = [j for j in range(n) if pi_non[j, j] != 0]
    if fast and isinstance(initial, int) and _is_monomial(u) and not check_recursion:
        succ = [None] * n
        for j in non:
            col = u.column(j)
            succ[j] = next(i for i, v in enumerate(col) if abs(complex(v)) > 1e-12)
        rep = _chain_from_map(succ, initial)
        return _bound_fields(rep, bound)

    a = u @ pi_non
    power = a
    spaces: list[SubspaceBasis] = [nullspace(power)]
    while True:
        power = a @ power
        spaces.append(nullspace(power))
        if spaces[-1].dim == spaces[-2].dim or len(spaces) > n + 2:
            break
    d = len(spaces) - 2
    dims = [s.dim for s in spaces]
    w_d = spaces[d]
    vec = _basis_vector(n, initial, backend) if isinstance(initial, int) else list(initial)
    halts = w_d.contains(vec)
    rep = HaltingReport(dims=dims, d=d, halts_absolutely=halts,
                        worst_case_steps=d + 1 if halts else None, N=n)
    if check_recursion:
        rep.recursion_check = recursion_holds(u, non, spaces)
    if halts and isinstance(initial, int):
        rep.initial_steps = next(i + 1 for i, s in enumerate(spaces) if s.contains(vec))
    return _bound_fields(rep, bound)


def recursion_holds(u: Matrix, non: Sequence[int], spaces: Sequence[SubspaceBasis]) -> bool:
    """W_{i+1} = span{K_{i+1}, W_i} with K_{i+1} = U^-1(W_i) ∩ W_perp, for every step of the chain."""
    n = u.rows
    backend = u.backend
    w_perp = span(n, backend, [_basis_vector(n, j, backend) for j in non])
    u_inv = u.adjoint()
    for i in range(len(spaces) - 1):
        k = subspace_intersection(subspace_image(u_inv, spaces[i]), w_perp)
        if not subspace_equal(subspace_sum(k, spaces[i]), spaces[i + 1]):
            return False
    return True


def absolute_halting_steps(spec: MachineSpec, x: str) -> int | None:
    """Steps until Pi_non U leaves nothing of the initial vector, or None if it never does.

    Exact machines: a vector annihilated by some power of an N x N operator is
    annihilated by its N-th power, so N exact steps decide.  Otherwise the
    support graph is used: if the non-halting configurations reachable through
    nonzero amplitudes form no cycle, every path ends within the longest path.
    A cyclic support falls back to float propagation.
    """
    space = ConfigurationSpace.of(spec, x)
    if spec.is_exact:
        trace = step_simulate(spec, x, t_max=space.dim, backend=EXACT)
        return len(trace.steps) if trace.verdict == "HALTED_ALL" else None
    cols = sparse_columns(spec, space, False)
    block = space.width ** spec.heads
    halting_cfg = [spec.is_halting(spec.states[i // block]) for i in range(space.dim)]
    start = space.initial_index()
    depth: dict = {}
    on_path: set = set()
    stack = [(start, iter(cols[start]))]
    on_path.add(start)
    while stack:
        node, it = stack[-1]
        nxt = next((i for i in it if not halting_cfg[i]), None)
        if nxt is None:
            stack.pop()
            on_path.discard(node)
            depth[node] = 1 + max((depth[i] for i in cols[node] if not halting_cfg[i]), default=0)
            continue
        if nxt in on_path:
            trace = step_simulate(spec, x, t_max=space.dim, backend=FLOAT)
            return len(trace.steps) if trace.verdict == "HALTED_ALL" else None
        if nxt not in depth:
            on_path.add(nxt)
            stack.append((nxt, iter(cols[nxt])))
    return depth[start]


def linear_bound(spec: MachineSpec, n: int) -> int:
    return len(spec.states) * (n + 2) + 1


def analyze_halting(spec: MachineSpec, x: str, check_recursion: bool = False) -> HaltingReport:
    """dimension_chain on the evolution of ``spec`` over ``x``.

    Permutation machines never materialize U densely, so large two-head
    spaces stay cheap.
    """
    space = ConfigurationSpace.of(spec, x)
    bound = linear_bound(spec, space.n)
    exact = spec.is_exact
    cols = sparse_columns(spec, space, exact)
    if not check_recursion and all(len(c) == 1 for c in cols):
        succ = [None if spec.is_halting(space.state_of(j)) else next(iter(c)) for j, c in enumerate(cols)]
        return _bound_fields(_chain_from_map(succ, space.initial_index()), bound)
    u, _, _, pi_non = build_evolution(spec, x)
    return dimension_chain(u, pi_non, space.initial_index(), bound, check_recursion, fast=False)


# ---------------------------------------------------------------------------
# linear-time cross-check


@dataclass
class BoundRow:
    input: str
    halts_absolutely: bool
    worst_case_steps: int | None
    initial_steps: int | None
    bound: int
    simulated_steps: int
    residual_zero: bool
    ok: bool


@dataclass
class LinearBoundReport:
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def violations(self) -> list:
        return [r for r in self.rows if not r.ok]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "rows": [asdict(r) for r in self.rows]}


def verify_linear_bound(spec: MachineSpec, n_range: Iterable[int], sample_cap: int = 16, seed: int = 0,
                        check_recursion: bool = False) -> LinearBoundReport:
    """Run the chain and the simulator side by side.

    For absolutely halting inputs the simulated residual must vanish by step
    worst_case_steps.  Inputs that do not halt absolutely are reported with the
    bound check skipped.
    """
    report = LinearBoundReport()
    for n in n_range:
        inputs, _ = sample_inputs(spec.alphabet, n, cap=sample_cap, n_random=sample_cap, seed=seed)
        for x in inputs:
            rep = analyze_halting(spec, x, check_recursion)
            bound = linear_bound(spec, n)
            if rep.halts_absolutely:
                trace = step_simulate(spec, x, t_max=rep.worst_case_steps)
                zero = trace.residual == 0 if spec.is_exact else trace.residual < 1e-12
                steps = len(trace.steps)
                ok = zero and (rep.recursion_check is not False)
            else:
                trace, zero, steps, ok = None, False, 0, rep.recursion_check is not False
            report.rows.append(BoundRow(x, rep.halts_absolutely, rep.worst_case_steps, rep.initial_steps,
                                        bound, steps, zero, ok))
    return report


# ---------------------------------------------------------------------------
# spectral runtime estimate


@dataclass
class SpectralEstimate:
    dim_w_max: int
    dim_perp: int
    dim_stationary: int
    dim_undetermined: int
    lambda_max: float | None
    epsilon_prime: float
    k_bound: float | None
    machine_steps: float | None
    invertible: bool
    diagonalizable: bool
    d: int
    message: str

    def to_dict(self) -> dict:
        return asdict(self)


def _orthonormal(vectors: Sequence, n: int) -> np.ndarray:
    if not len(vectors):
        return np.zeros((n, 0), dtype=np.complex128)
    q, r = np.linalg.qr(np.array(vectors, dtype=np.complex128).T)
    return q[:, : np.linalg.matrix_rank(r)]


def spectral_runtime_estimate(spec: MachineSpec, x: str, eps: float = 0.0) -> SpectralEstimate:
    """Contracting versus norm-preserving split of the non-halting block.

    Builds Ũ = (U Pi_non)^(d+1), writes it in a basis adapted to W_max⊥ ⊕ W_max
    as [[A, 0], [B, 0]], and bounds the number of Ũ-steps k until the
    undetermined part has norm² at most ε' = (1 - 2ε)/4.
    """
    if not 0 <= eps <= 0.5:
        raise ValueError("eps must lie in [0, 1/2]")
    eps_p = (1 - 2 * eps) / 4
    u, _, _, pi_non = build_evolution(spec, x, FLOAT)
    n = u.rows
    chain = dimension_chain(u, pi_non, ConfigurationSpace.of(spec, x).initial_index(), fast=False)
    d = chain.d
    a_op = u.to_numpy() @ pi_non.to_numpy()
    w_max = nullspace(Matrix.floating(np.linalg.matrix_power(a_op, d + 1)))
    q_max = _orthonormal(w_max.vectors, n)
    m = n - q_max.shape[1]
    if m == 0:
        return SpectralEstimate(n, 0, 0, 0, None, eps_p, 0.0, float(d + 1), True, True, d,
                                f"W_max is the whole space: all mass halts by {d + 1} steps")
    full, _ = np.linalg.qr(np.hstack([q_max, np.eye(n)]))
    q_perp = full[:, q_max.shape[1]: n]
    q_perp = q_perp - q_max @ (q_max.conj().T @ q_perp)
    q_perp, _ = np.linalg.qr(q_perp)
    q_perp = q_perp[:, :m]
    u_tilde = np.linalg.matrix_power(a_op, d + 1)
    a_blk = q_perp.conj().T @ u_tilde @ q_perp
    svals = np.linalg.svd(a_blk, compute_uv=False)
    invertible = bool(svals.min() > 1e-9 * max(1.0, svals.max()))
    lam, vecs = np.linalg.eig(a_blk)
    diag = bool(np.linalg.matrix_rank(vecs, tol=1e-8) == m)
    mods = np.abs(lam)
    stationary = np.abs(1 - mods) <= STATIONARY_TOL
    und = mods[~stationary]
    if und.size == 0:
        return SpectralEstimate(n - m, m, int(stationary.sum()), 0, None, eps_p, 0.0, 0.0, invertible, diag, d,
                                "undetermined block empty: the non-halting part is stationary and never halts")
    lam_max = float(und.max())
    if lam_max == 0:
        k = 1.0
    else:
        k = math.log(eps_p) / (2 * math.log(lam_max)) if eps_p > 0 else math.inf
    msg = "A is invertible" if invertible else "A is numerically singular (diagnostic)"
    return SpectralEstimate(n - m, m, int(stationary.sum()), int(und.size), lam_max, eps_p, k,
                            k * (d + 1), invertible, diag, d, msg)
