"""Exact reference values for the generators, computed on the full CONF_* matrix.

M = D~ (x) D~ is read from the split evolution, independently of the
transition bookkeeping inside the generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..resolvent import PLUS, SingularResolventError, _solve_sparse_exact, split_positive_negative


@dataclass
class PairSystem:
    size: int
    m: dict                  # (row, col) -> M entry, nonzero only
    i0: int
    targets: dict            # index -> b1*b2 for diagonal accepting elements

    def t_rows(self) -> list:
        rows = [dict() for _ in range(self.size)]
        for i in range(self.size):
            rows[i][i] = Fraction(1)
        for (i, j), v in self.m.items():
            nv = rows[i].get(j, 0) - v
            if nv:
                rows[i][j] = nv
            else:
                rows[i].pop(j, None)
        return rows


def pair_system(qfa, x: str) -> PairSystem:
    split = split_positive_negative(qfa, x)
    km = split.kron_matrix()
    n = km.rows
    m = {}
    for i in range(n):
        for j, v in enumerate(km.row(i)):
            if v:
                m[(i, j)] = Fraction(v)
    order = split.order
    q0 = qfa.initial
    i0 = order.index((q0, q0, 0, 0, PLUS, PLUS))
    targets = {}
    for idx in range(order.size):
        q1, q2, l1, l2, b1, b2 = order.element(idx)
        if q1 == q2 and l1 == l2 and q1 in qfa.accepting:
            targets[idx] = b1 * b2
    return PairSystem(n, m, i0, targets)


def sparse_det(rows: list) -> Fraction:
    """Exact determinant of a sparse square matrix given as row dicts (consumed)."""
    n = len(rows)
    col_rows: dict = {}
    for i, row in enumerate(rows):
        for j in row:
            col_rows.setdefault(j, set()).add(i)
    used = [False] * n
    perm = [0] * n
    det = Fraction(1)
    for j in range(n):
        cands = [i for i in col_rows.get(j, ()) if not used[i] and rows[i].get(j)]
        if not cands:
            return Fraction(0)
        p = min(cands, key=lambda i: (len(rows[i]), i))
        used[p] = True
        perm[j] = p
        prow = rows[p]
        pv = prow[j]
        det *= pv
        for i in cands:
            if i == p:
                continue
            row = rows[i]
            f = row[j] / pv
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                    col_rows.setdefault(k, set()).add(i)
                else:
                    row.pop(k, None)
                    col_rows.get(k, set()).discard(i)
    # sign of the permutation j -> perm[j]
    seen = [False] * n
    parity = 0
    for s in range(n):
        if seen[s]:
            continue
        length, c = 0, s
        while not seen[c]:
            seen[c] = True
            c = perm[c]
            length += 1
        parity ^= (length - 1) & 1
    return -det if parity else det


def det_t(ps: PairSystem) -> Fraction:
    return sparse_det(ps.t_rows())


def signed_cofactor_sum(ps: PairSystem, det: Fraction | None = None) -> Fraction:
    """sum_t s(t) C[i0, t] = det T * (T^-1 e_i0) . s."""
    det = det_t(ps) if det is None else det
    if det == 0:
        raise SingularResolventError("det(I - D~(x)D~) = 0")
    columns = {j: [] for j in range(ps.size)}
    for (i, j), v in ps.m.items():
        columns[j].append((i, v))
    y = _solve_sparse_exact(list(range(ps.size)), columns, {ps.i0: Fraction(1)})
    return det * sum((s * y[t] for t, s in ps.targets.items()), Fraction(0))
