"""Dense linear algebra over two scalar backends.

EXACT matrices hold ``fractions.Fraction`` entries, or ``QI`` (Gaussian
rational) entries when an imaginary part is present.  FLOAT matrices wrap a
read-only complex128 numpy array.  Every value is immutable; every function
is pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

EXACT = "EXACT"
FLOAT = "FLOAT"

TAU = 1e-9
PIVOT_TOL = 1e-12


class LinAlgError(ValueError):
    pass


class SingularMatrixError(LinAlgError):
    pass


class BackendMismatchError(LinAlgError):
    pass


class QI:
    """Gaussian rational re + im*i with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("QI is immutable")

    @staticmethod
    def make(re, im):
        """Collapse to a plain Fraction when the imaginary part vanishes."""
        if im == 0:
            return Fraction(re)
        return QI(re, im)

    @staticmethod
    def _parts(z):
        if isinstance(z, QI):
            return z.re, z.im
        if isinstance(z, (int, Rational)):
            return Fraction(z), Fraction(0)
        return None

    def __add__(self, other):
        p = QI._parts(other)
        if p is None:
            return NotImplemented
        return QI.make(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = QI._parts(other)
        if p is None:
            return NotImplemented
        return QI.make(self.re - p[0], self.im - p[1])

    def __rsub__(self, other):
        p = QI._parts(other)
        if p is None:
            return NotImplemented
        return QI.make(p[0] - self.re, p[1] - self.im)

    def __mul__(self, other):
        p = QI._parts(other)
        if p is None:
            return NotImplemented
        a, b = self.re, self.im
        c, d = p
        return QI.make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = QI._parts(other)
        if p is None:
            return NotImplemented
        c, d = p
        den = c * c + d * d
        if den == 0:
            raise ZeroDivisionError("QI division by zero")
        a, b = self.re, self.im
        return QI.make((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        p = QI._parts(other)
        if p is None:
            return NotImplemented
        return QI(p[0], p[1]) / self

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return QI(self.re, -self.im)

    def __eq__(self, other):
        p = QI._parts(other)
        if p is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == p[0] and self.im == p[1]

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QI({self.re}, {self.im})"

    def __str__(self):
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def exact_scalar(z):
    """Coerce an int/Fraction/QI into the canonical exact scalar form."""
    if isinstance(z, QI):
        return QI.make(z.re, z.im)
    if isinstance(z, (int, Rational)):
        return Fraction(z)
    raise TypeError(f"not an exact scalar: {z!r}")


def conj(z):
    if isinstance(z, QI):
        return z.conjugate()
    if isinstance(z, complex):
        return z.conjugate()
    return z


def abs2(z):
    """|z|^2, exact for exact inputs."""
    if isinstance(z, QI):
        return z.re * z.re + z.im * z.im
    if isinstance(z, complex):
        return z.real * z.real + z.imag * z.imag
    return z * z


def is_exact_scalar(z) -> bool:
    return isinstance(z, (QI, int, Rational)) and not isinstance(z, bool)


def to_complex(z) -> complex:
    return complex(z)


@dataclass(frozen=True, eq=False)
class Matrix:
    """Immutable dense matrix tagged with its backend."""

    rows: int
    cols: int
    backend: str
    _data: object

    # construction -------------------------------------------------------
    @staticmethod
    def exact(rows: Sequence[Sequence]) -> "Matrix":
        data = tuple(tuple(exact_scalar(v) for v in row) for row in rows)
        r = len(data)
        c = len(data[0]) if r else 0
        if any(len(row) != c for row in data):
            raise LinAlgError("ragged rows")
        return Matrix(r, c, EXACT, data)

    @staticmethod
    def floating(array) -> "Matrix":
        a = np.array(array, dtype=np.complex128)
        if a.ndim != 2:
            a = a.reshape((a.shape[0], -1)) if a.ndim == 1 else a
        if not np.all(np.isfinite(a)):
            raise LinAlgError("non-finite entry in FLOAT matrix")
        a.setflags(write=False)
        return Matrix(a.shape[0], a.shape[1], FLOAT, a)

    @staticmethod
    def identity(n: int, backend: str = EXACT) -> "Matrix":
        if backend == FLOAT:
            return Matrix.floating(np.eye(n))
        one, zero = Fraction(1), Fraction(0)
        return Matrix(n, n, EXACT, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @staticmethod
    def zeros(r: int, c: int, backend: str = EXACT) -> "Matrix":
        if backend == FLOAT:
            return Matrix.floating(np.zeros((r, c)))
        zero = Fraction(0)
        return Matrix(r, c, EXACT, tuple(tuple(zero for _ in range(c)) for _ in range(r)))

    @staticmethod
    def from_sparse(r: int, c: int, entries: dict, backend: str) -> "Matrix":
        """Build from {(i, j): value}."""
        if backend == FLOAT:
            a = np.zeros((r, c), dtype=np.complex128)
            for (i, j), v in entries.items():
                a[i, j] += complex(v)
            return Matrix.floating(a)
        grid = [[Fraction(0)] * c for _ in range(r)]
        for (i, j), v in entries.items():
            grid[i][j] = grid[i][j] + exact_scalar(v)
        return Matrix(r, c, EXACT, tuple(tuple(row) for row in grid))

    # access ---------------------------------------------------------------
    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        if self.backend == FLOAT:
            return complex(self._data[i, j])
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        if self.backend == FLOAT:
            return tuple(complex(v) for v in self._data[i])
        return self._data[i]

    def tolist(self) -> list[list]:
        if self.backend == FLOAT:
            return [[complex(v) for v in row] for row in self._data]
        return [list(row) for row in self._data]

    def to_numpy(self) -> np.ndarray:
        if self.backend == FLOAT:
            return np.array(self._data)
        return np.array([[complex(v) for v in row] for row in self._data], dtype=np.complex128)

    def to_float(self) -> "Matrix":
        return self if self.backend == FLOAT else Matrix.floating(self.to_numpy())

    def is_real(self) -> bool:
        if self.backend == FLOAT:
            return bool(np.all(self._data.imag == 0))
        return not any(isinstance(v, QI) for row in self._data for v in row)

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "Matrix"):
        if self.backend != other.backend:
            raise BackendMismatchError(f"{self.backend} vs {other.backend}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise LinAlgError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.backend == FLOAT:
            return Matrix.floating(self._data @ other._data)
        cols = [other.column(j) for j in range(other.cols)]
        out = []
        for row in self._data:
            nz = [(k, v) for k, v in enumerate(row) if v != 0]
            out.append(tuple(sum((v * col[k] for k, v in nz), Fraction(0)) for col in cols))
        return Matrix(self.rows, other.cols, EXACT, tuple(out))

    def column(self, j: int) -> tuple:
        if self.backend == FLOAT:
            return tuple(complex(v) for v in self._data[:, j])
        return tuple(row[j] for row in self._data)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise LinAlgError("shape mismatch")
        if self.backend == FLOAT:
            return Matrix.floating(self._data + other._data)
        return Matrix(self.rows, self.cols, EXACT,
                      tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self._data, other._data)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(-1)

    def scale(self, s) -> "Matrix":
        if self.backend == FLOAT:
            return Matrix.floating(self._data * complex(s))
        s = exact_scalar(s)
        return Matrix(self.rows, self.cols, EXACT, tuple(tuple(s * v for v in row) for row in self._data))

    def transpose(self) -> "Matrix":
        if self.backend == FLOAT:
            return Matrix.floating(self._data.T)
        return Matrix(self.cols, self.rows, EXACT, tuple(zip(*self._data)) if self.rows else ())

    def adjoint(self) -> "Matrix":
        if self.backend == FLOAT:
            return Matrix.floating(self._data.conj().T)
        return Matrix(self.cols, self.rows, EXACT,
                      tuple(tuple(conj(v) for v in col) for col in zip(*self._data)))

    def apply(self, vec: Sequence) -> tuple:
        """Matrix-vector product on a plain sequence."""
        if self.backend == FLOAT:
            return tuple(complex(v) for v in self._data @ np.asarray(vec, dtype=np.complex128))
        return tuple(sum((a * b for a, b in zip(row, vec) if a != 0), Fraction(0)) for row in self._data)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        if self.backend == FLOAT:
            return Matrix.floating(self._data[np.ix_(list(rows), list(cols))])
        return Matrix(len(rows), len(cols), EXACT, tuple(tuple(self._data[i][j] for j in cols) for i in rows))

    def power(self, k: int) -> "Matrix":
        if self.rows != self.cols:
            raise LinAlgError("power of non-square matrix")
        out = Matrix.identity(self.rows, self.backend)
        base = self
        while k > 0:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape or self.backend != other.backend:
            return False
        if self.backend == FLOAT:
            return bool(np.array_equal(self._data, other._data))
        return self._data == other._data

    def __hash__(self):
        if self.backend == FLOAT:
            return hash((self.shape, self._data.tobytes()))
        return hash((self.shape, self._data))

    def allclose(self, other: "Matrix", tol: float = TAU) -> bool:
        if self.shape != other.shape:
            return False
        return bool(np.max(np.abs(self.to_numpy() - other.to_numpy()), initial=0.0) <= tol)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {self.backend})"


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product: out[i*rb + k, j*cb + l] = a[i,j] * b[k,l]."""
    a._check(b)
    if a.backend == FLOAT:
        return Matrix.floating(np.kron(a._data, b._data))
    out = []
    for arow in a._data:
        for brow in b._data:
            out.append(tuple(x * y for x in arow for y in brow))
    return Matrix(a.rows * b.rows, a.cols * b.cols, EXACT, tuple(out))


# ---------------------------------------------------------------------------
# determinants


def _require_square(a: Matrix):
    if a.rows != a.cols:
        raise LinAlgError(f"non-square matrix {a.shape}")


def _lcm(a: int, b: int) -> int:
    from math import gcd
    return a // gcd(a, b) * b


def _bareiss(grid: list[list], div) -> object:
    """Fraction-free elimination; ``div`` is the exact division of the domain."""
    n = len(grid)
    if n == 0:
        return 1
    m = [row[:] for row in grid]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        rowk = m[k]
        for i in range(k + 1, n):
            rowi = m[i]
            mik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = div(pivot * rowi[j] - mik * rowk[j], prev)
            rowi[k] = 0
        prev = pivot
    return m[n - 1][n - 1] if sign > 0 else -m[n - 1][n - 1]


def _exact_det(rows: Sequence[Sequence]) -> object:
    grid = [list(r) for r in rows]
    if any(isinstance(v, QI) for r in grid for v in r):
        return exact_scalar(_bareiss(grid, lambda x, y: x / y))
    # clear denominators row by row so the elimination runs over integers
    scale = Fraction(1)
    ints = []
    for r in grid:
        den = 1
        for v in r:
            den = _lcm(den, Fraction(v).denominator)
        ints.append([int(Fraction(v) * den) for v in r])
        scale *= den
    return Fraction(_bareiss(ints, lambda x, y: x // y)) / scale


def determinant(a: Matrix):
    _require_square(a)
    if a.backend == EXACT:
        return _exact_det(a._data)
    if a.rows == 0:
        return complex(1)
    lu, piv = scipy.linalg.lu_factor(a._data, check_finite=True)
    swaps = int(np.sum(piv != np.arange(a.rows)))
    d = complex(np.prod(np.diag(lu)))
    return -d if swaps % 2 else d


def minor_determinant(a: Matrix, i: int, j: int):
    _require_square(a)
    if not (0 <= i < a.rows and 0 <= j < a.cols):
        raise IndexError(f"minor index ({i}, {j}) out of range for {a.shape}")
    rows = [r for r in range(a.rows) if r != i]
    cols = [c for c in range(a.cols) if c != j]
    return determinant(a.submatrix(rows, cols))


def leibniz_determinant(a: Matrix):
    """Permutation expansion; only for tiny matrices (oracle use)."""
    _require_square(a)
    n = a.rows
    total = Fraction(0) if a.backend == EXACT else 0j
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for x in range(n) for y in range(x + 1, n) if perm[x] > perm[y])
        term = Fraction(1) if a.backend == EXACT else 1 + 0j
        for r in range(n):
            term = term * a[r, perm[r]]
        total = total + (-term if inv % 2 else term)
    return total


# ---------------------------------------------------------------------------
# elimination


def _rref(grid: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over the exact field; returns (rows, pivot cols)."""
    m = [row[:] for row in grid]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [exact_scalar(v * inv) for v in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                ri = m[i]
                rr = m[r]
                m[i] = [x - f * y if y != 0 else x for x, y in zip(ri, rr)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m[:r], pivots


def rank(a: Matrix, tol: float = TAU) -> int:
    if a.backend == EXACT:
        return len(_rref([list(r) for r in a._data])[1]) if a.rows and a.cols else 0
    if a.rows == 0 or a.cols == 0:
        return 0
    s = np.linalg.svd(a._data, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def invert(a: Matrix) -> Matrix:
    _require_square(a)
    n = a.rows
    if a.backend == FLOAT:
        lu, piv = scipy.linalg.lu_factor(a._data)
        if n and np.min(np.abs(np.diag(lu))) < PIVOT_TOL:
            raise SingularMatrixError("pivot below 1e-12")
        return Matrix.floating(scipy.linalg.lu_solve((lu, piv), np.eye(n)))
    one, zero = Fraction(1), Fraction(0)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(a._data)]
    red, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("determinant is zero")
    return Matrix(n, n, EXACT, tuple(tuple(row[n:]) for row in red))


def solve(a: Matrix, b: Sequence) -> tuple:
    """Solve a x = b for square nonsingular a."""
    _require_square(a)
    n = a.rows
    if a.backend == FLOAT:
        lu, piv = scipy.linalg.lu_factor(a._data)
        if n and np.min(np.abs(np.diag(lu))) < PIVOT_TOL:
            raise SingularMatrixError("pivot below 1e-12")
        return tuple(complex(v) for v in scipy.linalg.lu_solve((lu, piv), np.asarray(b, dtype=np.complex128)))
    aug = [list(row) + [exact_scalar(b[i])] for i, row in enumerate(a._data)]
    red, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("determinant is zero")
    return tuple(row[n] for row in red)


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class SubspaceBasis:
    """Basis of a subspace of K^ambient.

    EXACT bases are kept in reduced row echelon form (so equal subspaces have
    identical bases); FLOAT bases are orthonormal rows.
    """

    ambient: int
    backend: str
    vectors: tuple

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def as_matrix(self) -> Matrix:
        """Basis vectors as matrix rows."""
        if self.backend == FLOAT:
            arr = np.array(self.vectors, dtype=np.complex128).reshape((self.dim, self.ambient))
            return Matrix.floating(arr)
        if not self.vectors:
            return Matrix(0, self.ambient, EXACT, ())
        return Matrix.exact(self.vectors)

    def contains(self, v: Sequence, tol: float = TAU) -> bool:
        if self.backend == EXACT:
            if all(x == 0 for x in v):
                return True
            return span(self.ambient, EXACT, list(self.vectors) + [tuple(v)]).dim == self.dim
        vec = np.asarray(v, dtype=np.complex128)
        nrm = np.linalg.norm(vec)
        if nrm == 0:
            return True
        if self.dim == 0:
            return False
        basis = np.array(self.vectors, dtype=np.complex128)
        resid = vec - basis.T @ (basis.conj() @ vec)
        return bool(np.linalg.norm(resid) <= tol * max(1.0, nrm))


def span(ambient: int, backend: str, vectors: Iterable[Sequence], tol: float = TAU) -> SubspaceBasis:
    vecs = [tuple(v) for v in vectors]
    if backend == EXACT:
        vecs = [tuple(exact_scalar(x) for x in v) for v in vecs if any(x != 0 for x in v)]
        if not vecs:
            return SubspaceBasis(ambient, EXACT, ())
        red, _ = _rref([list(v) for v in vecs])
        return SubspaceBasis(ambient, EXACT, tuple(tuple(r) for r in red))
    if not vecs:
        return SubspaceBasis(ambient, FLOAT, ())
    arr = np.array(vecs, dtype=np.complex128)
    u, s, vh = np.linalg.svd(arr, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return SubspaceBasis(ambient, FLOAT, ())
    r = int(np.sum(s > tol * s[0]))
    return SubspaceBasis(ambient, FLOAT, tuple(tuple(complex(x) for x in row) for row in vh[:r]))


def nullspace(a: Matrix, tol: float = TAU) -> SubspaceBasis:
    """Basis of {v : a v = 0}."""
    n = a.cols
    if a.backend == EXACT:
        if a.rows == 0:
            return span(n, EXACT, [[Fraction(int(i == j)) for j in range(n)] for i in range(n)])
        red, pivots = _rref([list(r) for r in a._data])
        free = [c for c in range(n) if c not in set(pivots)]
        basis = []
        for f in free:
            v = [Fraction(0)] * n
            v[f] = Fraction(1)
            for row, pc in zip(red, pivots):
                v[pc] = -row[f]
            basis.append(v)
        return span(n, EXACT, basis)
    if a.rows == 0:
        return SubspaceBasis(n, FLOAT, tuple(tuple(complex(x) for x in row) for row in np.eye(n)))
    u, s, vh = np.linalg.svd(a._data, full_matrices=True)
    if s.size == 0 or s[0] == 0:
        r = 0
    else:
        r = int(np.sum(s > tol * s[0]))
    null = vh[r:].conj()
    return SubspaceBasis(n, FLOAT, tuple(tuple(complex(x) for x in row) for row in null))


def subspace_sum(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    return span(a.ambient, a.backend, list(a.vectors) + list(b.vectors))


def subspace_intersection(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    """a ∩ b via the kernel of [A^T | -B^T]."""
    if a.dim == 0 or b.dim == 0:
        return SubspaceBasis(a.ambient, a.backend, ())
    am = a.as_matrix().transpose()
    bm = b.as_matrix().transpose()
    if a.backend == EXACT:
        stacked = Matrix.exact([list(ra) + [-x for x in rb] for ra, rb in zip(am.tolist(), bm.tolist())])
    else:
        stacked = Matrix.floating(np.hstack([am.to_numpy(), -bm.to_numpy()]))
    ker = nullspace(stacked)
    vecs = [am.apply(v[: a.dim]) for v in ker.vectors]
    return span(a.ambient, a.backend, vecs)


def subspace_image(m: Matrix, s: SubspaceBasis) -> SubspaceBasis:
    return span(m.rows, s.backend, [m.apply(v) for v in s.vectors])


def subspace_equal(a: SubspaceBasis, b: SubspaceBasis) -> bool:
    if a.dim != b.dim:
        return False
    if a.backend == EXACT:
        return a.vectors == b.vectors
    return subspace_sum(a, b).dim == a.dim


# ---------------------------------------------------------------------------
# spectra


def spectral_radius(a: Matrix) -> float:
    _require_square(a)
    if a.backend == EXACT:
        raise LinAlgError("spectral_radius is unsupported on the EXACT backend; convert with to_float()")
    if a.rows == 0:
        return 0.0
    try:
        ev = scipy.linalg.eigvals(a._data)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise LinAlgError(f"eigenvalue iteration did not converge: {exc}") from exc
    return float(np.max(np.abs(ev)))


def eigenvalues(a: Matrix) -> np.ndarray:
    _require_square(a)
    if a.backend == EXACT:
        raise LinAlgError("eigenvalues are unsupported on the EXACT backend; convert with to_float()")
    return scipy.linalg.eigvals(a._data) if a.rows else np.zeros(0, dtype=np.complex128)
