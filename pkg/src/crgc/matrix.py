"""Dense matrices over a prime field.

Entries live in an ``int64`` numpy array reduced into ``[0, p)``.  Since
``p < 2**31`` every product of two entries fits in 63 bits, so each
multiply-accumulate step is reduced immediately and never overflows.
"""

from __future__ import annotations

import numpy as np

from .gf import DEFAULT_PRIME, FieldElement, FieldMismatchError, PrimeField


class SingularMatrixError(ArithmeticError):
    pass


def _as_field(field) -> PrimeField:
    if isinstance(field, PrimeField):
        return field
    return PrimeField(int(field))


class GfMatrix:
    """Immutable ``rows x cols`` matrix over ``F_p``."""

    __slots__ = ("_data", "field")

    def __init__(self, data, field=DEFAULT_PRIME):
        self.field = _as_field(field)
        arr = np.array(data, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
        arr %= self.field.p
        arr.setflags(write=False)
        self._data = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray, field: PrimeField) -> GfMatrix:
        # arr must already be reduced mod p and owned by the caller
        m = cls.__new__(cls)
        m.field = field
        arr.setflags(write=False)
        m._data = arr
        return m

    @classmethod
    def identity(cls, n: int, field=DEFAULT_PRIME) -> GfMatrix:
        return cls(np.eye(n, dtype=np.int64), field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field=DEFAULT_PRIME) -> GfMatrix:
        return cls(np.zeros((rows, cols), dtype=np.int64), field)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def T(self) -> GfMatrix:
        return GfMatrix._wrap(self._data.T.copy(), self.field)

    def __getitem__(self, idx):
        out = self._data[idx]
        if np.ndim(out) == 0:
            return FieldElement(int(out), self.field)
        if np.ndim(out) == 1:
            # a[i] / a[i, :] is a row; a[:, j] is a column
            is_col = isinstance(idx, tuple) and not isinstance(idx[0], (int, np.integer))
            out = out.reshape(-1, 1) if is_col else out.reshape(1, -1)
        return GfMatrix._wrap(np.array(out), self.field)

    def columns(self, idx) -> GfMatrix:
        return GfMatrix._wrap(self._data[:, idx].copy(), self.field)

    def tolist(self) -> list[list[int]]:
        return self._data.tolist()

    def _check(self, other: GfMatrix):
        if not isinstance(other, GfMatrix):
            raise TypeError(f"expected GfMatrix, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")

    def __matmul__(self, other: GfMatrix) -> GfMatrix:
        return matmul(self, other)

    def __add__(self, other: GfMatrix) -> GfMatrix:
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return GfMatrix._wrap((self._data + other._data) % self.p, self.field)

    def __sub__(self, other: GfMatrix) -> GfMatrix:
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        return GfMatrix._wrap((self._data - other._data) % self.p, self.field)

    def __eq__(self, other):
        if not isinstance(other, GfMatrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self._data, other._data)

    def __hash__(self):
        return hash((self.field.p, self.shape, self._data.tobytes()))

    def __repr__(self):
        return f"GfMatrix({self.tolist()}, p={self.p})"

    def rank(self) -> int:
        return rank(self)

    def det(self) -> FieldElement:
        return det(self)

    def inverse(self) -> GfMatrix:
        return inverse(self)


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product of two reduced int64 arrays, reduced mod ``p``."""
    if a.shape[-1] != b.shape[-2]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if p < 2**26:
        # worst-case sum of p**2 terms stays below 2**63 for inner dims this size
        limit = (2**63 - 1) // ((p - 1) ** 2 or 1)
        if a.shape[-1] <= limit:
            return (a @ b) % p
    out = np.zeros(a.shape[:-1] + b.shape[-1:], dtype=np.int64)
    for j in range(a.shape[-1]):
        out = (out + a[..., :, j:j + 1] * b[..., j:j + 1, :]) % p
    return out


def matmul(a: GfMatrix, b: GfMatrix) -> GfMatrix:
    a._check(b)
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    return GfMatrix._wrap(matmul_mod(a.data, b.data, a.p), a.field)


def hstack(mats) -> GfMatrix:
    mats = list(mats)
    for m in mats[1:]:
        mats[0]._check(m)
    return GfMatrix._wrap(np.hstack([m.data for m in mats]), mats[0].field)


def vstack(mats) -> GfMatrix:
    mats = list(mats)
    for m in mats[1:]:
        mats[0]._check(m)
    return GfMatrix._wrap(np.vstack([m.data for m in mats]), mats[0].field)


def row_reduce(arr: np.ndarray, p: int) -> tuple[np.ndarray, list[int], int]:
    """Reduced row-echelon form of ``arr`` over F_p.

    Returns ``(rref, pivot_columns, det_factor)`` where ``det_factor`` is the
    product of pivots times the sign of the row permutation, i.e. the
    determinant when ``arr`` is square and nonsingular.
    """
    a = np.array(arr, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    det_factor = 1
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
            det_factor = -det_factor
        pv = int(a[r, c])
        det_factor = det_factor * pv % p
        a[r] = a[r] * pow(pv, -1, p) % p
        factors = a[:, c].copy()
        factors[r] = 0
        nzr = np.flatnonzero(factors)
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(factors[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots, det_factor % p


def rank(a: GfMatrix) -> int:
    if a.rows == 0 or a.cols == 0:
        return 0
    return len(row_reduce(a.data, a.p)[1])


def det(a: GfMatrix) -> FieldElement:
    if a.rows != a.cols:
        raise ValueError(f"determinant of non-square {a.shape} matrix")
    if a.rows == 0:
        return a.field.one
    _, pivots, factor = row_reduce(a.data, a.p)
    if len(pivots) < a.rows:
        return a.field.zero
    return a.field(factor)


def inverse(a: GfMatrix) -> GfMatrix:
    if a.rows != a.cols:
        raise ValueError(f"inverse of non-square {a.shape} matrix")
    n = a.rows
    aug = np.hstack([a.data, np.eye(n, dtype=np.int64)])
    red, pivots, _ = row_reduce(aug, a.p)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError(f"{n}x{n} matrix is singular over F_{a.p}")
    return GfMatrix._wrap(red[:, n:].copy(), a.field)


def solve(a: GfMatrix, b: GfMatrix) -> GfMatrix:
    """Solve ``a @ x = b`` for square nonsingular ``a``."""
    a._check(b)
    if a.rows != a.cols or b.rows != a.rows:
        raise ValueError(f"cannot solve {a.shape} x = {b.shape}")
    n = a.rows
    red, pivots, _ = row_reduce(np.hstack([a.data, b.data]), a.p)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError(f"{n}x{n} system is singular over F_{a.p}")
    return GfMatrix._wrap(red[:, n:].copy(), a.field)


def random_array(rng: np.random.Generator, shape, p: int) -> np.ndarray:
    return rng.integers(0, p, size=shape, dtype=np.int64)


def random_matrix(rows: int, cols: int, field=DEFAULT_PRIME, seed=None) -> GfMatrix:
    """Uniform random matrix; identical seeds give identical matrices."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    field = _as_field(field)
    rng = np.random.default_rng(seed)
    return GfMatrix._wrap(random_array(rng, (rows, cols), field.p), field)


def batch_nonsingular(stack: np.ndarray, p: int) -> np.ndarray:
    """Nonsingularity of each square matrix in an ``(N, n, n)`` stack.

    Vectorised Gaussian elimination across the batch; a matrix is flagged
    singular as soon as some column has no pivot at or below the diagonal.
    """
    a = np.array(stack, dtype=np.int64) % p
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"expected (N, n, n) stack, got {a.shape}")
    N, n, _ = a.shape
    ok = np.ones(N, dtype=bool)
    idx = np.arange(N)
    for c in range(n):
        below = a[:, c:, c] != 0
        has = below.any(axis=1)
        ok &= has
        piv = c + np.argmax(below, axis=1)
        swap = piv != c
        if swap.any():
            s = idx[swap]
            rows_c = a[s, c].copy()
            a[s, c] = a[s, piv[swap]]
            a[s, piv[swap]] = rows_c
        pv = a[:, c, c]
        # 0 for singular-so-far matrices; their rows just stop changing
        inv = np.array([pow(int(v), -1, p) if v else 0 for v in pv], dtype=np.int64) \
            if N <= 64 else _batch_inv(pv, p)
        a[:, c] = a[:, c] * inv[:, None] % p
        f = a[:, c + 1:, c]
        a[:, c + 1:] = (a[:, c + 1:] - f[:, :, None] * a[:, c, None, :]) % p
    return ok


def _batch_inv(v: np.ndarray, p: int) -> np.ndarray:
    # Fermat: v**(p-2); zeros map to zero
    result = np.ones_like(v)
    base = v % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return np.where(v % p == 0, 0, result)
