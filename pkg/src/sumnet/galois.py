"""Exact linear algebra over prime fields F_q.

Matrices are thin immutable wrappers around int64 numpy arrays.  Every
product is reduced mod q; q is capped at ``MAX_MODULUS`` so a dot product of
up to 2**15 terms cannot overflow int64 before reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_MODULUS = 1 << 24


class NotInvertibleError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    c = max(n + 1, 2)
    while not is_prime(c):
        c += 1
    return c


@dataclass(frozen=True)
class PrimeField:
    q: int

    def __post_init__(self) -> None:
        if not isinstance(self.q, (int, np.integer)) or not is_prime(int(self.q)):
            raise ValueError(f"field modulus must be prime, got {self.q!r}")
        if self.q >= MAX_MODULUS:
            raise ValueError(f"field modulus {self.q} exceeds {MAX_MODULUS}")

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(int(a), -1, self.q)

    def __repr__(self) -> str:
        return f"F_{self.q}"


class FieldMatrix:
    """Immutable rows x cols matrix over a prime field."""

    __slots__ = ("field", "_a")

    def __init__(self, entries, field: PrimeField | int):
        if isinstance(field, int):
            field = PrimeField(field)
        a = np.array(entries, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
        a %= field.q
        a.setflags(write=False)
        self.field = field
        self._a = a

    @classmethod
    def _wrap(cls, a: np.ndarray, field: PrimeField) -> FieldMatrix:
        # internal fast path; caller guarantees 0 <= a < q
        m = object.__new__(cls)
        a.setflags(write=False)
        m.field = field
        m._a = a
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int, field: PrimeField | int) -> FieldMatrix:
        f = field if isinstance(field, PrimeField) else PrimeField(field)
        return cls._wrap(np.zeros((rows, cols), dtype=np.int64), f)

    @classmethod
    def identity(cls, n: int, field: PrimeField | int) -> FieldMatrix:
        f = field if isinstance(field, PrimeField) else PrimeField(field)
        return cls._wrap(np.eye(n, dtype=np.int64), f)

    @classmethod
    def column(cls, values: Sequence[int], field: PrimeField | int) -> FieldMatrix:
        return cls(np.array(values, dtype=np.int64).reshape(-1, 1), field)

    @classmethod
    def random(cls, rows: int, cols: int, field: PrimeField | int, rng: np.random.Generator) -> FieldMatrix:
        f = field if isinstance(field, PrimeField) else PrimeField(field)
        return cls._wrap(rng.integers(0, f.q, size=(rows, cols), dtype=np.int64), f)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._a

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self._a.ravel())

    def tolist(self) -> list[list[int]]:
        return self._a.tolist()

    @property
    def T(self) -> FieldMatrix:
        return FieldMatrix._wrap(self._a.T.copy(), self.field)

    def is_zero(self) -> bool:
        return not self._a.any()

    def _check_field(self, other: FieldMatrix) -> None:
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")

    def __matmul__(self, other: FieldMatrix) -> FieldMatrix:
        self._check_field(other)
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch: {self.shape} @ {other.shape}")
        return FieldMatrix._wrap((self._a @ other._a) % self.q, self.field)

    def __add__(self, other: FieldMatrix) -> FieldMatrix:
        self._check_field(other)
        if self.shape != other.shape:
            raise ValueError(f"dimension mismatch: {self.shape} + {other.shape}")
        return FieldMatrix._wrap((self._a + other._a) % self.q, self.field)

    def __sub__(self, other: FieldMatrix) -> FieldMatrix:
        self._check_field(other)
        if self.shape != other.shape:
            raise ValueError(f"dimension mismatch: {self.shape} - {other.shape}")
        return FieldMatrix._wrap((self._a - other._a) % self.q, self.field)

    def __neg__(self) -> FieldMatrix:
        return FieldMatrix._wrap((-self._a) % self.q, self.field)

    def scale(self, c: int) -> FieldMatrix:
        return FieldMatrix._wrap((self._a * (c % self.q)) % self.q, self.field)

    def __getitem__(self, key) -> FieldMatrix:
        sub = self._a[key]
        if sub.ndim == 0:
            sub = sub.reshape(1, 1)
        elif sub.ndim == 1:
            sub = sub.reshape(1, -1)
        return FieldMatrix._wrap(sub.copy(), self.field)

    def select_rows(self, idx: Iterable[int]) -> FieldMatrix:
        return FieldMatrix._wrap(self._a[list(idx), :].reshape(-1, self.cols), self.field)

    def select_cols(self, idx: Iterable[int]) -> FieldMatrix:
        return FieldMatrix._wrap(self._a[:, list(idx)].reshape(self.rows, -1), self.field)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self) -> int:
        return hash((self.field.q, self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"FieldMatrix({self.tolist()}, q={self.q})"


def hstack(mats: Sequence[FieldMatrix], rows: int | None = None, field: PrimeField | None = None) -> FieldMatrix:
    """Horizontal concatenation; ``rows``/``field`` give the shape of an empty result."""
    if not mats:
        if rows is None or field is None:
            raise ValueError("empty hstack needs rows and field")
        return FieldMatrix.zeros(rows, 0, field)
    f = mats[0].field
    for m in mats[1:]:
        m._check_field(mats[0])
        if m.rows != mats[0].rows:
            raise ValueError("dimension mismatch in hstack")
    return FieldMatrix._wrap(np.hstack([m.array for m in mats]), f)


def vstack(mats: Sequence[FieldMatrix], cols: int | None = None, field: PrimeField | None = None) -> FieldMatrix:
    if not mats:
        if cols is None or field is None:
            raise ValueError("empty vstack needs cols and field")
        return FieldMatrix.zeros(0, cols, field)
    f = mats[0].field
    for m in mats[1:]:
        m._check_field(mats[0])
        if m.cols != mats[0].cols:
            raise ValueError("dimension mismatch in vstack")
    return FieldMatrix._wrap(np.vstack([m.array for m in mats]), f)


def block_diag(blocks: Sequence[FieldMatrix]) -> FieldMatrix:
    f = blocks[0].field
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for b in blocks:
        b._check_field(blocks[0])
        out[r:r + b.rows, c:c + b.cols] = b.array
        r += b.rows
        c += b.cols
    return FieldMatrix._wrap(out, f)


def _rref(a: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with first-nonzero pivoting."""
    r = a.copy()
    n_rows, n_cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(n_cols):
        if row == n_rows:
            break
        nz = np.flatnonzero(r[row:, col])
        if nz.size == 0:
            continue
        p = row + int(nz[0])
        if p != row:
            r[[row, p]] = r[[p, row]]
        inv = pow(int(r[row, col]), -1, q)
        if inv != 1:
            r[row] = (r[row] * inv) % q
        factors = r[:, col].copy()
        factors[row] = 0
        hit = np.flatnonzero(factors)
        if hit.size:
            r[hit] = (r[hit] - np.outer(factors[hit], r[row])) % q
        pivots.append(col)
        row += 1
    return r, pivots


def rref(m: FieldMatrix) -> tuple[FieldMatrix, list[int]]:
    r, piv = _rref(m.array, m.q)
    return FieldMatrix._wrap(r, m.field), piv


def rank(m: FieldMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(_rref(m.array, m.q)[1])


def nullspace(m: FieldMatrix) -> FieldMatrix:
    """Basis of the right null space {x : m x = 0}, one basis vector per column."""
    q = m.q
    r, piv = _rref(m.array, q)
    free = [c for c in range(m.cols) if c not in set(piv)]
    basis = np.zeros((m.cols, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        basis[fc, j] = 1
        for i, pc in enumerate(piv):
            basis[pc, j] = (-r[i, fc]) % q
    return FieldMatrix._wrap(basis, m.field)


def rowspace_contained(a: FieldMatrix, b: FieldMatrix) -> bool:
    """True iff every row of ``a`` lies in the row space of ``b``."""
    if a.cols != b.cols:
        raise ValueError(f"dimension mismatch: {a.cols} vs {b.cols} columns")
    if a.rows == 0 or a.is_zero():
        return True
    return rank(vstack([a, b])) == rank(b)


def span_intersection_trivial(a: FieldMatrix, b: FieldMatrix) -> bool:
    """True iff the column spaces of ``a`` and ``b`` meet only in 0."""
    if a.rows != b.rows:
        raise ValueError(f"dimension mismatch: {a.rows} vs {b.rows} rows")
    return rank(hstack([a, b])) == rank(a) + rank(b)


def invert(m: FieldMatrix) -> FieldMatrix:
    if m.rows != m.cols:
        raise ValueError(f"cannot invert non-square {m.shape} matrix")
    n = m.rows
    aug = np.hstack([m.array, np.eye(n, dtype=np.int64)])
    r, piv = _rref(aug, m.q)
    if piv[:n] != list(range(n)):
        raise NotInvertibleError("matrix is not invertible")
    return FieldMatrix._wrap(r[:, n:].copy(), m.field)


def solve_right(g: FieldMatrix, target: FieldMatrix) -> FieldMatrix | None:
    """Find D with g @ D == target, or None if some target column is outside col(g)."""
    if g.rows != target.rows:
        raise ValueError(f"dimension mismatch: {g.rows} vs {target.rows} rows")
    g._check_field(target)
    k = g.cols
    aug = np.hstack([g.array, target.array])
    r, piv = _rref(aug, g.q)
    if piv and piv[-1] >= k:
        return None
    d = np.zeros((k, target.cols), dtype=np.int64)
    for i, pc in enumerate(piv):
        d[pc] = r[i, k:]
    return FieldMatrix._wrap(d, g.field)


def random_invertible(n: int, field: PrimeField, rng: np.random.Generator) -> FieldMatrix:
    while True:
        m = FieldMatrix.random(n, n, field, rng)
        if rank(m) == n:
            return m
