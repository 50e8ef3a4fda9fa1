"""Exact linear algebra over prime fields F_p.

Matrices are immutable numpy int64 arrays with entries reduced mod p.
Subspaces are canonically represented by their reduced row echelon basis,
which makes enumeration, hashing and complement choices deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import ContainmentError, DimensionMismatchError

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    f = 49
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def next_prime(n: int) -> int:
    n += 1
    while not is_prime(n):
        n += 1
    return n


def next_prime_list(base: Sequence[int], count: int) -> list[int]:
    """The `count` smallest primes drawn from `base`, extended with the
    next primes when `base` is too short."""
    primes = sorted(set(base))
    for q in primes:
        if not is_prime(q):
            raise ValueError(f"{q} is not prime")
    while len(primes) < count:
        primes.append(next_prime(primes[-1] if primes else 1))
    return primes[:count]


@lru_cache(maxsize=None)
def inverse_table(p: int) -> np.ndarray:
    """inv[x] = x^-1 mod p for 1 <= x < p; inv[0] = 0."""
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, p - 2, p)
    inv.setflags(write=False)
    return inv


class FpMatrix:
    """Immutable matrix over F_p; entries are residues in [0, p)."""

    __slots__ = ("p", "a", "_hash")

    def __init__(self, p: int, a: np.ndarray | Sequence[Sequence[int]]):
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        arr = np.asarray(a, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("matrix data must be 2-dimensional")
        arr = np.mod(arr, p)
        arr.setflags(write=False)
        self.p = p
        self.a = arr
        self._hash = None

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @staticmethod
    def zeros(p: int, rows: int, cols: int) -> "FpMatrix":
        return FpMatrix(p, np.zeros((rows, cols), dtype=np.int64))

    @staticmethod
    def identity(p: int, n: int) -> "FpMatrix":
        return FpMatrix(p, np.eye(n, dtype=np.int64))

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        if self.p != other.p:
            raise DimensionMismatchError("mixed moduli")
        return FpMatrix(self.p, (self.a @ other.a) % self.p)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        return FpMatrix(self.p, self.a + other.a)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        return FpMatrix(self.p, self.a - other.a)

    def scale(self, c: int) -> "FpMatrix":
        return FpMatrix(self.p, self.a * (c % self.p))

    def transpose(self) -> "FpMatrix":
        return FpMatrix(self.p, self.a.T)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FpMatrix)
            and self.p == other.p
            and self.a.shape == other.a.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.p, self.a.shape, self.a.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, {self.a.tolist()})"


def _rref_array(a: np.ndarray, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Row-reduce a copy of `a` mod p; returns (rref rows without zero rows, pivot cols)."""
    m = np.mod(a, p).astype(np.int64)
    rows, cols = m.shape
    inv = inverse_table(p)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            m[[r, k]] = m[[k, r]]
        m[r] = (m[r] * inv[m[r, c]]) % p
        other = np.nonzero(m[:, c])[0]
        other = other[other != r]
        if other.size:
            m[other] = (m[other] - np.outer(m[other, c], m[r])) % p
        pivots.append(c)
        r += 1
    return m[:r], tuple(pivots)


def rref(m: FpMatrix) -> tuple[FpMatrix, tuple[int, ...]]:
    red, piv = _rref_array(m.a, m.p)
    return FpMatrix(m.p, red), piv


def rank(m: FpMatrix) -> int:
    return len(_rref_array(m.a, m.p)[1])


@dataclass(frozen=True)
class SubspaceBasis:
    """A subspace of F_p^n given by its RREF basis (rows = basis vectors)."""

    ambient_dim: int
    basis: FpMatrix

    def __post_init__(self):
        if self.basis.cols != self.ambient_dim:
            raise DimensionMismatchError("basis width != ambient dimension")

    @property
    def p(self) -> int:
        return self.basis.p

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def pivots(self) -> tuple[int, ...]:
        rows = self.basis.a
        return tuple(int(np.nonzero(rows[i])[0][0]) for i in range(rows.shape[0]))

    def contains_vector(self, v: np.ndarray) -> bool:
        v = np.mod(np.asarray(v, dtype=np.int64), self.p)
        r = self.reduce_vector(v)
        return not r.any()

    def reduce_vector(self, v: np.ndarray) -> np.ndarray:
        """Subtract the basis projection; zero iff v lies in the subspace."""
        v = np.mod(np.asarray(v, dtype=np.int64), self.p)
        rows = self.basis.a
        for i, c in enumerate(self.pivots):
            if v[c]:
                v = (v - v[c] * rows[i]) % self.p
        return v

    def contains(self, other: "SubspaceBasis") -> bool:
        return all(self.contains_vector(row) for row in other.basis.a)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SubspaceBasis)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))


def subspace_from_rows(p: int, ambient_dim: int, rows) -> SubspaceBasis:
    arr = np.asarray(list(rows), dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, ambient_dim)
    red, _ = _rref_array(arr, p)
    return SubspaceBasis(ambient_dim, FpMatrix(p, red))


def full_space(p: int, n: int) -> SubspaceBasis:
    return SubspaceBasis(n, FpMatrix.identity(p, n))


def zero_space(p: int, n: int) -> SubspaceBasis:
    return SubspaceBasis(n, FpMatrix(p, np.zeros((0, n), dtype=np.int64)))


def kernel_basis(m: FpMatrix) -> SubspaceBasis:
    """RREF basis of the right kernel {v : m v = 0}."""
    red, piv = _rref_array(m.a, m.p)
    n = m.cols
    free = [c for c in range(n) if c not in piv]
    vecs = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        vecs[k, f] = 1
        for i, c in enumerate(piv):
            vecs[k, c] = (-red[i, f]) % m.p
    return subspace_from_rows(m.p, n, vecs)


def complement_in(sub: SubspaceBasis, ambient: SubspaceBasis) -> SubspaceBasis:
    """Deterministic complement C with sub + C = ambient (direct sum).

    Rule: keep the ambient basis vectors, in index order, whose pivot column
    is not already a pivot of `sub`. Because pivots of a subspace are always
    pivots of any enclosing RREF basis, this yields a complement of the
    right dimension, bit-identically across runs.
    """
    if sub.ambient_dim != ambient.ambient_dim or sub.p != ambient.p:
        raise DimensionMismatchError("subspace/ambient shape mismatch")
    if not ambient.contains(sub):
        raise ContainmentError("sub is not contained in ambient")
    taken = set(sub.pivots)
    rows = [row for row, c in zip(ambient.basis.a, ambient.pivots) if c not in taken]
    arr = np.asarray(rows, dtype=np.int64).reshape(len(rows), sub.ambient_dim)
    return SubspaceBasis(sub.ambient_dim, FpMatrix(sub.p, arr))


def gaussian_binomial(n: int, k: int, p: int) -> int:
    """Number of k-dimensional subspaces of F_p^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (k - i) - 1
    assert num % den == 0
    return num // den


def enumerate_subspaces(n: int, k: int, p: int) -> Iterator[SubspaceBasis]:
    """All k-dimensional subspaces of F_p^n, each exactly once.

    Iterates over RREF pivot patterns (k-subsets of columns in lex order),
    then over all assignments of the free entries.
    """
    if k < 0 or k > n:
        raise DimensionMismatchError(f"sub-dim {k} out of range for ambient {n}")
    if k == 0:
        yield zero_space(p, n)
        return
    for piv in itertools.combinations(range(n), k):
        free_pos = [
            (r, c)
            for r in range(k)
            for c in range(piv[r] + 1, n)
            if c not in piv
        ]
        base = np.zeros((k, n), dtype=np.int64)
        for r, c in enumerate(piv):
            base[r, c] = 1
        for vals in itertools.product(range(p), repeat=len(free_pos)):
            m = base.copy()
            for (r, c), v in zip(free_pos, vals):
                m[r, c] = v
            yield SubspaceBasis(n, FpMatrix(p, m))


def subspace_arrays(n: int, k: int, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All k-dimensional subspaces of F_p^n as stacked arrays.

    Returns (bases, pivots, frees): RREF bases (S, k, n), pivot columns
    (S, k) and non-pivot columns (S, n - k), in the same order as
    enumerate_subspaces. Vectorized per pivot pattern, so large
    Grassmannians stay cheap.
    """
    if k < 0 or k > n:
        raise DimensionMismatchError(f"sub-dim {k} out of range for ambient {n}")
    total = gaussian_binomial(n, k, p)
    bases = np.zeros((total, k, n), dtype=np.int64)
    pivots = np.zeros((total, k), dtype=np.int64)
    frees = np.zeros((total, n - k), dtype=np.int64)
    pos = 0
    for piv in itertools.combinations(range(n), k):
        free_pos = [
            (r, c)
            for r in range(k)
            for c in range(piv[r] + 1, n)
            if c not in piv
        ]
        m = p ** len(free_pos)
        block = np.zeros((m, k, n), dtype=np.int64)
        for r, c in enumerate(piv):
            block[:, r, c] = 1
        ids = np.arange(m, dtype=np.int64)
        for t, (r, c) in enumerate(free_pos):
            block[:, r, c] = (ids // p ** (len(free_pos) - 1 - t)) % p
        bases[pos:pos + m] = block
        pivots[pos:pos + m] = np.asarray(piv, dtype=np.int64)
        frees[pos:pos + m] = np.asarray(
            [c for c in range(n) if c not in piv], dtype=np.int64
        )
        pos += m
    assert pos == total
    return bases, pivots, frees


def enumerate_superspaces(w: SubspaceBasis, k: int) -> Iterator[SubspaceBasis]:
    """All k-dimensional subspaces of the ambient space containing w.

    Lifts subspaces of the quotient by w through the deterministic
    complement, so the count is a Gaussian binomial in the quotient.
    """
    n, p, d0 = w.ambient_dim, w.p, w.dim
    if k < d0 or k > n:
        return
    if k == d0:
        yield w
        return
    comp = complement_in(w, full_space(p, n))  # rows e_f, quotient coordinates
    crows = comp.basis.a
    for q in enumerate_subspaces(n - d0, k - d0, p):
        lifted = (q.basis.a @ crows) % p
        yield subspace_from_rows(p, n, np.vstack([w.basis.a, lifted]))


def coordinates_in(space: SubspaceBasis, vectors: np.ndarray) -> np.ndarray:
    """Coordinates of row `vectors` in the RREF basis of `space`.

    For an RREF basis the coordinate along row i is just the entry at the
    i-th pivot column. Raises if a vector lies outside the space.
    """
    v = np.mod(np.asarray(vectors, dtype=np.int64), space.p)
    coords = v[:, list(space.pivots)] if space.dim else np.zeros((v.shape[0], 0), dtype=np.int64)
    recon = (coords @ space.basis.a) % space.p if space.dim else np.zeros_like(v)
    if not np.array_equal(recon, v):
        raise ContainmentError("vector not in subspace")
    return coords


def rank_batch(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks mod p of a batch of matrices, shape (B, r, c) -> (B,).

    Vectorized Gaussian elimination: all matrices advance one pivot column
    per step. Entries must already be reduced mod p (any int dtype).
    """
    dt = np.int16 if p * p < 32000 else np.int64
    a = np.mod(mats, p).astype(dt, copy=True)
    if a.ndim != 3:
        raise DimensionMismatchError("rank_batch expects a 3d array")
    B, r, c = a.shape
    out = np.zeros(B, dtype=np.int64)
    if B == 0 or r == 0 or c == 0:
        return out
    inv = inverse_table(p).astype(dt)
    piv = np.zeros(B, dtype=np.int64)
    rows = np.arange(r)
    maxrank = min(r, c)
    for col in range(c):
        if (piv == maxrank).all():
            break
        colv = a[:, :, col]
        active = rows[None, :] >= piv[:, None]
        nz = (colv != 0) & active
        has = nz.any(axis=1)
        idx = np.flatnonzero(has)
        if idx.size == 0:
            continue
        first = np.argmax(nz[idx], axis=1)
        pi = piv[idx]
        tmp = a[idx, first, :].copy()
        a[idx, first, :] = a[idx, pi, :]
        a[idx, pi, :] = tmp
        prow = (tmp * inv[tmp[:, col]][:, None]) % p
        a[idx, pi, :] = prow
        sub = a[idx]
        # products stay within dt: (p-1)^2 < 32000 on the int16 path
        factors = np.where(rows[None, :] > pi[:, None], sub[:, :, col], 0)
        sub = (sub - factors[:, :, None] * prow[:, None, :]) % p
        a[idx] = sub
        piv[idx] = pi + 1
    out[:] = piv
    return out
