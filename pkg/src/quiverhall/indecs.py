"""Representations over F_p, Hom computations, and the indecomposables
attached to positive roots together with their directed order."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InternalInvariantError,
    NotARootError,
    SearchExhaustedError,
)
from .gflinalg import FpMatrix, kernel_basis, rank
from .quiver import DimVec, QuiverSpec, check_dim

SCAN_LIMIT = 1 << 16
SAMPLE_LIMIT = 10 ** 6


@dataclass(frozen=True)
class Rep:
    """A point of the representation space: one matrix per arrow.

    For an arrow i -> j the matrix has shape d_j x d_i and acts on column
    vectors.
    """

    quiver: QuiverSpec
    p: int
    dim: DimVec
    mats: tuple[FpMatrix, ...]

    def __post_init__(self):
        check_dim(self.quiver, self.dim)
        if len(self.mats) != len(self.quiver.arrows):
            raise DimensionMismatchError("one matrix per arrow required")
        for (i, j), m in zip(self.quiver.arrow_indices, self.mats):
            if m.rows != self.dim[j] or m.cols != self.dim[i] or m.p != self.p:
                raise DimensionMismatchError(
                    f"arrow matrix shape {m.rows}x{m.cols} does not match ({self.dim[j]},{self.dim[i]})"
                )

    @property
    def total_dim(self) -> int:
        return sum(self.dim)


def zero_rep(quiver: QuiverSpec, d: DimVec, p: int) -> Rep:
    d = check_dim(quiver, d)
    mats = tuple(
        FpMatrix.zeros(p, d[j], d[i]) for i, j in quiver.arrow_indices
    )
    return Rep(quiver, p, d, mats)


def hom_constraint_parts(x_dim: DimVec, y_dim: DimVec, quiver: QuiverSpec):
    """Index layout for the linear system cutting out Hom(X, Y).

    Unknowns are the vertex maps f_i (shape y_i x x_i), flattened row-major
    and concatenated in vertex order. For each arrow a: i -> j the block of
    equations is f_j X_a - Y_a f_i = 0, flattened row-major. Returns
    (col_offsets, row_offsets, n_cols, n_rows).
    """
    n = len(x_dim)
    col_off = [0] * (n + 1)
    for i in range(n):
        col_off[i + 1] = col_off[i] + y_dim[i] * x_dim[i]
    row_off = [0]
    for i, j in quiver.arrow_indices:
        row_off.append(row_off[-1] + y_dim[j] * x_dim[i])
    return col_off, row_off, col_off[-1], row_off[-1]


def commutation_matrix_parts(X: Rep, y_dim: DimVec):
    """Split the Hom(X, -) system into the part using X's matrices and the
    coefficient layout of the part using the target's matrices.

    For target Y the full system is A + B(Y) where A comes from f_j X_a and
    B(Y) from -Y_a f_i; B is linear in Y's entries, which lets censuses
    assemble batches of systems cheaply. Returns (A, assemble) where
    assemble(mats) adds the -Y_a f_i terms for concrete target matrices.
    """
    q = X.quiver
    col_off, row_off, n_cols, n_rows = hom_constraint_parts(X.dim, y_dim, q)
    A = np.zeros((n_rows, n_cols), dtype=np.int64)
    p = X.p
    for a, (i, j) in enumerate(q.arrow_indices):
        Xa = X.mats[a].a
        yj, xi = y_dim[j], X.dim[i]
        base_r = row_off[a]
        # (f_j X_a)[r, c] = sum_k f_j[r, k] X_a[k, c]
        for r in range(yj):
            for c in range(xi):
                row = base_r + r * xi + c
                for k in range(X.dim[j]):
                    if Xa[k, c]:
                        A[row, col_off[j] + r * X.dim[j] + k] += Xa[k, c]
    A %= p

    def assemble(mats: tuple[FpMatrix, ...]) -> np.ndarray:
        B = A.copy()
        for a, (i, j) in enumerate(q.arrow_indices):
            Ya = mats[a].a
            yj, xi = y_dim[j], X.dim[i]
            base_r = row_off[a]
            # -(Y_a f_i)[r, c] = -sum_k Y_a[r, k] f_i[k, c]
            for r in range(yj):
                for c in range(xi):
                    row = base_r + r * xi + c
                    for k in range(y_dim[i]):
                        if Ya[r, k]:
                            B[row, col_off[i] + k * xi + c] -= Ya[r, k]
        return B % p

    return A, assemble


def commutation_matrix(X: Rep, Y: Rep) -> FpMatrix:
    """Matrix of f -> (f_j X_a - Y_a f_i)_a on the graded Hom space."""
    if X.quiver is not Y.quiver and X.quiver != Y.quiver:
        raise DimensionMismatchError("mixed quivers")
    if X.p != Y.p:
        raise DimensionMismatchError("mixed primes")
    _, assemble = commutation_matrix_parts(X, Y.dim)
    return FpMatrix(X.p, assemble(Y.mats))


def hom_dim(X: Rep, Y: Rep) -> int:
    """dim Hom(X, Y) as the kernel dimension of the commutation map."""
    m = commutation_matrix(X, Y)
    return m.cols - rank(m)


def end_dim(X: Rep) -> int:
    return hom_dim(X, X)


def _rep_space_size(quiver: QuiverSpec, d: DimVec, p: int) -> int:
    e = sum(d[i] * d[j] for i, j in quiver.arrow_indices)
    return p ** e


def _rep_from_flat(quiver: QuiverSpec, d: DimVec, p: int, flat) -> Rep:
    mats = []
    pos = 0
    for i, j in quiver.arrow_indices:
        k = d[j] * d[i]
        block = np.asarray(flat[pos:pos + k], dtype=np.int64).reshape(d[j], d[i])
        mats.append(FpMatrix(p, block))
        pos += k
    return Rep(quiver, p, d, tuple(mats))


def build_indecomposable(quiver: QuiverSpec, root: DimVec, p: int, seed: int = 0) -> Rep:
    """A representative with End = k for the given positive root.

    Scans the whole representation space when it is small, otherwise draws
    seeded uniform samples; the dense orbit is rational over every prime
    field, so a point with one-dimensional endomorphism ring exists.
    """
    from .quiver import euler_form, positive_roots

    root = check_dim(quiver, root)
    if root not in set(positive_roots(quiver)):
        raise NotARootError(f"{root} is not a positive root")
    coords = sum(root[i] * root[j] for i, j in quiver.arrow_indices)
    if p ** coords <= SCAN_LIMIT:
        for flat in itertools.product(range(p), repeat=coords):
            rep = _rep_from_flat(quiver, root, p, flat)
            if end_dim(rep) == 1:
                return rep
        raise InternalInvariantError(f"no end-dim-1 point found for root {root} at p={p}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, p, *root]))
    for _ in range(SAMPLE_LIMIT):
        flat = rng.integers(0, p, size=coords)
        rep = _rep_from_flat(quiver, root, p, flat)
        if end_dim(rep) == 1:
            return rep
    raise SearchExhaustedError(
        f"no end-dim-1 point for root {root} at p={p} after {SAMPLE_LIMIT} samples"
    )


def directed_order(indecs: list[Rep], tie_break: str = "lex") -> list[int]:
    """Topological order of the digraph s -> t iff Hom(I_s, I_t) != 0.

    Returns a permutation (list of original indices). In the result, all
    nonzero Hom spaces point forward. Ties are broken by lexicographic
    dimension vector (`tie_break="revlex"` reverses that choice, giving an
    alternative valid order when one exists).
    """
    n = len(indecs)
    homs = [[0] * n for _ in range(n)]
    for s in range(n):
        for t in range(n):
            if s != t:
                homs[s][t] = hom_dim(indecs[s], indecs[t])
    indeg = [0] * n
    for s in range(n):
        for t in range(n):
            if homs[s][t]:
                indeg[t] += 1
    reverse = tie_break == "revlex"
    order: list[int] = []
    remaining = set(range(n))
    while remaining:
        avail = [s for s in remaining if indeg[s] == 0]
        if not avail:
            raise InternalInvariantError("hom digraph has a cycle; category not directed")
        pick = (max if reverse else min)(avail, key=lambda s: indecs[s].dim)
        order.append(pick)
        remaining.discard(pick)
        for t in range(n):
            if homs[pick][t] and t in remaining:
                indeg[t] -= 1
    return order


@dataclass(frozen=True)
class IndecTable:
    """Indecomposables at one prime, in directed order, with Hom dimensions.

    hom[s][t] = dim Hom(I_s, I_t); zero below the diagonal.
    """

    quiver: QuiverSpec
    p: int
    indecs: tuple[Rep, ...]
    roots: tuple[DimVec, ...]
    hom: tuple[tuple[int, ...], ...]

    @property
    def nu(self) -> int:
        return len(self.indecs)

    def validate(self) -> None:
        nu = self.nu
        for s in range(nu):
            if self.hom[s][s] != 1:
                raise InternalInvariantError(f"End(I_{s}) has dimension {self.hom[s][s]}")
            for t in range(s):
                if self.hom[s][t] != 0:
                    raise InternalInvariantError(
                        f"Hom(I_{s}, I_{t}) nonzero against the directed order"
                    )


def build_indec_table(
    quiver: QuiverSpec,
    p: int,
    seed: int = 0,
    root_order: list[DimVec] | None = None,
) -> IndecTable:
    """Build representatives for all roots at prime p and order them.

    `root_order` fixes the directed order externally (it must be valid);
    when omitted the order is computed from the Hom digraph at this prime.
    """
    from .quiver import positive_roots

    roots = positive_roots(quiver)
    reps = {r: build_indecomposable(quiver, r, p, seed) for r in roots}
    if root_order is None:
        indecs = [reps[r] for r in roots]
        perm = directed_order(indecs)
        ordered_roots = [roots[i] for i in perm]
    else:
        if sorted(root_order) != roots:
            raise InternalInvariantError("root_order is not a permutation of the roots")
        ordered_roots = list(root_order)
    ordered = [reps[r] for r in ordered_roots]
    nu = len(ordered)
    hom = tuple(
        tuple(hom_dim(ordered[s], ordered[t]) for t in range(nu)) for s in range(nu)
    )
    table = IndecTable(quiver, p, tuple(ordered), tuple(ordered_roots), hom)
    table.validate()
    return table
