"""Orbit labels (multiplicity vectors over the indecomposables), exact
orbit invariants, classification of representations, and a vectorized
classifier for large point censuses."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .censuskern import HAVE_NUMBA, census_counts
from .errors import DimensionMismatchError, InternalInvariantError
from .gflinalg import FpMatrix, inverse_table, rank_batch
from .indecs import (
    IndecTable,
    Rep,
    build_indec_table,
    commutation_matrix_parts,
    directed_order,
    hom_dim,
)
from .polynomials import IntPolyQ
from .quiver import DimVec, QuiverSpec, add_dim, check_dim, euler_form, scale_dim

DEFAULT_PRIMES = (2, 3, 5, 7, 11, 13)


@dataclass(frozen=True, order=True)
class OrbitLabel:
    """Field-independent name of an orbit: copies of each indecomposable.

    Ordering and equality use the multiplicity vector only, so labels sort
    lexicographically.
    """

    mults: tuple[int, ...]
    dim: DimVec = field(compare=False)
    end_dim: int = field(compare=False)
    ext_dim: int = field(compare=False)
    name: str = field(compare=False)

    @property
    def total_dim(self) -> int:
        return sum(self.dim)

    def __str__(self) -> str:
        return self.name


def _indec_name(quiver: QuiverSpec, root: DimVec) -> str:
    if sum(root) == 1:
        return "S" + quiver.vertices[root.index(1)]
    if all(x <= 1 for x in root):
        ids = [v for v, x in zip(quiver.vertices, root) if x]
        if all(len(v) == 1 for v in ids):
            return "I" + "".join(ids)
        return "I[" + ".".join(ids) + "]"
    return "I[" + ",".join(str(x) for x in root) + "]"


class QuiverContext:
    """Shared state for one quiver: roots in directed order, Hom matrix,
    per-prime indecomposable tables, and label caches.

    The directed order is computed once (at the first working prime) and
    imposed on every other prime; the Hom matrix is checked to agree across
    primes, which keeps labels field-independent.
    """

    def __init__(
        self,
        quiver: QuiverSpec,
        primes: tuple[int, ...] = DEFAULT_PRIMES,
        seed: int = 0,
        tie_break: str = "lex",
    ):
        if len(primes) < 1:
            raise DimensionMismatchError("at least one working prime required")
        self.quiver = quiver
        self.base_primes = tuple(primes)
        self.seed = seed
        ref = build_indec_table(quiver, primes[0], seed=seed)
        if tie_break != "lex":
            reps = list(ref.indecs)
            perm = directed_order(reps, tie_break=tie_break)
            roots = tuple(ref.roots[i] for i in perm)
            ref = build_indec_table(quiver, primes[0], seed=seed, root_order=list(roots))
        self.roots = ref.roots
        self.nu = ref.nu
        self.hom = ref.hom
        self._tables: dict[int, IndecTable] = {primes[0]: ref}
        self._labels_by_dim: dict[DimVec, list[OrbitLabel]] = {}
        self._label_cache: dict[tuple[int, ...], OrbitLabel] = {}
        self._rep_cache: dict[tuple[tuple[int, ...], int], Rep] = {}
        self._aut_cache: dict[tuple[int, ...], IntPolyQ] = {}
        self._classifier_cache: dict[tuple[DimVec, int], DimTypeClassifier] = {}

    # ------------------------------------------------------------------ tables

    def table(self, p: int) -> IndecTable:
        if p not in self._tables:
            t = build_indec_table(self.quiver, p, seed=self.seed, root_order=list(self.roots))
            if t.hom != self.hom:
                raise InternalInvariantError(
                    f"Hom matrix at p={p} disagrees with the reference prime"
                )
            self._tables[p] = t
        return self._tables[p]

    # ------------------------------------------------------------------ labels

    def label(self, mults) -> OrbitLabel:
        mults = tuple(int(m) for m in mults)
        if mults in self._label_cache:
            return self._label_cache[mults]
        if len(mults) != self.nu or any(m < 0 for m in mults):
            raise DimensionMismatchError("bad multiplicity vector")
        d = tuple(0 for _ in range(self.quiver.n))
        for m, r in zip(mults, self.roots):
            d = add_dim(d, scale_dim(m, r))
        end = sum(
            mults[s] * mults[t] * self.hom[s][t]
            for s in range(self.nu)
            for t in range(self.nu)
        )
        ext = end - euler_form(self.quiver, d, d)
        if ext < 0:
            raise InternalInvariantError(f"negative ext dimension for {mults}")
        parts = []
        for s, m in enumerate(mults):
            if m:
                nm = _indec_name(self.quiver, self.roots[s])
                parts.append(nm if m == 1 else f"{nm}^{m}")
        name = "+".join(parts) if parts else "0"
        lab = OrbitLabel(mults, d, end, ext, name)
        self._label_cache[mults] = lab
        return lab

    def simple_label(self, vertex: str) -> OrbitLabel:
        root = tuple(1 if v == vertex else 0 for v in self.quiver.vertices)
        return self.label(tuple(1 if r == root else 0 for r in self.roots))

    def zero_label(self) -> OrbitLabel:
        return self.label((0,) * self.nu)

    def enumerate_labels(self, d: DimVec) -> list[OrbitLabel]:
        """All labels of dimension type d, lexicographically sorted."""
        d = check_dim(self.quiver, d)
        if d in self._labels_by_dim:
            return self._labels_by_dim[d]
        out: list[tuple[int, ...]] = []
        mults = [0] * self.nu

        def rec(s: int, remaining: DimVec):
            if s == self.nu:
                if all(x == 0 for x in remaining):
                    out.append(tuple(mults))
                return
            root = self.roots[s]
            cap = min(
                (remaining[i] // root[i] for i in range(len(root)) if root[i]),
                default=0,
            )
            for m in range(cap + 1):
                mults[s] = m
                rec(s + 1, tuple(remaining[i] - m * root[i] for i in range(len(root))))
            mults[s] = 0

        rec(0, d)
        labels = sorted(self.label(m) for m in out)
        self._labels_by_dim[d] = labels
        return labels

    def labels_up_to(self, budget: int) -> list[OrbitLabel]:
        """All labels with total dimension <= budget, grouped by dim type."""
        out: list[OrbitLabel] = []
        for d in _dims_up_to(self.quiver.n, budget):
            out.extend(self.enumerate_labels(d))
        return out

    def hom_vector(self, label: OrbitLabel) -> tuple[int, ...]:
        """(dim Hom(I_t, M))_t, the complete orbit invariant."""
        return tuple(
            sum(label.mults[s] * self.hom[t][s] for s in range(self.nu))
            for t in range(self.nu)
        )

    def generic_label(self, d: DimVec) -> OrbitLabel:
        cands = [l for l in self.enumerate_labels(d) if l.ext_dim == 0]
        if len(cands) != 1:
            raise InternalInvariantError(f"expected one generic label for {d}")
        return cands[0]

    # ------------------------------------------------------------------ reps

    def layer_layout(self, label: OrbitLabel) -> list[list[tuple[int, int]]]:
        """Per layer s, per vertex i: (offset, size) of the isotypic block."""
        n = self.quiver.n
        offs = [0] * n
        layout = []
        for s in range(self.nu):
            size = [label.mults[s] * self.roots[s][i] for i in range(n)]
            layout.append([(offs[i], size[i]) for i in range(n)])
            for i in range(n):
                offs[i] += size[i]
        return layout

    def rep_of(self, label: OrbitLabel, p: int) -> Rep:
        """Block-diagonal direct sum of indecomposables in layer order."""
        key = (label.mults, p)
        if key in self._rep_cache:
            return self._rep_cache[key]
        table = self.table(p)
        n = self.quiver.n
        d = label.dim
        mats = [np.zeros((d[j], d[i]), dtype=np.int64) for i, j in self.quiver.arrow_indices]
        layout = self.layer_layout(label)
        for s in range(self.nu):
            root = self.roots[s]
            for copy in range(label.mults[s]):
                for a, (i, j) in enumerate(self.quiver.arrow_indices):
                    block = table.indecs[s].mats[a].a
                    r0 = layout[s][j][0] + copy * root[j]
                    c0 = layout[s][i][0] + copy * root[i]
                    mats[a][r0:r0 + root[j], c0:c0 + root[i]] = block
        rep = Rep(self.quiver, p, d, tuple(FpMatrix(p, m) for m in mats))
        self._rep_cache[key] = rep
        return rep

    # ------------------------------------------------------------------ invariants

    def classify(self, rep: Rep) -> OrbitLabel:
        """Multiplicity vector of a representation via the triangular system
        dim Hom(I_t, rep) = sum_s m_s hom[t][s]."""
        table = self.table(rep.p)
        hv = [hom_dim(table.indecs[t], rep) for t in range(self.nu)]
        mults = [0] * self.nu
        for t in range(self.nu - 1, -1, -1):
            m = hv[t] - sum(mults[s] * self.hom[t][s] for s in range(t + 1, self.nu))
            if m < 0:
                raise InternalInvariantError("negative multiplicity while classifying")
            mults[t] = m
        label = self.label(tuple(mults))
        if label.dim != rep.dim:
            raise InternalInvariantError("classification dimension mismatch")
        return label

    def aut_order_poly(self, label: OrbitLabel) -> IntPolyQ:
        """|Aut(M)| as a polynomial in q.

        End(M) is triangular in the directed order with semisimple quotient
        prod_s Mat_{m_s}, so |Aut| = q^(radical dim) * prod_s |GL_{m_s}|.
        """
        if label.mults in self._aut_cache:
            return self._aut_cache[label.mults]
        rad = label.end_dim - sum(m * m for m in label.mults)
        poly = IntPolyQ.q_power(rad)
        for m in label.mults:
            for j in range(1, m + 1):
                factor = [0] * (m + 1)
                factor[j - 1] = -1
                factor[m] += 1
                poly = poly * IntPolyQ(tuple(factor))
        self._aut_cache[label.mults] = poly
        return poly

    def group_order(self, d: DimVec, p: int) -> int:
        """|G_d| = prod_i |GL_{d_i}(F_p)|."""
        total = 1
        for di in d:
            for j in range(di):
                total *= p ** di - p ** j
        return total

    def degenerates(self, m1: OrbitLabel, m2: OrbitLabel) -> bool:
        """True iff the orbit of m2 lies in the closure of the orbit of m1,
        tested through the Hom order."""
        if m1.dim != m2.dim:
            return False
        hv1 = self.hom_vector(m1)
        hv2 = self.hom_vector(m2)
        return all(a <= b for a, b in zip(hv1, hv2))

    # ------------------------------------------------------------------ censuses

    def dim_classifier(self, d: DimVec, p: int) -> "DimTypeClassifier":
        key = (tuple(d), p)
        if key not in self._classifier_cache:
            self._classifier_cache[key] = DimTypeClassifier(self, tuple(d), p)
        return self._classifier_cache[key]


def _dims_up_to(n: int, budget: int) -> list[DimVec]:
    out = []

    def rec(i: int, left: int, acc: list[int]):
        if i == n:
            if any(acc):
                out.append(tuple(acc))
            return
        for x in range(left + 1):
            acc.append(x)
            rec(i + 1, left - x, acc)
            acc.pop()

    rec(0, budget, [])
    return sorted(out, key=lambda d: (sum(d), d))


def rep_flat(rep: Rep) -> np.ndarray:
    """All arrow matrices flattened row-major and concatenated."""
    parts = [m.a.reshape(-1) for m in rep.mats]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def _linear_coeff_tensor(quiver: QuiverSpec, x_dim: DimVec, y_dim: DimVec):
    """Coefficients of the -Y_a f_i part of the Hom(X, Y) system as a
    matrix (flat Y entries) x (flat system entries)."""
    from .indecs import hom_constraint_parts

    col_off, row_off, n_cols, n_rows = hom_constraint_parts(x_dim, y_dim, quiver)
    sizes = [y_dim[j] * x_dim[i] for i, j in quiver.arrow_indices]
    rep_dim = sum(y_dim[j] * y_dim[i] for i, j in quiver.arrow_indices)
    C = np.zeros((rep_dim, n_rows * n_cols), dtype=np.int64)
    pos = 0
    for a, (i, j) in enumerate(quiver.arrow_indices):
        base_r = row_off[a]
        for r in range(y_dim[j]):
            for k in range(y_dim[i]):
                flat_idx = pos + r * y_dim[i] + k
                for c in range(x_dim[i]):
                    row = base_r + r * x_dim[i] + c
                    col = col_off[i] + k * x_dim[i] + c
                    C[flat_idx, row * n_cols + col] -= 1
        pos += y_dim[j] * y_dim[i]
    return C, n_rows, n_cols


class DimTypeClassifier:
    """Classifies many representations of one dimension type at once.

    Labels of a fixed dimension type are separated by finitely many Hom
    dimensions; a greedily chosen subset of the indecomposables already
    distinguishes them, and each Hom dimension is a batched rank
    computation. Point sets are either explicit representation lists or
    affine families base + sum c_k dir_k walked in lexicographic order
    over the coefficients.
    """

    CHUNK_ENTRIES = 6_000_000

    def __init__(self, ctx: QuiverContext, d: DimVec, p: int):
        self.ctx = ctx
        self.d = d
        self.p = p
        self.labels = ctx.enumerate_labels(d)
        if not self.labels:
            raise InternalInvariantError(f"no labels of dimension type {d}")
        hvs = {lab: ctx.hom_vector(lab) for lab in self.labels}
        self.test_indices = _distinguishing_indices([hvs[l] for l in self.labels])
        self.lookup = {
            tuple(hvs[l][t] for t in self.test_indices): l for l in self.labels
        }
        table = ctx.table(p)
        self._parts = []
        for t in self.test_indices:
            X = table.indecs[t]
            C, n_rows, n_cols = _linear_coeff_tensor(ctx.quiver, X.dim, d)
            A, _ = commutation_matrix_parts(X, d)
            self._parts.append((A.reshape(-1), C, n_rows, n_cols))

    def _keys_for_flat(self, flats: np.ndarray) -> np.ndarray:
        """flats: (B, rep_dim) -> integer keys combining the tested Hom dims."""
        B = flats.shape[0]
        key = np.zeros(B, dtype=np.int64)
        for (A, C, n_rows, n_cols), t in zip(self._parts, self.test_indices):
            if n_cols == 0:
                homs = np.zeros(B, dtype=np.int64)
            elif n_rows == 0:
                homs = np.full(B, n_cols, dtype=np.int64)
            else:
                systems = (A[None, :] + flats @ C) % self.p
                systems = systems.reshape(B, n_rows, n_cols)
                homs = n_cols - rank_batch(systems, self.p)
            key = key * (n_cols + 1) + homs
        return key

    def _label_of_key(self, key: int) -> OrbitLabel:
        parts = []
        for (A, C, n_rows, n_cols) in reversed(self._parts):
            parts.append(key % (n_cols + 1))
            key //= n_cols + 1
        hv = tuple(reversed(parts))
        if hv not in self.lookup:
            raise InternalInvariantError(f"hom vector {hv} matches no label of type {self.d}")
        return self.lookup[hv]

    def classify_reps(self, reps: list[Rep]) -> list[OrbitLabel]:
        if not reps:
            return []
        flats = np.stack([rep_flat(r) for r in reps])
        keys = self._keys_for_flat(flats)
        return [self._label_of_key(int(k)) for k in keys]

    def census_affine(self, base: Rep, dirs: list[Rep]) -> dict[OrbitLabel, int]:
        """Tally of orbit labels over the affine family base + sum c_k dir_k,
        all c in F_p^len(dirs), walked lexicographically."""
        p = self.p
        e = len(dirs)
        base_flat = rep_flat(base)
        if e == 0:
            lab = self._label_of_key(int(self._keys_for_flat(base_flat[None, :])[0]))
            return {lab: 1}
        dir_flats = np.stack([rep_flat(r) for r in dirs]) % p
        total = p ** e
        weights = np.array([p ** (e - 1 - k) for k in range(e)], dtype=np.int64)
        # affine system tables: point (c) has system K0 + sum c_k L[k] per part
        k0s, lins = [], []
        for (A, C, n_rows, n_cols) in self._parts:
            k0s.append((A + base_flat @ C) % p)
            lins.append((dir_flats @ C) % p)
        key_size = 1
        for (_, _, _, n_cols) in self._parts:
            key_size *= n_cols + 1
        if HAVE_NUMBA or total <= (1 << 14):
            raw = census_counts(
                total,
                p,
                inverse_table(p),
                weights,
                np.concatenate(k0s) if k0s else np.zeros(0, dtype=np.int64),
                np.concatenate(lins, axis=1) if lins else np.zeros((e, 0), dtype=np.int64),
                np.array([0] + [k.shape[0] for k in k0s], dtype=np.int64).cumsum()[:-1],
                np.array([pt[2] for pt in self._parts], dtype=np.int64),
                np.array([pt[3] for pt in self._parts], dtype=np.int64),
                key_size,
            )
            counts = {
                self._label_of_key(int(k)): int(c) for k, c in enumerate(raw) if c
            }
        else:
            counts = self._census_numpy(total, weights, k0s, lins)
        if sum(counts.values()) != total:
            raise InternalInvariantError("census total mismatch")
        return counts

    def _census_numpy(self, total, weights, k0s, lins) -> dict[OrbitLabel, int]:
        p = self.p
        max_rc = max((pt[2] * pt[3] for pt in self._parts), default=1)
        chunk = max(1024, self.CHUNK_ENTRIES // max(1, max_rc))
        counts: dict[OrbitLabel, int] = {}
        lins_f = [l.astype(np.float64) for l in lins]
        start = 0
        while start < total:
            stop = min(total, start + chunk)
            ids = np.arange(start, stop, dtype=np.int64)
            coeffs = ((ids[:, None] // weights[None, :]) % p).astype(np.float64)
            B = stop - start
            key = np.zeros(B, dtype=np.int64)
            for (part, k0, lf) in zip(self._parts, k0s, lins_f):
                _, _, n_rows, n_cols = part
                if n_cols == 0:
                    homs = np.zeros(B, dtype=np.int64)
                elif n_rows == 0:
                    homs = np.full(B, n_cols, dtype=np.int64)
                else:
                    systems = (coeffs @ lf).astype(np.int64)
                    systems += k0[None, :]
                    systems %= p
                    homs = n_cols - rank_batch(systems.reshape(B, n_rows, n_cols), p)
                key = key * (n_cols + 1) + homs
            uniq, cnt = np.unique(key, return_counts=True)
            for k, c in zip(uniq, cnt):
                lab = self._label_of_key(int(k))
                counts[lab] = counts.get(lab, 0) + int(c)
            start = stop
        return counts


def _distinguishing_indices(hom_vectors: list[tuple[int, ...]]) -> tuple[int, ...]:
    """Smallest prefix-greedy set of coordinates separating all vectors."""
    if len(hom_vectors) <= 1:
        return ()
    nu = len(hom_vectors[0])
    chosen: list[int] = []
    groups = [list(range(len(hom_vectors)))]
    for t in range(nu):
        if all(len(g) == 1 for g in groups):
            break
        new_groups = []
        split = False
        for g in groups:
            if len(g) == 1:
                new_groups.append(g)
                continue
            buckets: dict[int, list[int]] = {}
            for idx in g:
                buckets.setdefault(hom_vectors[idx][t], []).append(idx)
            if len(buckets) > 1:
                split = True
            new_groups.extend(buckets.values())
        if split:
            chosen.append(t)
            groups = new_groups
    if not all(len(g) == 1 for g in groups):
        raise InternalInvariantError("hom vectors do not separate labels")
    return tuple(chosen)
