"""Counting subrepresentations and filtrations over prime fields, and
recovering the exact Hall polynomials in q by multi-prime interpolation.

Conventions. hall_number(X, A, B, p) counts subrepresentations U of X with
U isomorphic to B and X/U isomorphic to A. A filtration chain is written
outermost quotient first: filtration_count(M, (C_k, ..., C_1), p) counts
chains 0 = M^k <= ... <= M^0 = M whose innermost nonzero layer has type
C_1 and whose outermost quotient has type C_k. The canonical chain of a
label lists its isotypic layers in reverse directed order, so the layer of
the first indecomposable sits innermost; this is the unique reading under
which the census identities close up (see tests).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InterpolationError,
    InternalInvariantError,
)
from .gflinalg import (
    SubspaceBasis,
    complement_in,
    coordinates_in,
    enumerate_superspaces,
    full_space,
    next_prime_list,
    subspace_arrays,
    subspace_from_rows,
    zero_space,
)
from .indecs import Rep
from .orbits import OrbitLabel, QuiverContext
from .polynomials import IntPolyQ
from .quiver import DimVec, add_dim, leq_dim, sub_dim

GradedSubspace = tuple[SubspaceBasis, ...]


@dataclass(frozen=True)
class CountSample:
    """One exact count over F_p."""

    p: int
    key: tuple
    count: int


def _topo_vertices(quiver) -> list[int]:
    n = quiver.n
    indeg = [0] * n
    for _, j in quiver.arrow_indices:
        indeg[j] += 1
    order = []
    avail = sorted(i for i in range(n) if indeg[i] == 0)
    while avail:
        v = avail.pop(0)
        order.append(v)
        for i, j in quiver.arrow_indices:
            if i == v:
                indeg[j] -= 1
                if indeg[j] == 0:
                    avail.append(j)
        avail.sort()
    if len(order) != n:
        raise InternalInvariantError("quiver has a directed cycle")
    return order


def stable_subspaces(X: Rep, e: DimVec) -> Iterator[GradedSubspace]:
    """All graded subspaces U with dim U_i = e_i and X_a(U_i) <= U_j.

    Vertices are filled in topological order, so at each vertex the span of
    the incoming arrow images is known and only its superspaces are
    enumerated.
    """
    q = X.quiver
    if len(e) != q.n:
        raise DimensionMismatchError("dimension vector length mismatch")
    if not leq_dim(e, X.dim):
        return
    order = _topo_vertices(q)
    p = X.p
    chosen: dict[int, SubspaceBasis] = {}

    def rec(k: int) -> Iterator[GradedSubspace]:
        if k == q.n:
            yield tuple(chosen[i] for i in range(q.n))
            return
        v = order[k]
        img_rows = []
        for a, (i, j) in enumerate(q.arrow_indices):
            if j == v:
                ui = chosen[i]
                if ui.dim:
                    img_rows.append((ui.basis.a @ X.mats[a].a.T) % p)
        if img_rows:
            W = subspace_from_rows(p, X.dim[v], np.vstack(img_rows))
        else:
            W = zero_space(p, X.dim[v])
        if W.dim > e[v]:
            return
        for U in enumerate_superspaces(W, e[v]):
            chosen[v] = U
            yield from rec(k + 1)
        chosen.pop(v, None)

    yield from rec(0)


def sub_rep(X: Rep, U: GradedSubspace) -> Rep:
    """The representation X restricted to the stable graded subspace U."""
    from .gflinalg import FpMatrix

    p = X.p
    e = tuple(u.dim for u in U)
    mats = []
    for a, (i, j) in enumerate(X.quiver.arrow_indices):
        img = (U[i].basis.a @ X.mats[a].a.T) % p if e[i] else np.zeros((0, X.dim[j]), dtype=np.int64)
        coords = coordinates_in(U[j], img)
        mats.append(FpMatrix(p, coords.T.reshape(e[j], e[i])))
    return Rep(X.quiver, p, e, tuple(mats))


def quot_rep(X: Rep, U: GradedSubspace) -> Rep:
    """The representation induced on X/U, in deterministic complement
    coordinates."""
    from .gflinalg import FpMatrix

    p = X.p
    comps = [complement_in(U[i], full_space(p, X.dim[i])) for i in range(X.quiver.n)]
    f = tuple(c.dim for c in comps)
    mats = []
    for a, (i, j) in enumerate(X.quiver.arrow_indices):
        if f[i]:
            img = (comps[i].basis.a @ X.mats[a].a.T) % p
            reduced = np.stack([U[j].reduce_vector(row) for row in img])
            coords = coordinates_in(comps[j], reduced)
        else:
            coords = np.zeros((0, f[j]), dtype=np.int64)
        mats.append(FpMatrix(p, coords.T.reshape(f[j], f[i])))
    return Rep(X.quiver, p, f, tuple(mats))


def grassmann_bound(d: DimVec, e: DimVec) -> int:
    """Degree bound for a two-step count: dimension of the graded
    Grassmannian of e-dimensional subspaces."""
    return sum(ei * (di - ei) for di, ei in zip(d, e))


def interpolate(samples: Sequence[CountSample], degree_bound: int) -> IntPolyQ:
    """The unique integer polynomial through the first degree_bound + 1
    samples, verified exactly against at least two held-out samples."""
    samples = sorted(samples, key=lambda s: s.p)
    primes = [s.p for s in samples]
    if len(set(primes)) != len(primes):
        raise InterpolationError("insufficient-samples", "duplicate primes in samples")
    if len(samples) < degree_bound + 3:
        raise InterpolationError(
            "insufficient-samples",
            f"need {degree_bound + 1} fit + 2 holdout samples, got {len(samples)}",
        )
    fit = samples[: degree_bound + 1]
    holdout = samples[degree_bound + 1:]
    coeffs = [Fraction(0)] * len(fit)
    for i, s in enumerate(fit):
        num = [Fraction(1)]
        den = Fraction(1)
        for k, t in enumerate(fit):
            if k == i:
                continue
            num = _poly_mul_frac(num, [Fraction(-t.p), Fraction(1)])
            den *= Fraction(s.p - t.p)
        scale = Fraction(s.count) / den
        for j, c in enumerate(num):
            coeffs[j] += c * scale
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise InterpolationError("non-integer", f"coefficient {c} is not an integer")
        out.append(int(c))
    poly = IntPolyQ(tuple(out))
    for s in holdout:
        if poly(s.p) != s.count:
            raise InterpolationError(
                "holdout-mismatch",
                f"poly {poly} gives {poly(s.p)} at p={s.p}, counted {s.count}",
            )
    return poly


def _poly_mul_frac(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


class HallTable:
    """Exact Hall counts and polynomials for one quiver context.

    Count tables are cached by (orbit, subspace dimension, prime); the
    interpolated polynomial tables can additionally be mirrored on disk.
    """

    def __init__(self, ctx: QuiverContext, cache_dir: str | Path | None = None):
        self.ctx = ctx
        self._counts: dict[tuple, dict[tuple[OrbitLabel, OrbitLabel], int]] = {}
        self._chain_counts: dict[tuple, dict[OrbitLabel, int]] = {}
        self._poly_tables: dict[tuple, dict[tuple[OrbitLabel, OrbitLabel], IntPolyQ]] = {}
        self._gen_tables: dict[tuple, dict[OrbitLabel, IntPolyQ]] = {}
        self.primes_used: set[int] = set()
        self.cache_dir = Path(cache_dir) if cache_dir else None
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)

    # ------------------------------------------------------------- raw counts

    def subquot_counts(
        self, X: OrbitLabel, e: DimVec, p: int
    ) -> dict[tuple[OrbitLabel, OrbitLabel], int]:
        """For every (A, B): the number of subrepresentations U of X with
        U of type B (and dim e) and X/U of type A.

        Walks the product of vertex Grassmannians in stacked-array chunks:
        stability, restriction, quotient and classification are all batched.
        """
        key = (X.mults, tuple(e), p)
        if key in self._counts:
            return self._counts[key]
        self.primes_used.add(p)
        e = tuple(e)
        if not leq_dim(e, X.dim):
            self._counts[key] = {}
            return {}
        ctx = self.ctx
        q = ctx.quiver
        d = X.dim
        rep = ctx.rep_of(X, p)
        per_vertex = [subspace_arrays(d[i], e[i], p) for i in range(q.n)]
        sizes = [pv[0].shape[0] for pv in per_vertex]
        total = 1
        for s in sizes:
            total *= s
        strides = []
        acc = 1
        for s in reversed(sizes):
            strides.append(acc)
            acc *= s
        strides = list(reversed(strides))
        cls_sub = ctx.dim_classifier(e, p)
        cls_quot = ctx.dim_classifier(sub_dim(d, e), p)
        sub_keyspace = 1
        for (_, _, _, n_cols) in cls_sub._parts:
            sub_keyspace *= n_cols + 1
        key_counts: dict[int, int] = {}
        chunk = 1 << 15
        start = 0
        while start < total:
            stop = min(total, start + chunk)
            ids = np.arange(start, stop, dtype=np.int64)
            sel_b, sel_p, sel_f = [], [], []
            for i in range(q.n):
                ii = (ids // strides[i]) % sizes[i]
                b, pv, fr = per_vertex[i]
                sel_b.append(b[ii])
                sel_p.append(pv[ii])
                sel_f.append(fr[ii])
            mask = np.ones(stop - start, dtype=bool)
            sub_parts, quot_parts = [], []
            for a, (i, j) in enumerate(q.arrow_indices):
                Xa = rep.mats[a].a
                img = sel_b[i] @ Xa.T % p                      # (B, e_i, d_j)
                pj = sel_p[j][:, None, :]
                coords = np.take_along_axis(img, np.broadcast_to(pj, img.shape[:2] + (e[j],)), axis=2) if e[j] else np.zeros(img.shape[:2] + (0,), dtype=np.int64)
                recon = coords @ sel_b[j] % p
                mask &= (recon == img).all(axis=(1, 2))
                sub_parts.append(np.ascontiguousarray(coords.transpose(0, 2, 1)))
                fi = sel_f[i]
                rows = Xa.T[fi] % p                            # (B, f_i, d_j)
                cq = np.take_along_axis(rows, np.broadcast_to(pj, rows.shape[:2] + (e[j],)), axis=2) if e[j] else np.zeros(rows.shape[:2] + (0,), dtype=np.int64)
                resid = (rows - cq @ sel_b[j]) % p
                fj = sel_f[j][:, None, :]
                qc = np.take_along_axis(resid, np.broadcast_to(fj, resid.shape[:2] + (d[j] - e[j],)), axis=2) if d[j] - e[j] else np.zeros(resid.shape[:2] + (0,), dtype=np.int64)
                quot_parts.append(np.ascontiguousarray(qc.transpose(0, 2, 1)))
            idxs = np.flatnonzero(mask)
            if idxs.size:
                B2 = idxs.size
                if sub_parts:
                    sub_flat = np.concatenate(
                        [sp[idxs].reshape(B2, -1) for sp in sub_parts], axis=1
                    )
                    quot_flat = np.concatenate(
                        [qp[idxs].reshape(B2, -1) for qp in quot_parts], axis=1
                    )
                else:
                    sub_flat = np.zeros((B2, 0), dtype=np.int64)
                    quot_flat = np.zeros((B2, 0), dtype=np.int64)
                skeys = cls_sub._keys_for_flat(sub_flat)
                qkeys = cls_quot._keys_for_flat(quot_flat)
                combined = qkeys * sub_keyspace + skeys
                uniq, cnt = np.unique(combined, return_counts=True)
                for k, c in zip(uniq, cnt):
                    key_counts[int(k)] = key_counts.get(int(k), 0) + int(c)
            start = stop
        table: dict[tuple[OrbitLabel, OrbitLabel], int] = {}
        for k, c in key_counts.items():
            a_lab = cls_quot._label_of_key(k // sub_keyspace)
            b_lab = cls_sub._label_of_key(k % sub_keyspace)
            table[(a_lab, b_lab)] = c
        self._counts[key] = table
        return table

    def subquot_counts_reference(
        self, X: OrbitLabel, e: DimVec, p: int
    ) -> dict[tuple[OrbitLabel, OrbitLabel], int]:
        """Object-based tabulation through the subspace stream; the slow
        reference the vectorized path is checked against."""
        e = tuple(e)
        if not leq_dim(e, X.dim):
            return {}
        rep = self.ctx.rep_of(X, p)
        subs: list[Rep] = []
        quots: list[Rep] = []
        for U in stable_subspaces(rep, e):
            subs.append(sub_rep(rep, U))
            quots.append(quot_rep(rep, U))
        table: dict[tuple[OrbitLabel, OrbitLabel], int] = {}
        if subs:
            sub_cls = self.ctx.dim_classifier(e, p).classify_reps(subs)
            quot_cls = self.ctx.dim_classifier(sub_dim(X.dim, e), p).classify_reps(quots)
            for a_lab, b_lab in zip(quot_cls, sub_cls):
                table[(a_lab, b_lab)] = table.get((a_lab, b_lab), 0) + 1
        return table

    def hall_number(self, X: OrbitLabel, A: OrbitLabel, B: OrbitLabel, p: int) -> int:
        if add_dim(A.dim, B.dim) != X.dim:
            raise DimensionMismatchError("dim A + dim B != dim X")
        return self.subquot_counts(X, B.dim, p).get((A, B), 0)

    # ------------------------------------------------------------ filtrations

    def chain_cuts(self, chain: Sequence[OrbitLabel]) -> list[DimVec]:
        """Partial dimension sums from the inside: f_0 = 0, ..., f_k."""
        inner = list(reversed(list(chain)))
        f = [tuple(0 for _ in range(self.ctx.quiver.n))]
        for C in inner:
            f.append(add_dim(f[-1], C.dim))
        return f

    def filtration_table(
        self, chain: Sequence[OrbitLabel], p: int
    ) -> dict[OrbitLabel, int]:
        """Filtration counts with the given layer chain, for every ambient
        type at once. Dynamic programming over two-step counts, peeling the
        outermost layer."""
        chain = tuple(chain)
        key = (tuple(c.mults for c in chain), p)
        if key in self._chain_counts:
            return self._chain_counts[key]
        cuts = self.chain_cuts(chain)
        inner = list(reversed(chain))
        cur: dict[OrbitLabel, int] = {self.ctx.zero_label(): 1}
        for s, C in enumerate(inner, start=1):
            if C.total_dim == 0:
                continue
            new: dict[OrbitLabel, int] = {}
            for Z in self.ctx.enumerate_labels(cuts[s]):
                tbl = self.subquot_counts(Z, cuts[s - 1], p)
                val = 0
                for (a_lab, b_lab), cnt in tbl.items():
                    if a_lab == C and b_lab in cur:
                        val += cnt * cur[b_lab]
                if val:
                    new[Z] = val
            cur = new
        self._chain_counts[key] = cur
        return cur

    def filtration_count(self, M: OrbitLabel, chain: Sequence[OrbitLabel], p: int) -> int:
        total = self.chain_cuts(chain)[-1]
        if total != M.dim:
            raise DimensionMismatchError("chain dimensions do not sum to dim M")
        return self.filtration_table(chain, p).get(M, 0)

    def filtration_count_direct(
        self, M: OrbitLabel, chain: Sequence[OrbitLabel], p: int
    ) -> int:
        """Test oracle: walk actual chains of stable subspaces."""
        total = self.chain_cuts(chain)[-1]
        if total != M.dim:
            raise DimensionMismatchError("chain dimensions do not sum to dim M")
        rep = self.ctx.rep_of(M, p)
        return self._direct(rep, list(chain))

    def _direct(self, rep: Rep, chain: list[OrbitLabel]) -> int:
        if not chain:
            return 1 if rep.total_dim == 0 else 0
        C = chain[0]
        e = sub_dim(rep.dim, C.dim)
        if any(x < 0 for x in e):
            return 0
        total = 0
        for U in stable_subspaces(rep, e):
            if self.ctx.classify(quot_rep(rep, U)) == C:
                total += self._direct(sub_rep(rep, U), chain[1:])
        return total

    # ---------------------------------------------------------- polynomials

    def primes_for(self, degree_bound: int) -> list[int]:
        """Fit nodes plus two holdouts, extending the working primes with
        the next primes when the bound demands more."""
        return next_prime_list(self.ctx.base_primes, degree_bound + 3)

    def hall_poly_table(
        self, X: OrbitLabel, e: DimVec
    ) -> dict[tuple[OrbitLabel, OrbitLabel], IntPolyQ]:
        key = (X.mults, tuple(e))
        if key in self._poly_tables:
            return self._poly_tables[key]
        loaded = self._disk_load_pairs("hall", key)
        if loaded is not None:
            self._poly_tables[key] = loaded
            return loaded
        bound = grassmann_bound(X.dim, e)
        primes = self.primes_for(bound)
        per_prime = {p: self.subquot_counts(X, e, p) for p in primes}
        pairs = sorted({k for tbl in per_prime.values() for k in tbl})
        table = {}
        for pair in pairs:
            samples = [
                CountSample(p, pair, per_prime[p].get(pair, 0)) for p in primes
            ]
            table[pair] = interpolate(samples, bound)
        self._poly_tables[key] = table
        self._disk_store_pairs("hall", key, table)
        return table

    def hall_polynomial(self, X: OrbitLabel, A: OrbitLabel, B: OrbitLabel) -> IntPolyQ:
        if add_dim(A.dim, B.dim) != X.dim:
            raise DimensionMismatchError("dim A + dim B != dim X")
        return self.hall_poly_table(X, B.dim).get((A, B), IntPolyQ(()))

    def canonical_chain(self, N: OrbitLabel) -> tuple[OrbitLabel, ...]:
        """The isotypic layers of N, outermost first; the layer of the first
        indecomposable in the directed order is the innermost subobject."""
        nu = self.ctx.nu
        out = []
        for s in range(nu - 1, -1, -1):
            mults = tuple(N.mults[s] if t == s else 0 for t in range(nu))
            out.append(self.ctx.label(mults))
        return tuple(out)

    def generalized_table(self, N: OrbitLabel) -> dict[OrbitLabel, IntPolyQ]:
        """Generalized Hall polynomials F^M for the canonical chain of N,
        for every ambient M of the same dimension type."""
        key = (N.mults,)
        if key in self._gen_tables:
            return self._gen_tables[key]
        loaded = self._disk_load_single("gen", key)
        if loaded is not None:
            self._gen_tables[key] = loaded
            return loaded
        chain = self.canonical_chain(N)
        cuts = self.chain_cuts(chain)
        bound = sum(
            grassmann_bound(cuts[s], cuts[s - 1]) for s in range(1, len(cuts))
        )
        primes = self.primes_for(bound)
        per_prime = {p: self.filtration_table(chain, p) for p in primes}
        ms = sorted({m for tbl in per_prime.values() for m in tbl})
        table = {}
        for m in ms:
            samples = [CountSample(p, (m.mults,), per_prime[p].get(m, 0)) for p in primes]
            table[m] = interpolate(samples, bound)
        self._gen_tables[key] = table
        self._disk_store_single("gen", key, table)
        return table

    def generalized_hall_polynomial(self, M: OrbitLabel, N: OrbitLabel) -> IntPolyQ:
        if M.dim != N.dim:
            raise DimensionMismatchError("M and N must have the same dimension type")
        return self.generalized_table(N).get(M, IntPolyQ(()))

    # ------------------------------------------------------------- disk cache

    def _cache_path(self, kind: str, key: tuple) -> Path | None:
        if not self.cache_dir:
            return None
        flat = "_".join("-".join(str(x) for x in part) if isinstance(part, tuple) else str(part) for part in key)
        return self.cache_dir / f"{kind}_{self.ctx.quiver.content_hash()}_{flat}.json"

    def _disk_load_pairs(self, kind, key):
        path = self._cache_path(kind, key)
        if not path or not path.exists():
            return None
        raw = json.loads(path.read_text())
        out = {}
        for k, coeffs in raw.items():
            a_part, b_part = k.split("|")
            a = self.ctx.label(tuple(int(x) for x in a_part.split(",")))
            b = self.ctx.label(tuple(int(x) for x in b_part.split(",")))
            out[(a, b)] = IntPolyQ(tuple(coeffs))
        return out

    def _disk_store_pairs(self, kind, key, table):
        path = self._cache_path(kind, key)
        if not path:
            return
        raw = {
            ",".join(map(str, a.mults)) + "|" + ",".join(map(str, b.mults)): list(poly.coeffs)
            for (a, b), poly in sorted(table.items())
        }
        path.write_text(json.dumps(raw, sort_keys=True))

    def _disk_load_single(self, kind, key):
        path = self._cache_path(kind, key)
        if not path or not path.exists():
            return None
        raw = json.loads(path.read_text())
        return {
            self.ctx.label(tuple(int(x) for x in k.split(","))): IntPolyQ(tuple(coeffs))
            for k, coeffs in raw.items()
        }

    def _disk_store_single(self, kind, key, table):
        path = self._cache_path(kind, key)
        if not path:
            return
        raw = {
            ",".join(map(str, m.mults)): list(poly.coeffs)
            for m, poly in sorted(table.items())
        }
        path.write_text(json.dumps(raw, sort_keys=True))
