"""Transversal slices through orbit points and preprojective fibers: the
two geometric point counts that recover the bar coefficients.

Layer conventions. A base point N is block diagonal with its isotypic
layers in directed order. Maps between layers decompose the representation
space into blocks R^{s,t} (arrow maps from layer s into layer t). The
strictly one-sided part hosting both the slice directions and the
unipotent conjugation directions is s > t: by directedness Hom vanishes
from later layers to earlier ones, which is exactly what makes the
conjugation action inject there and the slice dimension come out as
dim Ext^1(N, N). The construction checks that dimension and fails loudly
if the convention is violated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalInvariantError, SliceConventionError
from .gflinalg import (
    FpMatrix,
    SubspaceBasis,
    complement_in,
    full_space,
    kernel_basis,
    subspace_from_rows,
)
from .indecs import Rep
from .orbits import OrbitLabel, QuiverContext, rep_flat
from .quiver import DimVec


def flat_layout(quiver, d: DimVec) -> tuple[list[int], int]:
    """Offsets of each arrow's matrix inside the flattened point of the
    representation space (matrices row-major, arrows concatenated)."""
    offs = [0]
    for i, j in quiver.arrow_indices:
        offs.append(offs[-1] + d[j] * d[i])
    return offs[:-1], offs[-1]


@dataclass(frozen=True)
class BlockDecomposition:
    """Coordinates of the layer blocks of the representation space.

    layer_dims[s] is the dimension vector of layer s. block_coords[(s, t)]
    lists flat coordinates of the arrow blocks from layer s into layer t,
    arrows in order and row-major within each arrow. u_blocks[(s, t)] for
    s > t lists, per vertex, the (row, col) index pairs of the same-vertex
    conjugation directions from layer s into layer t.
    """

    label: OrbitLabel
    layer_dims: tuple[DimVec, ...]
    block_coords: dict
    u_blocks: dict

    @property
    def nu(self) -> int:
        return len(self.layer_dims)


def block_decomposition(ctx: QuiverContext, N: OrbitLabel) -> BlockDecomposition:
    q = ctx.quiver
    n = q.n
    layout = ctx.layer_layout(N)
    nu = ctx.nu
    layer_dims = tuple(
        tuple(layout[s][i][1] for i in range(n)) for s in range(nu)
    )
    offs, _ = flat_layout(q, N.dim)
    block_coords: dict = {}
    for s in range(nu):
        for t in range(nu):
            coords = []
            for a, (i, j) in enumerate(q.arrow_indices):
                c0, cs = layout[s][i]
                r0, rs = layout[t][j]
                di = N.dim[i]
                for r in range(r0, r0 + rs):
                    for c in range(c0, c0 + cs):
                        coords.append(offs[a] + r * di + c)
            if coords:
                block_coords[(s, t)] = coords
    u_blocks: dict = {}
    for s in range(nu):
        for t in range(s):
            per_vertex = []
            for i in range(n):
                c0, cs = layout[s][i]
                r0, rs = layout[t][i]
                per_vertex.append(
                    [(i, r, c) for r in range(r0, r0 + rs) for c in range(c0, c0 + cs)]
                )
            pairs = [x for v in per_vertex for x in v]
            if pairs:
                u_blocks[(s, t)] = pairs
    return BlockDecomposition(N, layer_dims, block_coords, u_blocks)


@dataclass(frozen=True)
class AffineSlice:
    """An affine subspace base + span(directions) of the representation
    space, with directions given as representation-shaped points."""

    base: Rep
    directions: tuple[Rep, ...]

    @property
    def dim(self) -> int:
        return len(self.directions)


def _phi_of_unit(N: Rep, vertex: int, row: int, col: int) -> np.ndarray:
    """Flat image of the elementary conjugation direction E_(row,col) at a
    vertex: contributes xi N_a on arrows into the vertex and -N_a xi on
    arrows out of it."""
    q = N.quiver
    p = N.p
    offs, total = flat_layout(q, N.dim)
    out = np.zeros(total, dtype=np.int64)
    for a, (i, j) in enumerate(q.arrow_indices):
        Na = N.mats[a].a
        di = N.dim[i]
        if j == vertex:
            # (xi N_a)[row, c] = N_a[col, c]
            for c in range(di):
                if Na[col, c]:
                    out[offs[a] + row * di + c] += Na[col, c]
        if i == vertex:
            # -(N_a xi)[r, col] = -N_a[r, row]
            for r in range(N.dim[j]):
                if Na[r, row]:
                    out[offs[a] + r * di + col] -= Na[r, row]
    return out % p


def phi_image(ctx: QuiverContext, N: OrbitLabel, p: int, domain: str = "g") -> SubspaceBasis:
    """Image of the conjugation map xi -> (xi_j N_a - N_a xi_i)_a.

    domain "g": all same-vertex directions (the tangent space of the orbit
    at N). domain "u": only the strictly one-sided layer blocks; there the
    map must be injective, which is checked.
    """
    rep = ctx.rep_of(N, p)
    q = ctx.quiver
    _, total = flat_layout(q, N.dim)
    rows = []
    expected = 0
    if domain == "g":
        for v in range(q.n):
            dv = N.dim[v]
            for r in range(dv):
                for c in range(dv):
                    rows.append(_phi_of_unit(rep, v, r, c))
    elif domain == "u":
        bd = block_decomposition(ctx, N)
        for (s, t), pairs in sorted(bd.u_blocks.items()):
            expected += len(pairs)
            for v, r, c in pairs:
                rows.append(_phi_of_unit(rep, v, r, c))
    else:
        raise ValueError(f"unknown domain {domain!r}")
    image = subspace_from_rows(p, total, rows)
    if domain == "u" and image.dim != expected:
        raise SliceConventionError(
            f"conjugation directions are not independent on the one-sided blocks for {N.name}"
        )
    return image


def build_slice(ctx: QuiverContext, N: OrbitLabel, p: int) -> AffineSlice:
    """The affine slice through N: block by block, the deterministic
    complement of the conjugation image inside the one-sided blocks."""
    rep = ctx.rep_of(N, p)
    q = ctx.quiver
    bd = block_decomposition(ctx, N)
    offs, total = flat_layout(q, N.dim)
    dir_rows: list[np.ndarray] = []
    for s in range(bd.nu):
        for t in range(s):
            coords = bd.block_coords.get((s, t))
            if not coords:
                continue
            pairs = bd.u_blocks.get((s, t), [])
            local = []
            for v, r, c in pairs:
                full = _phi_of_unit(rep, v, r, c)
                local.append(full[coords])
            image = subspace_from_rows(p, len(coords), local)
            if image.dim != len(pairs):
                raise SliceConventionError(
                    f"conjugation image drops rank in block ({s},{t}) of {N.name}"
                )
            comp = complement_in(image, full_space(p, len(coords)))
            for row in comp.basis.a:
                full = np.zeros(total, dtype=np.int64)
                full[coords] = row
                dir_rows.append(full)
    if len(dir_rows) != N.ext_dim:
        raise SliceConventionError(
            f"slice dimension {len(dir_rows)} != ext dimension {N.ext_dim} for {N.name}"
        )
    dirs = tuple(_rep_from_flat_vec(ctx, N.dim, p, v) for v in dir_rows)
    return AffineSlice(rep, dirs)


def _rep_from_flat_vec(ctx: QuiverContext, d: DimVec, p: int, flat: np.ndarray) -> Rep:
    q = ctx.quiver
    offs, total = flat_layout(q, d)
    mats = []
    for a, (i, j) in enumerate(q.arrow_indices):
        block = flat[offs[a]: offs[a] + d[j] * d[i]].reshape(d[j], d[i])
        mats.append(FpMatrix(p, block))
    return Rep(q, p, d, tuple(mats))


def slice_census(ctx: QuiverContext, N: OrbitLabel, p: int) -> dict[OrbitLabel, int]:
    """Classify every point of the slice through N over F_p."""
    sl = build_slice(ctx, N, p)
    counts = ctx.dim_classifier(N.dim, p).census_affine(sl.base, list(sl.directions))
    if sum(counts.values()) != p ** N.ext_dim:
        raise InternalInvariantError("slice census total mismatch")
    return counts


def preprojective_fiber(ctx: QuiverContext, N: OrbitLabel, p: int) -> AffineSlice:
    """Solutions A of the preprojective relations paired against the
    transposed base point: at each vertex the incoming compositions
    A_a N_a^T balance the outgoing N_a^T A_a. The solution space is the
    orthogonal complement of the orbit tangent space at N and has
    dimension dim Ext^1(N, N)."""
    rep = ctx.rep_of(N, p)
    q = ctx.quiver
    d = N.dim
    offs, total = flat_layout(q, d)
    eq_off = [0]
    for i in range(q.n):
        eq_off.append(eq_off[-1] + d[i] * d[i])
    E = np.zeros((eq_off[-1], total), dtype=np.int64)
    for a, (i, j) in enumerate(q.arrow_indices):
        Na = rep.mats[a].a
        di, dj = d[i], d[j]
        # vertex j: + (A_a N_a^T)[u, v] => coeff N_a[v, b] on A_a[u, b]
        for u in range(dj):
            for v in range(dj):
                row = eq_off[j] + u * dj + v
                for b in range(di):
                    if Na[v, b]:
                        E[row, offs[a] + u * di + b] += Na[v, b]
        # vertex i: - (N_a^T A_a)[u, v] => coeff -N_a[b, u] on A_a[b, v]
        for u in range(di):
            for v in range(di):
                row = eq_off[i] + u * di + v
                for b in range(dj):
                    if Na[b, u]:
                        E[row, offs[a] + b * di + v] -= Na[b, u]
    fiber = kernel_basis(FpMatrix(p, E))
    if fiber.dim != N.ext_dim:
        raise SliceConventionError(
            f"preprojective fiber dimension {fiber.dim} != ext dimension {N.ext_dim} for {N.name}"
        )
    dirs = tuple(
        _rep_from_flat_vec(ctx, d, p, row.astype(np.int64)) for row in fiber.basis.a
    )
    return AffineSlice(rep, dirs)


def preprojective_census(ctx: QuiverContext, N: OrbitLabel, p: int) -> dict[OrbitLabel, int]:
    """Classify N + A for every fiber point A over F_p."""
    fib = preprojective_fiber(ctx, N, p)
    counts = ctx.dim_classifier(N.dim, p).census_affine(fib.base, list(fib.directions))
    if sum(counts.values()) != p ** N.ext_dim:
        raise InternalInvariantError("preprojective census total mismatch")
    return counts


@dataclass(frozen=True)
class OrthogonalityReport:
    label: OrbitLabel
    p: int
    tangent_dim: int
    fiber_dim: int
    ambient_dim: int
    pairing_ok: bool

    @property
    def ok(self) -> bool:
        return self.pairing_ok and self.tangent_dim + self.fiber_dim == self.ambient_dim


def orthogonality_check(ctx: QuiverContext, N: OrbitLabel, p: int) -> OrthogonalityReport:
    """The fiber pairs to zero with the orbit tangent space under the trace
    pairing (entrywise dot in matrix coordinates) and the dimensions are
    complementary."""
    tangent = phi_image(ctx, N, p, "g")
    fib = preprojective_fiber(ctx, N, p)
    _, total = flat_layout(ctx.quiver, N.dim)
    ok = True
    if tangent.dim and fib.dim:
        tmat = tangent.basis.a
        fmat = np.stack([rep_flat(r) for r in fib.directions])
        ok = not ((tmat @ fmat.T) % p).any()
    return OrthogonalityReport(N, p, tangent.dim, fib.dim, total, ok)
