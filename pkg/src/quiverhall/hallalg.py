"""The generic twisted Hall algebra over exact Laurent scalars: products in
the orbit basis, the Green form with its dual basis, and the coefficient
matrices of the bar involution."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatchError, InexactDivisionError
from .hallnums import HallTable
from .orbits import OrbitLabel, QuiverContext
from .polynomials import IntPolyQ, LaurentPolyV, ONE_V, RatioV, ZERO_V
from .quiver import DimVec, add_dim, euler_form


@dataclass(frozen=True)
class HallElement:
    """Element of the algebra in the orbit basis: finite label -> scalar map.

    All labels share one dimension type; zero coefficients are dropped.
    """

    dim: DimVec
    coeffs: tuple[tuple[OrbitLabel, LaurentPolyV], ...]

    @staticmethod
    def of(dim: DimVec, mapping: dict[OrbitLabel, LaurentPolyV]) -> "HallElement":
        items = tuple(sorted(
            ((lab, c) for lab, c in mapping.items() if not c.is_zero),
            key=lambda kv: kv[0],
        ))
        for lab, _ in items:
            if lab.dim != tuple(dim):
                raise DimensionMismatchError("mixed dimension types in one element")
        return HallElement(tuple(dim), items)

    def coeff(self, label: OrbitLabel) -> LaurentPolyV:
        for lab, c in self.coeffs:
            if lab == label:
                return c
        return ZERO_V

    def as_dict(self) -> dict[OrbitLabel, LaurentPolyV]:
        return dict(self.coeffs)

    def __add__(self, other: "HallElement") -> "HallElement":
        if self.dim != other.dim:
            raise DimensionMismatchError("mixed dimension types")
        out = self.as_dict()
        for lab, c in other.coeffs:
            out[lab] = out.get(lab, ZERO_V) + c
        return HallElement.of(self.dim, out)

    def scale(self, c: LaurentPolyV) -> "HallElement":
        return HallElement.of(self.dim, {lab: x * c for lab, x in self.coeffs})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs


class HallAlgebra:
    """Products and bar coefficients over one quiver context."""

    def __init__(self, ctx: QuiverContext, table: HallTable | None = None):
        self.ctx = ctx
        self.table = table if table is not None else HallTable(ctx)
        self._bar_cache: dict[DimVec, "BarMatrix"] = {}

    def basis_element(self, label: OrbitLabel) -> HallElement:
        return HallElement.of(label.dim, {label: ONE_V})

    def one(self) -> HallElement:
        return self.basis_element(self.ctx.zero_label())

    def dual_basis_element(self, label: OrbitLabel) -> HallElement:
        """e* = v^(-2 dim End) |Aut| e, dual to the basis under the Green form."""
        aut = self.ctx.aut_order_poly(label).subst_q_is_v2()
        return self.basis_element(label).scale(aut.shift(-2 * label.end_dim))

    def product(self, x: HallElement, y: HallElement) -> HallElement:
        """Twisted product; structure constants are Hall polynomials at
        q = v^2 with the v-power fixed by End dimensions and the Euler form."""
        d = add_dim(x.dim, y.dim)
        ef = euler_form(self.ctx.quiver, x.dim, y.dim)
        out: dict[OrbitLabel, LaurentPolyV] = {}
        targets = self.ctx.enumerate_labels(d)
        for m_lab, xc in x.coeffs:
            for n_lab, yc in y.coeffs:
                scale = xc * yc
                if scale.is_zero:
                    continue
                base_exp = m_lab.end_dim + n_lab.end_dim + ef
                for x_lab in targets:
                    f = self.table.hall_polynomial(x_lab, m_lab, n_lab)
                    if f.is_zero:
                        continue
                    term = scale * f.subst_q_is_v2().shift(base_exp - x_lab.end_dim)
                    out[x_lab] = out.get(x_lab, ZERO_V) + term
        return HallElement.of(d, out)

    def product_of(self, labels, reverse: bool = False) -> HallElement:
        seq = list(labels)
        if reverse:
            seq.reverse()
        acc = self.one()
        for lab in seq:
            acc = self.product(acc, self.basis_element(lab))
        return acc

    def layer_labels(self, N: OrbitLabel) -> list[OrbitLabel]:
        """Isotypic layers of N in directed order (possibly zero)."""
        nu = self.ctx.nu
        return [
            self.ctx.label(tuple(N.mults[s] if t == s else 0 for t in range(nu)))
            for s in range(nu)
        ]

    def green_form(self, x: HallElement, y: HallElement) -> RatioV:
        """(e_M, e_N) = v^(2 dim End N) |Aut(M)|^-1 delta_{M,N}, extended
        bilinearly; exact rational scalar in v."""
        if x.dim != y.dim:
            raise DimensionMismatchError("mixed dimension types")
        total = RatioV.of(ZERO_V, ONE_V)
        ydict = y.as_dict()
        for lab, xc in x.coeffs:
            yc = ydict.get(lab)
            if yc is None:
                continue
            aut = self.ctx.aut_order_poly(lab).subst_q_is_v2()
            num = (xc * yc).shift(2 * lab.end_dim)
            total = total + RatioV(num, aut)
        return total

    # ------------------------------------------------------------------- bar

    def bar_coefficient(self, M: OrbitLabel, N: OrbitLabel) -> IntPolyQ:
        """The polynomial in q whose bar image scales the basis change of
        the bar involution: F^M(chain of N) * prod |Aut(layer)| / |Aut(M)|.
        The division is exact in Z[q]; a remainder signals a convention or
        counting bug."""
        if M.dim != N.dim:
            raise DimensionMismatchError("M and N must share a dimension type")
        f = self.table.generalized_hall_polynomial(M, N)
        if f.is_zero:
            return f
        num = f
        for layer in self.layer_labels(N):
            if layer.total_dim:
                num = num * self.ctx.aut_order_poly(layer)
        try:
            return num.divexact(self.ctx.aut_order_poly(M))
        except InexactDivisionError as exc:
            raise InexactDivisionError(
                f"bar coefficient ({M.name}, {N.name}) is not a polynomial: {exc}"
            ) from exc

    def bar_matrix(self, d: DimVec) -> "BarMatrix":
        d = tuple(d)
        if d not in self._bar_cache:
            labels = self.ctx.enumerate_labels(d)
            grid = {
                (m, n): self.bar_coefficient(m, n) for n in labels for m in labels
            }
            self._bar_cache[d] = BarMatrix(self.ctx, tuple(labels), grid)
        return self._bar_cache[d]

    def verify_involution(self, d: DimVec) -> "InvolutionReport":
        """Check sum_N bar(omega_{M,N}) omega_{N,P} = delta_{M,P} exactly."""
        bm = self.bar_matrix(d)
        labels = bm.labels
        failures = []
        for m in labels:
            for p_lab in labels:
                acc = ZERO_V
                for n in labels:
                    a = bm.omega(m, n)
                    b = bm.omega(n, p_lab)
                    if a.is_zero or b.is_zero:
                        continue
                    acc = acc + a.bar() * b
                expected = ONE_V if m == p_lab else ZERO_V
                if acc != expected:
                    failures.append((m, p_lab, acc))
        return InvolutionReport(tuple(d), len(labels), tuple(failures))


@dataclass(frozen=True)
class BarMatrix:
    """Bar-involution coefficients for one dimension type.

    Entries are rows M, columns N, lex-ordered labels. `entry` returns the
    polynomial in q; `omega` and `Omega` return the Laurent normalizations.
    """

    ctx: QuiverContext
    labels: tuple[OrbitLabel, ...]
    grid: dict

    def entry(self, M: OrbitLabel, N: OrbitLabel) -> IntPolyQ:
        return self.grid[(M, N)]

    def Omega(self, M: OrbitLabel, N: OrbitLabel) -> LaurentPolyV:
        """The entry with q sent to v^-2 (a Laurent polynomial in v^-2)."""
        return self.entry(M, N).subst_q_is_vminus2()

    def omega(self, M: OrbitLabel, N: OrbitLabel) -> LaurentPolyV:
        """Unnormalized coefficient: v^(dim End N - dim End M) * Omega."""
        return self.Omega(M, N).shift(N.end_dim - M.end_dim)

    def row_sums(self) -> dict[OrbitLabel, IntPolyQ]:
        """For each column N: the sum of the column over all rows M."""
        out = {}
        for n in self.labels:
            acc = IntPolyQ(())
            for m in self.labels:
                acc = acc + self.grid[(m, n)]
            out[n] = acc
        return out


@dataclass(frozen=True)
class InvolutionReport:
    dim: DimVec
    n_labels: int
    failures: tuple

    @property
    def ok(self) -> bool:
        return not self.failures
