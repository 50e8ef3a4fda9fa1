"""Verification suites: every identity the build promises, runnable per
quiver and budget, shared by the CLI and the acceptance tests."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .hallalg import HallAlgebra
from .hallnums import HallTable
from .orbits import OrbitLabel, QuiverContext, _dims_up_to
from .polynomials import IntPolyQ, ONE_Q, ZERO_V
from .quiver import DimVec, add_dim
from .slices import orthogonality_check, preprojective_census, slice_census

SUITE_NAMES = (
    "row-sum",
    "triangular",
    "involution",
    "three-route",
    "riedtmann",
    "hall-assoc",
    "monic",
)


@dataclass
class SuiteReport:
    suite: str
    cases: list = field(default_factory=list)

    def record(self, name: str, ok: bool, detail: str = ""):
        self.cases.append((name, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.cases)

    @property
    def failures(self):
        return [(n, d) for n, ok, d in self.cases if not ok]

    def lines(self):
        for name, ok, detail in self.cases:
            status = "PASS" if ok else "FAIL"
            suffix = f"  ({detail})" if detail and not ok else ""
            yield f"{status} {self.suite}: {name}{suffix}"


def dims_in_budget(ctx: QuiverContext, budget: int) -> list[DimVec]:
    return _dims_up_to(ctx.quiver.n, budget)


def verify_row_sum(alg: HallAlgebra, budget: int) -> SuiteReport:
    """Column sums of the bar matrix are exactly q^(ext dim of the column)."""
    rep = SuiteReport("row-sum")
    ctx = alg.ctx
    for d in dims_in_budget(ctx, budget):
        bm = alg.bar_matrix(d)
        sums = bm.row_sums()
        for n_lab, total in sums.items():
            want = IntPolyQ.q_power(n_lab.ext_dim)
            rep.record(
                f"d={d} N={n_lab.name}",
                total == want,
                f"sum {total} != q^{n_lab.ext_dim}",
            )
    return rep


def verify_triangular(alg: HallAlgebra, budget: int) -> SuiteReport:
    """Support respects the degeneration order, diagonal entries are 1, and
    every entry landed in Z[q] (construction divides exactly)."""
    rep = SuiteReport("triangular")
    ctx = alg.ctx
    for d in dims_in_budget(ctx, budget):
        bm = alg.bar_matrix(d)
        for m in bm.labels:
            for n in bm.labels:
                entry = bm.entry(m, n)
                if m == n:
                    rep.record(f"d={d} diag {m.name}", entry == ONE_Q, f"diagonal {entry}")
                elif not entry.is_zero:
                    rep.record(
                        f"d={d} {m.name}->{n.name} support",
                        ctx.degenerates(m, n),
                        "nonzero entry without degeneration",
                    )
    return rep


def verify_involution(alg: HallAlgebra, budget: int) -> SuiteReport:
    rep = SuiteReport("involution")
    for d in dims_in_budget(alg.ctx, budget):
        r = alg.verify_involution(d)
        rep.record(f"d={d} ({r.n_labels} labels)", r.ok, f"{len(r.failures)} failing pairs")
    return rep


def verify_three_route(
    alg: HallAlgebra, budget: int, primes: tuple[int, ...]
) -> SuiteReport:
    """Slice census, preprojective census and the bar polynomial evaluated
    at each prime must agree exactly, label by label."""
    rep = SuiteReport("three-route")
    ctx = alg.ctx
    for d in dims_in_budget(ctx, budget):
        bm = alg.bar_matrix(d)
        for n_lab in bm.labels:
            expected = {
                m: bm.entry(m, n_lab) for m in bm.labels if not bm.entry(m, n_lab).is_zero
            }
            for p in primes:
                want = {m: poly(p) for m, poly in expected.items() if poly(p)}
                sc = slice_census(ctx, n_lab, p)
                pc = preprojective_census(ctx, n_lab, p)
                ok = sc == want and pc == want
                detail = ""
                if not ok:
                    detail = f"slice={_fmt(sc)} preproj={_fmt(pc)} poly={_fmt(want)}"
                rep.record(f"d={d} N={n_lab.name} p={p}", ok, detail)
    return rep


def verify_riedtmann(alg: HallAlgebra, budget: int, primes: tuple[int, ...] = (2, 3)) -> SuiteReport:
    """Two-layer chains reduce to single subobject counts, and the count of
    canonical-chain filtrations matches the slice point count through the
    automorphism factors."""
    rep = SuiteReport("riedtmann")
    ctx = alg.ctx
    table = alg.table
    for d in dims_in_budget(ctx, budget):
        labels = ctx.enumerate_labels(d)
        for x_lab in labels:
            for p in primes:
                counts = {}
                for e in _sub_dims(d):
                    counts.update(table.subquot_counts(x_lab, e, p))
                for (a_lab, b_lab), cnt in sorted(counts.items()):
                    two_step = table.filtration_count(x_lab, (a_lab, b_lab), p)
                    rep.record(
                        f"d={d} X={x_lab.name} ({a_lab.name}|{b_lab.name}) p={p}",
                        two_step == cnt,
                        f"chain {two_step} != subcount {cnt}",
                    )
        for n_lab in labels:
            chain = table.canonical_chain(n_lab)
            for p in primes:
                sc = slice_census(ctx, n_lab, p)
                ftab = table.filtration_table(chain, p)
                aut_prod = 1
                for layer in alg.layer_labels(n_lab):
                    if layer.total_dim:
                        aut_prod *= ctx.aut_order_poly(layer)(p)
                for m_lab in labels:
                    lhs = ftab.get(m_lab, 0) * aut_prod
                    rhs = ctx.aut_order_poly(m_lab)(p) * sc.get(m_lab, 0)
                    rep.record(
                        f"d={d} N={n_lab.name} M={m_lab.name} p={p} slice-count",
                        lhs == rhs,
                        f"{lhs} != {rhs}",
                    )
    return rep


def verify_hall_assoc(alg: HallAlgebra, budget: int = 5, trials: int = 50, seed: int = 0) -> SuiteReport:
    """Exact associativity on seeded random label triples."""
    rep = SuiteReport("hall-assoc")
    ctx = alg.ctx
    rng = random.Random(seed)
    pool = ctx.labels_up_to(max(1, budget - 2))
    count = 0
    while count < trials:
        a, b, c = (rng.choice(pool) for _ in range(3))
        if sum(add_dim(add_dim(a.dim, b.dim), c.dim)) > budget:
            continue
        count += 1
        ea, eb, ec = (alg.basis_element(x) for x in (a, b, c))
        left = alg.product(alg.product(ea, eb), ec)
        right = alg.product(ea, alg.product(eb, ec))
        rep.record(
            f"({a.name})({b.name})({c.name})",
            left == right,
            "products differ",
        )
    return rep


def verify_monic(alg: HallAlgebra, budget: int) -> SuiteReport:
    """Nonzero generalized Hall polynomials have leading coefficient one."""
    rep = SuiteReport("monic")
    ctx = alg.ctx
    for d in dims_in_budget(ctx, budget):
        for n_lab in ctx.enumerate_labels(d):
            table = alg.table.generalized_table(n_lab)
            for m_lab, poly in sorted(table.items()):
                if poly.is_zero:
                    continue
                rep.record(
                    f"d={d} F^{m_lab.name}(chain {n_lab.name})",
                    poly.leading == 1,
                    f"leading {poly.leading}",
                )
    return rep


def verify_orthogonality(ctx: QuiverContext, budget: int, primes: tuple[int, ...]) -> SuiteReport:
    rep = SuiteReport("orthogonality")
    for d in dims_in_budget(ctx, budget):
        for n_lab in ctx.enumerate_labels(d):
            for p in primes:
                r = orthogonality_check(ctx, n_lab, p)
                rep.record(
                    f"d={d} N={n_lab.name} p={p}",
                    r.ok,
                    f"dims {r.tangent_dim}+{r.fiber_dim} vs {r.ambient_dim}, pairing {r.pairing_ok}",
                )
    return rep


def run_suite(
    alg: HallAlgebra,
    suite: str,
    budget: int,
    primes: tuple[int, ...],
    seed: int = 0,
) -> SuiteReport:
    if suite == "row-sum":
        return verify_row_sum(alg, budget)
    if suite == "triangular":
        return verify_triangular(alg, budget)
    if suite == "involution":
        return verify_involution(alg, budget)
    if suite == "three-route":
        return verify_three_route(alg, budget, primes)
    if suite == "riedtmann":
        return verify_riedtmann(alg, min(budget, 4), tuple(p for p in primes if p <= 3) or (2, 3))
    if suite == "hall-assoc":
        return verify_hall_assoc(alg, budget=max(budget, 3), seed=seed)
    if suite == "monic":
        return verify_monic(alg, budget)
    raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITE_NAMES)}")


def _sub_dims(d: DimVec) -> list[DimVec]:
    out = [()]
    for x in d:
        out = [t + (y,) for t in out for y in range(x + 1)]
    return out


def _fmt(counts: dict) -> str:
    return "{" + ", ".join(f"{k.name}:{v}" for k, v in sorted(counts.items())) + "}"
