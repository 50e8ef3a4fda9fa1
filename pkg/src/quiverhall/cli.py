"""Command line front end.

Exit codes: 0 success, 1 verification failure, 2 configuration or input
error. All numeric output is exact; polynomials are serialized as
ascending integer coefficient arrays in q.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import QuiverHallError
from .hallalg import HallAlgebra
from .hallnums import HallTable
from .orbits import DEFAULT_PRIMES, QuiverContext
from .quiver import QuiverSpec, parse_quiver
from .slices import preprojective_census, slice_census
from .verify import SUITE_NAMES, run_suite

SCHEMA = "quiverhall.result/1"


@dataclass
class RunConfig:
    quiver_path: str
    dim: tuple[int, ...] | None
    primes: tuple[int, ...]
    seed: int
    fmt: str
    budget: int
    cache_dir: str | None
    sub: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.seed < 0:
            raise QuiverHallError("seed must be non-negative")
        if len(set(self.primes)) != len(self.primes):
            raise QuiverHallError("duplicate primes")


@dataclass
class ResultTable:
    command: str
    quiver_hash: str
    labels: list[str]
    data: dict
    provenance: dict
    schema: str = SCHEMA

    def to_json(self) -> str:
        payload = {
            "schema": self.schema,
            "command": self.command,
            "quiver_hash": self.quiver_hash,
            "labels": self.labels,
            "data": self.data,
            "provenance": self.provenance,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_tsv(self) -> str:
        lines = [f"# {self.command} quiver={self.quiver_hash}"]
        for key, value in _flatten(self.data):
            lines.append(f"{key}\t{value}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.command} (quiver {self.quiver_hash})"]
        for key, value in _flatten(self.data):
            lines.append(f"  {key}: {value}")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "tsv":
            return self.to_tsv()
        return self.to_text()


def _flatten(data, prefix=""):
    if isinstance(data, dict):
        for k in sorted(data, key=str):
            newp = f"{k}" if not prefix else f"{prefix}/{k}"
            yield from _flatten(data[k], newp)
    else:
        yield prefix, data


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quiverhall",
        description="Exact bar-involution coefficients of a Dynkin quiver, three ways.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_dim=False):
        p.add_argument("--quiver", required=True, help="path to a quiver file")
        p.add_argument("--dim", required=need_dim, default=None, help="dimension vector, e.g. 1,1")
        p.add_argument("--primes", default=",".join(map(str, DEFAULT_PRIMES)))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", dest="fmt", choices=("text", "json", "tsv"), default="text")
        p.add_argument("--max-total-dim", dest="budget", type=int, default=4)
        p.add_argument("--cache", dest="cache_dir", default=None)

    common(sub.add_parser("roots", help="positive roots"))
    common(sub.add_parser("indecs", help="directed order and Hom matrix"))
    common(sub.add_parser("labels", help="orbit labels of one dimension type"), need_dim=True)
    p_hall = sub.add_parser("hall-poly", help="two-step Hall polynomials")
    common(p_hall, need_dim=True)
    p_hall.add_argument("--sub", required=True, help="dimension vector of the subobject")
    common(sub.add_parser("bar-matrix", help="bar coefficient matrix"), need_dim=True)
    common(sub.add_parser("slice-census", help="slice point counts"), need_dim=True)
    common(sub.add_parser("preproj-census", help="preprojective fiber point counts"), need_dim=True)
    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", choices=SUITE_NAMES)
    common(p_verify)
    return parser


def _parse_dim(text: str | None):
    if text is None:
        return None
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise QuiverHallError(f"bad dimension vector {text!r}") from exc


def _load(config: RunConfig) -> QuiverSpec:
    path = Path(config.quiver_path)
    if not path.exists():
        raise QuiverHallError(f"quiver file {path} does not exist")
    return parse_quiver(path.read_text())


def _context(config: RunConfig, quiver: QuiverSpec) -> QuiverContext:
    return QuiverContext(quiver, primes=config.primes, seed=config.seed)


def _algebra(config: RunConfig, ctx: QuiverContext) -> HallAlgebra:
    if len(config.primes) < 3:
        raise QuiverHallError("interpolation requires at least 3 primes")
    return HallAlgebra(ctx, HallTable(ctx, cache_dir=config.cache_dir))


def _provenance(config: RunConfig, table: HallTable | None = None) -> dict:
    prov = {"primes": list(config.primes), "seed": config.seed}
    if table is not None:
        prov["sampled_primes"] = sorted(table.primes_used)
    return prov


def cmd_roots(config: RunConfig) -> ResultTable:
    quiver = _load(config)
    from .quiver import positive_roots

    roots = positive_roots(quiver)
    data = {"roots": [list(r) for r in roots], "count": len(roots)}
    return ResultTable("roots", quiver.content_hash(), [], data, _provenance(config))


def cmd_indecs(config: RunConfig) -> ResultTable:
    quiver = _load(config)
    ctx = _context(config, quiver)
    names = [ctx.label(tuple(1 if t == s else 0 for t in range(ctx.nu))).name for s in range(ctx.nu)]
    data = {
        "order": names,
        "roots": [list(r) for r in ctx.roots],
        "hom_matrix": [list(row) for row in ctx.hom],
    }
    return ResultTable("indecs", quiver.content_hash(), names, data, _provenance(config))


def cmd_labels(config: RunConfig) -> ResultTable:
    quiver = _load(config)
    ctx = _context(config, quiver)
    labels = ctx.enumerate_labels(config.dim)
    data = {
        lab.name: {
            "mults": list(lab.mults),
            "dim": list(lab.dim),
            "end_dim": lab.end_dim,
            "ext_dim": lab.ext_dim,
        }
        for lab in labels
    }
    return ResultTable(
        "labels", quiver.content_hash(), [l.name for l in labels], data, _provenance(config)
    )


def cmd_hall_poly(config: RunConfig) -> ResultTable:
    quiver = _load(config)
    ctx = _context(config, quiver)
    alg = _algebra(config, ctx)
    data = {}
    for x_lab in ctx.enumerate_labels(config.dim):
        table = alg.table.hall_poly_table(x_lab, config.sub)
        for (a_lab, b_lab), poly in sorted(table.items()):
            data[f"{x_lab.name}|{a_lab.name}|{b_lab.name}"] = list(poly.coeffs)
    labels = [l.name for l in ctx.enumerate_labels(config.dim)]
    return ResultTable(
        "hall-poly", quiver.content_hash(), labels, data, _provenance(config, alg.table)
    )


def cmd_bar_matrix(config: RunConfig) -> ResultTable:
    quiver = _load(config)
    ctx = _context(config, quiver)
    alg = _algebra(config, ctx)
    bm = alg.bar_matrix(config.dim)
    data = {
        f"{m.name},{n.name}": list(bm.entry(m, n).coeffs)
        for m in bm.labels
        for n in bm.labels
    }
    return ResultTable(
        "bar-matrix",
        quiver.content_hash(),
        [l.name for l in bm.labels],
        data,
        _provenance(config, alg.table),
    )


def cmd_census(config: RunConfig, which: str) -> ResultTable:
    quiver = _load(config)
    ctx = _context(config, quiver)
    fn = slice_census if which == "slice-census" else preprojective_census
    data = {}
    labels = ctx.enumerate_labels(config.dim)
    for n_lab in labels:
        per_prime = {}
        for p in config.primes:
            counts = fn(ctx, n_lab, p)
            per_prime[str(p)] = {m.name: c for m, c in sorted(counts.items())}
        data[n_lab.name] = per_prime
    return ResultTable(
        which, quiver.content_hash(), [l.name for l in labels], data, _provenance(config)
    )


def cmd_verify(config: RunConfig, suite: str) -> tuple[int, str]:
    quiver = _load(config)
    ctx = _context(config, quiver)
    alg = _algebra(config, ctx)
    report = run_suite(alg, suite, config.budget, config.primes, seed=config.seed)
    lines = list(report.lines())
    passed = sum(1 for _, ok, _ in report.cases if ok)
    lines.append(f"{'PASS' if report.ok else 'FAIL'} {suite}: {passed}/{len(report.cases)} cases")
    return (0 if report.ok else 1), "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cache = args.cache_dir or os.environ.get("QUIVERHALL_CACHE") or None
        config = RunConfig(
            quiver_path=args.quiver,
            dim=_parse_dim(args.dim),
            primes=tuple(int(x) for x in args.primes.split(",")),
            seed=args.seed,
            fmt=args.fmt,
            budget=args.budget,
            cache_dir=cache,
            sub=_parse_dim(getattr(args, "sub", None)),
        )
        if args.command == "verify":
            code, text = cmd_verify(config, args.suite)
            sys.stdout.write(text)
            return code
        if args.command == "roots":
            table = cmd_roots(config)
        elif args.command == "indecs":
            table = cmd_indecs(config)
        elif args.command == "labels":
            table = cmd_labels(config)
        elif args.command == "hall-poly":
            table = cmd_hall_poly(config)
        elif args.command == "bar-matrix":
            table = cmd_bar_matrix(config)
        elif args.command in ("slice-census", "preproj-census"):
            table = cmd_census(config, args.command)
        else:  # pragma: no cover
            raise QuiverHallError(f"unknown command {args.command}")
        sys.stdout.write(table.render(config.fmt))
        return 0
    except QuiverHallError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
