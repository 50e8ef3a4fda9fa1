"""Quiver description, Dynkin validation, Euler form and positive roots.

Vertices keep their declaration order; every dimension vector, root and
label in the package is indexed in that order.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .errors import DimensionMismatchError, QuiverParseError

DimVec = tuple[int, ...]


@dataclass(frozen=True)
class QuiverSpec:
    """A validated Dynkin quiver: ordered vertices and directed arrows."""

    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str], ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        idx = {v: i for i, v in enumerate(self.vertices)}
        if len(idx) != len(self.vertices):
            raise QuiverParseError("syntax", "duplicate vertex id")
        object.__setattr__(self, "_index", idx)
        for s, t in self.arrows:
            if s not in idx or t not in idx:
                raise QuiverParseError("unknown-vertex", f"arrow {s}->{t} uses unknown vertex")
        _check_dynkin(self)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex_index(self, v: str) -> int:
        return self._index[v]

    @property
    def arrow_indices(self) -> tuple[tuple[int, int], ...]:
        return tuple((self._index[s], self._index[t]) for s, t in self.arrows)

    def canonical_text(self) -> str:
        lines = ["vertices: " + " ".join(self.vertices)]
        lines.append("arrows: " + " ".join(f"{s}->{t}" for s, t in self.arrows))
        return "\n".join(lines) + "\n"

    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]


def _check_dynkin(q: QuiverSpec) -> None:
    """Underlying graph must be a disjoint union of A/D/E diagrams."""
    n = q.n
    adj = {i: set() for i in range(n)}
    seen_edges = set()
    for s, t in q.arrow_indices:
        if s == t:
            raise QuiverParseError("non-dynkin", "loop arrow")
        e = frozenset((s, t))
        if e in seen_edges:
            raise QuiverParseError("non-dynkin", "multiple edge (includes 2-cycles)")
        seen_edges.add(e)
        adj[s].add(t)
        adj[t].add(s)
    visited = [False] * n
    for start in range(n):
        if visited[start]:
            continue
        comp = []
        stack = [start]
        visited[start] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if not visited[w]:
                    visited[w] = True
                    stack.append(w)
        edges = sum(len(adj[v] & set(comp)) for v in comp) // 2
        if edges != len(comp) - 1:
            raise QuiverParseError("non-dynkin", "component contains a cycle")
        _classify_tree(comp, adj)


def _classify_tree(comp: list[int], adj: dict[int, set]) -> str:
    degs = {v: len(adj[v]) for v in comp}
    if any(d > 3 for d in degs.values()):
        raise QuiverParseError("non-dynkin", "vertex of degree > 3")
    branch = [v for v in comp if degs[v] == 3]
    if len(branch) > 1:
        raise QuiverParseError("non-dynkin", "more than one branch vertex")
    if not branch:
        return f"A{len(comp)}"
    b = branch[0]
    arms = []
    for w in adj[b]:
        length = 1
        prev, cur = b, w
        while len(adj[cur]) == 2:
            nxt = next(x for x in adj[cur] if x != prev)
            prev, cur = cur, nxt
            length += 1
        arms.append(length)
    arms.sort()
    a, bb, c = arms
    if a == 1 and bb == 1:
        return f"D{len(comp)}"
    if (a, bb) == (1, 2) and c in (2, 3, 4):
        return f"E{len(comp)}"
    raise QuiverParseError("non-dynkin", f"branch arm lengths {arms} are not A/D/E")


def parse_quiver(text: str) -> QuiverSpec:
    """Parse the quiver file format.

    Lines: `vertices: id id ...` and `arrows: src->dst ...`; `#` starts a
    comment; tokens are whitespace separated.
    """
    vertices: list[str] = []
    arrows: list[tuple[str, str]] = []
    saw_vertices = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise QuiverParseError("syntax", f"line {lineno}: expected 'vertices:' or 'arrows:'")
        key, rest = line.split(":", 1)
        key = key.strip()
        toks = rest.split()
        if key == "vertices":
            saw_vertices = True
            for tok in toks:
                if not tok.isalnum():
                    raise QuiverParseError("syntax", f"line {lineno}: bad vertex id {tok!r}")
                vertices.append(tok)
        elif key == "arrows":
            for tok in toks:
                if "->" not in tok:
                    raise QuiverParseError("syntax", f"line {lineno}: bad arrow {tok!r}")
                s, t = tok.split("->", 1)
                if not s.isalnum() or not t.isalnum():
                    raise QuiverParseError("syntax", f"line {lineno}: bad arrow {tok!r}")
                arrows.append((s, t))
        else:
            raise QuiverParseError("syntax", f"line {lineno}: unknown key {key!r}")
    if not saw_vertices:
        raise QuiverParseError("syntax", "missing 'vertices:' line")
    return QuiverSpec(tuple(vertices), tuple(arrows))


def check_dim(q: QuiverSpec, d: DimVec) -> DimVec:
    d = tuple(int(x) for x in d)
    if len(d) != q.n:
        raise DimensionMismatchError(f"dimension vector length {len(d)} != {q.n}")
    if any(x < 0 for x in d):
        raise DimensionMismatchError("negative entry in dimension vector")
    return d


def euler_form(q: QuiverSpec, d: DimVec, e: DimVec) -> int:
    """<d,e> = sum_i d_i e_i - sum_{a: i->j} d_i e_j."""
    d = check_dim(q, d)
    e = check_dim(q, e)
    val = sum(di * ei for di, ei in zip(d, e))
    for i, j in q.arrow_indices:
        val -= d[i] * e[j]
    return val


def add_dim(d: DimVec, e: DimVec) -> DimVec:
    return tuple(a + b for a, b in zip(d, e))


def sub_dim(d: DimVec, e: DimVec) -> DimVec:
    return tuple(a - b for a, b in zip(d, e))


def scale_dim(c: int, d: DimVec) -> DimVec:
    return tuple(c * a for a in d)


def leq_dim(d: DimVec, e: DimVec) -> bool:
    return all(a <= b for a, b in zip(d, e))


def positive_roots(q: QuiverSpec) -> list[DimVec]:
    """All positive roots, generated by simple reflections, lex sorted.

    Uses the symmetrized Cartan matrix of the underlying graph, so the
    result does not depend on the orientation.
    """
    n = q.n
    cartan = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j in q.arrow_indices:
        cartan[i][j] -= 1
        cartan[j][i] -= 1

    def reflect(i: int, r: DimVec) -> DimVec:
        c = sum(cartan[i][j] * r[j] for j in range(n))
        out = list(r)
        out[i] -= c
        return tuple(out)

    simples = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    roots = set(simples)
    frontier = list(simples)
    while frontier:
        nxt = []
        for r in frontier:
            for i in range(n):
                s = reflect(i, r)
                if s not in roots and not any(x < 0 for x in s):
                    # reflections keep roots; discard the negatives
                    if all(x >= 0 for x in s):
                        roots.add(s)
                        nxt.append(s)
        frontier = nxt
    return sorted(roots)
