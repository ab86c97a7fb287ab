"""Chain complexes of free modules over the group ring of pi.

Chains are column vectors and boundary matrices act on the left.  A complex
records which free factors its group elements live in (``factors``), so the
wedge of two circles over factor 1 and the presentation complex of pi share
one representation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .group_algebra import (
    FactoredElement,
    GroupRingElement,
    commutator,
    fox_boundary,
    gen,
    parse,
    serialize,
)

Entry = "GroupRingElement | FactoredElement"

GEN_LABELS = tuple(f"e^{s}_{i}" for s in (1, 2, 3) for i in (1, 2))
PAIRS = ((1, 2), (1, 3), (2, 3))
TWO_CELLS = tuple((k, l, i, j) for (k, l) in PAIRS for i in (1, 2) for j in (1, 2))
TRIPLES = tuple(itertools.product((1, 2), repeat=3))


def _zero() -> GroupRingElement:
    return GroupRingElement()


def entry_is_zero(x) -> bool:
    """Cheap structural zero test (never expands factored elements)."""
    if isinstance(x, FactoredElement):
        return len(x) == 0
    return x.is_zero()


class GroupRingMatrix:
    """Dense rows x cols grid of group ring entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence[Sequence] | None = None):
        if entries is None:
            entries = [[_zero() for _ in range(cols)] for _ in range(rows)]
        grid = tuple(tuple(r) for r in entries)
        if len(grid) != rows or any(len(r) != cols for r in grid):
            raise ValueError(f"entry grid does not have shape {rows}x{cols}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", grid)

    def __setattr__(self, name, value):
        raise AttributeError("GroupRingMatrix is immutable")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> list:
        return [self.entries[i][j] for i in range(self.rows)]

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = _zero()
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if entry_is_zero(a) or entry_is_zero(b):
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return GroupRingMatrix(self.rows, other.cols, out)

    def adjoint(self) -> "GroupRingMatrix":
        return GroupRingMatrix(self.cols, self.rows, [[self.entries[i][j].involution() for i in range(self.rows)] for j in range(self.cols)])

    def is_zero(self, limit: int | None = 2_000_000) -> bool:
        for row in self.entries:
            for x in row:
                if isinstance(x, FactoredElement):
                    if not x.is_zero(limit):
                        return False
                elif not x.is_zero():
                    return False
        return True

    def nonzero_count(self) -> int:
        return sum(not entry_is_zero(x) for row in self.entries for x in row)

    def has_factored(self) -> bool:
        return any(isinstance(x, FactoredElement) for row in self.entries for x in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupRingMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        for a, b in zip(itertools.chain(*self.entries), itertools.chain(*other.entries)):
            if isinstance(a, FactoredElement) or isinstance(b, FactoredElement):
                a = a.expand() if isinstance(a, FactoredElement) else a
                b = b.expand() if isinstance(b, FactoredElement) else b
            if a != b:
                return False
        return True

    def __repr__(self) -> str:
        return f"GroupRingMatrix({self.rows}x{self.cols}, {self.nonzero_count()} nonzero)"

    @staticmethod
    def zeros(rows: int, cols: int) -> "GroupRingMatrix":
        return GroupRingMatrix(rows, cols)

    @staticmethod
    def identity(n: int) -> "GroupRingMatrix":
        return GroupRingMatrix(n, n, [[GroupRingElement.scalar(1) if i == j else _zero() for j in range(n)] for i in range(n)])

    @staticmethod
    def block(blocks: Sequence[Sequence["GroupRingMatrix"]]) -> "GroupRingMatrix":
        rows = []
        for brow in blocks:
            h = brow[0].rows
            for r in range(h):
                row = []
                for b in brow:
                    row.extend(b.entries[r])
                rows.append(row)
        return GroupRingMatrix(len(rows), len(rows[0]) if rows else 0, rows)


@dataclass(frozen=True)
class ChainComplex:
    """Free chain complex ``C_top -> ... -> C_0`` over the group ring.

    ``boundaries[p]`` maps degree p to degree p-1 and has shape
    ``degrees[p-1] x degrees[p]``.  ``factorizations[p] = (L, R)`` records
    that ``boundaries[p] = L @ R``; it lets ``verify_d2`` certify
    ``d_{p-1} d_p = 0`` from ``d_{p-1} L = 0`` without expanding large
    factored entries.
    """

    name: str
    factors: tuple
    degrees: tuple
    boundaries: dict
    labels: tuple
    factorizations: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.labels) != len(self.degrees):
            raise ValueError("one label list per degree")
        for p, n in enumerate(self.degrees):
            if len(self.labels[p]) != n:
                raise ValueError(f"degree {p}: {n} cells but {len(self.labels[p])} labels")
        for p in range(1, len(self.degrees)):
            d = self.boundaries.get(p)
            if d is None or d.shape != (self.degrees[p - 1], self.degrees[p]):
                raise ValueError(f"boundary({p}) must have shape {(self.degrees[p - 1], self.degrees[p])}")

    @property
    def top(self) -> int:
        return len(self.degrees) - 1

    def boundary(self, p: int) -> GroupRingMatrix:
        return self.boundaries[p]

    def euler_characteristic(self) -> int:
        return sum((-1) ** p * n for p, n in enumerate(self.degrees))

    def serialize(self) -> str:
        return serialize_complex(self)


def verify_d2(C: ChainComplex, limit: int | None = 2_000_000) -> dict:
    """Exact check that consecutive boundaries compose to zero.

    Returns ``{p: method}`` for every pair ``d_{p-1} d_p``; raises
    ``AssertionError`` on a nonzero product.  The method is ``"expanded"``
    when the product was computed entrywise and ``"factorized"`` when it
    follows from a recorded factorization ``d_p = L R`` with ``d_{p-1} L = 0``.
    """
    out = {}
    for p in range(2, C.top + 1):
        prev = C.boundary(p - 1)
        fac = C.factorizations.get(p)
        if fac is not None:
            L, R = fac
            if not (prev @ L).is_zero():
                raise AssertionError(f"d{p - 1} * L is nonzero for {C.name}")
            if C.boundary(p).has_factored() and not _product_is_structural(L, R, C.boundary(p)):
                raise AssertionError(f"boundary({p}) is not the recorded product")
            out[p] = "factorized"
            continue
        if not (prev @ C.boundary(p)).is_zero(limit):
            raise AssertionError(f"d{p - 1} d{p} is nonzero for {C.name}")
        out[p] = "expanded"
    return out


def _product_is_structural(L: GroupRingMatrix, R: GroupRingMatrix, M: GroupRingMatrix) -> bool:
    # recompute the product with the same term order; factored entries then agree term by term
    P = L @ R
    for a, b in zip(itertools.chain(*P.entries), itertools.chain(*M.entries)):
        if isinstance(a, FactoredElement) and isinstance(b, FactoredElement):
            if a.terms != b.terms:
                return False
        elif isinstance(a, FactoredElement) or isinstance(b, FactoredElement):
            fa = a if isinstance(a, FactoredElement) else FactoredElement.from_element(a)
            fb = b if isinstance(b, FactoredElement) else FactoredElement.from_element(b)
            if fa.terms != fb.terms:
                return False
        elif a != b:
            return False
    return True


# ------------------------------------------------------------------ builders

def point_complex(factors: tuple = ()) -> ChainComplex:
    return ChainComplex("pt", tuple(factors), (1,), {}, (("e0",),))


def build_B(s: int = 1) -> ChainComplex:
    """Wedge of two circles carrying the free factor ``s``."""
    d1 = GroupRingMatrix(1, 2, [[gen(s, 1) - 1, gen(s, 2) - 1]])
    return ChainComplex(f"B{s}", (s,), (1, 2), {1: d1}, (("e0",), (f"e^{s}_1", f"e^{s}_2")))


def _two_cell_label(c) -> str:
    k, l, i, j = c
    return f"e^{k}{l}_{i}{j}"


def build_X() -> ChainComplex:
    """Presentation complex of pi with 6 generators and 12 commutator relators."""
    d1 = GroupRingMatrix(1, 6, [[gen(s, i) - 1 for (s, i) in ((1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2))]])
    cols = [fox_boundary(commutator(k, i, l, j)) for (k, l, i, j) in TWO_CELLS]
    d2 = GroupRingMatrix(6, 12, [[cols[c][r] for c in range(12)] for r in range(6)])
    labels = (("e0",), GEN_LABELS, tuple(_two_cell_label(c) for c in TWO_CELLS))
    return ChainComplex("X", (1, 2, 3), (1, 6, 12), {1: d1, 2: d2}, labels)


def pi2_basis() -> GroupRingMatrix:
    """The 8 spherical classes x_ijk as degree-2 chains (12 x 8)."""
    idx = {c: n for n, c in enumerate(TWO_CELLS)}
    grid = [[_zero() for _ in range(8)] for _ in range(12)]
    for col, (i, j, k) in enumerate(TRIPLES):
        grid[idx[(2, 3, j, k)]][col] = gen(1, i) - 1
        grid[idx[(1, 3, i, k)]][col] = -(gen(2, j) - 1)
        grid[idx[(1, 2, i, j)]][col] = gen(3, k) - 1
    return GroupRingMatrix(12, 8, grid)


def triple_label(t) -> str:
    return "x_" + "".join(str(v) for v in t)


def build_K() -> ChainComplex:
    X = build_X()
    labels = X.labels + (tuple(f"e_{i}{j}{k}" for (i, j, k) in TRIPLES),)
    bd = dict(X.boundaries)
    bd[3] = pi2_basis()
    return ChainComplex("K", X.factors, X.degrees + (8,), bd, labels)


def wedge_sphere(C: ChainComplex) -> ChainComplex:
    """Wedge with a 2-sphere: one extra degree-2 cell with zero boundary."""
    if C.top < 2:
        raise ValueError("wedge_sphere needs a complex with degrees through 2")
    degrees = list(C.degrees)
    degrees[2] += 1
    labels = list(C.labels)
    labels[2] = tuple(labels[2]) + ("s2",)
    bd = dict(C.boundaries)
    d2 = C.boundary(2)
    bd[2] = GroupRingMatrix(d2.rows, d2.cols + 1, [list(r) + [_zero()] for r in d2.entries])
    if C.top >= 3:
        d3 = C.boundary(3)
        bd[3] = GroupRingMatrix(d3.rows + 1, d3.cols, list(d3.entries) + [[_zero()] * d3.cols])
    name = C.name + "vS2"
    return ChainComplex(name, C.factors, tuple(degrees), bd, tuple(labels))


def sphere_extension() -> GroupRingMatrix:
    """13 x 9 matrix sending pi_2 coordinates {x_ijk, s2} to degree-2 chains of X v S2."""
    P = pi2_basis()
    grid = [list(r) + [_zero()] for r in P.entries]
    grid.append([_zero()] * 8 + [GroupRingElement.scalar(1)])
    return GroupRingMatrix(13, 9, grid)


def attach_cells(C: ChainComplex, gamma: GroupRingMatrix, name: str = "Y") -> ChainComplex:
    """Attach 3-cells along pi_2 coordinates given by the columns of ``gamma``."""
    if gamma.rows != 9:
        raise ValueError(f"gamma must have 9 rows (coordinates x_ijk and s2), got {gamma.rows}")
    if C.degrees[:3] != (1, 6, 13) or C.top != 2:
        raise ValueError("attach_cells expects the 2-complex X v S2")
    E = sphere_extension()
    d3 = E @ gamma
    bd = dict(C.boundaries)
    bd[3] = d3
    labels = C.labels + (tuple(f"z{n + 1}" for n in range(gamma.cols)),)
    return ChainComplex(name, C.factors, C.degrees + (gamma.cols,), bd, labels, {3: (E, gamma)})


def coordinate_gamma() -> GroupRingMatrix:
    """Columns selecting the 8 classes x_ijk (the negative control)."""
    grid = [[GroupRingElement.scalar(1) if r == c else _zero() for c in range(8)] for r in range(9)]
    return GroupRingMatrix(9, 8, grid)


def tensor_complex(C: ChainComplex, D: ChainComplex, name: str | None = None) -> ChainComplex:
    """Tensor product with the sign rule d(x y) = dx y + (-1)^|x| x dy.

    Degree-n cells are ordered by the first factor's degree from n down to
    0, with the first factor's cells as the outer loop.
    """
    if set(C.factors) & set(D.factors):
        raise ValueError("tensor factors must act through disjoint free factors")
    top = C.top + D.top
    cells: list[list[tuple]] = []
    for n in range(top + 1):
        cn = []
        for p in range(min(n, C.top), -1, -1):
            q = n - p
            if q > D.top:
                continue
            for a in range(C.degrees[p]):
                for b in range(D.degrees[q]):
                    cn.append((p, a, q, b))
        cells.append(cn)
    index = [{c: k for k, c in enumerate(cn)} for cn in cells]
    bd = {}
    for n in range(1, top + 1):
        grid = [[_zero() for _ in cells[n]] for _ in cells[n - 1]]
        for col, (p, a, q, b) in enumerate(cells[n]):
            if p >= 1:
                dC = C.boundary(p)
                for a2 in range(C.degrees[p - 1]):
                    x = dC[a2, a]
                    if not entry_is_zero(x):
                        grid[index[n - 1][(p - 1, a2, q, b)]][col] = x
            if q >= 1:
                dD = D.boundary(q)
                sign = -1 if p % 2 else 1
                for b2 in range(D.degrees[q - 1]):
                    y = dD[b2, b]
                    if not entry_is_zero(y):
                        grid[index[n - 1][(p, a, q - 1, b2)]][col] = y * sign
        bd[n] = GroupRingMatrix(len(cells[n - 1]), len(cells[n]), grid)
    labels = tuple(tuple(f"{C.labels[p][a]}⊗{D.labels[q][b]}" for (p, a, q, b) in cn) for cn in cells)
    factors = tuple(sorted(set(C.factors) | set(D.factors)))
    return ChainComplex(name or f"({C.name}⊗{D.name})", factors, tuple(len(cn) for cn in cells), bd, labels)


def build_B3() -> ChainComplex:
    return tensor_complex(tensor_complex(build_B(1), build_B(2)), build_B(3), name="B1⊗B2⊗B3")


def build_complex(name: str) -> ChainComplex:
    """Named complexes understood by the command line."""
    table = {
        "X": build_X,
        "K": build_K,
        "X1": lambda: wedge_sphere(build_X()),
        "B": lambda: build_B(1),
        "BB": lambda: tensor_complex(build_B(1), build_B(2)),
        "B3": build_B3,
        "KvS2": lambda: attach_cells(wedge_sphere(build_X()), coordinate_gamma(), name="KvS2"),
    }
    if name not in table:
        raise ValueError(f"unknown complex {name!r}; choose from {sorted(table)}")
    return table[name]()


# ------------------------------------------------------------- serialization

def _entry_text(x) -> str:
    if isinstance(x, FactoredElement):
        return "F " + x.serialize()
    return serialize(x)


def _parse_factored(text: str) -> FactoredElement:
    if text == "0":
        return FactoredElement()
    terms = []
    for chunk in text.split(" ++ "):
        c, rest = chunk.split("*<", 1)
        comps = rest.rstrip(">").split(" ; ")
        terms.append((Fraction(c), tuple(parse(p) for p in comps)))
    return FactoredElement(terms)


def serialize_complex(C: ChainComplex) -> str:
    lines = [f"complex {C.name}", "factors " + " ".join(map(str, C.factors)), "degrees " + " ".join(map(str, C.degrees))]
    for p, labs in enumerate(C.labels):
        lines.append(f"labels {p} " + "\t".join(labs))
    for p in range(1, C.top + 1):
        d = C.boundary(p)
        for i in range(d.rows):
            for j in range(d.cols):
                x = d[i, j]
                if not entry_is_zero(x):
                    lines.append(f"entry {p} {i} {j} {_entry_text(x)}")
    return "\n".join(lines) + "\n"


def parse_complex(text: str) -> ChainComplex:
    name, factors, degrees = "", (), ()
    labels: dict[int, tuple] = {}
    entries: dict[int, dict] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, rest = line.partition(" ")
        if key == "complex":
            name = rest
        elif key == "factors":
            factors = tuple(int(v) for v in rest.split())
        elif key == "degrees":
            degrees = tuple(int(v) for v in rest.split())
        elif key == "labels":
            p, _, labs = rest.partition(" ")
            labels[int(p)] = tuple(labs.split("\t")) if labs else ()
        elif key == "entry":
            p, i, j, body = rest.split(" ", 3)
            x = _parse_factored(body[2:]) if body.startswith("F ") else parse(body)
            entries.setdefault(int(p), {})[(int(i), int(j))] = x
        else:
            raise ValueError(f"unknown record {key!r}")
    bd = {}
    for p in range(1, len(degrees)):
        grid = [[_zero() for _ in range(degrees[p])] for _ in range(degrees[p - 1])]
        for (i, j), x in entries.get(p, {}).items():
            grid[i][j] = x
        bd[p] = GroupRingMatrix(degrees[p - 1], degrees[p], grid)
    return ChainComplex(name, factors, degrees, bd, tuple(labels[p] for p in range(len(degrees))))
