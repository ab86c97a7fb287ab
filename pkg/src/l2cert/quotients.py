"""Finite quotients of the free factors and induced finite-dimensional matrices.

Each free factor is sent to a finite permutation group ``G``; the product
group acts on ``R[G1] (x) R[G2] (x) R[G3]`` through left regular
representations.  Besides materialising induced matrices, this module splits
each regular representation into real irreducible blocks, which is what lets
the spectral code handle representation dimensions in the hundreds of
thousands.
"""
from __future__ import annotations

import functools
import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .complexes import ChainComplex, GroupRingMatrix, entry_is_zero
from .group_algebra import FactoredElement, GroupRingElement

Perm = tuple


def _compose(g: Perm, h: Perm) -> Perm:
    """The permutation x -> g(h(x))."""
    return tuple(g[x] for x in h)


def _inverse(g: Perm) -> Perm:
    out = [0] * len(g)
    for i, x in enumerate(g):
        out[x] = i
    return tuple(out)


@dataclass(frozen=True, eq=False)
class FiniteQuotient:
    """Finite permutation group generated by the images of a1 and a2.

    ``mul[g, h]`` is the index of the product g h (apply h first), ``inv``
    the index of inverses, and ``gens`` the indices of a1, a2, a1^-1, a2^-1.
    """

    label: str
    degree: int
    images: tuple
    elements: tuple
    mul: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)
    gens: tuple = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, perm: Perm) -> int:
        return self._lookup()[tuple(perm)]

    @functools.cache
    def _lookup(self) -> dict:
        return {g: i for i, g in enumerate(self.elements)}

    def word_index(self, w) -> int:
        """Index of the image of a reduced free word."""
        return self._word_index(tuple(w))

    @functools.cache
    def _word_index(self, w: tuple) -> int:
        if not w:
            return 0
        head = self._word_index(w[:-1])
        l = w[-1]
        g = self.gens[{1: 0, 2: 1, -1: 2, -2: 3}[l]]
        return int(self.mul[head, g])

    def is_generating_pair_trivial(self) -> bool:
        return self.order == 1

    def one_line(self) -> list[list[int]]:
        return [[x + 1 for x in p] for p in self.images]

    def __hash__(self) -> int:
        return hash((self.label, self.images))

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteQuotient) and self.images == other.images and self.label == other.label


def close_group(images: Sequence[Sequence[int]], label: str = "", one_based: bool = False) -> FiniteQuotient:
    """Enumerate the group generated by two permutations.

    Breadth-first from the identity; each new layer is sorted by the
    permutations' one-line notation.
    """
    imgs = [tuple(int(x) - (1 if one_based else 0) for x in p) for p in images]
    if len(imgs) != 2:
        raise ValueError("exactly two generator images are required")
    n = len(imgs[0])
    for p in imgs:
        if len(p) != n or sorted(p) != list(range(n)):
            raise ValueError(f"not a permutation of degree {n}: {p}")
    gen_perms = [imgs[0], imgs[1], _inverse(imgs[0]), _inverse(imgs[1])]
    ident = tuple(range(n))
    elements = [ident]
    seen = {ident}
    layer = [ident]
    while layer:
        new = set()
        for g in layer:
            for s in gen_perms:
                h = _compose(g, s)
                if h not in seen:
                    new.add(h)
        layer = sorted(new)
        seen.update(layer)
        elements.extend(layer)
    order = len(elements)
    lookup = {g: i for i, g in enumerate(elements)}
    E = np.array(elements, dtype=np.int64).reshape(order, n)
    mul = np.empty((order, order), dtype=np.int64)
    for a in range(order):
        comp = E[a][E]  # row h: g_a o g_h
        mul[a] = [lookup[tuple(r)] for r in comp.tolist()]
    inv = np.array([lookup[_inverse(g)] for g in elements], dtype=np.int64)
    gens = tuple(lookup[p] for p in gen_perms)
    return FiniteQuotient(label or f"perm{n}", n, tuple(imgs), tuple(elements), mul, inv, gens)


@dataclass(frozen=True)
class QuotientTriple:
    """One finite quotient per free factor."""

    q1: FiniteQuotient
    q2: FiniteQuotient
    q3: FiniteQuotient
    label: str = ""

    @property
    def factors(self) -> tuple:
        return (self.q1, self.q2, self.q3)

    def quotient(self, s: int) -> FiniteQuotient:
        return self.factors[s - 1]

    @property
    def dim(self) -> int:
        return self.q1.order * self.q2.order * self.q3.order

    def dim_for(self, factors: Sequence[int]) -> int:
        return math.prod(self.quotient(s).order for s in factors)

    def to_dict(self) -> dict:
        return {"label": self.label, "orders": [q.order for q in self.factors], "images": [q.one_line() for q in self.factors]}


def trivial_quotient() -> FiniteQuotient:
    return close_group([(0,), (0,)], "trivial")


# ------------------------------------------------------------------- families

def _cycle(m: int, n: int | None = None) -> tuple:
    n = n or m
    return tuple(list(range(1, m)) + [0] + list(range(m, n)))


def sym_quotient(m: int) -> FiniteQuotient:
    t = tuple([1, 0] + list(range(2, m)))
    return close_group([t, _cycle(m)], f"sym{m}")


def cyclic_quotient(n: int, alpha: int = 2) -> FiniteQuotient:
    t = _cycle(n)
    ta = tuple((x + alpha) % n for x in range(n))
    return close_group([ta, t], f"cyclic{n}" + ("" if alpha == 2 else f"^{alpha}"))


def dihedral_quotient(p: int) -> FiniteQuotient:
    refl = tuple((-x) % p for x in range(p))
    return close_group([refl, _cycle(p)], f"dihedral{p}")


def symswap_quotient(m: int) -> FiniteQuotient:
    """A generating pair of S_m exchanged by conjugation with an involution.

    The first pair (a1, involution) in lexicographic order whose conjugate
    a2 differs from a1 and generates the full symmetric group.
    """
    full = math.factorial(m)
    perms = sorted(itertools.permutations(range(m)))
    invols = [t for t in perms if t != tuple(range(m)) and _compose(t, t) == tuple(range(m))]
    for a1 in perms[1:]:
        for t in invols:
            a2 = _compose(t, _compose(a1, t))
            if a2 == a1:
                continue
            q = close_group([a1, a2], f"symswap{m}")
            if q.order == full:
                return q
    raise ValueError(f"no swap-symmetric generating pair for S_{m}")


def random_quotient(n: int, rng: np.random.Generator, tag: str) -> FiniteQuotient:
    a = tuple(int(x) for x in rng.permutation(n))
    b = tuple(int(x) for x in rng.permutation(n))
    return close_group([a, b], tag)


def _range(text: str) -> list[int]:
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text.strip())
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if a > b:
            raise ValueError(f"empty range {text!r}")
        return list(range(a, b + 1))
    return [int(v) for v in text.split(",")]


def quotient_list(desc: str, seed: int = 0) -> list[FiniteQuotient]:
    """Single-factor quotients named by a family descriptor."""
    out: list[FiniteQuotient] = []
    for part in desc.split(";"):
        part = part.strip()
        kind, sep, arg = part.partition(":")
        if not sep or not arg:
            raise ValueError(f"malformed family descriptor {part!r}; expected kind:args")
        try:
            if kind == "sym":
                out += [sym_quotient(m) for m in _range(arg)]
            elif kind == "symswap":
                out += [symswap_quotient(m) for m in _range(arg)]
            elif kind == "cyclic":
                ns, _, alpha = arg.partition(":")
                a = int(alpha) if alpha else 2
                out += [cyclic_quotient(n, a) for n in _range(ns)]
            elif kind == "dihedral":
                out += [dihedral_quotient(p) for p in _range(arg)]
            elif kind == "random":
                n, count = (int(v) for v in arg.split(","))
                rng = np.random.default_rng(seed)
                out += [random_quotient(n, rng, f"random{n}#{c}") for c in range(count)]
            else:
                raise ValueError(f"unknown family kind {kind!r}")
        except ValueError as exc:
            raise ValueError(f"malformed family descriptor {part!r}: {exc}") from None
    for q in out:
        if any(m < 1 for m in [q.degree]):
            raise ValueError(f"bad degree in {desc!r}")
    return out


def quotient_family(desc: str, seed: int = 0) -> list[QuotientTriple]:
    """Triples applying each listed quotient to all three factors."""
    return [QuotientTriple(q, q, q, f"{desc}|{q.label}") for q in quotient_list(desc, seed)]


# ---------------------------------------------------------- exact induction

def element_vector(q: FiniteQuotient, x: GroupRingElement, s: int, dtype=float) -> np.ndarray:
    """Image in R[G] of an element supported in factor ``s``."""
    v = np.zeros(q.order, dtype=dtype)
    for g, c in x.terms.items():
        v[q.word_index(g[s - 1])] += c if dtype is object else float(c)
    return v


def regular_matrix(q: FiniteQuotient, v: np.ndarray) -> np.ndarray:
    """Matrix of left multiplication by sum_g v[g] g on R[G]."""
    # M[i, j] = v[g] where g h_j = h_i, i.e. g = h_i h_j^-1
    return v[q.mul[:, q.inv]]


def _kron_index(perms: list[np.ndarray]) -> np.ndarray:
    idx = perms[0]
    for p in perms[1:]:
        idx = np.add.outer(idx * len(p), p).ravel()
    return idx


@dataclass
class InducedMatrix:
    """Finite-dimensional image of a group-ring matrix.

    ``matrix`` is the floating point version.  For matrices with plain
    group-ring entries, ``numerators / denominator`` is the same matrix with
    exact integer data; factored entries are kept exact modulo primes
    through ``modular``.
    """

    matrix: sp.csr_matrix
    cells: tuple
    dim: int
    numerators: sp.csr_matrix | None = None
    denominator: int = 1
    source: GroupRingMatrix | None = field(default=None, repr=False)
    quotients: tuple = ()
    factors: tuple = (1, 2, 3)

    @property
    def shape(self) -> tuple:
        return self.matrix.shape

    def is_exact(self) -> bool:
        return self.numerators is not None

    def modular(self, p: int) -> np.ndarray:
        """Dense residues mod ``p`` of the exact matrix."""
        if self.numerators is not None:
            inv = pow(self.denominator % p, -1, p)
            A = self.numerators.toarray() % p
            return (A * inv) % p
        return induce_modular(self.source, self.quotients, p, self.factors)

    def exact_product(self, other: "InducedMatrix") -> tuple[sp.csr_matrix, int]:
        return (self.numerators @ other.numerators).tocsr(), self.denominator * other.denominator


def _used_quotients(Q: QuotientTriple, factors: Sequence[int]) -> list[tuple[int, FiniteQuotient]]:
    return [(s, Q.quotient(s)) for s in factors]


def induce(M: GroupRingMatrix, Q: QuotientTriple, factors: Sequence[int] = (1, 2, 3)) -> InducedMatrix:
    """Left regular action of each entry on the tensor of the factor group algebras."""
    used = _used_quotients(Q, factors)
    D = math.prod(q.order for _, q in used)
    factored = M.has_factored()
    rows, cols, data, fdata = [], [], [], []
    den = 1
    if not factored:
        for row in M.entries:
            for x in row:
                for c in x.terms.values():
                    den = den * c.denominator // math.gcd(den, c.denominator)
    dense_blocks = []
    base = np.arange(D)
    for i in range(M.rows):
        for j in range(M.cols):
            x = M[i, j]
            if entry_is_zero(x):
                continue
            if isinstance(x, FactoredElement):
                dense_blocks.append((i, j, _factored_block(x, used)))
                continue
            for g, c in x.terms.items():
                for s in range(1, 4):
                    if g[s - 1] and s not in factors:
                        raise ValueError(f"entry uses factor {s} outside {tuple(factors)}")
                perms = [q.mul[q.word_index(g[s - 1])] for s, q in used]
                r = _kron_index(perms) if perms else np.zeros(1, dtype=np.int64)
                rows.append(i * D + r)
                cols.append(j * D + base)
                data.append(np.full(D, int(c * den), dtype=np.int64))
                fdata.append(np.full(D, float(c)))
    shape = (M.rows * D, M.cols * D)
    if factored:
        A = sp.lil_matrix(shape)
        for i, j, blk in dense_blocks:
            A[i * D:(i + 1) * D, j * D:(j + 1) * D] = blk
        F = A.tocsr()
        if rows:
            F = F + sp.csr_matrix((np.concatenate(fdata), (np.concatenate(rows), np.concatenate(cols))), shape=shape)
        return InducedMatrix(F.tocsr(), M.shape, D, None, 1, M, tuple(q for _, q in used), tuple(factors))
    if rows:
        r, c = np.concatenate(rows), np.concatenate(cols)
        N = sp.csr_matrix((np.concatenate(data), (r, c)), shape=shape, dtype=np.int64)
        F = sp.csr_matrix((np.concatenate(fdata), (r, c)), shape=shape)
    else:
        N = sp.csr_matrix(shape, dtype=np.int64)
        F = sp.csr_matrix(shape)
    N.sum_duplicates()
    N.eliminate_zeros()
    F.sum_duplicates()
    F.eliminate_zeros()
    return InducedMatrix(F, M.shape, D, N, den, M, tuple(q for _, q in used), tuple(factors))


def _factored_block(x: FactoredElement, used) -> np.ndarray:
    D = math.prod(q.order for _, q in used)
    out = np.zeros((D, D))
    for c, comps in x.terms:
        blk = np.array([[float(c)]])
        for s, q in used:
            blk = np.kron(blk, regular_matrix(q, element_vector(q, comps[s - 1], s)))
        for s in range(1, 4):
            if s not in [t for t, _ in used] and factor_vector_nontrivial(comps[s - 1]):
                raise ValueError(f"entry uses factor {s} outside the complex")
        out += blk
    return out


def factor_vector_nontrivial(x: GroupRingElement) -> bool:
    return any(any(g) for g in x.terms)


_EXACT_VECTORS: dict = {}


def exact_vector(q: FiniteQuotient, x: GroupRingElement, s: int) -> list:
    """Image in Q[G] of an element supported in factor ``s``, as Fractions."""
    key = (id(x), q, s)
    hit = _EXACT_VECTORS.get(key)
    if hit is not None and hit[0] is x:
        return hit[1]
    v = [Fraction(0)] * q.order
    for g, c in x.terms.items():
        v[q.word_index(g[s - 1])] += c
    if len(_EXACT_VECTORS) > 4096:
        _EXACT_VECTORS.clear()
    _EXACT_VECTORS[key] = (x, v)
    return v


def _mod_vector(q: FiniteQuotient, x: GroupRingElement, s: int, p: int) -> np.ndarray:
    v = exact_vector(q, x, s)
    return np.array([c.numerator % p * pow(c.denominator, -1, p) % p for c in v], dtype=np.int64)


def _kron_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    # entries below 2^31 keep every product below 2^62
    return (A[:, None, :, None] * B[None, :, None, :] % p).reshape(A.shape[0] * B.shape[0], A.shape[1] * B.shape[1])


def induce_modular(M: GroupRingMatrix, quotients: Sequence[FiniteQuotient], p: int, factors: Sequence[int] | None = None) -> np.ndarray:
    """Dense residues mod ``p`` of an induced matrix with exact entries."""
    if factors is None:
        factors = (1, 2, 3)
    used = list(zip(factors, quotients))
    D = math.prod(q.order for q in quotients)
    out = np.zeros((M.rows * D, M.cols * D), dtype=np.int64)
    for i in range(M.rows):
        for j in range(M.cols):
            x = M[i, j]
            if entry_is_zero(x):
                continue
            fx = x if isinstance(x, FactoredElement) else FactoredElement.from_element(x)
            blk = np.zeros((D, D), dtype=np.int64)
            for c, comps in fx.terms:
                cm = c.numerator % p * pow(c.denominator % p, -1, p) % p
                t = np.array([[cm]], dtype=np.int64)
                for s, q in used:
                    t = _kron_mod(t, regular_matrix(q, _mod_vector(q, comps[s - 1], s, p)), p)
                blk = (blk + t) % p
            out[i * D:(i + 1) * D, j * D:(j + 1) * D] = blk
    return out


def induce_complex(C: ChainComplex, Q: QuotientTriple) -> dict[int, InducedMatrix]:
    return {p: induce(C.boundary(p), Q, C.factors) for p in range(1, C.top + 1)}


# ------------------------------------------------- real irreducible blocks

@dataclass(frozen=True, eq=False)
class IrrepClass:
    """A real irreducible constituent of the regular representation.

    ``rho[g]`` is the ``d x d`` orthogonal matrix of group element ``g``;
    ``mult`` counts the copies inside R[G].
    """

    rho: np.ndarray
    mult: int
    trivial: bool

    @property
    def dim(self) -> int:
        return self.rho.shape[1]


def _right_regular_symmetric(q: FiniteQuotient, coef: np.ndarray) -> np.ndarray:
    # R_g delta_h = delta_{h g}: commutes with the left regular action
    n = q.order
    X = np.zeros((n, n))
    cols = np.arange(n)
    for g in range(n):
        np.add.at(X, (q.mul[:, g], cols), coef[g])
        np.add.at(X, (q.mul[:, q.inv[g]], cols), coef[g])
    return X


@functools.lru_cache(maxsize=64)
def decompose(q: FiniteQuotient, seed: int = 0, tol: float = 1e-7) -> tuple[IrrepClass, ...]:
    """Split R[G] into real irreducible blocks.

    Eigenspaces of a random symmetric element of the right regular action
    are invariant under the left action and generically irreducible.  Every
    eigenspace is checked for invariance, and eigenspaces with the same
    character are merged into one class with a multiplicity.
    """
    n = q.order
    for attempt in range(8):
        rng = np.random.default_rng(seed + 1000 * attempt)
        X = _right_regular_symmetric(q, rng.standard_normal(n))
        w, V = np.linalg.eigh(X)
        scale = max(1.0, float(np.abs(w).max()))
        cuts = np.flatnonzero(np.diff(w) > tol * scale) + 1
        groups = np.split(np.arange(n), cuts)
        classes: dict[tuple, list] = {}
        ok = True
        left = q.mul[q.inv]  # left[g, i] = index of g^-1 h_i
        for idx in groups:
            U = V[:, idx]
            rho = np.einsum("ia,gib->gab", U, U[left])
            for a in q.gens[:2]:
                err = np.abs(U[left[a]] - U @ rho[a]).max() if n > 1 else 0.0
                if err > 1e-8:
                    ok = False
                    break
            if not ok:
                break
            chi = np.round(np.einsum("gaa->g", rho), 6) + 0.0
            key = (len(idx),) + tuple(chi.tolist())
            if key in classes:
                classes[key][1] += 1
            else:
                classes[key] = [rho, 1]
        if not ok:
            continue
        out = []
        for key, (rho, m) in classes.items():
            triv = rho.shape[1] == 1 and bool(np.allclose(rho[:, 0, 0], 1.0))
            out.append(IrrepClass(rho, m, triv))
        out.sort(key=lambda c: (not c.trivial, c.dim, -c.mult))
        if sum(c.mult * c.dim for c in out) != n:
            continue
        return tuple(out)
    raise RuntimeError(f"block decomposition of {q.label} failed")
