"""Betti estimates over quotient families and the construction of Y.

Side convention: group-ring matrices act on column vectors from the left,
and the finite models use left regular representations.  With this
convention the kernel elements of d = [a1 - 1, a2 - 1] satisfy
(a1 - 1) u1 + (a2 - 1) u2 = 0.
"""
from __future__ import annotations

import itertools
import logging
import math
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .complexes import (
    TRIPLES,
    ChainComplex,
    GroupRingMatrix,
    attach_cells,
    coordinate_gamma,
    pi2_basis,
    tensor_complex,
    wedge_sphere,
    build_X,
)
from .group_algebra import FactoredElement, GroupRingElement, factor_word, gen
from .quotients import FiniteQuotient, QuotientTriple, element_vector, quotient_family, regular_matrix
from .spectral import (
    KERNEL_TOL,
    SpectralError,
    ball_words,
    betti_exact,
    block_homology,
    block_singular_values,
    spectral_projector,
)

log = logging.getLogger(__name__)

EXACT_LIMIT = 20000
DENSE_EXACT_LIMIT = 2.5e7
DEFAULT_CONSTRUCTION = "cyclic:9"


class CertificationError(RuntimeError):
    """Hard failure: an exact identity was violated or two methods disagree."""


# ------------------------------------------------------------- Betti tables

@dataclass
class BettiRow:
    label: str
    dim: int
    kernel: list
    normalized: list
    lowest: list
    lam_max: list
    euler: int
    euler_expected: int
    exact_kernel: list | None = None
    exact_methods: list | None = None
    exact_note: str = ""
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def max_normalized(self) -> float:
        return max(self.normalized)

    def to_dict(self) -> dict:
        return {
            "label": self.label, "D": self.dim, "kernel": self.kernel,
            "normalized": [float(v) for v in self.normalized], "lowest": self.lowest,
            "lam_max": self.lam_max, "euler": self.euler, "euler_expected": self.euler_expected,
            "exact_kernel": self.exact_kernel, "exact_methods": self.exact_methods, "exact_note": self.exact_note,
            "seconds": round(self.seconds, 3), **self.extra,
        }


@dataclass
class BettiTable:
    complex: str
    degrees: tuple
    chi: int
    rows: list

    def summary(self) -> dict:
        out = {}
        for p in range(len(self.degrees)):
            vals = [r.normalized[p] for r in self.rows]
            out[str(p)] = {
                "first": vals[0] if vals else None,
                "last": vals[-1] if vals else None,
                "nonincreasing": all(b <= a for a, b in zip(vals, vals[1:])),
                "strictly_decreasing": all(b < a for a, b in zip(vals, vals[1:])),
            }
        return out

    def to_dict(self) -> dict:
        return {"complex": self.complex, "degrees": list(self.degrees), "chi": self.chi,
                "rows": [r.to_dict() for r in self.rows], "summary": self.summary()}


def betti_row(C: ChainComplex, Q: QuotientTriple, k_low: int = 6, exact_limit: int = EXACT_LIMIT,
              composite: bool = False, tol: float = KERNEL_TOL) -> BettiRow:
    t0 = time.perf_counter()
    res = block_homology(C, Q, k_low=k_low, tol=tol, composite=composite)
    D = res.dim
    euler = sum((-1) ** p * k for p, k in enumerate(res.kernel))
    expected = C.euler_characteristic() * D
    if euler != expected:
        raise CertificationError(f"{C.name} over {Q.label}: Euler identity {euler} != {expected}")
    row = BettiRow(Q.label, D, res.kernel, [k / D for k in res.kernel], res.lowest, res.lam_max, euler, expected)
    if composite:
        row.extra.update({
            "sigma_min_d3": res.sigma_min_d3, "sigma_min_d3_reduced": res.sigma_min_d3_reduced,
            "composite_sigma_min": res.composite_sigma_min,
            "composite_sigma_min_reduced": res.composite_sigma_min_reduced,
        })
    largest = max(C.degrees) * D
    dense = max((C.degrees[p - 1] * C.degrees[p] * D * D for p in range(1, C.top + 1)), default=0)
    if largest <= exact_limit and dense <= DENSE_EXACT_LIMIT:
        kex, info = betti_exact(C, Q)
        row.exact_kernel, row.exact_methods = kex, info["methods"]
        if kex != res.kernel:
            raise CertificationError(f"{C.name} over {Q.label}: numeric kernels {res.kernel} != exact {kex}")
    elif largest <= exact_limit:
        row.exact_note = "exact cross-check skipped: dense elimination beyond memory budget"
    row.seconds = time.perf_counter() - t0
    return row


def luck_betti(C: ChainComplex, family: Sequence[QuotientTriple], k_low: int = 6, exact_limit: int = EXACT_LIMIT,
               composite: bool = False, workers: int = 1) -> BettiTable:
    """Normalized kernel dimensions of every Laplacian across a quotient family."""
    if not family:
        raise ValueError("family must be nonempty")
    job = lambda Q: betti_row(C, Q, k_low, exact_limit, composite)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(job, family))
    else:
        rows = [job(Q) for Q in family]
    return BettiTable(C.name, C.degrees, C.euler_characteristic(), rows)


def hopf_accounting(betti_x: BettiTable, betti_k: BettiTable) -> dict:
    """Compare normalized b2(X) with (number of pi_2 generators) - normalized b3(K)."""
    lx = [r.label for r in betti_x.rows]
    lk = [r.label for r in betti_k.rows]
    if lx != lk:
        raise ValueError("hopf_accounting needs tables over the same family")
    gens = betti_k.degrees[3] if len(betti_k.degrees) > 3 else 0
    rows = []
    for rx, rk in zip(betti_x.rows, betti_k.rows):
        b2 = rx.normalized[2] if len(rx.normalized) > 2 else 0.0
        b3 = rk.normalized[3] if len(rk.normalized) > 3 else 0.0
        rows.append({"label": rx.label, "D": rx.dim, "b2_X": b2, "gens_minus_b3_K": gens - b3,
                     "deviation": abs(b2 - (gens - b3))})
    devs = [r["deviation"] for r in rows]
    return {
        "rows": rows,
        "target": f"{gens - 1} = {gens} - 1" if gens else "0 = 0",
        "deviation_first": devs[0],
        "deviation_last": devs[-1],
        "deviation_decreased": devs[-1] < devs[0] if len(devs) > 1 else None,
    }


def convolve(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def kunneth_check(C: ChainComplex, D: ChainComplex, family: Sequence[QuotientTriple], exact_limit: int = EXACT_LIMIT) -> dict:
    """Per-quotient Betti numbers of C (x) D against the convolution of the factors' Betti numbers."""
    T = tensor_complex(C, D)
    rows = []
    for Q in family:
        bc = betti_row(C, Q, exact_limit=exact_limit).kernel
        bd = betti_row(D, Q, exact_limit=exact_limit).kernel
        bt = betti_row(T, Q, exact_limit=exact_limit).kernel
        conv = convolve(bc, bd)
        rows.append({"label": Q.label, "b_C": bc, "b_D": bd, "b_tensor": bt, "convolution": conv, "equal": bt == conv})
    return {"tensor": T.name, "degrees": list(T.degrees), "rows": rows, "all_equal": all(r["equal"] for r in rows)}


# ----------------------------------------------------------- kernel elements

def representatives(q: FiniteQuotient) -> list[tuple]:
    """A shortest free word for every element of ``q`` (breadth-first)."""
    words: list = [None] * q.order
    words[0] = ()
    todo = deque([0])
    while todo:
        g = todo.popleft()
        for l, h in zip((1, 2, -1, -2), q.gens):
            k = int(q.mul[g, h])
            if words[k] is None:
                words[k] = words[g] + (l,)
                todo.append(k)
    return words


def _lift(q: FiniteQuotient, v: np.ndarray, s: int, den_limit: int | None) -> GroupRingElement:
    reps = representatives(q)
    terms = {}
    for k, c in enumerate(v):
        if abs(c) < 1e-15:
            continue
        f = Fraction(float(c))
        if den_limit is not None:
            f = f.limit_denominator(den_limit)
        terms[factor_word(s, reps[k])] = f
    return GroupRingElement(terms)


def dirichlet_green(r: int, den_limit: int = 10**6) -> tuple[dict, bool]:
    """Solve the free-group Laplacian with Dirichlet conditions outside the radius-r ball.

    Returns the solution as exact rationals (recovered from a sparse solve with
    a denominator limit) and whether it matches the closed form
    3/8 (3^-|g| - 3^-(r+1)).
    """
    words = ball_words(r)
    index = {w: i for i, w in enumerate(words)}
    rows, cols, vals = [], [], []
    for j, w in enumerate(words):
        rows.append(j), cols.append(j), vals.append(4.0)
        for l in (1, -1, 2, -2):
            nb = w[:-1] if w and w[-1] == -l else w + (l,)
            k = index.get(nb)
            if k is not None:
                rows.append(k), cols.append(j), vals.append(-1.0)
    n = len(words)
    A = sp.csc_matrix((vals, (rows, cols)), shape=(n, n))
    rhs = np.zeros(n)
    rhs[0] = 1.0
    xi = spla.spsolve(A, rhs)
    green = {w: Fraction(float(xi[i])).limit_denominator(den_limit) for i, w in enumerate(words)}
    closed = all(v == Fraction(3, 8) * (Fraction(1, 3 ** len(w)) - Fraction(1, 3 ** (r + 1))) for w, v in green.items())
    return green, closed


@dataclass
class FactorKernel:
    """Kernel elements of one free factor and the 2 x 2 projector they come from."""

    s: int
    P: tuple  # ((P11, P12), (P21, P22)) as group ring elements in factor s
    residual: float
    identity_coefficient: float
    vectors: tuple | None = None
    projector: dict | None = None

    @property
    def u1(self) -> GroupRingElement:
        return self.P[0][0]

    @property
    def u2(self) -> GroupRingElement:
        return self.P[1][0]


@dataclass
class KernelElements:
    mode: str
    scale: object
    factors: tuple
    meta: dict = field(default_factory=dict)

    def factor(self, s: int) -> FactorKernel:
        return self.factors[s - 1]

    @property
    def residuals(self) -> list[float]:
        return [f.residual for f in self.factors]


def _l2(x: GroupRingElement) -> float:
    return math.sqrt(sum(float(c) ** 2 for c in x.terms.values()))


def quotient_kernel(q: FiniteQuotient, s: int = 1, den_limit: int | None = None, nodes: int = 64) -> FactorKernel:
    """Kernel elements on the regular representation of one finite quotient."""
    n = q.order
    eye = np.eye(n)
    e1 = np.zeros(n)
    e1[q.gens[0]] = 1
    e2 = np.zeros(n)
    e2[q.gens[1]] = 1
    A1 = regular_matrix(q, e1) - eye
    A2 = regular_matrix(q, e2) - eye
    d = np.hstack([A1, A2])
    res = spectral_projector(d.T @ d, nodes=nodes)
    P = res.P
    delta = np.zeros(2 * n)
    delta[0] = 1.0
    u = P @ delta
    u1, u2 = u[:n], u[n:]
    residual = float(np.linalg.norm(A1 @ u1 + A2 @ u2))
    blocks = ((P[:n, 0], P[:n, n]), (P[n:, 0], P[n:, n]))
    Pel = tuple(tuple(_lift(q, v, s, den_limit) for v in row) for row in blocks)
    return FactorKernel(s, Pel, residual, float(u1[0]), (u1, u2), res.report())


def ball_kernel(r: int, s: int = 1, den_limit: int = 10**6) -> FactorKernel:
    """Kernel elements from the Dirichlet problem on the radius-r ball.

    With G the Dirichlet Green element, P = 1 - d* G d, i.e.
    P_ij = delta_ij - (a_i - 1)* G (a_j - 1).  Coefficients are exact
    rationals supported on the radius r+2 ball.
    """
    green, closed = dirichlet_green(r, den_limit)
    G = GroupRingElement({factor_word(s, w): c for w, c in green.items()})
    A = [gen(s, 1) - 1, gen(s, 2) - 1]
    P = tuple(tuple((GroupRingElement.scalar(1) if i == j else GroupRingElement()) - A[i].involution() * G * A[j]
                    for j in range(2)) for i in range(2))
    P = tuple(tuple(GroupRingElement(x.terms, radius=r + 2) for x in row) for row in P)
    rel = A[0] * P[0][0] + A[1] * P[1][0]
    return FactorKernel(s, P, _l2(rel), float(P[0][0].coefficient(factor_word(s, ()))), None,
                        {"green_closed_form": closed, "radius": r, "support_radius": r + 2})


def solve_kernel_elements(scale, den_limit: int | None = 10**6, nodes: int = 64) -> KernelElements:
    """Kernel elements for all three factors.

    ``scale`` is an int (ball radius), a FiniteQuotient (used on every factor)
    or a QuotientTriple.
    """
    if isinstance(scale, int):
        fks = tuple(ball_kernel(scale, s, den_limit or 10**6) for s in (1, 2, 3))
        return KernelElements("ball", scale, fks, {"radius": scale, "green_closed_form": all(f.projector["green_closed_form"] for f in fks)})
    if isinstance(scale, FiniteQuotient):
        scale = QuotientTriple(scale, scale, scale, scale.label)
    if isinstance(scale, QuotientTriple):
        fks = tuple(quotient_kernel(scale.quotient(s), s, den_limit, nodes) for s in (1, 2, 3))
        return KernelElements("quotient", scale, fks, {"quotient": scale.label, "orders": [q.order for q in scale.factors]})
    raise ValueError(f"unsupported scale {scale!r}")


def swapped(q: FiniteQuotient) -> FiniteQuotient:
    """The same group with the roles of a1 and a2 exchanged."""
    from .quotients import close_group

    return close_group([q.images[1], q.images[0]], q.label + "~swap")


# ---------------------------------------------------------------------- y

def mu_elements(ke: KernelElements) -> list[FactoredElement]:
    """mu_ijk = u1_i u2_j u3_k, one factored element per triple (i, j, k)."""
    out = []
    for (i, j, k) in TRIPLES:
        comps = (ke.factor(1).P[i - 1][0], ke.factor(2).P[j - 1][0], ke.factor(3).P[k - 1][0])
        out.append(FactoredElement([(1, comps)]))
    return out


def factored_l2_sq(x: FactoredElement) -> float:
    """Squared l2 norm of a sum of pure tensors via per-factor inner products."""
    terms = x.terms
    cache: dict = {}

    def inner(a: GroupRingElement, b: GroupRingElement) -> float:
        key = (id(a), id(b))
        if key not in cache:
            small, big = (a, b) if len(a) <= len(b) else (b, a)
            bt = big.terms
            cache[key] = float(sum(c * bt.get(g, 0) for g, c in small.terms.items()))
        return cache[key]

    total = 0.0
    for c, ca in terms:
        for d, cb in terms:
            total += float(c * d) * inner(ca[0], cb[0]) * inner(ca[1], cb[1]) * inner(ca[2], cb[2])
    return max(total, 0.0)


def factored_vector(x, quotients: Sequence[FiniteQuotient]) -> np.ndarray:
    """Coefficient vector of an element in R[G1 x G2 x G3]."""
    fx = x if isinstance(x, FactoredElement) else FactoredElement.from_element(x)
    D = math.prod(q.order for q in quotients)
    out = np.zeros(D)
    for c, comps in fx.terms:
        v = np.array([float(c)])
        for s, q in enumerate(quotients, start=1):
            v = np.kron(v, element_vector(q, comps[s - 1], s))
        out += v
    return out


def build_y(ke: KernelElements) -> tuple[list[FactoredElement], float]:
    """Coefficients of y on the classes x_ijk and the norm of its boundary chain."""
    mu = mu_elements(ke)
    col = GroupRingMatrix(8, 1, [[m] for m in mu])
    chain = pi2_basis() @ col
    if ke.mode == "quotient":
        qs = ke.scale.factors
        sq = sum(float(np.sum(factored_vector(chain[r, 0], qs) ** 2)) for r in range(12))
    else:
        sq = sum(factored_l2_sq(chain[r, 0]) for r in range(12) if isinstance(chain[r, 0], FactoredElement))
    return mu, math.sqrt(sq)


# ------------------------------------------------------------------- gamma

@dataclass
class AttachingMatrix:
    gamma: GroupRingMatrix
    mode: str
    N: int | None
    provenance: dict

    def to_dict(self) -> dict:
        return {"mode": self.mode, "N": self.N, **self.provenance}


class GammaError(RuntimeError):
    pass


def _round_element(x: GroupRingElement, M: int) -> GroupRingElement:
    """Round every coefficient to the grid 1/M, ties to even."""
    return GroupRingElement({g: Fraction(round(c * M), M) for g, c in x.terms.items()}, radius=x.radius)


def _limit_element(x: GroupRingElement, den_limit: int) -> GroupRingElement:
    return GroupRingElement({g: c.limit_denominator(den_limit) for g, c in x.terms.items()}, radius=x.radius)


def gamma_from_projectors(Ps: Sequence) -> GroupRingMatrix:
    """[1 - P1 (x) P2 (x) P3 ; mu*] with mu*_ijk = P1_1i P2_1j P3_1k.

    Columns are indexed by (i', j', k'); row (i, j, k) of the upper block is
    delta - P1_{ii'} P2_{jj'} P3_{kk'}.
    """
    grid = []
    for (i, j, k) in TRIPLES:
        row = []
        for (a, b, c) in TRIPLES:
            pi = FactoredElement([(1, (Ps[0][i - 1][a - 1], Ps[1][j - 1][b - 1], Ps[2][k - 1][c - 1]))])
            row.append((GroupRingElement.scalar(1) if (i, j, k) == (a, b, c) else GroupRingElement()) - pi)
        grid.append(row)
    grid.append([FactoredElement([(1, (Ps[0][0][a - 1], Ps[1][0][b - 1], Ps[2][0][c - 1]))]) for (a, b, c) in TRIPLES])
    return GroupRingMatrix(9, 8, grid)


def construct_gamma(x1: ChainComplex | None, ke: KernelElements | None, mode: str = "rational", N: int | None = None,
                    den_limit: int = 10**6, construction: QuotientTriple | None = None,
                    gamma: GroupRingMatrix | None = None) -> AttachingMatrix:
    """Attaching coordinates for the 3-cells of Y.

    ``mode`` is ``rational`` (per-factor coefficients limited to
    ``den_limit``), ``integer`` (per-factor coefficients rounded half-to-even
    to the grid 1/M and the whole matrix scaled by N = M^3), or
    ``coordinate`` (the negative control).  An explicit ``gamma`` may be
    passed for validation only.
    """
    if x1 is not None and x1.degrees[:3] != (1, 6, 13):
        raise ValueError("construct_gamma expects X v S2")
    construction = construction or quotient_family(DEFAULT_CONSTRUCTION)[0]
    prov: dict = {"construction_quotient": construction.label}
    if gamma is None:
        if mode == "coordinate":
            gamma = coordinate_gamma()
        else:
            if ke is None:
                raise ValueError("kernel elements required")
            prov.update({"kernel_mode": ke.mode, **{k: v for k, v in ke.meta.items()}})
            Ps = [f.P for f in ke.factors]
            if mode == "rational":
                Ps = [tuple(tuple(_limit_element(x, den_limit) for x in row) for row in P) for P in Ps]
                prov["denominator_limit"] = den_limit
                prov["max_denominator"] = max(c.denominator for P in Ps for row in P for x in row for c in x.terms.values())
                gamma = gamma_from_projectors(Ps)
            elif mode == "integer":
                if N is None:
                    raise ValueError("integer mode needs N")
                M = round(N ** (1 / 3))
                if M ** 3 != N:
                    raise ValueError("N must be a perfect cube (per-factor grid 1/M, N = M^3)")
                Ps = [tuple(tuple(_round_element(x, M) for x in row) for row in P) for P in Ps]
                g1 = gamma_from_projectors(Ps)
                gamma = GroupRingMatrix(9, 8, [[x * N for x in row] for row in g1.entries])
                prov.update({"rounding": "half-to-even per factor on grid 1/M", "M": M})
            else:
                raise ValueError(f"unknown mode {mode!r}")
    prov["mode"] = mode
    # blocks in which some factor acts trivially are rank deficient for every
    # gamma of this shape (there P = identity), so the check runs on the others
    scale = N if (mode == "integer" and N) else 1
    sv = block_singular_values(gamma, construction)
    red = (sv["sigma_min_reduced"] or 0.0) / scale
    prov.update({"induced_sigma_min_reduced": red, "induced_sigma_min": sv["sigma_min"] / scale,
                 "induced_rank": sv["rank"], "induced_column_deficiency": sv["column_deficiency"],
                 "induced_columns": 8 * construction.dim})
    if red < 1e-6:
        raise GammaError(f"attaching columns are rank deficient on {construction.label}: "
                         f"smallest singular value on nontrivial blocks {red:.3e}")
    return AttachingMatrix(gamma, mode, N if mode == "integer" else None, prov)


def build_Y(am: AttachingMatrix, name: str = "Y") -> ChainComplex:
    return attach_cells(wedge_sphere(build_X()), am.gamma, name=name)


def integer_gamma_search(ke: KernelElements, construction: QuotientTriple, rational_kernel: list,
                         max_k: int = 6) -> dict:
    """Smallest N = 10^(3k) whose rounded gamma keeps the construction-quotient homology.

    The composite singular value is measured for gamma_2 / N so that it is
    comparable with the rational attaching matrix.
    """
    tried = []
    for k in range(1, max_k + 1):
        N = 10 ** (3 * k)
        try:
            am = construct_gamma(None, ke, "integer", N=N, construction=construction)
        except GammaError as exc:
            tried.append({"N": N, "ok": False, "reason": str(exc)})
            continue
        Y = build_Y(am, "Y_int")
        res = block_homology(Y, construction, composite=True)
        sig = (res.composite_sigma_min_reduced or 0.0) / N
        ok = sig > 1e-3 and res.kernel == rational_kernel
        tried.append({"N": N, "ok": ok, "kernel": res.kernel, "composite_sigma_min_reduced": sig})
        if ok:
            return {"success": True, "N": N, "tried": tried}
    return {"success": False, "N": None, "tried": tried}


# ------------------------------------------------------------ certification

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"


def verdict_from_rows(rows: Sequence[dict], threshold: float = 0.05, min_members: int = 3) -> tuple[str, list]:
    """PASS/FAIL/INCONCLUSIVE from serialized Betti rows (a pure function)."""
    reasons = []
    if any(r.get("error") for r in rows):
        return INCONCLUSIVE, ["solver failure in at least one row"]
    if len(rows) < min_members:
        return INCONCLUSIVE, [f"only {len(rows)} family members (need {min_members})"]
    bad_euler = [r["label"] for r in rows if r["euler"] != 0]
    if bad_euler:
        reasons.append(f"Euler identity violated in {bad_euler}")
    maxes = [max(r["normalized"]) for r in rows]
    if not all(b < a for a, b in zip(maxes, maxes[1:])):
        reasons.append("maximum normalized Betti number does not strictly decrease")
    ndeg = len(rows[0]["normalized"])
    for p in range(ndeg):
        vals = [r["normalized"][p] for r in rows]
        if not all(b <= a for a, b in zip(vals, vals[1:])):
            reasons.append(f"normalized b{p} increases along the family")
    if maxes[-1] >= threshold:
        reasons.append(f"final maximum normalized Betti number {maxes[-1]:.4f} >= {threshold}")
    return (FAIL, reasons) if reasons else (PASS, ["all conditions met"])


def certify_Y(Y: ChainComplex, family: Sequence[QuotientTriple], threshold: float = 0.05, min_members: int = 3,
              exact_limit: int = EXACT_LIMIT, workers: int = 1) -> dict:
    """Betti table of Y with composite singular values and a verdict."""
    def job(Q):
        try:
            return betti_row(Y, Q, exact_limit=exact_limit, composite=True).to_dict()
        except SpectralError as exc:
            return {"label": Q.label, "D": Q.dim, "error": str(exc)}

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(job, family))
    else:
        rows = [job(Q) for Q in family]
    verdict, reasons = verdict_from_rows(rows, threshold, min_members)
    return {"complex": Y.name, "rows": rows, "verdict": verdict, "reasons": reasons,
            "threshold": threshold, "min_members": min_members}
