"""Finite-dimensional spectral computations on induced complexes."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .complexes import ChainComplex, entry_is_zero
from .group_algebra import FactoredElement, GroupRingElement, factor_of, reduce_word, word_mul
from .quotients import (
    InducedMatrix,
    QuotientTriple,
    decompose,
    element_vector,
    induce,
    induce_complex,
    trivial_quotient,
)

log = logging.getLogger(__name__)

KERNEL_TOL = 1e-9
PRIMES = (2147483647, 2147483629, 2147483587)
# dense fraction-free elimination suffers coefficient growth on some
# structured matrices; above this many entries ranks are taken modulo PRIMES
FRACTION_FREE_LIMIT = 400_000


class SpectralError(RuntimeError):
    """Raised when an eigensolver or a gap assumption fails."""


@dataclass
class SpectrumSlice:
    dim: int
    kernel_dim: int
    lowest: list
    tolerance: float
    method: str

    def to_dict(self) -> dict:
        return {"dim": self.dim, "kernel_dim": self.kernel_dim, "lowest": [float(v) for v in self.lowest],
                "tolerance": self.tolerance, "method": self.method}


# ---------------------------------------------------------------- exact rank

def bareiss_rank(rows: Sequence[Sequence]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination on Python integers.

    Rational input is scaled row by row to integers first.
    """
    A = []
    for r in rows:
        r = [Fraction(v) for v in r]
        den = 1
        for v in r:
            den = den * v.denominator // math.gcd(den, v.denominator)
        A.append([int(v * den) for v in r])
    if not A:
        return 0
    m, n = len(A), len(A[0])
    rank, prev = 0, 1
    for col in range(n):
        piv = next((i for i in range(rank, m) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        p = A[rank][col]
        for i in range(rank + 1, m):
            a = A[i][col]
            row_i, row_r = A[i], A[rank]
            for j in range(col + 1, n):
                row_i[j] = (p * row_i[j] - a * row_r[j]) // prev
            row_i[col] = 0
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def _as_int_matrix(A) -> np.ndarray | None:
    if isinstance(A, InducedMatrix):
        return None if A.numerators is None else A.numerators
    if sp.issparse(A):
        A = A.tocsr()
        if np.issubdtype(A.dtype, np.integer):
            return A
        if np.all(A.data == np.round(A.data)):
            return A.astype(np.int64)
        return None
    A = np.asarray(A)
    if np.issubdtype(A.dtype, np.integer):
        return A
    if np.all(A == np.round(A)):
        return A.astype(np.int64)
    return None


def modular_rank(A, primes: Sequence[int] = PRIMES) -> int:
    """Largest rank mod the given primes (never above the rank over Q)."""
    import flint

    best = 0
    for p in primes:
        if isinstance(A, InducedMatrix):
            R = A.modular(p)
        else:
            R = A.toarray() if sp.issparse(A) else np.asarray(A)
            R = R % p
        if R.size == 0:
            return 0
        r = flint.nmod_mat(R.shape[0], R.shape[1], R.ravel().tolist(), p).rank()
        best = max(best, r)
    return best


def exact_rank(A, method: str = "auto") -> tuple[int, str]:
    """Rank over the rationals.

    Integer matrices go through fraction-free elimination (Bareiss for
    small ones, FLINT's fraction-free LU otherwise).  Matrices whose entries
    are factored rationals, or that are too large for dense integer
    elimination, use ranks modulo three 31-bit primes; the tag reports
    ``modular`` in that case.
    """
    import flint

    shape = A.shape
    if shape[0] == 0 or shape[1] == 0:
        return 0, "empty"
    M = _as_int_matrix(A)
    size = shape[0] * shape[1]
    if method == "modular" or M is None or (method == "auto" and size > FRACTION_FREE_LIMIT):
        return modular_rank(A), "modular"
    dense = M.toarray() if sp.issparse(M) else np.asarray(M)
    if method == "bareiss" or (method == "auto" and size <= 2500):
        return bareiss_rank(dense.tolist()), "bareiss"
    return flint.fmpz_mat(dense.shape[0], dense.shape[1], dense.ravel().tolist()).rank(), "fraction-free"


def betti_exact(C: ChainComplex, Q: QuotientTriple, induced: dict | None = None) -> tuple[list[int], dict]:
    """Betti numbers of the induced complex from exact ranks of boundaries."""
    induced = induced or induce_complex(C, Q)
    D = Q.dim_for(C.factors)
    ranks, methods = {0: 0, C.top + 1: 0}, {}
    for p in range(1, C.top + 1):
        ranks[p], methods[p] = exact_rank(induced[p])
    b = [C.degrees[p] * D - ranks[p] - ranks[p + 1] for p in range(C.top + 1)]
    return b, {"ranks": [ranks[p] for p in range(1, C.top + 1)], "methods": [methods[p] for p in range(1, C.top + 1)]}


# --------------------------------------------------------------- Laplacians

def laplacian(C: ChainComplex, p: int, Q: QuotientTriple, induced: dict | None = None, exact: bool = False):
    """Combinatorial Laplacian d_p* d_p + d_{p+1} d_{p+1}* of the induced complex.

    With ``exact=True`` and integral entries the result is an integer sparse
    matrix; otherwise floating point.
    """
    if not 0 <= p <= C.top:
        raise ValueError(f"degree {p} outside 0..{C.top}")
    induced = induced or induce_complex(C, Q)
    n = C.degrees[p] * Q.dim_for(C.factors)
    key = "numerators" if exact else "matrix"
    if exact and any(induced[k].numerators is None or induced[k].denominator != 1 for k in induced):
        raise ValueError("exact Laplacian needs integral boundaries")
    out = sp.csr_matrix((n, n), dtype=np.int64 if exact else float)
    if p >= 1:
        d = getattr(induced[p], key)
        out = out + (d.T @ d)
    if p + 1 <= C.top:
        d = getattr(induced[p + 1], key)
        out = out + (d @ d.T)
    if not exact:
        log.debug("laplacian %s p=%d converted to float, dim %d", C.name, p, n)
    return out.tocsr()


def _dense(M) -> np.ndarray:
    return M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)


def kernel_dim(M, mode: str = "numeric", tol: float = KERNEL_TOL) -> int:
    """Dimension of the kernel of a symmetric PSD matrix."""
    n = M.shape[0]
    if n == 0:
        return 0
    if mode == "exact":
        if _as_int_matrix(M) is None:
            # floats are dyadic rationals, so Fraction(float) is exact
            rows = [[Fraction(float(v)) for v in row] for row in _dense(M)]
            if n <= 200:
                return n - bareiss_rank(rows)
            den = math.lcm(*(v.denominator for row in rows for v in row))
            ints = np.array([[int(v * den) for v in row] for row in rows], dtype=object)
            if np.abs(ints).max() < 2**62:
                return n - exact_rank(ints.astype(np.int64))[0]
            return n - bareiss_rank(ints.tolist())
        return n - exact_rank(M)[0]
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    if n <= 6000:
        w = np.linalg.eigvalsh(_dense(M))
        if w.min() < -max(tol, tol * abs(w).max()) * 10:
            raise SpectralError(f"matrix is not positive semidefinite (min eigenvalue {w.min():.3e})")
        top = max(float(w.max()), 0.0)
        return int(np.sum(w < tol * max(top, 1e-300))) if top > 0 else n
    return _sparse_kernel_dim(sp.csr_matrix(M, dtype=float), tol)


def _sparse_kernel_dim(M: sp.csr_matrix, tol: float) -> int:
    top = _top_eigenvalue(M)
    if top <= 0:
        return M.shape[0]
    lam, _ = _deflated_smallest(M, top, cut=tol * top)
    return int(np.sum(lam < tol * top))


def _seeded(n: int, seed: int = 12345) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal(n)


def _top_eigenvalue(M: sp.csr_matrix, seed: int = 12345) -> float:
    # only the scale matters for the relative kernel cut, so a loose
    # tolerance is enough; Gershgorin's bound is the fallback
    n = M.shape[0]
    try:
        return float(spla.eigsh(M, k=1, which="LA", v0=_seeded(n, seed), return_eigenvectors=False,
                                maxiter=10 * n, tol=1e-4)[0])
    except spla.ArpackNoConvergence:
        return float(abs(M).sum(axis=1).max())


def _deflated_smallest(M: sp.csr_matrix, top: float, k: int | None = None, cut: float | None = None,
                       seed: int = 12345, batch: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Smallest eigenpairs of a PSD matrix by shift-invert Lanczos with deflation.

    A single Krylov sequence can miss copies of a repeated eigenvalue, so
    every round projects out the eigenvectors already found and searches
    again.  With ``cut`` the rounds continue until one finds nothing below
    the cut; with ``k`` until a round no longer changes the k smallest.
    """
    n = M.shape[0]
    # a shift just below zero, ten times the kernel cut, separates the
    # kernel from the small nonzero eigenvalues after inversion
    sigma = -10 * KERNEL_TOL * top if top > 0 else -1.0
    lu = spla.splu(sp.csc_matrix(M - sigma * sp.identity(n, format="csr")))
    V = np.zeros((n, 0))
    lams: list = []
    rnd = 0
    while True:
        m = min(batch if k is None else max(batch, k), n - V.shape[1] - 2)
        if m < 1:
            break

        def op(x, V=V):
            x = x - V @ (V.T @ x)
            y = lu.solve(x)
            return y - V @ (V.T @ y)

        A = spla.LinearOperator((n, n), matvec=op, dtype=float)
        v0 = _seeded(n, seed + rnd)
        v0 -= V @ (V.T @ v0)
        try:
            nu, U = spla.eigsh(A, k=m, which="LA", v0=v0, maxiter=10 * n, tol=1e-12)
        except spla.ArpackNoConvergence as exc:
            raise SpectralError(f"eigensolver did not converge within {10 * n} iterations") from exc
        keep = nu > 0
        lam = sigma + 1.0 / nu[keep]
        U = U[:, keep]
        rnd += 1
        if cut is not None:
            sel = lam < cut
            if not sel.any():
                lams += list(lam)
                break
            lams += list(lam[sel])
            V = np.linalg.qr(np.hstack([V, U[:, sel]]))[0]
            continue
        before = sorted(lams)[:k]
        lams += list(lam)
        V = np.linalg.qr(np.hstack([V, U]))[0]
        if len(before) >= k and lam.min() >= before[-1]:
            break
        if len(lams) >= n - 2:
            break
    return np.sort(np.array(lams)), V


def low_spectrum(M, k: int, tolerance: float = 1e-9, seed: int = 12345) -> np.ndarray:
    """The ``k`` smallest eigenvalues in ascending order."""
    n = M.shape[0]
    k = min(k, n)
    if k <= 0:
        return np.zeros(0)
    if n <= 6000 or k >= n - 1:
        return np.linalg.eigvalsh(_dense(M))[:k]
    A = sp.csr_matrix(M, dtype=float)
    lam, _ = _deflated_smallest(A, _top_eigenvalue(A, seed), k=k, seed=seed)
    return lam[:k]


def spectrum_slice(M, k: int = 6, tol: float = KERNEL_TOL, mode: str = "numeric") -> SpectrumSlice:
    kd = kernel_dim(M, mode, tol)
    low = low_spectrum(M, k) if M.shape[0] else np.zeros(0)
    return SpectrumSlice(M.shape[0], kd, [float(v) for v in low], tol, "exact-rank" if mode == "exact" else "iterative")


# -------------------------------------------------------------- projectors

@dataclass
class ProjectorResult:
    P: np.ndarray
    P_contour: np.ndarray
    rho: float
    smallest_nonzero: float
    contour_error: float
    idempotence: float
    symmetry: float
    annihilation: float

    def report(self) -> dict:
        return {"rho": self.rho, "smallest_nonzero": self.smallest_nonzero, "contour_error": self.contour_error,
                "idempotence": self.idempotence, "symmetry": self.symmetry, "annihilation": self.annihilation}


def spectral_projector(M, rho: float | None = None, nodes: int = 64, zero_tol: float = KERNEL_TOL) -> ProjectorResult:
    """Orthogonal projector onto ker M, twice.

    Once from an eigendecomposition and once by trapezoidal quadrature of
    the resolvent on the circle |z| = rho, where rho defaults to half the
    smallest nonzero eigenvalue.  The eigendecomposition projector is
    returned; the quadrature one is kept for comparison.
    """
    A = _dense(M)
    if A.dtype.kind == "c":
        A = (A + A.conj().T) / 2
    else:
        A = (A + A.T) / 2
    n = A.shape[0]
    w, V = np.linalg.eigh(A)
    scale = max(float(np.abs(w).max()), 1.0) if n else 1.0
    zero = np.abs(w) < zero_tol * scale
    nonzero = w[~zero]
    smallest = float(np.abs(nonzero).min()) if nonzero.size else math.inf
    if rho is None:
        rho = smallest / 2 if math.isfinite(smallest) else 1.0
    if not rho < smallest:
        raise SpectralError(f"no spectral gap above rho={rho:.3e}: smallest nonzero eigenvalue {smallest:.3e}")
    V0 = V[:, zero]
    P = V0 @ V0.conj().T
    Pc = np.zeros_like(A, dtype=complex)
    eye = np.eye(n)
    for k in range(nodes):
        z = rho * np.exp(2j * np.pi * k / nodes)
        if n < 5000:
            Pc += z * np.linalg.solve(z * eye - A, eye)
        else:
            lu = spla.splu(sp.csc_matrix(z * eye - A))
            Pc += z * lu.solve(eye.astype(complex))
    Pc /= nodes
    if A.dtype.kind != "c":
        Pc = Pc.real
        P = P.real
    op = lambda X: float(np.linalg.norm(X, 2)) if X.size else 0.0
    return ProjectorResult(P, Pc, float(rho), smallest, op(P - Pc), op(P @ P - P), op(P - P.conj().T), op(A @ P))


# --------------------------------------------------------------- ball norms

def ball_words(r: int) -> list[tuple]:
    """Reduced words of length at most r, in shortlex order."""
    from .group_algebra import word_key

    words = [()]
    layer = [()]
    for _ in range(r):
        new = []
        for w in layer:
            for l in (1, -1, 2, -2):
                if w and w[-1] == -l:
                    continue
                new.append(w + (l,))
        words += new
        layer = new
    return sorted(words, key=word_key)


def ball_operator(x: GroupRingElement, r: int, s: int | None = None) -> sp.csr_matrix:
    """Compression of left multiplication by ``x`` to the ball of radius r."""
    f = factor_of(x) if s is None else s
    if f is None:
        raise ValueError("ball_norm needs an element supported in one factor")
    f = f or 1
    words = ball_words(r)
    index = {w: i for i, w in enumerate(words)}
    rows, cols, vals = [], [], []
    for g, c in x.terms.items():
        gw = g[f - 1]
        for j, h in enumerate(words):
            k = index.get(word_mul(gw, h))
            if k is not None:
                rows.append(k)
                cols.append(j)
                vals.append(float(c))
    n = len(words)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def ball_norm(x: GroupRingElement, r: int, seed: int = 12345) -> float:
    """Lower bound on the operator norm of ``x`` on l2(F).

    The norm of the compression to the span of words of length at most r,
    estimated by a Lanczos (Krylov-accelerated power) iteration on A^T A
    from a fixed seed.  Rayleigh-quotient estimates never exceed the true
    compression norm.
    """
    A = ball_operator(x, r)
    n = A.shape[0]
    if n <= 2:
        return float(np.linalg.norm(A.toarray(), 2))
    B = (A.T @ A).tocsr()
    try:
        lam = spla.eigsh(B, k=1, which="LA", v0=np.abs(_seeded(n, seed)) + 1.0, return_eigenvectors=False,
                         maxiter=10 * n, tol=1e-14)[0]
    except spla.ArpackNoConvergence as exc:
        raise SpectralError("ball norm iteration did not converge") from exc
    return float(math.sqrt(max(lam, 0.0)))


def markov_element(s: int = 1) -> GroupRingElement:
    from .group_algebra import factor_word

    return GroupRingElement({factor_word(s, (l,)): Fraction(1, 4) for l in (1, -1, 2, -2)})


# ---------------------------------------------------- block spectral engine

@dataclass
class BlockResult:
    """Per-degree data of an induced complex computed block by block."""

    complex: str
    dim: int
    kernel: list
    lowest: list
    lam_max: list
    tolerance: float
    sigma_min_d3: float | None = None
    sigma_min_d3_reduced: float | None = None
    composite_sigma_min: float | None = None
    composite_sigma_min_reduced: float | None = None
    blocks: int = 0


def _entry_terms(x) -> list:
    """(coefficient, per-factor keys) for the pure tensors of an entry."""
    out = []
    if isinstance(x, FactoredElement):
        for c, comps in x.terms:
            out.append((float(c), tuple(("x", comps[s]) for s in range(3))))
    else:
        for g, c in x.terms.items():
            out.append((float(c), tuple(("w", g[s]) for s in range(3))))
    return out


class _FactorImages:
    """Images of group-ring vectors in the irreducible blocks of one factor."""

    def __init__(self, q, s: int, seed: int):
        self.q = q
        self.s = s
        self.classes = decompose(q, seed)
        self.groups: dict[int, list[int]] = {}
        for i, c in enumerate(self.classes):
            self.groups.setdefault(c.dim, []).append(i)
        self.stacks = {d: np.stack([self.classes[i].rho for i in idx]) for d, idx in self.groups.items()}
        self.mult = {d: np.array([self.classes[i].mult for i in idx]) for d, idx in self.groups.items()}
        self.nontrivial = {d: np.array([not self.classes[i].trivial for i in idx]) for d, idx in self.groups.items()}
        self._cache: dict = {}

    def image(self, key, d: int) -> np.ndarray:
        kind, obj = key
        ck = (kind, obj if kind == "w" else id(obj), d)
        hit = self._cache.get(ck)
        if hit is not None:
            return hit
        stack = self.stacks[d]
        if kind == "w":
            out = stack[:, self.q.word_index(obj)]
        else:
            v = element_vector(self.q, obj, self.s)
            out = np.einsum("g,kgij->kij", v, stack)
        self._cache[ck] = out
        return out


def iter_blocks(matrices: dict, Q: QuotientTriple, factors: Sequence[int], seed: int = 0):
    """Yield the images of group-ring matrices in batches of irreducible blocks.

    R[G1 x G2 x G3] splits as the sum of tensor products of real irreducible
    blocks of the three factors, and every induced matrix respects that
    splitting.  Each yielded item is ``(mats, weight, reduced, delta)``:
    ``mats[key]`` has shape ``(k2, k3, rows * delta, cols * delta)`` for one
    block class of factor 1 and all classes of dimensions d2, d3 of factors 2
    and 3; ``weight`` holds multiplicities and ``reduced`` marks blocks in
    which no factor used by the matrices acts trivially.
    """
    imgs = []
    for s in (1, 2, 3):
        q = Q.quotient(s) if s in factors else trivial_quotient()
        imgs.append(_FactorImages(q, s, seed))
    terms = {}
    for key, M in matrices.items():
        lst = []
        for i in range(M.rows):
            for j in range(M.cols):
                x = M[i, j]
                if not entry_is_zero(x):
                    for c, keys in _entry_terms(x):
                        lst.append((i, j, c, keys))
        terms[key] = lst
    F1, F2, F3 = imgs
    masks = [F.nontrivial if s in factors else {d: np.ones(len(v), dtype=bool) for d, v in F.groups.items()}
             for s, F in zip((1, 2, 3), imgs)]
    for d1, idx1 in F1.groups.items():
        for c1 in range(len(idx1)):
            for d2 in F2.groups:
                for d3 in F3.groups:
                    k2, k3 = len(F2.groups[d2]), len(F3.groups[d3])
                    delta = d1 * d2 * d3
                    mats = {}
                    for key, M in matrices.items():
                        B = np.zeros((k2, k3, M.rows * delta, M.cols * delta))
                        for (i, j, c, keys) in terms[key]:
                            A1 = F1.image(keys[0], d1)[c1]
                            A2 = F2.image(keys[1], d2)
                            A3 = F3.image(keys[2], d3)
                            blk = np.einsum("ij,bkl,cmn->bcikmjln", A1, A2, A3, optimize=True).reshape(k2, k3, delta, delta)
                            B[:, :, i * delta:(i + 1) * delta, j * delta:(j + 1) * delta] += c * blk
                        mats[key] = B
                    weight = F1.mult[d1][c1] * np.outer(F2.mult[d2], F3.mult[d3])
                    reduced = masks[0][d1][c1] & np.outer(masks[1][d2], masks[2][d3])
                    yield mats, weight, reduced, delta


def block_singular_values(M, Q: QuotientTriple, factors: Sequence[int] = (1, 2, 3), zero_tol: float = 1e-9,
                          seed: int = 0) -> dict:
    """Smallest singular values of an induced matrix, overall and on reduced blocks, plus its rank deficiency."""
    smin, smin_red, deficiency, rank = math.inf, math.inf, 0, 0
    for mats, weight, reduced, delta in iter_blocks({0: M}, Q, factors, seed):
        B = mats[0]
        sv = np.linalg.svd(B, compute_uv=False)
        ncols = B.shape[-1]
        last = sv[..., -1] if sv.shape[-1] == ncols else np.zeros(sv.shape[:-1])
        r = (sv > zero_tol * max(1.0, float(sv.max(initial=0.0)))).sum(axis=-1)
        deficiency += int(((ncols - r) * weight).sum())
        rank += int((r * weight).sum())
        smin = min(smin, float(last.min()))
        if reduced.any():
            smin_red = min(smin_red, float(last[reduced].min()))
    return {"sigma_min": smin, "sigma_min_reduced": smin_red if math.isfinite(smin_red) else None,
            "rank": rank, "column_deficiency": deficiency}


def block_homology(C: ChainComplex, Q: QuotientTriple, k_low: int = 6, tol: float = KERNEL_TOL,
                   composite: bool = False, seed: int = 0) -> BlockResult:
    """Kernel dimensions and low spectra of every Laplacian via real irreducible blocks.

    Every Laplacian of the induced complex is block diagonal for the
    splitting used by ``iter_blocks``; blocks of equal type are computed once
    and weighted by their multiplicity.  The kernel cut is ``tol`` times the
    largest eigenvalue over all blocks.
    """
    top = C.top
    D = Q.dim_for(C.factors)
    small: list[list] = [[] for _ in range(top + 1)]
    lam_max = [0.0] * (top + 1)
    sig3 = [math.inf, math.inf]
    comp = [math.inf, math.inf]
    nblocks = 0
    bds = {p: C.boundary(p) for p in range(1, top + 1)}
    for mats, weight, reduced, delta in iter_blocks(bds, Q, C.factors, seed):
        k2, k3 = weight.shape
        nblocks += k2 * k3
        for p in range(top + 1):
            n = C.degrees[p] * delta
            L = np.zeros((k2, k3, n, n))
            if p >= 1:
                B = mats[p]
                L += np.swapaxes(B, -1, -2) @ B
            if p + 1 <= top:
                B = mats[p + 1]
                L += B @ np.swapaxes(B, -1, -2)
            w = np.linalg.eigvalsh(L)
            lam_max[p] = max(lam_max[p], float(w.max(initial=0.0)))
            _collect_small(small[p], w, weight, k_low)
        if composite and top >= 3:
            _composite_stats(mats, weight, reduced, sig3, comp, C)
    if max(lam_max) * tol > 1e-3:
        raise SpectralError("largest eigenvalue too large for the recorded low spectrum")
    kernel, lowest = [], []
    for p in range(top + 1):
        vals = np.concatenate([v for v, _ in small[p]]) if small[p] else np.zeros(0)
        wts = np.concatenate([m for _, m in small[p]]).astype(np.int64) if small[p] else np.zeros(0, dtype=np.int64)
        cut = tol * lam_max[p] if lam_max[p] > 0 else math.inf
        kernel.append(int(wts[vals < cut].sum()))
        order = np.argsort(vals, kind="stable")
        low = []
        for i in order:
            low.extend([float(vals[i])] * int(min(wts[i], k_low - len(low))))
            if len(low) >= k_low:
                break
        lowest.append(low)
    res = BlockResult(C.name, D, kernel, lowest, lam_max, tol, blocks=nblocks)
    if composite and top >= 3:
        res.sigma_min_d3, res.sigma_min_d3_reduced = (float(v) if math.isfinite(v) else None for v in sig3)
        res.composite_sigma_min, res.composite_sigma_min_reduced = (float(v) if math.isfinite(v) else None for v in comp)
    return res


def _collect_small(store: list, w: np.ndarray, weight: np.ndarray, k_low: int) -> None:
    # keep the k_low smallest eigenvalues of each block and everything below 1e-3
    flat = w.reshape(-1, w.shape[-1])
    wt = np.broadcast_to(weight.reshape(-1, 1), flat.shape)
    keep = np.zeros(flat.shape, dtype=bool)
    keep[:, :k_low] = True
    keep |= flat < 1e-3
    store.append((flat[keep], wt[keep]))


def _composite_stats(mats: dict, weight, reduced, sig3: list, comp: list, C: ChainComplex) -> None:
    B2, B3 = mats[2], mats[3]
    s2 = np.linalg.svd(B2, compute_uv=False)
    s3 = np.linalg.svd(B3, compute_uv=False)
    n2 = B2.shape[-1]
    n3 = B3.shape[-1]
    cut = 1e-9 * max(1.0, float(s2.max(initial=0.0)), float(s3.max(initial=0.0)))
    rank2 = (s2 > cut).sum(axis=-1)
    smin3 = s3[..., -1] if s3.shape[-1] == n3 else np.zeros(s3.shape[:-1])
    rank3 = (s3 > cut).sum(axis=-1)
    cycles = n2 - rank2
    square = (cycles == n3) & (rank3 == n3)
    comp_val = np.where(square, smin3, 0.0)
    sig3[0] = min(sig3[0], float(smin3.min()))
    comp[0] = min(comp[0], float(comp_val.min()))
    if reduced.any():
        sig3[1] = min(sig3[1], float(smin3[reduced].min()))
        comp[1] = min(comp[1], float(comp_val[reduced].min()))
