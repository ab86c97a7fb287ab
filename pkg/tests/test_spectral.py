from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.sparse as sp

from l2cert.complexes import build_B, build_K, build_X, point_complex, wedge_sphere
from l2cert.group_algebra import one
from l2cert.quotients import QuotientTriple, close_group, induce_complex, quotient_family, trivial_quotient
from l2cert.spectral import (
    SpectralError,
    ball_norm,
    ball_words,
    bareiss_rank,
    betti_exact,
    block_homology,
    exact_rank,
    kernel_dim,
    laplacian,
    low_spectrum,
    markov_element,
    modular_rank,
    spectral_projector,
    spectrum_slice,
)


def swap_triple():
    s = close_group([(1, 0), (1, 0)], "swap")
    return QuotientTriple(s, s, s, "swap")


def test_point_complex_laplacian_is_zero():
    Q = quotient_family("sym:3")[0]
    L = laplacian(point_complex(), 0, Q)
    assert L.shape == (1, 1) and L.nnz == 0


def test_wedge_order_two_spectrum():
    L = laplacian(build_B(1), 0, swap_triple())
    # 2 (2 - s - s^-1) on the regular representation of Z/2
    assert np.allclose(L.toarray(), [[0, 0], [0, 0]] + 4 * np.array([[1, -1], [-1, 1]]))
    assert np.allclose(np.linalg.eigvalsh(L.toarray()), [0, 8])
    assert np.allclose(low_spectrum(L, 2), [0, 8])


def test_wedge_delta1_kernel():
    Q = quotient_family("sym:3")[0]
    L = laplacian(build_B(1), 1, Q)
    assert kernel_dim(L, "numeric") == 7
    assert kernel_dim(L, "exact") == 7


def test_kernel_dim_small_cases():
    assert kernel_dim(np.diag([0.0, 1.0, 2.0])) == 1
    assert kernel_dim(np.diag([0.0, 1.0, 2.0]), "exact") == 1
    assert kernel_dim(np.zeros((5, 5))) == 5
    assert kernel_dim(np.zeros((5, 5)), "exact") == 5


def test_kernel_dim_rejects_indefinite():
    with pytest.raises(SpectralError):
        kernel_dim(np.diag([-1.0, 1.0]))


def test_low_spectrum_examples():
    assert np.allclose(low_spectrum(np.diag([2.0, 0.0, 1.0]), 2), [0, 1])


def test_sparse_path_matches_dense():
    # a path-graph Laplacian plus an isolated block, large enough for the iterative branch
    n = 6500
    main = np.full(n, 2.0)
    main[0] = main[-1] = 1.0
    L = sp.diags([main, -np.ones(n - 1), -np.ones(n - 1)], [0, 1, -1]).tocsr()
    L = sp.block_diag([L, sp.csr_matrix((3, 3))]).tocsr()
    assert kernel_dim(L) == 4
    w = low_spectrum(L, 5)
    assert np.all(w >= -1e-9) and np.sum(w < 1e-9) == 4


def test_hodge_consistency_against_exact_ranks():
    for C in (build_X(), build_K(), wedge_sphere(build_X())):
        Q = quotient_family("sym:3")[0]
        ind = induce_complex(C, Q)
        b, info = betti_exact(C, Q, ind)
        for p in range(C.top + 1):
            assert kernel_dim(laplacian(C, p, Q, ind)) == b[p]
        assert sum((-1) ** p * v for p, v in enumerate(b)) == C.euler_characteristic() * Q.dim


def test_block_engine_matches_exact():
    for desc in ("sym:3", "cyclic:4", "dihedral:3"):
        Q = quotient_family(desc)[0]
        for C in (build_X(), build_K(), build_B(1)):
            assert block_homology(C, Q).kernel == betti_exact(C, Q)[0]


def test_block_engine_trivial_triple():
    t = trivial_quotient()
    Q = QuotientTriple(t, t, t, "trivial")
    assert block_homology(build_K(), Q).kernel == [1, 6, 12, 8]


def test_exact_rank_methods_agree():
    rng = np.random.default_rng(1)
    A = rng.integers(-2, 3, size=(30, 40))
    A[5] = A[3] + 2 * A[7]
    r = np.linalg.matrix_rank(A)
    assert bareiss_rank(A.tolist()) == r
    assert exact_rank(A, "fraction-free")[0] == r
    assert modular_rank(A) == r


def test_spectrum_slice_psd():
    Q = quotient_family("sym:3")[0]
    s = spectrum_slice(laplacian(build_B(1), 1, Q), k=4)
    assert s.kernel_dim == 7 and s.dim == 12
    assert all(v >= -s.tolerance for v in s.lowest)
    assert sum(v < s.tolerance for v in s.lowest) == min(4, s.kernel_dim)


def test_projector_diag():
    r = spectral_projector(np.diag([0.0, 1.0, 2.0]), rho=0.5)
    assert np.allclose(r.P, np.diag([1.0, 0, 0]))
    assert r.contour_error < 1e-12


def test_projector_contract_random():
    rng = np.random.default_rng(4)
    for _ in range(5):
        n, k = 30, 4
        U, _ = np.linalg.qr(rng.standard_normal((n, n)))
        w = np.concatenate([np.zeros(k), rng.uniform(0.5, 3.0, n - k)])
        M = (U * w) @ U.T
        r = spectral_projector(M)
        assert r.idempotence <= 1e-9 and r.symmetry <= 1e-9 and r.annihilation <= 1e-9
        assert r.contour_error <= 1e-8
        assert round(np.trace(r.P)) == k


def test_projector_order_two_wedge():
    L = laplacian(build_B(1), 0, swap_triple()).toarray()
    r = spectral_projector(L)
    assert np.allclose(r.P, 0.5 * np.ones((2, 2)))
    assert r.contour_error <= 1e-8


def test_projector_rejects_small_gap():
    with pytest.raises(SpectralError):
        spectral_projector(np.diag([0.0, 1.0]), rho=2.0)


def test_ball_words_count():
    assert [len(ball_words(r)) for r in (0, 1, 2, 6)] == [1, 5, 17, 1457]


def test_ball_norm_identity():
    for r in (0, 2, 5):
        assert abs(ball_norm(one(), r) - 1.0) < 1e-12


def dense_compression_norm(r):
    # independent oracle: dense adjacency of the ball, largest singular value
    words = ball_words(r)
    idx = {w: i for i, w in enumerate(words)}
    A = np.zeros((len(words), len(words)))
    for j, w in enumerate(words):
        for l in (1, -1, 2, -2):
            v = w[1:] if w and w[0] == -l else (l,) + w
            if v in idx:
                A[idx[v], j] += 0.25
    return float(np.linalg.norm(A, 2))


def test_ball_norm_matches_dense_oracle():
    x = markov_element()
    for r in (2, 4, 6):
        assert abs(ball_norm(x, r) - dense_compression_norm(r)) < 1e-9


def test_ball_norm_monotone_and_bounded():
    x = markov_element()
    vals = [ball_norm(x, r) for r in (2, 4, 6, 8)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert max(vals) <= math.sqrt(3) / 2 + 1e-6


def test_ball_norm_rejects_mixed_support():
    from l2cert.group_algebra import gen

    with pytest.raises(ValueError):
        ball_norm(gen(1, 1) + gen(2, 1), 2)
