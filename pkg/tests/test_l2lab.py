from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from l2cert.complexes import GroupRingMatrix, build_B, build_K, build_X, point_complex, verify_d2, wedge_sphere
from l2cert.group_algebra import factor_word, gen
from l2cert.l2lab import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    CertificationError,
    GammaError,
    _round_element,
    ball_kernel,
    betti_row,
    build_y,
    build_Y,
    construct_gamma,
    convolve,
    dirichlet_green,
    hopf_accounting,
    kunneth_check,
    luck_betti,
    quotient_kernel,
    solve_kernel_elements,
    swapped,
    verdict_from_rows,
)
from l2cert.quotients import QuotientTriple, element_vector, quotient_family, sym_quotient, symswap_quotient, trivial_quotient


def trivial_triple():
    t = trivial_quotient()
    return QuotientTriple(t, t, t, "trivial")


def test_wedge_b1_is_order_plus_one():
    fam = quotient_family("cyclic:2;sym:3..4")
    table = luck_betti(build_B(1), fam)
    for row, T in zip(table.rows, fam):
        assert row.dim == T.q1.order
        assert row.kernel[1] == T.q1.order + 1
        assert row.exact_kernel == row.kernel


def test_X_connected_at_sym3():
    row = betti_row(build_X(), quotient_family("sym:3")[0])
    assert row.dim == 216 and row.kernel[0] == 1
    assert row.normalized[0] == pytest.approx(1 / 216)
    assert row.euler == 7 * 216
    assert row.exact_kernel == row.kernel


def test_euler_rows():
    fam = quotient_family("sym:3")
    for C, chi in ((build_X(), 7), (wedge_sphere(build_X()), 8), (build_K(), -1)):
        for r in luck_betti(C, fam).rows:
            assert sum((-1) ** p * k for p, k in enumerate(r.kernel)) == chi * r.dim
            assert all(v >= 0 for v in r.normalized)


def test_hopf_degenerate_for_wedge():
    t = luck_betti(build_B(1), quotient_family("sym:3"))
    rep = hopf_accounting(t, t)
    assert rep["target"] == "0 = 0" and rep["deviation_last"] == 0


def test_hopf_rejects_mismatched_families():
    a = luck_betti(build_B(1), quotient_family("sym:3"))
    b = luck_betti(build_B(1), quotient_family("cyclic:3"))
    with pytest.raises(ValueError):
        hopf_accounting(a, b)


def test_kunneth_small():
    rep = kunneth_check(build_B(1), build_B(2), quotient_family("sym:3"))
    assert rep["all_equal"]
    row = rep["rows"][0]
    assert row["b_tensor"] == convolve(row["b_C"], row["b_D"]) == [1, 14, 49]
    rep = kunneth_check(build_B(1), point_complex(), quotient_family("sym:3"))
    assert rep["rows"][0]["b_tensor"] == rep["rows"][0]["b_C"]


def test_quotient_kernel_contract():
    for m in (3, 4):
        fk = quotient_kernel(sym_quotient(m))
        assert fk.residual <= 1e-10
        assert fk.projector["idempotence"] <= 1e-9 and fk.projector["symmetry"] <= 1e-9
        assert fk.projector["contour_error"] <= 1e-8


def test_swap_exchanges_projector_columns():
    # with a1 and a2 exchanged, (u1', u2') = (P22, P12) of the original projector
    q = sym_quotient(3)
    qs = swapped(q)
    fk, fs = quotient_kernel(q, den_limit=None), quotient_kernel(qs, den_limit=None)
    perm = [qs.index(g) for g in q.elements]
    u1s = element_vector(qs, fs.u1, 1)[perm]
    u2s = element_vector(qs, fs.u2, 1)[perm]
    # words of the swapped quotient spell the same permutations, so read them back by permutation
    assert np.allclose(u1s, element_vector(q, fk.P[1][1], 1), atol=1e-12)
    assert np.allclose(u2s, element_vector(q, fk.P[0][1], 1), atol=1e-12)


def test_identity_coefficient_under_swap_symmetry():
    # exchanging a1 and a2 by an inner automorphism forces P11(e) = P22(e),
    # and P11(e) + P22(e) is the normalized kernel dimension 1 + 1/|Q|
    for m in (3, 4, 5):
        q = symswap_quotient(m)
        fk = quotient_kernel(q)
        p11 = float(fk.P[0][0].coefficient(factor_word(1, ())))
        p22 = float(fk.P[1][1].coefficient(factor_word(1, ())))
        assert abs(p11 - p22) < 1e-12
        assert abs(p11 + p22 - (1 + 1 / q.order)) < 1e-12
    assert ball_kernel(4).identity_coefficient == 0.5


def dense_identity_coefficient(q):
    # trace of the first diagonal block of the projector onto ker [a1 - 1, a2 - 1]
    import scipy.linalg as sl

    n = q.order
    blocks = []
    for w in ((1,), (2,)):
        g = q.word_index(w)
        M = np.zeros((n, n))
        M[q.mul[g], np.arange(n)] = 1
        blocks.append(M - np.eye(n))
    N = sl.null_space(np.hstack(blocks))
    return float(np.trace((N @ N.T)[:n, :n]) / n)


def test_identity_coefficient_on_sym_family():
    vals = [quotient_kernel(sym_quotient(m)).identity_coefficient for m in (3, 4, 5)]
    frozen = [0.6428571428571, 0.6125, 0.6074745400672]
    assert vals == pytest.approx(frozen, abs=1e-9)
    assert [dense_identity_coefficient(sym_quotient(m)) for m in (3, 4, 5)] == pytest.approx(frozen, abs=1e-9)


def test_dirichlet_green_closed_form():
    green, ok = dirichlet_green(3)
    assert ok
    assert green[()] == Fraction(3, 8) * (1 - Fraction(1, 81))


def test_ball_residuals_nonincreasing():
    res = [ball_kernel(r).residual for r in (2, 4, 6, 8)]
    assert all(b <= a for a, b in zip(res, res[1:]))


def test_ball_kernel_support():
    fk = ball_kernel(3)
    assert fk.u1.length() <= 5
    assert fk.u1.coefficient(factor_word(1, ())) == Fraction(1, 2)


def test_build_y_quotient_mode():
    ke = solve_kernel_elements(sym_quotient(3))
    mu, res = build_y(ke)
    assert len(mu) == 8
    assert res <= 1e-8


def test_build_y_trivial_quotient_is_zero():
    ke = solve_kernel_elements(trivial_triple())
    _, res = build_y(ke)
    assert res == 0


@pytest.fixture(scope="module")
def ball_ke():
    return solve_kernel_elements(4)


def test_zero_gamma_rejected(ball_ke):
    Q = quotient_family("cyclic:3")[0]
    with pytest.raises(GammaError):
        construct_gamma(None, None, gamma=GroupRingMatrix.zeros(9, 8), construction=Q)


def test_rational_gamma_provenance_and_cycles(ball_ke):
    Q = quotient_family("cyclic:5")[0]
    am = construct_gamma(wedge_sphere(build_X()), ball_ke, "rational", construction=Q)
    assert am.provenance["max_denominator"] <= 10**6
    assert am.provenance["induced_sigma_min_reduced"] > 1e-6
    # deficiency of the attaching columns equals (n+1)^3 - n^3 on a cyclic quotient of order n
    assert am.provenance["induced_column_deficiency"] == 6**3 - 5**3
    Y = build_Y(am)
    assert verify_d2(Y) == {2: "expanded", 3: "factorized"}
    assert Y.degrees == (1, 6, 13, 8)


def test_integer_gamma_entries(ball_ke):
    Q = quotient_family("cyclic:3")[0]
    am = construct_gamma(None, ball_ke, "integer", N=10**6, construction=Q)
    assert am.N == 10**6 and am.mode == "integer"
    for row in am.gamma.entries:
        for x in row:
            for c, comps in x.terms:
                # per-factor coefficients on the grid 1/100, scaled by 100^3
                assert all((v * 100).denominator == 1 for comp in comps for v in comp.terms.values())
    with pytest.raises(ValueError):
        construct_gamma(None, ball_ke, "integer", N=10**5, construction=Q)


def test_round_half_to_even():
    x = gen(1, 1) * Fraction(5, 200) + gen(1, 2) * Fraction(15, 200)
    r = _round_element(x, 100)
    assert sorted(r.terms.values()) == [Fraction(2, 100), Fraction(8, 100)]


def test_y_trivial_triple():
    am = construct_gamma(None, None, "coordinate", construction=quotient_family("cyclic:3")[0])
    row = betti_row(build_Y(am), trivial_triple())
    assert row.kernel == [1, 6, 13, 8] and row.euler == 0


def test_euler_violation_is_hard_failure(monkeypatch):
    import l2cert.l2lab as lab

    real = lab.block_homology

    def broken(*a, **k):
        res = real(*a, **k)
        res.kernel[0] += 1
        return res

    monkeypatch.setattr(lab, "block_homology", broken)
    with pytest.raises(CertificationError):
        lab.betti_row(build_X(), quotient_family("sym:3")[0])


def rows(*maxes, euler=0):
    return [{"label": str(i), "normalized": [m, m / 2], "euler": euler} for i, m in enumerate(maxes)]


def test_verdict_rules():
    assert verdict_from_rows(rows(0.5, 0.2, 0.04))[0] == PASS
    assert verdict_from_rows(rows(0.5, 0.2, 0.06))[0] == FAIL
    assert verdict_from_rows(rows(0.5, 0.5, 0.04))[0] == FAIL
    assert verdict_from_rows(rows(0.5, 0.2, 0.04, euler=1))[0] == FAIL
    assert verdict_from_rows(rows(0.5, 0.04))[0] == INCONCLUSIVE
    assert verdict_from_rows(rows(0.5, 0.2) + [{"label": "x", "error": "boom"}])[0] == INCONCLUSIVE
    r = rows(0.5, 0.2, 0.04)
    assert verdict_from_rows(r) == verdict_from_rows([dict(x) for x in r])
