from __future__ import annotations

import pytest

from l2cert.complexes import (
    GroupRingMatrix,
    attach_cells,
    build_B,
    build_B3,
    build_K,
    build_X,
    coordinate_gamma,
    parse_complex,
    pi2_basis,
    point_complex,
    serialize_complex,
    tensor_complex,
    verify_d2,
    wedge_sphere,
)
from l2cert.group_algebra import GroupRingElement, augmentation, gen, one
from l2cert.quotients import quotient_family
from l2cert.spectral import betti_exact


def test_X_shape_and_boundaries():
    X = build_X()
    assert X.degrees == (1, 6, 12)
    assert X.euler_characteristic() == 7
    # e^1_2 is the second 1-cell
    assert X.boundary(1)[0, 1] == gen(1, 2) - 1
    assert X.labels[2][0] == "e^12_11"
    assert verify_d2(X) == {2: "expanded"}


def test_X_two_cell_boundary_matches_commutator_formula():
    X = build_X()
    gens = [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)]
    col = 0
    for (k, l) in ((1, 2), (1, 3), (2, 3)):
        for i in (1, 2):
            for j in (1, 2):
                expect = {gens.index((l, j)): gen(k, i) - 1, gens.index((k, i)): -(gen(l, j) - 1)}
                for r in range(6):
                    assert X.boundary(2)[r, col] == expect.get(r, GroupRingElement())
                col += 1


def test_X_entries_are_augmentation_ideal():
    X = build_X()
    for row in X.boundary(2).entries:
        for x in row:
            assert augmentation(x) == 0


def test_pi2_basis_cycles():
    B = pi2_basis()
    assert B.shape == (12, 8)
    assert (build_X().boundary(2) @ B).is_zero()
    for c in range(8):
        nz = [x for x in B.column(c) if not x.is_zero()]
        assert len(nz) == 3
        assert all(augmentation(x) == 0 for x in nz)


def test_pi2_column_formula():
    B = pi2_basis()
    X = build_X()
    labels = X.labels[2]
    # column (1, 2, 1): (a^1_1 - 1) e^23_21 - (a^2_2 - 1) e^13_11 + (a^3_1 - 1) e^12_12
    c = [(1, 1, 1), (1, 1, 2), (1, 2, 1)].index((1, 2, 1))
    assert B[labels.index("e^23_21"), c] == gen(1, 1) - 1
    assert B[labels.index("e^13_11"), c] == -(gen(2, 2) - 1)
    assert B[labels.index("e^12_12"), c] == gen(3, 1) - 1


def test_K():
    K = build_K()
    assert K.degrees == (1, 6, 12, 8)
    assert K.euler_characteristic() == -1
    assert K.boundary(3) == pi2_basis()
    verify_d2(K)


def test_K_equals_B_cubed_entrywise():
    K, B3 = build_K(), build_B3()
    assert B3.degrees == K.degrees
    for p in (1, 2, 3):
        assert B3.boundary(p) == K.boundary(p)


def test_tensor_degrees_and_euler():
    B1, B2 = build_B(1), build_B(2)
    BB = tensor_complex(B1, B2)
    assert BB.degrees == (1, 4, 4)
    verify_d2(BB)
    for C, D in [(B1, B2), (BB, build_B(3)), (build_X(), point_complex())]:
        assert tensor_complex(C, D).euler_characteristic() == C.euler_characteristic() * D.euler_characteristic()


def test_tensor_with_point_is_identity():
    X = build_X()
    T = tensor_complex(X, point_complex())
    assert T.degrees == X.degrees
    for p in (1, 2):
        assert T.boundary(p) == X.boundary(p)


def test_tensor_rejects_shared_factor():
    with pytest.raises(ValueError):
        tensor_complex(build_B(1), build_B(1))


def test_wedge_sphere():
    X1 = wedge_sphere(build_X())
    assert X1.degrees == (1, 6, 13)
    assert X1.euler_characteristic() == 8
    assert X1.labels[2][-1] == "s2"
    assert all(x.is_zero() for x in X1.boundary(2).column(12))


def test_wedge_sphere_adds_dimension_to_b2():
    Q = quotient_family("sym:3")[0]
    bx, _ = betti_exact(build_X(), Q)
    bx1, _ = betti_exact(wedge_sphere(build_X()), Q)
    assert bx1[2] - bx[2] == Q.dim
    assert bx1[:2] == bx[:2]


def test_attach_cells_rejects_wrong_rows():
    X1 = wedge_sphere(build_X())
    with pytest.raises(ValueError):
        attach_cells(X1, GroupRingMatrix.zeros(8, 8))


def test_attach_cells_keeps_low_boundaries():
    X1 = wedge_sphere(build_X())
    Y = attach_cells(X1, coordinate_gamma())
    assert Y.degrees == (1, 6, 13, 8)
    assert Y.boundary(1) == X1.boundary(1)
    assert Y.boundary(2) == X1.boundary(2)
    verify_d2(Y)


def test_zero_gamma_adds_free_b3():
    Q = quotient_family("cyclic:2")[0]
    X1 = wedge_sphere(build_X())
    Y = attach_cells(X1, GroupRingMatrix.zeros(9, 3))
    by, _ = betti_exact(Y, Q)
    bx, _ = betti_exact(X1, Q)
    assert by[:3] == bx and by[3] == 3 * Q.dim


def test_coordinate_attaching_matches_K_wedge_sphere():
    Q = quotient_family("sym:3")[0]
    Y = attach_cells(wedge_sphere(build_X()), coordinate_gamma())
    KS = wedge_sphere(build_K())
    assert betti_exact(Y, Q)[0] == betti_exact(KS, Q)[0]


def test_rational_gamma_d2():
    g = coordinate_gamma()
    grid = [list(r) for r in g.entries]
    grid[8][0] = GroupRingElement({((1, 2), (), (-1,)): 3}) * one()
    grid[2][5] = gen(2, 1) * GroupRingElement.scalar(GroupRingElement.scalar(1).coefficient(((), (), ())) / 7)
    Y = attach_cells(wedge_sphere(build_X()), GroupRingMatrix(9, 8, grid))
    assert verify_d2(Y) == {2: "expanded", 3: "factorized"}
    assert (Y.boundary(2) @ Y.boundary(3)).is_zero()


def test_complex_serialization_round_trip():
    for C in (build_K(), wedge_sphere(build_X()), build_B3()):
        text = serialize_complex(C)
        D = parse_complex(text)
        assert D.degrees == C.degrees and D.labels == C.labels
        for p in range(1, C.top + 1):
            assert D.boundary(p) == C.boundary(p)
        assert serialize_complex(D) == text
