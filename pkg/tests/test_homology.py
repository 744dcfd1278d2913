import random
from fractions import Fraction

import pytest

from tcbounds.errors import InvalidInputError
from tcbounds.homology import (
    CONTRACTIBLE,
    Echelon,
    FieldOps,
    Q,
    Z,
    Z2,
    betti,
    chain_complex,
    connectivity,
    euler_characteristic_from_betti,
    integral_homology,
    matrix_rank,
    rank_int,
    rank_z2,
    smith_normal_form,
)
from tcbounds.simplicial import (
    boundary_sphere,
    from_maximal_simplices,
    product,
    random_complex,
)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_betti_of_spheres(n):
    expected = tuple([1] + [0] * (n - 1) + [1])
    assert betti(boundary_sphere(n), Q) == expected
    assert betti(boundary_sphere(n), Z2) == expected


def test_betti_rp2(rp2):
    assert betti(rp2, Z2) == (1, 1, 1)
    assert betti(rp2, Q) == (1, 0, 0)


def test_betti_torus(torus7):
    assert betti(torus7, Q) == (1, 2, 1)


def test_betti_rejects_integer_coefficients(torus7):
    with pytest.raises(InvalidInputError):
        betti(torus7, Z)


def test_integral_homology_sphere(sphere2):
    h = integral_homology(sphere2)
    assert h.free_ranks == (1, 0, 1)
    assert all(not t for t in h.torsion)


def test_integral_homology_rp2(rp2):
    h = integral_homology(rp2)
    assert h.free_ranks == (1, 0, 0)
    assert h.torsion == ((), (2,), ())


def test_integral_homology_torus(torus7):
    h = integral_homology(torus7)
    assert h.free_ranks == (1, 2, 1)
    assert all(not t for t in h.torsion)


class TestConnectivity:
    @pytest.mark.parametrize("n", [2, 3])
    def test_spheres(self, n):
        assert connectivity(boundary_sphere(n), simply_connected_asserted=True) == n - 1

    def test_contractible(self, delta3):
        assert connectivity(delta3, simply_connected_asserted=True) == CONTRACTIBLE

    def test_assertion_required(self, rp2):
        with pytest.raises(InvalidInputError):
            connectivity(rp2)

    def test_false_assertion_detected(self, rp2):
        # H_1 = Z/2 contradicts simple connectivity
        with pytest.raises(InvalidInputError):
            connectivity(rp2, simply_connected_asserted=True)

    def test_disconnected_detected(self):
        K = from_maximal_simplices([[0], [1]])
        with pytest.raises(InvalidInputError):
            connectivity(K, simply_connected_asserted=True)


class TestChainComplexInvariants:
    @pytest.mark.parametrize("seed", range(8))
    def test_boundary_squares_to_zero(self, seed):
        rng = random.Random(seed)
        K = random_complex(rng, max_vertices=6, max_dim=3, max_facets=5)
        chain_complex(K).check_square_zero()

    def test_boundary_squares_to_zero_on_product(self, circle):
        chain_complex(product(circle, circle)).check_square_zero()

    @pytest.mark.parametrize("seed", range(8))
    def test_euler_characteristic_consistency(self, seed):
        rng = random.Random(100 + seed)
        K = random_complex(rng, max_vertices=6, max_dim=3, max_facets=5)
        for coeff in (Z2, Q):
            assert euler_characteristic_from_betti(betti(K, coeff)) == K.euler_characteristic

    @pytest.mark.parametrize("seed", range(8))
    def test_universal_coefficients_inequality(self, seed):
        rng = random.Random(200 + seed)
        K = random_complex(rng, max_vertices=6, max_dim=3, max_facets=5)
        for b2, bq in zip(betti(K, Z2), betti(K, Q)):
            assert b2 >= bq

    def test_universal_coefficients_strict_for_rp2(self, rp2):
        assert betti(rp2, Z2)[1] > betti(rp2, Q)[1]

    @pytest.mark.parametrize("seed", range(8))
    def test_mod_two_betti_formula(self, seed):
        # b_i(Z/2) = b_i(Q) + (2-torsion in H_i) + (2-torsion in H_{i-1}):
        # ties the field ranks to the Smith normal form exactly
        rng = random.Random(300 + seed)
        K = random_complex(rng, max_vertices=6, max_dim=3, max_facets=6)
        h = integral_homology(K)
        two_torsion = [sum(1 for t in ts if t % 2 == 0) for ts in h.torsion]
        bq, b2 = betti(K, Q), betti(K, Z2)
        for i in range(K.dim + 1):
            below = two_torsion[i - 1] if i > 0 else 0
            assert b2[i] == bq[i] + two_torsion[i] + below, (sorted(K.simplices), i)


class TestExactLinearAlgebra:
    def test_rank_z2(self):
        assert rank_z2([0b011, 0b110, 0b101]) == 2
        assert rank_z2([0b001, 0b010, 0b100]) == 3
        assert rank_z2([0, 0]) == 0

    def test_rank_int_on_dependent_rows(self):
        assert rank_int([[2, 4], [1, 2]]) == 1
        assert rank_int([[1, 2], [3, 4]]) == 2
        assert rank_int([[0, 0], [0, 0]]) == 0

    def test_rank_int_handles_cancellation(self):
        mat = [[2, 3, 5], [4, 6, 10], [1, 1, 1]]
        assert rank_int(mat) == 2

    def test_matrix_rank_fields_agree_on_unimodular(self):
        mat = [[1, 1, 0], [0, 1, 1]]
        assert matrix_rank(mat, Q) == matrix_rank(mat, Z2) == 2

    @pytest.mark.parametrize("mat,expected", [
        ([[2, 0], [0, 3]], [1, 6]),
        ([[2, 0], [0, 4]], [2, 4]),
        ([[1, 2], [3, 4]], [1, 2]),
        ([[6]], [6]),
        ([[0, 0], [0, 0]], []),
    ])
    def test_smith_normal_form(self, mat, expected):
        assert smith_normal_form(mat) == expected

    def test_smith_normal_form_divisibility(self):
        rng = random.Random(7)
        for _ in range(20):
            mat = [[rng.randint(-5, 5) for _ in range(4)] for _ in range(3)]
            diag = smith_normal_form(mat)
            for a, b in zip(diag, diag[1:]):
                assert b % a == 0

    def test_echelon_out_of_order_pivots(self):
        # second row's pivot sits left of the first; reduction must still be exact
        ops = FieldOps(Q)
        ech = Echelon(ops, 3)
        one = Fraction(1)
        assert ech.insert([0, one, one], tag="a")
        assert ech.insert([one, one, 0], tag="b")
        assert not ech.insert([one, 2 * one, one])  # dependent: a + b
        rem, used = ech.reduce([one, 2 * one, one])
        assert all(c == 0 for c in rem)
        assert dict(used) == {"a": one, "b": one}
