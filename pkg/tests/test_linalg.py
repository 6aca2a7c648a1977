from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from plopen.linalg import (
    DimensionError,
    Matrix,
    det,
    det_sign,
    format_rational,
    inverse,
    null_space,
    parse_rational,
    rank,
    solve_square,
    vec_dot,
)

from oracles import det_by_permutation_expansion


rationals = st.builds(
    Fraction, st.integers(min_value=-9, max_value=9), st.integers(min_value=1, max_value=9)
)


def square_matrices(max_n=4):
    return st.integers(min_value=1, max_value=max_n).flatmap(
        lambda n: st.lists(
            st.lists(rationals, min_size=n, max_size=n), min_size=n, max_size=n
        ).map(Matrix.from_rows)
    )


class TestDetSign:
    def test_identity(self):
        assert det_sign(Matrix.identity(2)) == 1

    def test_transposition_swaps_orientation(self):
        assert det_sign(Matrix.from_rows([[0, 1], [1, 0]])) == -1

    def test_dependent_rows(self):
        assert det_sign(Matrix.from_rows([[1, 1], [2, 2]])) == 0

    def test_non_square_rejected(self):
        with pytest.raises(DimensionError):
            det_sign(Matrix.from_rows([[1, 2, 3], [4, 5, 6]]))

    @given(square_matrices())
    @settings(max_examples=60, deadline=None)
    def test_matches_permutation_expansion(self, m):
        expected = det_by_permutation_expansion(m.entries)
        assert det(m) == expected
        assert det_sign(m) == (expected > 0) - (expected < 0)

    @given(square_matrices())
    @settings(max_examples=40, deadline=None)
    def test_transpose_invariance(self, m):
        s = det_sign(m)
        st_ = det_sign(m.transpose())
        assert s * st_ == (1 if s != 0 else 0)

    @given(square_matrices(max_n=3), st.data())
    @settings(max_examples=40, deadline=None)
    def test_row_swap_flips_positive_scale_preserves(self, m, data):
        if m.rows < 2:
            return
        i = data.draw(st.integers(min_value=0, max_value=m.rows - 2))
        rows = list(m.entries)
        rows[i], rows[i + 1] = rows[i + 1], rows[i]
        assert det_sign(Matrix(tuple(rows))) == -det_sign(m)
        scale = data.draw(st.integers(min_value=1, max_value=5))
        rows = list(m.entries)
        rows[i] = tuple(Fraction(scale) * x for x in rows[i])
        assert det_sign(Matrix(tuple(rows))) == det_sign(m)


class TestSolveSquare:
    def test_identity_case(self):
        assert solve_square(Matrix.identity(2), (Fraction(3), Fraction(5))) == (
            Fraction(3),
            Fraction(5),
        )

    def test_diagonal_scaling(self):
        a = Matrix.from_rows([[2, 0], [0, 2]])
        assert solve_square(a, (Fraction(1), Fraction(1))) == (
            Fraction(1, 2),
            Fraction(1, 2),
        )

    def test_rank_deficient_is_singular(self):
        a = Matrix.from_rows([[1, 1], [2, 2]])
        assert solve_square(a, (Fraction(1), Fraction(1))) is None

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            solve_square(Matrix.identity(2), (Fraction(1),))

    @given(square_matrices(), st.data())
    @settings(max_examples=60, deadline=None)
    def test_round_trip_exactness(self, a, data):
        x = tuple(
            data.draw(rationals) for _ in range(a.rows)
        )
        rhs = a.mul_vec(x)
        solution = solve_square(a, rhs)
        if det_sign(a) == 0:
            assert solution is None or a.mul_vec(solution) == rhs
        else:
            assert solution == x


class TestRank:
    def test_identity(self):
        assert rank(Matrix.identity(3)) == 3

    def test_zero(self):
        assert rank(Matrix.from_rows([[0, 0], [0, 0]])) == 0

    def test_proportional_rows(self):
        assert rank(Matrix.from_rows([[1, 2], [2, 4]])) == 1

    @given(square_matrices())
    @settings(max_examples=60, deadline=None)
    def test_full_rank_iff_nonzero_det(self, m):
        assert (rank(m) == m.rows) == (det_sign(m) != 0)


class TestNullSpaceInverse:
    @given(square_matrices())
    @settings(max_examples=40, deadline=None)
    def test_inverse_or_null_vector(self, m):
        inv = inverse(m)
        if det_sign(m) != 0:
            assert inv.mul_mat(m).entries == Matrix.identity(m.rows).entries
        else:
            assert inv is None
            basis = null_space(m)
            assert basis
            for v in basis:
                assert all(x == 0 for x in m.mul_vec(v))

    def test_null_space_orthogonal_to_rows(self):
        m = Matrix.from_rows([[1, 2, 3]])
        basis = null_space(m)
        assert len(basis) == 2
        for v in basis:
            assert vec_dot(m.row(0), v) == 0


class TestRationalStrings:
    @pytest.mark.parametrize(
        "text,value",
        [("3", Fraction(3)), ("-3", Fraction(-3)), ("3/4", Fraction(3, 4)), ("-6/8", Fraction(-3, 4))],
    )
    def test_parse(self, text, value):
        assert parse_rational(text) == value

    @pytest.mark.parametrize("bad", ["3/-4", "1.5", "a", "3/0", "+3", "1/08"])
    def test_parse_rejects_non_canonical(self, bad):
        with pytest.raises(ValueError):
            parse_rational(bad)

    @given(rationals)
    @settings(max_examples=40, deadline=None)
    def test_round_trip(self, q):
        assert parse_rational(format_rational(q)) == q

    def test_denominator_one_is_omitted(self):
        assert format_rational(Fraction(8, 4)) == "2"
        assert format_rational(Fraction(-3, 4)) == "-3/4"
