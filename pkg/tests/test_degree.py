from fractions import Fraction

import pytest

from plopen.complexes import validate_complex
from plopen.degree import (
    BoundaryImageError,
    HomotopyHypothesisViolation,
    IrregularValueError,
    degree,
    degree_at_regular,
    homotopy_degree_constant,
    is_regular_value,
    local_degree,
)
from plopen.generators import GenSpec, generate
from plopen.plmap import build_plmap

from oracles import brute_force_sign_sum


def F(*args):
    return Fraction(*args)


class TestIsRegularValue:
    def test_cell_barycenter_image_is_regular(self, identity_square):
        assert is_regular_value(identity_square, (F(2, 3), F(1, 4)))[0]

    def test_shared_edge_image_is_irregular(self, identity_square):
        ok, why = is_regular_value(identity_square, (F(1, 2), F(1, 2)))
        assert not ok and "face" in why

    def test_fold_breakpoint_image_is_irregular(self, fold1d):
        ok, why = is_regular_value(fold1d, (F(0),))
        assert not ok

    def test_singular_cell_image_is_irregular(self):
        f = generate(GenSpec("singular_cell", 2, seed=1)).plmap
        collapsed = next(ci for ci, p in enumerate(f.pieces) if p.det_sign == 0)
        target = f.pieces[collapsed].apply(
            f.domain.barycenter(f.domain.cells[collapsed].vertex_ids)
        )
        ok, why = is_regular_value(f, target)
        assert not ok


class TestDegreeAtRegular:
    def test_identity_degree_one(self, identity_square):
        cert = degree_at_regular(identity_square, (F(2, 3), F(1, 4)))
        assert cert.degree == 1
        assert cert.fiber == (((F(2, 3), F(1, 4)), 1),)

    def test_fold_zero_by_cancellation(self, fold1d):
        cert = degree_at_regular(fold1d, (F(1, 2),))
        assert cert.degree == 0
        assert cert.fiber == (((F(-1, 2),), -1), ((F(1, 2),), 1))
        assert cert.degree == brute_force_sign_sum(fold1d, (F(1, 2),))

    def test_doubling_degree_two(self, doubling2d):
        f = doubling2d.plmap
        query = (F(1, 2), F(1, 4))
        cert = degree_at_regular(f, query)
        assert cert.degree == 2 == brute_force_sign_sum(f, query)

    def test_boundary_image_rejected(self, identity_square):
        with pytest.raises(BoundaryImageError):
            degree_at_regular(identity_square, (F(0), F(1, 2)))

    def test_irregular_directs_to_degree(self, identity_square):
        with pytest.raises(IrregularValueError):
            degree_at_regular(identity_square, (F(1, 2), F(1, 2)))

    def test_empty_fiber_gives_zero(self, fold1d):
        cert = degree_at_regular(fold1d, (F(-5),))
        assert cert.degree == 0 and cert.fiber == ()


class TestDegreeWithPerturbation:
    def test_identity_on_shared_edge_image(self, identity_square):
        cert = degree(identity_square, (F(1, 2), F(1, 2)))
        assert cert.degree == 1
        assert cert.regular_point_used != cert.query_point
        assert cert.degree == brute_force_sign_sum(
            identity_square, cert.regular_point_used
        )

    def test_doubling_at_cone_point(self, doubling2d):
        cert = degree(doubling2d.plmap, (F(0), F(0)))
        assert cert.degree == 2
        assert cert.degree == brute_force_sign_sum(
            doubling2d.plmap, cert.regular_point_used
        )

    def test_fold_at_breakpoint_image(self, fold1d):
        cert = degree(fold1d, (F(0),))
        assert cert.degree == 0
        assert not any(hit for _, hit in cert.path_evidence.obstacle_checks)

    def test_certificate_self_consistency(self, doubling2d):
        f = doubling2d.plmap
        cert = degree(f, (F(0), F(0)))
        assert cert.degree == sum(sign for _, sign in cert.fiber)
        for point, _ in cert.fiber:
            assert f.evaluate(point) == cert.regular_point_used

    def test_local_constancy_along_clear_segments(self, doubling2d):
        f = doubling2d.plmap
        a, b = (F(1, 2), F(1, 4)), (F(1, 4), F(1, 2))
        from plopen.feasible import segment_avoids_sets

        obstacles = [f.image_of_face(face) for face in f.domain.boundary]
        assert segment_avoids_sets(a, b, obstacles)
        assert degree(f, a).degree == degree(f, b).degree

    def test_degree_bounded_by_cell_count(self, doubling2d):
        f = doubling2d.plmap
        assert abs(degree(f, (F(1, 2), F(1, 4))).degree) <= len(f.domain.cells)

    def test_coherent_degree_is_sign_times_fiber_size(self, doubling2d):
        f = doubling2d.plmap
        cert = degree(f, (F(1, 2), F(1, 4)))
        assert cert.degree == 1 * len(cert.fiber)
        mirrored = build_plmap(
            f.domain, [(-v[0], v[1]) for v in f.vertex_images]
        )
        cert = degree(mirrored, (F(-1, 2), F(1, 4)))
        assert cert.degree == -1 * len(cert.fiber) == -2

    def test_domain_decomposition(self):
        # identity on [0,2]: degrees over the two halves add up to the whole
        whole = build_plmap(
            validate_complex([[0], [1], [2]], [[0, 1], [1, 2]], 1), [[0], [1], [2]]
        )
        left = build_plmap(validate_complex([[0], [1]], [[0, 1]], 1), [[0], [1]])
        right = build_plmap(validate_complex([[1], [2]], [[0, 1]], 1), [[1], [2]])
        query = (F(1, 3),)
        total = degree(whole, query).degree
        assert total == 1
        assert total == degree(left, query).degree + degree(right, query).degree


class TestLocalDegree:
    def test_identity_interior_point(self, identity_square):
        assert local_degree(identity_square, (F(1, 3), F(1, 4))) == 1

    def test_doubling_center(self, doubling2d):
        assert local_degree(doubling2d.plmap, (F(0), F(0))) == 2

    def test_fold_breakpoint(self, fold1d):
        assert local_degree(fold1d, (F(0),)) == 0

    def test_interior_of_regular_piece(self, fold1d):
        assert local_degree(fold1d, (F(-1, 2),)) == -1
        assert local_degree(fold1d, (F(1, 2),)) == 1

    def test_boundary_point_rejected(self, identity_square):
        with pytest.raises(ValueError):
            local_degree(identity_square, (F(0), F(0)))

    def test_singular_map_rejected(self):
        f = generate(GenSpec("singular_cell", 2, seed=1)).plmap
        with pytest.raises(ValueError):
            local_degree(f, f.domain.barycenter(f.domain.cells[0].vertex_ids))


class TestHomotopy:
    def test_constant_identity(self, identity_square):
        verdict = homotopy_degree_constant(
            identity_square,
            identity_square,
            ((F(1, 3), F(1, 4)), (F(1, 3), F(1, 4))),
            [F(0), F(1, 2), F(1)],
        )
        assert verdict.constant and set(verdict.degrees) == {1}

    def test_identity_to_shear_constant(self):
        shear = generate(GenSpec("shear", 2)).plmap
        identity = build_plmap(shear.domain, list(shear.domain.vertices))
        times = [F(k, 32) for k in range(33)]
        # (2/3, 1/8) stays interior to the sheared triangle for every t in
        # [0,1]: its barycentric coordinates are (5/24 + t/8, 2/3 - t/8, 1/8),
        # and the sampled edge images only cross it at t outside [0,1].
        anchor = (F(2, 3), F(1, 8))
        verdict = homotopy_degree_constant(identity, shear, (anchor, anchor), times)
        assert verdict.constant and set(verdict.degrees) == {1}
        assert len(verdict.degrees) == 33

    def test_identity_to_reflection_flags_collapse(self):
        complex_ = generate(GenSpec("identity", 2, resolution=2)).plmap.domain
        identity = build_plmap(complex_, list(complex_.vertices))
        center = (F(1), F(1))
        reflected = build_plmap(
            complex_,
            [tuple(2 * c - v for v, c in zip(vert, center)) for vert in complex_.vertices],
        )
        times = [F(k, 32) for k in range(33)]
        with pytest.raises(HomotopyHypothesisViolation) as err:
            homotopy_degree_constant(identity, reflected, (center, center), times)
        assert err.value.t == F(1, 2)

    def test_mismatched_domains_rejected(self, identity_square, fold1d):
        with pytest.raises(ValueError):
            homotopy_degree_constant(identity_square, fold1d, ((F(0), F(0)), (F(0), F(0))), [F(0)])
