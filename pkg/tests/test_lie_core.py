"""Algebra containers, validation report, isotropy splittings, and the
normal-homogeneous curvature helpers."""

from __future__ import annotations

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvforge import (
    LieAlgebraData,
    MalformedInputError,
    NotSPDError,
    SubalgebraError,
    bracket_gap_constant,
    isotropy_split,
    normal_homogeneous_ricci,
    normal_homogeneous_ricci_matrix,
    validate_algebra,
)
from curvforge.catalog import (
    abelian_algebra,
    direct_sum,
    so_algebra,
    su2_algebra,
)

coord = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)
vec3 = st.lists(coord, min_size=3, max_size=3).map(np.asarray)


def trivial_split(algebra: LieAlgebraData):
    return isotropy_split(algebra, np.zeros((0, algebra.dim)))


class TestLieAlgebraData:
    def test_su2_bracket_is_cyclic(self):
        su2 = su2_algebra()
        e = np.eye(3)
        npt.assert_allclose(su2.bracket(e[0], e[1]), e[2], atol=1e-15,
                            err_msg="[e0, e1] should be e2")
        npt.assert_allclose(su2.bracket(e[1], e[2]), e[0], atol=1e-15,
                            err_msg="[e1, e2] should be e0")
        npt.assert_allclose(su2.bracket(e[2], e[0]), e[1], atol=1e-15,
                            err_msg="[e2, e0] should be e1")

    def test_inner_and_norm_use_q(self):
        su2 = su2_algebra()
        x = np.array([1.0, 2.0, -1.0])
        npt.assert_allclose(su2.inner(x, x), su2.norm_sq(x), atol=0.0)
        npt.assert_allclose(su2.norm_sq(x), 6.0, atol=1e-14)

    def test_bad_structure_constant_shape_rejected(self):
        with pytest.raises(MalformedInputError):
            LieAlgebraData(structure_constants=np.zeros((3, 3)), Q=np.eye(3))
        with pytest.raises(MalformedInputError):
            LieAlgebraData(structure_constants=np.zeros((3, 3, 2)), Q=np.eye(3))

    def test_non_spd_q_rejected(self):
        with pytest.raises(NotSPDError):
            LieAlgebraData(
                structure_constants=np.zeros((3, 3, 3)), Q=-np.eye(3)
            )

    @settings(max_examples=50, deadline=None)
    @given(x=vec3, y=vec3)
    def test_bracket_antisymmetry(self, x, y):
        su2 = su2_algebra()
        npt.assert_allclose(
            su2.bracket(x, y), -su2.bracket(y, x), atol=1e-9,
            err_msg="bracket must be antisymmetric",
        )

    @settings(max_examples=50, deadline=None)
    @given(x=vec3, y=vec3, z=vec3)
    def test_bracket_is_q_skew(self, x, y, z):
        # <[x, y], z> = -<y, [x, z]> for a bi-invariant inner product
        su2 = su2_algebra()
        npt.assert_allclose(
            su2.inner(su2.bracket(x, y), z),
            -su2.inner(y, su2.bracket(x, z)),
            atol=1e-7,
            err_msg="Q must be ad-invariant on su(2)",
        )


class TestValidateAlgebra:
    @pytest.mark.parametrize(
        "algebra",
        [
            su2_algebra(),
            so_algebra(3),
            so_algebra(4),
            abelian_algebra(4),
            direct_sum(su2_algebra(), su2_algebra()),
        ],
        ids=["su2", "so3", "so4", "abelian4", "su2xsu2"],
    )
    def test_reference_algebras_pass(self, algebra):
        report = validate_algebra(algebra)
        assert report.ok, [
            (i.name, i.residual) for i in report.items if not i.passed
        ]

    def test_item_names_and_getitem(self):
        report = validate_algebra(su2_algebra())
        names = [item.name for item in report.items]
        assert names == [
            "antisymmetry",
            "jacobi",
            "bi_invariance",
            "q_positive_definite",
        ]
        assert report["jacobi"].passed
        with pytest.raises(KeyError):
            report["no_such_check"]

    def test_symmetric_part_fails_antisymmetry(self):
        c = np.zeros((3, 3, 3))
        c[0, 1, 2] = 1.0
        c[1, 0, 2] = 1.0  # same sign: not antisymmetric
        report = validate_algebra(LieAlgebraData(c, np.eye(3)))
        assert not report["antisymmetry"].passed
        assert report["antisymmetry"].residual >= 1.0

    def test_random_antisymmetric_constants_fail_jacobi(self, rng):
        c = rng.normal(size=(4, 4, 4))
        c = c - c.transpose(1, 0, 2)
        report = validate_algebra(LieAlgebraData(c, np.eye(4)))
        assert report["antisymmetry"].passed
        assert not report["jacobi"].passed

    def test_non_invariant_q_fails_bi_invariance(self):
        su2 = su2_algebra()
        skew = LieAlgebraData(su2.structure_constants, np.diag([1.0, 2.0, 3.0]))
        report = validate_algebra(skew)
        assert not report["bi_invariance"].passed
        assert report["bi_invariance"].worst_index != ()

    def test_nearly_degenerate_q_fails_positivity(self):
        ab = abelian_algebra(2)
        squashed = LieAlgebraData(
            ab.structure_constants, np.diag([1.0, 1e-13])
        )
        report = validate_algebra(squashed)
        assert not report["q_positive_definite"].passed

    def test_raise_if_failed(self):
        c = np.zeros((3, 3, 3))
        c[0, 1, 2] = 1.0  # no antisymmetric partner
        report = validate_algebra(LieAlgebraData(c, np.eye(3)))
        assert not report.ok
        with pytest.raises(MalformedInputError):
            report.raise_if_failed()
        validate_algebra(su2_algebra()).raise_if_failed()  # no-op when ok


class TestIsotropySplit:
    def test_so4_so3_complement_is_coordinate_aligned(self):
        so4 = so_algebra(4)
        split = isotropy_split(so4, np.eye(6)[[0, 1, 3]])
        npt.assert_allclose(
            split.complement_basis, np.eye(6)[[2, 4, 5]], atol=1e-12,
            err_msg="complement of the standard so(3) block should be "
            "spanned by the remaining coordinate directions",
        )

    def test_complement_is_q_orthonormal(self):
        so4 = so_algebra(4)
        split = isotropy_split(so4, np.eye(6)[[0, 1, 3]])
        W = split.complement_basis
        npt.assert_allclose(W @ so4.Q @ W.T, np.eye(3), atol=1e-12)

    def test_projector_is_idempotent_and_splits(self):
        so4 = so_algebra(4)
        split = isotropy_split(so4, np.eye(6)[[0, 1, 3]])
        Pm = split.projector_m
        npt.assert_allclose(Pm @ Pm, Pm, atol=1e-12)
        for row in split.isotropy_basis:
            npt.assert_allclose(Pm @ row, np.zeros(6), atol=1e-12)
        for row in split.complement_basis:
            npt.assert_allclose(Pm @ row, row, atol=1e-12)

    def test_coordinate_roundtrip(self, rng):
        split = isotropy_split(so_algebra(4), np.eye(6)[[0, 1, 3]])
        u = rng.normal(size=3)
        npt.assert_allclose(
            split.to_complement_coords(split.to_algebra_coords(u)), u,
            atol=1e-12,
        )

    def test_non_subalgebra_rejected(self):
        # span{E01, E02} is not bracket-closed inside so(4)
        with pytest.raises(SubalgebraError):
            isotropy_split(so_algebra(4), np.eye(6)[[0, 1]])

    def test_dependent_rows_rejected(self):
        rows = np.array([[1.0, 0, 0], [2.0, 0, 0]])
        with pytest.raises(MalformedInputError):
            isotropy_split(su2_algebra(), rows)

    def test_trivial_split_spans_everything(self):
        split = trivial_split(su2_algebra())
        assert split.complement_dim == 3
        npt.assert_allclose(split.projector_m, np.eye(3), atol=1e-14)


class TestNormalHomogeneous:
    def test_su2_matrix_is_half_identity(self):
        M = normal_homogeneous_ricci_matrix(trivial_split(su2_algebra()))
        npt.assert_allclose(M, 0.5 * np.eye(3), atol=1e-12)

    def test_so4_so3_sphere_block(self):
        split = isotropy_split(so_algebra(4), np.eye(6)[[0, 1, 3]])
        M = normal_homogeneous_ricci_matrix(split)
        npt.assert_allclose(M, 0.5 * np.eye(3), atol=1e-12)

    def test_quadratic_form_matches_matrix(self, rng):
        split = isotropy_split(so_algebra(4), np.eye(6)[[0, 1, 3]])
        M = normal_homogeneous_ricci_matrix(split)
        for _ in range(5):
            u = rng.normal(size=3)
            npt.assert_allclose(
                normal_homogeneous_ricci(split, u), u @ M @ u, atol=1e-12,
            )

    @pytest.mark.parametrize(
        "algebra,expected",
        [
            (su2_algebra(), 0.5),
            (so_algebra(3), 0.5),
            (so_algebra(4), 1.0),
            (abelian_algebra(3), 0.0),
        ],
        ids=["su2", "so3", "so4", "abelian"],
    )
    def test_bracket_gap_constants(self, algebra, expected):
        npt.assert_allclose(
            bracket_gap_constant(trivial_split(algebra)), expected,
            atol=1e-12,
            err_msg="minimal bracket-gap eigenvalue on the full orbit space",
        )

    def test_gap_scales_with_metric(self):
        # Halving Q doubles the gap constant of the unit sphere of Q.
        su2 = su2_algebra()
        shrunk = LieAlgebraData(su2.structure_constants, 0.5 * su2.Q)
        assert validate_algebra(shrunk).ok
        npt.assert_allclose(
            bracket_gap_constant(trivial_split(shrunk)), 1.0, atol=1e-12,
        )
