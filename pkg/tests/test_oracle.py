"""Left-invariant metrics: connection, curvature tensor, Ricci form, and
the reference curvature oracles."""

from __future__ import annotations

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import curvforge as cf
from curvforge import (
    LeftInvariantMetric,
    MalformedInputError,
    UnsupportedModeError,
    block_oracle,
    connection_coefficients,
    constant_curvature_oracle,
    curvature_tensor,
    curvature_tensor_algebra,
    deformed_metric,
    ricci_quadratic_form,
    sectional_numerator,
)
from curvforge.catalog import so_algebra, su2_algebra

from conftest import make_spd


def lowered(c: np.ndarray, G: np.ndarray) -> np.ndarray:
    """B[i, j, l] = <[x_i, x_j], x_l>_G."""
    return np.einsum("ijk,kl->ijl", c, G)


class TestConnection:
    def test_bi_invariant_connection_is_half_bracket(self):
        su2 = su2_algebra()
        M = LeftInvariantMetric(algebra=su2, metric=np.eye(3))
        npt.assert_allclose(
            connection_coefficients(M), 0.5 * su2.structure_constants,
            atol=1e-14,
            err_msg="bi-invariant metrics must give nabla = [.,.]/2",
        )

    @pytest.mark.parametrize("algebra", [su2_algebra(), so_algebra(4)],
                             ids=["su2", "so4"])
    def test_torsion_free(self, algebra, rng):
        for _ in range(5):
            G = make_spd(rng, algebra.dim)
            Gam = connection_coefficients(LeftInvariantMetric(algebra, G))
            torsion = Gam - Gam.transpose(1, 0, 2) - algebra.structure_constants
            npt.assert_allclose(torsion, 0.0, atol=1e-12,
                                err_msg="nabla_x y - nabla_y x must be [x, y]")

    @pytest.mark.parametrize("algebra", [su2_algebra(), so_algebra(4)],
                             ids=["su2", "so4"])
    def test_metric_compatibility(self, algebra, rng):
        # <nabla_i x_j, x_k> + <x_j, nabla_i x_k> = 0 for invariant fields
        for _ in range(5):
            G = make_spd(rng, algebra.dim)
            Gam = connection_coefficients(LeftInvariantMetric(algebra, G))
            low = np.einsum("ijm,mk->ijk", Gam, G)
            npt.assert_allclose(low + low.transpose(0, 2, 1), 0.0, atol=1e-12,
                                err_msg="connection must preserve the metric")


class TestCurvatureTensorAlgebra:
    @pytest.mark.parametrize("algebra", [su2_algebra(), so_algebra(4)],
                             ids=["su2", "so4"])
    def test_symmetries_hold_for_random_metrics(self, algebra, rng):
        for _ in range(3):
            G = make_spd(rng, algebra.dim)
            R = curvature_tensor_algebra(LeftInvariantMetric(algebra, G))
            scale = np.max(np.abs(R))
            npt.assert_allclose(R + R.transpose(1, 0, 2, 3), 0.0,
                                atol=1e-12 * scale,
                                err_msg="antisymmetry in the first pair")
            npt.assert_allclose(R + R.transpose(0, 1, 3, 2), 0.0,
                                atol=1e-12 * scale,
                                err_msg="antisymmetry in the last pair")
            npt.assert_allclose(R - R.transpose(2, 3, 0, 1), 0.0,
                                atol=1e-12 * scale,
                                err_msg="pair-interchange symmetry")
            bianchi = (R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3))
            npt.assert_allclose(bianchi, 0.0, atol=1e-12 * scale,
                                err_msg="first algebraic identity")

    @pytest.mark.parametrize("algebra", [su2_algebra(), so_algebra(4)],
                             ids=["su2", "so4"])
    def test_bi_invariant_plane_values(self, algebra):
        # kappa(x_i, x_j) = |[x_i, x_j]|^2 / 4 for a bi-invariant metric
        n = algebra.dim
        M = LeftInvariantMetric(algebra, np.eye(n))
        R = curvature_tensor_algebra(M)
        e = np.eye(n)
        for i in range(n):
            for j in range(n):
                expected = 0.25 * algebra.norm_sq(algebra.bracket(e[i], e[j]))
                npt.assert_allclose(R[i, j, j, i], expected, atol=1e-12,
                                    err_msg=f"plane ({i}, {j})")

    def test_squashed_su2_plane_values(self):
        # Diagonal metric diag(eps^2, 1, 1) with eps^2 = 1/2: the round-fiber
        # plane flattens to eps^2/4, the orthogonal plane steepens
        # to 1 - 3 eps^2/4.
        su2 = su2_algebra()
        G = np.diag([0.5, 1.0, 1.0])
        R = curvature_tensor_algebra(LeftInvariantMetric(su2, G))
        npt.assert_allclose(R[1, 2, 2, 1] / (G[1, 1] * G[2, 2]), 0.625,
                            atol=1e-12, err_msg="sec(e2, e3) = 1 - 3/8")
        npt.assert_allclose(R[0, 1, 1, 0] / (G[0, 0] * G[1, 1]), 0.125,
                            atol=1e-12, err_msg="sec(e1, e2) = 1/8")

    def test_sectional_numerator_matches_tensor(self, rng):
        su2 = su2_algebra()
        M = LeftInvariantMetric(su2, make_spd(rng, 3))
        R = curvature_tensor_algebra(M)
        for _ in range(5):
            x, y = rng.normal(size=3), rng.normal(size=3)
            direct = float(np.einsum("i,j,k,l,ijkl->", x, y, y, x, R))
            npt.assert_allclose(sectional_numerator(M, x, y), direct,
                                atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(scale=st.floats(0.1, 10.0))
    def test_curvature_scales_linearly_with_metric(self, scale):
        su2 = su2_algebra()
        G = np.diag([0.5, 1.0, 2.0])
        R1 = curvature_tensor_algebra(LeftInvariantMetric(su2, G))
        R2 = curvature_tensor_algebra(LeftInvariantMetric(su2, scale * G))
        npt.assert_allclose(R2, scale * R1, atol=1e-10 * scale,
                            err_msg="lowered tensor is linear in the metric")


class TestRicciQuadraticForm:
    def test_bi_invariant_su2_is_half_identity(self):
        M = LeftInvariantMetric(su2_algebra(), np.eye(3))
        npt.assert_allclose(ricci_quadratic_form(M), 0.5 * np.eye(3),
                            atol=1e-12)

    def test_matches_frame_trace(self, rng):
        # Ric(x) = sum_a kappa(x, f_a) over any metric-orthonormal frame
        su2 = su2_algebra()
        G = make_spd(rng, 3)
        M = LeftInvariantMetric(su2, G)
        ric = ricci_quadratic_form(M)
        # columns of L are G-orthonormal: L L^T = G^{-1} gives L^T G L = 1
        frame = np.linalg.cholesky(np.linalg.inv(G))
        x = rng.normal(size=3)
        total = sum(
            sectional_numerator(M, x, frame[:, a]) for a in range(3)
        )
        npt.assert_allclose(x @ ric @ x, total, atol=1e-10)

    def test_deformed_identity_tensor_keeps_ricci_form(self):
        # On the full su(2) orbit with P = 1 the deformation only rescales
        # the bi-invariant metric, whose Ricci form is scale-invariant.
        B = cf.load_scenario("su2-full").bundle
        for t in (0.0, 0.1, 1.0, 10.0, 1.0e4):
            M_t = deformed_metric(B.state_P(t))
            npt.assert_allclose(ricci_quadratic_form(M_t), 0.5 * np.eye(3),
                                atol=1e-10, err_msg=f"t = {t}")


class TestReferenceOracles:
    def test_constant_curvature_plane_values(self):
        oracle = constant_curvature_oracle(3, 1.0)
        e = np.eye(3)
        for i in range(3):
            for j in range(3):
                expected = 1.0 if i != j else 0.0
                npt.assert_allclose(
                    oracle.sectional_numerator(e[i], e[j]), expected,
                    atol=1e-14)

    def test_constant_curvature_scales(self):
        oracle = constant_curvature_oracle(3, 2.5)
        e = np.eye(3)
        npt.assert_allclose(oracle.sectional_numerator(e[0], e[1]), 2.5,
                            atol=1e-14)

    def test_block_oracle_keeps_blocks_and_offsets_horizontal(self):
        su2 = su2_algebra()
        inner = curvature_tensor(LeftInvariantMetric(su2, np.eye(3)))
        flat3 = constant_curvature_oracle(3, 1.0, horizontal=(0, 1, 2))
        combined = block_oracle([(inner.R, inner.horizontal),
                                 (flat3.R, flat3.horizontal)])
        assert combined.dim == 6
        assert combined.horizontal == (3, 4, 5)
        e = np.eye(6)
        # vertical block keeps its values
        npt.assert_allclose(
            combined.sectional_numerator(e[0], e[1]),
            inner.sectional_numerator(np.eye(3)[0], np.eye(3)[1]), atol=1e-14)
        # cross-block planes are flat
        npt.assert_allclose(combined.sectional_numerator(e[0], e[4]), 0.0,
                            atol=1e-14)

    def test_curvature_tensor_frame_reproduces_bi_invariant_values(self):
        su2 = su2_algebra()
        oracle = curvature_tensor(LeftInvariantMetric(su2, np.eye(3)))
        e = np.eye(3)
        npt.assert_allclose(oracle.sectional_numerator(e[0], e[1]), 0.25,
                            atol=1e-12)

    def test_curvature_tensor_frame_is_metric_orthonormal(self, rng):
        # Gram of the oracle frame in G must be the identity: check through
        # the Ricci trace, which is frame-independent.
        su2 = su2_algebra()
        G = make_spd(rng, 3)
        M = LeftInvariantMetric(su2, G)
        oracle = curvature_tensor(M)
        ric_alg = ricci_quadratic_form(M)
        # trace of Ricci in any orthonormal frame equals the scalar trace
        scalar_from_oracle = sum(
            oracle.sectional_numerator(np.eye(3)[i], np.eye(3)[j])
            for i in range(3) for j in range(3)
        )
        scalar_from_form = float(np.trace(np.linalg.inv(G) @ ric_alg))
        npt.assert_allclose(scalar_from_oracle, scalar_from_form, atol=1e-10)

    def test_curvature_tensor_rejects_partial_charts(self):
        so4 = so_algebra(4)
        split = cf.isotropy_split(so4, np.eye(6)[[0, 1, 3]])
        M = LeftInvariantMetric(so4, np.eye(6))
        with pytest.raises(UnsupportedModeError):
            curvature_tensor(M, frame_split=split)

    def test_horizontal_extension_is_flat_and_declared(self):
        su2 = su2_algebra()
        oracle = curvature_tensor(
            LeftInvariantMetric(su2, np.eye(3)), horizontal_dim=2
        )
        assert oracle.dim == 5
        assert oracle.horizontal == (3, 4)
        assert oracle.vertical_indices == (0, 1, 2)
        npt.assert_allclose(oracle.R[3:, :, :, :], 0.0, atol=0.0)

    def test_oracle_validation_rejects_asymmetric_tensor(self, rng):
        R = rng.normal(size=(3, 3, 3, 3))
        with pytest.raises(MalformedInputError):
            cf.CurvatureOracle(R=R, horizontal=())

    def test_oracle_validation_rejects_bad_horizontal_indices(self):
        good = constant_curvature_oracle(3, 1.0).R
        with pytest.raises(MalformedInputError):
            cf.CurvatureOracle(R=good, horizontal=(0, 0))
        with pytest.raises(MalformedInputError):
            cf.CurvatureOracle(R=good, horizontal=(7,))
