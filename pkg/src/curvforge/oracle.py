"""Ground-truth curvature of left-invariant metrics on compact Lie groups.

Everything here is algebraic: the Levi-Civita connection of a left-invariant
metric is determined by the structure constants through the Koszul formula,
and the (0,4) curvature tensor follows with no discretization.  This module
is the independent cross-check for every deformed-curvature formula in
:mod:`curvforge.cheeger`, and the generator of :class:`CurvatureOracle` data
for catalog scenarios.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _koszul
from ._linalg import as_matrix, check_spd, eigh_sorted, freeze
from .cheeger import DeformationState, _full_algebra_metric
from .cheeger import CurvatureOracle
from .errors import MalformedInputError, UnsupportedModeError
from .lie_core import IsotropyDecomposition, LieAlgebraData

__all__ = [
    "LeftInvariantMetric",
    "connection_coefficients",
    "curvature_tensor_algebra",
    "curvature_tensor",
    "deformed_metric",
    "ricci_quadratic_form",
    "sectional_numerator",
    "constant_curvature_oracle",
    "block_oracle",
]


@dataclass(frozen=True, eq=False)
class LeftInvariantMetric:
    """A left-invariant metric given by its SPD Gram matrix in the algebra
    basis: ``metric[i, j] = <x_i, x_j>_g``."""

    algebra: LieAlgebraData
    metric: np.ndarray

    def __post_init__(self):
        n = self.algebra.dim
        m = check_spd(as_matrix(self.metric, "metric", (n, n)), "metric")
        object.__setattr__(self, "metric", freeze(m))


def connection_coefficients(M: LeftInvariantMetric) -> np.ndarray:
    """Levi-Civita coefficients ``Gamma[i, j, k]`` of the left-invariant
    metric, with ``nabla_{x_i} x_j = Gamma[i, j, k] x_k``.  Satisfies
    ``2 <nabla_x y, z> = <[x,y],z> - <[y,z],x> + <[z,x],y>``; in the
    bi-invariant case this collapses to ``nabla_x y = [x, y] / 2``."""
    return _koszul.connection(M.algebra.structure_constants, M.metric)


def curvature_tensor_algebra(M: LeftInvariantMetric) -> np.ndarray:
    """Fully covariant curvature tensor in the algebra basis,
    ``R4[i,j,k,l] = <R(x_i, x_j) x_k, x_l>_g``, signed so that
    ``R4[i,j,j,i]`` is the sectional numerator (positive on spheres)."""
    return _koszul.curvature(M.algebra.structure_constants, M.metric)


def curvature_tensor(
    M: LeftInvariantMetric,
    frame_split: IsotropyDecomposition | None = None,
    horizontal_dim: int = 0,
) -> CurvatureOracle:
    """Curvature of ``M`` packaged as a :class:`CurvatureOracle` in the
    metric-orthonormal eigenframe.

    The frame follows the deformation module's convention: with ``W`` the
    Q-orthonormal chart rows of ``frame_split`` (a full-algebra splitting)
    and ``P = W G W^T`` the chart matrix of the metric, the vertical frame
    vectors are ``E_i = lam_i^{-1/2} W^T v_i`` over the ascending,
    sign-fixed eigensystem of ``P`` — identical to the eigenframe a
    ``DeformationState`` built on the same chart produces.

    ``horizontal_dim`` appends that many flat extra directions (a metrically
    flat factor carried alongside the group); their curvature components are
    zero and they are declared as the oracle's horizontal frame.
    """
    algebra = M.algebra
    n = algebra.dim
    if frame_split is None:
        from .lie_core import isotropy_split

        frame_split = isotropy_split(algebra, np.zeros((0, n)))
    if frame_split.complement_dim != n:
        raise UnsupportedModeError(
            "curvature oracles are generated on full-algebra charts; got a "
            f"{frame_split.complement_dim}-dimensional chart for a "
            f"{n}-dimensional algebra"
        )
    W = frame_split.complement_basis
    P_chart = W @ M.metric @ W.T
    vals, vecs = eigh_sorted(0.5 * (P_chart + P_chart.T))
    if float(vals[0]) <= 0:
        raise MalformedInputError("metric chart matrix is not positive definite")
    E = (W.T @ vecs) / np.sqrt(vals)[None, :]
    R4 = curvature_tensor_algebra(M)
    R_frame = np.einsum("ijkl,ia,jb,kc,ld->abcd", R4, E, E, E, E, optimize=True)
    h = int(horizontal_dim)
    if h == 0:
        return CurvatureOracle(R=R_frame, horizontal=())
    N = n + h
    R_big = np.zeros((N, N, N, N))
    R_big[:n, :n, :n, :n] = R_frame
    return CurvatureOracle(R=R_big, horizontal=tuple(range(n, N)))


def deformed_metric(state: DeformationState) -> LeftInvariantMetric:
    """The deformed metric as a left-invariant metric, available when the
    orbit directions fill the algebra: Gram matrix ``Q P_t`` in the algebra
    basis (so at t = 0 it returns the undeformed ``Q P``)."""
    split = state.space
    if split.complement_dim != split.parent.dim:
        raise UnsupportedModeError(
            "the deformed metric is left-invariant only when the orbit "
            "directions span the full algebra"
        )
    return LeftInvariantMetric(
        algebra=split.parent, metric=_full_algebra_metric(state)
    )


def ricci_quadratic_form(M: LeftInvariantMetric) -> np.ndarray:
    """Algebra-basis matrix of the Ricci quadratic form,
    ``Ric[i, l] = sum_a R(x_i, f_a, f_a, x_l)`` over any g-orthonormal frame
    (computed frame-independently)."""
    R4 = curvature_tensor_algebra(M)
    return _koszul.ricci_form(R4, M.metric)


def sectional_numerator(
    M: LeftInvariantMetric, x: np.ndarray, y: np.ndarray
) -> float:
    """Unnormalized sectional curvature R(x, y, y, x) in algebra coords."""
    R4 = curvature_tensor_algebra(M)
    return float(np.einsum("i,j,k,l,ijkl->", x, y, y, x, R4))


def constant_curvature_oracle(
    dim: int, K: float, horizontal: tuple[int, ...] = ()
) -> CurvatureOracle:
    """Curvature data of a constant-curvature space in an orthonormal frame:
    ``R[i,j,k,l] = K (delta_il delta_jk - delta_ik delta_jl)``, whose
    sectional numerator on any orthonormal pair is exactly ``K``."""
    eye = np.eye(int(dim))
    R = K * (
        np.einsum("il,jk->ijkl", eye, eye) - np.einsum("ik,jl->ijkl", eye, eye)
    )
    return CurvatureOracle(R=R, horizontal=horizontal)


def block_oracle(blocks: list[tuple[np.ndarray, tuple[int, ...]]]) -> CurvatureOracle:
    """Direct sum of curvature blocks: the product-space curvature tensor,
    with all cross-block components zero.

    Each entry is ``(R_block, horizontal_within_block)``; indices are
    shifted by the running offset, so the result's frame lists the blocks
    consecutively.
    """
    sizes = [np.asarray(R).shape[0] for R, _ in blocks]
    N = int(sum(sizes))
    R_total = np.zeros((N, N, N, N))
    horizontal: list[int] = []
    offset = 0
    for (R, hor), size in zip(blocks, sizes):
        R = np.asarray(R, dtype=float)
        sl = slice(offset, offset + size)
        R_total[sl, sl, sl, sl] = R
        horizontal.extend(offset + int(a) for a in hor)
        offset += size
    return CurvatureOracle(R=R_total, horizontal=tuple(horizontal))
