"""Compact Lie algebra data, validation, and isotropy splittings.

A :class:`LieAlgebraData` stores a finite-dimensional real Lie algebra in a
fixed basis: the structure tensor ``c`` with ``[x_i, x_j] = c[i,j,k] x_k``
and a bi-invariant inner product ``Q`` (Gram matrix in the same basis).

An :class:`IsotropyDecomposition` splits the algebra as ``k + m`` where ``k``
is a subalgebra (the isotropy algebra of a homogeneous space, or the fiber
direction of a bundle) and ``m`` is its Q-orthogonal complement; it carries a
deterministic, coordinate-aligned Q-orthonormal basis of ``m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._koszul import lowered_bracket
from ._linalg import as_matrix, check_spd, freeze, q_orthonormalize
from .errors import MalformedInputError, NumericalError, SubalgebraError

__all__ = [
    "LieAlgebraData",
    "ValidationItem",
    "ValidationReport",
    "validate_algebra",
    "IsotropyDecomposition",
    "isotropy_split",
    "normal_homogeneous_ricci",
    "normal_homogeneous_ricci_matrix",
    "bracket_gap_constant",
]


@dataclass(frozen=True, eq=False)
class LieAlgebraData:
    """A real Lie algebra with a chosen basis and an invariant inner product.

    Parameters
    ----------
    structure_constants : (n, n, n) array
        ``c[i, j, k]`` with ``[x_i, x_j] = sum_k c[i, j, k] x_k``.
    Q : (n, n) array
        Symmetric positive-definite Gram matrix of the inner product.
    """

    structure_constants: np.ndarray
    Q: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        c = np.asarray(self.structure_constants, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise MalformedInputError(
                f"structure constants must be (n, n, n), got {c.shape}"
            )
        n = c.shape[0]
        q = check_spd(as_matrix(self.Q, "Q", (n, n)), "Q")
        object.__setattr__(self, "structure_constants", freeze(c))
        object.__setattr__(self, "Q", freeze(q))
        object.__setattr__(self, "dim", n)

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """[x, y] in basis coordinates."""
        return np.einsum("i,j,ijk->k", x, y, self.structure_constants)

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        """<x, y> with respect to Q."""
        return float(x @ self.Q @ y)

    def norm_sq(self, x: np.ndarray) -> float:
        return self.inner(x, x)


@dataclass(frozen=True)
class ValidationItem:
    name: str
    passed: bool
    residual: float
    worst_index: tuple[int, ...]


@dataclass(frozen=True)
class ValidationReport:
    items: tuple[ValidationItem, ...]

    @property
    def ok(self) -> bool:
        return all(item.passed for item in self.items)

    def __getitem__(self, name: str) -> ValidationItem:
        for item in self.items:
            if item.name == name:
                return item
        raise KeyError(name)

    def raise_if_failed(self) -> None:
        bad = [it.name for it in self.items if not it.passed]
        if bad:
            raise MalformedInputError(
                "algebra validation failed: " + ", ".join(bad)
            )


def _worst(arr: np.ndarray) -> tuple[float, tuple[int, ...]]:
    flat = int(np.argmax(np.abs(arr)))
    idx = np.unravel_index(flat, arr.shape)
    return float(np.abs(arr).flat[flat]), tuple(int(i) for i in idx)


def validate_algebra(algebra: LieAlgebraData, tol: float = 1e-10) -> ValidationReport:
    """Check antisymmetry, the Jacobi identity, bi-invariance of Q, and
    positive-definiteness of Q.  Returns a report instead of raising, so
    callers can surface all failures at once."""
    c = algebra.structure_constants
    q = algebra.Q
    scale = max(1.0, float(np.max(np.abs(c))) if c.size else 1.0)

    anti = c + c.transpose(1, 0, 2)
    anti_res, anti_idx = _worst(anti) if anti.size else (0.0, ())

    jac = (
        np.einsum("ijm,mkl->ijkl", c, c)
        + np.einsum("jkm,mil->ijkl", c, c)
        + np.einsum("kim,mjl->ijkl", c, c)
    )
    jac_res, jac_idx = _worst(jac) if jac.size else (0.0, ())

    B = lowered_bracket(c, q)
    # ad-invariance: <[x_i, x_j], x_l> + <x_j, [x_i, x_l]> = 0
    binv = B + B.transpose(0, 2, 1)
    binv_res, binv_idx = _worst(binv) if binv.size else (0.0, ())

    q_eigs = np.linalg.eigvalsh(q)
    q_min = float(q_eigs[0]) if q_eigs.size else 1.0
    q_ok = q_min > tol * max(1.0, float(q_eigs[-1]) if q_eigs.size else 1.0)

    items = (
        ValidationItem("antisymmetry", anti_res <= tol * scale, anti_res, anti_idx),
        ValidationItem("jacobi", jac_res <= tol * scale**2, jac_res, jac_idx),
        ValidationItem("bi_invariance", binv_res <= tol * scale, binv_res, binv_idx),
        ValidationItem("q_positive_definite", q_ok, q_min, ()),
    )
    return ValidationReport(items)


@dataclass(frozen=True, eq=False)
class IsotropyDecomposition:
    """Q-orthogonal splitting ``g = k + m`` of an algebra along a subalgebra.

    Attributes
    ----------
    isotropy_basis : (m, n) array
        The rows given by the caller, spanning the subalgebra ``k``.
    complement_basis : (k, n) array
        Q-orthonormal rows spanning ``m = k^perp``; built deterministically
        from the standard basis, so it is coordinate-aligned whenever the
        complement is itself spanned by coordinate directions.
    projector_m : (n, n) array
        Q-orthogonal projection of algebra coordinates onto ``m``.
    """

    parent: LieAlgebraData
    isotropy_basis: np.ndarray
    complement_basis: np.ndarray
    projector_m: np.ndarray

    @property
    def complement_dim(self) -> int:
        return self.complement_basis.shape[0]

    def to_complement_coords(self, x_alg: np.ndarray) -> np.ndarray:
        """Coordinates of the m-part of ``x_alg`` in the complement basis."""
        return self.complement_basis @ self.parent.Q @ x_alg

    def to_algebra_coords(self, u: np.ndarray) -> np.ndarray:
        """Algebra coordinates of the complement-chart vector ``u``."""
        return self.complement_basis.T @ u


def isotropy_split(
    algebra: LieAlgebraData, isotropy_basis, tol: float = 1e-10
) -> IsotropyDecomposition:
    """Split ``algebra`` Q-orthogonally along the subalgebra spanned by
    ``isotropy_basis`` rows.  Raises :class:`SubalgebraError` if the span is
    not closed under the bracket."""
    n = algebra.dim
    S = np.asarray(isotropy_basis, dtype=float).reshape(-1, n)
    if S.shape[0] > 0 and np.linalg.matrix_rank(S) != S.shape[0]:
        raise MalformedInputError("isotropy basis rows are linearly dependent")

    S_on = q_orthonormalize(S, algebra.Q)
    if S_on.shape[0] != S.shape[0]:
        raise MalformedInputError("isotropy basis rows are Q-degenerate")
    proj_k = S_on.T @ S_on @ algebra.Q

    scale = max(1.0, float(np.max(np.abs(S))) if S.size else 1.0)
    for i in range(S.shape[0]):
        for j in range(i + 1, S.shape[0]):
            br = algebra.bracket(S[i], S[j])
            resid = br - proj_k @ br
            if float(np.max(np.abs(resid), initial=0.0)) > tol * scale**2:
                raise SubalgebraError(
                    f"isotropy basis is not a subalgebra: [row {i}, row {j}] "
                    "leaves the span"
                )

    stacked = q_orthonormalize(np.vstack([S_on, np.eye(n)]), algebra.Q)
    W = stacked[S_on.shape[0]:]
    if W.shape[0] != n - S_on.shape[0]:
        raise NumericalError(
            "complement construction lost rank: expected "
            f"{n - S_on.shape[0]} directions, found {W.shape[0]}"
        )
    proj_m = W.T @ W @ algebra.Q
    return IsotropyDecomposition(
        parent=algebra,
        isotropy_basis=freeze(S),
        complement_basis=freeze(W),
        projector_m=freeze(proj_m),
    )


def normal_homogeneous_ricci(split: IsotropyDecomposition, u: np.ndarray) -> float:
    """Quarter-sum of squared brackets against the complement basis:
    ``(1/4) sum_a |[v_a, u]|_Q^2`` for ``u`` given in complement coordinates.

    This is the quadratic form appearing in the large-deformation limit of
    the vertical Ricci bound.  It is itself a lower bound for (not always
    equal to) the Ricci curvature of the associated normal homogeneous space.
    """
    algebra = split.parent
    u_alg = split.to_algebra_coords(np.asarray(u, dtype=float))
    total = 0.0
    for v in split.complement_basis:
        br = algebra.bracket(v, u_alg)
        total += algebra.norm_sq(br)
    return 0.25 * total


def normal_homogeneous_ricci_matrix(split: IsotropyDecomposition) -> np.ndarray:
    """Gram matrix of :func:`normal_homogeneous_ricci` in the complement basis:
    ``M[a, b] = (1/4) sum_c <[v_c, v_a], [v_c, v_b]>_Q``."""
    algebra = split.parent
    W = split.complement_basis
    k = W.shape[0]
    M = np.zeros((k, k))
    brs = np.empty((k, k, algebra.dim))
    for c_idx in range(k):
        for a_idx in range(k):
            brs[c_idx, a_idx] = algebra.bracket(W[c_idx], W[a_idx])
    for a_idx in range(k):
        for b_idx in range(k):
            M[a_idx, b_idx] = 0.25 * sum(
                algebra.inner(brs[c_idx, a_idx], brs[c_idx, b_idx])
                for c_idx in range(k)
            )
    return 0.5 * (M + M.T)


def bracket_gap_constant(split: IsotropyDecomposition) -> float:
    """Smallest eigenvalue of the bracket quadratic form on the complement.

    A strictly positive value certifies that every complement direction has a
    non-vanishing bracket against the complement.  A zero (within roundoff)
    is reported as a numerical symptom only; no structural conclusion is
    drawn from it."""
    if split.complement_dim == 0:
        return math.inf
    return float(np.linalg.eigvalsh(normal_homogeneous_ricci_matrix(split))[0])
