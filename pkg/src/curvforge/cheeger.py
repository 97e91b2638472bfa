"""One-parameter deformation of an invariant metric along a group action.

Setup.  A compact group acts on a Riemannian manifold; at a point, the
vertical space (tangent to the orbit) is identified with a Q-orthogonal
complement ``m`` inside the Lie algebra, and the invariant metric ``g`` is
encoded by a symmetric positive-definite orbit tensor ``P`` on ``m``:
``g(U*, V*) = Q(P U, V)`` on vertical vectors, while a chosen horizontal
complement stays g-orthogonal to the orbit.

The deformed metric ``g_t`` has orbit tensor ``P_t = P (1 + t P)^{-1}`` and
the same horizontal part.  The associated reparametrization operator is
``C_t = id`` horizontally and ``(1 + t P)^{-1}`` vertically; curvature
quantities are evaluated on ``C_t``-reparametrized planes, which keeps the
comparison with the undeformed metric algebraic:

    kappa_t(x, y) = kappa_0(x, y) + (t^3 / 4) |[P u_x, P u_y]|_Q^2 + z_t,

with ``z_t >= 0``.  Dropping ``z_t`` gives the certified lower bound
computed by :func:`reparam_sectional_lower`; for orbit spaces that fill the
whole algebra the exact value is available via.

All vertical coordinates below live in the Q-orthonormal complement chart of
the underlying :class:`~curvforge.lie.IsotropyDecomposition`, so the chart
inner product is Euclidean and ``P`` is an honest SPD matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _koszul
from ._linalg import as_matrix, check_spd, eigh_sorted, freeze
from .errors import (
    MalformedInputError,
    NumericalError,
    UnsupportedModeError,
)
from .lie_core import IsotropyDecomposition

__all__ = [
    "OrbitTensor",
    "MixedVector",
    "DeformationState",
    "deform_orbit_tensor",
    "ct_vertical_matrix",
    "CurvatureOracle",
    "frame_coordinates",
    "apply_metric_tensor",
    "apply_metric_tensor_inverse",
    "orthonormal_eigenframe",
    "reparam_sectional_lower",
    "reparam_sectional_exact",
    "sectional_residual",
    "horizontal_ricci",
    "deformed_ricci_lower",
]


@dataclass(frozen=True, eq=False)
class OrbitTensor:
    """SPD matrix of the invariant metric on the orbit directions,
    expressed in the Q-orthonormal complement chart of ``space``."""

    space: IsotropyDecomposition
    matrix: np.ndarray

    def __post_init__(self):
        k = self.space.complement_dim
        m = check_spd(as_matrix(self.matrix, "orbit tensor", (k, k)), "orbit tensor")
        object.__setattr__(self, "matrix", freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class MixedVector:
    """A tangent vector split into horizontal and vertical parts.

    ``vertical`` is given in the complement chart; ``horizontal`` in whatever
    g-orthonormal horizontal frame the curvature oracle uses.
    """

    horizontal: np.ndarray
    vertical: np.ndarray

    def __post_init__(self):
        h = np.atleast_1d(np.asarray(self.horizontal, dtype=float))
        v = np.atleast_1d(np.asarray(self.vertical, dtype=float))
        if h.ndim != 1 or v.ndim != 1:
            raise MalformedInputError("vector parts must be one-dimensional")
        if not (np.all(np.isfinite(h)) and np.all(np.isfinite(v))):
            raise MalformedInputError("vector parts contain non-finite entries")
        object.__setattr__(self, "horizontal", freeze(h))
        object.__setattr__(self, "vertical", freeze(v))

    @classmethod
    def vertical_only(cls, u) -> "MixedVector":
        return cls(horizontal=np.zeros(0), vertical=u)

    @classmethod
    def horizontal_only(cls, x) -> "MixedVector":
        return cls(horizontal=x, vertical=np.zeros(0))


@dataclass(frozen=True, eq=False)
class DeformationState:
    """Orbit tensor together with its deformation at a fixed time ``t``.

    ``matrix`` holds ``P_t`` and ``eigenvalues``/``eigenbasis`` the spectral
    data of the *undeformed* ``P`` (ascending, deterministic signs); ``P_t``
    shares the eigenbasis with eigenvalues ``lam / (1 + t lam)``.
    """

    orbit: OrbitTensor
    t: float
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenbasis: np.ndarray

    @property
    def dim(self) -> int:
        return self.orbit.dim

    @property
    def space(self) -> IsotropyDecomposition:
        return self.orbit.space


def deform_orbit_tensor(orbit: OrbitTensor, t: float) -> DeformationState:
    """Compute ``P_t = P (1 + t P)^{-1}`` with an internal cross-check
    against the equivalent resolvent form ``(P^{-1} + t)^{-1}``."""
    t = float(t)
    if not np.isfinite(t) or t < 0.0:
        raise MalformedInputError(f"deformation time must be finite and >= 0, got {t}")
    P = orbit.matrix
    k = P.shape[0]
    eye = np.eye(k)
    form_a = P @ np.linalg.inv(eye + t * P)
    form_a = 0.5 * (form_a + form_a.T)
    form_b = np.linalg.inv(np.linalg.inv(P) + t * eye)
    scale = max(1.0, float(np.max(np.abs(form_a), initial=0.0)))
    if float(np.max(np.abs(form_a - form_b), initial=0.0)) > 1e-10 * scale:
        raise NumericalError(
            "deformed orbit tensor closed forms disagree beyond tolerance"
        )
    vals, vecs = eigh_sorted(P)
    return DeformationState(
        orbit=orbit,
        t=t,
        matrix=freeze(form_a),
        eigenvalues=freeze(vals),
        eigenbasis=freeze(vecs),
    )


def ct_vertical_matrix(state: DeformationState) -> np.ndarray:
    """Vertical block ``(1 + t P)^{-1}`` of the reparametrization operator."""
    k = state.dim
    return np.linalg.solve(np.eye(k) + state.t * state.orbit.matrix, np.eye(k))


@dataclass(frozen=True, eq=False)
class CurvatureOracle:
    """Covariant curvature tensor of the *undeformed* metric on a fixed
    g-orthonormal mixed frame.

    Frame convention: the indices listed in ``horizontal`` carry the
    g-orthonormal horizontal directions (in the order callers supply
    horizontal coordinates); the remaining indices, in ascending order, carry
    the vertical eigenframe ``e_i = lam_i^{-1/2} v_i*`` sorted by ascending
    eigenvalue of ``P``.

    ``R[i, j, k, l] = R_g(f_i, f_j, f_k, f_l)`` with the sign convention for
    which ``R[i, j, j, i]`` is the sectional numerator (positive on spheres).
    """

    R: np.ndarray
    horizontal: tuple[int, ...] = ()
    vertical_indices: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        if R.ndim != 4 or len(set(R.shape)) != 1:
            raise MalformedInputError(
                f"curvature tensor must be (n, n, n, n), got {R.shape}"
            )
        if not np.all(np.isfinite(R)):
            raise MalformedInputError("curvature tensor has non-finite entries")
        n = R.shape[0]
        hor = tuple(int(i) for i in self.horizontal)
        if len(set(hor)) != len(hor) or any(i < 0 or i >= n for i in hor):
            raise MalformedInputError("horizontal indices must be unique and in range")
        scale = max(1.0, float(np.max(np.abs(R))) if R.size else 1.0)
        tol = 1e-8 * scale
        checks = {
            "antisymmetry in first pair": R + R.transpose(1, 0, 2, 3),
            "antisymmetry in last pair": R + R.transpose(0, 1, 3, 2),
            "pair interchange symmetry": R - R.transpose(2, 3, 0, 1),
            "first Bianchi identity": R
            + R.transpose(0, 2, 3, 1)
            + R.transpose(0, 3, 1, 2),
        }
        for name, resid in checks.items():
            if float(np.max(np.abs(resid), initial=0.0)) > tol:
                raise MalformedInputError(f"curvature tensor violates {name}")
        vert = tuple(i for i in range(n) if i not in set(hor))
        object.__setattr__(self, "R", freeze(R))
        object.__setattr__(self, "horizontal", hor)
        object.__setattr__(self, "vertical_indices", vert)

    @property
    def dim(self) -> int:
        return self.R.shape[0]

    def sectional_numerator(self, a: np.ndarray, b: np.ndarray) -> float:
        """R(a, b, b, a) for frame-coordinate vectors ``a``, ``b``."""
        return float(np.einsum("i,j,k,l,ijkl->", a, b, b, a, self.R))

    def horizontal_ricci_matrix(self) -> np.ndarray:
        """Sum of R(., f_a, f_a, .) over the horizontal frame directions."""
        M = np.zeros((self.dim, self.dim))
        for a in self.horizontal:
            M += self.R[:, a, a, :]
        return M


def _check_compatible(
    state: DeformationState, oracle: CurvatureOracle, v: MixedVector
) -> None:
    if len(oracle.vertical_indices) != state.dim:
        raise MalformedInputError(
            f"oracle has {len(oracle.vertical_indices)} vertical directions, "
            f"orbit tensor has {state.dim}"
        )
    if v.horizontal.shape[0] != len(oracle.horizontal):
        raise MalformedInputError(
            f"vector has {v.horizontal.shape[0]} horizontal coordinates, "
            f"oracle frame has {len(oracle.horizontal)}"
        )
    if v.vertical.shape[0] != state.dim:
        raise MalformedInputError(
            f"vector has {v.vertical.shape[0]} vertical coordinates, "
            f"orbit tensor has {state.dim}"
        )


def frame_coordinates(
    state: DeformationState, oracle: CurvatureOracle, v: MixedVector
) -> np.ndarray:
    """Coordinates of ``v`` in the oracle's g-orthonormal mixed frame.

    A vertical chart vector ``u = sum_i a_i v_i`` expands against the
    eigenframe as ``u* = sum_i a_i lam_i^{1/2} e_i``.
    """
    _check_compatible(state, oracle, v)
    coords = np.zeros(oracle.dim)
    a = state.eigenbasis.T @ v.vertical
    coords[list(oracle.vertical_indices)] = np.sqrt(state.eigenvalues) * a
    if oracle.horizontal:
        coords[list(oracle.horizontal)] = v.horizontal
    return coords


def apply_metric_tensor(state: DeformationState, v: MixedVector) -> MixedVector:
    """C_t v: identity horizontally, ``(1 + t P)^{-1}`` vertically."""
    k = state.dim
    u = np.linalg.solve(np.eye(k) + state.t * state.orbit.matrix, v.vertical)
    return MixedVector(horizontal=v.horizontal, vertical=u)


def apply_metric_tensor_inverse(state: DeformationState, v: MixedVector) -> MixedVector:
    """C_t^{-1} v: identity horizontally, ``1 + t P`` vertically."""
    u = v.vertical + state.t * (state.orbit.matrix @ v.vertical)
    return MixedVector(horizontal=v.horizontal, vertical=u)


def orthonormal_eigenframe(
    state: DeformationState, horizontal_frame_dim: int = 0
) -> list[dict]:
    """The g-orthonormal mixed frame and its g_t-orthonormal rescaling.

    Vertical entries carry the chart coordinates of the g-unit eigenvector
    ``e_i = lam_i^{-1/2} v_i*`` and the rescaling ``(1 + t lam_i)^{1/2}``
    that makes it g_t-unit; horizontal entries (appended when
    ``horizontal_frame_dim > 0``) keep scale 1, since the deformation fixes
    the horizontal space.  The g_t-Gram of the rescaled vertical frame is
    the identity by construction; this is asserted internally.
    """
    vals, vecs = state.eigenvalues, state.eigenbasis
    records = []
    for i in range(state.dim):
        e_chart = vecs[:, i] / np.sqrt(vals[i])
        scale = float(np.sqrt(1.0 + state.t * vals[i]))
        records.append(
            {
                "kind": "vertical",
                "eigenvalue": float(vals[i]),
                "g_unit_chart_coords": e_chart.copy(),
                "gt_unit_scale": scale,
            }
        )
    # internal consistency: g_t(s_i e_i, s_j e_j) = delta_ij
    E = np.array(
        [r["g_unit_chart_coords"] * r["gt_unit_scale"] for r in records]
    ).T
    gram = E.T @ state.matrix @ E
    if float(np.max(np.abs(gram - np.eye(state.dim)), initial=0.0)) > 1e-8:
        raise NumericalError("deformed eigenframe failed its orthonormality check")
    for a in range(int(horizontal_frame_dim)):
        records.append({"kind": "horizontal", "index": a, "gt_unit_scale": 1.0})
    return records


def _vertical_to_algebra(state: DeformationState, u: np.ndarray) -> np.ndarray:
    return state.space.complement_basis.T @ u


def reparam_sectional_lower(
    state: DeformationState,
    oracle: CurvatureOracle,
    x: MixedVector,
    y: MixedVector,
) -> float:
    """Certified lower bound for the reparametrized sectional numerator:

        kappa_t(x, y) >= kappa_0(x, y) + (t^3 / 4) |[P u_x, P u_y]|_Q^2.

    Exact when the dropped nonnegative remainder vanishes (e.g. flat input
    planes, or t = 0).
    """
    _check_compatible(state, oracle, x)
    _check_compatible(state, oracle, y)
    kappa0 = oracle.sectional_numerator(
        frame_coordinates(state, oracle, x), frame_coordinates(state, oracle, y)
    )
    P = state.orbit.matrix
    algebra = state.space.parent
    pux = _vertical_to_algebra(state, P @ x.vertical)
    puy = _vertical_to_algebra(state, P @ y.vertical)
    br = algebra.bracket(pux, puy)
    return kappa0 + (state.t**3 / 4.0) * algebra.norm_sq(br)


def _full_algebra_metric(state: DeformationState) -> np.ndarray:
    """Gram matrix of g_t in the ambient algebra basis (full-orbit case)."""
    W = state.space.complement_basis
    Q = state.space.parent.Q
    return Q @ W.T @ state.matrix @ W @ Q


@lru_cache(maxsize=256)
def _cached_curvature(c_bytes: bytes, g_bytes: bytes, n: int) -> np.ndarray:
    """Koszul curvature keyed by the raw bytes of (c, G); the hot path for
    repeated exact-mode evaluations at a fixed deformation time."""
    c = np.frombuffer(c_bytes, dtype=float).reshape(n, n, n)
    G = np.frombuffer(g_bytes, dtype=float).reshape(n, n)
    return freeze(_koszul.curvature(c, G))


def reparam_sectional_exact(
    state: DeformationState, x: MixedVector, y: MixedVector
) -> float:
    """Exact reparametrized sectional numerator, available when the orbit
    directions fill the whole algebra (the group acting on itself, possibly
    times a flat factor that horizontal coordinates parametrize).

    Computes the curvature of the left-invariant metric with matrix ``Q P_t``
    and evaluates it on ``C_t^{-1}``-reparametrized arguments; horizontal
    (flat-factor) coordinates contribute nothing.
    """
    split = state.space
    if split.complement_dim != split.parent.dim:
        raise UnsupportedModeError(
            "exact sectional values need the orbit directions to span the "
            "full algebra; use reparam_sectional_lower instead"
        )
    c = split.parent.structure_constants
    G_t = _full_algebra_metric(state)
    R4 = _cached_curvature(
        np.ascontiguousarray(c).tobytes(),
        np.ascontiguousarray(G_t).tobytes(),
        split.parent.dim,
    )
    zx = _vertical_to_algebra(
        state, apply_metric_tensor_inverse(state, x).vertical
    )
    zy = _vertical_to_algebra(
        state, apply_metric_tensor_inverse(state, y).vertical
    )
    return float(np.einsum("i,j,k,l,ijkl->", zx, zy, zy, zx, R4))


def sectional_residual(
    state: DeformationState,
    x: MixedVector,
    y: MixedVector,
    tol: float = 1e-8,
) -> float:
    """Nonnegative remainder ``z_t = kappa_t - kappa_0 - bracket term``.

    Raises :class:`NumericalError` if the computed remainder is negative
    beyond roundoff, since that would contradict the structure theorem the
    lower bound rests on.
    """
    exact_t = reparam_sectional_exact(state, x, y)
    state0 = deform_orbit_tensor(state.orbit, 0.0)
    exact_0 = reparam_sectional_exact(state0, x, y)
    P = state.orbit.matrix
    algebra = state.space.parent
    pux = _vertical_to_algebra(state, P @ x.vertical)
    puy = _vertical_to_algebra(state, P @ y.vertical)
    bracket_term = (state.t**3 / 4.0) * algebra.norm_sq(algebra.bracket(pux, puy))
    z = exact_t - exact_0 - bracket_term
    scale = max(1.0, abs(exact_t), abs(exact_0))
    if z < -tol * scale:
        raise NumericalError(
            f"sectional remainder came out negative ({z:.3e}); "
            "inputs are inconsistent with the deformation structure"
        )
    return z


def horizontal_ricci(
    oracle: CurvatureOracle,
    v: MixedVector,
    state: DeformationState | None = None,
) -> float:
    """Partial Ricci trace over the horizontal frame, Ric^h(v) =
    sum_a R(v, f_a, f_a, v).  ``state`` is needed exactly when ``v`` has a
    nonzero vertical part (to express it in the eigenframe)."""
    if state is None:
        if v.vertical.size and np.any(v.vertical != 0.0):
            raise MalformedInputError(
                "a deformation state is required to place vertical "
                "coordinates in the oracle frame"
            )
        coords = np.zeros(oracle.dim)
        if oracle.horizontal:
            if v.horizontal.shape[0] != len(oracle.horizontal):
                raise MalformedInputError(
                    "horizontal coordinate count does not match the oracle frame"
                )
            coords[list(oracle.horizontal)] = v.horizontal
    else:
        coords = frame_coordinates(state, oracle, v)
    M = oracle.horizontal_ricci_matrix()
    return float(coords @ M @ coords)


def deformed_ricci_lower(
    state: DeformationState,
    oracle: CurvatureOracle,
    x: MixedVector,
    bracket_form: str = "statement",
) -> float:
    """Certified lower bound for Ric_{g_t} on the reparametrized vector:

        Ric_{g_t}(x) >= Ric^h(C_t x)
            + sum_i (1 + t lam_i)^{-1} [ kappa_0(e_i, C_t x)
                 + (lam_i t / 4) |[v_i, t P (1 + t P)^{-1} u_x]|_Q^2 ],

    where ``u_x`` is the vertical chart part of the *unreparametrized* ``x``
    and the sum runs over the eigenframe of ``P``.  The dropped remainder is
    a sum of nonnegative sectional remainders, so the bound is certified.

    ``bracket_form`` selects between two algebraically identical spellings of
    the bracket term: ``"statement"`` uses ``t P (1 + t P)^{-1} u_x`` inside
    the norm with prefactor ``lam_i t / 4``; ``"proof"`` uses
    ``P (1 + t P)^{-1} u_x`` with prefactor ``lam_i t^3 / 4``.
    """
    if bracket_form not in ("statement", "proof"):
        raise MalformedInputError(
            f"bracket_form must be 'statement' or 'proof', got {bracket_form!r}"
        )
    _check_compatible(state, oracle, x)
    algebra = state.space.parent
    t = state.t
    cx = apply_metric_tensor(state, x)
    total = horizontal_ricci(oracle, cx, state)
    cx_coords = frame_coordinates(state, oracle, cx)

    # P_t u_x in the chart, shared by both spellings of the bracket term.
    ptu = state.matrix @ x.vertical
    for i, vert_idx in enumerate(oracle.vertical_indices):
        lam = float(state.eigenvalues[i])
        v_alg = _vertical_to_algebra(state, state.eigenbasis[:, i])
        kappa0_i = float(cx_coords @ oracle.R[vert_idx, :, :, vert_idx] @ cx_coords)
        if bracket_form == "statement":
            br = algebra.bracket(v_alg, _vertical_to_algebra(state, t * ptu))
            bracket_term = (lam * t / 4.0) * algebra.norm_sq(br)
        else:
            br = algebra.bracket(v_alg, _vertical_to_algebra(state, ptu))
            bracket_term = (lam * t**3 / 4.0) * algebra.norm_sq(br)
        total += (kappa0_i + bracket_term) / (1.0 + t * lam)
    return float(total)
