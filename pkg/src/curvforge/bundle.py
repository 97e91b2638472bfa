"""Deformation of fiber bundles with compact structure group.

Setup.  The total space is presented as a quotient of a product: a manifold
``P`` carries a free isometric action of a compact group ``G`` (orbit tensor
``P`` on the full algebra, plus abstract horizontal directions), a fiber
``F`` carries a ``G``-action with isotropy subalgebra ``g_f`` at the chosen
point (orbit tensor ``P_F`` on the complement ``m_f``), and the quotient map
``pibar : P x F -> M = (P x F)/G`` has vertical space
``{(Z^v, Z^*) : Z in g}``.  Deforming ``g`` on the ``P`` side induces a
family ``h_t`` of submersion metrics on ``M``.

Chart conventions.  All vertical coordinates on the ``P`` side live in an
*adapted* Q-orthonormal chart of the full algebra whose first ``k``
coordinates span ``m_f`` (so the Q-orthogonal projection onto ``m_f`` is the
leading-block slice); fiber-vertical coordinates live in the ``m_f`` chart
itself.  The induced tensors are

    ptilde_t = (P_F^{-1} + Pi P_t^{-1} iota)^{-1},
    ctilde_t = -(Pi P^{-1} iota) ptilde_t,

where ``Pi``/``iota`` are the projection/inclusion between the charts; the
projection insertion is exactly what ``dpibar o lift = id`` forces, and both
closed forms reduce to the unprojected composites whenever ``P`` preserves
``m_f`` (cross-checked at runtime in that case).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import as_matrix, check_spd, freeze, operator_norm, spd_sqrt
from .cheeger import (
    CurvatureOracle,
    DeformationState,
    MixedVector,
    OrbitTensor,
    deform_orbit_tensor,
    frame_coordinates,
    horizontal_ricci,
    reparam_sectional_exact,
    reparam_sectional_lower,
)
from .errors import (
    MalformedInputError,
    NotSPDError,
    NumericalError,
    UnsupportedModeError,
)
from .lie_core import (
    IsotropyDecomposition,
    LieAlgebraData,
    normal_homogeneous_ricci,
    q_orthonormalize,
)

__all__ = [
    "BundleVector",
    "ProductVector",
    "BundleData",
    "full_orbit_space",
    "induced_orbit_tensor",
    "induced_reparam_operator",
    "horizontal_lift",
    "submersion_differential",
    "diagonal_action_vector",
    "product_metric_inner",
    "horizontal_basis",
    "sectional_lower",
    "ricci_ht_lower",
    "ricci_asymptotic_lower",
    "asymptotic_residuals",
]


@dataclass(frozen=True, eq=False)
class BundleVector:
    """Tangent vector of the quotient: P-horizontal coordinates ``X``,
    F-horizontal coordinates ``X_F``, and vertical coordinates ``U`` in the
    ``m_f`` chart."""

    X: np.ndarray
    X_F: np.ndarray
    U: np.ndarray

    def __post_init__(self):
        for name in ("X", "X_F", "U"):
            a = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if a.ndim != 1 or not np.all(np.isfinite(a)):
                raise MalformedInputError(f"{name} must be a finite 1-d array")
            object.__setattr__(self, name, freeze(a))


@dataclass(frozen=True, eq=False)
class ProductVector:
    """Tangent vector of the product ``P x F``: ``X`` P-horizontal, ``V`` in
    the adapted full-algebra chart (P-vertical leg), ``X_F`` F-horizontal,
    ``W`` in the ``m_f`` chart (F-vertical leg)."""

    X: np.ndarray
    V: np.ndarray
    X_F: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        for name in ("X", "V", "X_F", "W"):
            a = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if a.ndim != 1 or not np.all(np.isfinite(a)):
                raise MalformedInputError(f"{name} must be a finite 1-d array")
            object.__setattr__(self, name, freeze(a))


def full_orbit_space(fiber_split: IsotropyDecomposition) -> IsotropyDecomposition:
    """The adapted full-algebra chart: a Q-orthonormal basis of the whole
    algebra whose first rows are the ``m_f`` complement basis and whose
    remaining rows Q-orthonormalize the isotropy subalgebra.  Used as the
    (trivial-isotropy) orbit space of the free action on the ``P`` side."""
    algebra = fiber_split.parent
    n = algebra.dim
    rows = [fiber_split.complement_basis]
    if fiber_split.isotropy_basis.shape[0]:
        rows.append(q_orthonormalize(fiber_split.isotropy_basis, algebra.Q))
    W = np.vstack(rows) if rows else np.zeros((0, n))
    if W.shape[0] != n:
        raise MalformedInputError(
            "isotropy and complement do not span the algebra"
        )
    return IsotropyDecomposition(
        parent=algebra,
        isotropy_basis=freeze(np.zeros((0, n))),
        complement_basis=freeze(W),
        projector_m=freeze(np.eye(n)),
    )


@dataclass(frozen=True, eq=False)
class BundleData:
    """All pointwise data of the bundle construction.

    Parameters
    ----------
    fiber_split : IsotropyDecomposition
        Splitting ``g = g_f + m_f`` at the fiber point.
    P : (n, n) array
        Orbit tensor of the free action on ``P``, in the adapted chart.
    P_F : (k, k) array
        Orbit tensor of the fiber metric, in the ``m_f`` chart.
    oracle_P, oracle_F : CurvatureOracle
        Curvature of the undeformed metrics ``g`` and ``g_F``, each in its
        own mixed eigenframe (vertical eigenframe of the respective orbit
        tensor plus declared horizontal directions).
    """

    fiber_split: IsotropyDecomposition
    P: np.ndarray
    P_F: np.ndarray
    oracle_P: CurvatureOracle
    oracle_F: CurvatureOracle
    orbit_space: IsotropyDecomposition = field(init=False)
    orbit_P: OrbitTensor = field(init=False)
    orbit_F: OrbitTensor = field(init=False)

    def __post_init__(self):
        space = full_orbit_space(self.fiber_split)
        n = space.parent.dim
        k = self.fiber_split.complement_dim
        P = check_spd(as_matrix(self.P, "P", (n, n)), "P")
        P_F = check_spd(as_matrix(self.P_F, "P_F", (k, k)), "P_F")
        object.__setattr__(self, "P", freeze(P))
        object.__setattr__(self, "P_F", freeze(P_F))
        object.__setattr__(self, "orbit_space", space)
        object.__setattr__(self, "orbit_P", OrbitTensor(space=space, matrix=P))
        object.__setattr__(
            self, "orbit_F", OrbitTensor(space=self.fiber_split, matrix=P_F)
        )
        if len(self.oracle_P.vertical_indices) != n:
            raise MalformedInputError(
                f"oracle_P declares {len(self.oracle_P.vertical_indices)} "
                f"vertical directions; the algebra has dimension {n}"
            )
        if len(self.oracle_F.vertical_indices) != k:
            raise MalformedInputError(
                f"oracle_F declares {len(self.oracle_F.vertical_indices)} "
                f"vertical directions; m_f has dimension {k}"
            )

    @property
    def algebra(self) -> LieAlgebraData:
        return self.fiber_split.parent

    @property
    def algebra_dim(self) -> int:
        return self.algebra.dim

    @property
    def fiber_vertical_dim(self) -> int:
        return self.fiber_split.complement_dim

    @property
    def p_horizontal_dim(self) -> int:
        return len(self.oracle_P.horizontal)

    @property
    def f_horizontal_dim(self) -> int:
        return len(self.oracle_F.horizontal)

    def state_P(self, t: float) -> DeformationState:
        return deform_orbit_tensor(self.orbit_P, t)

    def state_F(self) -> DeformationState:
        """Undeformed fiber state (the fiber metric is never deformed);
        used to express m_f chart vectors in oracle_F's eigenframe."""
        return deform_orbit_tensor(self.orbit_F, 0.0)

    def check_vector(self, v: BundleVector) -> None:
        if v.X.shape[0] != self.p_horizontal_dim:
            raise MalformedInputError(
                f"X has {v.X.shape[0]} coordinates; oracle_P declares "
                f"{self.p_horizontal_dim} horizontal directions"
            )
        if v.X_F.shape[0] != self.f_horizontal_dim:
            raise MalformedInputError(
                f"X_F has {v.X_F.shape[0]} coordinates; oracle_F declares "
                f"{self.f_horizontal_dim} horizontal directions"
            )
        if v.U.shape[0] != self.fiber_vertical_dim:
            raise MalformedInputError(
                f"U has {v.U.shape[0]} coordinates; m_f has dimension "
                f"{self.fiber_vertical_dim}"
            )


def _embed(B: BundleData, u: np.ndarray) -> np.ndarray:
    """Inclusion iota: m_f chart -> adapted full chart (leading block)."""
    out = np.zeros(B.algebra_dim)
    out[: B.fiber_vertical_dim] = u
    return out


def induced_orbit_tensor(B: BundleData, t: float) -> np.ndarray:
    """The quotient's vertical metric tensor on ``m_f``:

        ptilde_t = (P_F^{-1} + Pi P_t^{-1} iota)^{-1}
                 = P_F (1 + (Pi P_t^{-1} iota) P_F)^{-1}.

    Both closed forms are computed and cross-checked; when ``P`` preserves
    ``m_f`` the unprojected composite ``(P_F^{-1} + (P_t|_{m_f})^{-1})^{-1}``
    is additionally verified to coincide.  The result must be SPD.
    """
    state = B.state_P(t)
    k = B.fiber_vertical_dim
    pt_inv = np.linalg.inv(state.matrix)
    block = pt_inv[:k, :k]
    pf = B.orbit_F.matrix
    pf_inv = np.linalg.inv(pf)
    form_a = np.linalg.inv(pf_inv + block)
    form_b = pf @ np.linalg.inv(np.eye(k) + block @ pf)
    scale = max(1.0, float(np.max(np.abs(form_a), initial=0.0)))
    if float(np.max(np.abs(form_a - form_b), initial=0.0)) > 1e-10 * scale:
        raise NumericalError(
            "induced orbit tensor closed forms disagree beyond tolerance"
        )
    off = state.matrix[:k, k:]
    p_scale = max(1.0, float(np.max(np.abs(state.matrix), initial=0.0)))
    if off.size == 0 or float(np.max(np.abs(off), initial=0.0)) <= 1e-10 * p_scale:
        # P_t preserves m_f: the unprojected composite must agree too.
        form_c = np.linalg.inv(pf_inv + np.linalg.inv(state.matrix[:k, :k]))
        if float(np.max(np.abs(form_a - form_c), initial=0.0)) > 1e-8 * scale:
            raise NumericalError(
                "projected and unprojected induced tensors disagree on "
                "m_f-preserving data"
            )
    sym = 0.5 * (form_a + form_a.T)
    eigs = np.linalg.eigvalsh(sym)
    if eigs.size and float(eigs[0]) <= 0.0:
        raise NotSPDError(
            f"induced orbit tensor is not positive definite: smallest "
            f"eigenvalue {eigs[0]:.3e}"
        )
    return sym


def induced_reparam_operator(B: BundleData, t: float) -> np.ndarray:
    """The quotient's reparametrization operator on ``m_f``:

        ctilde_t = -(Pi C_t P_t^{-1} iota) ptilde_t
                 = -(Pi P^{-1} iota) ptilde_t,

    the two spellings agreeing because ``C_t P_t^{-1} = P^{-1}`` as matrix
    functions of ``P``.  Both are evaluated and cross-checked; the result is
    checked to be invertible.
    """
    state = B.state_P(t)
    k = B.fiber_vertical_dim
    n = B.algebra_dim
    ptilde = induced_orbit_tensor(B, t)
    p_inv = np.linalg.inv(B.orbit_P.matrix)
    form_a = -p_inv[:k, :k] @ ptilde
    ct_full = np.linalg.solve(np.eye(n) + t * B.orbit_P.matrix, np.eye(n))
    form_b = -(ct_full @ np.linalg.inv(state.matrix))[:k, :k] @ ptilde
    scale = max(1.0, float(np.max(np.abs(form_a), initial=0.0)))
    if float(np.max(np.abs(form_a - form_b), initial=0.0)) > 1e-10 * scale:
        raise NumericalError(
            "induced reparametrization operator closed forms disagree"
        )
    sv = np.linalg.svd(form_a, compute_uv=False)
    if sv.size and (float(sv[-1]) <= 1e-14 * max(1.0, float(sv[0]))):
        raise NumericalError("induced reparametrization operator is singular")
    return form_a


def horizontal_lift(B: BundleData, t: float, v: BundleVector) -> ProductVector:
    """The pibar-horizontal lift of ``X + X_F + U*``:

        (X - (P_t^{-1} iota ptilde_t U)^v,  X_F + (P_F^{-1} ptilde_t U)^*).

    Horizontal coordinates pass through; the vertical lift legs are
    g_t x g_F-orthogonal to the diagonal action distribution and push back
    down to ``U`` under the quotient differential.
    """
    B.check_vector(v)
    state = B.state_P(t)
    ptilde = induced_orbit_tensor(B, t)
    pu = ptilde @ v.U
    V = -np.linalg.solve(state.matrix, _embed(B, pu))
    W = np.linalg.solve(B.orbit_F.matrix, pu)
    return ProductVector(X=v.X, V=V, X_F=v.X_F, W=W)


def submersion_differential(B: BundleData, w: ProductVector) -> BundleVector:
    """Differential of the quotient map on split coordinates:
    ``(X + V^v, X_F + W^*) -> X + X_F + (-Pi V + W)*`` — the principal-side
    vertical leg pushes to minus its action field, projected to ``m_f``
    because the isotropy part acts trivially at the fiber point."""
    k = B.fiber_vertical_dim
    if w.V.shape[0] != B.algebra_dim or w.W.shape[0] != k:
        raise MalformedInputError("product vector dimensions do not match bundle")
    return BundleVector(X=w.X, X_F=w.X_F, U=-w.V[:k] + w.W)


def diagonal_action_vector(B: BundleData, z_chart: np.ndarray) -> ProductVector:
    """The diagonal action direction ``(Z^v, Z^*)`` of ``Z`` given in the
    adapted chart; its fiber leg sees only the m_f part of ``Z``."""
    z = np.asarray(z_chart, dtype=float)
    return ProductVector(
        X=np.zeros(B.p_horizontal_dim),
        V=z,
        X_F=np.zeros(B.f_horizontal_dim),
        W=z[: B.fiber_vertical_dim],
    )


def product_metric_inner(
    B: BundleData, t: float, a: ProductVector, b: ProductVector
) -> float:
    """g_t x g_F inner product of two product vectors (horizontal frames are
    orthonormal; vertical legs pair through P_t and P_F)."""
    state = B.state_P(t)
    val = float(a.X @ b.X) + float(a.X_F @ b.X_F)
    val += float(a.V @ state.matrix @ b.V)
    val += float(a.W @ B.orbit_F.matrix @ b.W)
    return val


def horizontal_basis(B: BundleData, t: float) -> list[ProductVector]:
    """A g_t x g_F-orthonormal basis of the pibar-horizontal space:
    the P-horizontal frame, the lifted-middle vectors
    ``(-(P_t^{-1} iota ptilde_t^{1/2} v_k)^v, (P_F^{-1} ptilde_t^{1/2} v_k)^*)``
    over the fixed Q-orthonormal ``m_f`` basis ``v_k``, and the F-horizontal
    frame."""
    state = B.state_P(t)
    ptilde = induced_orbit_tensor(B, t)
    sq = spd_sqrt(ptilde)
    h_p, h_f, k = B.p_horizontal_dim, B.f_horizontal_dim, B.fiber_vertical_dim
    out: list[ProductVector] = []
    for a in range(h_p):
        x = np.zeros(h_p)
        x[a] = 1.0
        out.append(
            ProductVector(
                X=x, V=np.zeros(B.algebra_dim), X_F=np.zeros(h_f), W=np.zeros(k)
            )
        )
    for i in range(k):
        s = sq[:, i]
        V = -np.linalg.solve(state.matrix, _embed(B, s))
        W = np.linalg.solve(B.orbit_F.matrix, s)
        out.append(ProductVector(X=np.zeros(h_p), V=V, X_F=np.zeros(h_f), W=W))
    for b in range(h_f):
        x = np.zeros(h_f)
        x[b] = 1.0
        out.append(
            ProductVector(
                X=np.zeros(h_p), V=np.zeros(B.algebra_dim), X_F=x, W=np.zeros(k)
            )
        )
    return out


def _fiber_sectional(B: BundleData, x: MixedVector, y: MixedVector) -> float:
    """Sectional numerator of the undeformed fiber metric."""
    state0 = B.state_F()
    return B.oracle_F.sectional_numerator(
        frame_coordinates(state0, B.oracle_F, x),
        frame_coordinates(state0, B.oracle_F, y),
    )


def sectional_lower(
    B: BundleData,
    t: float,
    x: BundleVector,
    y: BundleVector,
    mode: str = "lower",
) -> float:
    """Certified lower bound for the quotient's reparametrized sectional
    numerator on the plane of ``x``, ``y``:

        kappa_t(X + U^v, Y + V^v)
          + K_{g_F}(X_F - (P_F^{-1} Pi P iota U)*, Y_F - (P_F^{-1} Pi P iota V)*),

    dropping the nonnegative submersion remainder.  ``mode`` selects how the
    first term is evaluated: ``"lower"`` uses the bracket lower bound,
    ``"exact"`` the left-invariant curvature (full-orbit scenarios with flat
    horizontal factors only).  The total stays a lower bound either way.
    """
    B.check_vector(x)
    B.check_vector(y)
    state = B.state_P(t)
    xp = MixedVector(horizontal=x.X, vertical=_embed(B, x.U))
    yp = MixedVector(horizontal=y.X, vertical=_embed(B, y.U))
    if mode == "lower":
        p_term = reparam_sectional_lower(state, B.oracle_P, xp, yp)
    elif mode == "exact":
        p_term = reparam_sectional_exact(state, xp, yp)
    else:
        raise UnsupportedModeError(
            f"mode must be 'lower' or 'exact', got {mode!r}"
        )
    k = B.fiber_vertical_dim
    pf = B.orbit_F.matrix
    fx_vert = -np.linalg.solve(pf, (B.P @ _embed(B, x.U))[:k])
    fy_vert = -np.linalg.solve(pf, (B.P @ _embed(B, y.U))[:k])
    f_term = _fiber_sectional(
        B,
        MixedVector(horizontal=x.X_F, vertical=fx_vert),
        MixedVector(horizontal=y.X_F, vertical=fy_vert),
    )
    return p_term + f_term


def ricci_ht_lower(B: BundleData, t: float, x: BundleVector) -> float:
    """Certified lower bound for the quotient Ricci curvature on the
    reparametrized vector, as the four partial traces over the horizontal
    basis:

    with ``A = X - (P^{-1} iota ptilde_t U)^v`` (the reparametrized
    principal leg) and ``B_F = X_F + (P_F^{-1} ptilde_t U)^*`` (the fiber
    leg), sum the bracket-lower-bounded ``kappa_t(A, .)`` over the
    P-horizontal frame and over the reparametrized middle directions
    ``-(P^{-1} iota ptilde_t^{1/2} v_k)^v``, and the exact fiber curvature
    ``K_{g_F}(B_F, .)`` over the F-horizontal frame and over
    ``(P_F^{-1} ptilde_t^{1/2} v_k)^*``.
    """
    B.check_vector(x)
    state = B.state_P(t)
    ptilde = induced_orbit_tensor(B, t)
    sq = spd_sqrt(ptilde)
    p_inv = np.linalg.inv(B.orbit_P.matrix)
    pf = B.orbit_F.matrix
    h_p, h_f, k = B.p_horizontal_dim, B.f_horizontal_dim, B.fiber_vertical_dim

    pu = ptilde @ x.U
    A = MixedVector(horizontal=x.X, vertical=-p_inv @ _embed(B, pu))
    B_F = MixedVector(horizontal=x.X_F, vertical=np.linalg.solve(pf, pu))

    total = 0.0
    for a in range(h_p):
        e = np.zeros(h_p)
        e[a] = 1.0
        basis_vec = MixedVector(horizontal=e, vertical=np.zeros(B.algebra_dim))
        total += reparam_sectional_lower(state, B.oracle_P, A, basis_vec)
    for i in range(k):
        c_vert = -p_inv @ _embed(B, sq[:, i])
        middle = MixedVector(horizontal=np.zeros(h_p), vertical=c_vert)
        total += reparam_sectional_lower(state, B.oracle_P, A, middle)
    for b in range(h_f):
        e = np.zeros(h_f)
        e[b] = 1.0
        total += _fiber_sectional(
            B, B_F, MixedVector(horizontal=e, vertical=np.zeros(k))
        )
    for i in range(k):
        w = MixedVector(
            horizontal=np.zeros(h_f), vertical=np.linalg.solve(pf, sq[:, i])
        )
        total += _fiber_sectional(B, B_F, w)
    return float(total)


def ricci_asymptotic_lower(B: BundleData, x: BundleVector) -> float:
    """Large-deformation limit of the Ricci lower bound:

        Ric_g^h(X) + Ric_{g_F}^h(X_F) + (1/4) sum_k |[v_k, U]|_Q^2.

    Exact evaluation of the limiting quadratic form (no t involved)."""
    B.check_vector(x)
    val = horizontal_ricci(
        B.oracle_P, MixedVector(horizontal=x.X, vertical=np.zeros(B.algebra_dim))
    )
    val += horizontal_ricci(
        B.oracle_F,
        MixedVector(horizontal=x.X_F, vertical=np.zeros(B.fiber_vertical_dim)),
    )
    val += normal_homogeneous_ricci(B.fiber_split, x.U)
    return float(val)


def asymptotic_residuals(B: BundleData, t: float) -> tuple[float, float]:
    """Spectral-norm distances ``(|t ptilde_t - 1|, |P_t^{-1} ptilde_t - 1|)``
    quantifying the approach to the large-deformation limit; both tend to 0
    as t grows."""
    state = B.state_P(t)
    k = B.fiber_vertical_dim
    ptilde = induced_orbit_tensor(B, t)
    eye = np.eye(k)
    r1 = operator_norm(t * ptilde - eye)
    pt_inv_block = np.linalg.inv(state.matrix)[:k, :k]
    r2 = operator_norm(pt_inv_block @ ptilde - eye)
    return (r1, r2)
