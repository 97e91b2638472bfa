"""Built-in scenarios and the JSON scenario loader.

Every scenario bundles a compact-algebra presentation, an isotropy split of
the fiber action, the two orbit tensors, and curvature oracles for both
undeformed metrics.  Catalog oracles are generated by the left-invariant
curvature machinery in :mod:`curvforge.oracle` (or are handcrafted
constant-curvature/product tensors for the injected scenarios), so every
downstream deformation formula is exercised against independent data.

Scenario files use the same JSON layout the ``catalog`` entries are built
from; see :func:`scenario_from_dict` for the schema and the JSON-pointer
paths used in validation errors.
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._linalg import as_matrix
from .bundle import BundleData, full_orbit_space
from .cheeger import CurvatureOracle
from .errors import (
    MalformedInputError,
    ScenarioValidationError,
    UnknownScenarioError,
)
from .lie_core import (
    IsotropyDecomposition,
    LieAlgebraData,
    isotropy_split,
    validate_algebra,
)
from .oracle import (
    LeftInvariantMetric,
    block_oracle,
    constant_curvature_oracle,
    curvature_tensor,
)

__all__ = [
    "Scenario",
    "CatalogEntry",
    "CATALOG",
    "catalog_names",
    "load_scenario",
    "scenario_from_dict",
    "su2_algebra",
    "so_algebra",
    "abelian_algebra",
    "direct_sum",
]

KNOWN_CAPABILITIES = frozenset({"exact_kappa", "lower_only"})


@dataclass(frozen=True, eq=False)
class Scenario:
    """A named bundle configuration plus its declared capabilities."""

    name: str
    description: str
    bundle: BundleData
    capabilities: frozenset[str]
    provenance: str

    @property
    def exact_available(self) -> bool:
        return "exact_kappa" in self.capabilities


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    build: Callable[[], Scenario]


# ---------------------------------------------------------------------------
# algebra builders
# ---------------------------------------------------------------------------


def su2_algebra() -> LieAlgebraData:
    """su(2) in a Q-orthonormal basis with the cyclic bracket
    [e1, e2] = e3, [e2, e3] = e1, [e3, e1] = e2."""
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k] = 1.0
        c[j, i, k] = -1.0
    return LieAlgebraData(structure_constants=c, Q=np.eye(3))


def _skew_pair(n: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((n, n))
    E[i, j] = 1.0
    E[j, i] = -1.0
    return E


def so_algebra(n: int, pairs=None) -> LieAlgebraData:
    """so(n) in the basis of elementary skew matrices ``E[i, j] = 1,
    E[j, i] = -1`` over the given index pairs (all ``i < j`` pairs in
    lexicographic order by default).  The inner product is
    ``<A, B> = tr(A^T B) / 2``, which makes this basis orthonormal and the
    structure constants exact small integers."""
    if pairs is None:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    basis = [_skew_pair(n, int(i), int(j)) for i, j in pairs]
    m = len(basis)
    c = np.zeros((m, m, m))
    for a in range(m):
        for b in range(m):
            comm = basis[a] @ basis[b] - basis[b] @ basis[a]
            for k in range(m):
                c[a, b, k] = 0.5 * float(np.trace(basis[k].T @ comm))
    return LieAlgebraData(structure_constants=c, Q=np.eye(m))


def abelian_algebra(n: int) -> LieAlgebraData:
    """R^n with the zero bracket (flat negative control)."""
    return LieAlgebraData(structure_constants=np.zeros((n, n, n)), Q=np.eye(n))


def direct_sum(a: LieAlgebraData, b: LieAlgebraData) -> LieAlgebraData:
    """Direct sum of two algebras (block structure constants, block Q)."""
    na, nb = a.dim, b.dim
    n = na + nb
    c = np.zeros((n, n, n))
    c[:na, :na, :na] = a.structure_constants
    c[na:, na:, na:] = b.structure_constants
    Q = np.zeros((n, n))
    Q[:na, :na] = a.Q
    Q[na:, na:] = b.Q
    return LieAlgebraData(structure_constants=c, Q=Q)


# ---------------------------------------------------------------------------
# oracle helpers
# ---------------------------------------------------------------------------


def _metric_from_chart(
    space: IsotropyDecomposition, P_chart: np.ndarray
) -> np.ndarray:
    """Algebra-basis Gram matrix of the metric whose chart matrix is
    ``P_chart``: ``G = Q W^T P_chart W Q``."""
    Q = space.parent.Q
    W = space.complement_basis
    return Q @ W.T @ P_chart @ W @ Q


def _koszul_oracle(
    space: IsotropyDecomposition, P_chart: np.ndarray, horizontal_dim: int = 0
) -> CurvatureOracle:
    """Left-invariant curvature oracle on a full-algebra chart."""
    M = LeftInvariantMetric(
        algebra=space.parent, metric=_metric_from_chart(space, P_chart)
    )
    return curvature_tensor(M, frame_split=space, horizontal_dim=horizontal_dim)


def _trivial_split(algebra: LieAlgebraData) -> IsotropyDecomposition:
    return isotropy_split(algebra, np.zeros((0, algebra.dim)))


# ---------------------------------------------------------------------------
# catalog scenario builders
# ---------------------------------------------------------------------------


def _group_on_itself(
    name: str,
    description: str,
    algebra: LieAlgebraData,
    P_chart: np.ndarray,
    P_F_chart: np.ndarray,
) -> Scenario:
    """Free action with trivial fiber isotropy: the group acting on itself.
    Both oracles come from the independent left-invariant machinery."""
    fsplit = _trivial_split(algebra)
    space = full_orbit_space(fsplit)
    bundle = BundleData(
        fiber_split=fsplit,
        P=P_chart,
        P_F=P_F_chart,
        oracle_P=_koszul_oracle(space, np.asarray(P_chart, dtype=float)),
        oracle_F=_koszul_oracle(fsplit, np.asarray(P_F_chart, dtype=float)),
    )
    return Scenario(
        name=name,
        description=description,
        bundle=bundle,
        capabilities=frozenset({"exact_kappa"}),
        provenance="catalog",
    )


def _build_su2_full() -> Scenario:
    return _group_on_itself(
        "su2-full",
        "su(2) acting on itself, bi-invariant metric on both factors",
        su2_algebra(),
        np.eye(3),
        np.eye(3),
    )


def _build_su2_berger() -> Scenario:
    return _group_on_itself(
        "su2-berger",
        "su(2) on itself with one orbit direction shrunk (Berger-type P)",
        su2_algebra(),
        np.diag([0.5, 1.0, 1.0]),
        np.eye(3),
    )


def _build_so3_full() -> Scenario:
    return _group_on_itself(
        "so3-full",
        "so(3) on itself in the cyclic angular-momentum basis",
        so_algebra(3, pairs=((2, 1), (0, 2), (1, 0))),
        np.eye(3),
        np.eye(3),
    )


def _build_so4_full() -> Scenario:
    return _group_on_itself(
        "so4-full",
        "so(4) on itself, bi-invariant metric (non-simple compact group)",
        so_algebra(4),
        np.eye(6),
        np.eye(6),
    )


def _build_su2xsu2_diag() -> Scenario:
    return _group_on_itself(
        "su2xsu2-diag",
        "su(2)+su(2) on itself with the two fiber factors weighted 1 and 2",
        direct_sum(su2_algebra(), su2_algebra()),
        np.eye(6),
        np.diag([1.0, 1.0, 1.0, 2.0, 2.0, 2.0]),
    )


def _build_abelian_flat() -> Scenario:
    algebra = abelian_algebra(3)
    scenario = _group_on_itself(
        "abelian-flat",
        "abelian algebra, everything flat: negative control (C = 0)",
        algebra,
        np.eye(3),
        np.eye(3),
    )
    return scenario


def _build_so4_so3() -> Scenario:
    """so(4) acting on the round 3-sphere: fiber isotropy so(3), complement
    the three skew generators moving the last coordinate; the fiber metric's
    curvature is the constant-curvature tensor with K = 1."""
    algebra = so_algebra(4)
    # lexicographic pair order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3);
    # the so(3) fixing the last coordinate is spanned by rows 0, 1, 3.
    iso = np.eye(6)[[0, 1, 3]]
    fsplit = isotropy_split(algebra, iso)
    space = full_orbit_space(fsplit)
    bundle = BundleData(
        fiber_split=fsplit,
        P=np.eye(6),
        P_F=np.eye(3),
        oracle_P=_koszul_oracle(space, np.eye(6)),
        oracle_F=constant_curvature_oracle(3, 1.0),
    )
    return Scenario(
        name="so4-so3",
        description="so(4) acting on the round 3-sphere (isotropy so(3))",
        bundle=bundle,
        capabilities=frozenset({"exact_kappa"}),
        provenance="catalog",
    )


def _injected_bundle(horizontal_block: np.ndarray) -> BundleData:
    """su(2) orbit directions with three injected abstract horizontal
    directions whose curvature block is supplied directly."""
    algebra = su2_algebra()
    fsplit = _trivial_split(algebra)
    space = full_orbit_space(fsplit)
    su2_block = _koszul_oracle(space, np.eye(3)).R
    oracle_P = block_oracle(
        [(su2_block, ()), (np.asarray(horizontal_block, dtype=float), (0, 1, 2))]
    )
    return BundleData(
        fiber_split=fsplit,
        P=np.eye(3),
        P_F=np.eye(3),
        oracle_P=oracle_P,
        oracle_F=_koszul_oracle(fsplit, np.eye(3)),
    )


def _build_injected_base() -> Scenario:
    base = constant_curvature_oracle(3, 1.0).R
    return Scenario(
        name="injected-base",
        description="su(2) orbits with an injected curved 3-d horizontal "
        "block (constant curvature 1)",
        bundle=_injected_bundle(base),
        capabilities=frozenset({"lower_only"}),
        provenance="catalog",
    )


def _build_injected_base_flat() -> Scenario:
    return Scenario(
        name="injected-base-flat",
        description="su(2) orbits with a flat injected horizontal block "
        "(r_P = 0 negative control)",
        bundle=_injected_bundle(np.zeros((3, 3, 3, 3))),
        capabilities=frozenset({"exact_kappa"}),
        provenance="catalog",
    )


def _build_warped_mix() -> Scenario:
    """Injected-base curvature minus a mixed-plane coupling term: keeps both
    pure blocks (so the limiting certificate still passes) while making the
    undeformed vertical Ricci negative, so the positivity threshold is a
    genuinely positive finite time."""
    s = 1.0
    base = constant_curvature_oracle(3, 1.0).R
    gv = np.zeros((6, 6))
    gv[:3, :3] = np.eye(3)
    gh = np.zeros((6, 6))
    gh[3:, 3:] = np.eye(3)
    kn = (
        np.einsum("il,jk->ijkl", gv, gh)
        + np.einsum("jk,il->ijkl", gv, gh)
        - np.einsum("ik,jl->ijkl", gv, gh)
        - np.einsum("jl,ik->ijkl", gv, gh)
    )
    algebra = su2_algebra()
    fsplit = _trivial_split(algebra)
    space = full_orbit_space(fsplit)
    su2_block = _koszul_oracle(space, np.eye(3)).R
    R = block_oracle([(su2_block, ()), (base, (0, 1, 2))]).R - s * kn
    bundle = BundleData(
        fiber_split=fsplit,
        P=np.eye(3),
        P_F=np.eye(3),
        oracle_P=CurvatureOracle(R=R, horizontal=(3, 4, 5)),
        oracle_F=_koszul_oracle(fsplit, np.eye(3)),
    )
    return Scenario(
        name="warped-mix",
        description="injected base with a negative mixed-plane coupling: "
        "certifiable only after a positive finite deformation time",
        bundle=bundle,
        capabilities=frozenset({"lower_only"}),
        provenance="catalog",
    )


_ENTRIES = (
    CatalogEntry(
        "su2-full",
        "su(2) on itself, bi-invariant on both factors",
        _build_su2_full,
    ),
    CatalogEntry(
        "su2-berger",
        "su(2) on itself, one orbit direction shrunk to 1/2",
        _build_su2_berger,
    ),
    CatalogEntry(
        "so3-full",
        "so(3) on itself, cyclic angular-momentum basis",
        _build_so3_full,
    ),
    CatalogEntry(
        "so4-full",
        "so(4) on itself, bi-invariant (non-simple group)",
        _build_so4_full,
    ),
    CatalogEntry(
        "so4-so3",
        "so(4) acting on the round 3-sphere, isotropy so(3)",
        _build_so4_so3,
    ),
    CatalogEntry(
        "su2xsu2-diag",
        "su(2)+su(2) on itself, fiber factors weighted 1 and 2",
        _build_su2xsu2_diag,
    ),
    CatalogEntry(
        "abelian-flat",
        "flat abelian negative control (bracket gap C = 0)",
        _build_abelian_flat,
    ),
    CatalogEntry(
        "injected-base",
        "su(2) orbits + injected constant-curvature horizontal block",
        _build_injected_base,
    ),
    CatalogEntry(
        "injected-base-flat",
        "injected flat horizontal block (r_P = 0 negative control)",
        _build_injected_base_flat,
    ),
    CatalogEntry(
        "warped-mix",
        "negative mixed coupling: positive finite certification threshold",
        _build_warped_mix,
    ),
)

CATALOG: dict[str, CatalogEntry] = {e.name: e for e in _ENTRIES}


def catalog_names() -> tuple[str, ...]:
    return tuple(CATALOG)


# ---------------------------------------------------------------------------
# JSON loading
# ---------------------------------------------------------------------------


def _fail(message: str, path: str) -> ScenarioValidationError:
    return ScenarioValidationError(f"{path}: {message}", paths=(path,))


def _get_array(data: dict, key: str, path: str, dtype=float) -> np.ndarray:
    if key not in data:
        raise _fail("missing required field", f"{path}/{key}")
    try:
        return np.asarray(data[key], dtype=dtype)
    except (TypeError, ValueError) as exc:
        raise _fail(f"not a numeric array: {exc}", f"{path}/{key}") from None


def _algebra_from_dict(data: dict) -> LieAlgebraData:
    obj = data.get("algebra")
    if not isinstance(obj, dict):
        raise _fail("must be an object with fields dim, c, Q", "/algebra")
    c = _get_array(obj, "c", "/algebra")
    Q = _get_array(obj, "Q", "/algebra")
    if "dim" in obj:
        try:
            n = int(obj["dim"])
        except (TypeError, ValueError):
            raise _fail("must be an integer", "/algebra/dim") from None
        if c.shape != (n, n, n):
            raise _fail(
                f"shape {c.shape} does not match dim = {n}", "/algebra/c"
            )
    try:
        algebra = LieAlgebraData(structure_constants=c, Q=Q)
    except MalformedInputError as exc:
        raise _fail(str(exc), "/algebra") from None
    report = validate_algebra(algebra)
    path_of = {
        "antisymmetry": "/algebra/c",
        "jacobi": "/algebra/c",
        "bi_invariance": "/algebra/Q",
        "q_positive_definite": "/algebra/Q",
    }
    for item in report.items:
        if not item.passed:
            raise _fail(
                f"algebra check {item.name!r} failed "
                f"(residual {item.residual:.3e})",
                path_of.get(item.name, "/algebra"),
            )
    return algebra


def _oracle_from_dict(
    obj, expected_vertical: int, path: str
) -> CurvatureOracle:
    if not isinstance(obj, dict):
        raise _fail("must be an object with fields R and horizontal", path)
    horizontal_raw = obj.get("horizontal", [])
    try:
        horizontal = tuple(int(a) for a in horizontal_raw)
    except (TypeError, ValueError):
        raise _fail("must be a list of integers", f"{path}/horizontal") from None
    R = _get_array(obj, "R", path)
    if R.ndim == 1:
        N = round(R.size ** 0.25)
        if "frame_dim" in obj:
            N = int(obj["frame_dim"])
        if N**4 != R.size:
            raise _fail(
                f"flat tensor of length {R.size} is not a fourth power of "
                f"the frame size {N}",
                f"{path}/R",
            )
        R = R.reshape(N, N, N, N)
    elif R.ndim != 4:
        raise _fail(
            "must be a rank-4 tensor or a flat row-major list", f"{path}/R"
        )
    if "frame_dim" in obj and int(obj["frame_dim"]) != R.shape[0]:
        raise _fail(
            f"frame_dim = {obj['frame_dim']} does not match the tensor size "
            f"{R.shape[0]}",
            f"{path}/frame_dim",
        )
    try:
        oracle = CurvatureOracle(R=R, horizontal=horizontal)
    except MalformedInputError as exc:
        raise _fail(str(exc), f"{path}/R") from None
    if len(oracle.vertical_indices) != expected_vertical:
        raise _fail(
            f"oracle has {len(oracle.vertical_indices)} vertical directions, "
            f"expected {expected_vertical}",
            path,
        )
    return oracle


def scenario_from_dict(
    data, name: str | None = None, provenance: str = "user-file"
) -> Scenario:
    """Build a :class:`Scenario` from parsed JSON.

    Schema (all matrices as nested lists)::

        {
          "name": "...",                     # optional
          "algebra": {"dim": n, "c": [[[...]]], "Q": [[...]]},
          "isotropy": [[...], ...],          # rows in the algebra basis
          "P":   [[...]],                    # (n, n) metric endomorphism,
                                             #   algebra basis (Gram = Q P)
          "P_F": [[...]],                    # (k, k) m_f-chart matrix, or
                                             #   (n, n) algebra endomorphism
                                             #   preserving m_f
          "oracle_P": {"horizontal": [...], "R": ...},
          "oracle_F": {"horizontal": [...], "R": ...},
          "capabilities": ["exact_kappa" | "lower_only", ...]
        }

    Curvature tensors ``R`` may be nested rank-4 lists or flat row-major
    lists (with optional ``frame_dim``).  Validation failures raise
    :class:`ScenarioValidationError` carrying JSON-pointer paths.
    """
    if not isinstance(data, dict):
        raise _fail("scenario document must be a JSON object", "/")
    scenario_name = str(data.get("name") or name or "scenario")

    algebra = _algebra_from_dict(data)
    n = algebra.dim

    iso_raw = data.get("isotropy", [])
    try:
        iso = np.asarray(iso_raw, dtype=float).reshape(-1, n) if len(iso_raw) else np.zeros((0, n))
    except (TypeError, ValueError) as exc:
        raise _fail(f"not rows of length {n}: {exc}", "/isotropy") from None
    try:
        fsplit = isotropy_split(algebra, iso)
    except MalformedInputError as exc:
        raise _fail(str(exc), "/isotropy") from None
    k = fsplit.complement_dim
    space = full_orbit_space(fsplit)
    W = space.complement_basis
    W_f = fsplit.complement_basis

    P_alg = _get_array(data, "P", "")
    if P_alg.shape != (n, n):
        raise _fail(f"must be ({n}, {n}), got {P_alg.shape}", "/P")
    P_chart = W @ algebra.Q @ P_alg @ W.T

    if "P_F" not in data:
        raise _fail("missing required field", "/P_F")
    P_F_raw = _get_array(data, "P_F", "")
    if P_F_raw.shape == (k, k):
        P_F_chart = P_F_raw
    elif P_F_raw.shape == (n, n):
        cols = P_F_raw @ W_f.T
        resid = cols - fsplit.projector_m @ cols
        scale = max(1.0, float(np.max(np.abs(P_F_raw), initial=0.0)))
        if float(np.max(np.abs(resid), initial=0.0)) > 1e-10 * scale:
            raise _fail(
                "algebra-basis P_F does not preserve the complement m_f",
                "/P_F",
            )
        P_F_chart = W_f @ algebra.Q @ P_F_raw @ W_f.T
    else:
        raise _fail(
            f"must be ({k}, {k}) in the m_f chart or ({n}, {n}) in the "
            f"algebra basis, got {P_F_raw.shape}",
            "/P_F",
        )

    if "oracle_P" not in data:
        raise _fail("missing required field", "/oracle_P")
    if "oracle_F" not in data:
        raise _fail("missing required field", "/oracle_F")
    oracle_P = _oracle_from_dict(data["oracle_P"], n, "/oracle_P")
    oracle_F = _oracle_from_dict(data["oracle_F"], k, "/oracle_F")

    caps_raw = data.get("capabilities", ["lower_only"])
    if not isinstance(caps_raw, (list, tuple)) or not all(
        isinstance(c, str) for c in caps_raw
    ):
        raise _fail("must be a list of strings", "/capabilities")
    unknown = sorted(set(caps_raw) - KNOWN_CAPABILITIES)
    if unknown:
        raise _fail(
            f"unknown capabilities {unknown}; known: "
            f"{sorted(KNOWN_CAPABILITIES)}",
            "/capabilities",
        )
    capabilities = frozenset(caps_raw) or frozenset({"lower_only"})

    try:
        bundle = BundleData(
            fiber_split=fsplit,
            P=P_chart,
            P_F=P_F_chart,
            oracle_P=oracle_P,
            oracle_F=oracle_F,
        )
    except MalformedInputError as exc:
        raise ScenarioValidationError(str(exc), paths=("/P", "/P_F")) from None

    if "exact_kappa" in capabilities:
        _check_exact_honesty(bundle, space, P_chart)

    return Scenario(
        name=scenario_name,
        description=str(data.get("description", "user-supplied scenario")),
        bundle=bundle,
        capabilities=capabilities,
        provenance=provenance,
    )


def _check_exact_honesty(
    bundle: BundleData, space: IsotropyDecomposition, P_chart: np.ndarray
) -> None:
    """Exact-mode declarations must be backed by the data: the oracle's
    horizontal components have to vanish (flat extra factor) and its
    vertical block has to match the independently regenerated left-invariant
    curvature of (algebra, P)."""
    oracle = bundle.oracle_P
    scale = max(1.0, float(np.max(np.abs(oracle.R), initial=0.0)))
    hor = list(oracle.horizontal)
    if hor:
        mask = np.zeros(oracle.dim, dtype=bool)
        mask[hor] = True
        touched = max(
            float(np.max(np.abs(oracle.R[mask, :, :, :]), initial=0.0)),
            float(np.max(np.abs(oracle.R[:, mask, :, :]), initial=0.0)),
            float(np.max(np.abs(oracle.R[:, :, mask, :]), initial=0.0)),
            float(np.max(np.abs(oracle.R[:, :, :, mask]), initial=0.0)),
        )
        if touched > 1e-8 * scale:
            raise _fail(
                "exact_kappa declared, but oracle_P has nonzero curvature "
                "components touching horizontal directions "
                f"(max {touched:.3e}); exact mode needs a flat extra factor",
                "/capabilities",
            )
    regen = _koszul_oracle(space, P_chart)
    vert = list(oracle.vertical_indices)
    sub = oracle.R[np.ix_(vert, vert, vert, vert)]
    diff = float(np.max(np.abs(sub - regen.R), initial=0.0))
    if diff > 1e-8 * scale:
        raise _fail(
            "exact_kappa declared, but oracle_P's vertical block differs "
            f"from the left-invariant curvature of (algebra, P) by {diff:.3e}",
            "/capabilities",
        )


def load_scenario(ref: str) -> Scenario:
    """Look up a catalog scenario by name, or load a scenario JSON file.

    Raises :class:`UnknownScenarioError` when ``ref`` is neither; JSON parse
    errors propagate (:class:`json.JSONDecodeError` / :class:`OSError`), and
    schema problems raise :class:`ScenarioValidationError`.
    """
    if ref in CATALOG:
        return CATALOG[ref].build()
    path = os.fspath(ref)
    if not os.path.exists(path):
        raise UnknownScenarioError(
            f"unknown scenario {ref!r}: not a catalog name "
            f"({', '.join(catalog_names())}) and no such file"
        )
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    stem = re.sub(r"[^A-Za-z0-9_.-]+", "-", os.path.splitext(os.path.basename(path))[0])
    return scenario_from_dict(data, name=stem)
