"""Small deterministic linear-algebra helpers shared across modules.

Everything here is plain numpy with explicit tolerance arguments and
deterministic tie-breaking, so that repeated runs on identical inputs
produce bit-identical outputs.
"""
from __future__ import annotations

import numpy as np

from .errors import MalformedInputError, NotSPDError

__all__ = [
    "as_matrix",
    "check_symmetric",
    "eigh_sorted",
    "check_spd",
    "spd_sqrt",
    "operator_norm",
    "freeze",
    "q_orthonormalize",
]


def as_matrix(a, name: str, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Coerce ``a`` to a float64 2-d array, optionally checking its shape."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise MalformedInputError(f"{name} must be a 2-d array, got ndim={m.ndim}")
    if shape is not None and m.shape != shape:
        raise MalformedInputError(f"{name} must have shape {shape}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise MalformedInputError(f"{name} contains non-finite entries")
    return m


def check_symmetric(m: np.ndarray, name: str, tol: float = 1e-10) -> np.ndarray:
    """Validate symmetry up to ``tol`` (relative to scale) and symmetrize."""
    if m.shape[0] != m.shape[1]:
        raise MalformedInputError(f"{name} must be square, got {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    if float(np.max(np.abs(m - m.T), initial=0.0)) > tol * scale:
        raise MalformedInputError(f"{name} is not symmetric within tolerance {tol}")
    return 0.5 * (m + m.T)


def eigh_sorted(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric eigendecomposition with a deterministic sign convention.

    Eigenvalues ascend (numpy's ``eigh`` order).  Each eigenvector is flipped,
    if necessary, so that its largest-magnitude coordinate (first such index
    on ties) is positive.  This removes the sign ambiguity that otherwise
    varies across BLAS builds.
    """
    vals, vecs = np.linalg.eigh(m)
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            vecs[:, j] = -col
    return vals, vecs


def check_spd(m: np.ndarray, name: str, tol: float = 1e-10) -> np.ndarray:
    """Validate that ``m`` is symmetric positive definite; return symmetrized copy."""
    sym = check_symmetric(m, name, tol=tol)
    vals = np.linalg.eigvalsh(sym)
    if vals.size and float(vals[0]) <= tol * max(1.0, float(vals[-1])):
        raise NotSPDError(
            f"{name} is not positive definite: smallest eigenvalue {vals[0]:.3e}"
        )
    return sym


def spd_sqrt(m: np.ndarray) -> np.ndarray:
    """Symmetric positive-definite square root via eigendecomposition."""
    vals, vecs = eigh_sorted(m)
    if vals.size and float(vals[0]) < 0:
        raise NotSPDError(f"matrix has negative eigenvalue {vals[0]:.3e}; no SPD root")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def operator_norm(m: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def freeze(a: np.ndarray) -> np.ndarray:
    """Return a contiguous read-only view-copy of ``a``."""
    out = np.ascontiguousarray(a)
    if out is a:
        out = out.copy()
    out.setflags(write=False)
    return out


def q_orthonormalize(rows: np.ndarray, q: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Gram-Schmidt the rows of ``rows`` in the inner product ``q``.

    Uses two projection passes for numerical stability and drops rows whose
    residual Q-norm falls below ``tol`` times the incoming row norm scale.
    """
    out: list[np.ndarray] = []
    scale = max(1.0, float(np.max(np.abs(rows))) if rows.size else 1.0)
    for row in rows:
        v = row.astype(float).copy()
        for _ in range(2):
            for u in out:
                v -= (u @ q @ v) * u
        nrm = float(v @ q @ v)
        if nrm > (tol * scale) ** 2:
            out.append(v / np.sqrt(nrm))
    if not out:
        return np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0))
    return np.array(out)
