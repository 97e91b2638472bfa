"""Koszul-formula core for left-invariant metrics, as pure array functions.

Conventions, fixed once for the whole package:

* ``c`` is the structure tensor in a chosen basis, ``[x_i, x_j] = c[i,j,k] x_k``.
* ``G`` is the metric Gram matrix in the same basis, ``G[i,j] = <x_i, x_j>``.
* ``connection`` returns Christoffel-like coefficients ``Gamma[i,j,k]`` with
  ``nabla_{x_i} x_j = Gamma[i,j,k] x_k``.
* ``curvature`` returns the fully covariant tensor
  ``R4[i,j,k,l] = <R(x_i, x_j) x_k, x_l>`` with the sign convention
  ``R(x,y)z = nabla_x nabla_y z - nabla_y nabla_x z - nabla_{[x,y]} z``,
  under which ``R4[i,j,j,i]`` is the (unnormalized) sectional numerator:
  positive for a round sphere.

For a bi-invariant metric this machinery reproduces the closed form
``R4[i,j,j,i] = |[x_i, x_j]|^2 / 4``.
"""
from __future__ import annotations

import numpy as np

__all__ = ["lowered_bracket", "connection", "curvature", "ricci_form"]


def lowered_bracket(c: np.ndarray, G: np.ndarray) -> np.ndarray:
    """B[i,j,l] = <[x_i, x_j], x_l>."""
    return np.einsum("ijm,ml->ijl", c, G)


def connection(c: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Levi-Civita coefficients of the left-invariant metric ``G``.

    Koszul's formula for left-invariant fields has only the bracket terms:
    ``2 <nabla_x y, z> = <[x,y],z> - <[y,z],x> + <[z,x],y>``.
    """
    B = lowered_bracket(c, G)
    # K[i,j,l] = <nabla_{x_i} x_j, x_l>
    #          = (B[i,j,l] - B[j,l,i] + B[l,i,j]) / 2
    K = 0.5 * (B - np.einsum("jli->ijl", B) + np.einsum("lij->ijl", B))
    return np.einsum("ijl,lk->ijk", K, np.linalg.inv(G))


def curvature(c: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Fully covariant curvature tensor R4[i,j,k,l] = <R(x_i,x_j)x_k, x_l>."""
    Gamma = connection(c, G)
    up = (
        np.einsum("jkp,ipm->ijkm", Gamma, Gamma)
        - np.einsum("ikp,jpm->ijkm", Gamma, Gamma)
        - np.einsum("ijp,pkm->ijkm", c, Gamma)
    )
    return np.einsum("ijkm,ml->ijkl", up, G)


def ricci_form(R4: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Ricci quadratic form Ric[i,l] = sum_a R(x_i, f_a, f_a, x_l) over any
    G-orthonormal frame; computed frame-independently via the completeness
    identity sum_a f_a f_a^T = G^{-1}."""
    return np.einsum("ijkl,jk->il", R4, np.linalg.inv(G))
