"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

import curvforge as cf

# Standard deformation-time grid used across the suite.
T_GRID = (0.0, 0.1, 1.0, 10.0, 100.0, 1.0e4)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260822)


def make_spd(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """Random SPD matrix with moderate condition number (eigenvalues roughly
    within [0.3, 2.5] before scaling), so double inversions stay far below
    the tolerances under test."""
    a = rng.normal(size=(n, n))
    return scale * (a @ a.T / n + 0.3 * np.eye(n))


@pytest.fixture
def spd_factory():
    return make_spd


def u_vector(*coords: float) -> cf.BundleVector:
    """Bundle vector with only fiber-vertical coordinates."""
    return cf.BundleVector(
        X=np.zeros(0), X_F=np.zeros(0), U=np.asarray(coords, dtype=float)
    )


def random_bundle_vector(
    B: cf.BundleData, rng: np.random.Generator
) -> cf.BundleVector:
    return cf.BundleVector(
        X=rng.normal(size=B.p_horizontal_dim),
        X_F=rng.normal(size=B.f_horizontal_dim),
        U=rng.normal(size=B.fiber_vertical_dim),
    )


def scenario_payload(name: str = "user-su2") -> dict:
    """Scenario document (JSON schema) equivalent to the 'su2-full' catalog
    entry: full group orbit, identity tensors, exact-mode oracle."""
    b = cf.load_scenario("su2-full").bundle
    return {
        "name": name,
        "description": "user-supplied copy of the full su(2) configuration",
        "algebra": {
            "dim": 3,
            "c": b.algebra.structure_constants.tolist(),
            "Q": b.algebra.Q.tolist(),
        },
        "isotropy": [],
        "P": b.P.tolist(),
        "P_F": b.P_F.tolist(),
        "oracle_P": {
            "horizontal": list(b.oracle_P.horizontal),
            "R": b.oracle_P.R.tolist(),
        },
        "oracle_F": {
            "horizontal": list(b.oracle_F.horizontal),
            "R": b.oracle_F.R.tolist(),
        },
        "capabilities": ["exact_kappa"],
    }
