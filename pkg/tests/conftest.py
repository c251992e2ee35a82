"""Shared fixtures for the yamabe-nodal test suite."""

import pytest


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep host YAMABE_CRIT_* variables and cached settings out of every test."""
    import os

    from yamabe_nodal.config import reset_settings

    for key in list(os.environ):
        if key.startswith("YAMABE_CRIT_"):
            monkeypatch.delenv(key, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def zonal_rule():
    """Default deterministic 1-D rule."""
    from yamabe_nodal.quadrature import QuadratureRule

    return QuadratureRule()


@pytest.fixture
def grid_rule():
    """Product-grid rule at the resolutions used by the energy tests."""
    from yamabe_nodal.quadrature import QuadratureKind, QuadratureRule

    return QuadratureRule(kind=QuadratureKind.PRODUCT_GRID, resolution=24,
                          angular_resolution=16)


@pytest.fixture
def mc_rule():
    """Seeded Monte Carlo rule."""
    from yamabe_nodal.quadrature import QuadratureKind, QuadratureRule

    return QuadratureRule(kind=QuadratureKind.MONTE_CARLO, resolution=200_000, seed=7)


@pytest.fixture
def run_config():
    """A RunConfig as the CLI would build it."""
    from yamabe_nodal.config import RunConfig

    return RunConfig(command="test", n=[3], m=[9], beta_grid=[1.01])
