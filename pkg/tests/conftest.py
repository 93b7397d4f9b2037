import pytest

from sshat import ModelParams, build_expansion

from _reference import BASE, BASE_L0


@pytest.fixture(scope="session")
def base_params() -> ModelParams:
    return ModelParams(**BASE)


@pytest.fixture(scope="session")
def base_expansion(base_params):
    """Order-3 expansion for the base configuration, shared read-only."""
    return build_expansion(base_params, BASE_L0, 3)


@pytest.fixture(scope="session")
def base_expansion_6(base_params):
    """Order-6 expansion for the deeper identity checks."""
    return build_expansion(base_params, BASE_L0, 6)
