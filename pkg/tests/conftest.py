import pytest

from limitshape import maxshape, weights


@pytest.fixture(scope="session")
def entropy_weight():
    return weights.entropy()


@pytest.fixture(scope="session")
def entropy_maximizer_4096(entropy_weight):
    """Expensive shared construction: (lambda1, MaxShapeResult) at m = 4096."""
    return maxshape.normalize_lambda_max(entropy_weight, 1.0, 4096)
