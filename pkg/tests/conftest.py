import numpy as np
import pytest

from multicontest.rules import ContestParams, tie_margin_rule


@pytest.fixture
def rng():
    return np.random.default_rng(20260215)


@pytest.fixture
def wide_margin():
    """n=20, r=0.8, costs (1, 1.5) with the 17-win tie-margin rule."""
    return ContestParams(20, 0.8, 1.0, 1.5), tie_margin_rule(20, 17)
