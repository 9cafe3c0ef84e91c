import math

import numpy as np
import pytest

from embednorm.embedding_operator import ExponentPair


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def p1():
    return ExponentPair.from_p(1.0)


@pytest.fixture
def p2():
    return ExponentPair.from_p(2.0)


@pytest.fixture
def pinf():
    return ExponentPair.from_p(math.inf)
