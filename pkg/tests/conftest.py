import random
from fractions import Fraction

import pytest

from nearheight import ProblemInstance


@pytest.fixture
def golden_instance():
    """Four keys with weights 3/16, 1/16, 1/2, 1/4 and zero gap weights;
    optimum 25/16 at height 3 with key levels (1, 2, 0, 1)."""
    return ProblemInstance(
        beta=(Fraction(3, 16), Fraction(1, 16), Fraction(1, 2), Fraction(1, 4)),
        alpha=(0, 0, 0, 0, 0),
    )


def random_bounded_shape(rng: random.Random, lo: int, hi: int, height: int):
    """Random tree shape over keys lo..hi with every external within
    `height` levels; requires hi - lo + 1 <= 2^height - 1."""
    size = hi - lo + 1
    if size == 0:
        return None
    assert size <= (1 << height) - 1
    cap = (1 << (height - 1)) - 1
    r = rng.randint(max(lo, hi - cap), min(hi, lo + cap))
    return (
        r,
        random_bounded_shape(rng, lo, r - 1, height - 1),
        random_bounded_shape(rng, r + 1, hi, height - 1),
    )


@pytest.fixture
def bounded_shape_factory():
    return random_bounded_shape
