from fractions import Fraction

import pytest

from negdep.core.distribution import uniform_on, make_multinomial, make_orbit_uniform
from negdep.core.numeric import NumberMode

R = NumberMode.RATIONAL
F = Fraction


@pytest.fixture
def antithetic():
    """Равномерное распределение на {(0,1), (1,0)}"""
    return uniform_on([(0, 1), (1, 0)], mode=R)


@pytest.fixture
def comonotone():
    """Равномерное распределение на {(0,0), (1,1)}"""
    return uniform_on([(0, 0), (1, 1)], mode=R)


@pytest.fixture
def binary_multinomial():
    return make_multinomial(1, [F(1, 2), F(1, 2)], mode=R)


@pytest.fixture
def orbit012():
    return make_orbit_uniform((0, 1, 2), mode=R)
