from fractions import Fraction as F

import numpy as np
import pytest

from negdep.core.distribution import (
    UnivariateDiscrete, make_joint, uniform_on, point_mass, marginal, marginals,
    product_of, product_independent, project, permute, mixture, symmetrize, moments,
    is_joint_mix, is_exchangeable, make_multinomial, make_orbit_uniform, make_alternating,
    dense_grid,
)
from negdep.core.numeric import NumberMode
from negdep.exceptions import (
    MassNotOne, NegativeProb, DimMismatch, IndexOutOfRange, BadProbabilityVector, GridTooLarge,
)

R = NumberMode.RATIONAL


class TestValidation:
    def test_point_mass(self):
        d = make_joint([((0,), 1.0)])
        assert len(d) == 1
        assert d.dim == 1

    def test_mass_not_one(self):
        with pytest.raises(MassNotOne):
            make_joint([((0, 1), 0.5), ((1, 0), 0.6)])

    def test_duplicates_are_merged(self):
        d = make_joint([((0, 1), 0.5), ((0, 1), 0.5)])
        assert d.points == ((0.0, 1.0),)
        assert d.probs == (1.0,)

    def test_negative_probability(self):
        with pytest.raises(NegativeProb):
            make_joint([((0,), 1.5), ((1,), -0.5)])

    def test_dimension_mismatch(self):
        with pytest.raises(DimMismatch):
            make_joint([((0, 1), 0.5), ((1,), 0.5)])

    def test_zero_mass_atoms_dropped(self):
        d = make_joint([((0,), "1"), ((1,), "0")], mode=R)
        assert d.points == ((F(0),),)

    def test_rational_mass_is_exact(self):
        with pytest.raises(MassNotOne):
            make_joint([((0,), "1/3"), ((1,), "2/3"), ((2,), "1/1000000000")], mode=R)

    def test_atoms_sorted(self):
        d = make_joint([((1, 0), 0.5), ((0, 1), 0.5)])
        assert d.points == ((0.0, 1.0), (1.0, 0.0))


class TestUnivariate:
    def test_moments(self):
        law = UnivariateDiscrete.uniform([-1, 0, 1], R)
        assert law.mean() == 0
        assert law.variance() == F(2, 3)
        assert law.cdf(0) == F(2, 3)

    def test_support_must_increase(self):
        with pytest.raises(BadProbabilityVector):
            UnivariateDiscrete(support=(1.0, 0.0), probs=(0.5, 0.5))

    def test_from_values_merges(self):
        law = UnivariateDiscrete.from_values([1, 0, 1], ["1/4", "1/2", "1/4"], R)
        assert law.support == (0, 1)
        assert law.probs == (F(1, 2), F(1, 2))


class TestMarginals:
    def test_antithetic(self, antithetic):
        for law in marginals(antithetic):
            assert law.support == (0, 1)
            assert law.probs == (F(1, 2), F(1, 2))
        indep = product_independent(antithetic)
        assert len(indep) == 4
        assert set(indep.probs) == {F(1, 4)}

    def test_product_is_idempotent(self, antithetic):
        indep = product_independent(antithetic)
        assert product_independent(indep).equals(indep)

    def test_cyclic_triple(self):
        d = uniform_on([(1, 2, 0), (0, 1, 2), (2, 0, 1)], mode=R)
        for law in marginals(d):
            assert law.support == (0, 1, 2)
            assert law.probs == (F(1, 3),) * 3
        indep = product_independent(d)
        assert len(indep) == 27
        assert set(indep.probs) == {F(1, 27)}

    def test_index_out_of_range(self, antithetic):
        with pytest.raises(IndexOutOfRange):
            marginal(antithetic, 2)

    def test_grid_cap(self, orbit012):
        with pytest.raises(GridTooLarge):
            product_of(marginals(orbit012), cap=10)
        with pytest.raises(GridTooLarge):
            dense_grid(orbit012, cap=10)


class TestTransforms:
    def test_project(self, orbit012):
        pair = project(orbit012, (0, 2))
        assert pair.dim == 2
        assert len(pair) == 6

    def test_permute(self):
        d = point_mass((1, 2, 3), mode=R)
        assert permute(d, (2, 0, 1)).points == ((3, 1, 2),)
        with pytest.raises(DimMismatch):
            permute(d, (0, 0, 1))

    def test_mixture(self):
        d = mixture([make_orbit_uniform((0, 0, 0), R), make_orbit_uniform((-1, 0, 1), R)], ["1/2", "1/2"])
        assert len(d) == 7
        assert d.prob_map()[(0, 0, 0)] == F(1, 2)

    def test_symmetrize_point_mass(self):
        sym = symmetrize(point_mass((1, 2), mode=R))
        assert sym.equals(uniform_on([(1, 2), (2, 1)], mode=R))

    def test_symmetrize_orbit(self):
        sym = symmetrize(point_mass((1, 2, 0), mode=R))
        assert sym.equals(make_orbit_uniform((0, 1, 2), R))
        assert set(sym.probs) == {F(1, 6)}

    def test_symmetrize_fixed_point(self, orbit012):
        assert symmetrize(orbit012).equals(orbit012)


class TestMoments:
    def test_antithetic(self, antithetic):
        summary = moments(antithetic)
        assert summary.cov[0, 0] == F(1, 4)
        assert summary.cov[0, 1] == F(-1, 4)
        assert summary.corr[0, 1] == -1

    def test_point_mass_has_undefined_corr(self):
        summary = moments(point_mass((1, 2), mode=R))
        assert all(v == 0 for v in summary.cov.reshape(-1))
        assert not summary.corr_defined.any()
        assert np.isnan(summary.corr_float()).all()

    def test_exchangeable_joint_mix(self, orbit012):
        corr = moments(orbit012).corr
        assert corr[0, 1] == corr[1, 2] == corr[0, 2] == F(-1, 2)

    def test_float_mode(self):
        d = make_orbit_uniform((0.0, 1.0, 2.0, 3.0))
        corr = moments(d).corr_float()
        np.testing.assert_allclose(corr[0, 1:], -1 / 3)


class TestJointMix:
    def test_antithetic_pair(self):
        result = is_joint_mix(uniform_on([(1, -1), (-1, 1)], mode=R))
        assert result
        assert result.center == 0

    def test_comonotone_pair(self, comonotone):
        result = is_joint_mix(comonotone)
        assert not result
        (_, low), (_, high) = result.witness
        assert (low, high) == (0, 2)

    def test_orbit_center(self, orbit012):
        assert is_joint_mix(orbit012).center == 3

    def test_tolerance_is_absolute(self):
        spread = make_joint([((1e6, 0.0), 0.5), ((0.0, 1e6 + 1e-4), 0.5)])
        assert not is_joint_mix(spread)
        assert is_joint_mix(spread, tol=1e-3)
        close = make_joint([((1.0, 0.0), 0.5), ((0.0, 1.0 + 1e-10), 0.5)])
        assert is_joint_mix(close).center == pytest.approx(1.0)


class TestExchangeable:
    def test_symmetrized(self):
        d = uniform_on([(0, 1, 5), (2, 2, 0)], mode=R)
        assert is_exchangeable(symmetrize(d))

    def test_point_mass(self):
        assert not is_exchangeable(point_mass((1, 2), mode=R))

    def test_binary_multinomial(self, binary_multinomial):
        assert is_exchangeable(binary_multinomial)


class TestGenerators:
    def test_multinomial_one_trial(self, binary_multinomial):
        assert binary_multinomial.points == ((0, 1), (1, 0))
        assert binary_multinomial.probs == (F(1, 2), F(1, 2))

    def test_multinomial_two_trials(self):
        d = make_multinomial(2, ["1/2", "1/2"], mode=R)
        assert d.prob_map() == {(0, 2): F(1, 4), (1, 1): F(1, 2), (2, 0): F(1, 4)}

    def test_multinomial_rejects_bad_vector(self):
        with pytest.raises(BadProbabilityVector):
            make_multinomial(2, ["1/2", "1/3"], mode=R)

    def test_constant_orbit(self):
        d = make_orbit_uniform((1, 1, 1), R)
        assert d.points == ((1, 1, 1),)

    def test_alternating(self):
        d = make_alternating(4, 1, R)
        assert d.points == ((-1, 1, -1, 1), (1, -1, 1, -1))
        assert is_joint_mix(d).center == 0
