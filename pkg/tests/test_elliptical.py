import math

import numpy as np
import pytest

from negdep.core.numeric import to_float_array
from negdep.exceptions import DimMismatch, WrongFamily, NotPsd
from negdep.models.elliptical import (
    EllipticalSpec, psd_factor, sample, demo_bivariate_zero_corr_not_nod,
    sample_simplex_uniform, elliptical_is_joint_mix, construct_ncd_elliptical,
    entropy_experiment, student_t_spec, equicorrelated_t_spec,
)
from negdep.models.families import Generator, CovModel, STUDENT_T, SCALE_MIXTURE
from negdep.models.gaussian import equicorrelation


class TestGenerator:
    def test_unknown_family(self):
        with pytest.raises(WrongFamily):
            Generator(tag="cauchy")

    def test_bad_degrees_of_freedom(self):
        with pytest.raises(ValueError):
            Generator(tag=STUDENT_T, nu=0.0)

    def test_quadrature_weights(self):
        scales, weights = Generator(tag=STUDENT_T, nu=3.0).quadrature(nodes=100)
        assert len(scales) == 100
        assert weights.sum() == pytest.approx(1.0)
        assert (scales > 0).all()

    def test_scale_mixture(self):
        generator = Generator(tag=SCALE_MIXTURE, scales=(0.5, 2.0), weights=(0.5, 0.5))
        draws = generator.sample_scales(100, np.random.default_rng(0))
        assert set(np.unique(draws)) <= {0.5, 2.0}


class TestSampling:
    def test_factor_of_singular_matrix(self):
        matrix = to_float_array(equicorrelation(3))
        factor = psd_factor(matrix)
        np.testing.assert_allclose(factor @ factor.T, matrix, atol=1e-9)

    def test_factor_rejects_indefinite(self):
        with pytest.raises(NotPsd):
            psd_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_seed_is_reproducible(self):
        spec = student_t_spec(4.0, np.eye(2))
        first = sample(spec, 50, seed=7)
        second = sample(spec, 50, seed=7)
        assert first.shape == (50, 2)
        np.testing.assert_array_equal(first, second)

    def test_joint_mix_sample_has_constant_sum(self):
        draws = sample(equicorrelated_t_spec(3, 4.0), 1000, seed=1)
        np.testing.assert_allclose(draws.sum(axis=1), 0.0, atol=1e-5)

    def test_cov_model_input(self):
        model = CovModel(mean=np.array([1.0, -1.0]), cov=np.array([[1.0, -1.0], [-1.0, 1.0]]))
        draws = sample(model, 200, seed=3)
        np.testing.assert_allclose(draws.sum(axis=1), 0.0, atol=1e-9)

    def test_simplex_uniform(self):
        draws = sample_simplex_uniform(3, 20000, seed=0)
        np.testing.assert_allclose(draws.sum(axis=1), 1.0)
        corr = np.corrcoef(draws.T)
        assert corr[0, 1] == pytest.approx(-0.5, abs=0.03)

    def test_dimension_mismatch(self):
        with pytest.raises(DimMismatch):
            EllipticalSpec(generator=Generator(), location=np.zeros(3), dispersion=np.eye(2))


class TestZeroCorrelationDemo:
    def test_gaussian_control(self):
        spec = EllipticalSpec(generator=Generator(), location=np.zeros(2), dispersion=np.eye(2))
        result = demo_bivariate_zero_corr_not_nod(spec)
        assert abs(result.max_violation) <= 1e-12

    def test_student_t_is_not_nlod(self):
        result = demo_bivariate_zero_corr_not_nod(student_t_spec(3.0, np.eye(2)))
        assert result.max_violation > 1e-3
        assert result.family == STUDENT_T

    def test_requires_diagonal(self):
        spec = student_t_spec(3.0, np.array([[1.0, -0.5], [-0.5, 1.0]]))
        with pytest.raises(WrongFamily):
            demo_bivariate_zero_corr_not_nod(spec)

    def test_requires_two_dimensions(self):
        with pytest.raises(DimMismatch):
            demo_bivariate_zero_corr_not_nod(student_t_spec(3.0, np.eye(3)))


class TestEllipticalJointMix:
    def test_equicorrelated(self):
        assert elliptical_is_joint_mix(equicorrelated_t_spec(4, 3.0))
        assert not elliptical_is_joint_mix(student_t_spec(3.0, np.eye(2)))

    def test_zero_scale(self):
        generator = Generator(tag=SCALE_MIXTURE, scales=(0.0,), weights=(1.0,))
        spec = EllipticalSpec(generator=generator, location=np.zeros(2), dispersion=np.eye(2))
        assert elliptical_is_joint_mix(spec)

    def test_construction(self):
        trace, spec = construct_ncd_elliptical([2, 1, 1], Generator(tag=STUDENT_T, nu=5.0))
        np.testing.assert_allclose(spec.dispersion, [[2, -1, -1], [-1, 1, 0], [-1, 0, 1]])
        assert elliptical_is_joint_mix(spec)
        assert trace.lam == pytest.approx(1.0)


@pytest.mark.slow
def test_entropy_experiment():
    result = entropy_experiment(nu=3.0, m=10, count=4000, seed=0)
    values = (result.exchangeable_t, result.block_t, result.permuted_block_t)
    assert all(math.isfinite(v) for v in values)
    assert all(se > 0 for se in result.standard_errors)
    slack = 5 * (result.standard_errors[1] + result.standard_errors[2])
    assert result.permuted_block_t >= result.block_t - slack


def test_entropy_rejects_small_m():
    with pytest.raises(ValueError):
        entropy_experiment(m=1)
