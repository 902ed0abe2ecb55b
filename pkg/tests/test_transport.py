import json
from fractions import Fraction as F

import numpy as np
import pytest

from negdep.config import Caps
from negdep.core.distribution import UnivariateDiscrete, uniform_on, make_alternating, is_joint_mix
from negdep.core.numeric import NumberMode
from negdep.exceptions import (
    BadSubset, BadProbabilityVector, UnsupportedCost, DimMismatch, PreconditionFailed,
    NotJointMix, NotSymmetricUncertainty, SizeCap,
)
from negdep.models.families import CovModel
from negdep.models.gaussian import jm_cov_n3
from negdep.transport.coupling_lp import (
    solve_minimax, solve_jm_feasibility, explore_ncd_minimizer, product_grid,
)
from negdep.transport.objective import (
    CostSpec, QUADRATIC, VARIANCE, HARMONIC, CONVEX_TABULATED,
    cost_from_cov, subset_expectation, objective,
)
from negdep.transport.uncertainty import (
    SubsetMeasure, UncertaintySpec, check_subset, parse_uncertainty,
)
from negdep.transport.verification import (
    verify_symmetrization_improvement, verify_exchangeable_optimality, expected_value,
    pair_cost_identity,
)

R = NumberMode.RATIONAL


@pytest.fixture
def three_point():
    return UnivariateDiscrete.uniform([-1, 0, 1], R)


def uniform_law(values):
    return UnivariateDiscrete.uniform(values, R)


class TestUncertainty:
    def test_check_subset(self):
        assert check_subset((2, 0), 3) == (0, 2)
        with pytest.raises(BadSubset):
            check_subset((3,), 3)
        with pytest.raises(BadSubset):
            check_subset((0, 0), 3)

    def test_all_subsets(self):
        unc = parse_uncertainty("all", 3)
        assert len(unc.family()) == 8
        assert len(unc.family(include_empty=False)) == 7
        assert unc.subsets()[0] == (0,)
        assert unc.subsets()[-1] == (0, 1, 2)
        assert unc.label() == "all"

    def test_fixed_cardinality(self):
        unc = parse_uncertainty("card:2", 3)
        assert unc.subsets() == [(0, 1), (0, 2), (1, 2)]
        assert unc.label() == "card:2"
        with pytest.raises(BadSubset):
            UncertaintySpec.fixed_cardinality(3, 0)

    def test_measure_mass(self):
        with pytest.raises(BadProbabilityVector):
            SubsetMeasure.build([((0,), "1/2")], 2, R)

    def test_explicit_from_file(self, tmp_path):
        path = tmp_path / "unc.json"
        path.write_text(json.dumps({"measures": [
            {"weights": [{"K": [0], "w": "1/2"}, {"K": [1], "w": "1/2"}]},
        ]}), encoding="utf-8")
        unc = parse_uncertainty(str(path), 2, R)
        assert unc.label() == "explicit"
        assert unc.is_symmetric()
        assert unc.subsets() == [(0,), (1,)]

    def test_not_symmetric(self):
        unc = UncertaintySpec.explicit(2, [SubsetMeasure.point((0,))])
        assert not unc.is_symmetric()


class TestObjective:
    def test_cost_parsing(self):
        assert CostSpec.parse("quad").kind == QUADRATIC
        assert CostSpec.parse("var").kind == VARIANCE
        with pytest.raises(UnsupportedCost):
            CostSpec.parse("convex")
        with pytest.raises(UnsupportedCost):
            CostSpec.parse("cubic")

    def test_convex_table(self, antithetic):
        cost = CostSpec(kind=CONVEX_TABULATED, table=((0, 0), (1, -1), (2, 0)))
        assert not cost.linear_in_coupling
        assert subset_expectation(antithetic, (0, 1), cost) == -1
        with pytest.raises(UnsupportedCost):
            CostSpec(kind=CONVEX_TABULATED, table=((0, 0), (1, 1), (2, 0)))

    def test_exact_table_has_no_convexity_slack(self):
        with pytest.raises(UnsupportedCost):
            CostSpec(kind=CONVEX_TABULATED, table=((0, 0), (1, 1), (2, 2 - F(1, 10**14))))
        with pytest.raises(UnsupportedCost):
            CostSpec(kind=CONVEX_TABULATED, table=((0, 0), (1, 3), (2, 5)))
        assert CostSpec(kind=CONVEX_TABULATED, table=((0, 0), (1, 1), (2, 2))).table

    def test_float_table_tolerates_rounding(self):
        cost = CostSpec(kind=CONVEX_TABULATED, table=((0.0, 0.0), (1.0, 1.0), (2.0, 2.0 - 1e-14)))
        assert not cost.linear_in_coupling

    def test_harmonic(self):
        d = uniform_on([(0, 0), (0, 1), (1, 0), (1, 1)], mode=R)
        cost = CostSpec(kind=HARMONIC)
        assert subset_expectation(d, (0, 1), cost) == -1
        result = objective(d, cost, UncertaintySpec.fixed_cardinality(2, 2))
        assert result.value == -1
        assert result.argmax == (0, 1)

    def test_variance(self, antithetic):
        result = objective(antithetic, CostSpec(kind=VARIANCE), UncertaintySpec.all_subsets(2))
        assert result.value == F(1, 4)
        assert result.argmax == (0,)

    def test_explicit_argmax_is_index(self, antithetic):
        unc = UncertaintySpec.explicit(2, [SubsetMeasure.point((0,)), SubsetMeasure.point((0, 1))])
        result = objective(antithetic, CostSpec(), unc)
        assert result.argmax == 1
        assert result.value == 1
        assert result.per_measure == (F(1, 2), 1)

    def test_cov_model(self):
        model = CovModel(mean=np.zeros(3), cov=jm_cov_n3([4, 1, 1], mode=R).cov)
        assert cost_from_cov(model, (1, 2)) == 4
        assert cost_from_cov(model, (0, 1, 2)) == 0
        assert cost_from_cov(model, ()) == 0
        result = objective(model, CostSpec(), UncertaintySpec.fixed_cardinality(3, 2))
        assert result.value == 4
        assert result.argmax == (1, 2)

    def test_cov_model_other_matrix(self):
        cov = np.array([[4.0, -1.0, -1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
        result = objective(CovModel(mean=np.zeros(3), cov=cov), CostSpec(), UncertaintySpec.fixed_cardinality(3, 2))
        assert result.value == pytest.approx(3.0)
        assert result.argmax == (0, 1)

    def test_dimension_mismatch(self, antithetic):
        with pytest.raises(BadProbabilityVector):
            objective(antithetic, CostSpec(), UncertaintySpec.all_subsets(3))


class TestMinimax:
    def test_three_point_all_subsets(self, three_point):
        solution = solve_minimax([three_point] * 3, UncertaintySpec.all_subsets(3))
        assert solution.value == F(2, 3)
        assert is_joint_mix(solution.coupling)
        np.testing.assert_allclose(solution.corr[0, 1:], -0.5, atol=1e-9)
        assert max(solution.per_subset_costs.values()) == F(2, 3)

    def test_dominant_variance(self):
        marginals = [uniform_law([-2, 2]), uniform_law([-1, 1]), uniform_law([-1, 1])]
        solution = solve_minimax(marginals, UncertaintySpec.all_subsets(3))
        assert solution.value == 4

    def test_to_dict(self, three_point):
        data = solve_minimax([three_point] * 3, UncertaintySpec.fixed_cardinality(3, 3)).to_dict()
        assert data["value"] == "0"
        assert data["lp"]["mode"] == "rational"
        assert data["uncertainty"] == {"variant": "card", "n": 3, "k": 3}

    def test_rejects_tabulated_cost(self, three_point):
        cost = CostSpec(kind=CONVEX_TABULATED, table=((0, 0), (1, 1), (2, 4)))
        with pytest.raises(UnsupportedCost):
            solve_minimax([three_point] * 2, UncertaintySpec.all_subsets(2), cost=cost)

    def test_dimension_mismatch(self, three_point):
        with pytest.raises(DimMismatch):
            solve_minimax([three_point] * 3, UncertaintySpec.all_subsets(2))

    def test_grid_cap(self, three_point):
        with pytest.raises(SizeCap):
            product_grid([three_point] * 3, cap=10)
        with pytest.raises(SizeCap):
            solve_minimax([three_point] * 3, UncertaintySpec.all_subsets(3), caps=Caps(lp_variables=10))


class TestJointMixability:
    def test_feasible(self):
        result = solve_jm_feasibility([uniform_law([0, 1])] * 2)
        assert result
        assert result.center == 1
        assert result.coupling.equals(uniform_on([(0, 1), (1, 0)], mode=R))

    def test_no_candidates(self):
        result = solve_jm_feasibility([uniform_law([0, 1]), uniform_law([0, 3])])
        assert not result
        assert result.candidates == 0

    def test_infeasible_lp(self):
        result = solve_jm_feasibility([uniform_law([0, 2]), uniform_law([0, 1, 2])])
        assert not result
        assert result.candidates == 2
        assert "reason" in result.to_dict()


class TestNcdExploration:
    def test_identical_marginals(self, three_point):
        result = explore_ncd_minimizer([three_point] * 3)
        assert result.value == F(2, 3)
        assert result.value_ncd == F(2, 3)
        assert result.ncd_attains
        assert result.minimizer_is_ncd

    def test_variance_cost_is_used(self, three_point):
        result = explore_ncd_minimizer([three_point] * 3, cost=CostSpec(kind=VARIANCE))
        assert result.solution.cost.kind == VARIANCE
        assert result.to_dict()["minimizer"]["cost"] == {"kind": "variance"}
        assert result.value == F(2, 3)
        assert result.ncd_attains

    def test_harmonic_cost_changes_value(self, three_point):
        quad = explore_ncd_minimizer([three_point] * 2)
        harmonic = explore_ncd_minimizer([three_point] * 2, cost=CostSpec(kind=HARMONIC))
        assert harmonic.solution.cost.kind == HARMONIC
        assert harmonic.value != quad.value


class TestSymmetrization:
    def test_alternating(self):
        check = verify_symmetrization_improvement(make_alternating(4, 1, R), UncertaintySpec.all_subsets(4))
        assert check.lhs == 4
        assert check.rhs == F(4, 3)
        assert check.improved

    def test_requires_symmetric_set(self, antithetic):
        unc = UncertaintySpec.explicit(2, [SubsetMeasure.point((0,))])
        with pytest.raises(NotSymmetricUncertainty):
            verify_symmetrization_improvement(antithetic, unc)

    def test_requires_joint_mix(self, comonotone):
        with pytest.raises(NotJointMix):
            verify_symmetrization_improvement(comonotone, UncertaintySpec.all_subsets(2))

    def test_requires_identical_marginals(self):
        d = uniform_on([(2, -1, -1), (-2, 1, 1)], mode=R)
        with pytest.raises(PreconditionFailed):
            verify_symmetrization_improvement(d, UncertaintySpec.all_subsets(3))


class TestExchangeableOptimality:
    def test_expected_value(self):
        assert expected_value(4, 2, F(2, 3)) == F(8, 9)
        assert expected_value(3, 1, 1.0) == pytest.approx(1.0)

    def test_three_dimensions(self, three_point):
        report = verify_exchangeable_optimality(three_point, 3, k_values=(1,))
        assert report.holds
        first, second = report.checks
        assert first.value == F(2, 3)
        assert first.corr_ok
        assert second.label == "card:1"
        assert second.corr_ok is None
        assert not second.unique

    @pytest.mark.slow
    def test_four_dimensions(self, three_point):
        report = verify_exchangeable_optimality(three_point, 4, k_values=(2,))
        assert report.holds
        assert all(check.value == F(8, 9) for check in report.checks)

    def test_preconditions(self, three_point):
        with pytest.raises(PreconditionFailed):
            verify_exchangeable_optimality(three_point, 2)
        with pytest.raises(PreconditionFailed):
            verify_exchangeable_optimality(uniform_law([0, 1]), 3)
        with pytest.raises(PreconditionFailed):
            verify_exchangeable_optimality(uniform_law([-1, 1]), 3)

    def test_bad_cardinality(self, three_point):
        with pytest.raises(BadSubset):
            verify_exchangeable_optimality(three_point, 3, k_values=(4,))


class TestPairCostIdentity:
    def test_independent(self):
        result = pair_cost_identity((16.0, 1.0, 1.0), np.eye(3))
        assert result.holds
        assert result.lhs == pytest.approx(17.0)

    def test_negative_correlations(self):
        corr = np.array([[1.0, -0.2, -0.1], [-0.2, 1.0, 0.0], [-0.1, 0.0, 1.0]])
        result = pair_cost_identity((16.0, 1.0, 1.0), corr)
        assert result.holds
        assert result.rhs == pytest.approx(16.2)

    def test_small_sigma(self):
        with pytest.raises(PreconditionFailed):
            pair_cost_identity((4.0, 1.0, 1.0), np.eye(3))

    def test_shapes(self):
        with pytest.raises(DimMismatch):
            pair_cost_identity((16.0, 1.0), np.eye(3))
