import json
import os
from fractions import Fraction as F

import pandas as pd
import pytest

from negdep.checkers.analyzer import DependenceAnalyzer, check_chain
from negdep.checkers.dependence import (
    Status, Verdict, DependenceReport, audit_chain, implication_closure, two_block_partitions,
    is_ncd, is_nlod, is_nuod, is_nod, is_nsd, is_na, is_ct, jm_verdict,
)
from negdep.checkers.lattice import upper_sets, threshold_at
from negdep.config import Caps
from negdep.core.distribution import uniform_on, make_joint
from negdep.core.numeric import NumberMode
from negdep.exceptions import EnumerationTooLarge

R = NumberMode.RATIONAL


@pytest.fixture
def independent_bits():
    return uniform_on([(0, 0), (0, 1), (1, 0), (1, 1)], mode=R)


class TestLattice:
    def test_chain(self):
        points = [(0,), (1,), (2,)]
        assert upper_sets(points) == [(2,), (1, 2)]
        assert upper_sets(points, include_trivial=True) == [(), (2,), (1, 2), (0, 1, 2)]

    def test_antichain(self):
        assert upper_sets([(0, 1), (1, 0)]) == [(0,), (1,)]

    def test_cap(self):
        with pytest.raises(EnumerationTooLarge):
            upper_sets([(0,), (1,), (2,)], cap=1)

    def test_threshold_below_support(self):
        assert threshold_at([(0, 1), (5, 7)], (0, 2)) == (-1, 7)

    def test_partitions(self):
        assert two_block_partitions(3) == [((0,), (1, 2)), ((0, 1), (2,)), ((0, 2), (1,))]
        assert len(two_block_partitions(5)) == 15


class TestAntithetic:
    def test_all_negative_notions_hold(self, antithetic):
        for check in (is_ncd, is_nlod, is_nuod, is_nod, is_nsd, is_na, is_ct):
            verdict = check(antithetic)
            assert verdict.holds, verdict.notion
            assert verdict.backend == "exact"

    def test_joint_mix_center(self, antithetic):
        verdict = jm_verdict(antithetic)
        assert verdict.holds
        assert verdict.value == 1

    def test_covariance_value(self, antithetic):
        assert is_ncd(antithetic).value == F(-1, 4)


class TestComonotone:
    def test_ncd_witness(self, comonotone):
        verdict = is_ncd(comonotone)
        assert verdict.fails
        assert verdict.witness == {"pair": [0, 1], "cov": "1/4"}

    def test_nlod_witness(self, comonotone):
        verdict = is_nlod(comonotone)
        assert verdict.fails
        assert verdict.witness["t"] == ["0", "0"]
        assert verdict.witness["joint"] == "1/2"
        assert verdict.witness["independent"] == "1/4"

    def test_nuod_fails(self, comonotone):
        verdict = is_nuod(comonotone)
        assert verdict.fails
        assert verdict.witness["event"] == "X > t"

    def test_nod_carries_part(self, comonotone):
        verdict = is_nod(comonotone)
        assert verdict.fails
        assert verdict.witness["notion"] == "NLOD"

    def test_nsd_gap(self, comonotone):
        verdict = is_nsd(comonotone)
        assert verdict.fails
        assert verdict.value == 1
        assert verdict.witness["gap"] == "1"

    def test_na_and_ct_fail(self, comonotone):
        assert is_na(comonotone).fails
        assert is_ct(comonotone).fails
        assert jm_verdict(comonotone).fails


class TestIndependent:
    def test_boundary_case_holds(self, independent_bits):
        assert is_ncd(independent_bits).holds
        assert is_nod(independent_bits).holds
        assert is_nsd(independent_bits).value == 0
        assert is_na(independent_bits).holds

    def test_not_counter_monotonic(self, independent_bits):
        assert is_ct(independent_bits).fails


class TestPermutationMix:
    def test_orbit_is_negatively_associated(self, orbit012):
        assert is_na(orbit012).holds
        assert is_nsd(orbit012).holds
        assert is_nod(orbit012).holds

    def test_orbit_not_counter_monotonic(self, orbit012):
        assert is_ct(orbit012).fails
        assert jm_verdict(orbit012).value == 3


class TestChain:
    def test_closure(self):
        closure = implication_closure(3)
        assert ("CT", "NCD") in closure
        assert ("NA", "NLOD") in closure
        assert ("JM", "CT") not in closure
        assert ("JM", "NCD") in implication_closure(2)

    def test_audit_detects_inconsistency(self):
        report = DependenceReport(dim=3, mode=R, verdicts={
            "NA": Verdict(notion="NA", status=Status.HOLDS),
            "NCD": Verdict(notion="NCD", status=Status.FAILS),
        })
        assert audit_chain(report) == [{"premise": "NA", "conclusion": "NCD"}]

    def test_antithetic_chain(self, antithetic):
        chain = check_chain(antithetic)
        assert chain.consistent
        assert not chain.negative
        assert all(v.holds for v in chain.report.verdicts.values())

    def test_comonotone_chain(self, comonotone):
        chain = check_chain(comonotone)
        assert chain.consistent
        assert chain.negative

    def test_independent_chain(self, independent_bits):
        chain = check_chain(independent_bits)
        assert chain.consistent
        assert not chain.negative
        assert chain.report["CT"].fails

    def test_grid_cap_skips(self, orbit012):
        chain = check_chain(orbit012, caps=Caps(grid=10))
        assert chain.report["NLOD"].skipped
        assert chain.report["NOD"].skipped
        assert chain.report["NSD"].skipped
        assert "GridTooLarge" in chain.report["NSD"].reason
        assert chain.report["NA"].holds
        assert not chain.negative

    def test_float_mode(self):
        d = make_joint([((0.0, 1.0), 0.5), ((1.0, 0.0), 0.5)])
        chain = check_chain(d)
        assert chain.report["NCD"].backend == "float"
        assert not chain.negative


class TestAnalyzer:
    def test_save_results(self, comonotone, tmp_path):
        analyzer = DependenceAnalyzer(comonotone)
        analyzer.analyze_all()
        analyzer.check_structure()
        result_dir = analyzer.save_results(str(tmp_path), name="comonotone")

        assert os.path.exists(os.path.join(result_dir, "report.json"))
        assert os.path.exists(os.path.join(result_dir, "structure.json"))
        frame = pd.read_csv(os.path.join(result_dir, "verdicts.csv"))
        assert len(frame) == 8
        assert set(frame["status"]) == {"fails"}

    def test_report_includes_moments(self, comonotone, tmp_path):
        analyzer = DependenceAnalyzer(comonotone)
        analyzer.analyze_all()
        result_dir = analyzer.save_results(str(tmp_path))
        with open(os.path.join(result_dir, "report.json"), encoding="utf-8") as f:
            report = json.load(f)
        assert report["moments"]["mean"] == ["1/2", "1/2"]
        assert report["moments"]["cov"][0][1] == "1/4"
        assert report["moments"]["corr"][0][1] == "1"
        assert report["verdicts"]["NCD"]["witness"]["cov"] == "1/4"

    def test_moments_are_cached(self, antithetic):
        analyzer = DependenceAnalyzer(antithetic)
        summary = analyzer.moments
        assert summary.cov[0, 1] == F(-1, 4)
        assert analyzer.moments is summary
        analyzer.check_covariance()
        assert analyzer.moments is summary
        assert analyzer.verdicts["NCD"].value == F(-1, 4)

    def test_constant_coordinate_has_undefined_correlation(self):
        d = uniform_on([(0, 5), (1, 5)], mode=R)
        data = DependenceAnalyzer(d).moments.to_dict()
        assert data["corr"][0] == ["1", None]
        assert data["cov"][1][1] == "0"
