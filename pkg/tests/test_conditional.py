from negdep.checkers.conditional import (
    ConditionalStatus, check_conditional_structure, proper_subsets,
)
from negdep.core.distribution import uniform_on, mixture, make_orbit_uniform
from negdep.core.numeric import NumberMode

R = NumberMode.RATIONAL


def test_proper_subsets_order():
    assert list(proper_subsets(3)) == [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]


def test_not_joint_mix(comonotone):
    report = check_conditional_structure(comonotone)
    assert report.status is ConditionalStatus.NOT_JM
    assert not report.applies


def test_bivariate_joint_mix_applies(antithetic):
    report = check_conditional_structure(antithetic)
    assert report.applies
    assert report.na_verdict.holds
    assert report.consistent


def test_permutation_orbit_applies(orbit012):
    report = check_conditional_structure(orbit012)
    assert report.applies
    assert report.consistent


def test_cross_check_disabled(orbit012):
    report = check_conditional_structure(orbit012, cross_check=False)
    assert report.applies
    assert report.na_verdict is None
    assert "na" not in report.to_dict()


def test_condition_a_fails():
    d = mixture(
        [make_orbit_uniform((0, 0, 1, 1), R), make_orbit_uniform((-1, -1, 2, 2), R)],
        ["1/2", "1/2"],
    )
    report = check_conditional_structure(d)
    assert report.status is ConditionalStatus.CONDITION_A_FAILS
    assert report.witness["A"] == [0, 1]
    assert report.witness["s"] == "1"


def test_condition_b_fails():
    d = uniform_on([(0, 0, 0), (2, -1, -1)], mode=R)
    report = check_conditional_structure(d)
    assert report.status is ConditionalStatus.CONDITION_B_FAILS
    assert report.witness["A"] == [0, 1]
    assert report.witness["s"] == ["0", "1"]
    assert report.witness["probs"] == ["1", "0"]
    assert report.witness["U"] == [["0", "0"]]
