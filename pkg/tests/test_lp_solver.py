from fractions import Fraction as F

import pytest

from negdep.config import Caps
from negdep.core.lp_solver import LpProblem, LpBuilder, LpStatus, Relation, Sense, solve
from negdep.core.numeric import NumberMode
from negdep.exceptions import DimMismatch, LpInfeasible, SizeCap

R = NumberMode.RATIONAL


def two_by_two():
    """max x + y при x + 2y <= 4, 3x + y <= 6"""
    return LpProblem(
        objective=[1, 1],
        matrix=[[1, 2], [3, 1]],
        relations=["<=", "<="],
        rhs=[4, 6],
        sense=Sense.MAX,
    )


def test_rational_optimum_is_exact():
    solution = solve(two_by_two(), mode=R)
    assert solution.status is LpStatus.OPTIMAL
    assert solution.value == F(14, 5)
    assert list(solution.x) == [F(8, 5), F(6, 5)]
    assert solution.residual == 0
    assert solution.gap == 0


def test_strong_duality():
    problem = two_by_two()
    solution = solve(problem, mode=R)
    assert sum(b * y for b, y in zip(problem.rhs, solution.dual)) == solution.value


def test_float_optimum():
    solution = solve(two_by_two())
    assert solution.optimal
    assert solution.value == pytest.approx(2.8)
    assert solution.x == pytest.approx([1.6, 1.2])


def test_infeasible():
    problem = LpProblem(objective=[1], matrix=[[1], [1]], relations=["<=", ">="], rhs=[1, 2])
    solution = solve(problem, mode=R)
    assert solution.status is LpStatus.INFEASIBLE
    with pytest.raises(LpInfeasible):
        solution.raise_for_status()


def test_unbounded():
    problem = LpProblem(objective=[1, 0], matrix=[[1, -1]], relations=["<="], rhs=[1], sense="max")
    assert solve(problem, mode=R).status is LpStatus.UNBOUNDED


def test_free_variable():
    problem = LpProblem(
        objective=[1], matrix=[[1]], relations=[">="], rhs=[-3], bounds=[(None, None)],
    )
    solution = solve(problem, mode=R)
    assert solution.value == -3


def test_upper_bound():
    problem = LpProblem(objective=[1], bounds=[(0, 2)], sense=Sense.MAX)
    assert solve(problem, mode=R).value == 2


def test_redundant_equalities():
    problem = LpProblem(
        objective=[1, 0],
        matrix=[[1, 1], [2, 2]],
        relations=[Relation.EQ, Relation.EQ],
        rhs=[1, 2],
    )
    solution = solve(problem, mode=R)
    assert solution.value == 0
    assert list(solution.x) == [0, 1]


def test_transport_builder():
    # Перевозка масс (1/2, 1/2) в (1/2, 1/2) со стоимостями [[1, 2], [3, 1]]
    builder = LpBuilder()
    costs = [[1, 2], [3, 1]]
    cells = [[builder.add_variable(cost=costs[i][j]) for j in range(2)] for i in range(2)]
    for i in range(2):
        builder.add_constraint({cells[i][j]: 1 for j in range(2)}, Relation.EQ, F(1, 2))
    for j in range(2):
        builder.add_constraint({cells[i][j]: 1 for i in range(2)}, Relation.EQ, F(1, 2))
    solution = solve(builder.build(), mode=R)
    assert solution.value == 1
    assert solution.x[cells[0][1]] == 0
    assert solution.x[cells[1][0]] == 0


def test_size_cap():
    with pytest.raises(SizeCap):
        solve(two_by_two(), caps=Caps(lp_variables=1))


def test_row_length_mismatch():
    with pytest.raises(DimMismatch):
        LpProblem(objective=[1, 1], matrix=[[1]], relations=["<="], rhs=[1])


def test_to_dict():
    data = solve(two_by_two(), mode=R).to_dict()
    assert data["status"] == "optimal"
    assert data["value"] == "14/5"
    assert data["mode"] == "rational"
