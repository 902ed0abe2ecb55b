"""
Задачи ЛП на многомерных сцеплениях: минимакс-транспорт на произведении
носителей маргиналов и проверка совместной смешиваемости
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..config import DEFAULT_CAPS, DEFAULT_TOLERANCES
from ..core.distribution import make_joint, moments
from ..core.lp_solver import LpBuilder, LpStatus, Relation, Sense, SimplexSolver
from ..core.numeric import NumberMode, format_number
from ..exceptions import SizeCap, UnsupportedCost, DimMismatch
from ..utils.logger import get_logger
from .objective import CostSpec, HARMONIC, subset_expectation
from .uncertainty import UncertaintySpec

logger = get_logger(__name__)

QUADRATIC_COST = CostSpec()


def _mode_of(marginals, mode):
    return NumberMode.parse(mode or marginals[0].mode)


def product_grid(marginals, cap=None):
    """
    Произведение носителей маргиналов.

    Args:
        marginals (list): Список UnivariateDiscrete
        cap (int): Предельное число точек (переменных ЛП)

    Returns:
        list: Точки сетки в лексикографическом порядке
    """
    cap = DEFAULT_CAPS.lp_variables if cap is None else cap
    size = math.prod(len(m.support) for m in marginals)
    if size > cap:
        logger.error(f"Сетка сцеплений содержит {size} точек (предел {cap})")
        raise SizeCap(f"Сетка сцеплений содержит {size} точек, предел {cap}")
    return list(itertools.product(*[m.support for m in marginals]))


def _add_marginal_rows(builder, columns, grid, marginals):
    """Ограничения Σ_{x: x_i = v} π(x) = P(X_i = v)"""
    for i, margin in enumerate(marginals):
        rows = {v: {} for v in margin.support}
        for column, point in zip(columns, grid):
            rows[point[i]][column] = 1
        for value, prob in zip(margin.support, margin.probs):
            builder.add_constraint(rows[value], Relation.EQ, prob)


def _coupling_from(solution, columns, grid, dim, mode):
    """Сцепление по решению ЛП (атомы с положительной массой)"""
    tol = 0 if mode is NumberMode.RATIONAL else DEFAULT_TOLERANCES.lp
    atoms = [(point, solution.x[c]) for c, point in zip(columns, grid) if solution.x[c] > tol]
    return make_joint(atoms, dim=dim, mode=mode, tol=DEFAULT_TOLERANCES.lp)


@dataclass
class TransportSolution:
    """
    Решение минимакс-задачи транспорта.

    Attributes:
        coupling (DiscreteJoint): Оптимальное сцепление
        value: Оптимальное значение sup-целевой функции
        per_subset_costs (dict): K -> E[c_K(X)] для подмножеств множества неопределенности
        corr (numpy.ndarray): Корреляционная матрица сцепления
        uncertainty (UncertaintySpec): Множество неопределенности
        cost (CostSpec): Стоимость
        lp (LpSolution): Решение задачи ЛП
    """
    coupling: object
    value: object
    per_subset_costs: Dict[Tuple[int, ...], object]
    corr: np.ndarray
    uncertainty: UncertaintySpec
    cost: CostSpec = QUADRATIC_COST
    lp: Optional[object] = None

    def to_dict(self):
        return {
            "value": format_number(self.value),
            "uncertainty": self.uncertainty.to_dict(),
            "cost": self.cost.to_dict(),
            "coupling": self.coupling.to_dict(),
            "per_subset_costs": [
                {"K": list(k), "cost": format_number(v)} for k, v in self.per_subset_costs.items()
            ],
            "corr": [[None if np.isnan(v) else float(v) for v in row] for row in self.corr],
            "lp": {
                "status": self.lp.status.value,
                "mode": self.lp.mode.value,
                "iterations": self.lp.iterations,
            } if self.lp is not None else None,
        }


def _minimax_builder(marginals, unc, cost, cap):
    """Задача min t при ограничениях на маргиналы и Σ_K μ(K) E[c_K] <= t"""
    grid = product_grid(marginals, cap)
    means = [m.mean() for m in marginals]
    builder = LpBuilder(Sense.MIN)
    columns = builder.add_variables(len(grid))
    t = builder.add_variable(cost=1, lo=None)
    _add_marginal_rows(builder, columns, grid, marginals)

    # Для неотрицательных стоимостей строка пустого множества избыточна
    for measure in unc.family(include_empty=cost.kind == HARMONIC):
        coeffs = {t: -1}
        for column, point in zip(columns, grid):
            total = 0
            for subset, weight in measure.weights:
                if subset:
                    total = total + weight * cost.atom_cost(point, subset, means)
            if total != 0:
                coeffs[column] = total
        builder.add_constraint(coeffs, Relation.LE, 0)
    return builder, columns, grid, t


def solve_minimax(marginals, unc, cost=QUADRATIC_COST, mode=None, caps=DEFAULT_CAPS, solver=None):
    """
    Минимизация sup_{μ in M} Σ_K μ(K) E[c_K(X)] по сцеплениям с заданными маргиналами.

    Args:
        marginals (list): Список UnivariateDiscrete
        unc (UncertaintySpec): Множество неопределенности
        cost (CostSpec): Стоимость, линейная по сцеплению
        mode (NumberMode): Числовой режим (по умолчанию из маргиналов)
        caps (Caps): Пределы размеров
        solver (SimplexSolver): Решатель ЛП

    Returns:
        TransportSolution: Оптимальное сцепление и значение
    """
    if not cost.linear_in_coupling:
        logger.error(f"Стоимость {cost.kind} не поддерживается в задаче ЛП")
        raise UnsupportedCost(f"Задача ЛП поддерживает только quadratic, variance, harmonic, получено {cost.kind}")
    if unc.n != len(marginals):
        raise DimMismatch(f"Размерность множества неопределенности {unc.n} != числу маргиналов {len(marginals)}")
    mode = _mode_of(marginals, mode)
    solver = solver or SimplexSolver(mode=mode, caps=caps)

    builder, columns, grid, t = _minimax_builder(marginals, unc, cost, caps.lp_variables)
    problem = builder.build()
    logger.info(
        f"Минимакс-задача: {len(grid)} точек сетки, {problem.n_rows} ограничений, "
        f"множество {unc.label()}, стоимость {cost.kind}"
    )
    solution = solver.solve(problem).raise_for_status()

    coupling = _coupling_from(solution, columns, grid, len(marginals), solution.mode)
    per_subset = {
        subset: subset_expectation(coupling, subset, cost)
        for subset in unc.subsets()
    }
    logger.info(f"Оптимальное значение {format_number(solution.value)}, {len(coupling)} атомов")
    return TransportSolution(
        coupling=coupling,
        value=solution.value,
        per_subset_costs=per_subset,
        corr=moments(coupling).corr_float(),
        uncertainty=unc,
        cost=cost,
        lp=solution,
    )


@dataclass
class JmFeasibility:
    """
    Результат проверки совместной смешиваемости.

    Attributes:
        jointly_mixable (bool): Существует ли сцепление с постоянной суммой
        center: c = Σ средних
        coupling (DiscreteJoint): Сцепление-свидетель (если существует)
        candidates (int): Число точек сетки с суммой c
        reason (str): Причина отрицательного ответа
    """
    jointly_mixable: bool
    center: object
    coupling: Optional[object] = None
    candidates: int = 0
    reason: Optional[str] = None

    def __bool__(self):
        return self.jointly_mixable

    def to_dict(self):
        data = {
            "jointly_mixable": self.jointly_mixable,
            "center": format_number(self.center),
            "candidates": self.candidates,
        }
        if self.coupling is not None:
            data["coupling"] = self.coupling.to_dict()
        if self.reason:
            data["reason"] = self.reason
        return data


def solve_jm_feasibility(marginals, mode=None, caps=DEFAULT_CAPS, solver=None):
    """
    Поиск сцепления маргиналов, сосредоточенного на {x : Σx_i = c}, c = Σ средних.

    Args:
        marginals (list): Список UnivariateDiscrete
        mode (NumberMode): Числовой режим
        caps (Caps): Пределы размеров
        solver (SimplexSolver): Решатель ЛП

    Returns:
        JmFeasibility: Сцепление-свидетель или отрицательный ответ
    """
    mode = _mode_of(marginals, mode)
    center = sum(m.mean() for m in marginals)
    grid = product_grid(marginals, caps.lp_variables)
    tol = 0 if mode is NumberMode.RATIONAL else DEFAULT_TOLERANCES.jm * max(1, abs(center))
    grid = [point for point in grid if abs(sum(point) - center) <= tol]
    if not grid:
        logger.info(f"Нет точек сетки с суммой {format_number(center)}")
        return JmFeasibility(False, center, reason="нет точек носителя с суммой, равной центру")

    builder = LpBuilder(Sense.MIN)
    columns = builder.add_variables(len(grid))
    _add_marginal_rows(builder, columns, grid, marginals)
    solver = solver or SimplexSolver(mode=mode, caps=caps)
    solution = solver.solve(builder.build())

    if solution.status is LpStatus.INFEASIBLE:
        logger.info(f"Маргиналы не смешиваемы совместно: ЛП несовместна на {len(grid)} точках")
        return JmFeasibility(False, center, candidates=len(grid), reason="задача ЛП несовместна")
    solution.raise_for_status()
    coupling = _coupling_from(solution, columns, grid, len(marginals), solution.mode)
    logger.info(f"Найдено сцепление с постоянной суммой {format_number(center)}: {len(coupling)} атомов")
    return JmFeasibility(True, center, coupling=coupling, candidates=len(grid))


@dataclass
class NcdExploration:
    """
    Сравнение минимакс-задачи со всеми сцеплениями и с NCD-сцеплениями.

    Attributes:
        value: Оптимум по всем сцеплениям
        value_ncd: Оптимум по NCD-сцеплениям
        minimizer_is_ncd (bool): Является ли найденный минимизатор NCD
        ncd_attains (bool): Совпадают ли оптимумы
        solution (TransportSolution): Решение без ограничения NCD
        ncd_coupling (DiscreteJoint): Минимизатор среди NCD-сцеплений
    """
    value: object
    value_ncd: object
    minimizer_is_ncd: bool
    ncd_attains: bool
    solution: TransportSolution
    ncd_coupling: object = field(default=None)

    def to_dict(self):
        return {
            "value": format_number(self.value),
            "value_ncd": format_number(self.value_ncd),
            "minimizer_is_ncd": self.minimizer_is_ncd,
            "ncd_attains": self.ncd_attains,
            "minimizer": self.solution.to_dict(),
            "ncd_coupling": self.ncd_coupling.to_dict() if self.ncd_coupling is not None else None,
        }


def explore_ncd_minimizer(marginals, unc=None, cost=QUADRATIC_COST, mode=None, caps=DEFAULT_CAPS, tol=None):
    """
    Эксперимент для разнородных маргиналов: достигается ли минимакс-оптимум
    на NCD-сцеплении. Ничего не утверждает, только сообщает результат.

    Args:
        marginals (list): Список UnivariateDiscrete
        unc (UncertaintySpec): Множество неопределенности (по умолчанию все подмножества)
        cost (CostSpec): Стоимость, линейная по сцеплению
        mode (NumberMode): Числовой режим
        caps (Caps): Пределы размеров
        tol (float): Допуск сравнения значений

    Returns:
        NcdExploration: Результат эксперимента
    """
    n = len(marginals)
    unc = unc or UncertaintySpec.all_subsets(n)
    mode = _mode_of(marginals, mode)
    tol = 0 if mode is NumberMode.RATIONAL else (DEFAULT_TOLERANCES.corr if tol is None else tol)
    solver = SimplexSolver(mode=mode, caps=caps)

    solution = solve_minimax(marginals, unc, cost, mode=mode, caps=caps, solver=solver)
    cov = moments(solution.coupling).cov
    sign_tol = 0 if mode is NumberMode.RATIONAL else DEFAULT_TOLERANCES.sign
    minimizer_is_ncd = all(cov[i, j] <= sign_tol for i in range(n) for j in range(i + 1, n))

    builder, columns, grid, _ = _minimax_builder(marginals, unc, cost, caps.lp_variables)
    means = [m.mean() for m in marginals]
    for i, j in itertools.combinations(range(n), 2):
        coeffs = {c: point[i] * point[j] for c, point in zip(columns, grid) if point[i] * point[j] != 0}
        builder.add_constraint(coeffs, Relation.LE, means[i] * means[j])
    constrained = solver.solve(builder.build()).raise_for_status()
    ncd_coupling = _coupling_from(constrained, columns, grid, n, constrained.mode)

    attains = abs(constrained.value - solution.value) <= tol * max(1, abs(solution.value))
    logger.info(
        f"Оптимум {format_number(solution.value)}, оптимум среди NCD {format_number(constrained.value)}, "
        f"минимизатор NCD: {minimizer_is_ncd}"
    )
    return NcdExploration(
        value=solution.value,
        value_ncd=constrained.value,
        minimizer_is_ncd=minimizer_is_ncd,
        ncd_attains=attains,
        solution=solution,
        ncd_coupling=ncd_coupling,
    )
