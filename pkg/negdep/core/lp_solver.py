"""
Плотный двухфазный симплекс-метод с правилом Бланда.

Работает в двух числовых режимах: float64 и точные рациональные числа
(numpy object-массивы с Fraction). При численном сбое в режиме float
небольшие задачи автоматически перерешиваются в рациональном режиме.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from .numeric import NumberMode, as_array, zeros, to_number, format_number, to_float_array
from ..config import DEFAULT_TOLERANCES, DEFAULT_CAPS
from ..exceptions import (
    DimMismatch, LpFailure, LpInfeasible, LpUnbounded, NumericBreakdown, SizeCap,
)
from ..utils.logger import get_logger

logger = get_logger(__name__)

# Порог обнуления элементов таблицы в режиме float
ZERO_EPS = 1e-13

# Допуск на зазор двойственности (относительный)
GAP_TOL = 1e-8


class Sense(str, Enum):
    MIN = "min"
    MAX = "max"


class Relation(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _normalize_bound(value, upper):
    if value is None:
        return None
    if isinstance(value, float) and math.isinf(value):
        if upper and value > 0 or not upper and value < 0:
            return None
        raise DimMismatch(f"Недопустимая граница переменной: {value}")
    return value


@dataclass
class LpProblem:
    """
    Задача линейного программирования в плотной форме.

    Attributes:
        objective (list): Коэффициенты целевой функции
        matrix (list): Строки ограничений (список списков)
        relations (list): Отношения строк (Relation)
        rhs (list): Правые части
        bounds (list): Границы переменных (lo, hi); None означает бесконечность
        sense (Sense): Направление оптимизации
    """
    objective: List
    matrix: List = field(default_factory=list)
    relations: List = field(default_factory=list)
    rhs: List = field(default_factory=list)
    bounds: Optional[List[Tuple]] = None
    sense: Sense = Sense.MIN

    def __post_init__(self):
        self.objective = list(self.objective)
        self.matrix = [list(row) for row in self.matrix]
        self.relations = [Relation(r) for r in self.relations]
        self.rhs = list(self.rhs)
        self.sense = Sense(self.sense)
        n = len(self.objective)
        if self.bounds is None:
            self.bounds = [(0, None)] * n
        self.bounds = [
            (_normalize_bound(lo, upper=False), _normalize_bound(hi, upper=True))
            for lo, hi in self.bounds
        ]

        if len(self.bounds) != n:
            raise DimMismatch(f"Число границ {len(self.bounds)} != числу переменных {n}")
        if not len(self.matrix) == len(self.relations) == len(self.rhs):
            raise DimMismatch(
                f"Несогласованные размеры ограничений: {len(self.matrix)}, "
                f"{len(self.relations)}, {len(self.rhs)}"
            )
        for k, row in enumerate(self.matrix):
            if len(row) != n:
                raise DimMismatch(f"Строка {k} имеет длину {len(row)}, ожидалось {n}")
        values = self.objective + self.rhs + [v for row in self.matrix for v in row]
        values += [v for pair in self.bounds for v in pair if v is not None]
        if any(isinstance(v, float) and math.isnan(v) for v in values):
            raise DimMismatch("Задача ЛП содержит NaN")

    @property
    def n_vars(self):
        return len(self.objective)

    @property
    def n_rows(self):
        return len(self.matrix)

    def nonzeros(self):
        """Число ненулевых коэффициентов матрицы ограничений и целевой функции"""
        return sum(1 for row in self.matrix for v in row if v != 0) + sum(
            1 for v in self.objective if v != 0
        )


class LpBuilder:
    """
    Пошаговое построение LpProblem: переменные и строки добавляются по одной.

    Args:
        sense (Sense): Направление оптимизации
    """

    def __init__(self, sense=Sense.MIN):
        self.sense = Sense(sense)
        self.costs = []
        self.bounds = []
        self.rows = []

    def add_variable(self, cost=0, lo=0, hi=None):
        """
        Добавление переменной.

        Returns:
            int: Номер переменной
        """
        self.costs.append(cost)
        self.bounds.append((lo, hi))
        return len(self.costs) - 1

    def add_variables(self, count, cost=0, lo=0, hi=None):
        """Добавление нескольких одинаковых переменных"""
        return [self.add_variable(cost, lo, hi) for _ in range(count)]

    def add_constraint(self, coeffs, relation, rhs):
        """
        Добавление строки ограничения.

        Args:
            coeffs (dict): Словарь {номер переменной: коэффициент}
            relation (Relation): Отношение
            rhs: Правая часть

        Returns:
            int: Номер строки
        """
        self.rows.append((dict(coeffs), Relation(relation), rhs))
        return len(self.rows) - 1

    def build(self):
        """
        Сборка плотной задачи.

        Returns:
            LpProblem: Задача
        """
        n = len(self.costs)
        matrix = []
        for coeffs, _, _ in self.rows:
            row = [0] * n
            for j, value in coeffs.items():
                row[j] += value
            matrix.append(row)
        return LpProblem(
            objective=list(self.costs),
            matrix=matrix,
            relations=[r for _, r, _ in self.rows],
            rhs=[b for _, _, b in self.rows],
            bounds=list(self.bounds),
            sense=self.sense,
        )


@dataclass
class LpSolution:
    """
    Результат решения задачи ЛП.

    Attributes:
        status (LpStatus): Статус
        value: Оптимальное значение (в исходном направлении)
        x (numpy.ndarray): Прямое решение
        dual (numpy.ndarray): Двойственные переменные строк ограничений
        residual: Максимальная невязка прямой допустимости
        gap: Относительный зазор двойственности
        mode (NumberMode): Режим, в котором получено решение
        iterations (int): Число итераций симплекс-метода
    """
    status: LpStatus
    value: Optional[object] = None
    x: Optional[np.ndarray] = None
    dual: Optional[np.ndarray] = None
    residual: Optional[object] = None
    gap: Optional[object] = None
    mode: NumberMode = NumberMode.FLOAT
    iterations: int = 0

    @property
    def optimal(self):
        return self.status is LpStatus.OPTIMAL

    def raise_for_status(self):
        """Исключение для неоптимального статуса"""
        if self.status is LpStatus.INFEASIBLE:
            raise LpInfeasible("Задача ЛП несовместна")
        if self.status is LpStatus.UNBOUNDED:
            raise LpUnbounded("Целевая функция задачи ЛП не ограничена")
        return self

    def to_dict(self):
        data = {"status": self.status.value, "mode": self.mode.value, "iterations": self.iterations}
        if self.optimal:
            data.update({
                "value": format_number(self.value),
                "x": [format_number(v) for v in self.x],
                "dual": [format_number(v) for v in self.dual],
                "residual": float(self.residual),
                "gap": float(self.gap),
            })
        return data


@dataclass
class _StandardForm:
    """Задача min c'y, A y (rel) b, y >= 0 с b >= 0 и отображение y -> x"""
    matrix: np.ndarray
    rhs: np.ndarray
    relations: List[Relation]
    costs: np.ndarray
    var_map: np.ndarray
    offset: np.ndarray
    row_sign: List[int]
    n_problem_rows: int


class SimplexSolver:
    """
    Двухфазный симплекс-метод на плотной таблице.

    Args:
        mode (NumberMode): Числовой режим
        tol (float): Допуск знака в режиме float
        max_iter (int): Предельное число итераций (по умолчанию зависит от размера)
        debug (bool): Выводить таблицы симплекс-метода в журнал (уровень DEBUG)
        retry_rational (bool): Перерешивать в рациональном режиме при численном сбое
        caps (Caps): Пределы размеров
    """

    def __init__(self, mode=NumberMode.FLOAT, tol=None, max_iter=None, debug=False,
                 retry_rational=True, caps=DEFAULT_CAPS):
        self.mode = NumberMode.parse(mode)
        self.tol = DEFAULT_TOLERANCES.lp if tol is None else tol
        self.max_iter = max_iter
        self.debug = debug
        self.retry_rational = retry_rational
        self.caps = caps

    def solve(self, problem):
        """
        Решение задачи.

        Args:
            problem (LpProblem): Задача

        Returns:
            LpSolution: Решение (статус optimal, infeasible или unbounded)
        """
        if problem.n_vars > self.caps.lp_variables:
            logger.error(f"Задача ЛП содержит {problem.n_vars} переменных (предел {self.caps.lp_variables})")
            raise SizeCap(f"Задача ЛП содержит {problem.n_vars} переменных, предел {self.caps.lp_variables}")

        try:
            return self._solve_in_mode(problem, self.mode)
        except NumericBreakdown as exc:
            nonzeros = problem.nonzeros()
            if (self.mode is NumberMode.FLOAT and self.retry_rational
                    and nonzeros <= self.caps.rational_nonzeros):
                logger.warning(f"Численный сбой ({exc}); повторное решение в рациональном режиме")
                return self._solve_in_mode(problem, NumberMode.RATIONAL)
            raise

    def _standardize(self, problem, mode):
        n = problem.n_vars
        matrix = as_array(problem.matrix, mode).reshape(problem.n_rows, n)
        rhs = as_array(problem.rhs, mode).reshape(problem.n_rows)
        costs = as_array(problem.objective, mode).reshape(n)

        columns = []
        offset = zeros(n, mode)
        bound_rows = []
        for j, (lo, hi) in enumerate(problem.bounds):
            if lo is not None:
                offset[j] = to_number(lo, mode)
                columns.append((j, 1))
                if hi is not None:
                    bound_rows.append((len(columns) - 1, to_number(hi, mode) - to_number(lo, mode)))
            elif hi is not None:
                offset[j] = to_number(hi, mode)
                columns.append((j, -1))
            else:
                columns.append((j, 1))
                columns.append((j, -1))

        var_map = zeros((n, len(columns)), mode)
        for k, (j, s) in enumerate(columns):
            var_map[j, k] = s

        std_matrix = matrix @ var_map if problem.n_rows else zeros((0, len(columns)), mode)
        std_rhs = rhs - matrix @ offset if problem.n_rows else zeros(0, mode)
        std_costs = costs @ var_map
        if problem.sense is Sense.MAX:
            std_costs = -std_costs

        relations = list(problem.relations)
        if bound_rows:
            extra = zeros((len(bound_rows), len(columns)), mode)
            extra_rhs = zeros(len(bound_rows), mode)
            for r, (k, ub) in enumerate(bound_rows):
                extra[r, k] = 1
                extra_rhs[r] = ub
            std_matrix = np.vstack([std_matrix, extra])
            std_rhs = np.concatenate([std_rhs, extra_rhs])
            relations += [Relation.LE] * len(bound_rows)

        row_sign = []
        flipped = {Relation.LE: Relation.GE, Relation.GE: Relation.LE, Relation.EQ: Relation.EQ}
        for i in range(len(relations)):
            if std_rhs[i] < 0:
                std_matrix[i] = -std_matrix[i]
                std_rhs[i] = -std_rhs[i]
                relations[i] = flipped[relations[i]]
                row_sign.append(-1)
            else:
                row_sign.append(1)

        return _StandardForm(
            matrix=std_matrix, rhs=std_rhs, relations=relations, costs=std_costs,
            var_map=var_map, offset=offset, row_sign=row_sign, n_problem_rows=problem.n_rows,
        )

    def _solve_in_mode(self, problem, mode):
        tol = 0 if mode is NumberMode.RATIONAL else self.tol
        std = self._standardize(problem, mode)
        m, ny = std.matrix.shape

        # Вспомогательные столбцы: резерв, избыток, искусственная переменная
        aux = []
        unit_col = []
        for rel in std.relations:
            if rel is Relation.LE:
                unit_col.append(ny + len(aux))
                aux.append(("slack", False))
            elif rel is Relation.GE:
                aux.append(("surplus", False))
                unit_col.append(ny + len(aux))
                aux.append(("artificial", True))
            else:
                unit_col.append(ny + len(aux))
                aux.append(("artificial", True))
        n_cols = ny + len(aux)
        artificial = np.zeros(n_cols, dtype=bool)
        for k, (_, is_art) in enumerate(aux):
            artificial[ny + k] = is_art

        table = zeros((m, n_cols + 1), mode)
        table[:, :ny] = std.matrix
        table[:, -1] = std.rhs
        for i, rel in enumerate(std.relations):
            table[i, unit_col[i]] = 1
            if rel is Relation.GE:
                table[i, unit_col[i] - 1] = -1
        basis = list(unit_col)
        rows = list(range(m))

        max_iter = self.max_iter or max(10000, 50 * (m + n_cols))
        iterations = 0

        if artificial.any():
            phase1 = zeros(n_cols + 1, mode)
            phase1[:-1][artificial] = 1
            for i in range(m):
                if artificial[basis[i]]:
                    phase1 = phase1 - table[i]
            status, used = self._iterate(table, phase1, basis, np.ones(n_cols, dtype=bool), mode, tol, max_iter, 1)
            iterations += used
            infeasibility = -phase1[-1]
            scale = max(1, float(np.max(np.abs(to_float_array(std.rhs))))) if m else 1
            if infeasibility > tol * scale:
                logger.info(f"Задача ЛП несовместна (невязка фазы 1: {float(infeasibility):.3e})")
                return LpSolution(status=LpStatus.INFEASIBLE, mode=mode, iterations=iterations)

            redundant = []
            for i in range(len(basis)):
                if not artificial[basis[i]]:
                    continue
                candidates = [j for j in range(n_cols) if not artificial[j] and abs(table[i, j]) > tol]
                if candidates:
                    table[i, -1] = 0 * table[i, -1]
                    self._pivot(table, phase1, basis, i, candidates[0], mode)
                else:
                    redundant.append(i)
            if redundant:
                logger.debug(f"Удалено избыточных строк: {len(redundant)}")
                table = np.delete(table, redundant, axis=0)
                basis = [b for i, b in enumerate(basis) if i not in redundant]
                rows = [r for i, r in enumerate(rows) if i not in redundant]

        full_costs = zeros(n_cols + 1, mode)
        full_costs[:ny] = std.costs
        objective = full_costs.copy()
        for i, b in enumerate(basis):
            if full_costs[b] != 0:
                objective = objective - full_costs[b] * table[i]

        status, used = self._iterate(table, objective, basis, ~artificial, mode, tol, max_iter, 2)
        iterations += used
        if status is LpStatus.UNBOUNDED:
            logger.info("Целевая функция задачи ЛП не ограничена")
            return LpSolution(status=LpStatus.UNBOUNDED, mode=mode, iterations=iterations)

        y = zeros(n_cols, mode)
        for i, b in enumerate(basis):
            y[b] = table[i, -1]
        y_struct = y[:ny]
        x = std.offset + std.var_map @ y_struct

        # Двойственные переменные стандартной формы: u_i = -(приведенная стоимость единичного столбца)
        u = zeros(len(std.relations), mode)
        for i in rows:
            u[i] = -objective[unit_col[i]]
        primal_std = std.costs @ y_struct
        dual_std = sum((std.rhs[i] * u[i] for i in rows), 0 * primal_std)
        gap = abs(primal_std - dual_std) / max(1, abs(primal_std))

        sense_sign = -1 if problem.sense is Sense.MAX else 1
        dual = zeros(std.n_problem_rows, mode)
        for k in range(std.n_problem_rows):
            dual[k] = sense_sign * std.row_sign[k] * u[k]

        costs = as_array(problem.objective, mode).reshape(problem.n_vars)
        value = costs @ x
        residual = self._residual(problem, x, mode)

        if mode is NumberMode.FLOAT:
            scale = max(1.0, float(np.max(np.abs(x))) if x.size else 1.0,
                        max((abs(float(v)) for v in problem.rhs), default=1.0))
            if not np.isfinite(value) or residual > self.tol * scale:
                raise NumericBreakdown(f"Невязка прямой допустимости {residual:.3e}")
            if gap > GAP_TOL:
                raise NumericBreakdown(f"Зазор двойственности {gap:.3e}")

        logger.debug(f"ЛП решена за {iterations} итераций, значение {format_number(value)}")
        return LpSolution(
            status=LpStatus.OPTIMAL, value=value, x=x, dual=dual,
            residual=residual, gap=gap, mode=mode, iterations=iterations,
        )

    def _iterate(self, table, objective, basis, allowed, mode, tol, max_iter, phase):
        for iteration in range(max_iter):
            if mode is NumberMode.FLOAT and not np.all(np.isfinite(table)):
                raise NumericBreakdown("Нечисловые значения в симплекс-таблице")
            if self.debug:
                self._dump(table, objective, basis, phase, iteration)

            reduced = objective[:-1]
            candidates = np.flatnonzero((reduced < -tol) & allowed)
            if candidates.size == 0:
                return LpStatus.OPTIMAL, iteration
            entering = int(candidates[0])

            column = table[:, entering]
            eligible = np.flatnonzero(column > tol)
            if eligible.size == 0:
                return LpStatus.UNBOUNDED, iteration
            ratios = [table[i, -1] / column[i] for i in eligible]
            best = min(ratios)
            slack = 0 if mode is NumberMode.RATIONAL else ZERO_EPS * max(1.0, abs(best))
            ties = [int(i) for i, r in zip(eligible, ratios) if r <= best + slack]
            leaving = min(ties, key=lambda i: basis[i])
            self._pivot(table, objective, basis, leaving, entering, mode)

        if mode is NumberMode.FLOAT:
            raise NumericBreakdown(f"Превышено число итераций ({max_iter})")
        raise LpFailure(f"Превышено число итераций ({max_iter})")

    @staticmethod
    def _pivot(table, objective, basis, row, col, mode):
        table[row] = table[row] / table[row, col]
        factors = table[:, col].copy()
        factors[row] = 0 * factors[row]
        table -= np.outer(factors, table[row])
        objective -= objective[col] * table[row]
        if mode is NumberMode.FLOAT:
            table[np.abs(table) < ZERO_EPS] = 0.0
            objective[np.abs(objective) < ZERO_EPS] = 0.0
            table[:, col] = 0.0
            table[row, col] = 1.0
            objective[col] = 0.0
        basis[row] = col

    @staticmethod
    def _residual(problem, x, mode):
        worst = 0 * (x[0] if len(x) else 0)
        if problem.n_rows:
            matrix = as_array(problem.matrix, mode).reshape(problem.n_rows, problem.n_vars)
            lhs = matrix @ x
            for k, (rel, b) in enumerate(zip(problem.relations, problem.rhs)):
                diff = lhs[k] - to_number(b, mode)
                if rel is Relation.LE:
                    viol = max(diff, 0 * diff)
                elif rel is Relation.GE:
                    viol = max(-diff, 0 * diff)
                else:
                    viol = abs(diff)
                worst = max(worst, viol)
        for j, (lo, hi) in enumerate(problem.bounds):
            if lo is not None:
                worst = max(worst, to_number(lo, mode) - x[j])
            if hi is not None:
                worst = max(worst, x[j] - to_number(hi, mode))
        return worst

    @staticmethod
    def _dump(table, objective, basis, phase, iteration):
        if not logger.isEnabledFor(logging.DEBUG):
            return
        frame = pd.DataFrame(
            to_float_array(np.vstack([table, objective])),
            index=[f"x{b}" for b in basis] + ["z"],
        )
        logger.debug(f"Фаза {phase}, итерация {iteration}:\n{frame.to_string()}")


def solve(problem, mode=NumberMode.FLOAT, **kwargs):
    """
    Решение задачи ЛП.

    Args:
        problem (LpProblem): Задача
        mode (NumberMode): Числовой режим
        **kwargs: Параметры SimplexSolver

    Returns:
        LpSolution: Решение
    """
    return SimplexSolver(mode=mode, **kwargs).solve(problem)
