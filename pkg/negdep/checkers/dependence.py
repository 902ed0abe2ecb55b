"""
Точные вердикты для понятий отрицательной зависимости на конечных
дискретных распределениях: NCD, NLOD, NUOD, NOD, NSD, NA, CT, JM,
а также проверка цепочки импликаций между ними
"""

import functools
import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from ..config import DEFAULT_TOLERANCES, DEFAULT_CAPS
from ..core.distribution import (
    dense_grid, marginals, moments, is_joint_mix, project,
)
from ..core.lp_solver import LpBuilder, Sense, Relation, SimplexSolver
from ..core.numeric import NumberMode, as_array, zeros, format_number, to_float_array
from ..exceptions import GridTooLarge, EnumerationTooLarge, SizeCap
from ..utils.logger import get_logger
from .lattice import (
    upper_sets, indicator_matrix, lower_orthant_table, upper_orthant_table, threshold_at,
)

logger = get_logger(__name__)

NOTIONS = ("NCD", "NLOD", "NUOD", "NOD", "NSD", "NA", "CT", "JM")

# Понятия, отрицательный вердикт по которым означает нарушение отрицательной зависимости
NEGATIVE_NOTIONS = ("NCD", "NLOD", "NUOD", "NOD", "NSD", "NA")

IMPLICATIONS = (
    ("CT", "NA"),
    ("NA", "NSD"),
    ("NSD", "NOD"),
    ("NOD", "NUOD"),
    ("NOD", "NLOD"),
    ("NUOD", "NCD"),
    ("NLOD", "NCD"),
)

# Только для n = 2
BIVARIATE_IMPLICATIONS = (("JM", "CT"),)

# Ошибки превышения пределов, которые в check_chain превращаются в skipped
CAP_ERRORS = (GridTooLarge, EnumerationTooLarge, SizeCap)


class Status(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class Verdict:
    """
    Вердикт по одному понятию зависимости.

    Attributes:
        notion (str): Понятие (NCD, NLOD, ...)
        status (Status): holds, fails или skipped
        witness (dict): Свидетель нарушения (для fails)
        reason (str): Причина пропуска (для skipped)
        backend (str): exact или float
        boundary (bool): Значение проверки попало в полосу допуска около нуля
        value: Численная характеристика (максимальное превышение, оптимум ЛП)
    """
    notion: str
    status: Status
    witness: Optional[dict] = None
    reason: Optional[str] = None
    backend: str = "float"
    boundary: bool = False
    value: Optional[object] = None

    @property
    def holds(self):
        return self.status is Status.HOLDS

    @property
    def fails(self):
        return self.status is Status.FAILS

    @property
    def skipped(self):
        return self.status is Status.SKIPPED

    def to_dict(self):
        data = {"notion": self.notion, "status": self.status.value, "backend": self.backend}
        if self.witness is not None:
            data["witness"] = self.witness
        if self.reason is not None:
            data["reason"] = self.reason
        if self.boundary:
            data["boundary"] = True
        if self.value is not None:
            data["value"] = format_number(self.value)
        return data


def _backend(d):
    return "exact" if d.is_rational else "float"


def _sign_tol(d, tol):
    return d.tol(DEFAULT_TOLERANCES.sign if tol is None else tol)


def _boundary(d, value, tol):
    return not d.is_rational and 0 < abs(value) <= tol


def _fmt_point(point):
    return [format_number(v) for v in point]


def skipped(notion, reason, d=None):
    """Вердикт skipped с причиной"""
    logger.warning(f"Проверка {notion} пропущена: {reason}")
    return Verdict(notion=notion, status=Status.SKIPPED, reason=reason,
                   backend=_backend(d) if d is not None else "float")


def is_ncd(d, tol=None, summary=None):
    """
    Проверка NCD: все попарные ковариации неположительны.

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск знака (режим float)
        summary (MomentSummary): Уже вычисленные моменты d

    Returns:
        Verdict: Вердикт со свидетелем (i, j, cov) при нарушении
    """
    tol = _sign_tol(d, tol)
    cov = (summary or moments(d)).cov
    worst, pair = None, None
    for i, j in itertools.combinations(range(d.dim), 2):
        if worst is None or cov[i, j] > worst:
            worst, pair = cov[i, j], (i, j)
    if worst is None:
        return Verdict(notion="NCD", status=Status.HOLDS, backend=_backend(d))
    if worst > tol:
        witness = {"pair": list(pair), "cov": format_number(worst)}
        return Verdict(notion="NCD", status=Status.FAILS, witness=witness, backend=_backend(d), value=worst)
    return Verdict(notion="NCD", status=Status.HOLDS, backend=_backend(d),
                   boundary=_boundary(d, worst, tol), value=worst)


def independent_grid(d, cap=None):
    """
    Плотные массивы вероятностей X и X⊥ на произведении маргинальных носителей.

    Args:
        d (DiscreteJoint): Распределение
        cap (int): Предельный размер сетки

    Returns:
        tuple: (носители, массив X, массив X⊥)
    """
    supports, grid = dense_grid(d, cap)
    factors = [as_array(list(m.probs), d.mode) for m in marginals(d)]
    indep = functools.reduce(np.multiply.outer, factors)
    return supports, grid, np.asarray(indep).reshape(grid.shape)


def _orthant(d, notion, upper, tol, cap):
    tol = _sign_tol(d, tol)
    supports, grid, indep = independent_grid(d, cap)
    build = upper_orthant_table if upper else lower_orthant_table
    joint_table = build(grid, d.mode)
    indep_table = build(indep, d.mode)
    excess = joint_table - indep_table
    location = np.unravel_index(int(np.argmax(to_float_array(excess))), excess.shape)
    worst = excess[location]
    if worst > tol:
        witness = {
            "t": _fmt_point(threshold_at(supports, location)),
            "event": "X > t" if upper else "X <= t",
            "joint": format_number(joint_table[location]),
            "independent": format_number(indep_table[location]),
        }
        logger.info(f"{notion} нарушено при t={witness['t']}")
        return Verdict(notion=notion, status=Status.FAILS, witness=witness, backend=_backend(d), value=worst)
    return Verdict(notion=notion, status=Status.HOLDS, backend=_backend(d),
                   boundary=_boundary(d, worst, tol), value=worst)


def is_nlod(d, tol=None, cap=None):
    """
    Проверка NLOD: P(X <= t) <= P(X⊥ <= t) для всех порогов t.

    Сетка порогов: значения маргинальных носителей и одна точка ниже минимума
    по каждой координате; этого достаточно, так как функции распределения
    кусочно-постоянны с изломами только в точках носителя.

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск знака
        cap (int): Предельный размер сетки

    Returns:
        Verdict: Вердикт со свидетелем-порогом t
    """
    return _orthant(d, "NLOD", upper=False, tol=tol, cap=cap)


def is_nuod(d, tol=None, cap=None):
    """
    Проверка NUOD: P(X > t) <= P(X⊥ > t) для всех порогов t.

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск знака
        cap (int): Предельный размер сетки

    Returns:
        Verdict: Вердикт со свидетелем-порогом t
    """
    return _orthant(d, "NUOD", upper=True, tol=tol, cap=cap)


def combine_nod(lower, upper):
    """NOD как конъюнкция вердиктов NLOD и NUOD"""
    backend = lower.backend
    for part in (lower, upper):
        if part.fails:
            witness = dict(part.witness or {})
            witness["notion"] = part.notion
            return Verdict(notion="NOD", status=Status.FAILS, witness=witness, backend=backend, value=part.value)
    for part in (lower, upper):
        if part.skipped:
            return Verdict(notion="NOD", status=Status.SKIPPED, reason=part.reason, backend=backend)
    return Verdict(notion="NOD", status=Status.HOLDS, backend=backend,
                   boundary=lower.boundary or upper.boundary)


def is_nod(d, tol=None, cap=None):
    """
    Проверка NOD = NLOD и NUOD.

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск знака
        cap (int): Предельный размер сетки

    Returns:
        Verdict: Вердикт
    """
    return combine_nod(is_nlod(d, tol, cap), is_nuod(d, tol, cap))


def nsd_problem(d, cap=None):
    """
    Задача ЛП для проверки NSD.

    Максимизируется E[φ(X)] - E[φ(X⊥)] по функциям φ со значениями в [-1, 1],
    супермодулярным на сетке маргинальных носителей (достаточно условий
    на соседних приращениях по каждой паре координат).

    Args:
        d (DiscreteJoint): Распределение
        cap (int): Предельный размер сетки

    Returns:
        tuple: (LpProblem, носители, форма сетки)
    """
    supports, grid, indep = independent_grid(d, cap)
    shape = grid.shape
    diff = (grid - indep).reshape(-1)

    builder = LpBuilder(Sense.MAX)
    for k in range(diff.size):
        builder.add_variable(cost=diff[k], lo=-1, hi=1)

    for index in np.ndindex(*shape):
        base = np.ravel_multi_index(index, shape)
        for i, j in itertools.combinations(range(len(shape)), 2):
            if index[i] + 1 >= shape[i] or index[j] + 1 >= shape[j]:
                continue
            step_i, step_j, step_ij = list(index), list(index), list(index)
            step_i[i] += 1
            step_j[j] += 1
            step_ij[i] += 1
            step_ij[j] += 1
            coeffs = {int(base): 1}
            for point, coef in ((step_ij, 1), (step_i, -1), (step_j, -1)):
                flat = int(np.ravel_multi_index(tuple(point), shape))
                coeffs[flat] = coeffs.get(flat, 0) + coef
            builder.add_constraint(coeffs, Relation.GE, 0)
    return builder.build(), supports, shape


def is_nsd(d, tol=None, cap=None, solver=None):
    """
    Проверка NSD через задачу ЛП о супермодулярном порядке.

    NSD выполняется тогда и только тогда, когда оптимум не превосходит tol
    (оптимум всегда неотрицателен, так как φ = 0 допустима).

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск для оптимума
        cap (int): Предельный размер сетки
        solver (SimplexSolver): Решатель ЛП

    Returns:
        Verdict: Вердикт; при нарушении свидетель содержит оптимальную φ
    """
    tol = d.tol(DEFAULT_TOLERANCES.lp if tol is None else tol)
    problem, supports, shape = nsd_problem(d, cap)
    solver = solver or SimplexSolver(mode=d.mode)
    solution = solver.solve(problem).raise_for_status()
    optimum = solution.value
    backend = "exact" if solution.mode is NumberMode.RATIONAL else "float"
    logger.debug(f"Оптимум ЛП для NSD: {format_number(optimum)}")

    if optimum > tol:
        phi = []
        for flat, index in enumerate(np.ndindex(*shape)):
            value = solution.x[flat]
            if value != 0:
                point = tuple(supports[i][k] for i, k in enumerate(index))
                phi.append({"x": _fmt_point(point), "phi": format_number(value)})
        witness = {"gap": format_number(optimum), "phi": phi}
        return Verdict(notion="NSD", status=Status.FAILS, witness=witness, backend=backend, value=optimum)
    return Verdict(notion="NSD", status=Status.HOLDS, backend=backend,
                   boundary=backend == "float" and 0 < abs(optimum) <= tol, value=optimum)


def two_block_partitions(n):
    """
    Разбиения {0..n-1} на два непустых блока (A содержит 0).

    Args:
        n (int): Размерность

    Returns:
        list: Пары (A, B) кортежей индексов
    """
    result = []
    rest = list(range(1, n))
    for size in range(0, n - 1):
        for extra in itertools.combinations(rest, size):
            block_a = (0,) + extra
            block_b = tuple(k for k in range(n) if k not in block_a)
            result.append((block_a, block_b))
    return result


def _block_covariances(d, block_a, block_b, cap):
    """Ковариации индикаторов верхних множеств X_A и X_B"""
    support_a = list(project(d, block_a).points)
    support_b = list(project(d, block_b).points)
    index_a = {p: k for k, p in enumerate(support_a)}
    index_b = {p: k for k, p in enumerate(support_b)}

    joint = zeros((len(support_a), len(support_b)), d.mode)
    for point, prob in d.atoms():
        a = tuple(point[i] for i in block_a)
        b = tuple(point[i] for i in block_b)
        joint[index_a[a], index_b[b]] += prob
    prob_a = joint.sum(axis=1)
    prob_b = joint.sum(axis=0)

    sets_a = upper_sets(support_a, cap)
    sets_b = upper_sets(support_b, cap)
    return support_a, support_b, sets_a, sets_b, joint, prob_a, prob_b


def is_na(d, tol=None, cap=None, chunk=512):
    """
    Проверка NA.

    Возрастающие функции на конечном множестве являются неотрицательными
    комбинациями индикаторов верхних множеств и констант, поэтому
    достаточно проверить Cov(1_U(X_A), 1_V(X_B)) <= 0 для всех разбиений
    (A, B) и всех верхних множеств U, V проекций носителя.

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск знака
        cap (int): Предельное число верхних множеств
        chunk (int): Число строк индикаторной матрицы за один шаг

    Returns:
        Verdict: Вердикт со свидетелем (A, B, U, V, cov)
    """
    tol = _sign_tol(d, tol)
    cap = DEFAULT_CAPS.upper_sets if cap is None else cap
    worst_overall = None

    for block_a, block_b in two_block_partitions(d.dim):
        support_a, support_b, sets_a, sets_b, joint, prob_a, prob_b = _block_covariances(
            d, block_a, block_b, cap
        )
        if not sets_a or not sets_b:
            continue
        ind_b = indicator_matrix(sets_b, len(support_b), d.mode)
        mass_b = ind_b @ prob_b
        joint_b = joint @ ind_b.T

        for start in range(0, len(sets_a), chunk):
            ind_a = indicator_matrix(sets_a[start:start + chunk], len(support_a), d.mode)
            cov = ind_a @ joint_b - np.multiply.outer(ind_a @ prob_a, mass_b)
            location = np.unravel_index(int(np.argmax(to_float_array(cov))), cov.shape)
            worst = cov[location]
            if worst_overall is None or worst > worst_overall:
                worst_overall = worst
            if worst > tol:
                upper_a = [_fmt_point(support_a[k]) for k in sets_a[start + location[0]]]
                upper_b = [_fmt_point(support_b[k]) for k in sets_b[location[1]]]
                witness = {
                    "A": list(block_a), "B": list(block_b),
                    "U": upper_a, "V": upper_b, "cov": format_number(worst),
                }
                logger.info(f"NA нарушено для разбиения {block_a}|{block_b}")
                return Verdict(notion="NA", status=Status.FAILS, witness=witness, backend=_backend(d), value=worst)

    if worst_overall is None:
        return Verdict(notion="NA", status=Status.HOLDS, backend=_backend(d))
    return Verdict(notion="NA", status=Status.HOLDS, backend=_backend(d),
                   boundary=_boundary(d, worst_overall, tol), value=worst_overall)


def is_ct(d, tol=None):
    """
    Проверка контрмонотонности: для каждой пары координат и любых двух
    атомов a, a' выполнено (a_i - a'_i)(a_j - a'_j) <= 0.

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск знака

    Returns:
        Verdict: Вердикт со свидетелем (пара координат, два атома)
    """
    tol = _sign_tol(d, tol)
    points = d.points_array()
    for i, j in itertools.combinations(range(d.dim), 2):
        delta_i = np.subtract.outer(points[:, i], points[:, i])
        delta_j = np.subtract.outer(points[:, j], points[:, j])
        product = delta_i * delta_j
        location = np.unravel_index(int(np.argmax(to_float_array(product))), product.shape)
        if product[location] > tol:
            witness = {
                "pair": [i, j],
                "atoms": [_fmt_point(d.points[location[0]]), _fmt_point(d.points[location[1]])],
            }
            return Verdict(notion="CT", status=Status.FAILS, witness=witness, backend=_backend(d))
    return Verdict(notion="CT", status=Status.HOLDS, backend=_backend(d))


def jm_verdict(d, tol=None):
    """
    Вердикт JM: сумма координат почти наверное постоянна.

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск для сумм

    Returns:
        Verdict: Вердикт; при выполнении value содержит центр
    """
    result = is_joint_mix(d, tol)
    if result:
        return Verdict(notion="JM", status=Status.HOLDS, backend=_backend(d), value=result.center)
    (low, low_sum), (high, high_sum) = result.witness
    witness = {
        "atoms": [_fmt_point(low), _fmt_point(high)],
        "sums": [format_number(low_sum), format_number(high_sum)],
    }
    return Verdict(notion="JM", status=Status.FAILS, witness=witness, backend=_backend(d))


@dataclass
class DependenceReport:
    """
    Вердикты по всем понятиям для одного распределения.

    Attributes:
        dim (int): Размерность
        mode (NumberMode): Числовой режим
        verdicts (dict): Словарь {понятие: Verdict}
    """
    dim: int
    mode: NumberMode
    verdicts: Dict[str, Verdict] = field(default_factory=dict)

    def __getitem__(self, notion):
        return self.verdicts[notion]

    @property
    def negative(self):
        """Есть ли отрицательный вердикт по понятиям отрицательной зависимости"""
        return any(self.verdicts[n].fails for n in NEGATIVE_NOTIONS if n in self.verdicts)

    def to_dict(self):
        return {
            "dim": self.dim,
            "number_mode": self.mode.value,
            "verdicts": {name: v.to_dict() for name, v in self.verdicts.items()},
        }

    def to_frame(self):
        """Таблица вердиктов (pandas.DataFrame)"""
        rows = []
        for name, verdict in self.verdicts.items():
            rows.append({
                "notion": name,
                "status": verdict.status.value,
                "backend": verdict.backend,
                "boundary": verdict.boundary,
                "value": None if verdict.value is None else float(verdict.value),
                "reason": verdict.reason,
            })
        return pd.DataFrame(rows, columns=["notion", "status", "backend", "boundary", "value", "reason"])


@dataclass
class ChainReport:
    """
    Результат аудита цепочки импликаций.

    Attributes:
        report (DependenceReport): Вердикты
        violations (list): Нарушенные импликации (ошибки согласованности проверок)
    """
    report: DependenceReport
    violations: List[dict] = field(default_factory=list)

    @property
    def consistent(self):
        return not self.violations

    @property
    def negative(self):
        return self.report.negative or not self.consistent

    def to_dict(self):
        data = self.report.to_dict()
        data["chain"] = {"consistent": self.consistent, "violations": self.violations}
        return data


def implication_closure(dim):
    """
    Транзитивное замыкание импликаций между понятиями.

    Args:
        dim (int): Размерность (для n = 2 добавляется JM => CT)

    Returns:
        list: Пары (посылка, следствие)
    """
    edges = list(IMPLICATIONS) + (list(BIVARIATE_IMPLICATIONS) if dim == 2 else [])
    reach = {name: set() for name in NOTIONS}
    for premise, conclusion in edges:
        reach[premise].add(conclusion)
    changed = True
    while changed:
        changed = False
        for name in NOTIONS:
            extra = set().union(*(reach[c] for c in reach[name])) - reach[name] if reach[name] else set()
            if extra:
                reach[name] |= extra
                changed = True
    return [(p, c) for p in NOTIONS for c in NOTIONS if c in reach[p]]


def audit_chain(report):
    """
    Поиск нарушенных импликаций в наборе вердиктов.

    Args:
        report (DependenceReport): Вердикты

    Returns:
        list: Нарушения {premise, conclusion}
    """
    violations = []
    for premise, conclusion in implication_closure(report.dim):
        left, right = report.verdicts.get(premise), report.verdicts.get(conclusion)
        if left is not None and right is not None and left.holds and right.fails:
            logger.error(f"Несогласованность проверок: {premise} выполнено, а {conclusion} нарушено")
            violations.append({"premise": premise, "conclusion": conclusion})
    return violations
