"""
Численная проверка утверждений об оптимальности: улучшение при
симметризации, оптимальность перестановочной NCD-совместной смеси с
корреляцией P*_n и тождество для парных стоимостей
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np

from ..config import DEFAULT_CAPS, DEFAULT_TOLERANCES
from ..core.distribution import is_joint_mix, marginals, symmetrize
from ..core.numeric import NumberMode, format_number, to_float_array
from ..exceptions import (
    NotSymmetricUncertainty, NotJointMix, PreconditionFailed, BadSubset, DimMismatch,
)
from ..models.families import CovModel
from ..models.gaussian import equicorrelation
from ..utils.logger import get_logger
from .coupling_lp import solve_minimax, solve_jm_feasibility, QUADRATIC_COST
from .objective import objective, cost_from_cov
from .uncertainty import UncertaintySpec

logger = get_logger(__name__)


@dataclass(frozen=True)
class SymmetrizationCheck:
    """
    Сравнение целевой функции до и после симметризации.

    Attributes:
        lhs: Значение для исходного распределения
        rhs: Значение для симметризованного распределения
        improved (bool): rhs <= lhs
        symmetrized (DiscreteJoint): Симметризованное распределение
    """
    lhs: object
    rhs: object
    improved: bool
    symmetrized: object = None

    def to_dict(self):
        return {
            "lhs": format_number(self.lhs),
            "rhs": format_number(self.rhs),
            "improved": self.improved,
        }


def verify_symmetrization_improvement(d, unc, cost=QUADRATIC_COST, tol=None):
    """
    Симметризация совместной смеси с одинаковыми маргиналами не увеличивает
    sup-целевую функцию при симметричном множестве неопределенности.

    Args:
        d (DiscreteJoint): Совместная смесь с одинаковыми маргиналами
        unc (UncertaintySpec): Симметричное множество неопределенности
        cost (CostSpec): Стоимость
        tol (float): Допуск сравнения (режим float)

    Returns:
        SymmetrizationCheck: Значения и результат сравнения
    """
    if not unc.is_symmetric():
        logger.error("Множество неопределенности не замкнуто относительно перестановок")
        raise NotSymmetricUncertainty("Множество неопределенности не замкнуто относительно перестановок")
    if not is_joint_mix(d):
        logger.error("Распределение не является совместной смесью")
        raise NotJointMix("Проверка симметризации требует совместной смеси")
    laws = marginals(d)
    if any(law.support != laws[0].support or law.probs != laws[0].probs for law in laws[1:]):
        logger.error("Маргиналы распределения различаются")
        raise PreconditionFailed("Проверка симметризации требует одинаковых маргиналов")

    symmetric = symmetrize(d)
    lhs = objective(d, cost, unc).value
    rhs = objective(symmetric, cost, unc).value
    slack = d.tol(DEFAULT_TOLERANCES.jm if tol is None else tol) * max(1, abs(lhs))
    improved = rhs <= lhs + slack
    logger.info(f"Симметризация: {format_number(lhs)} -> {format_number(rhs)}")
    return SymmetrizationCheck(lhs=lhs, rhs=rhs, improved=improved, symmetrized=symmetric)


def expected_value(n, k, variance):
    """Значение k(n-k)/(n-1)·Var для совместной смеси с корреляцией P*_n"""
    return Fraction(k * (n - k), n - 1) * variance if not isinstance(variance, float) else (
        k * (n - k) / (n - 1) * variance
    )


@dataclass
class OptimalityCheck:
    """
    Проверка одного варианта множества неопределенности.

    Attributes:
        label (str): all или card:k
        k (int): Мощность, на которой достигается максимум (для all это floor(n/2))
        value: Оптимум ЛП
        expected: k(n-k)/(n-1)·Var
        value_ok (bool): Совпадение значений
        corr_error (float): max |corr - P*_n|
        corr_ok (bool): Совпадение корреляций (None, если минимизатор не единственен)
        unique (bool): Единственна ли корреляция минимизатора
    """
    label: str
    k: int
    value: object
    expected: object
    value_ok: bool
    corr_error: float
    corr_ok: Optional[bool]
    unique: bool

    @property
    def holds(self):
        return self.value_ok and self.corr_ok is not False

    def to_dict(self):
        return {
            "uncertainty": self.label,
            "k": self.k,
            "value": format_number(self.value),
            "expected": format_number(self.expected),
            "value_ok": self.value_ok,
            "corr_error": self.corr_error,
            "corr_ok": self.corr_ok,
            "unique": self.unique,
        }


@dataclass
class OptimalityReport:
    """
    Результат проверки оптимальности P*_n.

    Attributes:
        n (int): Размерность
        variance: Дисперсия маргинала
        checks (list): Проверки по вариантам множества неопределенности
    """
    n: int
    variance: object
    checks: List[OptimalityCheck] = field(default_factory=list)

    @property
    def holds(self):
        return all(check.holds for check in self.checks)

    def to_dict(self):
        return {
            "n": self.n,
            "variance": format_number(self.variance),
            "holds": self.holds,
            "checks": [check.to_dict() for check in self.checks],
        }


def verify_exchangeable_optimality(marginal, n, k_values=(), mode=None, caps=DEFAULT_CAPS, tol=None):
    """
    Проверка, что минимизатор минимакс-задачи для n одинаковых центрированных
    маргиналов имеет корреляцию P*_n, а значение равно k(n-k)/(n-1)·Var.

    Для k из {1, n-1, n} минимизатор не единственен: проверяется только значение.

    Args:
        marginal (UnivariateDiscrete): Общий маргинал
        n (int): Размерность (не меньше 3)
        k_values (iterable): Мощности для вариантов card:k
        mode (NumberMode): Числовой режим
        caps (Caps): Пределы размеров
        tol (float): Допуск сравнения корреляций

    Returns:
        OptimalityReport: Результаты проверок
    """
    mode = NumberMode.parse(mode or marginal.mode)
    exact = mode is NumberMode.RATIONAL
    tol = DEFAULT_TOLERANCES.corr if tol is None else tol
    if n < 3:
        raise PreconditionFailed(f"Требуется n >= 3, получено {n}")
    mean, variance = marginal.mean(), marginal.variance()
    if abs(mean) > (0 if exact else DEFAULT_TOLERANCES.jm):
        logger.error(f"Маргинал не центрирован: среднее {mean}")
        raise PreconditionFailed(f"Маргинал должен иметь нулевое среднее, получено {format_number(mean)}")
    if variance <= 0:
        raise PreconditionFailed("Маргинал должен иметь положительную дисперсию")
    feasibility = solve_jm_feasibility([marginal] * n, mode=mode, caps=caps)
    if not feasibility:
        logger.error(f"Маргинал не является {n}-совместно смешиваемым")
        raise PreconditionFailed(f"Маргинал не является {n}-совместно смешиваемым")

    target = to_float_array(equicorrelation(n))
    report = OptimalityReport(n=n, variance=variance)
    variants = [(UncertaintySpec.all_subsets(n), n // 2)]
    for k in k_values:
        if not 1 <= k <= n:
            raise BadSubset(f"Мощность {k} вне [1, {n}]")
        variants.append((UncertaintySpec.fixed_cardinality(n, k), k))

    for unc, k in variants:
        solution = solve_minimax([marginal] * n, unc, mode=mode, caps=caps)
        expected = expected_value(n, k, variance)
        value_slack = 0 if exact and solution.lp.mode is NumberMode.RATIONAL else tol * max(1, abs(float(expected)))
        value_ok = bool(abs(solution.value - expected) <= value_slack)
        corr_error = float(np.nanmax(np.abs(solution.corr - target)))
        unique = unc.variant == "all" or k not in (1, n - 1, n)
        corr_ok = bool(corr_error <= tol) if unique else None
        report.checks.append(OptimalityCheck(
            label=unc.label(), k=k, value=solution.value, expected=expected,
            value_ok=value_ok, corr_error=corr_error, corr_ok=corr_ok, unique=unique,
        ))
        logger.info(
            f"{unc.label()}: значение {format_number(solution.value)} (ожидалось {format_number(expected)}), "
            f"отклонение корреляции {corr_error:.2e}"
        )
    return report


@dataclass(frozen=True)
class PairCostIdentity:
    """
    max_{|K|=2} E[(Σ_K X)²] и σ² + 1 + 2σ·max(ρ12, ρ13).

    Attributes:
        lhs: Максимум по парам
        rhs: Правая часть
        holds (bool): Совпадение
    """
    lhs: float
    rhs: float
    holds: bool

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


def pair_cost_identity(variances, corr, tol=1e-12):
    """
    Для центрированного вектора с дисперсиями (σ², 1, 1), σ > 3, максимум
    парных стоимостей достигается на парах с первой координатой.

    Args:
        variances (sequence): Дисперсии (σ², 1, 1)
        corr (array-like): Корреляционная матрица 3x3
        tol (float): Допуск сравнения

    Returns:
        PairCostIdentity: Обе части и результат сравнения
    """
    variances = np.asarray(variances, dtype=float)
    corr = np.asarray(corr, dtype=float)
    if variances.shape != (3,) or corr.shape != (3, 3):
        raise DimMismatch(f"Ожидались 3 дисперсии и матрица 3x3, получено {variances.shape}, {corr.shape}")
    if not np.allclose(variances[1:], 1.0):
        raise PreconditionFailed(f"Дисперсии второй и третьей координат должны быть равны 1: {variances[1:]}")
    sigma = float(np.sqrt(variances[0]))
    if sigma <= 3:
        raise PreconditionFailed(f"Требуется σ > 3, получено {sigma}")
    scale = np.sqrt(variances)
    model = CovModel(mean=np.zeros(3), cov=corr * np.outer(scale, scale))
    lhs = max(cost_from_cov(model, pair) for pair in ((0, 1), (0, 2), (1, 2)))
    rhs = sigma ** 2 + 1 + 2 * sigma * max(corr[0, 1], corr[0, 2])
    return PairCostIdentity(lhs=float(lhs), rhs=float(rhs), holds=bool(abs(lhs - rhs) <= tol * max(1.0, abs(rhs))))
