"""
Функции стоимости и робастная целевая функция sup_{μ in M} Σ_K μ(K) E[c_K(X)]
для дискретных распределений и ковариационных моделей
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from ..core.distribution import DiscreteJoint, moments
from ..core.numeric import to_number, format_number
from ..exceptions import UnsupportedCost, BadProbabilityVector
from ..models.families import CovModel
from ..utils.logger import get_logger
from .uncertainty import check_subset

logger = get_logger(__name__)

QUADRATIC = "quadratic"
VARIANCE = "variance"
HARMONIC = "harmonic"
CONVEX_TABULATED = "convex_tabulated"

COST_ALIASES = {
    "quad": QUADRATIC, QUADRATIC: QUADRATIC,
    "var": VARIANCE, VARIANCE: VARIANCE,
    HARMONIC: HARMONIC,
    "convex": CONVEX_TABULATED, CONVEX_TABULATED: CONVEX_TABULATED,
}


@dataclass(frozen=True)
class CostSpec:
    """
    Функция стоимости подмножества K.

    Attributes:
        kind (str): quadratic (Σ_K x)², variance (Σ_K x - E Σ_K X)²,
            harmonic -Σ_{i,j in K} (x_i - x_j)², convex_tabulated f(Σ_K x)
        table (tuple): Пары (s, f(s)) для convex_tabulated
    """
    kind: str = QUADRATIC
    table: Tuple[Tuple[object, object], ...] = ()

    def __post_init__(self):
        if self.kind not in (QUADRATIC, VARIANCE, HARMONIC, CONVEX_TABULATED):
            raise UnsupportedCost(f"Неизвестная функция стоимости: {self.kind}")
        if self.kind == CONVEX_TABULATED:
            points = sorted(self.table)
            if len(points) < 1:
                raise BadProbabilityVector("Пустая таблица значений функции")
            if not is_midpoint_convex(points):
                raise UnsupportedCost("Табличная функция не выпукла по середине отрезков")

    @classmethod
    def parse(cls, text):
        """Разбор имени стоимости (quad, var, harmonic)"""
        kind = COST_ALIASES.get(text.strip().lower())
        if kind is None or kind == CONVEX_TABULATED:
            raise UnsupportedCost(f"Неизвестная функция стоимости: {text}")
        return cls(kind=kind)

    @property
    def linear_in_coupling(self):
        """Стоимость задается линейным функционалом от совместного закона"""
        return self.kind in (QUADRATIC, VARIANCE, HARMONIC)

    def f(self, s):
        """Значение табличной функции в точке s"""
        lookup = dict(self.table)
        if s not in lookup:
            raise UnsupportedCost(f"Значение функции в точке {s} не задано")
        return lookup[s]

    def atom_cost(self, x, subset, means=None):
        """
        Стоимость c_K(x) в точке.

        Для variance используется центрирование по средним: E[c_K(X)] равно
        дисперсии суммы по K.

        Args:
            x (sequence): Точка
            subset (tuple): Подмножество K
            means (sequence): Средние координат (для variance)

        Returns:
            Число
        """
        total = sum((x[i] for i in subset), 0 * x[0])
        if self.kind == QUADRATIC:
            return total * total
        if self.kind == VARIANCE:
            center = sum((means[i] for i in subset), 0 * x[0])
            return total * total - center * center
        if self.kind == HARMONIC:
            squares = sum((x[i] * x[i] for i in subset), 0 * x[0])
            return -2 * len(subset) * squares + 2 * total * total
        return self.f(total)

    def to_dict(self):
        data = {"kind": self.kind}
        if self.table:
            data["table"] = [[format_number(s), format_number(v)] for s, v in self.table]
        return data


def is_midpoint_convex(points):
    """
    Выпуклость табличной функции: наклоны соседних отрезков не убывают.

    Args:
        points (list): Отсортированные пары (s, f(s))

    Returns:
        bool: Выпукла ли функция на сетке
    """
    exact = not any(isinstance(v, float) for pair in points for v in pair)
    wrap = Fraction if exact else float
    slopes = [
        wrap(f2 - f1) / wrap(s2 - s1)
        for (s1, f1), (s2, f2) in zip(points, points[1:])
    ]
    tol = 0 if exact else 1e-12
    return all(a <= b + tol for a, b in zip(slopes, slopes[1:]))


def cost_from_cov(model, subset):
    """
    E[(Σ_{i in K} X_i)²] = (1_Kᵀμ)² + 1_KᵀΣ1_K.

    Args:
        model (CovModel): Модель
        subset (iterable): Подмножество K (индексы с 0)

    Returns:
        Число (точное для object-матриц)
    """
    subset = check_subset(subset, model.dim)
    if not subset:
        return 0
    mean = np.asarray(model.mean)
    cov = np.asarray(model.cov)
    first = sum(mean[i] for i in subset)
    second = sum(cov[i, j] for i in subset for j in subset)
    return first * first + second


def _cov_subset_cost(model, subset, cost):
    if not subset:
        return 0
    cov = np.asarray(model.cov)
    mean = np.asarray(model.mean)
    if cost.kind == QUADRATIC:
        return cost_from_cov(model, subset)
    if cost.kind == VARIANCE:
        return sum(cov[i, j] for i in subset for j in subset)
    if cost.kind == HARMONIC:
        squares = sum(cov[i, i] + mean[i] * mean[i] for i in subset)
        return -2 * len(subset) * squares + 2 * cost_from_cov(model, subset)
    raise UnsupportedCost("Табличная стоимость не вычисляется по ковариации")


def subset_expectation(d, subset, cost, means=None):
    """
    E[c_K(X)] для дискретного распределения.

    Args:
        d (DiscreteJoint): Распределение
        subset (tuple): Подмножество K
        cost (CostSpec): Стоимость
        means (sequence): Средние (по умолчанию из d)

    Returns:
        Число
    """
    subset = check_subset(subset, d.dim)
    if cost.kind == VARIANCE and means is None:
        means = list(moments(d).mean)
    if not subset:
        return cost.f(to_number(0, d.mode)) if cost.kind == CONVEX_TABULATED else 0 * d.probs[0]
    return d.expect(lambda point: cost.atom_cost(point, subset, means))


@dataclass(frozen=True)
class ObjectiveValue:
    """
    Значение робастной целевой функции.

    Attributes:
        value: sup по множеству неопределенности
        argmax (tuple): Подмножество K (для точечных мер) или номер меры
        per_measure (tuple): Значения для всех элементов множества
    """
    value: object
    argmax: object
    per_measure: Tuple = ()
    subsets: Optional[Tuple] = None

    def to_dict(self):
        return {
            "value": format_number(self.value),
            "argmax": list(self.argmax) if isinstance(self.argmax, tuple) else self.argmax,
        }


def objective(target, cost, unc):
    """
    Робастная целевая функция sup_{μ in M} Σ_K μ(K) E[c_K(X)].

    Args:
        target (DiscreteJoint или CovModel): Распределение или ковариационная модель
        cost (CostSpec): Стоимость
        unc (UncertaintySpec): Множество неопределенности

    Returns:
        ObjectiveValue: Значение и аргмаксимум
    """
    if isinstance(target, CovModel):
        if not cost.linear_in_coupling:
            raise UnsupportedCost("Для ковариационной модели допустимы quadratic, variance, harmonic")
        evaluate = lambda subset: _cov_subset_cost(target, check_subset(subset, target.dim), cost)
    elif isinstance(target, DiscreteJoint):
        means = list(moments(target).mean) if cost.kind == VARIANCE else None
        evaluate = lambda subset: subset_expectation(target, subset, cost, means)
    else:
        raise TypeError(f"Неподдерживаемый тип: {type(target).__name__}")

    if unc.n != target.dim:
        logger.error(f"Размерность множества неопределенности {unc.n} != {target.dim}")
        raise BadProbabilityVector(f"Размерность множества неопределенности {unc.n} != {target.dim}")

    cache = {}
    values = []
    for measure in unc.family():
        total = 0
        for subset, weight in measure.weights:
            if subset not in cache:
                cache[subset] = evaluate(subset)
            total = total + weight * cache[subset]
        values.append(total)

    family = unc.family()
    best = max(range(len(values)), key=lambda k: values[k])
    if unc.variant == "explicit":
        argmax = best
    else:
        argmax = family[best].subsets()[0]
    return ObjectiveValue(
        value=values[best],
        argmax=argmax,
        per_measure=tuple(values),
        subsets=tuple(tuple(m.subsets()) for m in family),
    )
