"""
Конечные дискретные совместные распределения: представление, маргиналы,
независимая копия, перестановки, моменты и структурные предикаты JM и
перестановочности
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .numeric import NumberMode, to_number, as_array, tolerance_for, format_number
from ..config import DEFAULT_TOLERANCES, DEFAULT_CAPS
from ..exceptions import (
    NegativeProb, MassNotOne, DimMismatch, IndexOutOfRange,
    BadProbabilityVector, GridTooLarge,
)
from ..utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class UnivariateDiscrete:
    """
    Одномерное дискретное распределение с конечным носителем.

    Attributes:
        support (tuple): Строго возрастающие значения носителя
        probs (tuple): Вероятности значений
        mode (NumberMode): Числовой режим
    """
    support: Tuple
    probs: Tuple
    mode: NumberMode = NumberMode.FLOAT

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise DimMismatch(
                f"Длины носителя и вероятностей различаются: {len(self.support)} != {len(self.probs)}"
            )
        if not self.support:
            raise BadProbabilityVector("Пустой носитель")
        for left, right in zip(self.support, self.support[1:]):
            if not left < right:
                raise BadProbabilityVector(f"Носитель не возрастает строго: {left} >= {right}")
        tol = tolerance_for(self.mode, DEFAULT_TOLERANCES.mass)
        if any(p < -tol for p in self.probs):
            raise NegativeProb(f"Отрицательная вероятность в {self.probs}")
        total = sum(self.probs)
        if abs(total - 1) > tol * max(1, len(self.probs)):
            raise MassNotOne(f"Суммарная масса {total} != 1")

    @classmethod
    def from_values(cls, values, probs, mode=NumberMode.FLOAT):
        """
        Построение распределения из неупорядоченных значений (с объединением повторов).

        Args:
            values (list): Значения
            probs (list): Вероятности
            mode (NumberMode): Числовой режим

        Returns:
            UnivariateDiscrete: Распределение
        """
        mode = NumberMode.parse(mode)
        if len(values) != len(probs):
            raise DimMismatch(f"Длины значений и вероятностей различаются: {len(values)} != {len(probs)}")
        merged = {}
        for value, prob in zip(values, probs):
            value = to_number(value, mode)
            merged[value] = merged.get(value, 0) + to_number(prob, mode)
        support = tuple(sorted(v for v, p in merged.items() if p != 0))
        return cls(support=support, probs=tuple(merged[v] for v in support), mode=mode)

    @classmethod
    def uniform(cls, values, mode=NumberMode.FLOAT):
        """Равномерное распределение на наборе значений"""
        mode = NumberMode.parse(mode)
        share = to_number(Fraction(1, len(values)), mode)
        return cls.from_values(list(values), [share] * len(values), mode)

    def mean(self):
        """Математическое ожидание"""
        return sum(v * p for v, p in zip(self.support, self.probs))

    def variance(self):
        """Дисперсия"""
        m = self.mean()
        return sum((v - m) * (v - m) * p for v, p in zip(self.support, self.probs))

    def cdf(self, t):
        """Функция распределения P(X <= t)"""
        return sum(p for v, p in zip(self.support, self.probs) if v <= t)

    def to_dict(self):
        return {
            "support": [format_number(v) for v in self.support],
            "probs": [format_number(p) for p in self.probs],
        }


@dataclass(frozen=True)
class DiscreteJoint:
    """
    Конечное дискретное распределение на R^n.

    Атомы хранятся в лексикографическом порядке, без повторов и без нулевых масс;
    нормализацию выполняет validate().

    Attributes:
        dim (int): Размерность n
        points (tuple): Точки атомов (кортежи длины n)
        probs (tuple): Вероятности атомов
        mode (NumberMode): Числовой режим
    """
    dim: int
    points: Tuple[Tuple, ...]
    probs: Tuple
    mode: NumberMode = NumberMode.FLOAT

    def __len__(self):
        return len(self.points)

    def atoms(self):
        """Итератор пар (точка, вероятность)"""
        return zip(self.points, self.probs)

    def prob_map(self):
        """Словарь {точка: вероятность}"""
        return dict(zip(self.points, self.probs))

    def points_array(self):
        """Массив точек формы (число атомов, n)"""
        return as_array([list(p) for p in self.points], self.mode).reshape(len(self.points), self.dim)

    def probs_array(self):
        """Массив вероятностей"""
        return as_array(list(self.probs), self.mode)

    @property
    def is_rational(self):
        return self.mode is NumberMode.RATIONAL

    def tol(self, value):
        """Допуск с учетом режима (0 для рациональных чисел)"""
        return tolerance_for(self.mode, value)

    def expect(self, func):
        """
        Математическое ожидание функции от вектора.

        Args:
            func (callable): Функция точки

        Returns:
            Число
        """
        return sum(func(point) * prob for point, prob in self.atoms())

    def equals(self, other, tol=None):
        """
        Совпадение распределений (с допуском в режиме float).

        Args:
            other (DiscreteJoint): Другое распределение
            tol (float): Допуск для вероятностей

        Returns:
            bool: Совпадают ли распределения
        """
        if self.dim != other.dim:
            return False
        tol = self.tol(DEFAULT_TOLERANCES.jm if tol is None else tol)
        mine, theirs = self.prob_map(), other.prob_map()
        for key in set(mine) | set(theirs):
            if abs(mine.get(key, 0) - theirs.get(key, 0)) > tol:
                return False
        return True

    def to_dict(self):
        """Словарь в формате JSON-схемы DiscreteJoint"""
        return {
            "dim": self.dim,
            "atoms": [
                {"x": [format_number(v) for v in point], "p": format_number(prob)}
                for point, prob in self.atoms()
            ],
            "number_mode": self.mode.value,
        }


@dataclass(frozen=True)
class MomentSummary:
    """
    Моменты распределения.

    Attributes:
        mean (numpy.ndarray): Вектор средних
        cov (numpy.ndarray): Ковариационная матрица
        corr (numpy.ndarray): Корреляционная матрица (NaN или None там, где дисперсия 0)
        corr_defined (numpy.ndarray): Маска определенных корреляций
    """
    mean: np.ndarray
    cov: np.ndarray
    corr: np.ndarray
    corr_defined: np.ndarray

    def corr_float(self):
        """Корреляции в float64 (NaN для неопределенных)"""
        out = np.full(self.corr.shape, np.nan)
        for (i, j), defined in np.ndenumerate(self.corr_defined):
            if defined:
                out[i, j] = float(self.corr[i, j])
        return out

    def to_dict(self):
        return {
            "mean": [format_number(v) for v in self.mean],
            "cov": [[format_number(v) for v in row] for row in self.cov],
            "corr": [
                [format_number(self.corr[i, j]) if defined else None for j, defined in enumerate(row)]
                for i, row in enumerate(self.corr_defined)
            ],
        }


@dataclass(frozen=True)
class JointMixResult:
    """
    Результат проверки JM.

    Attributes:
        is_joint_mix (bool): Является ли распределение совместной смесью
        center: Центр c (если JM)
        witness (tuple): Пара атомов с различными суммами (если не JM)
    """
    is_joint_mix: bool
    center: Optional[object] = None
    witness: Optional[Tuple] = None

    def __bool__(self):
        return self.is_joint_mix


def _mass_tol(mode, n_atoms, tol):
    base = DEFAULT_TOLERANCES.mass if tol is None else tol
    return tolerance_for(mode, base * max(1, n_atoms))


def validate(d, tol=None):
    """
    Проверка инвариантов и нормализация распределения.

    Повторяющиеся точки объединяются (массы суммируются), атомы с нулевой
    массой удаляются, порядок атомов становится лексикографическим.

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск для суммарной массы (режим float)

    Returns:
        DiscreteJoint: Нормализованное распределение
    """
    if d.dim < 1:
        logger.error(f"Недопустимая размерность {d.dim}")
        raise DimMismatch(f"Размерность должна быть >= 1, получено {d.dim}")
    if len(d.points) != len(d.probs):
        raise DimMismatch(f"Число точек {len(d.points)} != числу вероятностей {len(d.probs)}")

    mode = d.mode
    sign_tol = tolerance_for(mode, DEFAULT_TOLERANCES.mass)
    merged = {}
    for point, prob in zip(d.points, d.probs):
        if len(point) != d.dim:
            logger.error(f"Точка {point} имеет длину {len(point)} вместо {d.dim}")
            raise DimMismatch(f"Точка {point} имеет длину {len(point)}, ожидалось {d.dim}")
        if prob < -sign_tol:
            logger.error(f"Отрицательная вероятность {prob} у точки {point}")
            raise NegativeProb(f"Отрицательная вероятность {prob} у точки {point}")
        key = tuple(point)
        merged[key] = merged.get(key, 0) + prob

    total = sum(merged.values())
    if abs(total - 1) > _mass_tol(mode, len(merged), tol):
        logger.error(f"Суммарная масса {total} != 1")
        raise MassNotOne(f"Суммарная масса {total} != 1")

    keys = sorted(k for k, p in merged.items() if p > 0)
    if len(keys) < len(merged):
        logger.debug(f"Удалено {len(merged) - len(keys)} атомов с нулевой массой")
    return DiscreteJoint(dim=d.dim, points=tuple(keys), probs=tuple(merged[k] for k in keys), mode=mode)


def make_joint(atoms, dim=None, mode=NumberMode.FLOAT, tol=None):
    """
    Построение распределения из пар (точка, вероятность).

    Args:
        atoms (iterable): Пары (точка, вероятность)
        dim (int): Размерность (по умолчанию длина первой точки)
        mode (NumberMode): Числовой режим
        tol (float): Допуск для суммарной массы

    Returns:
        DiscreteJoint: Проверенное распределение
    """
    mode = NumberMode.parse(mode)
    atoms = list(atoms)
    if dim is None:
        if not atoms:
            raise DimMismatch("Пустой список атомов без указанной размерности")
        dim = len(atoms[0][0])
    points = tuple(tuple(to_number(v, mode) for v in point) for point, _ in atoms)
    probs = tuple(to_number(p, mode) for _, p in atoms)
    return validate(DiscreteJoint(dim=dim, points=points, probs=probs, mode=mode), tol=tol)


def uniform_on(points, mode=NumberMode.FLOAT):
    """
    Равномерное распределение на наборе точек.

    Args:
        points (list): Точки (повторы суммируются)
        mode (NumberMode): Числовой режим

    Returns:
        DiscreteJoint: Распределение
    """
    mode = NumberMode.parse(mode)
    share = to_number(Fraction(1, len(points)), mode)
    return make_joint([(p, share) for p in points], mode=mode)


def point_mass(point, mode=NumberMode.FLOAT):
    """Вырожденное распределение в точке"""
    return make_joint([(point, 1)], mode=mode)


def marginal(d, i):
    """
    Маргинальное распределение i-й координаты (нумерация с 0).

    Args:
        d (DiscreteJoint): Распределение
        i (int): Номер координаты

    Returns:
        UnivariateDiscrete: Маргинал
    """
    if not 0 <= i < d.dim:
        logger.error(f"Координата {i} вне диапазона [0, {d.dim})")
        raise IndexOutOfRange(f"Координата {i} вне диапазона [0, {d.dim})")
    masses = {}
    for point, prob in d.atoms():
        masses[point[i]] = masses.get(point[i], 0) + prob
    support = tuple(sorted(masses))
    return UnivariateDiscrete(support=support, probs=tuple(masses[v] for v in support), mode=d.mode)


def marginals(d):
    """Список всех маргиналов"""
    return [marginal(d, i) for i in range(d.dim)]


def product_of(margins, mode=None, cap=None):
    """
    Распределение вектора с независимыми компонентами и заданными маргиналами.

    Args:
        margins (list): Список UnivariateDiscrete
        mode (NumberMode): Числовой режим (по умолчанию из первого маргинала)
        cap (int): Предельное число атомов

    Returns:
        DiscreteJoint: Произведение мер
    """
    mode = NumberMode.parse(mode or margins[0].mode)
    cap = DEFAULT_CAPS.grid if cap is None else cap
    size = math.prod(len(m.support) for m in margins)
    if size > cap:
        logger.error(f"Произведение носителей содержит {size} точек (предел {cap})")
        raise GridTooLarge(f"Произведение носителей содержит {size} точек, предел {cap}")
    points, probs = [], []
    for combo in itertools.product(*[list(zip(m.support, m.probs)) for m in margins]):
        points.append(tuple(v for v, _ in combo))
        probs.append(math.prod(p for _, p in combo))
    joint = DiscreteJoint(dim=len(margins), points=tuple(points), probs=tuple(probs), mode=mode)
    return validate(joint, tol=DEFAULT_TOLERANCES.mass * 10)


def product_independent(d, cap=None):
    """
    Распределение X⊥: независимые компоненты с маргиналами d.

    Args:
        d (DiscreteJoint): Распределение
        cap (int): Предельное число атомов

    Returns:
        DiscreteJoint: Распределение X⊥ на произведении носителей маргиналов
    """
    return product_of(marginals(d), mode=d.mode, cap=cap)


def project(d, indices):
    """
    Распределение подвектора X_A.

    Args:
        d (DiscreteJoint): Распределение
        indices (sequence): Номера координат A

    Returns:
        DiscreteJoint: Распределение X_A
    """
    indices = tuple(indices)
    for i in indices:
        if not 0 <= i < d.dim:
            raise IndexOutOfRange(f"Координата {i} вне диапазона [0, {d.dim})")
    masses = {}
    for point, prob in d.atoms():
        key = tuple(point[i] for i in indices)
        masses[key] = masses.get(key, 0) + prob
    keys = sorted(masses)
    return DiscreteJoint(dim=len(indices), points=tuple(keys), probs=tuple(masses[k] for k in keys), mode=d.mode)


def permute(d, perm):
    """
    Распределение X^π = (X_π(1), ..., X_π(n)).

    Args:
        d (DiscreteJoint): Распределение
        perm (sequence): Перестановка чисел 0..n-1

    Returns:
        DiscreteJoint: Переставленное распределение
    """
    perm = tuple(perm)
    if sorted(perm) != list(range(d.dim)):
        raise DimMismatch(f"{perm} не является перестановкой 0..{d.dim - 1}")
    points = tuple(tuple(point[j] for j in perm) for point in d.points)
    return validate(DiscreteJoint(dim=d.dim, points=points, probs=d.probs, mode=d.mode))


def mixture(components, weights):
    """
    Смесь распределений одной размерности.

    Args:
        components (list): Список DiscreteJoint
        weights (list): Веса смеси

    Returns:
        DiscreteJoint: Смесь
    """
    if len(components) != len(weights):
        raise DimMismatch("Число компонент смеси не совпадает с числом весов")
    dims = {c.dim for c in components}
    if len(dims) != 1:
        raise DimMismatch(f"Компоненты смеси разной размерности: {sorted(dims)}")
    mode = components[0].mode
    points, probs = [], []
    for comp, weight in zip(components, weights):
        weight = to_number(weight, mode)
        for point, prob in comp.atoms():
            points.append(point)
            probs.append(weight * prob)
    joint = DiscreteJoint(dim=dims.pop(), points=tuple(points), probs=tuple(probs), mode=mode)
    return validate(joint)


def symmetrize(d):
    """
    Симметризация: равновзвешенная смесь всех n! перестановок распределения.

    Args:
        d (DiscreteJoint): Распределение

    Returns:
        DiscreteJoint: Перестановочное распределение
    """
    perms = list(itertools.permutations(range(d.dim)))
    share = to_number(Fraction(1, len(perms)), d.mode)
    points, probs = [], []
    for point, prob in d.atoms():
        for perm in perms:
            points.append(tuple(point[j] for j in perm))
            probs.append(prob * share)
    joint = DiscreteJoint(dim=d.dim, points=tuple(points), probs=tuple(probs), mode=d.mode)
    return validate(joint, tol=DEFAULT_TOLERANCES.mass * 10)


def _exact_sqrt(value):
    """Точный квадратный корень из Fraction, если он рационален"""
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def moments(d):
    """
    Вектор средних, ковариации и корреляции распределения.

    Args:
        d (DiscreteJoint): Распределение

    Returns:
        MomentSummary: Моменты (точные в рациональном режиме)
    """
    x = d.points_array()
    p = d.probs_array()
    mean = p @ x
    centered = x - mean
    cov = (centered * p[:, None]).T @ centered
    # Симметрия по построению
    cov = (cov + cov.T) / 2 if not d.is_rational else cov

    n = d.dim
    variance = np.diag(cov)
    corr = np.empty((n, n), dtype=object if d.is_rational else float)
    defined = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            if variance[i] > 0 and variance[j] > 0:
                defined[i, j] = True
                if i == j:
                    corr[i, j] = Fraction(1) if d.is_rational else 1.0
                elif d.is_rational:
                    root = _exact_sqrt(variance[i] * variance[j])
                    corr[i, j] = cov[i, j] / root if root is not None else (
                        float(cov[i, j]) / math.sqrt(float(variance[i] * variance[j]))
                    )
                else:
                    corr[i, j] = cov[i, j] / math.sqrt(variance[i] * variance[j])
            else:
                corr[i, j] = None if d.is_rational else np.nan
    return MomentSummary(mean=mean, cov=cov, corr=corr, corr_defined=defined)


def is_joint_mix(d, tol=None):
    """
    Проверка, что сумма координат почти наверное постоянна: разброс сумм
    по атомам не превосходит tol (абсолютный допуск).

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск для сумм (режим float), по умолчанию 1e-9

    Returns:
        JointMixResult: Результат с центром или парой атомов-свидетелей
    """
    tol = d.tol(DEFAULT_TOLERANCES.jm if tol is None else tol)
    sums = [sum(point) for point in d.points]
    low = min(range(len(sums)), key=lambda k: sums[k])
    high = max(range(len(sums)), key=lambda k: sums[k])
    if sums[high] - sums[low] > tol:
        return JointMixResult(
            is_joint_mix=False,
            witness=((d.points[low], sums[low]), (d.points[high], sums[high])),
        )
    center = sums[0] if d.is_rational else float(np.dot(d.probs_array(), np.asarray(sums, dtype=float)))
    return JointMixResult(is_joint_mix=True, center=center)


def is_exchangeable(d, tol=None):
    """
    Проверка перестановочности по соседним транспозициям (они порождают S_n).

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск для вероятностей

    Returns:
        bool: Перестановочно ли распределение
    """
    tol = d.tol(DEFAULT_TOLERANCES.jm if tol is None else tol)
    masses = d.prob_map()
    for i in range(d.dim - 1):
        for point, prob in d.atoms():
            swapped = list(point)
            swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
            if abs(masses.get(tuple(swapped), 0) - prob) > tol:
                return False
    return True


def _compositions(total, parts):
    """Все векторы из parts неотрицательных целых с суммой total"""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def make_multinomial(k, p, mode=NumberMode.FLOAT):
    """
    Мультиномиальное распределение MN(k, p).

    Args:
        k (int): Число испытаний (>= 1)
        p (list): Вектор вероятностей исходов
        mode (NumberMode): Числовой режим

    Returns:
        DiscreteJoint: Распределение на {x in {0..k}^n : sum x = k}
    """
    mode = NumberMode.parse(mode)
    if int(k) != k or k < 1:
        raise BadProbabilityVector(f"Число испытаний должно быть целым >= 1, получено {k}")
    probs = [to_number(v, mode) for v in p]
    tol = tolerance_for(mode, DEFAULT_TOLERANCES.mass)
    if not probs or any(v < 0 for v in probs) or abs(sum(probs) - 1) > tol * len(probs):
        logger.error(f"Некорректный вектор вероятностей {p}")
        raise BadProbabilityVector(f"Некорректный вектор вероятностей {p}")

    atoms = []
    for counts in _compositions(int(k), len(probs)):
        coef = Fraction(math.factorial(int(k)), math.prod(math.factorial(c) for c in counts))
        mass = to_number(coef, mode) * math.prod(v ** c for v, c in zip(probs, counts))
        if mass != 0:
            atoms.append((counts, mass))
    return make_joint(atoms, dim=len(probs), mode=mode, tol=DEFAULT_TOLERANCES.mass * 10)


def make_orbit_uniform(a, mode=NumberMode.FLOAT):
    """
    Равномерное распределение U_a на всех перестановках вектора a.

    Args:
        a (sequence): Базовый вектор
        mode (NumberMode): Числовой режим

    Returns:
        DiscreteJoint: Распределение U_a
    """
    mode = NumberMode.parse(mode)
    base = tuple(to_number(v, mode) for v in a)
    orbit = sorted(set(itertools.permutations(base)))
    return uniform_on(orbit, mode=mode)


def make_alternating(n, a=1, mode=NumberMode.FLOAT):
    """
    Чередующаяся совместная смесь: равновероятные точки ((-1)^i a)_i и (-(-1)^i a)_i.

    При четном n это совместная смесь с центром 0, у которой компоненты
    с одинаковой четностью номеров комонотонны.

    Args:
        n (int): Размерность
        a: Амплитуда
        mode (NumberMode): Числовой режим

    Returns:
        DiscreteJoint: Распределение
    """
    mode = NumberMode.parse(mode)
    a = to_number(a, mode)
    first = tuple(a if i % 2 == 0 else -a for i in range(n))
    second = tuple(-v for v in first)
    return uniform_on([first, second], mode=mode)


def dense_grid(d, cap=None):
    """
    Плотный массив вероятностей на произведении маргинальных носителей.

    Args:
        d (DiscreteJoint): Распределение
        cap (int): Предельное число точек сетки

    Returns:
        tuple: (список носителей, массив вероятностей формы (m_1, ..., m_n))
    """
    cap = DEFAULT_CAPS.grid if cap is None else cap
    supports = [marginal(d, i).support for i in range(d.dim)]
    shape = tuple(len(s) for s in supports)
    size = math.prod(shape)
    if size > cap:
        logger.error(f"Сетка содержит {size} точек (предел {cap})")
        raise GridTooLarge(f"Сетка содержит {size} точек, предел {cap}")
    lookup = [{v: k for k, v in enumerate(s)} for s in supports]
    grid = np.empty(shape, dtype=object) if d.is_rational else np.zeros(shape, dtype=float)
    if d.is_rational:
        grid.fill(Fraction(0))
    for point, prob in d.atoms():
        grid[tuple(lookup[i][v] for i, v in enumerate(point))] += prob
    return supports, grid
