"""
Разложение конечной совместной смеси в линейную комбинацию бинарных
мультиномиальных векторов по уровням частичных сумм
"""

import math
from dataclasses import dataclass
from typing import Tuple

import pandas as pd

from ..config import DEFAULT_TOLERANCES
from ..core.distribution import DiscreteJoint, is_joint_mix, make_joint
from ..core.numeric import NumberMode, format_number, to_number
from ..exceptions import NotJointMix, InconsistentComponents, InfiniteSupportUnsupported
from ..utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class BinaryMultinomialDecomposition:
    """
    Разложение X = Σ_k c_k Y_k, где каждое Y_k является функцией атома
    со значениями в единичных векторах {0,1}^n.

    Attributes:
        dim (int): Размерность
        atoms (tuple): Атомы исходного распределения
        probs (tuple): Вероятности атомов
        coefficients (tuple): Коэффициенты c_k
        components (tuple): Для каждого k кортеж векторов Y_k(атом) по атомам
        shift: Сдвиг m
        levels (tuple): Уровни частичных сумм v_0 < ... < v_K
        mode (NumberMode): Числовой режим
    """
    dim: int
    atoms: Tuple[Tuple, ...]
    probs: Tuple
    coefficients: Tuple
    components: Tuple[Tuple[Tuple[int, ...], ...], ...]
    shift: object
    levels: Tuple
    mode: NumberMode

    def __len__(self):
        return len(self.coefficients)

    def component_law(self, k):
        """
        Распределение k-й компоненты Y_k.

        Args:
            k (int): Номер компоненты

        Returns:
            DiscreteJoint: Закон Y_k
        """
        values = self.components[k]
        return make_joint(list(zip(values, self.probs)), dim=self.dim, mode=self.mode)

    def to_dict(self):
        return {
            "dim": self.dim,
            "shift": format_number(self.shift),
            "levels": [format_number(v) for v in self.levels],
            "coefficients": [format_number(c) for c in self.coefficients],
            "atoms": [
                {
                    "x": [format_number(v) for v in atom],
                    "p": format_number(prob),
                    "components": [list(component[a]) for component in self.components],
                }
                for a, (atom, prob) in enumerate(zip(self.atoms, self.probs))
            ],
            "number_mode": self.mode.value,
        }

    def to_frames(self):
        """
        Таблицы компонент (pandas.DataFrame): строка на атом.

        Returns:
            list: Таблица для каждой компоненты
        """
        frames = []
        for coefficient, component in zip(self.coefficients, self.components):
            rows = []
            for a, (atom, prob) in enumerate(zip(self.atoms, self.probs)):
                row = {"atom": a, "p": str(format_number(prob)), "coefficient": str(format_number(coefficient))}
                row.update({f"x{i}": str(format_number(v)) for i, v in enumerate(atom)})
                row.update({f"y{i}": v for i, v in enumerate(component[a])})
                rows.append(row)
            frames.append(pd.DataFrame(rows))
        return frames


def _shift_for(points, mode):
    low = min(v for point in points for v in point)
    if low > 0:
        return to_number(0, mode)
    return to_number(math.floor(low) - 1, mode)


def _snap_levels(values, exact, tol):
    """Сортировка уровней с объединением значений, отличающихся не более чем на tol (режим float)"""
    ordered = sorted(set(values))
    if exact:
        return ordered, {v: v for v in ordered}
    levels, snap = [], {}
    for v in ordered:
        if levels and v - levels[-1] <= tol * max(1.0, abs(v)):
            snap[v] = levels[-1]
        else:
            levels.append(v)
            snap[v] = v
    return levels, snap


def binary_multinomial_decompose(d, tol=None):
    """
    Разложение совместной смеси с конечным носителем.

    Координаты сдвигаются на m (m = 0, если все координаты положительны,
    иначе m = floor(min) - 1). По частичным суммам S_i сдвинутых атомов
    строятся уровни v_0 < ... < v_K, компоненты
        Y_{k,i} = 1{S_i >= v_k} - 1{S_{i-1} >= v_k},
    коэффициенты v_k - v_{k-1}, а сдвиг дает n слагаемых m·e_i.

    Args:
        d (DiscreteJoint): Совместная смесь
        tol (float): Допуск для объединения уровней в режиме float

    Returns:
        BinaryMultinomialDecomposition: Разложение
    """
    if not isinstance(d, DiscreteJoint):
        logger.error(f"Разложение определено только для конечного носителя, получено {type(d).__name__}")
        raise InfiniteSupportUnsupported(
            f"Разложение определено только для конечных дискретных распределений, получено {type(d).__name__}"
        )
    if not is_joint_mix(d):
        logger.error("Распределение не является совместной смесью")
        raise NotJointMix("Разложение применимо только к совместным смесям")

    exact = d.is_rational
    tol = DEFAULT_TOLERANCES.jm if tol is None else tol
    n = d.dim
    shift = _shift_for(d.points, d.mode)

    partial_sums = []
    for point in d.points:
        sums = [0 * shift]
        for v in point:
            sums.append(sums[-1] + (v - shift))
        partial_sums.append(sums)

    levels, snap = _snap_levels([s for sums in partial_sums for s in sums], exact, tol)
    partial_sums = [[snap[s] for s in sums] for sums in partial_sums]

    coefficients, components = [], []
    for k in range(1, len(levels)):
        level = levels[k]
        component = []
        for sums in partial_sums:
            vector = tuple(int(sums[i] >= level) - int(sums[i - 1] >= level) for i in range(1, n + 1))
            if sorted(vector) != [0] * (n - 1) + [1]:
                raise InconsistentComponents(f"Компонента уровня {format_number(level)} не является единичным вектором: {vector}")
            component.append(vector)
        coefficients.append(level - levels[k - 1])
        components.append(tuple(component))

    if shift != 0:
        for i in range(n):
            unit = tuple(int(j == i) for j in range(n))
            coefficients.append(shift)
            components.append(tuple(unit for _ in d.points))

    decomposition = BinaryMultinomialDecomposition(
        dim=n,
        atoms=d.points,
        probs=d.probs,
        coefficients=tuple(coefficients),
        components=tuple(components),
        shift=shift,
        levels=tuple(levels),
        mode=d.mode,
    )
    _verify_recomposition(decomposition, tol)
    logger.info(f"Разложение: {len(coefficients)} компонент, сдвиг {format_number(shift)}")
    return decomposition


def _evaluate(dec):
    """Атомы Σ_k c_k Y_k(атом)"""
    values = []
    for a in range(len(dec.atoms)):
        total = [0 * dec.shift] * dec.dim
        for coefficient, component in zip(dec.coefficients, dec.components):
            if len(component) != len(dec.atoms):
                raise InconsistentComponents("Число значений компоненты не совпадает с числом атомов")
            vector = component[a]
            if len(vector) != dec.dim or sorted(vector) != [0] * (dec.dim - 1) + [1]:
                raise InconsistentComponents(f"Значение компоненты {vector} не является единичным вектором")
            for i, bit in enumerate(vector):
                if bit:
                    total[i] = total[i] + coefficient
        values.append(tuple(total))
    return values


def _verify_recomposition(dec, tol):
    exact = dec.mode is NumberMode.RATIONAL
    for atom, value in zip(dec.atoms, _evaluate(dec)):
        for original, rebuilt in zip(atom, value):
            error = abs(original - rebuilt)
            if error > (0 if exact else max(1e-12, tol) * max(1.0, abs(original))):
                logger.error(f"Атом {atom} восстановлен как {value}")
                raise InconsistentComponents(f"Атом {atom} восстановлен как {value}")


def recompose(dec):
    """
    Восстановление распределения по разложению.

    Args:
        dec (BinaryMultinomialDecomposition): Разложение

    Returns:
        DiscreteJoint: Распределение Σ_k c_k Y_k
    """
    if len(dec.coefficients) != len(dec.components):
        raise InconsistentComponents("Число коэффициентов не совпадает с числом компонент")
    values = _evaluate(dec)
    return make_joint(list(zip(values, dec.probs)), dim=dec.dim, mode=dec.mode)
