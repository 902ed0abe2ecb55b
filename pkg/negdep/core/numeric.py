"""
Числовые режимы: двоичная арифметика float и точные рациональные числа
"""

from enum import Enum
from fractions import Fraction
from numbers import Rational

import numpy as np


class NumberMode(str, Enum):
    """Режим вычислений"""
    FLOAT = "float"
    RATIONAL = "rational"

    @classmethod
    def parse(cls, value):
        """
        Разбор режима из строки.

        Args:
            value (str или NumberMode): Значение

        Returns:
            NumberMode: Режим
        """
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"Неизвестный числовой режим: {value!r} (ожидается float или rational)")


def to_number(value, mode):
    """
    Приведение значения к числу выбранного режима.

    Строки вида "num/den" допускаются в обоих режимах. В рациональном режиме
    float переводится через десятичную запись (0.1 -> 1/10).

    Args:
        value: int, float, Fraction или строка
        mode (NumberMode): Режим

    Returns:
        float или Fraction
    """
    mode = NumberMode.parse(mode)
    if mode is NumberMode.RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, np.integer)):
            return Fraction(int(value))
        if isinstance(value, (float, np.floating)):
            if not np.isfinite(value):
                raise ValueError(f"Нечисловое значение: {value!r}")
            return Fraction(repr(float(value)))
        if isinstance(value, str):
            return Fraction(value.strip())
        if isinstance(value, Rational):
            return Fraction(value.numerator, value.denominator)
        raise ValueError(f"Невозможно привести к рациональному числу: {value!r}")

    if isinstance(value, str):
        result = float(Fraction(value.strip()))
    else:
        result = float(value)
    if np.isnan(result):
        raise ValueError("Значение NaN недопустимо")
    return result


def format_number(value):
    """
    Представление числа для JSON: Fraction -> "num/den", остальное -> float.

    Args:
        value: Число

    Returns:
        str или float или int
    """
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def is_exact(value):
    """Является ли значение точным рациональным числом"""
    return isinstance(value, Fraction)


def sign(value, tol):
    """
    Знак числа с допуском: значения в [-tol, tol] считаются нулем.

    Args:
        value: Число
        tol (float): Допуск (для Fraction игнорируется)

    Returns:
        int: -1, 0 или 1
    """
    if is_exact(value):
        tol = 0
    if value > tol:
        return 1
    if value < -tol:
        return -1
    return 0


def as_array(values, mode):
    """
    Массив numpy для режима: object-массив Fraction или float64.

    Args:
        values: Последовательность (возможно вложенная)
        mode (NumberMode): Режим

    Returns:
        numpy.ndarray
    """
    mode = NumberMode.parse(mode)
    if mode is NumberMode.RATIONAL:
        arr = np.array(values, dtype=object)
        flat = arr.reshape(-1)
        for idx, item in enumerate(flat):
            flat[idx] = to_number(item, mode)
        return flat.reshape(arr.shape)
    return np.asarray(values, dtype=float)


def zeros(shape, mode):
    """Нулевой массив в заданном режиме"""
    if NumberMode.parse(mode) is NumberMode.RATIONAL:
        arr = np.empty(shape, dtype=object)
        arr.fill(Fraction(0))
        return arr
    return np.zeros(shape, dtype=float)


def tolerance_for(mode, tol):
    """Фактический допуск: 0 в рациональном режиме"""
    return 0 if NumberMode.parse(mode) is NumberMode.RATIONAL else tol


def to_float_array(values):
    """Перевод массива (в том числе object с Fraction) в float64"""
    arr = np.asarray(values)
    if arr.dtype == object:
        return np.vectorize(float, otypes=[float])(arr) if arr.size else arr.astype(float)
    return arr.astype(float)
