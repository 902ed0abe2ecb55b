"""
Вспомогательные конструкции на конечных решетках: верхние множества
конечного частично упорядоченного множества точек и таблицы
ортантных вероятностей на сетке маргинальных носителей
"""

import numpy as np

from ..config import DEFAULT_CAPS
from ..core.numeric import zeros
from ..exceptions import EnumerationTooLarge
from ..utils.logger import get_logger

logger = get_logger(__name__)


def dominates(p, q):
    """p >= q покомпонентно"""
    return all(a >= b for a, b in zip(p, q))


def upper_sets(points, cap=None, include_trivial=False):
    """
    Перечисление верхних множеств конечного множества точек с покомпонентным порядком.

    Точки обрабатываются по убыванию суммы координат: это линейное расширение
    обратного порядка, поэтому к моменту решения о точке все строго большие
    точки уже рассмотрены. Точку можно включить, только если включены все
    строго большие.

    Args:
        points (list): Различные точки (кортежи одной длины)
        cap (int): Предельное число верхних множеств
        include_trivial (bool): Включать пустое множество и все множество

    Returns:
        list: Верхние множества в виде отсортированных кортежей индексов точек
    """
    cap = DEFAULT_CAPS.upper_sets if cap is None else cap
    count = len(points)
    order = sorted(range(count), key=lambda k: (-sum(points[k]), points[k]))
    above = []
    for k in order:
        mask = 0
        for other in range(count):
            if other != k and dominates(points[other], points[k]):
                mask |= 1 << other
        above.append(mask)

    full = (1 << count) - 1
    result = []
    stack = [(0, 0)]
    while stack:
        depth, chosen = stack.pop()
        if depth == count:
            if include_trivial or chosen not in (0, full):
                result.append(tuple(k for k in range(count) if chosen >> k & 1))
                if len(result) > cap:
                    logger.error(f"Число верхних множеств превышает предел {cap}")
                    raise EnumerationTooLarge(f"Число верхних множеств превышает предел {cap}")
            continue
        k = order[depth]
        stack.append((depth + 1, chosen))
        if chosen & above[depth] == above[depth]:
            stack.append((depth + 1, chosen | 1 << k))
    result.sort(key=lambda s: (len(s), s))
    return result


def indicator_matrix(sets, size, mode):
    """
    Матрица индикаторов: строка на множество, столбец на точку.

    Args:
        sets (list): Множества индексов
        size (int): Число точек
        mode (NumberMode): Числовой режим

    Returns:
        numpy.ndarray: Матрица из 0 и 1
    """
    matrix = zeros((len(sets), size), mode)
    for row, members in enumerate(sets):
        for k in members:
            matrix[row, k] = 1
    return matrix


def _cumsum_all(grid, reverse=False):
    out = grid
    for axis in range(grid.ndim):
        if reverse:
            out = np.flip(np.cumsum(np.flip(out, axis=axis), axis=axis), axis=axis)
        else:
            out = np.cumsum(out, axis=axis)
    return out


def lower_orthant_table(grid, mode):
    """
    Таблица P(X <= t) на расширенной сетке.

    Индекс 0 по каждой оси соответствует порогу ниже минимума носителя,
    индекс k+1 соответствует k-му значению носителя.

    Args:
        grid (numpy.ndarray): Плотный массив вероятностей
        mode (NumberMode): Числовой режим

    Returns:
        numpy.ndarray: Таблица формы (m_1+1, ..., m_n+1)
    """
    table = zeros(tuple(s + 1 for s in grid.shape), mode)
    table[tuple(slice(1, None) for _ in grid.shape)] = _cumsum_all(grid)
    return table


def upper_orthant_table(grid, mode):
    """
    Таблица P(X > t) на расширенной сетке (та же индексация, что у lower_orthant_table).

    Args:
        grid (numpy.ndarray): Плотный массив вероятностей
        mode (NumberMode): Числовой режим

    Returns:
        numpy.ndarray: Таблица формы (m_1+1, ..., m_n+1)
    """
    table = zeros(tuple(s + 1 for s in grid.shape), mode)
    table[tuple(slice(0, -1) for _ in grid.shape)] = _cumsum_all(grid, reverse=True)
    return table


def threshold_at(supports, index):
    """
    Порог t для индекса расширенной сетки.

    Args:
        supports (list): Маргинальные носители
        index (tuple): Индекс в расширенной сетке

    Returns:
        tuple: Пороговый вектор (ниже минимума используется min - 1)
    """
    return tuple(
        support[k - 1] if k > 0 else support[0] - 1
        for support, k in zip(supports, index)
    )
