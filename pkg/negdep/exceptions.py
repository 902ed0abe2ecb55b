"""
Исключения библиотеки NegDep
"""


class NegDepError(Exception):
    """Базовое исключение библиотеки"""


# Распределения

class NegativeProb(NegDepError):
    """Отрицательная вероятность атома"""


class MassNotOne(NegDepError):
    """Суммарная масса распределения не равна 1"""


class DimMismatch(NegDepError, ValueError):
    """Размерность точки не совпадает с размерностью распределения"""


class IndexOutOfRange(NegDepError, IndexError):
    """Номер координаты вне диапазона"""


class BadProbabilityVector(NegDepError, ValueError):
    """Некорректный вектор вероятностей"""


# Ограничения перебора

class GridTooLarge(NegDepError):
    """Сетка превышает допустимый размер"""


class EnumerationTooLarge(NegDepError):
    """Число верхних множеств превышает допустимый предел"""


class SizeCap(NegDepError):
    """Размер задачи ЛП превышает допустимый предел"""


# Линейное программирование

class LpFailure(NegDepError):
    """Решатель ЛП не смог получить оптимум"""


class LpInfeasible(LpFailure):
    """Задача ЛП несовместна"""


class LpUnbounded(LpFailure):
    """Целевая функция задачи ЛП не ограничена"""


class NumericBreakdown(LpFailure):
    """Численная неустойчивость симплекс-метода в режиме float"""


# Построения и разложения

class PreconditionFailed(NegDepError):
    """Нарушено необходимое условие построения"""


class DegenerateInput(NegDepError):
    """Вырожденные входные данные"""


class WrongFamily(NegDepError):
    """Модель не принадлежит требуемому семейству"""


class NotPsd(NegDepError):
    """Матрица не является положительно полуопределенной"""


class NotJointMix(NegDepError):
    """Распределение не является совместной смесью"""


class NotExchangeable(NegDepError):
    """Распределение не является перестановочным"""


class InconsistentComponents(NegDepError):
    """Компоненты разложения несогласованы"""


class InfiniteSupportUnsupported(NegDepError):
    """Бесконечный носитель не поддерживается"""


# Транспорт

class BadSubset(NegDepError, ValueError):
    """Подмножество индексов вне [n]"""


class NotSymmetricUncertainty(NegDepError):
    """Множество неопределенности не замкнуто относительно перестановок"""


class UnsupportedCost(NegDepError):
    """Функция стоимости не поддерживается в данной задаче"""
