"""
Настройки запуска: допуски, ограничения размеров и числовой режим
"""

import os
from dataclasses import dataclass, field, asdict
from typing import Optional, Tuple

from .core.numeric import NumberMode


NUM_MODE_ENV = "NEGDEP_NUM_MODE"


@dataclass(frozen=True)
class Tolerances:
    """
    Допуски для режима float. В рациональном режиме все сравнения точные.
    """
    mass: float = 1e-12
    jm: float = 1e-9
    sign: float = 1e-10
    psd: float = 1e-9
    lp: float = 1e-9
    corr: float = 1e-6
    tv: float = 1e-12


@dataclass(frozen=True)
class Caps:
    """Пределы размеров перебора и задач ЛП"""
    grid: int = 10 ** 7
    upper_sets: int = 10 ** 6
    lp_variables: int = 2 * 10 ** 5
    rational_nonzeros: int = 2000


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_CAPS = Caps()


def default_number_mode():
    """
    Числовой режим по умолчанию с учетом переменной окружения NEGDEP_NUM_MODE.

    Returns:
        NumberMode: Режим вычислений
    """
    value = os.environ.get(NUM_MODE_ENV)
    if not value:
        return NumberMode.FLOAT
    return NumberMode.parse(value)


@dataclass(frozen=True)
class RunConfig:
    """
    Полная конфигурация одного запуска CLI. Встраивается в каждый отчет.
    """
    command: str
    inputs: Tuple[str, ...] = ()
    number_mode: NumberMode = NumberMode.FLOAT
    tolerances: Tolerances = field(default_factory=Tolerances)
    caps: Caps = field(default_factory=Caps)
    seed: Optional[int] = None
    output: Optional[str] = None
    options: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        for name, value in asdict(self.caps).items():
            if value <= 0:
                raise ValueError(f"Предел {name} должен быть положительным: {value}")

    @classmethod
    def from_env(cls, command, **kwargs):
        """
        Создание конфигурации с числовым режимом из окружения.

        Args:
            command (str): Имя подкоманды
            **kwargs: Остальные поля RunConfig

        Returns:
            RunConfig: Конфигурация
        """
        kwargs.setdefault("number_mode", default_number_mode())
        return cls(command=command, **kwargs)

    def to_dict(self):
        """Словарь для встраивания в JSON-отчет"""
        data = asdict(self)
        data["number_mode"] = self.number_mode.value
        data["inputs"] = list(self.inputs)
        data["options"] = {key: value for key, value in self.options}
        return data
