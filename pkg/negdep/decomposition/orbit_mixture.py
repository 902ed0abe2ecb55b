"""
Представление перестановочной совместной смеси как смеси равномерных
распределений на орбитах перестановок
"""

from dataclasses import dataclass
from typing import Tuple

from ..config import DEFAULT_TOLERANCES
from ..core.distribution import is_exchangeable, is_joint_mix, make_orbit_uniform, mixture
from ..core.numeric import NumberMode, format_number
from ..exceptions import NotExchangeable, NotJointMix, InconsistentComponents
from ..utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class OrbitMixture:
    """
    Смесь Σ w_a U_a равномерных распределений на орбитах.

    Attributes:
        weights (tuple): Веса орбит
        orbits (tuple): Базовые векторы a (по неубыванию координат)
        center: Общий центр совместной смеси
        mode (NumberMode): Числовой режим
    """
    weights: Tuple
    orbits: Tuple[Tuple, ...]
    center: object
    mode: NumberMode

    def __len__(self):
        return len(self.orbits)

    def to_distribution(self):
        """Распределение Σ w_a U_a"""
        return mixture([make_orbit_uniform(a, self.mode) for a in self.orbits], list(self.weights))

    def to_dict(self):
        return {
            "center": format_number(self.center),
            "orbits": [
                {"a": [format_number(v) for v in a], "weight": format_number(w)}
                for a, w in zip(self.orbits, self.weights)
            ],
            "number_mode": self.mode.value,
        }


def orbit_mixture_decompose(d, tol=None):
    """
    Разбиение атомов перестановочной совместной смеси на орбиты перестановок.

    Args:
        d (DiscreteJoint): Перестановочная совместная смесь
        tol (float): Допуск сравнения вероятностей

    Returns:
        OrbitMixture: Веса и базовые векторы орбит
    """
    if not is_exchangeable(d, tol):
        logger.error("Распределение не является перестановочным")
        raise NotExchangeable("Разложение по орбитам требует перестановочного распределения")
    jm = is_joint_mix(d)
    if not jm:
        logger.error("Распределение не является совместной смесью")
        raise NotJointMix("Разложение по орбитам требует совместной смеси")

    weights = {}
    for point, prob in d.atoms():
        base = tuple(sorted(point))
        weights[base] = weights.get(base, 0) + prob
    orbits = tuple(sorted(weights))
    result = OrbitMixture(
        weights=tuple(weights[a] for a in orbits),
        orbits=orbits,
        center=jm.center,
        mode=d.mode,
    )

    if not result.to_distribution().equals(d, tol):
        logger.error("Смесь равномерных распределений на орбитах не совпадает с исходным распределением")
        raise InconsistentComponents("Смесь орбит не совпадает с исходным распределением")
    center_tol = d.tol(DEFAULT_TOLERANCES.jm) * max(1, abs(jm.center))
    if any(abs(sum(a) - jm.center) > center_tol for a in orbits):
        raise InconsistentComponents("Центр орбиты отличается от центра распределения")
    logger.info(f"Разложение по орбитам: {len(orbits)} орбит")
    return result
