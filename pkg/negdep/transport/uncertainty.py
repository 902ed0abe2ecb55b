"""
Множества неопределенности для робастного транспорта: все подмножества,
подмножества фиксированной мощности и явный список мер на подмножествах
"""

import itertools
import json
from dataclasses import dataclass
from typing import Tuple

from ..core.numeric import NumberMode, to_number, format_number
from ..exceptions import BadSubset, BadProbabilityVector
from ..utils.logger import get_logger

logger = get_logger(__name__)

ALL = "all"
CARD = "card"
EXPLICIT = "explicit"


def check_subset(subset, n):
    """
    Проверка подмножества индексов {0..n-1}.

    Args:
        subset (iterable): Индексы
        n (int): Размерность

    Returns:
        tuple: Отсортированный кортеж индексов
    """
    items = tuple(sorted(int(i) for i in subset))
    if len(set(items)) != len(items) or any(not 0 <= i < n for i in items):
        logger.error(f"Подмножество {list(subset)} вне [0, {n})")
        raise BadSubset(f"Подмножество {list(subset)} вне диапазона [0, {n}) или содержит повторы")
    return items


@dataclass(frozen=True)
class SubsetMeasure:
    """
    Вероятностная мера на подмножествах {0..n-1}.

    Attributes:
        weights (tuple): Пары (подмножество, вес)
    """
    weights: Tuple[Tuple[Tuple[int, ...], object], ...]

    @classmethod
    def build(cls, items, n, mode=NumberMode.FLOAT):
        """
        Построение меры с проверкой.

        Args:
            items (iterable): Пары (подмножество, вес)
            n (int): Размерность
            mode (NumberMode): Числовой режим весов

        Returns:
            SubsetMeasure: Мера
        """
        merged = {}
        for subset, weight in items:
            key = check_subset(subset, n)
            merged[key] = merged.get(key, 0) + to_number(weight, mode)
        if any(w < 0 for w in merged.values()):
            raise BadProbabilityVector(f"Отрицательный вес в мере {merged}")
        total = sum(merged.values())
        tol = 0 if mode is NumberMode.RATIONAL else 1e-12 * max(1, len(merged))
        if abs(total - 1) > tol:
            raise BadProbabilityVector(f"Сумма весов меры {total} != 1")
        return cls(weights=tuple(sorted((k, w) for k, w in merged.items() if w != 0)))

    @classmethod
    def point(cls, subset):
        """Точечная мера на подмножестве"""
        return cls(weights=((tuple(sorted(subset)), 1),))

    def subsets(self):
        return [k for k, _ in self.weights]

    def permuted(self, perm):
        """Образ меры при перестановке координат i -> perm[i]"""
        moved = {}
        for subset, weight in self.weights:
            key = tuple(sorted(perm[i] for i in subset))
            moved[key] = moved.get(key, 0) + weight
        return SubsetMeasure(weights=tuple(sorted(moved.items())))

    def close_to(self, other, tol=1e-12):
        mine, theirs = dict(self.weights), dict(other.weights)
        return all(abs(mine.get(k, 0) - theirs.get(k, 0)) <= tol for k in set(mine) | set(theirs))

    def to_dict(self):
        return {"weights": [{"K": list(k), "w": format_number(w)} for k, w in self.weights]}


@dataclass(frozen=True)
class UncertaintySpec:
    """
    Множество неопределенности M.

    Attributes:
        variant (str): all, card или explicit
        n (int): Размерность
        k (int): Мощность подмножеств (для card)
        measures (tuple): Меры (для explicit)
    """
    variant: str
    n: int
    k: int = 0
    measures: Tuple[SubsetMeasure, ...] = ()

    def __post_init__(self):
        if self.variant not in (ALL, CARD, EXPLICIT):
            raise ValueError(f"Неизвестный вариант множества неопределенности: {self.variant}")
        if self.n < 1:
            raise BadSubset(f"Размерность должна быть >= 1, получено {self.n}")
        if self.variant == CARD and not 1 <= self.k <= self.n:
            raise BadSubset(f"Мощность {self.k} вне [1, {self.n}]")
        if self.variant == EXPLICIT and not self.measures:
            raise BadProbabilityVector("Пустой список мер")

    @classmethod
    def all_subsets(cls, n):
        return cls(variant=ALL, n=n)

    @classmethod
    def fixed_cardinality(cls, n, k):
        return cls(variant=CARD, n=n, k=k)

    @classmethod
    def explicit(cls, n, measures):
        return cls(variant=EXPLICIT, n=n, measures=tuple(measures))

    def family(self, include_empty=True):
        """
        Элементы множества неопределенности в виде мер.

        Args:
            include_empty (bool): Включать точечную меру на пустом множестве (вариант all)

        Returns:
            list: Список SubsetMeasure
        """
        if self.variant == ALL:
            start = 0 if include_empty else 1
            return [
                SubsetMeasure.point(subset)
                for size in range(start, self.n + 1)
                for subset in itertools.combinations(range(self.n), size)
            ]
        if self.variant == CARD:
            return [SubsetMeasure.point(s) for s in itertools.combinations(range(self.n), self.k)]
        return list(self.measures)

    def subsets(self):
        """Все непустые подмножества, встречающиеся в мерах множества"""
        found = set()
        for measure in self.family(include_empty=False):
            found.update(k for k in measure.subsets() if k)
        return sorted(found, key=lambda s: (len(s), s))

    def is_symmetric(self, tol=1e-12):
        """
        Замкнуто ли множество относительно перестановок координат.

        Returns:
            bool: Симметричность
        """
        if self.variant in (ALL, CARD):
            return True
        for measure in self.measures:
            for perm in itertools.permutations(range(self.n)):
                image = measure.permuted(perm)
                if not any(image.close_to(other, tol) for other in self.measures):
                    return False
        return True

    def label(self):
        if self.variant == CARD:
            return f"card:{self.k}"
        return self.variant

    def to_dict(self):
        data = {"variant": self.variant, "n": self.n}
        if self.variant == CARD:
            data["k"] = self.k
        if self.variant == EXPLICIT:
            data["measures"] = [m.to_dict() for m in self.measures]
        return data


def parse_uncertainty(text, n, mode=NumberMode.FLOAT):
    """
    Разбор множества неопределенности: all, card:k или путь к JSON-файлу
    вида {"measures": [{"weights": [{"K": [0, 1], "w": 1}]}]}.

    Args:
        text (str): Описание
        n (int): Размерность
        mode (NumberMode): Числовой режим весов

    Returns:
        UncertaintySpec: Множество неопределенности
    """
    text = text.strip()
    if text == ALL:
        return UncertaintySpec.all_subsets(n)
    if text.startswith(CARD + ":"):
        return UncertaintySpec.fixed_cardinality(n, int(text.split(":", 1)[1]))
    with open(text, "r", encoding="utf-8") as f:
        data = json.load(f)
    return uncertainty_from_dict(data, n, mode)


def uncertainty_from_dict(data, n, mode=NumberMode.FLOAT):
    """Множество неопределенности из словаря с ключом measures"""
    measures = [
        SubsetMeasure.build([(item["K"], item["w"]) for item in measure["weights"]], n, mode)
        for measure in data["measures"]
    ]
    return UncertaintySpec.explicit(n, measures)
