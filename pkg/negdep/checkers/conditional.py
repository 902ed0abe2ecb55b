"""
Структурный достаточный признак NA для совместных смесей.

Совместная смесь X является NA, если для каждого непустого собственного
подмножества A координат:
  (a) X_A и X_{[n]\\A} условно независимы при фиксированной сумме S_A;
  (b) условный закон X_A при S_A = s стохастически возрастает по s.
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from ..config import DEFAULT_TOLERANCES, DEFAULT_CAPS
from ..core.distribution import is_joint_mix, project
from ..core.numeric import zeros, format_number, to_float_array
from ..utils.logger import get_logger
from .dependence import Verdict, is_na
from .lattice import upper_sets, indicator_matrix

logger = get_logger(__name__)


class ConditionalStatus(str, Enum):
    APPLIES = "applies"
    CONDITION_A_FAILS = "condition_a_fails"
    CONDITION_B_FAILS = "condition_b_fails"
    NOT_JM = "not_jm"


@dataclass(frozen=True)
class ConditionalReport:
    """
    Результат проверки структурного признака.

    Attributes:
        status (ConditionalStatus): Итог проверки
        witness (dict): Свидетель нарушения условия (a) или (b)
        na_verdict (Verdict): Перекрестная проверка NA (если признак применим)
    """
    status: ConditionalStatus
    witness: Optional[dict] = None
    na_verdict: Optional[Verdict] = None

    @property
    def applies(self):
        return self.status is ConditionalStatus.APPLIES

    @property
    def consistent(self):
        """Если признак применим, прямая проверка NA не должна находить нарушений"""
        return not (self.applies and self.na_verdict is not None and self.na_verdict.fails)

    def to_dict(self):
        data = {"status": self.status.value, "consistent": self.consistent}
        if self.witness is not None:
            data["witness"] = self.witness
        if self.na_verdict is not None:
            data["na"] = self.na_verdict.to_dict()
        return data


def proper_subsets(n):
    """Непустые собственные подмножества {0..n-1} по возрастанию размера"""
    for size in range(1, n):
        for subset in itertools.combinations(range(n), size):
            yield subset


def _conditional_tables(d, block_a, block_b):
    """Группировка атомов по значению S_A: {s: {(x_A, x_B): масса}}"""
    groups = {}
    for point, prob in d.atoms():
        x_a = tuple(point[i] for i in block_a)
        x_b = tuple(point[i] for i in block_b)
        s = sum(x_a)
        table = groups.setdefault(s, {})
        table[(x_a, x_b)] = table.get((x_a, x_b), 0) + prob
    return groups


def _total_variation(table):
    """Расстояние полной вариации между условным совместным законом и произведением условных маргиналов"""
    total = sum(table.values())
    law_a, law_b = {}, {}
    for (x_a, x_b), prob in table.items():
        law_a[x_a] = law_a.get(x_a, 0) + prob / total
        law_b[x_b] = law_b.get(x_b, 0) + prob / total
    distance = 0
    for x_a, p_a in law_a.items():
        for x_b, p_b in law_b.items():
            distance += abs(table.get((x_a, x_b), 0) / total - p_a * p_b)
    return distance / 2


def check_condition_a(d, block_a, block_b, tol):
    """
    Условие (a): условная независимость X_A и X_B при фиксированной S_A.

    Returns:
        dict или None: Свидетель нарушения (s, расстояние полной вариации)
    """
    groups = _conditional_tables(d, block_a, block_b)
    for s in sorted(groups):
        distance = _total_variation(groups[s])
        if distance > tol:
            return {"A": list(block_a), "s": format_number(s), "tv": format_number(distance)}
    return None


def check_condition_b(d, block_a, tol, cap=None):
    """
    Условие (b): P(X_A in U | S_A = s) не убывает по s для каждого верхнего множества U.

    Returns:
        dict или None: Свидетель нарушения (U, два значения s и вероятности)
    """
    support = list(project(d, block_a).points)
    index = {p: k for k, p in enumerate(support)}
    sums = sorted({sum(p) for p in support})
    if len(sums) < 2:
        return None
    position = {s: k for k, s in enumerate(sums)}

    law = zeros((len(sums), len(support)), d.mode)
    for point, prob in d.atoms():
        x_a = tuple(point[i] for i in block_a)
        law[position[sum(x_a)], index[x_a]] += prob
    law = law / law.sum(axis=1)[:, None]

    sets = upper_sets(support, cap)
    if not sets:
        return None
    probs = indicator_matrix(sets, len(support), d.mode) @ law.T
    steps = probs[:, :-1] - probs[:, 1:]
    location = np.unravel_index(int(np.argmax(to_float_array(steps))), steps.shape)
    if steps[location] > tol:
        u, k = location
        return {
            "A": list(block_a),
            "U": [[format_number(v) for v in support[m]] for m in sets[u]],
            "s": [format_number(sums[k]), format_number(sums[k + 1])],
            "probs": [format_number(probs[u, k]), format_number(probs[u, k + 1])],
        }
    return None


def check_conditional_structure(d, tol=None, cap=None, cross_check=True):
    """
    Проверка структурного признака NA для совместной смеси.

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск для полной вариации и монотонности
        cap (int): Предельное число верхних множеств
        cross_check (bool): Подтверждать вывод NA прямой проверкой is_na

    Returns:
        ConditionalReport: Итог проверки
    """
    tol = d.tol(DEFAULT_TOLERANCES.tv if tol is None else tol)
    cap = DEFAULT_CAPS.upper_sets if cap is None else cap

    if not is_joint_mix(d):
        logger.info("Распределение не является совместной смесью")
        return ConditionalReport(status=ConditionalStatus.NOT_JM)

    for block_a in proper_subsets(d.dim):
        block_b = tuple(k for k in range(d.dim) if k not in block_a)
        witness = check_condition_a(d, block_a, block_b, tol)
        if witness is not None:
            logger.info(f"Условие (a) нарушено для A={block_a} при s={witness['s']}")
            return ConditionalReport(status=ConditionalStatus.CONDITION_A_FAILS, witness=witness)
        witness = check_condition_b(d, block_a, tol, cap)
        if witness is not None:
            logger.info(f"Условие (b) нарушено для A={block_a}")
            return ConditionalReport(status=ConditionalStatus.CONDITION_B_FAILS, witness=witness)

    na_verdict = is_na(d, cap=cap) if cross_check else None
    if na_verdict is not None and na_verdict.fails:
        logger.error("Признак применим, но прямая проверка нашла нарушение NA")
    else:
        logger.info("Условия (a) и (b) выполнены: распределение NA")
    return ConditionalReport(status=ConditionalStatus.APPLIES, na_verdict=na_verdict)
