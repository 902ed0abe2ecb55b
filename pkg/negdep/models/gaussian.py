"""
Гауссовские совместные смеси: необходимые условия, построение NA-ковариации,
замкнутая форма для n = 3 и вердикты зависимости
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from ..config import DEFAULT_TOLERANCES
from ..core.numeric import NumberMode, as_array, to_number, format_number, to_float_array
from ..exceptions import PreconditionFailed, DegenerateInput, WrongFamily, NotPsd, NotJointMix
from ..utils.logger import get_logger
from .families import CovModel, check_psd, min_eigenvalue

logger = get_logger(__name__)

# Уровень, ниже которого дисперсия считается нулевой
DEGENERATE_TOL = 1e-12


def _mode_of(values):
    return NumberMode.RATIONAL if any(isinstance(v, Fraction) for v in values) else NumberMode.FLOAT


def _leq(left, right, exact):
    if exact:
        return left <= right
    return left <= right + DEFAULT_TOLERANCES.mass * max(1.0, abs(right))


def check_ncd_necessary(variances):
    """
    Необходимое условие существования NCD совместной смеси: 2·max σ_i² <= Σ σ_i².

    Args:
        variances (list): Дисперсии

    Returns:
        bool: Выполнено ли условие
    """
    values = list(variances)
    exact = _mode_of(values) is NumberMode.RATIONAL
    return _leq(2 * max(values), sum(values), exact)


def check_jm_necessary(stds):
    """
    Необходимое условие существования совместной смеси: 2·max σ_i <= Σ σ_i.

    Args:
        stds (list): Стандартные отклонения

    Returns:
        bool: Выполнено ли условие
    """
    values = list(stds)
    exact = _mode_of(values) is NumberMode.RATIONAL
    return _leq(2 * max(values), sum(values), exact)


def ncd_condition_implies_jm_condition(variances):
    """
    Проверка импликации: условие для NCD по дисперсиям влечет условие для JM
    по стандартным отклонениям.

    Args:
        variances (list): Дисперсии

    Returns:
        bool: Выполнена ли импликация на данном векторе
    """
    if not check_ncd_necessary(variances):
        return True
    return check_jm_necessary([math.sqrt(float(v)) for v in variances])


@dataclass(frozen=True)
class ConstructionTrace:
    """
    Протокол построения ковариации NA гауссовской совместной смеси.

    Attributes:
        variances (tuple): Дисперсии в исходном порядке
        order (tuple): Перестановка, упорядочивающая дисперсии по возрастанию
        sorted_variances (tuple): Упорядоченные дисперсии
        lam_sq: λ²
        lam (float): λ (неотрицательный корень)
        alpha_sq (tuple): Приращения α_k² = σ²_(k) - σ²_(k-1)
        alpha (tuple): α_k
        cov (numpy.ndarray): Ковариационная матрица в исходном порядке
        mode (NumberMode): Числовой режим
    """
    variances: Tuple
    order: Tuple[int, ...]
    sorted_variances: Tuple
    lam_sq: object
    lam: float
    alpha_sq: Tuple
    alpha: Tuple[float, ...]
    cov: np.ndarray
    mode: NumberMode

    def to_dict(self):
        return {
            "variances": [format_number(v) for v in self.variances],
            "order": list(self.order),
            "sorted_variances": [format_number(v) for v in self.sorted_variances],
            "lambda_sq": format_number(self.lam_sq),
            "lambda": self.lam,
            "alpha_sq": [format_number(v) for v in self.alpha_sq],
            "alpha": list(self.alpha),
            "cov": [[format_number(v) for v in row] for row in self.cov],
            "number_mode": self.mode.value,
        }


def construct_na_gaussian_cov(variances, mode=None):
    """
    Ковариационная матрица гауссовской совместной смеси с центром 0, которая
    является NA, для заданных дисперсий.

    Дисперсии упорядочиваются по возрастанию (при равенстве сохраняется
    исходный порядок), затем
        λ² = (σ²_n - σ²_{n-1}) / Σ_{i<=n-2} σ²_i,
        Σ_kl = -(1 - λ²) Σ_{j<=k} α_j²/(n - j),            k < l <= n-1,
        Σ_kn = -λ² σ²_k - (1 - λ²) Σ_{j<=k} α_j²/(n - j),  k < n,
    и матрица возвращается к исходному порядку координат.

    Args:
        variances (list): Дисперсии (n >= 2)
        mode (NumberMode): Числовой режим (по умолчанию rational, если среди входов есть Fraction)

    Returns:
        ConstructionTrace: Протокол построения
    """
    values = list(variances)
    mode = NumberMode.parse(mode) if mode is not None else _mode_of(values)
    values = [to_number(v, mode) for v in values]
    n = len(values)
    exact = mode is NumberMode.RATIONAL

    if n < 2:
        raise DegenerateInput(f"Требуется n >= 2, получено {n}")
    if any(v < 0 for v in values):
        raise PreconditionFailed(f"Отрицательная дисперсия в {values}")
    if not check_ncd_necessary(values):
        logger.error(f"Дисперсии {values} не удовлетворяют условию 2·max σ² <= Σ σ²")
        raise PreconditionFailed(
            f"Условие 2·max σ² <= Σ σ² нарушено для дисперсий {[format_number(v) for v in values]}"
        )

    order = tuple(sorted(range(n), key=lambda k: (values[k], k)))
    ordered = [values[k] for k in order]

    numerator = ordered[-1] - ordered[-2]
    denominator = sum(ordered[:-2]) if n > 2 else 0 * numerator
    if not exact and abs(numerator) <= DEFAULT_TOLERANCES.mass * max(1.0, abs(ordered[-1])):
        numerator = 0.0
    if numerator == 0:
        lam_sq = 0 * numerator
    elif denominator == 0:
        logger.error("Все дисперсии, кроме одной, нулевые")
        raise DegenerateInput("Знаменатель λ² равен нулю при положительном числителе")
    else:
        lam_sq = numerator / denominator
    rest = 1 - lam_sq

    alpha_sq = [ordered[0]] + [ordered[k] - ordered[k - 1] for k in range(1, n)]
    # Накопленные суммы Σ_{j<=k} α_j²/(n - j) при нумерации с единицы
    partial = []
    acc = 0 * ordered[0]
    for j in range(n):
        acc = acc + alpha_sq[j] / (n - (j + 1)) if j < n - 1 else acc
        partial.append(acc)

    sorted_cov = as_array([[0] * n for _ in range(n)], mode)
    for k in range(n):
        sorted_cov[k, k] = ordered[k]
        for l in range(k + 1, n):
            value = -rest * partial[k]
            if l == n - 1:
                value = value - lam_sq * ordered[k]
            sorted_cov[k, l] = value
            sorted_cov[l, k] = value

    cov = as_array([[0] * n for _ in range(n)], mode)
    for a, source_a in enumerate(order):
        for b, source_b in enumerate(order):
            cov[source_a, source_b] = sorted_cov[a, b]

    _verify_joint_mix_cov(cov, exact)
    trace = ConstructionTrace(
        variances=tuple(values),
        order=order,
        sorted_variances=tuple(ordered),
        lam_sq=lam_sq,
        lam=math.sqrt(float(lam_sq)),
        alpha_sq=tuple(alpha_sq),
        alpha=tuple(math.sqrt(max(float(a), 0.0)) for a in alpha_sq),
        cov=cov,
        mode=mode,
    )
    logger.info(f"Построена ковариация NA совместной смеси: n={n}, λ²={format_number(lam_sq)}")
    return trace


def _verify_joint_mix_cov(cov, exact):
    dense = to_float_array(cov)
    scale = max(1.0, float(np.max(np.abs(np.diag(dense)))))
    if not check_psd(dense):
        logger.error(f"Построенная матрица не PSD: {min_eigenvalue(dense):.3e}")
        raise NotPsd(f"Построенная матрица не PSD: минимальное собственное значение {min_eigenvalue(dense):.3e}")
    row_sums = cov.sum(axis=1)
    bad = any(s != 0 for s in row_sums) if exact else np.max(np.abs(to_float_array(row_sums))) > 1e-9 * scale
    if bad:
        logger.error("Суммы строк построенной матрицы не равны нулю")
        raise NotJointMix("Суммы строк построенной матрицы не равны нулю")


@dataclass(frozen=True)
class JmCov3Result:
    """
    Ковариационная матрица трехмерной совместной смеси.

    Attributes:
        cov (numpy.ndarray): Матрица по замкнутой формуле
        valid (bool): PSD ли матрица (существует ли совместная смесь)
    """
    cov: np.ndarray
    valid: bool

    def to_dict(self):
        return {"cov": [[format_number(v) for v in row] for row in self.cov], "valid": self.valid}


def jm_cov_n3(variances, mode=None):
    """
    Единственная ковариационная матрица совместной смеси при n = 3:
    Σ_ij = (σ_k² - σ_i² - σ_j²)/2 для {i, j, k} = {1, 2, 3}.

    Args:
        variances (list): Три дисперсии
        mode (NumberMode): Числовой режим

    Returns:
        JmCov3Result: Матрица и флаг допустимости
    """
    values = list(variances)
    if len(values) != 3:
        raise DegenerateInput(f"Требуется три дисперсии, получено {len(values)}")
    mode = NumberMode.parse(mode) if mode is not None else _mode_of(values)
    values = [to_number(v, mode) for v in values]
    half = to_number(Fraction(1, 2), mode)

    cov = as_array([[0] * 3 for _ in range(3)], mode)
    for i in range(3):
        cov[i, i] = values[i]
    for i, j in itertools.combinations(range(3), 2):
        k = 3 - i - j
        cov[i, j] = cov[j, i] = (values[k] - values[i] - values[j]) * half

    valid = check_psd(to_float_array(cov))
    if not valid:
        logger.warning(f"Дисперсии {values} не допускают совместной смеси: матрица не PSD")
    return JmCov3Result(cov=cov, valid=valid)


def equicorrelation(n, mode=NumberMode.FLOAT):
    """
    Матрица P*_n: единицы на диагонали, -1/(n-1) вне диагонали.

    Args:
        n (int): Размерность (>= 2)
        mode (NumberMode): Числовой режим

    Returns:
        numpy.ndarray: Матрица
    """
    if n < 2:
        raise DegenerateInput(f"Требуется n >= 2, получено {n}")
    off = to_number(Fraction(-1, n - 1), mode)
    one = to_number(1, mode)
    return as_array([[one if i == j else off for j in range(n)] for i in range(n)], mode)


def cov_is_jm(cov, tol=None):
    """
    Ковариация совместной смеси: 1ᵀΣ1 = 0.

    Args:
        cov: Симметричная матрица
        tol (float): Допуск (для object-матриц с Fraction проверка точная)

    Returns:
        bool: Является ли Σ ковариацией совместной смеси
    """
    cov = np.asarray(cov)
    total = cov.sum()
    if cov.dtype == object:
        return total == 0
    tol = DEFAULT_TOLERANCES.jm if tol is None else tol
    return abs(float(total)) <= tol


@dataclass(frozen=True)
class GaussianVerdict:
    """
    Единый вердикт для гауссовской модели: NA, NSD, NOD, NLOD, NUOD и NCD
    равносильны неположительности внедиагональных ковариаций.

    Attributes:
        holds (bool): Выполнены ли все понятия
        witness (tuple): Пара координат с положительной ковариацией
        is_joint_mix (bool): 1ᵀΣ1 = 0
        is_ct (bool): Контрмонотонность
    """
    holds: bool
    witness: Optional[Tuple[int, int]] = None
    is_joint_mix: bool = False
    is_ct: bool = False
    notions: Tuple[str, ...] = ("NA", "NSD", "NOD", "NLOD", "NUOD", "NCD")

    def to_dict(self):
        data = {
            "holds": self.holds,
            "notions": list(self.notions),
            "is_joint_mix": self.is_joint_mix,
            "is_ct": self.is_ct,
        }
        if self.witness is not None:
            data["witness"] = {"pair": list(self.witness[:2]), "cov": self.witness[2]}
        return data


def gaussian_is_ct(cov, tol=None):
    """
    Контрмонотонность гауссовского вектора: не более двух невырожденных
    компонент, и при двух невырожденных их корреляция равна -1.

    Args:
        cov: Ковариационная матрица
        tol (float): Допуск

    Returns:
        bool: CT ли вектор
    """
    tol = DEFAULT_TOLERANCES.corr if tol is None else tol
    dense = to_float_array(cov)
    active = [k for k in range(len(dense)) if dense[k, k] > DEGENERATE_TOL]
    if len(active) <= 1:
        return True
    if len(active) > 2:
        return False
    i, j = active
    corr = dense[i, j] / math.sqrt(dense[i, i] * dense[j, j])
    return corr <= -1 + tol


def gaussian_negdep_verdict(model, tol=None):
    """
    Вердикт отрицательной зависимости для гауссовской модели.

    Args:
        model (CovModel): Модель с семейством gaussian
        tol (float): Допуск знака

    Returns:
        GaussianVerdict: Вердикт
    """
    if not isinstance(model, CovModel) or not model.family.is_gaussian:
        tag = getattr(getattr(model, "family", None), "tag", None)
        logger.error(f"Ожидалась гауссовская модель, получено семейство {tag}")
        raise WrongFamily(f"Ожидалась гауссовская модель, получено семейство {tag}")
    cov = np.asarray(model.cov)
    exact = cov.dtype == object
    tol = 0 if exact else (DEFAULT_TOLERANCES.sign if tol is None else tol)

    witness = None
    for i, j in itertools.combinations(range(model.dim), 2):
        if cov[i, j] > tol and (witness is None or cov[i, j] > witness[2]):
            witness = (i, j, cov[i, j])
    return GaussianVerdict(
        holds=witness is None,
        witness=None if witness is None else (witness[0], witness[1], format_number(witness[2])),
        is_joint_mix=cov_is_jm(cov),
        is_ct=gaussian_is_ct(cov),
    )
