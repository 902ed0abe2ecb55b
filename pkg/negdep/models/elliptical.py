"""
Эллиптические распределения как гауссовские смеси по масштабу:
выборки, численная демонстрация отсутствия NOD при нулевой корреляции,
эллиптические NCD совместные смеси и эксперимент с энтропией
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from ..exceptions import NotPsd, DimMismatch, WrongFamily
from ..utils.logger import get_logger
from .families import Generator, CovModel, check_psd, min_eigenvalue, STUDENT_T, PSD_TOL
from .gaussian import construct_na_gaussian_cov, cov_is_jm, equicorrelation
from ..core.numeric import to_float_array

logger = get_logger(__name__)

DEFAULT_GRID = np.round(np.arange(-3.0, 3.0 + 1e-9, 0.1), 10)


@dataclass(frozen=True)
class EllipticalSpec:
    """
    Эллиптическое распределение μ + sqrt(W) A Z с AAᵀ = Σ.

    Attributes:
        generator (Generator): Закон масштабной переменной W
        location (numpy.ndarray): Вектор сдвига μ
        dispersion (numpy.ndarray): Дисперсионная матрица Σ
    """
    generator: Generator
    location: np.ndarray
    dispersion: np.ndarray

    def __post_init__(self):
        location = np.asarray(self.location, dtype=float)
        dispersion = np.asarray(self.dispersion, dtype=float)
        if dispersion.shape != (len(location), len(location)):
            raise DimMismatch(f"Несогласованные размеры: μ {location.shape}, Σ {dispersion.shape}")
        if not check_psd(dispersion):
            logger.error("Дисперсионная матрица не PSD")
            raise NotPsd(f"Дисперсионная матрица не PSD: {min_eigenvalue(dispersion):.3e}")

    @property
    def dim(self):
        return len(self.location)

    @classmethod
    def from_model(cls, model):
        """Эллиптическая спецификация из CovModel"""
        return cls(generator=model.family, location=np.asarray(model.mean, dtype=float),
                   dispersion=to_float_array(model.cov))

    def to_dict(self):
        return {
            "mean": np.asarray(self.location, dtype=float).tolist(),
            "cov": np.asarray(self.dispersion, dtype=float).tolist(),
            "family": self.generator.to_dict(),
        }


def psd_factor(matrix, tol=PSD_TOL):
    """
    Матрица A с AAᵀ = Σ: разложение Холецкого для положительно определенной
    матрицы, иначе спектральное разложение с отбрасыванием нулевых собственных значений.

    Args:
        matrix: Симметричная PSD матрица
        tol (float): Допуск для собственных значений

    Returns:
        numpy.ndarray: Фактор формы (n, r)
    """
    matrix = np.asarray(matrix, dtype=float)
    try:
        return np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        pass
    values, vectors = np.linalg.eigh(matrix)
    scale = max(1.0, float(np.max(np.abs(values))))
    if values.min() < -tol * scale:
        raise NotPsd(f"Матрица не PSD: минимальное собственное значение {values.min():.3e}")
    keep = values > tol * scale
    return vectors[:, keep] * np.sqrt(values[keep])


def sample(spec, count, seed):
    """
    Выборка из эллиптического распределения.

    Args:
        spec (EllipticalSpec или CovModel): Модель
        count (int): Размер выборки
        seed (int): Зерно генератора

    Returns:
        numpy.ndarray: Выборка формы (count, n)
    """
    if isinstance(spec, CovModel):
        spec = EllipticalSpec.from_model(spec)
    rng = np.random.default_rng(seed)
    factor = psd_factor(spec.dispersion)
    normals = rng.standard_normal((count, factor.shape[1]))
    scales = spec.generator.sample_scales(count, rng)
    draws = (normals @ factor.T) * np.sqrt(scales)[:, None]
    logger.info(f"Сгенерировано {count} наблюдений семейства {spec.generator.tag} (seed={seed})")
    return np.asarray(spec.location, dtype=float) + draws


@dataclass(frozen=True)
class OrthantDemoResult:
    """
    Результат численной проверки NLOD на сетке.

    Attributes:
        max_violation (float): max P(X1<=x1, X2<=x2) - P(X1<=x1)P(X2<=x2)
        at (tuple): Точка максимума
        family (str): Семейство
    """
    max_violation: float
    at: Tuple[float, float]
    family: str

    def to_dict(self):
        return {"max_violation": self.max_violation, "at": list(self.at), "family": self.family}


def _normal_cdf(x, scale):
    """Φ(x / scale) с вырожденным случаем scale = 0"""
    with np.errstate(divide="ignore", invalid="ignore"):
        values = stats.norm.cdf(x / scale)
    return np.where(scale > 0, values, (x >= 0).astype(float))


def demo_bivariate_zero_corr_not_nod(spec, grid=None, nodes=2000):
    """
    Двумерное эллиптическое распределение с диагональной дисперсией
    некоррелировано, но не является NOD, если оно не гауссовское.

    Вероятности вычисляются квадратурой по закону W:
    P(X1<=x1, X2<=x2) = E[Φ(x1/sqrt(W s1)) Φ(x2/sqrt(W s2))].
    Для гауссовского семейства разность равна нулю (контрольный случай).

    Args:
        spec (EllipticalSpec): Модель с dim = 2 и диагональной дисперсией
        grid (array): Значения по каждой координате (по умолчанию [-3, 3] с шагом 0.1)
        nodes (int): Число узлов квадратуры для student_t

    Returns:
        OrthantDemoResult: Максимальное нарушение и точка
    """
    if spec.dim != 2:
        raise DimMismatch(f"Требуется размерность 2, получено {spec.dim}")
    dispersion = np.asarray(spec.dispersion, dtype=float)
    if abs(dispersion[0, 1]) > 0:
        raise WrongFamily("Дисперсионная матрица должна быть диагональной")
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)

    scales, weights = spec.generator.quadrature(nodes)
    shifted = [grid - spec.location[i] for i in range(2)]
    # Матрицы формы (узлы, точки сетки)
    first = _normal_cdf(shifted[0][None, :], np.sqrt(scales * dispersion[0, 0])[:, None])
    second = _normal_cdf(shifted[1][None, :], np.sqrt(scales * dispersion[1, 1])[:, None])

    joint = (first * weights[:, None]).T @ second
    product = np.outer(weights @ first, weights @ second)
    gap = joint - product
    i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
    result = OrthantDemoResult(max_violation=float(gap[i, j]), at=(float(grid[i]), float(grid[j])),
                               family=spec.generator.tag)
    logger.info(f"Максимальное нарушение NLOD: {result.max_violation:.3e} в точке {result.at}")
    return result


def sample_simplex_uniform(n, count, seed):
    """
    Выборка из равномерного распределения на стандартном симплексе
    (совместная смесь с центром 1 и корреляциями -1/(n-1)).

    Args:
        n (int): Размерность
        count (int): Размер выборки
        seed (int): Зерно генератора

    Returns:
        numpy.ndarray: Выборка формы (count, n)
    """
    rng = np.random.default_rng(seed)
    return rng.dirichlet(np.ones(n), size=count)


def elliptical_is_joint_mix(spec, tol=None):
    """
    Эллиптическое распределение является совместной смесью тогда и только
    тогда, когда 1ᵀΣ1 = 0 или масштаб W тождественно равен нулю.

    Args:
        spec (EllipticalSpec): Модель
        tol (float): Допуск

    Returns:
        bool: JM ли распределение
    """
    generator = spec.generator
    if generator.tag == "scale_mixture" and all(s == 0 for s, w in zip(generator.scales, generator.weights) if w > 0):
        return True
    return cov_is_jm(np.asarray(spec.dispersion, dtype=float), tol)


def construct_ncd_elliptical(variances, generator, location=None):
    """
    Эллиптическая NCD совместная смесь: ковариация гауссовского построения
    с заданным законом масштаба.

    Args:
        variances (list): Дисперсии (условие 2·max σ² <= Σ σ²)
        generator (Generator): Закон масштабной переменной
        location (array): Вектор сдвига (по умолчанию 0)

    Returns:
        tuple: (ConstructionTrace, EllipticalSpec)
    """
    trace = construct_na_gaussian_cov(variances)
    n = len(trace.variances)
    location = np.zeros(n) if location is None else np.asarray(location, dtype=float)
    spec = EllipticalSpec(generator=generator, location=location, dispersion=to_float_array(trace.cov))
    return trace, spec


def _equicorrelated(n, r):
    return np.full((n, n), r) + (1 - r) * np.eye(n)


@dataclass(frozen=True)
class EntropyEstimate:
    """
    Оценки энтропии трех четырехмерных t-моделей, приближающих совместные смеси.

    Attributes:
        m (int): Параметр приближения
        exchangeable_t (float): t с матрицей P_{4,-1/3+1/m} (не NOD в пределе)
        block_t (float): Две независимые двумерные t с P_{2,-1+1/m}
        permuted_block_t (float): Та же модель после случайной перестановки координат
        standard_errors (tuple): Стандартные ошибки оценок
    """
    m: int
    exchangeable_t: float
    block_t: float
    permuted_block_t: float
    standard_errors: Tuple[float, float, float] = field(default=(0.0, 0.0, 0.0))

    def to_dict(self):
        return {
            "m": self.m,
            "exchangeable_t": self.exchangeable_t,
            "block_t": self.block_t,
            "permuted_block_t": self.permuted_block_t,
            "standard_errors": list(self.standard_errors),
        }


def entropy_experiment(nu=3.0, m=10, count=20000, seed=0):
    """
    Оценка энтропии методом Монте-Карло: среднее -log f(X) по выборке.

    Args:
        nu (float): Число степеней свободы
        m (int): Параметр приближения (m >= 2)
        count (int): Размер выборки
        seed (int): Зерно генератора

    Returns:
        EntropyEstimate: Оценки энтропии
    """
    if m < 2:
        raise ValueError(f"Параметр m должен быть >= 2, получено {m}")
    rng = np.random.default_rng(seed)

    full = stats.multivariate_t(loc=np.zeros(4), shape=_equicorrelated(4, -1 / 3 + 1 / m), df=nu)
    x = full.rvs(size=count, random_state=rng)
    log_x = full.logpdf(x)

    pair = stats.multivariate_t(loc=np.zeros(2), shape=_equicorrelated(2, -1 + 1 / m), df=nu)
    y = np.hstack([pair.rvs(size=count, random_state=rng), pair.rvs(size=count, random_state=rng)])

    def block_logpdf(points):
        return pair.logpdf(points[:, :2]) + pair.logpdf(points[:, 2:])

    log_y = block_logpdf(y)

    perms = list(itertools.permutations(range(4)))
    choice = rng.integers(len(perms), size=count)
    z = np.empty_like(y)
    for k, perm in enumerate(perms):
        rows = choice == k
        z[rows] = y[rows][:, list(perm)]
    # Плотность перемешанной модели: среднее плотностей по всем перестановкам
    inverse = [tuple(np.argsort(perm)) for perm in perms]
    log_terms = np.stack([block_logpdf(z[:, list(inv)]) for inv in inverse])
    log_z = logsumexp(log_terms, axis=0) - math.log(len(perms))

    estimates = [-float(np.mean(v)) for v in (log_x, log_y, log_z)]
    errors = tuple(float(np.std(v) / math.sqrt(count)) for v in (log_x, log_y, log_z))
    logger.info(f"Оценки энтропии (m={m}): {', '.join(f'{e:.4f}' for e in estimates)}")
    return EntropyEstimate(m=m, exchangeable_t=estimates[0], block_t=estimates[1],
                           permuted_block_t=estimates[2], standard_errors=errors)


def student_t_spec(nu, dispersion, location=None):
    """Спецификация многомерного t-распределения"""
    dispersion = np.asarray(dispersion, dtype=float)
    location = np.zeros(len(dispersion)) if location is None else np.asarray(location, dtype=float)
    return EllipticalSpec(generator=Generator(tag=STUDENT_T, nu=nu), location=location, dispersion=dispersion)


def equicorrelated_t_spec(n, nu):
    """t-распределение с дисперсией P*_n (совместная смесь)"""
    return student_t_spec(nu, to_float_array(equicorrelation(n)))
