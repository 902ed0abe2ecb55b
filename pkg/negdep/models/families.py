"""
Семейства распределений: гауссовская модель с ковариацией и эллиптические
законы как гауссовские смеси по масштабу X = μ + sqrt(W) A Z
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import stats

from ..exceptions import NotPsd, DimMismatch, WrongFamily
from ..utils.logger import get_logger

logger = get_logger(__name__)

GAUSSIAN = "gaussian"
STUDENT_T = "student_t"
SCALE_MIXTURE = "scale_mixture"
TAGS = (GAUSSIAN, STUDENT_T, SCALE_MIXTURE)

PSD_TOL = 1e-9


@dataclass(frozen=True)
class Generator:
    """
    Порождающий закон эллиптического семейства, заданный через
    распределение масштабной переменной W.

    Attributes:
        tag (str): gaussian (W = 1), student_t (W = ν/χ²_ν) или scale_mixture
        nu (float): Число степеней свободы (для student_t)
        scales (tuple): Значения W (для scale_mixture)
        weights (tuple): Вероятности значений W (для scale_mixture)
    """
    tag: str = GAUSSIAN
    nu: Optional[float] = None
    scales: Tuple[float, ...] = ()
    weights: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.tag not in TAGS:
            raise WrongFamily(f"Неизвестное семейство: {self.tag}")
        if self.tag == STUDENT_T and (self.nu is None or not self.nu > 0):
            raise ValueError(f"Число степеней свободы должно быть положительным: {self.nu}")
        if self.tag == SCALE_MIXTURE:
            if not self.scales or len(self.scales) != len(self.weights):
                raise DimMismatch("Некорректное распределение масштабной переменной")
            if any(s < 0 for s in self.scales):
                raise ValueError(f"Отрицательный масштаб в {self.scales}")
            if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1) > 1e-12:
                raise ValueError(f"Некорректные веса масштабов {self.weights}")

    @property
    def is_gaussian(self):
        return self.tag == GAUSSIAN

    def sample_scales(self, count, rng):
        """
        Выборка значений W.

        Args:
            count (int): Размер выборки
            rng (numpy.random.Generator): Генератор

        Returns:
            numpy.ndarray: Значения W
        """
        if self.tag == GAUSSIAN:
            return np.ones(count)
        if self.tag == STUDENT_T:
            return self.nu / rng.chisquare(self.nu, size=count)
        return rng.choice(np.asarray(self.scales, dtype=float), size=count,
                          p=np.asarray(self.weights, dtype=float))

    def quadrature(self, nodes=2000):
        """
        Дискретное приближение закона W: узлы и веса.

        Для student_t используются равновероятные квантили χ²_ν.

        Args:
            nodes (int): Число узлов (для student_t)

        Returns:
            tuple: (значения W, веса)
        """
        if self.tag == GAUSSIAN:
            return np.ones(1), np.ones(1)
        if self.tag == STUDENT_T:
            levels = (np.arange(nodes) + 0.5) / nodes
            return self.nu / stats.chi2.ppf(levels, self.nu), np.full(nodes, 1.0 / nodes)
        return np.asarray(self.scales, dtype=float), np.asarray(self.weights, dtype=float)

    def to_dict(self):
        data = {"tag": self.tag}
        if self.tag == STUDENT_T:
            data["nu"] = float(self.nu)
        if self.tag == SCALE_MIXTURE:
            data["scales"] = [float(s) for s in self.scales]
            data["weights"] = [float(w) for w in self.weights]
        return data

    @classmethod
    def from_dict(cls, data):
        """Разбор описания семейства {"tag": ..., "nu": ...}"""
        data = data or {"tag": GAUSSIAN}
        return cls(
            tag=data.get("tag", GAUSSIAN),
            nu=data.get("nu"),
            scales=tuple(float(s) for s in data.get("scales", ())),
            weights=tuple(float(w) for w in data.get("weights", ())),
        )


def min_eigenvalue(matrix):
    """Минимальное собственное значение симметричной матрицы"""
    return float(np.linalg.eigvalsh(np.asarray(matrix, dtype=float)).min())


def check_psd(matrix, tol=PSD_TOL):
    """
    Проверка положительной полуопределенности с допуском, масштабированным по диагонали.

    Args:
        matrix: Симметричная матрица
        tol (float): Допуск

    Returns:
        bool: PSD ли матрица
    """
    matrix = np.asarray(matrix, dtype=float)
    scale = max(1.0, float(np.max(np.abs(np.diag(matrix))))) if matrix.size else 1.0
    return min_eigenvalue(matrix) >= -tol * scale


@dataclass(frozen=True)
class CovModel:
    """
    Модель с вектором средних и ковариационной (дисперсионной) матрицей.

    Attributes:
        mean (numpy.ndarray): Вектор μ
        cov (numpy.ndarray): Матрица Σ
        family (Generator): Семейство (gaussian или эллиптическое)
    """
    mean: np.ndarray
    cov: np.ndarray
    family: Generator = field(default_factory=Generator)

    def __post_init__(self):
        mean = np.asarray(self.mean)
        cov = np.asarray(self.cov)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] != mean.shape[0]:
            raise DimMismatch(f"Несогласованные размеры: μ {mean.shape}, Σ {cov.shape}")
        dense = cov.astype(float)
        if np.isnan(dense).any() or np.isnan(mean.astype(float)).any():
            raise DimMismatch("Модель содержит NaN")
        if not np.allclose(dense, dense.T, atol=1e-12):
            logger.error("Матрица Σ несимметрична")
            raise NotPsd("Матрица Σ несимметрична")
        if not check_psd(dense):
            logger.error(f"Матрица Σ не PSD (минимальное собственное значение {min_eigenvalue(dense):.3e})")
            raise NotPsd(f"Матрица Σ не PSD: минимальное собственное значение {min_eigenvalue(dense):.3e}")

    @property
    def dim(self):
        return len(self.mean)

    def to_dict(self):
        return {
            "mean": [float(v) for v in np.asarray(self.mean)],
            "cov": np.asarray(self.cov, dtype=float).tolist(),
            "family": self.family.to_dict(),
        }

    @classmethod
    def from_dict(cls, data):
        """Разбор JSON-описания {"mean", "cov", "family"}"""
        cov = np.asarray(data["cov"], dtype=float)
        mean = np.asarray(data.get("mean", np.zeros(len(cov))), dtype=float)
        return cls(mean=mean, cov=cov, family=Generator.from_dict(data.get("family")))
