"""
Основной класс для комплексного анализа зависимости дискретного распределения
"""

import os
import json
from datetime import datetime

from ..config import DEFAULT_CAPS
from ..core.distribution import validate, moments
from ..core.lp_solver import SimplexSolver
from ..utils.logger import get_logger
from .conditional import check_conditional_structure
from .dependence import (
    CAP_ERRORS, DependenceReport, ChainReport, audit_chain, combine_nod, skipped,
    is_ncd, is_nlod, is_nuod, is_nsd, is_na, is_ct, jm_verdict,
)

logger = get_logger(__name__)


class DependenceAnalyzer:
    """
    Класс для комплексной проверки понятий отрицательной зависимости
    с кэшированием промежуточных результатов.
    """

    def __init__(self, distribution, tol=None, caps=DEFAULT_CAPS, solver=None):
        """
        Инициализация анализатора.

        Args:
            distribution (DiscreteJoint): Распределение
            tol (float): Допуск знака (режим float)
            caps (Caps): Пределы сетки, перебора и размера ЛП
            solver (SimplexSolver): Решатель ЛП для проверки NSD
        """
        self.distribution = validate(distribution)
        self.tol = tol
        self.caps = caps
        self._solver = solver

        logger.info(
            f"Инициализация анализатора: размерность {self.distribution.dim}, "
            f"{len(self.distribution)} атомов, режим {self.distribution.mode.value}"
        )

        # Моменты вычисляются по требованию
        self._moments = None

        # Результаты анализа
        self.verdicts = {}
        self.structure_result = None
        self.chain_result = None

    @property
    def solver(self):
        """Ленивая инициализация решателя ЛП"""
        if self._solver is None:
            logger.info("Инициализация решателя ЛП")
            self._solver = SimplexSolver(mode=self.distribution.mode, caps=self.caps)
        return self._solver

    @property
    def moments(self):
        """Ленивое вычисление моментов"""
        if self._moments is None:
            self._moments = moments(self.distribution)
        return self._moments

    def _run(self, notion, func):
        try:
            verdict = func()
        except CAP_ERRORS as exc:
            verdict = skipped(notion, f"{type(exc).__name__}: {exc}", self.distribution)
        self.verdicts[notion] = verdict
        return verdict

    def check_covariance(self):
        """
        Проверка NCD.

        Returns:
            Verdict: Вердикт
        """
        logger.info("Проверка NCD")
        return self._run("NCD", lambda: is_ncd(self.distribution, self.tol, summary=self.moments))

    def check_orthants(self):
        """
        Проверка NLOD, NUOD и NOD.

        Returns:
            dict: Вердикты {понятие: Verdict}
        """
        logger.info("Проверка ортантной зависимости")
        lower = self._run("NLOD", lambda: is_nlod(self.distribution, self.tol, self.caps.grid))
        upper = self._run("NUOD", lambda: is_nuod(self.distribution, self.tol, self.caps.grid))
        self.verdicts["NOD"] = combine_nod(lower, upper)
        return {"NLOD": lower, "NUOD": upper, "NOD": self.verdicts["NOD"]}

    def check_supermodular(self):
        """
        Проверка NSD.

        Returns:
            Verdict: Вердикт
        """
        logger.info("Проверка NSD")
        return self._run("NSD", lambda: is_nsd(self.distribution, None, self.caps.grid, self.solver))

    def check_association(self):
        """
        Проверка NA.

        Returns:
            Verdict: Вердикт
        """
        logger.info("Проверка NA")
        return self._run("NA", lambda: is_na(self.distribution, self.tol, self.caps.upper_sets))

    def check_counter_monotonic(self):
        """
        Проверка CT.

        Returns:
            Verdict: Вердикт
        """
        logger.info("Проверка CT")
        return self._run("CT", lambda: is_ct(self.distribution, self.tol))

    def check_joint_mix(self):
        """Проверка JM"""
        return self._run("JM", lambda: jm_verdict(self.distribution))

    def check_structure(self):
        """
        Проверка структурного признака NA для совместных смесей.

        Returns:
            ConditionalReport: Итог проверки
        """
        logger.info("Проверка условной структуры")
        self.structure_result = check_conditional_structure(self.distribution, cap=self.caps.upper_sets)
        return self.structure_result

    def analyze_all(self):
        """
        Полный анализ: все проверки и аудит цепочки импликаций.

        Returns:
            ChainReport: Вердикты и нарушения цепочки
        """
        logger.info("Запуск полного анализа зависимости")

        self.check_covariance()
        self.check_orthants()
        self.check_supermodular()
        self.check_association()
        self.check_counter_monotonic()
        self.check_joint_mix()

        report = DependenceReport(
            dim=self.distribution.dim,
            mode=self.distribution.mode,
            verdicts={name: self.verdicts[name] for name in
                      ("NCD", "NLOD", "NUOD", "NOD", "NSD", "NA", "CT", "JM")},
        )
        self.chain_result = ChainReport(report=report, violations=audit_chain(report))
        summary = ", ".join(f"{k}={v.status.value}" for k, v in report.verdicts.items())
        logger.info(f"Вердикты: {summary}")
        return self.chain_result

    def save_results(self, output_dir, name="distribution"):
        """
        Сохранение результатов анализа в указанную директорию.

        Args:
            output_dir (str): Путь для сохранения результатов
            name (str): Префикс имени поддиректории

        Returns:
            str: Путь к сохраненным результатам
        """
        os.makedirs(output_dir, exist_ok=True)

        # Создаем поддиректорию с временной меткой
        timestamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
        result_dir = os.path.join(output_dir, f"{name}_{timestamp}")
        os.makedirs(result_dir, exist_ok=True)

        logger.info(f"Сохранение результатов анализа в {result_dir}")

        if self.chain_result is not None:
            report_file = os.path.join(result_dir, "report.json")
            with open(report_file, 'w', encoding='utf-8') as f:
                report = self.chain_result.to_dict()
                report["moments"] = self.moments.to_dict()
                json.dump(report, f, ensure_ascii=False, indent=2)

            verdicts_file = os.path.join(result_dir, "verdicts.csv")
            self.chain_result.report.to_frame().to_csv(verdicts_file, index=False, encoding='utf-8')

        if self.structure_result is not None:
            structure_file = os.path.join(result_dir, "structure.json")
            with open(structure_file, 'w', encoding='utf-8') as f:
                json.dump(self.structure_result.to_dict(), f, ensure_ascii=False, indent=2)

        return result_dir


def check_chain(d, tol=None, caps=DEFAULT_CAPS, solver=None):
    """
    Запуск всех проверок и аудит цепочки CT => NA => NSD => NOD => (NUOD, NLOD) => NCD
    (и JM => CT при n = 2).

    Превышение пределов сетки или перебора превращает вердикт в skipped.

    Args:
        d (DiscreteJoint): Распределение
        tol (float): Допуск знака
        caps (Caps): Пределы
        solver (SimplexSolver): Решатель ЛП для NSD

    Returns:
        ChainReport: Вердикты и найденные нарушения
    """
    return DependenceAnalyzer(d, tol=tol, caps=caps, solver=solver).analyze_all()
