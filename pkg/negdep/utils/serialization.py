"""
Чтение входных JSON-файлов и запись отчетов (JSON и CSV)
"""

import json
import os
from datetime import datetime

from ..core.distribution import UnivariateDiscrete, make_joint
from ..core.numeric import NumberMode
from ..exceptions import BadProbabilityVector
from ..models.families import CovModel
from .logger import get_logger

logger = get_logger(__name__)


def load_json(path):
    """
    Чтение JSON-файла в кодировке UTF-8.

    Args:
        path (str): Путь к файлу

    Returns:
        dict или list: Содержимое
    """
    if not os.path.exists(path):
        logger.error(f"Файл не найден: {path}")
        raise FileNotFoundError(f"Файл не найден: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def dumps(data):
    """Сериализация с сортировкой ключей (одинаковый ввод дает одинаковый вывод)"""
    return json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True)


def save_json(data, path):
    """
    Запись JSON-файла.

    Args:
        data (dict): Данные
        path (str): Путь к файлу

    Returns:
        str: Путь к файлу
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(data))
        f.write("\n")
    logger.info(f"Отчет сохранен в {path}")
    return path


def _resolve_mode(data, mode):
    if mode is not None:
        return NumberMode.parse(mode)
    if isinstance(data, dict) and data.get("number_mode"):
        return NumberMode.parse(data["number_mode"])
    return NumberMode.FLOAT


def distribution_from_dict(data, mode=None):
    """
    Распределение из словаря {"dim", "atoms": [{"x", "p"}], "number_mode"}.

    Args:
        data (dict): Описание
        mode (NumberMode): Режим (по умолчанию из описания)

    Returns:
        DiscreteJoint: Распределение
    """
    mode = _resolve_mode(data, mode)
    if "atoms" not in data:
        raise BadProbabilityVector("В описании распределения нет поля atoms")
    atoms = [(atom["x"], atom["p"]) for atom in data["atoms"]]
    return make_joint(atoms, dim=data.get("dim"), mode=mode)


def marginals_from_dict(data, mode=None):
    """
    Маргиналы из словаря {"marginals": [{"support", "probs"}], "number_mode"}
    или из списка таких описаний.

    Args:
        data (dict или list): Описание
        mode (NumberMode): Режим

    Returns:
        list: Список UnivariateDiscrete
    """
    mode = _resolve_mode(data, mode)
    items = data["marginals"] if isinstance(data, dict) else data
    if not items:
        raise BadProbabilityVector("Пустой список маргиналов")
    return [UnivariateDiscrete.from_values(item["support"], item["probs"], mode) for item in items]


def load_distribution(path, mode=None):
    """Распределение из JSON-файла"""
    return distribution_from_dict(load_json(path), mode)


def load_marginals(path, mode=None):
    """Маргиналы из JSON-файла"""
    return marginals_from_dict(load_json(path), mode)


def load_model(path):
    """Ковариационная модель из JSON-файла {"mean", "cov", "family"}"""
    return CovModel.from_dict(load_json(path))


def frames_to_csv(frames, output_dir, prefix="component"):
    """
    Запись таблиц pandas в CSV (по файлу на таблицу).

    Args:
        frames (list): Список pandas.DataFrame
        output_dir (str): Директория
        prefix (str): Префикс имен файлов

    Returns:
        list: Пути к файлам
    """
    os.makedirs(output_dir, exist_ok=True)
    paths = []
    for k, frame in enumerate(frames):
        path = os.path.join(output_dir, f"{prefix}_{k}.csv")
        frame.to_csv(path, index=False, encoding="utf-8")
        paths.append(path)
    logger.info(f"Сохранено {len(paths)} таблиц в {output_dir}")
    return paths


def build_report(config, status, result):
    """
    Отчет команды: конфигурация запуска, статус и результат.

    Args:
        config (RunConfig): Конфигурация
        status (str): ok, negative или error
        result (dict): Результат команды

    Returns:
        dict: Отчет
    """
    return {
        "command": config.command,
        "config": config.to_dict(),
        "timestamp": datetime.now().isoformat(timespec="seconds"),
        "status": status,
        "result": result,
    }
