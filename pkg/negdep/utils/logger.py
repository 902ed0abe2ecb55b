"""
Модуль для настройки логгирования
"""

import logging
import os
import sys
from datetime import datetime


def get_logger(name, level=None):
    """
    Создание и настройка логгера.

    Консольный вывод идет в stderr: stdout занят JSON-отчетами CLI.
    Файловый журнал пишется только если задана переменная NEGDEP_LOG_DIR.

    Args:
        name (str): Имя логгера
        level (int): Уровень логгирования (по умолчанию из NEGDEP_LOG_LEVEL или INFO)

    Returns:
        logging.Logger: Настроенный логгер
    """
    logger = logging.getLogger(name)

    # Если логгер уже был настроен, возвращаем его
    if logger.handlers:
        return logger

    if level is None:
        level = os.environ.get("NEGDEP_LOG_LEVEL", "INFO").upper()

    logger.setLevel(level)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)

    formatter = logging.Formatter(
        '[%(asctime)s] [%(name)s] [%(levelname)s] - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    logs_dir = os.environ.get("NEGDEP_LOG_DIR")
    if logs_dir:
        os.makedirs(logs_dir, exist_ok=True)

        current_date = datetime.now().strftime('%Y-%m-%d')
        log_file = os.path.join(logs_dir, f'negdep_{current_date}.log')

        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    # Не дублируем сообщения через корневой логгер
    logger.propagate = False

    return logger


def set_level(level):
    """
    Смена уровня для всех уже созданных логгеров пакета.

    Args:
        level (str или int): Новый уровень
    """
    for name, obj in logging.Logger.manager.loggerDict.items():
        if name.startswith("negdep") and isinstance(obj, logging.Logger):
            obj.setLevel(level)
            for handler in obj.handlers:
                handler.setLevel(level)
