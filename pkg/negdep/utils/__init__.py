"""
Вспомогательные утилиты: логгирование и сериализация отчетов
"""
