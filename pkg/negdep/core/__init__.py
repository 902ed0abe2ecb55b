"""
Основные структуры: дискретные совместные распределения, числовые режимы и решатель ЛП
"""
