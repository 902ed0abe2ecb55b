"""
Проверки понятий отрицательной зависимости и структурного признака NA
"""
