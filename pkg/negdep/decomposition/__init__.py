"""
Разложения совместных смесей
"""
