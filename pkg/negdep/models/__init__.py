"""
Построения гауссовских и эллиптических отрицательно зависимых совместных смесей
"""
