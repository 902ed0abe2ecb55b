"""
NegDep - библиотека для построения и проверки отрицательно зависимых
совместных смесей (joint mixes) и робастного многомаргинального транспорта
"""

__version__ = "0.1.0"
