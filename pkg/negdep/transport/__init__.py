"""
Робастный многомаргинальный транспорт на решетках
"""
