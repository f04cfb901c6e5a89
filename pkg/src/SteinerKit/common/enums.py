from __future__ import annotations
from enum import Enum


class LambdaKind(Enum):
    """
    В данном классе перечислены виды последовательностей коэффициентов Λ.
    """
    CONSTANT = "constant"
    """Постоянная последовательность λ_i = λ."""

    EXPLICIT = "explicit"
    """Явно заданный конечный список λ_0, λ_1, …"""


class Command(Enum):
    """
    Команды интерфейса командной строки.
    """
    GENERATE = "generate"
    """Построение Σ(Λ) и экспорт дерева/терминалов."""

    SOLVE = "solve"
    """Точное решение задачи Штейнера для набора терминалов."""

    VERIFY = "verify"
    """Проверка лемм 0, 1, 2."""

    THEOREM = "theorem"
    """Проверка теоремы на усечении глубины ≤ 4."""

    DIMENSION = "dimension"
    """Оценка размерности методом подсчета клеток."""

    RENDER = "render"
    """SVG-рисунок дерева."""

    SERVE = "serve"
    """HTTP API."""


class OutputFormat(Enum):
    """
    Форматы вывода.
    """
    JSON = "json"
    CSV = "csv"
    SVG = "svg"

