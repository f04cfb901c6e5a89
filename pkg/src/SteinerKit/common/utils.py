"""
В данном модуле написаны вспомогательные функции: чтение и запись дерева, терминалов и отчетов.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable

from .exceptions import InvalidInputError


def write_json(path: str | Path, data: Any):
    """
    Записывает JSON (UTF-8, отступ 2), создавая недостающие каталоги.

    :raises OSError: путь недоступен для записи.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2)
        f.write("\n")


def read_json(path: str | Path) -> Any:
    """
    Читает JSON-файл.

    :raises OSError: файл недоступен.
    :raises InvalidInputError: файл не является корректным JSON.
    """
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidInputError(f"Некорректный JSON в {path}: {e.msg}", "line", e.lineno) from e


def format_coordinate(value: float) -> str:
    """17 значащих цифр: достаточно для точного восстановления double."""
    return format(value, ".17g")


def write_points_csv(path: str | Path, points: Iterable[tuple[float, float]]):
    """Записывает точки в CSV с заголовком x,y."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["x", "y"])
        for x, y in points:
            writer.writerow([format_coordinate(x), format_coordinate(y)])


def read_points(path: str | Path) -> list[tuple[float, float]]:
    """
    Читает точки из CSV (x,y на строку, заголовок необязателен) или JSON
    (список пар, либо объект с ключом "points" или "terminals").

    :raises OSError: файл недоступен.
    :raises InvalidInputError: файл не содержит корректных точек.
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        data = read_json(path)
        if isinstance(data, dict):
            data = data.get("points", data.get("terminals"))
        return parse_points(data)

    rows = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for i, row in enumerate(csv.reader(f)):
            if not row or all(not cell.strip() for cell in row):
                continue
            if i == 0 and row[0].strip().lower() == "x":
                continue
            rows.append(row)
    return parse_points(rows)


def parse_points(data: Any) -> list[tuple[float, float]]:
    """
    Приводит список пар (строки или числа) к списку точек.

    :raises InvalidInputError: не пары чисел.
    """
    if not isinstance(data, (list, tuple)) or not data:
        raise InvalidInputError("Ожидается непустой список точек")
    points = []
    for i, item in enumerate(data):
        try:
            x, y = item
            points.append((float(x), float(y)))
        except (TypeError, ValueError) as e:
            raise InvalidInputError("Точка должна быть парой чисел", f"points[{i}]", item) from e
    return points


def parse_points_arg(text: str) -> list[tuple[float, float]]:
    """Разбирает строку вида "0,0 1,0 0.5,0.8" (пары через пробел или точку с запятой)."""
    pairs = [chunk.split(",") for chunk in text.replace(";", " ").split()]
    return parse_points(pairs)
