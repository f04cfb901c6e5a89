"""
В данном модуле описаны все типы пакета SteinerKit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from .common.enums import LambdaKind
from .common.exceptions import InvalidInputError

THEOREM2_BOUND = 1.0 / 300.0
"""Граница постоянного λ, при которой Σ(λ) — дерево Штейнера для A_∞(λ)."""

THEOREM1_RATIO_BOUND = 1.0 / 5000.0
"""Граница каждого λ_i для суммируемых последовательностей."""

THEOREM1_SUM_BOUND = math.pi / 5040.0
"""Граница суммы λ_i для суммируемых последовательностей."""


# ---------------------------------------------------------------------------
# Геометрия
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Point:
    """
    Точка евклидовой плоскости.
    """
    x: float
    """Абсцисса."""
    y: float
    """Ордината."""

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInputError("Координаты точки должны быть конечными", "point", (self.x, self.y))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))

    def as_tuple(self) -> tuple[float, float]:
        return self.x, self.y

    def distance_to(self, other: Point) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Segment:
    """
    Замкнутый отрезок [ab] ненулевой длины.
    """
    a: Point
    b: Point

    def __post_init__(self):
        if self.a == self.b:
            raise InvalidInputError("Концы отрезка совпадают", "segment", self.a.as_tuple())


@dataclass(frozen=True)
class Line:
    """
    Прямая, заданная точкой и единичным направляющим вектором.
    Направление нормируется при создании.
    """
    origin: Point
    direction: tuple[float, float]

    def __post_init__(self):
        dx, dy = (float(v) for v in self.direction)
        norm = math.hypot(dx, dy)
        if not math.isfinite(norm) or norm == 0.0:
            raise InvalidInputError("Нулевой направляющий вектор прямой", "direction", self.direction)
        object.__setattr__(self, "direction", (dx / norm, dy / norm))

    @classmethod
    def through(cls, p: Point, q: Point) -> Line:
        return cls(p, (q.x - p.x, q.y - p.y))

    @classmethod
    def x_axis(cls) -> Line:
        return cls(Point(0.0, 0.0), (1.0, 0.0))


@dataclass(frozen=True)
class FermatResult:
    """
    Точка Ферма–Торричелли треугольника.
    """
    point: Point
    """Точка, минимизирующая сумму расстояний до вершин."""
    degenerate: bool
    """Есть ли угол ≥ 2π/3 (тогда точка совпадает с вершиной)."""
    tripod_length: float
    """Минимальная сумма расстояний."""
    attained_at_vertex: int | None = None
    """Индекс вершины (0, 1, 2) для вырожденного случая."""


# ---------------------------------------------------------------------------
# Фрактал Σ(Λ)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LambdaSequence:
    """
    Последовательность коэффициентов Λ = {λ_i}: λ_i — отношение длины ребра уровня i+1
    к длине ребра уровня i (уровень 0 — ребро y_0y_1 единичной длины).
    """
    kind: LambdaKind
    values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise InvalidInputError("Пустая последовательность λ", "values", self.values)
        if self.kind is LambdaKind.CONSTANT and len(values) != 1:
            raise InvalidInputError("Постоянная последовательность задается одним λ", "values", self.values)
        for i, v in enumerate(values):
            if not (math.isfinite(v) and 0.0 < v < 0.5):
                raise InvalidInputError("Каждое λ_i должно лежать в (0, 1/2)", f"lambda[{i}]", v)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, lam: float) -> LambdaSequence:
        return cls(LambdaKind.CONSTANT, (lam,))

    @classmethod
    def explicit(cls, values) -> LambdaSequence:
        return cls(LambdaKind.EXPLICIT, tuple(values))

    def effective(self, i: int) -> float:
        """
        λ_i (нумерация с нуля).

        :raises InvalidInputError: если явная последовательность короче i+1.
        """
        if i < 0:
            raise InvalidInputError("Отрицательный индекс λ", "i", i)
        if self.kind is LambdaKind.CONSTANT:
            return self.values[0]
        if i >= len(self.values):
            raise InvalidInputError("Явная последовательность λ слишком короткая", "i", i)
        return self.values[i]

    def edge_length(self, level: int) -> float:
        """Длина ребра уровня level: ∏_{j<level} λ_j."""
        length = 1.0
        for j in range(level):
            length *= self.effective(j)
        return length

    @property
    def ratio_bound(self) -> float:
        """Наибольшее λ_i, знаменатель геометрической оценки хвоста."""
        return max(self.values)

    @property
    def theorem2_regime(self) -> bool:
        return self.kind is LambdaKind.CONSTANT and self.values[0] < THEOREM2_BOUND

    @property
    def theorem1_regime(self) -> bool:
        if self.kind is LambdaKind.CONSTANT:
            return False
        return all(v < THEOREM1_RATIO_BOUND for v in self.values) and sum(self.values) < THEOREM1_SUM_BOUND

    def to_json_value(self) -> float | list[float]:
        if self.kind is LambdaKind.CONSTANT:
            return self.values[0]
        return list(self.values)

    @classmethod
    def from_json_value(cls, value) -> LambdaSequence:
        if isinstance(value, (list, tuple)):
            return cls.explicit(value)
        return cls.constant(value)


@dataclass(frozen=True)
class EmbeddedTree:
    """
    Конечная реализация Σ(Λ): вершины y_0, …, y_{2^depth − 1}; дети y_k — y_{2k} и y_{2k+1}.
    """
    sequence: LambdaSequence
    depth: int
    vertices: dict[int, Point]
    edges: tuple[tuple[int, int], ...]

    @staticmethod
    def level(k: int) -> int:
        """Уровень вершины: y_1 — уровень 0, y_2 и y_3 — уровень 1, …; y_0 считается уровнем 0."""
        return max(k.bit_length() - 1, 0)

    def point(self, k: int) -> Point:
        return self.vertices[k]

    def leaves(self) -> list[int]:
        return list(range(1 << (self.depth - 1), 1 << self.depth))

    def internal(self) -> list[int]:
        """Вершины ветвления y_1, …, y_{2^{depth−1} − 1}."""
        return list(range(1, 1 << (self.depth - 1)))

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.sequence.to_json_value(),
            "depth": self.depth,
            "vertices": [{"k": k, "x": p.x, "y": p.y} for k, p in sorted(self.vertices.items())],
            "edges": [[a, b] for a, b in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EmbeddedTree:
        try:
            sequence = LambdaSequence.from_json_value(data["lambda"])
            vertices = {int(v["k"]): Point(v["x"], v["y"]) for v in data["vertices"]}
            edges = tuple((int(a), int(b)) for a, b in data["edges"])
            depth = int(data["depth"])
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidInputError(f"Некорректный JSON дерева: {e}") from e
        return cls(sequence, depth, vertices, edges)


@dataclass(frozen=True)
class TerminalSet:
    """
    Конечное приближение A_∞(Λ): листья уровня level (и, при необходимости, y_0).
    """
    points: tuple[Point, ...]
    includes_root: bool
    tolerance: float
    """Гарантированная максимальная погрешность положения."""
    level: int
    """Уровень усечения N."""

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class ValidationReport:
    """
    Результат проверки вложения Σ(Λ).
    """
    crossings: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    """Пары пересекающихся ребер."""
    max_angle_deviation: float
    """Наибольшее |угол − 2π/3| в вершинах ветвления."""
    max_ratio_deviation: float
    """Наибольшее относительное отклонение отношения длин ребер от λ_i."""
    angle_excess: float
    """Отклонение угла сверх погрешности округления координат."""
    ratio_excess: float
    """Отклонение отношения сверх погрешности округления координат."""
    tolerance: float = 1e-9
    unresolved_edges: int = 0
    """Ребра короче погрешности округления координат; в поиске пересечений не участвуют."""

    @property
    def valid(self) -> bool:
        return not self.crossings and self.angle_excess < self.tolerance and self.ratio_excess < self.tolerance

    def to_dict(self) -> dict[str, Any]:
        return {
            "valid": self.valid,
            "crossings": [[list(e1), list(e2)] for e1, e2 in self.crossings],
            "max_angle_deviation": self.max_angle_deviation,
            "max_ratio_deviation": self.max_ratio_deviation,
            "angle_excess": self.angle_excess,
            "ratio_excess": self.ratio_excess,
            "unresolved_edges": self.unresolved_edges,
        }


# ---------------------------------------------------------------------------
# Решатель
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Topology:
    """
    Полная топология Штейнера: терминалы 0..n−1 (степень 1), точки Штейнера n..2n−3 (степень 3).
    """
    n: int
    edges: tuple[tuple[int, int], ...]
    canonical_id: int

    @property
    def steiner_ids(self) -> range:
        return range(self.n, 2 * self.n - 2)

    def neighbors(self, node: int) -> list[int]:
        return [b if a == node else a for a, b in self.edges if node in (a, b)]

    def degree(self, node: int) -> int:
        return len(self.neighbors(node))


class SolveOptions(BaseModel):
    """
    Параметры решателя.
    """
    model_config = ConfigDict(frozen=True)

    convergence_tol: float = Field(1e-13, gt=0)
    """Порог относительного изменения длины за проход."""
    max_iterations: int = Field(100_000, ge=1)
    prune_with_mst: bool = True
    parallelism: int = Field(1, ge=0)
    """Число процессов; 0 — все ядра."""
    record_history: bool = False
    chunk_size: int = Field(2048, ge=1)
    tie_tolerance: float = Field(1e-10, ge=0)
    """Относительный допуск, в пределах которого топологии считаются равными."""
    upper_bound: float | None = Field(None, gt=0)
    """Длина какого-либо дерева на тех же терминалах; стартовый рекорд для отсечения."""


@dataclass(frozen=True)
class SteinerSolution:
    """
    Геометрическая реализация топологии: положения точек Штейнера и длина.
    """
    topology: Topology
    terminals: tuple[Point, ...]
    steiner_points: tuple[Point, ...]
    length: float
    converged: bool
    collapsed_pairs: tuple[tuple[int, int], ...]
    """Пары смежных узлов, совпавших в пределах допуска."""
    min_angle: float
    """Наименьший угол между ребрами в реализованных вершинах степени ≥ 2."""
    ties: tuple[int, ...] = ()
    """canonical_id всех топологий с той же минимальной длиной."""
    iterations: int = 0
    history: tuple[float, ...] = field(default=(), repr=False)

    def position(self, node: int) -> Point:
        if node < self.topology.n:
            return self.terminals[node]
        return self.steiner_points[node - self.topology.n]

    def realized_degrees(self) -> dict[int, int]:
        """
        Степени вершин реализации: узлы из collapsed_pairs склеиваются в одну вершину
        (ключ — наименьший номер узла), схлопнутые ребра не считаются.
        """
        parent = list(range(2 * self.topology.n - 2))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for a, b in self.collapsed_pairs:
            ra, rb = find(a), find(b)
            parent[max(ra, rb)] = min(ra, rb)
        collapsed = set(self.collapsed_pairs)
        degrees = {find(i): 0 for i in range(len(parent))}
        for a, b in self.topology.edges:
            if (a, b) in collapsed or (b, a) in collapsed:
                continue
            degrees[find(a)] += 1
            degrees[find(b)] += 1
        return degrees

    def to_dict(self) -> dict[str, Any]:
        return {
            "length": self.length,
            "terminals": [list(p.as_tuple()) for p in self.terminals],
            "steiner_points": [list(p.as_tuple()) for p in self.steiner_points],
            "edges": [[a, b] for a, b in self.topology.edges],
            "topology_id": self.topology.canonical_id,
            "min_angle": self.min_angle,
            "ties": list(self.ties),
            "converged": self.converged,
            "collapsed_pairs": [list(p) for p in self.collapsed_pairs],
        }


# ---------------------------------------------------------------------------
# Отчеты верификатора
# ---------------------------------------------------------------------------

class LemmaReport(BaseModel):
    """
    Сериализуемый отчет одной проверки.
    """
    model_config = ConfigDict(populate_by_name=True)

    name: str
    inputs: dict[str, Any] = Field(default_factory=dict)
    computed_values: dict[str, Any] = Field(default_factory=dict)
    margins: dict[str, float] = Field(default_factory=dict)
    passed: bool = Field(serialization_alias="pass", validation_alias="pass")
    tolerances: dict[str, float] = Field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return self.model_dump(by_alias=True)


class LemmaZeroItem(BaseModel):
    """Оценки одного пункта леммы 0 (база 1 для (i), 1/4 для (ii))."""
    base: float
    tripod_upper: float
    two_seg_lower: float
    relaxed_lower: float
    margin: float
    """two_seg_lower − tripod_upper."""
    relaxed_margin: float
    """relaxed_lower − tripod_upper."""
    passed: bool


class LemmaZeroBounds(BaseModel):
    """
    Количественные неравенства леммы 0 и приложения.
    """
    lam: float
    eps: float
    item_i: LemmaZeroItem
    item_ii: LemmaZeroItem
    surgery_gain: float
    """18ε: выигрыш от удаления двух окружностей радиуса 9ε."""
    surgery_cost: float
    """(2π + 9)ε: цена добавленных дуги и отрезка."""
    surgery_margin: float
    surgery_passed: bool
    max_abs_delta: float
    """Наибольшее |Δ| при сдвиге B, C на окружности радиусов ε и 10ε."""
    delta_bound: float
    sampled_bounds_passed: bool
    passed: bool

    def to_report(self) -> LemmaReport:
        return LemmaReport(
            name="lemma0",
            inputs={"lambda": self.lam},
            computed_values={
                "eps": self.eps,
                "item_i": self.item_i.model_dump(),
                "item_ii": self.item_ii.model_dump(),
                "surgery_gain": self.surgery_gain,
                "surgery_cost": self.surgery_cost,
                "max_abs_delta": self.max_abs_delta,
                "delta_bound": self.delta_bound,
                "sampled_bounds_passed": self.sampled_bounds_passed,
            },
            margins={
                "item_i": self.item_i.relaxed_margin,
                "item_ii": self.item_ii.relaxed_margin,
                "item_i_two_segment": self.item_i.margin,
                "item_ii_two_segment": self.item_ii.margin,
                "surgery": self.surgery_margin,
                "delta": self.delta_bound - self.max_abs_delta,
            },
            passed=self.passed,
        )


@dataclass(frozen=True)
class LemmaOneConstruction:
    """
    Построение леммы 1 в системе координат Y_1 = (0, 0), T_1 = (1, 0).
    """
    lam: float
    y1: Point
    t1: Point
    b1: Point
    c1: Point
    d: Point
    e: Point
    f: Point
    z: Point
    z_l: Point
    z_r: Point
    v: Point
    v_l: Point
    v_r: Point
    axis: Line
    closed_form_error: float
    """Расхождение Z, Z_l, Z_r, найденных пересечением прямых, с явными формулами."""

    def points(self) -> dict[str, Point]:
        return {name: getattr(self, name) for name in
                ("y1", "t1", "b1", "c1", "d", "e", "f", "z", "z_l", "z_r", "v", "v_l", "v_r")}

    def to_report(self, tolerance: float = 1e-12) -> LemmaReport:
        return LemmaReport(
            name="lemma1_construction",
            inputs={"lambda": self.lam},
            computed_values={name: list(p.as_tuple()) for name, p in self.points().items()},
            margins={"closed_form": tolerance - self.closed_form_error},
            passed=self.closed_form_error <= tolerance,
            tolerances={"closed_form": tolerance},
        )


@dataclass(frozen=True)
class LemmaTwoScenario:
    """
    Семейство сетей леммы 2: ствол касается [Y_up Y_down] на смещении h от Y_2.
    """
    lam: float
    h: float
    y2: Point
    t2: Point
    b2: Point
    c2: Point
    y_up: Point
    y_down: Point
    h_s: float
    """Длина сети S со смещением h."""
    h_s1: float
    """Длина конкурента S_1 (симметризация нижней половины)."""
    h_s2: float
    """Длина конкурента S_2 (симметризация верхней половины)."""

    @property
    def averaging_error(self) -> float:
        return abs(self.h_s - 0.5 * (self.h_s1 + self.h_s2))

    @property
    def competitor_improves(self) -> bool:
        """min(H_S1, H_S2) < H_S, либо оба конкурента равны S."""
        if math.isclose(self.h_s1, self.h_s2, rel_tol=0.0, abs_tol=1e-15):
            return True
        return min(self.h_s1, self.h_s2) < self.h_s

    def to_report(self, tolerance: float = 1e-10) -> LemmaReport:
        return LemmaReport(
            name="lemma2_shift",
            inputs={"lambda": self.lam, "h": self.h},
            computed_values={"H_S": self.h_s, "H_S1": self.h_s1, "H_S2": self.h_s2,
                             "competitor_improves": self.competitor_improves},
            margins={"averaging": tolerance - self.averaging_error},
            passed=self.averaging_error <= tolerance and self.competitor_improves,
            tolerances={"averaging": tolerance},
        )


class TheoremReport(BaseModel):
    """
    Сравнение длины усечения Σ(λ) с длиной оптимального дерева для {y_0} ∪ {вершины уровня depth−1}.
    """
    lam: float
    depth: int
    n_terminals: int
    truncation_length: float
    oracle_length: float
    relative_gap: float
    per_step_lower_bounds: list[float]
    vertex_deviation: float
    topology_id: int
    ties: list[int] = Field(default_factory=list)
    tolerance: float = 1e-9
    passed: bool

    def to_report(self) -> LemmaReport:
        return LemmaReport(
            name="theorem",
            inputs={"lambda": self.lam, "depth": self.depth},
            computed_values={
                "truncation_length": self.truncation_length,
                "oracle_length": self.oracle_length,
                "per_step_lower_bounds": self.per_step_lower_bounds,
                "vertex_deviation": self.vertex_deviation,
                "topology_id": self.topology_id,
            },
            margins={"relative_gap": self.tolerance - self.relative_gap},
            passed=self.passed,
            tolerances={"relative_gap": self.tolerance},
        )
