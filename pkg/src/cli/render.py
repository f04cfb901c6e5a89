"""
SVG-рисунок Σ(Λ): ребро — элемент <line>, листья и корень — точки, ось симметрии — пунктир.
"""
from __future__ import annotations

from SteinerKit.types import EmbeddedTree

MARGIN = 0.05
DOT_RADIUS = 2.0


def _num(value: float) -> str:
    return f"{value:.6f}"


def render_svg(tree: EmbeddedTree, scale: float = 500.0, axis: bool = False) -> str:
    """
    Детерминированный SVG: единица длины — scale пикселей, поля 5% от большей стороны,
    ось y направлена вверх, координаты с 6 знаками после запятой.
    """
    xs = [p.x for p in tree.vertices.values()]
    ys = [p.y for p in tree.vertices.values()]
    min_x, max_x, min_y, max_y = min(xs), max(xs), min(ys), max(ys)
    width, height = (max_x - min_x) * scale, (max_y - min_y) * scale
    margin = MARGIN * max(width, height)

    def px(x: float, y: float) -> tuple[str, str]:
        return _num((x - min_x) * scale + margin), _num((max_y - y) * scale + margin)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width + 2 * margin)}" '
        f'height="{_num(height + 2 * margin)}" viewBox="0 0 {_num(width + 2 * margin)} {_num(height + 2 * margin)}">',
    ]
    if axis:
        x0, y0 = px(min_x, 0.0)
        x1, _ = px(max_x, 0.0)
        lines.append(f'  <path d="M {x0} {y0} H {x1}" stroke="#999999" stroke-width="1" '
                     f'stroke-dasharray="6 4" fill="none"/>')
    lines.append('  <g stroke="#1f3b73" stroke-width="1" stroke-linecap="round">')
    for a, b in tree.edges:
        x1, y1 = px(*tree.point(a).as_tuple())
        x2, y2 = px(*tree.point(b).as_tuple())
        lines.append(f'    <line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
    lines.append("  </g>")
    lines.append('  <g fill="#c0392b">')
    for k in [0, *tree.leaves()]:
        cx, cy = px(*tree.point(k).as_tuple())
        lines.append(f'    <circle cx="{cx}" cy="{cy}" r="{_num(DOT_RADIUS)}"/>')
    lines.append("  </g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
