"""Box geometry: the two accepted box encodings and their canonical polygon form.

A box is a flat coordinate list in image pixels (origin top-left, x right,
y down). Four values are an axis-aligned ``[x1, y1, x2, y2]`` rectangle; an
even count of at least eight is a closed polygon ``[x1, y1, x2, y2, ...]``.

Canonical orientation is the one with positive signed shoelace area, which
for a y-down frame is the vertex order top-left, top-right, bottom-right,
bottom-left of a rectangle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Tuple, Union

from .errors import DegenerateBox, InvalidBox

Number = Union[int, float]
Point = Tuple[Number, Number]


def is_number(value: object) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


@dataclass(frozen=True)
class GeoBox:
    """One annotation box, stored exactly as authored."""

    points: Tuple[Number, ...]

    @classmethod
    def of(cls, values: Iterable[Number]) -> "GeoBox":
        return cls(tuple(values))

    @property
    def is_axis_aligned(self) -> bool:
        return len(self.points) == 4

    def problem(self) -> str | None:
        """Describe why this box breaks the box invariants, or return None."""
        n = len(self.points)
        if n != 4 and (n < 8 or n % 2):
            return f"box has {n} coordinates; expected 4 or an even number >= 8"
        if n == 4:
            x1, y1, x2, y2 = self.points
            if not (x2 > x1 and y2 > y1):
                return f"axis-aligned box needs x2 > x1 and y2 > y1, got {list(self.points)}"
            return None
        if signed_area(self.vertices()) == 0:
            return "polygon has zero area"
        return None

    def vertices(self) -> list[Point]:
        """Vertex list; an axis-aligned box expands to its four corners."""
        p = self.points
        if len(p) == 4:
            x1, y1, x2, y2 = p
            return [(x1, y1), (x2, y1), (x2, y2), (x1, y2)]
        if len(p) % 2:
            raise InvalidBox(f"odd coordinate count {len(p)}")
        return [(p[i], p[i + 1]) for i in range(0, len(p), 2)]

    def area(self) -> float:
        return abs(signed_area(self.vertices()))

    def hull(self) -> tuple[Number, Number, Number, Number]:
        """Axis-aligned bounding rectangle ``(xmin, ymin, xmax, ymax)``."""
        xs = self.points[0::2]
        ys = self.points[1::2]
        return min(xs), min(ys), max(xs), max(ys)

    def map_points(self, fn: Callable[[Number, Number], Point]) -> "GeoBox":
        """Apply ``fn`` to every stored coordinate pair, keeping the encoding.

        For the axis-aligned form the two corners are mapped and re-sorted so
        the result is again ``[xmin, ymin, xmax, ymax]``.
        """
        p = self.points
        if len(p) % 2:
            raise InvalidBox(f"odd coordinate count {len(p)}")
        if len(p) == 4:
            ax, ay = fn(p[0], p[1])
            bx, by = fn(p[2], p[3])
            return GeoBox((min(ax, bx), min(ay, by), max(ax, bx), max(ay, by)))
        out: list[Number] = []
        for i in range(0, len(p), 2):
            out.extend(fn(p[i], p[i + 1]))
        return GeoBox(tuple(out))


def signed_area(vertices: Sequence[Point]) -> float:
    """Shoelace signed area; positive for canonical orientation."""
    n = len(vertices)
    total = 0
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total / 2


def normalize_bbox(box: GeoBox) -> GeoBox:
    """Rewrite ``box`` as a canonical polygon.

    Axis-aligned boxes become their 4-vertex polygon, clockwise-stored
    polygons are reversed, and the vertex list is rotated so it starts at the
    vertex with the smallest ``(y, x)``.

    Raises:
        InvalidBox: coordinate count is neither 4 nor an even number >= 8.
        DegenerateBox: the box has zero area.
    """
    n = len(box.points)
    if n != 4 and (n < 8 or n % 2):
        raise InvalidBox(f"box has {n} coordinates; expected 4 or an even number >= 8")
    verts = box.vertices()
    area = signed_area(verts)
    if area == 0:
        raise DegenerateBox(f"zero-area box {list(box.points)}")
    if area < 0:
        verts.reverse()
    start = min(range(len(verts)), key=lambda i: (verts[i][1], verts[i][0]))
    verts = verts[start:] + verts[:start]
    return GeoBox(tuple(c for v in verts for c in v))


def is_convex(vertices: Sequence[Point]) -> bool:
    """True when a positively oriented polygon turns left (or straight) at every vertex."""
    n = len(vertices)
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        cx, cy = vertices[(i + 2) % n]
        if (bx - ax) * (cy - by) - (by - ay) * (cx - bx) < 0:
            return False
    return True


def as_rectangle(box: GeoBox) -> tuple[Number, Number, Number, Number] | None:
    """Return ``(x1, y1, x2, y2)`` when ``box`` is an axis-aligned rectangle."""
    if len(box.points) == 4:
        return box.points  # type: ignore[return-value]
    if len(box.points) != 8:
        return None
    x1, y1, x2, y2, x3, y3, x4, y4 = box.points
    if y1 == y2 and x2 == x3 and y3 == y4 and x4 == x1:
        pass
    elif x1 == x2 and y2 == y3 and x3 == x4 and y4 == y1:
        pass
    else:
        return None
    xs = (x1, x2, x3, x4)
    ys = (y1, y2, y3, y4)
    return min(xs), min(ys), max(xs), max(ys)
