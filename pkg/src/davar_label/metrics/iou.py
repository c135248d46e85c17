"""Polygon IoU for convex boxes via Sutherland-Hodgman clipping."""

from __future__ import annotations

from ..errors import NonConvexPolygon
from ..geometry import GeoBox, Point, as_rectangle, is_convex, normalize_bbox, signed_area


def _clip(subject: list[Point], clip: list[Point]) -> list[Point]:
    """Clip ``subject`` by the convex, positively oriented polygon ``clip``."""
    output = subject
    n = len(clip)
    for i in range(n):
        if not output:
            break
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % n]
        ex, ey = bx - ax, by - ay

        def side(p: Point) -> float:
            return ex * (p[1] - ay) - ey * (p[0] - ax)

        inputs, output = output, []
        prev = inputs[-1]
        prev_side = side(prev)
        for cur in inputs:
            cur_side = side(cur)
            if cur_side >= 0:
                if prev_side < 0:
                    output.append(_cross_point(prev, cur, prev_side, cur_side))
                output.append(cur)
            elif prev_side >= 0:
                output.append(_cross_point(prev, cur, prev_side, cur_side))
            prev, prev_side = cur, cur_side
    return output


def _cross_point(p: Point, q: Point, sp: float, sq: float) -> Point:
    t = sp / (sp - sq)
    return p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])


def _rect_iou(a: tuple, b: tuple) -> float:
    iw = min(a[2], b[2]) - max(a[0], b[0])
    ih = min(a[3], b[3]) - max(a[1], b[1])
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    return inter / union


def polygon_iou(a: GeoBox, b: GeoBox) -> float:
    """Intersection over union of two convex boxes, in ``[0, 1]``.

    Exactly symmetric: the pair is put in a fixed order before clipping.

    Raises:
        DegenerateBox / InvalidBox: a box fails normalization.
        NonConvexPolygon: a polygon is not convex.
    """
    na, nb = normalize_bbox(a), normalize_bbox(b)
    for box in (na, nb):
        if as_rectangle(box) is None and not is_convex(box.vertices()):
            raise NonConvexPolygon(f"polygon {list(box.points)} is not convex")
    if na.points > nb.points:
        na, nb = nb, na
    if na.points == nb.points:
        return 1.0
    ra, rb = as_rectangle(na), as_rectangle(nb)
    if ra is not None and rb is not None:
        return _rect_iou(ra, rb)
    va, vb = na.vertices(), nb.vertices()
    area_a, area_b = signed_area(va), signed_area(vb)
    inter_poly = _clip(va, vb)
    inter = abs(signed_area(inter_poly)) if len(inter_poly) >= 3 else 0.0
    union = area_a + area_b - inter
    if union <= 0:
        return 0.0
    return min(1.0, max(0.0, inter / union))
