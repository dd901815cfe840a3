"""Tropical plane curves dual to regular subdivisions of a lattice polygon.

A height function strictly inside the secondary cone of a triangulation
induces, under the max-plus convention F(X) = max(h_p + <p, X>), a tropical
plane curve: one vertex per triangle (the point where its three monomials
tie), one bounded edge per interior edge of the subdivision, and one ray per
boundary edge.  Curve edges are orthogonal to their dual subdivision edges
and their weight is the lattice length of the dual edge, so curves dual to
unimodular triangulations are smooth: trivalent with all weights one.

The module also extracts the metric skeleton of a smooth curve (rays and
leaf edges removed, 2-valent vertices smoothed, edge lengths measured in
lattice length) and the vertical-projection cover onto the second
coordinate axis, which for curves in a Hirzebruch polygon is a degree-3
cover of a path.

Lengths here are always lattice lengths: Euclidean length divided by the
norm of the direction vector.  All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Mapping

from .errors import NotRegular, NotSmooth, WrongPolygon
from .graphs import MetricGraph
from .covers import TropicalCover
from .lattice import (
    Edge,
    HeightFunction,
    Point,
    Triangle,
    Triangulation,
    as_hirzebruch,
    bend_forms,
    evaluate_form,
    lattice_length,
    norm_triangle,
)
from .rationals import frac_str

ZERO = Fraction(0)
Vec = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class CurveEdge:
    """Bounded edge between two curve vertices, dual to an interior edge."""

    ends: tuple[int, int]
    direction: tuple[int, int]  # primitive, oriented from ends[0] to ends[1]
    weight: int
    length: Fraction  # lattice length
    dual: Edge


@dataclass(frozen=True)
class CurveRay:
    """Unbounded ray leaving a curve vertex, dual to a boundary edge."""

    origin: int
    direction: tuple[int, int]  # primitive, pointing away from the polygon
    weight: int
    dual: Edge


def _primitive(dx: int, dy: int) -> tuple[int, int]:
    g = gcd(abs(dx), abs(dy))
    return (dx // g, dy // g)


def _tie_point(tri: Triangle, h: Mapping[Point, Fraction]) -> Vec:
    """The point where the three lifted monomials of a triangle agree."""
    a, b, c = tri
    # <a-b, X> = h[b] - h[a]  and  <a-c, X> = h[c] - h[a]
    m00, m01 = a[0] - b[0], a[1] - b[1]
    m10, m11 = a[0] - c[0], a[1] - c[1]
    r0, r1 = h[b] - h[a], h[c] - h[a]
    det = m00 * m11 - m01 * m10
    x = Fraction(r0 * m11 - r1 * m01, det)
    y = Fraction(m00 * r1 - m10 * r0, det)
    return (x, y)


@dataclass(frozen=True)
class TropicalPlaneCurve:
    """The tropical curve dual to a triangulation with inducing heights.

    ``vertices[i]`` is the position of the vertex dual to ``triangles[i]``;
    bounded edges and rays carry their primitive direction, weight and (for
    edges) lattice length, plus the dual subdivision edge.
    """

    triangulation: Triangulation
    heights: HeightFunction
    triangles: tuple[Triangle, ...]
    vertices: tuple[Vec, ...]
    edges: tuple[CurveEdge, ...]
    rays: tuple[CurveRay, ...]

    def is_smooth(self) -> bool:
        return self.triangulation.is_unimodular()

    def newton_subdivision(self) -> set[frozenset[Point]]:
        """The subdivision recovered from the curve's cell duality."""
        return {frozenset(t) for t in self.triangles}

    def balancing_residuals(self) -> dict[int, tuple[int, int]]:
        """Sum of weight times primitive direction around every vertex."""
        out = {i: (0, 0) for i in range(len(self.vertices))}

        def add(i: int, d: tuple[int, int], w: int) -> None:
            out[i] = (out[i][0] + w * d[0], out[i][1] + w * d[1])

        for e in self.edges:
            add(e.ends[0], e.direction, e.weight)
            add(e.ends[1], (-e.direction[0], -e.direction[1]), e.weight)
        for r in self.rays:
            add(r.origin, r.direction, r.weight)
        return out

    def to_json(self) -> dict:
        return {
            "triangulation": self.triangulation.to_json(),
            "heights": self.heights.to_json(),
            "vertices": [[frac_str(x), frac_str(y)] for x, y in self.vertices],
            "edges": [
                {
                    "ends": list(e.ends),
                    "direction": list(e.direction),
                    "weight": e.weight,
                    "length": frac_str(e.length),
                }
                for e in self.edges
            ],
            "rays": [
                {"origin": r.origin, "direction": list(r.direction), "weight": r.weight}
                for r in self.rays
            ],
        }


def dual_tropical_curve(T: Triangulation, h: HeightFunction) -> TropicalPlaneCurve:
    """Build the tropical plane curve dual to T under the heights h.

    h must induce T (every bend strictly positive); otherwise the dual
    cells would not match the triangulation and NotRegular is raised.
    """
    values = h.values
    for e, form in bend_forms(T).items():
        if evaluate_form(form, values) <= 0:
            raise NotRegular(f"heights do not induce the triangulation: bend at {e} is not positive")

    triangles = tuple(sorted(T.triangles))
    index = {t: i for i, t in enumerate(triangles)}
    positions = tuple(_tie_point(t, values) for t in triangles)

    edges = []
    rays = []
    for e, thirds in sorted(T.edge_thirds().items()):
        (a, b) = e
        w = lattice_length(a, b)
        perp = _primitive(-(b[1] - a[1]), b[0] - a[0])
        if len(thirds) == 2:
            t1 = index[norm_triangle(a, b, thirds[0])]
            t2 = index[norm_triangle(a, b, thirds[1])]
            if t2 < t1:
                t1, t2 = t2, t1
            dx = positions[t2][0] - positions[t1][0]
            dy = positions[t2][1] - positions[t1][1]
            # the edge is orthogonal to its dual: delta = t * perp, t != 0
            t = dx / perp[0] if perp[0] else dy / perp[1]
            assert t != 0 and dx == t * perp[0] and dy == t * perp[1]
            direction = perp if t > 0 else (-perp[0], -perp[1])
            edges.append(CurveEdge(
                ends=(t1, t2), direction=direction, weight=w, length=abs(t) * w, dual=e))
        else:
            c = thirds[0]
            # outward: away from the third vertex of the unique triangle
            inward = (c[0] - a[0]) * perp[0] + (c[1] - a[1]) * perp[1]
            assert inward != 0
            direction = perp if inward < 0 else (-perp[0], -perp[1])
            rays.append(CurveRay(
                origin=index[norm_triangle(a, b, c)], direction=direction, weight=w, dual=e))
    return TropicalPlaneCurve(
        triangulation=T,
        heights=h,
        triangles=triangles,
        vertices=positions,
        edges=tuple(edges),
        rays=tuple(rays),
    )


# ---------------------------------------------------------------------------
# skeleton extraction
# ---------------------------------------------------------------------------


def _prune_and_smooth(
    vertices: Iterable[int],
    edges: list[tuple[int, int, object]],
    combine: Callable[[object, object], object],
):
    """Drop leaf edges, then smooth 2-valent vertices, combining payloads.

    The payload of a smoothed chain is the ``combine`` of its pieces; a
    vertex whose two ends belong to one loop cannot be smoothed and stays.
    Deterministic: vertices are processed in sorted order.
    """
    verts = set(vertices)
    live = dict(enumerate(edges))

    def valence(v: int) -> int:
        return sum((u == v) + (w == v) for u, w, _ in live.values())

    changed = True
    while changed:
        changed = False
        for v in sorted(verts):
            if valence(v) == 1:
                eid = next(i for i, (u, w, _) in live.items() if v in (u, w))
                del live[eid]
                verts.discard(v)
                changed = True
        for v in sorted(verts):
            inc = [i for i, (u, w, _) in live.items() if v in (u, w)]
            if len(inc) != 2:
                continue
            e1, e2 = inc
            u1, w1, p1 = live[e1]
            u2, w2, p2 = live[e2]
            if u1 == w1 or u2 == w2:
                continue  # a loop end: this vertex closes a cycle
            a = u1 if w1 == v else w1
            b = u2 if w2 == v else w2
            del live[e1], live[e2]
            live[max(live, default=-1) + 1] = (a, b, combine(p1, p2))
            verts.discard(v)
            changed = True
    return sorted(verts), [live[i] for i in sorted(live)]


def skeleton(C: TropicalPlaneCurve) -> MetricGraph:
    """Metric skeleton of a smooth curve: the loop-carrying core.

    Rays are discarded, leaf edges deleted iteratively, and 2-valent
    vertices smoothed away with lattice lengths adding up.  The result has
    one vertex per surviving dual triangle (ids keep the triangle index)
    and genus equal to the number of interior points of the polygon.
    """
    if not C.is_smooth():
        raise NotSmooth("skeletons are extracted from smooth curves only")
    verts, edges = _prune_and_smooth(
        range(len(C.vertices)),
        [(e.ends[0], e.ends[1], e.length) for e in C.edges],
        lambda x, y: x + y,
    )
    return MetricGraph(verts, edges)


Form = dict[Point, int]


@dataclass(frozen=True)
class SkeletonForms:
    """The skeleton of every curve dual to one triangulation, symbolically.

    Within the secondary cone the combinatorics do not move, so the
    skeleton is determined by T alone and each edge length is a linear form
    in the heights — the sum of the bends along the smoothed chain.
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, Form], ...]

    def evaluate(self, h: HeightFunction) -> MetricGraph:
        return MetricGraph(
            self.vertices,
            [(u, v, evaluate_form(f, h.values)) for u, v, f in self.edges],
        )


def skeleton_length_forms(T: Triangulation) -> SkeletonForms:
    """Symbolic skeleton of a unimodular triangulation.

    Dual graph on triangles, pruned and smoothed combinatorially; each
    surviving edge carries the height-linear form giving its lattice
    length (for unimodular duals the length across one interior edge is
    exactly its bend).
    """
    if not T.is_unimodular():
        raise NotSmooth("symbolic skeletons require a unimodular triangulation")
    triangles = sorted(T.triangles)
    index = {t: i for i, t in enumerate(triangles)}
    forms = bend_forms(T)

    def add(f: Form, g: Form) -> Form:
        out = dict(f)
        for p, c in g.items():
            out[p] = out.get(p, 0) + c
        return {p: c for p, c in out.items() if c != 0}

    raw = []
    for e, (c, d) in sorted(T.interior_edges().items()):
        a, b = e
        t1, t2 = index[norm_triangle(a, b, c)], index[norm_triangle(a, b, d)]
        raw.append((min(t1, t2), max(t1, t2), forms[e]))
    verts, edges = _prune_and_smooth(range(len(triangles)), raw, add)
    return SkeletonForms(tuple(verts), tuple(edges))


# ---------------------------------------------------------------------------
# projection to the second coordinate
# ---------------------------------------------------------------------------


def projection_cover(C: TropicalPlaneCurve) -> TropicalCover:
    """The vertical projection of a smooth Hirzebruch curve, as a cover.

    Every curve vertex keeps its second coordinate as height; an edge of
    primitive direction (u, v) and weight w maps with dilation w·|v|
    (horizontal edges are contracted) and rays become signed legs.  For a
    curve dual to a Hirzebruch polygon the three downward rays of the
    bottom edge make the degree exactly 3.
    """
    if not C.is_smooth():
        raise NotSmooth("the projection cover is defined for smooth curves")
    if as_hirzebruch(C.triangulation.polygon) is None:
        raise WrongPolygon("the dual polygon is not a Hirzebruch trapezoid")
    source = MetricGraph(
        range(len(C.vertices)),
        [(e.ends[0], e.ends[1], e.length) for e in C.edges],
        [r.origin for r in C.rays],
    )
    height = {i: pos[1] for i, pos in enumerate(C.vertices)}
    mu = {i: e.weight * abs(e.direction[1]) for i, e in enumerate(C.edges)}
    leg_mu = {i: r.weight * r.direction[1] for i, r in enumerate(C.rays)}
    return TropicalCover(source, height, mu, leg_mu)
