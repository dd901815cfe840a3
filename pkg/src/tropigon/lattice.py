"""Lattice polygons, unimodular triangulations, and regularity certificates.

Conventions fixed here and inherited by the dual-curve module:

* polygons are counterclockwise lists of lattice points in strictly convex
  position;
* triangulations use *all* lattice points of the polygon as vertices, so by
  Pick's theorem every triangle of lattice area 1/2 is automatically empty
  and the triangulation is unimodular;
* regularity uses the upper-face (max-plus) convention: a height function h
  induces the subdivision obtained by projecting the upper faces of the
  lifted point set {(p, h(p))}, and T is regular iff some h induces exactly T.

All arithmetic is exact (integers and `Fraction`); no floats anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import BadMaroniParameter, MaroniRange, NotRegular, ParityMismatch
from .simplex import strict_feasible

Point = tuple[int, int]
Edge = tuple[Point, Point]  # endpoints sorted lexicographically
Triangle = tuple[Point, Point, Point]  # sorted lexicographically


def cross(o: Point, a: Point, b: Point) -> int:
    """Twice the signed area of triangle (o, a, b)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lattice_length(a: Point, b: Point) -> int:
    """Number of primitive lattice segments composing the segment a-b."""
    return math.gcd(abs(a[0] - b[0]), abs(a[1] - b[1]))


def norm_edge(a: Point, b: Point) -> Edge:
    return (a, b) if a <= b else (b, a)


def norm_triangle(a: Point, b: Point, c: Point) -> Triangle:
    t = sorted((a, b, c))
    return (t[0], t[1], t[2])


class LatticePolygon:
    """Convex lattice polygon given by its counterclockwise vertex list."""

    def __init__(self, vertices: Sequence[Point]):
        verts = [(int(x), int(y)) for x, y in vertices]
        if len(verts) < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        n = len(verts)
        for i in range(n):
            a, b, c = verts[i], verts[(i + 1) % n], verts[(i + 2) % n]
            turn = cross(a, b, c)
            if turn == 0:
                raise ValueError("three consecutive vertices are collinear")
            if turn < 0:
                raise ValueError("vertices must be in counterclockwise convex position")
        self.vertices: tuple[Point, ...] = tuple(verts)

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticePolygon) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"LatticePolygon({list(self.vertices)})"

    def area(self) -> Fraction:
        v = self.vertices
        twice = sum(v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1] for i in range(len(v)))
        return Fraction(twice, 2)

    def contains(self, p: Point, strict: bool = False) -> bool:
        v = self.vertices
        for i in range(len(v)):
            c = cross(v[i], v[(i + 1) % len(v)], p)
            if c < 0 or (strict and c == 0):
                return False
        return True

    def lattice_points(self) -> list[Point]:
        xs = [p[0] for p in self.vertices]
        ys = [p[1] for p in self.vertices]
        out = [
            (x, y)
            for x in range(min(xs), max(xs) + 1)
            for y in range(min(ys), max(ys) + 1)
            if self.contains((x, y))
        ]
        return sorted(out)

    def interior_points(self) -> list[Point]:
        return [p for p in self.lattice_points() if self.contains(p, strict=True)]

    def boundary_points(self) -> list[Point]:
        return [p for p in self.lattice_points() if not self.contains(p, strict=True)]

    def boundary_segments(self) -> list[tuple[Point, Point]]:
        """Primitive boundary segments, oriented counterclockwise."""
        segs: list[tuple[Point, Point]] = []
        v = self.vertices
        for i in range(len(v)):
            a, b = v[i], v[(i + 1) % len(v)]
            k = lattice_length(a, b)
            dx, dy = (b[0] - a[0]) // k, (b[1] - a[1]) // k
            for j in range(k):
                segs.append(((a[0] + j * dx, a[1] + j * dy), (a[0] + (j + 1) * dx, a[1] + (j + 1) * dy)))
        return segs

    def pick_check(self) -> bool:
        """Pick's identity: area = interior + boundary/2 - 1."""
        return self.area() == len(self.interior_points()) + Fraction(len(self.boundary_points()), 2) - 1

    def to_json(self) -> dict:
        return {"vertices": [[x, y] for x, y in self.vertices]}

    @classmethod
    def from_json(cls, data: dict) -> "LatticePolygon":
        return cls([(int(x), int(y)) for x, y in data["vertices"]])


def hirzebruch_polygon(g: int, n: int) -> LatticePolygon:
    """Newton polygon of a genus-g trigonal curve with invariant n.

    Trapezoid (0,0), (3,0), (3,(g-3n+2)/2), (0,(g+3n+2)/2); the right edge
    degenerates to a point when g = 3n - 2 and the result is a triangle.
    The interior lattice-point count always equals g.
    """
    if g < 3:
        raise BadMaroniParameter(f"genus must be at least 3, got {g}")
    if n < 0:
        raise BadMaroniParameter(f"n must be non-negative, got {n}")
    if (g - n) % 2 != 0:
        raise ParityMismatch(f"g = {g} and n = {n} must have the same parity")
    if n > (g + 2) // 3:
        raise MaroniRange(f"n = {n} exceeds the bound floor((g+2)/3) = {(g + 2) // 3}")
    right = (g - 3 * n + 2) // 2
    top = (g + 3 * n + 2) // 2
    if right == 0:
        return LatticePolygon([(0, 0), (3, 0), (0, top)])
    return LatticePolygon([(0, 0), (3, 0), (3, right), (0, top)])


def as_hirzebruch(P: LatticePolygon) -> tuple[int, int] | None:
    """Recognize P as hirzebruch_polygon(g, n); returns (g, n) or None."""
    g = len(P.interior_points())
    if g < 3:
        return None
    for n in range(0, (g + 2) // 3 + 1):
        if (g - n) % 2 != 0:
            continue
        if P == hirzebruch_polygon(g, n):
            return (g, n)
    return None


# ---------------------------------------------------------------------------
# triangulations


class Triangulation:
    """A triangulation of a lattice polygon on its full lattice-point set."""

    def __init__(self, polygon: LatticePolygon, triangles):
        tris = frozenset(norm_triangle(*t) for t in triangles)
        self.polygon = polygon
        self.triangles: frozenset[Triangle] = tris
        self._interior_edges: dict[Edge, list[Point]] | None = None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Triangulation)
            and self.polygon == other.polygon
            and self.triangles == other.triangles
        )

    def __hash__(self) -> int:
        return hash((self.polygon, self.triangles))

    def __repr__(self) -> str:
        return f"Triangulation({len(self.triangles)} triangles)"

    def points(self) -> list[Point]:
        return sorted({p for t in self.triangles for p in t})

    def edges(self) -> set[Edge]:
        out: set[Edge] = set()
        for a, b, c in self.triangles:
            out.update((norm_edge(a, b), norm_edge(a, c), norm_edge(b, c)))
        return out

    def edge_thirds(self) -> dict[Edge, list[Point]]:
        """Map each edge to the opposite vertices of its incident triangles."""
        use: dict[Edge, list[Point]] = {}
        for a, b, c in self.triangles:
            for e, t in ((norm_edge(a, b), c), (norm_edge(a, c), b), (norm_edge(b, c), a)):
                use.setdefault(e, []).append(t)
        return use

    def interior_edges(self) -> dict[Edge, list[Point]]:
        """Edges shared by two triangles, with both opposite vertices."""
        if self._interior_edges is None:
            self._interior_edges = {e: ts for e, ts in self.edge_thirds().items() if len(ts) == 2}
        return self._interior_edges

    def is_unimodular(self) -> bool:
        return all(abs(cross(a, b, c)) == 1 for a, b, c in self.triangles)

    def is_valid(self) -> bool:
        """Union covers the polygon, interiors disjoint, all points used."""
        area = sum(Fraction(abs(cross(a, b, c)), 2) for a, b, c in self.triangles)
        if area != self.polygon.area():
            return False
        if any(cross(a, b, c) == 0 for a, b, c in self.triangles):
            return False
        pts = set(self.polygon.lattice_points())
        if any(p not in pts for t in self.triangles for p in t):
            return False
        use = self.edge_thirds()
        boundary = {norm_edge(a, b) for a, b in self.polygon.boundary_segments()}
        for e, ts in use.items():
            limit = 1 if e in boundary else 2
            if len(ts) > limit:
                return False
        edges = list(use)
        for i in range(len(edges)):
            for j in range(i + 1, len(edges)):
                if _proper_cross(*edges[i], *edges[j]):
                    return False
        return True

    def to_json(self) -> dict:
        tris = sorted(self.triangles)
        return {
            "polygon": self.polygon.to_json(),
            "triangles": [[[p[0], p[1]] for p in t] for t in tris],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Triangulation":
        poly = LatticePolygon.from_json(data["polygon"])
        tris = [tuple((int(x), int(y)) for x, y in t) for t in data["triangles"]]
        return cls(poly, tris)


def _proper_cross(p1: Point, p2: Point, p3: Point, p4: Point) -> bool:
    """True iff open segments p1-p2 and p3-p4 intersect transversally.

    All segments in this module are primitive, so collinear overlaps and
    through-vertex incidences cannot occur and this test is complete.
    """
    d1 = cross(p3, p4, p1)
    d2 = cross(p3, p4, p2)
    d3 = cross(p1, p2, p3)
    d4 = cross(p1, p2, p4)
    return (d1 > 0) != (d2 > 0) and d1 != 0 and d2 != 0 and (d3 > 0) != (d4 > 0) and d3 != 0 and d4 != 0


def enumerate_unimodular_triangulations(P: LatticePolygon) -> Iterator[Triangulation]:
    """All unimodular triangulations of P on its full lattice-point set.

    Backtracking over the lexicographically smallest open frontier edge: every
    partial state determines a unique next edge, and each way of covering it
    with an empty triangle is explored once, so each triangulation is emitted
    exactly once, in a deterministic order.
    """
    points = P.lattice_points()
    target = 2 * P.area()  # number of unimodular triangles when complete
    if target != int(target):
        raise ValueError("polygon area is not a multiple of 1/2")
    target = int(target)
    boundary_ccw = {}  # oriented boundary segment -> normalized edge
    for a, b in P.boundary_segments():
        boundary_ccw[norm_edge(a, b)] = (a, b)

    edge_use: dict[Edge, list[Point]] = {}
    placed: list[Triangle] = []

    def live_edge() -> tuple[Edge, Point, Point, int] | None:
        """Smallest open edge, as (edge, a, b, required side sign of cross(a,b,p))."""
        best = None
        for e, (a, b) in boundary_ccw.items():
            if e not in edge_use and (best is None or e < best[0]):
                best = (e, a, b, 1)  # interior of P lies left of the CCW boundary
        for e, thirds in edge_use.items():
            if e in boundary_ccw or len(thirds) != 1:
                continue
            if best is None or e < best[0]:
                a, b = e
                side = -1 if cross(a, b, thirds[0]) > 0 else 1
                best = (e, a, b, side)
        return best

    def candidates(a: Point, b: Point, side: int) -> list[Point]:
        out = []
        for p in points:
            if cross(a, b, p) != side:  # empty triangle on the required side
                continue
            ok = True
            for x, y in ((a, p), (b, p)):
                e = norm_edge(x, y)
                thirds = edge_use.get(e, [])
                limit = 1 if e in boundary_ccw else 2
                if len(thirds) >= limit:
                    ok = False
                    break
                if thirds:
                    other = b if {x, y} == {a, p} else a
                    if (cross(x, y, thirds[0]) > 0) == (cross(x, y, other) > 0):
                        ok = False  # both triangles on the same side of the edge
                        break
            if not ok:
                continue
            for x, y in ((a, p), (b, p)):
                if norm_edge(x, y) in edge_use:
                    continue
                if any(_proper_cross(x, y, *e) for e in edge_use):
                    ok = False
                    break
            if ok:
                out.append(p)
        return out

    def recurse() -> Iterator[Triangulation]:
        if len(placed) == target:
            yield Triangulation(P, list(placed))
            return
        nxt = live_edge()
        assert nxt is not None  # unfilled region always has an open frontier edge
        e, a, b, side = nxt
        for p in candidates(a, b, side):
            tri = norm_triangle(a, b, p)
            placed.append(tri)
            for x, y in ((a, b), (a, p), (b, p)):
                third = ({a, b, p} - {x, y}).pop()
                edge_use.setdefault(norm_edge(x, y), []).append(third)
            yield from recurse()
            placed.pop()
            for x, y in ((a, b), (a, p), (b, p)):
                key = norm_edge(x, y)
                edge_use[key].pop()
                if not edge_use[key]:
                    del edge_use[key]

    return recurse()


# ---------------------------------------------------------------------------
# diagonal flips (independent oracle for the enumerator, and a random-walk
# subsampling device for large polygons)


def flip_edge(T: Triangulation, e: Edge) -> Triangulation | None:
    """Replace diagonal e of its quadrilateral; None when not flippable."""
    thirds = T.interior_edges().get(e)
    if thirds is None:
        return None
    a, b = e
    c, d = thirds
    sc, sd = cross(c, d, a), cross(c, d, b)
    if abs(sc) != 1 or abs(sd) != 1 or (sc > 0) == (sd > 0):
        return None  # the union of the two triangles is not strictly convex
    tris = set(T.triangles)
    tris.discard(norm_triangle(a, b, c))
    tris.discard(norm_triangle(a, b, d))
    tris.add(norm_triangle(c, d, a))
    tris.add(norm_triangle(c, d, b))
    return Triangulation(T.polygon, tris)


def all_flips(T: Triangulation) -> list[tuple[Edge, Triangulation]]:
    out = []
    for e in sorted(T.interior_edges()):
        T2 = flip_edge(T, e)
        if T2 is not None:
            out.append((e, T2))
    return out


def explore_by_flips(T0: Triangulation, max_count: int | None = None) -> set[Triangulation]:
    """Breadth-first closure of {T0} under diagonal flips."""
    seen = {T0}
    queue = [T0]
    while queue:
        T = queue.pop()
        for _, T2 in all_flips(T):
            if T2 not in seen:
                seen.add(T2)
                queue.append(T2)
                if max_count is not None and len(seen) >= max_count:
                    return seen
    return seen


# ---------------------------------------------------------------------------
# regularity


@dataclass
class HeightFunction:
    """Heights on the lattice points of a polygon (exact rationals)."""

    values: dict[Point, Fraction]

    def __getitem__(self, p: Point) -> Fraction:
        return self.values[p]

    def to_json(self) -> dict:
        from .rationals import frac_str

        return {f"[{x},{y}]": frac_str(v) for (x, y), v in sorted(self.values.items())}

    @classmethod
    def from_json(cls, data: dict) -> "HeightFunction":
        values = {}
        for key, val in data.items():
            x, y = key.strip("[]").split(",")
            values[(int(x), int(y))] = Fraction(val)
        return cls(values)


def bend_forms(T: Triangulation) -> dict[Edge, dict[Point, int]]:
    """Linear form per interior edge measuring the concave bend across it.

    For the edge (a, b) shared by unimodular triangles (a,b,c) and (a,b,d)
    the relation c + d = alpha*a + beta*b holds with integers alpha+beta = 2,
    and the bend of a height function h across the edge is
    alpha*h(a) + beta*h(b) - h(c) - h(d).  A height function induces T (upper
    faces, max-plus) iff every bend is strictly positive; the bend also equals
    the lattice length of the dual tropical edge.
    """
    forms: dict[Edge, dict[Point, int]] = {}
    for e, (c, d) in T.interior_edges().items():
        a, b = e
        sx, sy = c[0] + d[0], c[1] + d[1]
        if a[0] != b[0]:
            alpha = Fraction(sx - 2 * b[0], a[0] - b[0])
        else:
            alpha = Fraction(sy - 2 * b[1], a[1] - b[1])
        beta = 2 - alpha
        assert alpha.denominator == 1 and alpha * a[0] + beta * b[0] == sx and alpha * a[1] + beta * b[1] == sy
        form: dict[Point, int] = {}
        for p, coeff in ((a, int(alpha)), (b, int(beta)), (c, -1), (d, -1)):
            form[p] = form.get(p, 0) + coeff
        forms[e] = {p: v for p, v in form.items() if v != 0}
    return forms


def evaluate_form(form: dict[Point, int], h: dict[Point, Fraction]) -> Fraction:
    return sum((Fraction(coeff) * h[p] for p, coeff in form.items()), Fraction(0))


def _pinned_points(points: list[Point]) -> list[Point]:
    """First three affinely independent points in lexicographic order."""
    a, b = points[0], points[1]
    for p in points[2:]:
        if cross(a, b, p) != 0:
            return [a, b, p]
    raise ValueError("all points are collinear")


def _float_interior_guess(rows: list[list[Fraction]]) -> list[Fraction] | None:
    """Float LP heuristic for a strictly feasible point of {row . x < 0}.

    The returned point is rationalized; the caller must re-verify it exactly.
    Negative answers are never drawn from this path, so exactness of the
    regularity decision is unaffected.
    """
    try:
        from scipy.optimize import linprog
    except ImportError:  # pragma: no cover - scipy is normally present
        return None
    nv = len(rows[0])
    A = [[float(a) for a in row] + [1.0] for row in rows]
    b = [0.0] * len(rows)
    A.append([0.0] * nv + [1.0])
    b.append(1.0)
    res = linprog(
        [0.0] * nv + [-1.0],
        A_ub=A,
        b_ub=b,
        bounds=[(None, None)] * (nv + 1),
        method="highs",
    )
    if res.status != 0 or res.x is None or res.x[-1] < 1e-7:
        return None
    scale = 1 << 20
    return [Fraction(round(v * scale), scale) for v in res.x[:nv]]


def regularity_certificate(T: Triangulation) -> tuple[HeightFunction, Fraction] | None:
    """Height function inducing T plus its margin, or None if T is not regular.

    Strictness of the bend inequalities is decided exactly.  A float LP is
    tried first, purely as a search heuristic: its candidate is re-verified
    in exact arithmetic, and whenever it fails to produce a verified witness
    the decision falls back to an exact rational LP that maximizes the
    minimum bend (capped at 1) over heights with three points pinned to 0 to
    remove the affine symmetry.  "Not regular" answers always come from the
    exact LP.
    """
    points = T.points()
    pinned = set(_pinned_points(points))
    free = [p for p in points if p not in pinned]
    index = {p: i for i, p in enumerate(free)}
    forms = bend_forms(T)
    if not forms:  # a single triangle: trivially regular
        return HeightFunction({p: Fraction(0) for p in points}), Fraction(1)
    rows = []
    for e in sorted(forms):
        row = [Fraction(0)] * len(free)
        for p, coeff in forms[e].items():
            if p in index:
                row[index[p]] = Fraction(-coeff)  # bend >= margin  <=>  -bend < 0
        rows.append(row)

    def assemble(x: list[Fraction]) -> tuple[HeightFunction, Fraction] | None:
        h = {p: Fraction(0) for p in pinned}
        for p, i in index.items():
            h[p] = x[i]
        margin = min(evaluate_form(f, h) for f in forms.values())
        if margin <= 0:
            return None
        return HeightFunction(h), margin

    guess = _float_interior_guess(rows)
    if guess is not None:
        got = assemble(guess)
        if got is not None:
            return got
    exact = strict_feasible(rows, [Fraction(0)] * len(rows), cap=1)
    if exact is None:
        return None
    out = assemble(exact[0])
    assert out is not None  # the exact LP guarantees a positive margin
    return out


def is_regular(T: Triangulation) -> HeightFunction | None:
    got = regularity_certificate(T)
    return got[0] if got else None


def induced_subdivision(heights: HeightFunction) -> set[frozenset[Point]]:
    """Cells of the regular subdivision induced by projecting upper faces.

    Brute-force exact upper hull: for every non-collinear point triple, take
    the plane through their lifts; if no lifted point lies strictly above it,
    the points lying on it form a cell.  Intended for small point sets.
    """
    pts = sorted(heights.values)
    h = heights.values
    cells: set[frozenset[Point]] = set()
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                a, b, c = pts[i], pts[j], pts[k]
                det = cross(a, b, c)
                if det == 0:
                    continue
                # plane z = ux + vy + w through the three lifted points
                u = Fraction((h[b] - h[a]) * (c[1] - a[1]) - (h[c] - h[a]) * (b[1] - a[1]), det)
                v = Fraction((h[c] - h[a]) * (b[0] - a[0]) - (h[b] - h[a]) * (c[0] - a[0]), det)
                w = h[a] - u * a[0] - v * a[1]
                on = []
                above = False
                for p in pts:
                    z = u * p[0] + v * p[1] + w
                    if h[p] > z:
                        above = True
                        break
                    if h[p] == z:
                        on.append(p)
                if not above:
                    cells.add(frozenset(on))
    return cells


def induces(T: Triangulation, heights: HeightFunction) -> bool:
    """True iff the upper-face subdivision of `heights` is exactly T."""
    return induced_subdivision(heights) == {frozenset(t) for t in T.triangles}


def sample_heights(
    T: Triangulation,
    certificate: HeightFunction,
    margin: Fraction,
    rng,
    spread: int = 10,
) -> HeightFunction:
    """Random height function strictly inside the secondary cone of T.

    Adds a seeded integer perturbation r to a large multiple of the
    certificate: lam*h* + r has every bend >= lam*margin - max|bend(r)| > 0
    by the choice of lam, so the sample still induces T exactly.
    """
    points = T.points()
    r = {p: Fraction(rng.randint(-spread, spread)) for p in points}
    forms = bend_forms(T)
    worst = max((abs(evaluate_form(f, r)) for f in forms.values()), default=Fraction(0))
    lam = (worst + 1) / margin
    lam = Fraction(math.floor(lam) + 1)
    return HeightFunction({p: lam * certificate.values[p] + r[p] for p in points})


def require_regular(T: Triangulation) -> tuple[HeightFunction, Fraction]:
    got = regularity_certificate(T)
    if got is None:
        raise NotRegular("triangulation admits no inducing height function")
    return got
