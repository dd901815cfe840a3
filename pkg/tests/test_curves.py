import random
from fractions import Fraction as Q

import pytest

from tropigon import covers
from tropigon.curves import (
    dual_tropical_curve,
    projection_cover,
    skeleton,
    skeleton_length_forms,
)
from tropigon.errors import NotRegular, NotSmooth, WrongPolygon
from tropigon.graphs import identify_type, is_isometric
from tropigon.lattice import (
    HeightFunction,
    LatticePolygon,
    Triangulation,
    enumerate_unimodular_triangulations,
    explore_by_flips,
    hirzebruch_polygon,
    require_regular,
    sample_heights,
)

UNIT_TRIANGLE = LatticePolygon([(0, 0), (1, 0), (0, 1)])


def line_curve(a=0, b=0):
    """Tropical line: unit-triangle Newton polygon, heights (0, a, b)."""
    T = Triangulation(UNIT_TRIANGLE, [((0, 0), (1, 0), (0, 1))])
    h = HeightFunction({(0, 0): Q(0), (1, 0): Q(a), (0, 1): Q(b)})
    return dual_tropical_curve(T, h)


def fat_triangle_curve():
    """One lattice-area-2 triangle; its dual curve has weight-2 rays."""
    P = LatticePolygon([(0, 0), (2, 0), (0, 2)])
    T = Triangulation(P, [((0, 0), (2, 0), (0, 2))])
    h = HeightFunction({p: Q(0) for p in P.lattice_points()})
    return dual_tropical_curve(T, h)


@pytest.fixture(scope="module")
def pool():
    """A spread of regular triangulations of the genus-3 polygon with
    seeded sample heights, paired with their dual curves."""
    P = hirzebruch_polygon(3, 1)
    T0 = next(iter(enumerate_unimodular_triangulations(P)))
    rng = random.Random(113)
    out = []
    for T in sorted(explore_by_flips(T0, max_count=12), key=repr):
        cert, margin = require_regular(T)
        h = sample_heights(T, cert, margin, rng)
        out.append((T, h, dual_tropical_curve(T, h)))
    return out


class TestDualCurve:
    def test_line_vertex(self):
        C = line_curve()
        assert C.vertices == ((Q(0), Q(0)),)
        assert C.edges == ()

    def test_line_rays(self):
        C = line_curve()
        assert sorted(r.direction for r in C.rays) == [(-1, 0), (0, -1), (1, 1)]
        assert all(r.weight == 1 and r.origin == 0 for r in C.rays)

    def test_line_is_smooth_and_balanced(self):
        C = line_curve()
        assert C.is_smooth()
        assert C.balancing_residuals() == {0: (0, 0)}

    def test_vertex_moves_with_heights(self):
        # x + h(1,0) = y + h(0,1) = h(0,0) at the tie point
        C = line_curve(a=Q(1, 2), b=Q(1, 3))
        assert C.vertices == ((Q(-1, 2), Q(-1, 3)),)

    def test_constant_heights_rejected(self):
        P = hirzebruch_polygon(3, 1)
        T = next(iter(enumerate_unimodular_triangulations(P)))
        flat = HeightFunction({p: Q(0) for p in T.points()})
        with pytest.raises(NotRegular):
            dual_tropical_curve(T, flat)

    def test_wrong_cone_heights_rejected(self, pool):
        # a certificate for one triangulation does not induce another
        (T1, h1, _), (T2, _, _) = pool[0], pool[1]
        with pytest.raises(NotRegular):
            dual_tropical_curve(T2, h1)

    def test_balancing_everywhere(self, pool):
        for _, _, C in pool:
            assert set(C.balancing_residuals().values()) == {(0, 0)}

    def test_duality_round_trip(self, pool):
        for T, _, C in pool:
            assert C.newton_subdivision() == {frozenset(t) for t in T.triangles}

    def test_edges_perpendicular_to_duals(self, pool):
        for _, _, C in pool:
            for e in C.edges:
                (ax, ay), (bx, by) = e.dual
                assert e.direction[0] * (bx - ax) + e.direction[1] * (by - ay) == 0
                assert e.weight == 1
                assert e.length > 0

    def test_smooth_curves_are_trivalent(self, pool):
        for _, _, C in pool:
            assert C.is_smooth()
            degree = [0] * len(C.vertices)
            for e in C.edges:
                degree[e.ends[0]] += 1
                degree[e.ends[1]] += 1
            for r in C.rays:
                degree[r.origin] += 1
            assert set(degree) == {3}

    def test_fat_triangle_not_smooth(self):
        C = fat_triangle_curve()
        assert not C.is_smooth()
        assert sorted(r.weight for r in C.rays) == [2, 2, 2]
        assert C.balancing_residuals() == {0: (0, 0)}

    def test_json_shape(self):
        data = line_curve(a=Q(1, 2)).to_json()
        assert data["vertices"] == [["-1/2", "0"]]
        assert data["edges"] == []
        assert len(data["rays"]) == 3
        assert {"origin", "direction", "weight"} <= set(data["rays"][0])


class TestSkeleton:
    def test_cubic_gives_one_loop(self):
        P = LatticePolygon([(0, 0), (3, 0), (0, 3)])
        T = next(iter(enumerate_unimodular_triangulations(P)))
        cert, _ = require_regular(T)
        S = skeleton(dual_tropical_curve(T, cert))
        assert S.genus() == 1
        assert len(S.edges) == 1 and S.is_loop(0)

    def test_genus_matches_interior_points(self, pool):
        P = hirzebruch_polygon(3, 1)
        assert len(P.interior_points()) == 3
        for _, _, C in pool:
            assert skeleton(C).genus() == 3

    def test_not_smooth_rejected(self):
        with pytest.raises(NotSmooth):
            skeleton(fat_triangle_curve())

    def test_skeletons_have_catalog_types(self, pool):
        for _, _, C in pool:
            ctype, _ = identify_type(skeleton(C))
            assert ctype.genus == 3

    def test_symbolic_forms_match_geometry(self, pool):
        # independent recomputation: chains of bend forms evaluated at h
        # versus Euclidean/lattice lengths of the drawn curve
        for T, h, C in pool:
            forms = skeleton_length_forms(T)
            assert is_isometric(forms.evaluate(h), skeleton(C))

    def test_forms_are_integral(self, pool):
        for T, _, _ in pool:
            forms = skeleton_length_forms(T)
            for _, _, form in forms.edges:
                assert form and all(isinstance(c, int) for c in form.values())

    def test_doubling_heights_doubles_lengths(self, pool):
        T, h, C = pool[0]
        doubled = HeightFunction({p: 2 * v for p, v in h.values.items()})
        S1 = skeleton(C)
        S2 = skeleton(dual_tropical_curve(T, doubled))
        assert sorted(2 * l for _, _, l in S1.edges) == sorted(
            l for _, _, l in S2.edges
        )


class TestProjectionCover:
    def test_degree_three(self, pool):
        for _, _, C in pool:
            assert projection_cover(C).degree == 3

    def test_verifies_with_unit_slack(self, pool):
        for _, _, C in pool:
            report = covers.verify_cover(projection_cover(C))
            assert report.realizable
            assert set(report.slack.values()) == {1}

    def test_well_contracted(self, pool):
        for _, _, C in pool:
            assert covers.is_well_contracted(projection_cover(C))

    def test_three_downward_legs(self, pool):
        for _, _, C in pool:
            cover = projection_cover(C)
            down = [m for m in cover.leg_mu.values() if m < 0]
            assert down == [-1, -1, -1]

    def test_horizontal_edges_contracted(self, pool):
        for _, _, C in pool:
            cover = projection_cover(C)
            for i, e in enumerate(C.edges):
                assert cover.mu[i] == e.weight * abs(e.direction[1])

    def test_wrong_polygon_rejected(self):
        with pytest.raises(WrongPolygon):
            projection_cover(line_curve())

    def test_not_smooth_rejected(self):
        with pytest.raises(NotSmooth):
            projection_cover(fat_triangle_curve())


class TestGenusFour:
    @pytest.mark.parametrize("n", [0, 2])
    def test_first_triangulation_pipeline(self, n):
        P = hirzebruch_polygon(4, n)
        assert len(P.interior_points()) == 4
        T = next(iter(enumerate_unimodular_triangulations(P)))
        cert, margin = require_regular(T)
        h = sample_heights(T, cert, margin, random.Random(7 + n))
        C = dual_tropical_curve(T, h)
        assert set(C.balancing_residuals().values()) == {(0, 0)}
        S = skeleton(C)
        assert S.genus() == 4
        assert is_isometric(skeleton_length_forms(T).evaluate(h), S)
        cover = projection_cover(C)
        assert cover.degree == 3
        report = covers.verify_cover(cover)
        assert report.realizable
        assert set(report.slack.values()) <= {0, 1}
        assert covers.is_well_contracted(cover)
