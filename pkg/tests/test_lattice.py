import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from tropigon.errors import BadMaroniParameter, MaroniRange, ParityMismatch
from tropigon.lattice import (
    HeightFunction,
    LatticePolygon,
    Triangulation,
    all_flips,
    as_hirzebruch,
    bend_forms,
    enumerate_unimodular_triangulations,
    evaluate_form,
    explore_by_flips,
    hirzebruch_polygon,
    induced_subdivision,
    induces,
    is_regular,
    regularity_certificate,
    sample_heights,
)

UNIT_TRIANGLE = LatticePolygon([(0, 0), (1, 0), (0, 1)])
UNIT_SQUARE = LatticePolygon([(0, 0), (1, 0), (1, 1), (0, 1)])


class TestPolygon:
    def test_rejects_clockwise(self):
        with pytest.raises(ValueError):
            LatticePolygon([(0, 0), (0, 1), (1, 0)])

    def test_rejects_collinear_consecutive(self):
        with pytest.raises(ValueError):
            LatticePolygon([(0, 0), (1, 0), (2, 0), (0, 2)])

    def test_area_and_pick(self):
        assert UNIT_SQUARE.area() == 1
        assert UNIT_SQUARE.pick_check()

    def test_json_roundtrip(self):
        P = hirzebruch_polygon(3, 1)
        assert LatticePolygon.from_json(P.to_json()) == P


class TestHirzebruch:
    def test_g3_n1(self):
        P = hirzebruch_polygon(3, 1)
        assert P.vertices == ((0, 0), (3, 0), (3, 1), (0, 4))

    def test_g4_n0(self):
        P = hirzebruch_polygon(4, 0)
        assert P.vertices == ((0, 0), (3, 0), (3, 3), (0, 3))

    def test_g4_n2_degenerates_to_triangle(self):
        P = hirzebruch_polygon(4, 2)
        assert P.vertices == ((0, 0), (3, 0), (0, 6))

    def test_parity_mismatch(self):
        with pytest.raises(ParityMismatch):
            hirzebruch_polygon(3, 0)

    def test_maroni_range(self):
        with pytest.raises(MaroniRange):
            hirzebruch_polygon(3, 3)

    def test_small_genus_rejected(self):
        with pytest.raises(BadMaroniParameter):
            hirzebruch_polygon(2, 0)

    def test_interior_point_counts_match_genus(self):
        for g, n in [(3, 1), (4, 0), (4, 2), (5, 1), (6, 0), (6, 2), (7, 1), (7, 3)]:
            P = hirzebruch_polygon(g, n)
            assert len(P.interior_points()) == g
            assert P.pick_check()

    def test_interior_examples(self):
        assert UNIT_TRIANGLE.interior_points() == []
        assert hirzebruch_polygon(4, 0).interior_points() == [(1, 1), (1, 2), (2, 1), (2, 2)]
        assert len(hirzebruch_polygon(3, 1).interior_points()) == 3

    def test_as_hirzebruch_recognizes(self):
        for g, n in [(3, 1), (4, 0), (4, 2)]:
            assert as_hirzebruch(hirzebruch_polygon(g, n)) == (g, n)
        assert as_hirzebruch(UNIT_SQUARE) is None


@st.composite
def convex_lattice_polygon(draw):
    pts = draw(
        st.lists(
            st.tuples(st.integers(0, 6), st.integers(0, 6)),
            min_size=3,
            max_size=12,
            unique=True,
        )
    )
    # monotone-chain convex hull
    pts = sorted(pts)

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and (
                (out[-1][0] - out[-2][0]) * (p[1] - out[-2][1])
                - (out[-1][1] - out[-2][1]) * (p[0] - out[-2][0])
                <= 0
            ):
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return None
    return hull


class TestPickProperty:
    @settings(max_examples=80, deadline=None)
    @given(convex_lattice_polygon())
    def test_pick_identity(self, hull):
        if hull is None:
            return
        P = LatticePolygon(hull)
        assert P.pick_check()


class TestEnumeration:
    def test_unit_triangle(self):
        assert len(list(enumerate_unimodular_triangulations(UNIT_TRIANGLE))) == 1

    def test_unit_square(self):
        ts = list(enumerate_unimodular_triangulations(UNIT_SQUARE))
        assert len(ts) == 2
        diags = {tuple(sorted(T.interior_edges())) for T in ts}
        assert diags == {((((0, 0)), (1, 1)),), ((((0, 1)), (1, 0)),)}

    def test_triangle_2x2(self):
        # dilated triangle conv{(0,0),(2,0),(0,2)}: known to have 4 unimodular
        # triangulations on its 6 lattice points
        P = LatticePolygon([(0, 0), (2, 0), (0, 2)])
        ts = list(enumerate_unimodular_triangulations(P))
        assert len(ts) == 4
        assert all(T.is_unimodular() and T.is_valid() for T in ts)

    def test_g31_count_against_flip_oracle(self):
        # N31 fixture: computed once by the frontier enumerator and pinned;
        # re-derived here by an independent method (flip-graph closure from
        # one seed triangulation) every time the suite runs.
        ts = list(enumerate_unimodular_triangulations(hirzebruch_polygon(3, 1)))
        assert len(ts) == 4713
        assert len(set(ts)) == 4713
        closure = explore_by_flips(ts[0])
        assert closure == set(ts)

    def test_g31_structural_invariants_sampled(self):
        ts = list(enumerate_unimodular_triangulations(hirzebruch_polygon(3, 1)))
        rng = random.Random(11)
        emitted = set(ts)
        for i in rng.sample(range(len(ts)), 40):
            T = ts[i]
            assert T.is_unimodular()
            assert T.is_valid()
            assert len(T.triangles) == 15
            assert len(T.points()) == 14
            # closure under flips: every neighbor is also emitted
            for _, T2 in all_flips(T):
                assert T2 in emitted

    def test_deterministic_order(self):
        a = [T.triangles for T in enumerate_unimodular_triangulations(hirzebruch_polygon(3, 1))]
        b = [T.triangles for T in enumerate_unimodular_triangulations(hirzebruch_polygon(3, 1))]
        assert a == b

    def test_json_roundtrip(self):
        T = next(iter(enumerate_unimodular_triangulations(UNIT_SQUARE)))
        assert Triangulation.from_json(T.to_json()) == T


class TestRegularity:
    def test_unit_square_example_heights(self):
        # heights (1,0,0,0) with the 1 on a diagonal endpoint induce the
        # triangulation using that diagonal (upper faces, max-plus)
        h = HeightFunction({(0, 0): Q(1), (1, 0): Q(0), (0, 1): Q(0), (1, 1): Q(0)})
        cells = induced_subdivision(h)
        assert cells == {
            frozenset({(0, 0), (1, 0), (1, 1)}),
            frozenset({(0, 0), (0, 1), (1, 1)}),
        }

    def test_both_square_triangulations_regular(self):
        for T in enumerate_unimodular_triangulations(UNIT_SQUARE):
            h = is_regular(T)
            assert h is not None
            assert induces(T, h)

    def test_flat_heights_give_trivial_subdivision(self):
        h = HeightFunction({p: Q(0) for p in UNIT_SQUARE.lattice_points()})
        assert induced_subdivision(h) == {frozenset(UNIT_SQUARE.lattice_points())}

    def test_g31_all_regular(self):
        # R31 fixture: every unimodular triangulation of the (3,1) trapezoid
        # is regular (4713 of 4713); each certificate is verified by its
        # exact bend margins inside regularity_certificate.
        ts = list(enumerate_unimodular_triangulations(hirzebruch_polygon(3, 1)))
        certs = [regularity_certificate(T) for T in ts]
        assert all(c is not None for c in certs)

    def test_g31_certificates_induce_T_sampled(self):
        ts = list(enumerate_unimodular_triangulations(hirzebruch_polygon(3, 1)))
        rng = random.Random(23)
        for i in rng.sample(range(len(ts)), 12):
            T = ts[i]
            h, margin = regularity_certificate(T)
            assert margin > 0
            assert induces(T, h)

    def test_sampled_heights_stay_in_cone(self):
        ts = list(enumerate_unimodular_triangulations(hirzebruch_polygon(3, 1)))
        rng_pick = random.Random(5)
        for i in rng_pick.sample(range(len(ts)), 6):
            T = ts[i]
            h0, margin = regularity_certificate(T)
            forms = bend_forms(T)
            for k in range(3):
                h = sample_heights(T, h0, margin, random.Random(f"{i}:{k}"))
                assert all(evaluate_form(f, h.values) > 0 for f in forms.values())
                assert induces(T, h)

    def test_sampling_is_deterministic(self):
        T = next(iter(enumerate_unimodular_triangulations(hirzebruch_polygon(3, 1))))
        h0, margin = regularity_certificate(T)
        h1 = sample_heights(T, h0, margin, random.Random("seed:1"))
        h2 = sample_heights(T, h0, margin, random.Random("seed:1"))
        assert h1.values == h2.values

    def test_height_json_roundtrip(self):
        h = HeightFunction({(0, 0): Q(1, 3), (2, 5): Q(-7)})
        assert HeightFunction.from_json(h.to_json()).values == h.values
