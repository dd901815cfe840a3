"""Harmonic covers of a path, their verification, and degree-3 cover search.

A tropical cover is a piecewise-affine harmonic map from a metric graph onto
a path (a segment of the real line) or, occasionally, a finite metric tree.
The map is recorded by a height for every vertex and a non-negative integer
dilation for every edge; it is affine on each edge, so any interior fold
point must be a vertex of the (possibly subdivided) source model.

The module provides:

* :class:`TropicalCover` / :func:`verify_cover` — exact verification of the
  defining invariants (edge consistency, harmonicity, constant degree,
  non-degeneracy) with a per-vertex Riemann–Hurwitz slack report;
* :func:`search_well_contracted_cover` — bounded search for a degree-d
  cover of a path, enumerating per-edge signed dilation profiles with at
  most ``budget`` interior fold points per original edge and solving one
  exact rational LP per surviving combinatorial assignment;
* :func:`detect_sprawling_node`, :func:`detect_crowded_graph`,
  :func:`detect_tie_fighter` — structural patterns that obstruct degree-3
  covers;
* :func:`pullback_divisor` — fibre of a generic height as a divisor on the
  source, for rank checks.

All arithmetic is exact (`fractions.Fraction`); no floating point anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .divisors import Divisor, EdgePoint, GraphPoint
from .errors import (
    ContractedLoop,
    DegenerateVertex,
    DegreeVaries,
    LengthMismatch,
    NotHarmonic,
)
from .graphs import MetricGraph, VertexId, bridges
from .parallel import parallel_map
from .rationals import frac, frac_str
from .simplex import strict_feasible

ZERO = Fraction(0)


# ---------------------------------------------------------------------------
# cover data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TropicalCover:
    """A harmonic map from ``source`` to a path (or finite tree).

    Path targets are implicit: ``height`` places every vertex on the real
    line and the target is the spanned segment (extended to infinity past
    any leg of nonzero dilation).  ``mu`` assigns each edge its dilation;
    ``leg_mu`` assigns each leg a *signed* dilation (positive legs point up,
    negative down, zero legs are contracted horizontals).

    A finite tree target is expressed by giving ``target`` (a metric tree)
    together with ``image``, which sends each source vertex to a point of
    the tree; ``height`` is ignored in that mode and legs are not allowed.

    Local degrees and the global degree are derived data; they are computed
    and returned by :func:`verify_cover`.
    """

    source: MetricGraph
    height: Mapping[VertexId, Fraction] = field(default_factory=dict)
    mu: Mapping[int, int] = field(default_factory=dict)
    leg_mu: Mapping[int, int] = field(default_factory=dict)
    target: MetricGraph | None = None
    image: Mapping[VertexId, GraphPoint] | None = None

    def __post_init__(self):
        G = self.source
        mu = {int(k): v for k, v in self.mu.items()}
        for eid in range(len(G.edges)):
            if eid not in mu:
                raise ValueError(f"no dilation given for edge {eid}")
            m = mu[eid]
            if not isinstance(m, int) or isinstance(m, bool) or m < 0:
                raise ValueError(f"dilation of edge {eid} must be a non-negative integer, got {m!r}")
        legs = {int(k): v for k, v in self.leg_mu.items()}
        for lid, m in legs.items():
            if not 0 <= lid < len(G.legs):
                raise ValueError(f"unknown leg {lid}")
            if not isinstance(m, int) or isinstance(m, bool):
                raise ValueError(f"leg dilation must be an integer, got {m!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "leg_mu", legs)

        if self.target is None:
            h = {v: frac(x) for v, x in self.height.items()}
            for v in G.vertex_ids:
                if v not in h:
                    raise ValueError(f"no height given for vertex {v!r}")
            object.__setattr__(self, "height", h)
        else:
            T = self.target
            if len(T.edges) != len(T.vertex_ids) - 1:
                raise ValueError("tree target must be a tree")
            if G.legs:
                raise ValueError("legs are not supported over a tree target")
            img = dict(self.image or {})
            for v in G.vertex_ids:
                if v not in img:
                    raise ValueError(f"no image given for vertex {v!r}")
                p = img[v]
                if isinstance(p, EdgePoint):
                    if not 0 <= p.edge < len(T.edges):
                        raise ValueError(f"image of {v!r} lies on unknown target edge {p.edge}")
                    if p.offset >= T.edge_length(p.edge):
                        raise ValueError(f"image of {v!r} lies past the end of target edge {p.edge}")
                elif p not in T.genus_of:
                    raise ValueError(f"image of {v!r} is not a target vertex: {p!r}")
            object.__setattr__(self, "image", img)

    @property
    def degree(self) -> int:
        return verify_cover(self).degree

    def to_json(self) -> dict:
        out = {
            "heights": {str(v): frac_str(h) for v, h in sorted(self.height.items(), key=lambda kv: str(kv[0]))},
            "mu": {str(e): m for e, m in sorted(self.mu.items())},
        }
        if self.leg_mu:
            out["leg_mu"] = {str(l): m for l, m in sorted(self.leg_mu.items())}
        if self.target is not None:
            out["target"] = self.target.to_json()
            out["image"] = {
                str(v): ({"vertex": p} if not isinstance(p, EdgePoint) else {"edge": p.edge, "offset": frac_str(p.offset)})
                for v, p in sorted(self.image.items(), key=lambda kv: str(kv[0]))
            }
        return out


def cover_from_json(source: MetricGraph, data: dict) -> TropicalCover:
    """Rebuild a cover of ``source`` from its JSON form (path targets only).

    Vertex keys are matched by string form, so integer vertex ids survive
    the round trip through JSON object keys.
    """
    by_str = {str(v): v for v in source.vertex_ids}
    height = {by_str[k]: frac(x) for k, x in data["heights"].items()}
    mu = {int(k): int(m) for k, m in data["mu"].items()}
    leg_mu = {int(k): int(m) for k, m in data.get("leg_mu", {}).items()}
    return TropicalCover(source, height, mu, leg_mu)


@dataclass(frozen=True)
class RHReport:
    """Per-vertex Riemann–Hurwitz slack of a verified cover.

    ``slack[v]`` is the value of (2·m(v) − 2) − Σ(μ(end) − 1), the sum over
    all edge and leg ends at v (a contracted end contributes −1).  For a
    harmonic cover this is automatically non-negative.  ``realizable`` is
    set exactly when the degree is at most 3, the range in which the local
    Hurwitz existence problem is known to be solvable.
    """

    slack: dict[VertexId, int]
    local_degree: dict[VertexId, int]
    degree: int
    realizable: bool

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "realizable": self.realizable,
            "slack": {str(v): s for v, s in sorted(self.slack.items(), key=lambda kv: str(kv[0]))},
            "local_degree": {str(v): m for v, m in sorted(self.local_degree.items(), key=lambda kv: str(kv[0]))},
        }


# ---------------------------------------------------------------------------
# verification: path targets
# ---------------------------------------------------------------------------


def _rh_slacks(ends: Mapping[VertexId, list[int]], m: Mapping[VertexId, int]) -> dict[VertexId, int]:
    out = {}
    for v, mus in ends.items():
        out[v] = (2 * m[v] - 2) - sum(mu - 1 for mu in mus)
    return out


def _verify_path(c: TropicalCover) -> RHReport:
    G, h, mu = c.source, c.height, c.mu

    # 1. edge consistency: |h(u) − h(v)| = μ·len, equal heights when μ = 0.
    for eid, (u, v, length) in enumerate(G.edges):
        m = mu[eid]
        if m == 0:
            if h[u] != h[v]:
                raise LengthMismatch(
                    f"edge {eid} is contracted but its endpoints have heights {h[u]} and {h[v]}")
        elif u == v:
            raise LengthMismatch(
                f"loop {eid} cannot carry dilation {m} over a path (its image has length 0)")
        elif abs(h[u] - h[v]) != m * length:
            raise LengthMismatch(
                f"edge {eid}: |{h[u]} - {h[v]}| != {m}*{length}")

    # Directed μ-sums at each vertex; legs contribute by their sign.
    up = {v: 0 for v in G.vertex_ids}
    down = {v: 0 for v in G.vertex_ids}
    ends: dict[VertexId, list[int]] = {v: [] for v in G.vertex_ids}
    for eid, (u, v, _) in enumerate(G.edges):
        m = mu[eid]
        ends[u].append(m)
        ends[v].append(m)
        if m > 0:
            lo, hi = (u, v) if h[u] < h[v] else (v, u)
            up[lo] += m
            down[hi] += m
    for lid, at in enumerate(G.legs):
        s = c.leg_mu.get(lid, 0)
        ends[at].append(abs(s))
        if s > 0:
            up[at] += s
        elif s < 0:
            down[at] += -s

    top_open = any(s > 0 for s in c.leg_mu.values())
    bottom_open = any(s < 0 for s in c.leg_mu.values())
    h_lo = min(h.values())
    h_hi = max(h.values())

    # 2. harmonicity at every vertex over the interior of the target.
    for v in G.vertex_ids:
        interior = (bottom_open or h[v] > h_lo) and (top_open or h[v] < h_hi)
        if interior and up[v] != down[v]:
            raise NotHarmonic(
                f"vertex {v!r} at height {h[v]}: upward dilation {up[v]} != downward {down[v]}")

    # 3. constant degree over generic heights.
    levels = sorted(set(h.values()))
    degrees: list[int] = []
    for a, b in zip(levels, levels[1:]):
        total = 0
        for eid, (u, v, _) in enumerate(G.edges):
            m = mu[eid]
            if m > 0 and min(h[u], h[v]) <= a and max(h[u], h[v]) >= b:
                total += m
        for lid, at in enumerate(G.legs):
            s = c.leg_mu.get(lid, 0)
            if (s > 0 and h[at] <= a) or (s < 0 and h[at] >= b):
                total += abs(s)
        degrees.append(total)
    if top_open:
        degrees.append(sum(s for s in c.leg_mu.values() if s > 0))
    if bottom_open:
        degrees.append(sum(-s for s in c.leg_mu.values() if s < 0))
    if degrees and len(set(degrees)) > 1:
        raise DegreeVaries(f"fibre degrees over generic heights are not constant: {degrees}")
    d = degrees[0] if degrees else 0

    # 4. non-degeneracy.
    for v in G.vertex_ids:
        if all(m == 0 for m in ends[v]):
            raise DegenerateVertex(f"vertex {v!r} has no end of positive dilation")
    for eid in range(len(G.edges)):
        if G.is_loop(eid) and mu[eid] == 0:
            raise ContractedLoop(f"loop {eid} is contracted")

    m_of = {v: max(up[v], down[v]) for v in G.vertex_ids}
    slack = _rh_slacks(ends, m_of)
    assert all(s >= 0 for s in slack.values()), "harmonicity forces non-negative RH slack"
    return RHReport(slack=slack, local_degree=m_of, degree=d, realizable=d <= 3)


# ---------------------------------------------------------------------------
# verification: finite tree targets
# ---------------------------------------------------------------------------


def _tree_paths(T: MetricGraph) -> dict[VertexId, dict[VertexId, list[int]]]:
    """All-pairs vertex paths in the tree, as edge-id lists."""
    adj: dict[VertexId, list[tuple[int, VertexId]]] = {v: [] for v in T.vertex_ids}
    for eid, (u, v, _) in enumerate(T.edges):
        adj[u].append((eid, v))
        adj[v].append((eid, u))
    paths: dict[VertexId, dict[VertexId, list[int]]] = {}
    for root in T.vertex_ids:
        out = {root: []}
        queue = [root]
        while queue:
            x = queue.pop(0)
            for eid, y in adj[x]:
                if y not in out:
                    out[y] = out[x] + [eid]
                    queue.append(y)
        paths[root] = out
    return paths


def _anchors(T: MetricGraph, p: GraphPoint):
    """Ways of leaving the point p: (vertex reached, distance, direction, segments)."""
    if isinstance(p, EdgePoint):
        u, v, length = T.edges[p.edge]
        return [
            (u, p.offset, ("end", 0), [(p.edge, ZERO, p.offset)]),
            (v, length - p.offset, ("end", 1), [(p.edge, p.offset, length)]),
        ]
    return [(p, ZERO, None, [])]


def _geodesic(T: MetricGraph, paths, p: GraphPoint, q: GraphPoint):
    """Length, covered segments and initial directions of the tree geodesic.

    Directions are ``("end", 0/1)`` at an interior point (toward the first
    or second endpoint of its edge) and ``("e", eid)`` at a vertex.
    """
    if isinstance(p, EdgePoint) and isinstance(q, EdgePoint) and p.edge == q.edge:
        lo, hi = sorted((p.offset, q.offset))
        d0 = ("end", 1) if q.offset > p.offset else ("end", 0)
        d1 = ("end", 0) if q.offset > p.offset else ("end", 1)
        return hi - lo, [(p.edge, lo, hi)], d0, d1
    best = None
    for (a, da, dir_p, seg_p) in _anchors(T, p):
        for (b, db, dir_q, seg_q) in _anchors(T, q):
            mids = paths[a][b]
            total = da + db + sum(T.edge_length(e) for e in mids)
            if best is None or total < best[0]:
                segs = list(seg_p) + [(e, ZERO, T.edge_length(e)) for e in mids] + list(seg_q)
                fp = dir_p
                if fp is None:
                    fp = ("e", mids[0]) if mids else (("e", seg_q[0][0]) if seg_q else None)
                fq = dir_q
                if fq is None:
                    fq = ("e", mids[-1]) if mids else (("e", seg_p[-1][0]) if seg_p else None)
                best = (total, segs, fp, fq)
    return best


def _verify_tree(c: TropicalCover) -> RHReport:
    G, T, img, mu = c.source, c.target, c.image, c.mu
    paths = _tree_paths(T)

    # 1. edge consistency: μ·len must equal the geodesic between the images.
    geod = {}
    for eid, (u, v, length) in enumerate(G.edges):
        m = mu[eid]
        dist, segs, du, dv = _geodesic(T, paths, img[u], img[v])
        if m == 0:
            if dist != 0:
                raise LengthMismatch(f"edge {eid} is contracted but its endpoint images differ")
        elif dist == 0:
            raise LengthMismatch(
                f"edge {eid} carries dilation {m} but both endpoints map to the same point"
                + (" (loops must be subdivided at their fold)" if u == v else ""))
        elif m * length != dist:
            raise LengthMismatch(f"edge {eid}: {m}*{length} != geodesic length {dist}")
        else:
            geod[eid] = (segs, du, dv)

    # 2. harmonicity: at each vertex the μ-sum into every target direction agrees.
    ends: dict[VertexId, list[int]] = {v: [] for v in G.vertex_ids}
    m_of: dict[VertexId, int] = {}
    for v in G.vertex_ids:
        p = img[v]
        if isinstance(p, EdgePoint):
            dirs = [("end", 0), ("end", 1)]
        else:
            dirs = [("e", eid) for eid in T.incident_edges(p)]
        sums = {dkey: 0 for dkey in dirs}
        for eid in G.incident_edges(v):
            u0, v0, _ = G.edges[eid]
            m = mu[eid]
            reps = [0, 1] if u0 == v0 else ([0] if u0 == v else [1])
            for side in reps:
                ends[v].append(m)
                if m == 0:
                    continue
                segs, du, dv = geod[eid]
                sums[du if side == 0 else dv] += m
        if len(sums) > 1 and len(set(sums.values())) > 1:
            raise NotHarmonic(
                f"vertex {v!r}: directional dilation sums {sorted(sums.values())} disagree")
        m_of[v] = max(sums.values()) if sums else 0

    # 3. constant degree over generic points of every target edge.
    cuts: dict[int, set[Fraction]] = {eid: {ZERO, T.edge_length(eid)} for eid in range(len(T.edges))}
    for v in G.vertex_ids:
        p = img[v]
        if isinstance(p, EdgePoint):
            cuts[p.edge].add(p.offset)
    degrees = []
    for teid in range(len(T.edges)):
        stops = sorted(cuts[teid])
        for a, b in zip(stops, stops[1:]):
            total = 0
            for eid, (segs, _, _) in geod.items():
                if any(e == teid and lo <= a and hi >= b for e, lo, hi in segs):
                    total += mu[eid]
            degrees.append(total)
    if len(set(degrees)) > 1:
        raise DegreeVaries(f"fibre degrees over generic points are not constant: {degrees}")
    d = degrees[0] if degrees else 0

    # 4. non-degeneracy.
    for v in G.vertex_ids:
        if all(m == 0 for m in ends[v]):
            raise DegenerateVertex(f"vertex {v!r} has no end of positive dilation")
    for eid in range(len(G.edges)):
        if G.is_loop(eid) and mu[eid] == 0:
            raise ContractedLoop(f"loop {eid} is contracted")

    slack = _rh_slacks(ends, m_of)
    assert all(s >= 0 for s in slack.values()), "harmonicity forces non-negative RH slack"
    return RHReport(slack=slack, local_degree=m_of, degree=d, realizable=d <= 3)


def verify_cover(c: TropicalCover) -> RHReport:
    """Check every cover invariant; report per-vertex RH slack on success.

    Invariants are checked in order — edge consistency, harmonicity,
    constant fibre degree, non-degeneracy — and the first violation raises
    the matching error (LengthMismatch, NotHarmonic, DegreeVaries,
    DegenerateVertex or ContractedLoop).
    """
    if c.target is None:
        return _verify_path(c)
    return _verify_tree(c)


def is_well_contracted(c: TropicalCover) -> bool:
    """True iff the (verified) cover maps onto a path and contracts no loop.

    Requires ``verify_cover`` to pass, which already enforces
    non-degeneracy; what remains is the shape of the target.  Path targets
    qualify by construction; a tree target qualifies exactly when it has no
    vertex of valence three or more.
    """
    verify_cover(c)
    if c.target is None:
        return True
    return all(c.target.valence(v) <= 2 for v in c.target.vertex_ids)


# ---------------------------------------------------------------------------
# pullback of a generic point
# ---------------------------------------------------------------------------


def pullback_divisor(c: TropicalCover, t: Fraction) -> Divisor:
    """The fibre over the generic height t, as a divisor on the source.

    Each edge whose image spans t contributes its dilation at the unique
    preimage point.  t must avoid vertex heights (so that the fibre is a
    finite set of edge-interior points); path targets only.
    """
    if c.target is not None:
        raise ValueError("pullback is implemented for path targets only")
    t = frac(t)
    h = c.height
    if t in set(h.values()):
        raise ValueError(f"height {t} is not generic (it is a vertex image)")
    if not min(h.values()) < t < max(h.values()):
        raise ValueError(f"height {t} lies outside the covered segment")
    chips: dict[GraphPoint, int] = {}
    for eid, (u, v, _) in enumerate(c.source.edges):
        m = c.mu[eid]
        if m == 0:
            continue
        lo, hi = (u, v) if h[u] < h[v] else (v, u)
        if h[lo] < t < h[hi]:
            # distance from the edge's first endpoint u to the fibre point
            offset = abs(t - h[u]) / m
            chips[EdgePoint(eid, offset)] = m
    return Divisor(chips)


# ---------------------------------------------------------------------------
# search for well-contracted covers
# ---------------------------------------------------------------------------
#
# With exact harmonicity, any interior subdivision point of an edge is
# 2-valent, hence is either a genuine fold (both ends pointing the same way,
# which forces it onto an end of the target segment) or a boundary between a
# contracted and a sloped part (one-sided, same conclusion).  A profile for
# an edge is its sequence of signed parts (sign, dilation); consecutive
# parts never repeat a sign, every junction lands on a target end, and the
# global degree equals the dilation total over the bottom (equivalently top)
# fibre.  This makes the continuous part of the problem a single exact LP
# per combinatorial assignment: unknown vertex heights and part lengths,
# with fold junctions pinned to the two ends of the segment.


@dataclass(frozen=True)
class CoverSearch:
    """Outcome of a bounded cover search.

    ``cover`` is the first cover found (its source is the input graph with
    fold points added as subdivision vertices), or None.  ``budget`` is the
    bound on interior fold points per original edge under which absence was
    established, so a negative result is a bounded claim, not a theorem.
    ``assignment`` records the per-edge profiles of the found cover.
    """

    degree: int
    budget: int
    cover: TropicalCover | None
    note: str
    assignment: tuple | None = None

    @property
    def found(self) -> bool:
        return self.cover is not None

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "budget": self.budget,
            "found": self.found,
            "cover": self.cover.to_json() if self.cover else None,
            "note": self.note,
        }


def _profile_data(parts: tuple[tuple[int, int], ...]) -> tuple:
    """End signs/dilations and fold contributions of a profile."""
    jmin = jmax = 0
    for (s1, m1), (s2, m2) in zip(parts, parts[1:]):
        upward = (m1 if s1 < 0 else 0) + (m2 if s2 > 0 else 0)
        downward = (m1 if s1 > 0 else 0) + (m2 if s2 < 0 else 0)
        assert not (upward and downward), "junctions are one-sided by construction"
        jmin += upward
        jmax += downward
    (s_first, m_first), (s_last, m_last) = parts[0], parts[-1]
    return (s_first, m_first, -s_last, m_last, jmin, jmax)


@lru_cache(maxsize=None)
def _edge_profiles(d: int, budget: int, loop: bool) -> tuple:
    """All signed part sequences for one edge, in enumeration order.

    Entries are (parts, end data) pairs; parts with at most ``budget``
    junctions, dilations in 1..d on sloped parts, no consecutive sign
    repeats, and every junction's fold weight at most d.  Loop edges must
    change direction, so profiles without both signs are dropped.
    """
    out = []
    for nparts in range(1, budget + 2):
        for signs in itertools.product((-1, 0, 1), repeat=nparts):
            if any(a == b for a, b in zip(signs, signs[1:])):
                continue
            if loop and not (any(s > 0 for s in signs) and any(s < 0 for s in signs)):
                continue
            ranges = [range(1, d + 1) if s else range(0, 1) for s in signs]
            for mus in itertools.product(*ranges):
                parts = tuple(zip(signs, mus))
                data = _profile_data(parts)
                if data[4] > d or data[5] > d:
                    continue
                out.append((parts, data))
    return tuple(out)


def _edge_order(G: MetricGraph) -> list[int]:
    """Process most-constrained edges first, completing vertices early."""
    ends_left = {v: 0 for v in G.vertex_ids}
    for u, v, _ in G.edges:
        ends_left[u] += 1
        ends_left[v] += 1
    remaining = set(range(len(G.edges)))
    order = []
    while remaining:
        best = None
        for eid in sorted(remaining):
            u, v, _ = G.edges[eid]
            if u == v:
                completes = ends_left[u] == 2
                load = ends_left[u]
            else:
                completes = (ends_left[u] == 1) + (ends_left[v] == 1)
                load = ends_left[u] + ends_left[v]
            score = (-completes, load, eid)
            if best is None or score < best:
                best = score
        eid = best[2]
        u, v, _ = G.edges[eid]
        ends_left[u] -= 1
        ends_left[v] -= 1
        order.append(eid)
        remaining.discard(eid)
    return order


def _assignments(G: MetricGraph, d: int, budget: int) -> Iterator[dict[int, tuple]]:
    """Yield per-edge profile assignments surviving the local pruning.

    Enumeration is depth-first over edges in :func:`_edge_order`, profiles
    per edge in :func:`_edge_profiles` order, so the overall order — and
    hence the first result — is deterministic.  Besides the degree bounds,
    branches are cut as soon as the forced height relations placed so far
    (single-part edges, contracted parts, junction and one-sided-vertex
    pins) contradict each other, tracked in an undoable offset union-find;
    only assignments :func:`_reduce` would reject anyway are skipped, so
    the surviving stream is unchanged.
    """
    order = _edge_order(G)
    options = [_edge_profiles(d, budget, G.is_loop(eid)) for eid in order]
    ends_left = {v: 0 for v in G.vertex_ids}
    for u, v, _ in G.edges:
        ends_left[u] += 1
        ends_left[v] += 1
    up = {v: 0 for v in G.vertex_ids}
    down = {v: 0 for v in G.vertex_ids}
    chosen: dict[int, tuple] = {}
    totals = [0, 0]  # dilation totals over the bottom / top fibre

    # Undoable offset union-find over height nodes: h(x) = h(parent) + off.
    LO, HI = ("lo",), ("hi",)
    parent: dict = {}
    off: dict = {}
    size: dict = {}

    def find(x):
        if x not in parent:
            parent[x] = x
            off[x] = ZERO
            size[x] = 1
            return x, ZERO
        delta = ZERO
        while parent[x] != x:
            delta += off[x]
            x = parent[x]
        return x, delta

    def union(x, y, d, trail) -> bool:
        # impose h(y) = h(x) + d; record the attachment for rollback
        rx, dx = find(x)
        ry, dy = find(y)
        if rx == ry:
            return dy == dx + d
        shift = dx + d - dy  # h(ry) = h(rx) + shift
        if size[rx] < size[ry]:
            rx, ry, shift = ry, rx, -shift
        parent[ry] = rx
        off[ry] = shift
        size[rx] += size[ry]
        trail.append(ry)
        return True

    def undo(trail) -> None:
        for r in reversed(trail):
            size[parent[r]] -= size[r]
            parent[r] = r
            off[r] = ZERO

    def place(eid: int, parts: tuple, done: list, trail: list) -> bool:
        u, v, _ = G.edges[eid]
        n = len(parts)
        for i in range(1, n):
            s1, s2 = parts[i - 1][0], parts[i][0]
            anchor = LO if (s1 < 0 or s2 > 0) else HI
            if not union(anchor, ("j", eid, i), ZERO, trail):
                return False
        if n == 1:
            s, m = parts[0]
            delta = Fraction(s * m) * G.edge_length(eid)
            if not union(("v", u), ("v", v), delta, trail):
                return False
        else:
            nodes = [("v", u)] + [("j", eid, i) for i in range(1, n)] + [("v", v)]
            for i, (s, _) in enumerate(parts):
                if s == 0 and not union(nodes[i], nodes[i + 1], ZERO, trail):
                    return False
        for vert in done:
            if up[vert] and not down[vert]:
                if not union(LO, ("v", vert), ZERO, trail):
                    return False
            elif down[vert] and not up[vert]:
                if not union(HI, ("v", vert), ZERO, trail):
                    return False
        return True

    def rec(pos: int) -> Iterator[dict[int, tuple]]:
        if pos == len(order):
            if totals[0] == d and totals[1] == d:
                yield dict(chosen)
            return
        eid = order[pos]
        u, v, _ = G.edges[eid]
        incidences = [(u, 0), (v, 1)] if u != v else [(u, 0), (u, 1)]
        for parts, (su, mu_u, sv, mv_v, jmin, jmax) in options[pos]:
            if totals[0] + jmin > d or totals[1] + jmax > d:
                continue
            end_data = ((su, mu_u), (sv, mv_v))
            ok = True
            done: list[VertexId] = []
            for vert, side in incidences:
                s, m = end_data[side]
                if s > 0:
                    up[vert] += m
                elif s < 0:
                    down[vert] += m
                ends_left[vert] -= 1
                if up[vert] > d or down[vert] > d:
                    ok = False
                if ends_left[vert] == 0 and vert not in done:
                    done.append(vert)
            added_min = jmin
            added_max = jmax
            if ok:
                for vert in done:
                    if up[vert] and down[vert]:
                        if up[vert] != down[vert]:
                            ok = False
                    elif up[vert]:
                        added_min += up[vert]
                    elif down[vert]:
                        added_max += down[vert]
                    else:
                        ok = False  # vertex with no sloped end: degenerate
            if ok and (totals[0] + added_min <= d and totals[1] + added_max <= d):
                trail: list = []
                if place(eid, parts, done, trail):
                    totals[0] += added_min
                    totals[1] += added_max
                    chosen[eid] = parts
                    yield from rec(pos + 1)
                    del chosen[eid]
                    totals[0] -= added_min
                    totals[1] -= added_max
                undo(trail)
            for vert, side in incidences:
                s, m = end_data[side]
                if s > 0:
                    up[vert] -= m
                elif s < 0:
                    down[vert] -= m
                ends_left[vert] += 1

    yield from rec(0)


@dataclass(frozen=True)
class _Reduced:
    """An assignment's constraint system after exact substitution.

    Forced height relations (single-part edges, contracted parts, fold
    junctions and one-sided vertices pinned to a segment end) are folded
    into per-node affine expressions ``c + k*H`` plus at most one variable
    per undetermined height class, so the remaining LP carries only the
    genuinely free quantities.  Variables are ordered: height-class
    variables, free part lengths, then the segment height H.
    """

    assignment: Mapping[int, tuple]
    vertex_expr: Mapping[VertexId, tuple]   # v -> (c, k, var index | None)
    l_index: Mapping[tuple, int]            # (eid, i) -> free length variable
    det_parts: Mapping[tuple, tuple]        # (eid, i) -> (c, k)
    fixed_parts: Mapping[tuple, Fraction]   # (eid, i) -> known length
    nv: int                                 # total variable count incl. H
    A_eq: tuple
    b_eq: tuple
    A_strict: tuple
    b_strict: tuple
    A_loose: tuple
    b_loose: tuple


def _reduce(G: MetricGraph, assignment: dict[int, tuple]):
    """Fold forced relations into a reduced system; None if inconsistent.

    Single-part edges force an exact height difference, contracted parts
    force equal heights, fold junctions and one-sided vertices are pinned
    to an end of the target segment.  Chasing those relations through a
    weighted union-find (with the two segment ends as ordinary nodes)
    rejects most infeasible assignments outright; for the survivors the
    left-over constraints are assembled into a small LP description.
    """
    LO, HI = ("lo",), ("hi",)
    parent: dict = {}
    off: dict = {}

    def find(x):
        if x not in parent:
            parent[x] = x
            off[x] = ZERO
            return x, ZERO
        chain = []
        while parent[x] != x:
            chain.append(x)
            x = parent[x]
        delta = ZERO
        for node in reversed(chain):
            delta += off[node]
            parent[node] = x
            off[node] = delta
        return x, delta

    def union(x, y, d) -> bool:
        # impose h(y) = h(x) + d
        rx, dx = find(x)
        ry, dy = find(y)
        if rx == ry:
            return dy == dx + d
        parent[ry] = rx
        off[ry] = dx + d - dy
        return True

    up = {v: 0 for v in G.vertex_ids}
    down = {v: 0 for v in G.vertex_ids}
    for eid, parts in assignment.items():
        u, v, _ = G.edges[eid]
        su, mu_u, sv, mv_v, _, _ = _profile_data(parts)
        for vert, s, m in ((u, su, mu_u), (v, sv, mv_v)):
            if s > 0:
                up[vert] += m
            elif s < 0:
                down[vert] += m
    for v in G.vertex_ids:
        if up[v] and not down[v]:
            if not union(LO, ("v", v), ZERO):
                return None
        elif down[v] and not up[v]:
            if not union(HI, ("v", v), ZERO):
                return None

    def node_key(eid, i, parts):
        if i == 0:
            return ("v", G.edges[eid][0])
        if i == len(parts):
            return ("v", G.edges[eid][1])
        return ("j", eid, i)

    multi = []
    for eid in sorted(assignment):
        parts = assignment[eid]
        for i in range(1, len(parts)):
            s1, s2 = parts[i - 1][0], parts[i][0]
            anchor = LO if (s1 < 0 or s2 > 0) else HI
            if not union(anchor, ("j", eid, i), ZERO):
                return None
        if len(parts) == 1:
            s, m = parts[0]
            delta = Fraction(s * m) * G.edge_length(eid)
            if not union(("v", G.edges[eid][0]), ("v", G.edges[eid][1]), delta):
                return None
        else:
            multi.append(eid)
            for i, (s, m) in enumerate(parts):
                if s == 0:
                    if not union(node_key(eid, i, parts), node_key(eid, i + 1, parts), ZERO):
                        return None

    # Express anchored heights as c + k*H; give each undetermined height
    # class one variable, in first-appearance order over a fixed node scan.
    rlo, dlo = find(LO)
    rhi, dhi = find(HI)
    h_eq: list[Fraction] = []                           # forced values of H
    h_lo: list[tuple[Fraction, bool]] = [(ZERO, True)]  # (bound, strict)
    h_hi: list[tuple[Fraction, bool]] = []
    if rlo == rhi:
        h_eq.append(dhi - dlo)

    var_of: dict = {}
    var_span: list[list[Fraction]] = []  # per variable: [min, max] class offset

    def expr(node):
        r, dx = find(node)
        if r == rlo:
            return dx - dlo, 0, None
        if r == rhi:
            return dx - dhi, 1, None
        if r not in var_of:
            var_of[r] = len(var_span)
            var_span.append([dx, dx])
        i = var_of[r]
        span = var_span[i]
        span[0] = min(span[0], dx)
        span[1] = max(span[1], dx)
        return dx, 0, i

    def positive(c, k, scale, strict):
        # require (c + k*H)/scale > 0 (or >= 0 when not strict); scale != 0
        if scale < 0:
            c, k = -c, -k
        if k == 0:
            return c > 0 if strict else c >= 0
        bound = -c / k
        if k > 0:
            h_lo.append((bound, strict))
        else:
            h_hi.append((bound, strict))
        return True

    vertex_expr = {}
    for v in G.vertex_ids:
        c, k, var = vertex_expr[v] = expr(("v", v))
        if var is not None:
            continue
        if k == 0:
            # height c: 0 <= c and c <= H
            if c < 0:
                return None
            h_lo.append((c, False))
        else:
            # height H + c: 0 <= H + c and c <= 0
            if c > 0:
                return None
            h_lo.append((-c, False))

    l_index: dict = {}
    det_parts: dict = {}
    fixed_parts: dict = {}
    relations: list[tuple] = []  # (eid, i, s, m, expr_a, expr_b)
    sums: list[tuple] = []       # (eid, var part keys, det (c, k) total, length)
    for eid in sorted(assignment):
        parts = assignment[eid]
        if len(parts) == 1:
            fixed_parts[(eid, 0)] = G.edge_length(eid)
            continue
        det_c, det_k = ZERO, ZERO
        var_keys = []
        for i, (s, m) in enumerate(parts):
            ea = expr(node_key(eid, i, parts))
            eb = expr(node_key(eid, i + 1, parts))
            free = s == 0 or ea[2] is not None or eb[2] is not None
            if free:
                var_keys.append((eid, i))
                l_index[(eid, i)] = len(l_index)
                if s != 0:
                    relations.append((eid, i, s, m, ea, eb))
                continue
            c, k = eb[0] - ea[0], Fraction(eb[1] - ea[1])
            # determined length (c + k*H)/(s*m) must be positive
            if not positive(c, k, s * m, strict=True):
                return None
            cl, kl = Fraction(c, s * m), k / (s * m)
            det_parts[(eid, i)] = (cl, kl)
            det_c += cl
            det_k += kl
        length = G.edge_length(eid)
        if not var_keys:
            # lengths sum to the edge length: det_c + det_k*H == length
            if det_k == 0:
                if det_c != length:
                    return None
            else:
                h_eq.append((length - det_c) / det_k)
        else:
            # the determined parts alone must leave room for the free ones
            if not positive(length - det_c, -det_k, 1, strict=True):
                return None
            sums.append((eid, var_keys, (det_c, det_k), length))

    # Is there a value of H meeting every recorded constraint?
    if h_eq:
        if len(set(h_eq)) > 1:
            return None
        h_val = h_eq[0]
        for bound, strict in h_lo:
            if h_val < bound or (strict and h_val == bound):
                return None
        for bound, strict in h_hi:
            if h_val > bound or (strict and h_val == bound):
                return None
    else:
        low = max(b for b, _ in h_lo)
        low_strict = any(s for b, s in h_lo if b == low)
        if h_hi:
            high = min(b for b, _ in h_hi)
            high_strict = any(s for b, s in h_hi if b == high)
            if low > high or (low == high and (low_strict or high_strict)):
                return None

    # Assemble the reduced LP: variables r_0..r_{t-1}, l_0..l_{p-1}, H.
    nvar = len(var_span)
    nv = nvar + len(l_index) + 1
    Hi = nv - 1

    def new_row():
        return [ZERO] * nv

    A_eq: list = []
    b_eq: list = []
    for val in h_eq:
        row = new_row()
        row[Hi] = Fraction(1)
        A_eq.append(row)
        b_eq.append(val)
    for eid, i, s, m, ea, eb in relations:
        # s*m*l - (h_b - h_a) = 0 with h = c + k*H (+ class variable)
        row = new_row()
        row[nvar + l_index[(eid, i)]] = Fraction(s * m)
        row[Hi] -= Fraction(eb[1] - ea[1])
        if ea[2] is not None:
            row[ea[2]] += Fraction(1)
        if eb[2] is not None:
            row[eb[2]] -= Fraction(1)
        A_eq.append(row)
        b_eq.append(eb[0] - ea[0])
    for eid, var_keys, (det_c, det_k), length in sums:
        row = new_row()
        for key in var_keys:
            row[nvar + l_index[key]] = Fraction(1)
        row[Hi] = det_k
        A_eq.append(row)
        b_eq.append(length - det_c)

    A_strict: list = []
    b_strict: list = []
    for key, li in l_index.items():
        row = new_row()
        row[nvar + li] = Fraction(-1)
        A_strict.append(row)
        b_strict.append(ZERO)
    row = new_row()
    row[Hi] = Fraction(-1)
    A_strict.append(row)
    b_strict.append(ZERO)
    for (cl, kl) in det_parts.values():
        if kl != 0:
            row = new_row()
            row[Hi] = -kl
            A_strict.append(row)
            b_strict.append(cl)

    A_loose: list = []
    b_loose: list = []
    for c, k, var in vertex_expr.values():
        if var is not None:
            continue
        row = new_row()
        row[Hi] = Fraction(-1)
        A_loose.append(row)
        b_loose.append(c if k else -c)
    for i, (lo_off, hi_off) in enumerate(var_span):
        row = new_row()
        row[i] = Fraction(-1)
        A_loose.append(row)
        b_loose.append(lo_off)
        row = new_row()
        row[i] = Fraction(1)
        row[Hi] = Fraction(-1)
        A_loose.append(row)
        b_loose.append(-hi_off)

    return _Reduced(
        assignment=assignment,
        vertex_expr=vertex_expr,
        l_index=l_index,
        det_parts=det_parts,
        fixed_parts=fixed_parts,
        nv=nv,
        A_eq=tuple(A_eq),
        b_eq=tuple(b_eq),
        A_strict=tuple(A_strict),
        b_strict=tuple(b_strict),
        A_loose=tuple(A_loose),
        b_loose=tuple(b_loose),
    )


def _consistent(G: MetricGraph, assignment: dict[int, tuple]) -> bool:
    """True when the assignment's forced relations are not contradictory."""
    return _reduce(G, assignment) is not None


def _solve_reduced(red: _Reduced):
    """Solve a reduced system; (heights, part lengths, H) or None."""
    res = strict_feasible(
        list(red.A_strict), list(red.b_strict),
        list(red.A_eq), list(red.b_eq),
        list(red.A_loose), list(red.b_loose),
    )
    if res is None:
        return None
    x, _ = res
    nvar = red.nv - 1 - len(red.l_index)
    h_top = x[red.nv - 1]
    heights = {}
    for v, (c, k, var) in red.vertex_expr.items():
        h = c + (h_top if k else ZERO)
        if var is not None:
            h += x[var]
        heights[v] = h
    lengths = dict(red.fixed_parts)
    for key, li in red.l_index.items():
        lengths[key] = x[nvar + li]
    for key, (cl, kl) in red.det_parts.items():
        lengths[key] = cl + kl * h_top
    return heights, lengths, h_top


def _solve_assignment_direct(G: MetricGraph, d: int, assignment: dict[int, tuple]):
    """Reference LP over all heights and part lengths; None if infeasible.

    The bottom of the target is pinned at 0 and the top is the variable
    H; fold junctions and one-sided vertices are pinned to their end.
    Returns (vertex heights, part lengths per edge, H) on success.
    """
    up = {v: 0 for v in G.vertex_ids}
    down = {v: 0 for v in G.vertex_ids}
    for eid, parts in assignment.items():
        u, v, _ = G.edges[eid]
        su, mu_u, sv, mv_v, _, _ = _profile_data(parts)
        for vert, s, m in ((u, su, mu_u), (v, sv, mv_v)):
            if s > 0:
                up[vert] += m
            elif s < 0:
                down[vert] += m

    # Variable layout: unpinned vertex heights, then part lengths, then H.
    pinned: dict[VertexId, str] = {}
    for v in G.vertex_ids:
        if up[v] and not down[v]:
            pinned[v] = "min"
        elif down[v] and not up[v]:
            pinned[v] = "max"
    h_index = {v: i for i, v in enumerate(v for v in G.vertex_ids if v not in pinned)}
    part_index: dict[tuple[int, int], int] = {}
    for eid in sorted(assignment):
        for i in range(len(assignment[eid])):
            part_index[(eid, i)] = len(h_index) + len(part_index)
    n = len(h_index) + len(part_index) + 1
    H = n - 1

    def node_expr(eid: int, node: int):
        """(coefficient row, constant) for the height of a profile node."""
        parts = assignment[eid]
        u, v, _ = G.edges[eid]
        row = [ZERO] * n
        if node == 0 or node == len(parts):
            vert = u if node == 0 else v
            cls = pinned.get(vert)
            if cls == "min":
                return row, ZERO
            if cls == "max":
                row[H] = Fraction(1)
                return row, ZERO
            row[h_index[vert]] = Fraction(1)
            return row, ZERO
        s1 = parts[node - 1][0]
        s2 = parts[node][0]
        upward = (s1 < 0) or (s2 > 0)
        if upward:
            return row, ZERO  # fold at the bottom: height 0
        row[H] = Fraction(1)
        return row, ZERO

    A_eq: list[list[Fraction]] = []
    b_eq: list[Fraction] = []
    for eid in sorted(assignment):
        parts = assignment[eid]
        length = G.edge_length(eid)
        total = [ZERO] * n
        for i, (s, m) in enumerate(parts):
            li = part_index[(eid, i)]
            total[li] = Fraction(1)
            row_a, const_a = node_expr(eid, i)
            row_b, const_b = node_expr(eid, i + 1)
            row = [rb - ra for ra, rb in zip(row_a, row_b)]
            row[li] -= Fraction(s * m)
            A_eq.append(row)
            b_eq.append(const_a - const_b)
        A_eq.append(total)
        b_eq.append(length)

    A_strict: list[list[Fraction]] = []
    for li in part_index.values():
        row = [ZERO] * n
        row[li] = Fraction(-1)
        A_strict.append(row)
    row = [ZERO] * n
    row[H] = Fraction(-1)
    A_strict.append(row)
    b_strict = [ZERO] * len(A_strict)

    A_loose: list[list[Fraction]] = []
    b_loose: list[Fraction] = []
    for v, i in h_index.items():
        row = [ZERO] * n
        row[i] = Fraction(-1)
        A_loose.append(row)
        b_loose.append(ZERO)
        row = [ZERO] * n
        row[i] = Fraction(1)
        row[H] = Fraction(-1)
        A_loose.append(row)
        b_loose.append(ZERO)

    res = strict_feasible(A_strict, b_strict, A_eq, b_eq, A_loose, b_loose)
    if res is None:
        return None
    x, _ = res
    heights = {}
    for v in G.vertex_ids:
        cls = pinned.get(v)
        if cls == "min":
            heights[v] = ZERO
        elif cls == "max":
            heights[v] = x[H]
        else:
            heights[v] = x[h_index[v]]
    lengths = {key: x[i] for key, i in part_index.items()}
    return heights, lengths, x[H]


def _solve_assignment(G: MetricGraph, d: int, assignment: dict[int, tuple]):
    """Heights and part lengths for an assignment; None if infeasible.

    The bottom of the target is pinned at 0 and the top is the variable H;
    fold junctions and one-sided vertices are pinned to their end.  The
    system is first reduced by exact substitution, then finished by an LP.
    Equivalent to (but much faster than) :func:`_solve_assignment_direct`.
    """
    red = _reduce(G, assignment)
    if red is None:
        return None
    return _solve_reduced(red)


def _build_cover(G: MetricGraph, assignment: dict[int, tuple], solution) -> TropicalCover:
    heights, lengths, h_top = solution
    used = set(map(str, G.vertex_ids))

    def fresh(eid: int, i: int) -> str:
        name = f"w{eid}_{i}"
        while name in used:
            name = "_" + name
        used.add(name)
        return name

    verts: list = [(v, G.genus_of[v]) for v in G.vertex_ids]
    new_edges: list = []
    mu: dict[int, int] = {}
    h = dict(heights)
    for eid in range(len(G.edges)):
        parts = assignment[eid]
        u, v, _ = G.edges[eid]
        chain = [u]
        for i in range(len(parts) - 1):
            w = fresh(eid, i)
            verts.append((w, 0))
            s1, s2 = parts[i][0], parts[i + 1][0]
            h[w] = ZERO if ((s1 < 0) or (s2 > 0)) else h_top
            chain.append(w)
        chain.append(v)
        for i, (s, m) in enumerate(parts):
            new_edges.append((chain[i], chain[i + 1], lengths[(eid, i)]))
            mu[len(new_edges) - 1] = m
    source = MetricGraph(verts, new_edges)
    return TropicalCover(source, h, mu)


def search_well_contracted_cover(G: MetricGraph, d: int = 3, budget: int = 2) -> CoverSearch:
    """Bounded search for a degree-d cover of a path with source model of G.

    Enumerates per-edge dilation profiles with at most ``budget`` interior
    fold points per original edge (deterministically, most-constrained
    edges first, profiles in lexicographic order), prunes by harmonicity
    and the degree-d fibre bound, and solves one exact LP per surviving
    assignment.  The first feasible assignment is returned as a verified
    cover whose source is G with fold vertices added; a None result means
    no cover exists *within this budget* — it is recorded on the result.
    """
    if d < 2:
        raise ValueError("cover degree must be at least 2")
    if budget < 0:
        raise ValueError("budget must be non-negative")
    if G.legs:
        raise ValueError("cover search expects a leg-free graph")
    if any(G.genus_of[v] for v in G.vertex_ids):
        raise ValueError("cover search expects all genus carried by cycles, not vertices")

    chunk_size = 16
    reduced = (
        (a, red)
        for a in _assignments(G, d, budget)
        if (red := _reduce(G, a)) is not None
    )
    while True:
        chunk = list(itertools.islice(reduced, chunk_size))
        if not chunk:
            break
        solutions = parallel_map(lambda pair: _solve_reduced(pair[1]), chunk)
        for (assignment, _), sol in zip(chunk, solutions):
            if sol is not None:
                cover = _build_cover(G, assignment, sol)
                report = verify_cover(cover)
                assert report.degree == d
                assert is_well_contracted(cover)
                key = tuple(assignment[eid] for eid in sorted(assignment))
                folds = sum(len(p) - 1 for p in key)
                return CoverSearch(
                    degree=d,
                    budget=budget,
                    cover=cover,
                    note=(f"found a degree-{d} cover with {folds} fold point"
                          + ("" if folds == 1 else "s")),
                    assignment=key,
                )
    return CoverSearch(
        degree=d,
        budget=budget,
        cover=None,
        note=(f"no degree-{d} cover with at most {budget} interior fold points per edge; "
              "a cover needing more fold points would not be detected"),
    )


# ---------------------------------------------------------------------------
# forbidden patterns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PatternOccurrence:
    """One match of a forbidden pattern: its hub vertices, the attaching
    edges, and the vertex sets of the positive-genus components involved."""

    pattern: str
    hubs: tuple[VertexId, ...]
    attaching_edges: tuple[int, ...]
    components: tuple[frozenset, ...]

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "hubs": list(self.hubs),
            "attaching_edges": list(self.attaching_edges),
            "components": [sorted(c, key=str) for c in self.components],
        }


def _component_split(G: MetricGraph, removed_vertices: frozenset, removed_edges: frozenset):
    """Connected components of G minus vertices/edges, with their genus and
    the edges attaching each component to each removed vertex."""
    adj: dict[VertexId, list[tuple[int, VertexId]]] = {
        v: [] for v in G.vertex_ids if v not in removed_vertices}
    for eid, (u, v, _) in enumerate(G.edges):
        if eid in removed_edges or u in removed_vertices or v in removed_vertices:
            continue
        adj[u].append((eid, v))
        adj[v].append((eid, u))
    seen: set[VertexId] = set()
    comps = []
    for start in adj:
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        verts = {start}
        while stack:
            x = stack.pop()
            for _, y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    verts.add(y)
                    stack.append(y)
        internal = [eid for eid, (u, v, _) in enumerate(G.edges)
                    if eid not in removed_edges and u in verts and v in verts]
        g = len(internal) - len(verts) + 1 + sum(G.genus_of[v] for v in verts)
        boundary: dict[VertexId, list[int]] = {}
        for eid, (u, v, _) in enumerate(G.edges):
            if eid in removed_edges:
                continue
            for a, b in ((u, v), (v, u)):
                if a in removed_vertices and b in verts:
                    boundary.setdefault(a, []).append(eid)
        comps.append((frozenset(verts), g, boundary))
    return comps


def detect_sprawling_node(G: MetricGraph) -> list[PatternOccurrence]:
    """Vertices carrying three bridges into three positive-genus components.

    Removing the three bridge edges must leave three components of positive
    genus apart from the vertex's own; such a vertex obstructs degree-3
    covers of a path.
    """
    H = G.without_legs()
    bridge_set = set(bridges(H))
    out = []
    for x in H.vertex_ids:
        inc = sorted(e for e in H.incident_edges(x) if e in bridge_set and not H.is_loop(e))
        for trio in itertools.combinations(inc, 3):
            comps = _component_split(H, frozenset(), frozenset(trio))
            sides = []
            for eid in trio:
                u, v, _ = H.edges[eid]
                far = v if u == x else u
                for verts, g, _ in comps:
                    if far in verts:
                        sides.append((verts, g))
                        break
            if all(g >= 1 for _, g in sides):
                out.append(PatternOccurrence(
                    pattern="sprawling",
                    hubs=(x,),
                    attaching_edges=tuple(trio),
                    components=tuple(verts for verts, _ in sides),
                ))
    return out


def _hub_pairs(G: MetricGraph):
    ids = sorted(G.vertex_ids, key=str)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            yield a, b


def detect_crowded_graph(G: MetricGraph) -> list[PatternOccurrence]:
    """Vertex pairs joined through three positive-genus components.

    Each component must attach by exactly one edge to each of the two hub
    vertices (and to nothing else); three such components force genus at
    least 5 and obstruct degree-3 covers.
    """
    H = G.without_legs()
    out = []
    for a, b in _hub_pairs(H):
        comps = _component_split(H, frozenset((a, b)), frozenset())
        blocks = [
            (verts, boundary)
            for verts, g, boundary in comps
            if g >= 1 and len(boundary.get(a, [])) == 1 and len(boundary.get(b, [])) == 1
            and sum(len(es) for es in boundary.values()) == 2
        ]
        if len(blocks) >= 3:
            edges = tuple(sorted(e for _, boundary in blocks for es in boundary.values() for e in es))
            out.append(PatternOccurrence(
                pattern="crowded",
                hubs=(a, b),
                attaching_edges=edges,
                components=tuple(sorted((verts for verts, _ in blocks), key=lambda s: sorted(map(str, s)))),
            ))
    return out


def detect_tie_fighter(G: MetricGraph) -> list[PatternOccurrence]:
    """Two bridged positive-genus wings flanking a doubly-attached middle.

    The pattern: hubs v₁, v₂; a bridge from v₁ into a positive-genus wing
    avoiding v₂, symmetrically for v₂; and at least two positive-genus
    middle components each attached by exactly one edge to each hub.  Like
    the crowded pattern it forces genus at least 5.
    """
    H = G.without_legs()
    out = []
    for a, b in _hub_pairs(H):
        comps = _component_split(H, frozenset((a, b)), frozenset())
        middles = [
            (verts, boundary)
            for verts, g, boundary in comps
            if g >= 1 and len(boundary.get(a, [])) == 1 and len(boundary.get(b, [])) == 1
            and sum(len(es) for es in boundary.values()) == 2
        ]
        wings_a = [
            (verts, boundary)
            for verts, g, boundary in comps
            if g >= 1 and len(boundary.get(a, [])) == 1 and not boundary.get(b)
            and sum(len(es) for es in boundary.values()) == 1
        ]
        wings_b = [
            (verts, boundary)
            for verts, g, boundary in comps
            if g >= 1 and len(boundary.get(b, [])) == 1 and not boundary.get(a)
            and sum(len(es) for es in boundary.values()) == 1
        ]
        if len(middles) >= 2 and wings_a and wings_b:
            wing_edges = tuple(sorted(
                [wings_a[0][1][a][0], wings_b[0][1][b][0]]))
            out.append(PatternOccurrence(
                pattern="tie-fighter",
                hubs=(a, b),
                attaching_edges=wing_edges + tuple(sorted(
                    e for _, boundary in middles for es in boundary.values() for e in es)),
                components=tuple(sorted(
                    [wings_a[0][0], wings_b[0][0]] + [verts for verts, _ in middles],
                    key=lambda s: sorted(map(str, s)))),
            ))
    return out
