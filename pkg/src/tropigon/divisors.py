"""Divisors on metric graphs: chip-firing, burning, rank, and gonality.

A divisor is a finite formal sum of integer chips at points of a metric
graph; points are either vertices or interior points of edges.  All rank
computations happen on a :class:`DiscretizedGraph`: edge lengths are scaled
by a common integer so that every edge splits into unit segments and every
chip sits on a subdivision vertex.  Chip-firing moves on that finite graph
generate linear equivalence, and the Baker–Norine rank is evaluated through
q-reduced forms obtained with Dhar's burning algorithm.

The rank of a divisor here is the maximum k such that for every effective
divisor E of degree k supported on subdivision vertices, D - E is equivalent
to an effective divisor.  Witness searches (`is_divisorially_d_gonal`) are
restricted to one subdivision resolution and say "not found at this
resolution" rather than "does not exist".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import lcm
from typing import Iterable, Mapping

from .errors import BadDivisor, UnscalableLengths
from .graphs import MetricGraph, VertexId
from .rationals import frac, frac_str

__all__ = [
    "EdgePoint",
    "GraphPoint",
    "Divisor",
    "DiscretizedGraph",
    "canonical_divisor",
    "dhar_burn",
    "q_reduced",
    "rank",
    "GonalitySearch",
    "is_divisorially_d_gonal",
    "scrollar_delta",
]


@dataclass(frozen=True)
class EdgePoint:
    """A point strictly inside an edge: distance `offset` from the edge's
    first endpoint, measured in the graph's length units."""

    edge: int
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "offset", frac(self.offset))
        if self.offset <= 0:
            raise ValueError("edge point offset must be strictly positive")


GraphPoint = VertexId | EdgePoint
"""A vertex id, or an :class:`EdgePoint` for an interior point of an edge."""


def _point_key(p: GraphPoint):
    """Deterministic sort key over mixed point kinds."""
    if isinstance(p, EdgePoint):
        return (1, 0, p.edge, p.offset)
    return (0, 0 if isinstance(p, int) else 1, p if isinstance(p, int) else str(p), 0)


class Divisor:
    """Finite formal sum of integer chips at graph points.

    Zero coefficients are dropped; instances are immutable value objects.
    """

    def __init__(self, chips: Mapping[GraphPoint, int] | Iterable[tuple[GraphPoint, int]] = ()):
        items = chips.items() if isinstance(chips, Mapping) else chips
        acc: dict[GraphPoint, int] = {}
        for p, n in items:
            if not isinstance(n, int):
                raise TypeError("chip counts must be integers")
            acc[p] = acc.get(p, 0) + n
        self._chips: dict[GraphPoint, int] = {p: n for p, n in acc.items() if n != 0}

    # -- inspection ----------------------------------------------------------

    @property
    def support(self) -> list[GraphPoint]:
        return sorted(self._chips, key=_point_key)

    def items(self) -> list[tuple[GraphPoint, int]]:
        return [(p, self._chips[p]) for p in self.support]

    def __getitem__(self, p: GraphPoint) -> int:
        return self._chips.get(p, 0)

    def degree(self) -> int:
        return sum(self._chips.values())

    def is_effective(self, away_from: GraphPoint | None = None) -> bool:
        return all(n >= 0 for p, n in self._chips.items() if p != away_from)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "Divisor") -> "Divisor":
        merged = dict(self._chips)
        for p, n in other._chips.items():
            merged[p] = merged.get(p, 0) + n
        return Divisor(merged)

    def __neg__(self) -> "Divisor":
        return Divisor({p: -n for p, n in self._chips.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __mul__(self, k: int) -> "Divisor":
        if not isinstance(k, int):
            raise TypeError("divisors scale by integers only")
        return Divisor({p: k * n for p, n in self._chips.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Divisor) and self._chips == other._chips

    def __hash__(self) -> int:
        return hash(tuple(self.items()))

    def __repr__(self) -> str:
        if not self._chips:
            return "Divisor(0)"
        terms = " + ".join(f"{n}*{p!r}" for p, n in self.items())
        return f"Divisor({terms})"

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        chips = []
        for p, n in self.items():
            if isinstance(p, EdgePoint):
                at: dict = {"edge": p.edge, "offset": frac_str(p.offset)}
            else:
                at = {"vertex": p}
            chips.append({"at": at, "n": n})
        return {"chips": chips}

    @classmethod
    def from_json(cls, data: dict) -> "Divisor":
        chips: list[tuple[GraphPoint, int]] = []
        for rec in data["chips"]:
            at = rec["at"]
            if "vertex" in at:
                chips.append((at["vertex"], int(rec["n"])))
            else:
                chips.append((EdgePoint(int(at["edge"]), frac(at["offset"])), int(rec["n"])))
        return cls(chips)


def canonical_divisor(G: MetricGraph) -> Divisor:
    """(valence(v) + 2*genus(v) - 2) chips at every vertex; degree 2g - 2.

    Smoothing a 2-valent genus-0 vertex or subdividing an edge does not
    change this divisor as a formal sum over the underlying metric space, so
    the formula may be applied to any model of the graph.
    """
    return Divisor({v: G.valence(v) + 2 * G.genus_of[v] - 2 for v in G.vertex_ids})


# ---------------------------------------------------------------------------
# Discretization


Node = tuple  # ("v", vertex id) or ("e", edge id, step index)


class DiscretizedGraph:
    """Unit-length chip-firing model of a metric graph.

    All edge lengths are multiplied by one common positive integer `scale`
    so that they become integers, then every edge is cut into unit segments.
    Loops always receive at least two segments (a loop with a single segment
    would collapse to a self-edge, which chip-firing cannot see).  Any points
    passed as `extra_points` are forced onto the subdivision grid by
    enlarging `scale`.

    Nodes are tagged tuples: ("v", id) for original vertices and
    ("e", eid, k) for the k-th cut point of edge eid (k = 1 .. m-1).
    """

    def __init__(self, G: MetricGraph, extra_points: Iterable[GraphPoint] = (), refine: int = 1):
        if G.legs:
            raise ValueError("divisor theory here handles graphs without unbounded ends")
        if any(G.genus_of[v] for v in G.vertex_ids):
            raise ValueError("chip-firing discretization requires all vertex genera to be 0")
        if refine < 1:
            raise ValueError("refine must be a positive integer")
        self.graph = G

        denoms = [frac(l).denominator for _, _, l in G.edges]
        for p in extra_points:
            if isinstance(p, EdgePoint):
                if not 0 <= p.edge < len(G.edges):
                    raise ValueError(f"edge point references unknown edge {p.edge}")
                if not 0 < p.offset < G.edge_length(p.edge):
                    raise ValueError("edge point offset must lie strictly inside its edge")
                denoms.append(p.offset.denominator)
            elif p not in G.genus_of:
                raise ValueError(f"divisor references unknown vertex {p!r}")
        scale = refine * lcm(*denoms) if denoms else refine
        while any(u == v and scale * l == 1 for u, v, l in G.edges):
            scale *= 2
        self.scale: int = scale

        self.segments: list[int] = []
        for _, _, l in G.edges:
            m = scale * l
            if m.denominator != 1:
                raise UnscalableLengths(f"length {l} does not scale to an integer by {scale}")
            self.segments.append(int(m))

        nodes: list[Node] = [("v", v) for v in G.vertex_ids]
        for eid, m in enumerate(self.segments):
            nodes.extend(("e", eid, k) for k in range(1, m))
        self.nodes: tuple[Node, ...] = tuple(nodes)
        self.index: dict[Node, int] = {x: i for i, x in enumerate(nodes)}

        adj: dict[Node, dict[Node, int]] = {x: {} for x in nodes}

        def link(a: Node, b: Node) -> None:
            adj[a][b] = adj[a].get(b, 0) + 1
            adj[b][a] = adj[b].get(a, 0) + 1

        for eid, (u, v, _) in enumerate(G.edges):
            m = self.segments[eid]
            chain = [("v", u)] + [("e", eid, k) for k in range(1, m)] + [("v", v)]
            for a, b in zip(chain, chain[1:]):
                if a == b:
                    raise UnscalableLengths("loop collapsed to a single segment")
                link(a, b)
        self.adj: dict[Node, dict[Node, int]] = adj
        self.node_degree: dict[Node, int] = {x: sum(adj[x].values()) for x in nodes}

        b1 = sum(self.segments) - len(self.nodes) + 1
        assert b1 == G.genus(), "unit subdivision must preserve the genus"

    # -- point <-> node ------------------------------------------------------

    def node_of(self, p: GraphPoint) -> Node:
        if isinstance(p, EdgePoint):
            t = p.offset * self.scale
            if t.denominator != 1:
                raise ValueError(f"point {p} does not lie on the subdivision grid (scale {self.scale})")
            k = int(t)
            if not 0 < k < self.segments[p.edge]:
                raise ValueError("edge point offset must lie strictly inside its edge")
            return ("e", p.edge, k)
        if p not in self.graph.genus_of:
            raise ValueError(f"unknown vertex {p!r}")
        return ("v", p)

    def point_of(self, node: Node) -> GraphPoint:
        if node[0] == "v":
            return node[1]
        _, eid, k = node
        return EdgePoint(eid, Fraction(k, self.scale))

    def vector_of(self, D: Divisor) -> dict[Node, int]:
        vec = {x: 0 for x in self.nodes}
        for p, n in D.items():
            vec[self.node_of(p)] += n
        return vec

    def divisor_of(self, vec: Mapping[Node, int]) -> Divisor:
        return Divisor({self.point_of(x): n for x, n in vec.items() if n != 0})

    # -- chip-firing ---------------------------------------------------------

    def fire_set(self, vec: dict[Node, int], S: Iterable[Node]) -> None:
        """Each node of S sends one chip along every edge leaving S (in place)."""
        inside = set(S)
        for x in inside:
            for y, m in self.adj[x].items():
                if y not in inside:
                    vec[x] -= m
                    vec[y] += m

    def laplacian_apply(self, z: Mapping[Node, int]) -> dict[Node, int]:
        """L·z: the divisor change caused by firing each node z[node] times."""
        out = {}
        for x in self.nodes:
            s = self.node_degree[x] * z.get(x, 0)
            s -= sum(m * z.get(y, 0) for y, m in self.adj[x].items())
            out[x] = s
        return out


# ---------------------------------------------------------------------------
# Burning and reduction


def _burn(delta: DiscretizedGraph, vec: Mapping[Node, int], q: Node) -> set[Node]:
    """Unburnt node set for Dhar's algorithm: fire spreads from q, and a node
    ignites as soon as its chips are outnumbered by burnt incident edge-ends."""
    burnt = {q}
    frontier = [q]
    hot: dict[Node, int] = {}  # burnt edge-ends seen by each unburnt node
    while frontier:
        x = frontier.pop()
        for y, m in delta.adj[x].items():
            if y in burnt:
                continue
            hot[y] = hot.get(y, 0) + m
            if vec.get(y, 0) < hot[y]:
                burnt.add(y)
                frontier.append(y)
    return {x for x in delta.nodes if x not in burnt}


def dhar_burn(delta: DiscretizedGraph, D: Divisor, q: GraphPoint) -> frozenset[GraphPoint]:
    """Maximal unburnt point set when fire spreads from q through D.

    Requires D effective away from q.  An empty result certifies that no
    subset of nodes avoiding q can fire without going into debt.
    """
    qnode = delta.node_of(q)
    vec = delta.vector_of(D)
    if any(n < 0 for x, n in vec.items() if x != qnode):
        raise ValueError("dhar_burn requires the divisor to be effective away from q")
    return frozenset(delta.point_of(x) for x in _burn(delta, vec, qnode))


_FIRE_CAP = 1_000_000


def _q_reduce_vec(delta: DiscretizedGraph, vec0: Mapping[Node, int], q: Node) -> dict[Node, int]:
    """Chip vector of the q-reduced representative, with an exact equivalence
    certificate (the accumulated firing vector) asserted before returning."""
    vec = dict(vec0)
    z = {x: 0 for x in delta.nodes}

    # Stage 1: clear all debt away from q by repeatedly firing the solvent
    # part together with q.  Chips flow across the cut into indebted nodes.
    rounds = 0
    while True:
        debtors = {x for x in delta.nodes if x != q and vec[x] < 0}
        if not debtors:
            break
        S = [x for x in delta.nodes if x not in debtors]
        delta.fire_set(vec, S)
        for x in S:
            z[x] += 1
        rounds += 1
        if rounds > _FIRE_CAP:
            raise AssertionError("debt clearing failed to settle")

    # Stage 2: fire maximal unburnt sets until everything burns from q.
    while True:
        U = _burn(delta, vec, q)
        if not U:
            break
        delta.fire_set(vec, U)
        for x in U:
            z[x] += 1
        rounds += 1
        if rounds > _FIRE_CAP:
            raise AssertionError("unburnt firing failed to settle")

    base = z[q]
    moved = delta.laplacian_apply({x: k - base for x, k in z.items()})
    assert all(vec[x] == vec0.get(x, 0) - moved[x] for x in delta.nodes), (
        "firing certificate mismatch"
    )
    return vec


def q_reduced(delta: DiscretizedGraph, D: Divisor, q: GraphPoint) -> Divisor:
    """The unique divisor equivalent to D that is effective away from q and
    admits no unburnt set under Dhar's algorithm at q."""
    qnode = delta.node_of(q)
    vec = _q_reduce_vec(delta, delta.vector_of(D), qnode)
    return delta.divisor_of(vec)


# ---------------------------------------------------------------------------
# Rank


def _rank_on(delta: DiscretizedGraph, vec: dict[Node, int], q: Node) -> int:
    """Baker–Norine rank on the discretization, via q-reduced forms.

    r(D) >= 0 iff the q-reduced form is effective at q, and
    r(D) >= k+1 iff r(D - x) >= k for every subdivision node x; children are
    memoized on their reduced chip tuples.
    """
    order = delta.nodes
    memo: dict[tuple[int, ...], int] = {}

    def rec(key: tuple[int, ...]) -> int:
        """Rank of an already-reduced, effective-at-q chip tuple."""
        hit = memo.get(key)
        if hit is not None:
            return hit
        red = dict(zip(order, key))
        # Reduce every child first: symmetric chip placements collapse to the
        # same class, so recursing once per distinct reduced form is enough.
        # Subtracting at q first exposes rank 0 immediately when red[q] == 0.
        children: list[tuple[int, ...]] = []
        seen: set[tuple[int, ...]] = set()
        best: int | None = None
        for x in (q, *(x for x in order if x != q)):
            red[x] -= 1
            cred = _q_reduce_vec(delta, red, q)
            red[x] += 1
            if cred[q] < 0:
                best = -1
                break
            ckey = tuple(cred[x] for x in order)
            if ckey not in seen:
                seen.add(ckey)
                children.append(ckey)
        if best is None:
            for ckey in children:
                best = rec(ckey) if best is None else min(best, rec(ckey))
                if best == -1:
                    break
        assert best is not None
        memo[key] = 1 + best
        return 1 + best

    red0 = _q_reduce_vec(delta, vec, q)
    if red0[q] < 0:
        return -1
    return rec(tuple(red0[x] for x in order))


def rank(G: MetricGraph, D: Divisor, refine: int = 1) -> int:
    """Baker–Norine rank of D, computed on the unit-subdivision model.

    -1 means D is not equivalent to any effective divisor.  `refine`
    uniformly refines the subdivision (rank should not depend on it; the
    test-suite checks this empirically on random inputs).
    """
    delta = DiscretizedGraph(G, extra_points=D.support, refine=refine)
    q = delta.nodes[0]
    return _rank_on(delta, delta.vector_of(D), q)


# ---------------------------------------------------------------------------
# Gonality witnesses


@dataclass(frozen=True)
class GonalitySearch:
    """Outcome of a witness search at one subdivision resolution.

    A missing witness only means "none supported on this grid": the search
    does not rule out witnesses at finer resolutions.
    """

    degree: int
    witness: Divisor | None
    scale: int
    note: str

    @property
    def found(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "found": self.found,
            "witness": self.witness.to_json() if self.witness else None,
            "scale": self.scale,
            "note": self.note,
        }


def _has_rank_at_least_one(delta: DiscretizedGraph, vec: dict[Node, int], q: Node) -> bool:
    """r(D) >= 1 iff removing any single chip leaves an effective class."""
    for x in delta.nodes:
        vec[x] -= 1
        red = _q_reduce_vec(delta, vec, q)
        vec[x] += 1
        if red[q] < 0:
            return False
    return True


def is_divisorially_d_gonal(G: MetricGraph, d: int, refine: int = 1) -> GonalitySearch:
    """Search for a degree-d divisor of rank >= 1 supported on subdivision
    vertices; returns the first witness in a fixed deterministic order.
    """
    if d < 1:
        raise ValueError("gonality degree must be at least 1")
    delta = DiscretizedGraph(G, refine=refine)
    q = delta.nodes[0]
    for combo in combinations_with_replacement(range(len(delta.nodes)), d):
        vec = {x: 0 for x in delta.nodes}
        for i in combo:
            vec[delta.nodes[i]] += 1
        if _has_rank_at_least_one(delta, vec, q):
            witness = delta.divisor_of(vec)
            return GonalitySearch(d, witness, delta.scale, "witness found")
    return GonalitySearch(
        d,
        None,
        delta.scale,
        f"no degree-{d} divisor of positive rank supported on the 1/{delta.scale} grid",
    )


# ---------------------------------------------------------------------------
# Scrollar difference


def scrollar_delta(G: MetricGraph, D: Divisor) -> int:
    """m + 1, where m is the least k with rank(K - k*D) = -1 for the
    canonical divisor K.  Requires deg D = 3 and rank(D) >= 1; the value may
    depend on which rank-1 degree-3 divisor is chosen.
    """
    if D.degree() != 3:
        raise BadDivisor(f"expected a degree-3 divisor, got degree {D.degree()}")
    if rank(G, D) < 1:
        raise BadDivisor("expected a divisor of rank at least 1")
    K = canonical_divisor(G)
    # Terminates: deg(K - kD) = 2g - 2 - 3k is eventually negative, and
    # negative degree forces rank -1.
    k = 0
    while rank(G, K - k * D) >= 0:
        k += 1
    return k + 1
