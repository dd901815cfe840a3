"""Metric graphs (abstract tropical curves) and the genus-3/4 type catalog.

A metric graph here is a connected multigraph with positive rational edge
lengths, non-negative integer vertex genera, and optional legs (unbounded
ends).  The genus is the first Betti number plus the sum of vertex genera.

The catalog lists every connected trivalent multigraph of genus 3 (5 types)
and genus 4 (17 types), with named vertex/edge roles so that length
conditions elsewhere can refer to specific edges.  Type names follow the
(loops, doubles, bridges) signature, e.g. (212) has 2 loops, 1 double edge
and 2 bridges; the two genus-4 types with signature (000) are the triangular
prism (000)A and K_{3,3} (000)B.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

from .errors import (
    Disconnected,
    GenusZero,
    NotCanonical,
    UnsupportedGenus,
    UnknownType,
)
from .rationals import frac, frac_str

VertexId = str | int


class MetricGraph:
    """Connected multigraph with positive edge lengths and vertex genera.

    Edges are identified by their index in the edge list; legs likewise.
    Instances are treated as immutable: all "mutators" return new graphs.
    """

    def __init__(
        self,
        vertices: Iterable[VertexId | tuple[VertexId, int]],
        edges: Sequence[tuple[VertexId, VertexId, Fraction | int | str]],
        legs: Sequence[VertexId] = (),
    ):
        genus_of: dict[VertexId, int] = {}
        order: list[VertexId] = []
        for item in vertices:
            if isinstance(item, tuple):
                vid, g = item
            else:
                vid, g = item, 0
            if vid in genus_of:
                raise ValueError(f"duplicate vertex id {vid!r}")
            if g < 0:
                raise ValueError("vertex genus must be non-negative")
            genus_of[vid] = int(g)
            order.append(vid)
        self.vertex_ids: tuple[VertexId, ...] = tuple(order)
        self.genus_of: dict[VertexId, int] = genus_of

        parsed: list[tuple[VertexId, VertexId, Fraction]] = []
        for u, v, raw in edges:
            if u not in genus_of or v not in genus_of:
                raise ValueError(f"edge ({u!r},{v!r}) references unknown vertex")
            length = frac(raw)
            if length <= 0:
                raise ValueError(f"edge ({u!r},{v!r}) must have positive length, got {length}")
            parsed.append((u, v, length))
        self.edges: tuple[tuple[VertexId, VertexId, Fraction], ...] = tuple(parsed)

        for v in legs:
            if v not in genus_of:
                raise ValueError(f"leg references unknown vertex {v!r}")
        self.legs: tuple[VertexId, ...] = tuple(legs)

        if not self._connected():
            raise Disconnected("metric graph must be connected")

    # -- basic structure ----------------------------------------------------

    def _connected(self) -> bool:
        if not self.vertex_ids:
            return False
        seen = {self.vertex_ids[0]}
        frontier = [self.vertex_ids[0]]
        adj: dict[VertexId, set[VertexId]] = {v: set() for v in self.vertex_ids}
        for u, v, _ in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        while frontier:
            x = frontier.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return len(seen) == len(self.vertex_ids)

    def valence(self, v: VertexId) -> int:
        """Edge-end count at v: loops twice, legs once."""
        out = sum(1 for vid in self.legs if vid == v)
        for u, w, _ in self.edges:
            out += (u == v) + (w == v)
        return out

    def incident_edges(self, v: VertexId) -> list[int]:
        return [i for i, (u, w, _) in enumerate(self.edges) if v in (u, w)]

    def is_loop(self, eid: int) -> bool:
        u, v, _ = self.edges[eid]
        return u == v

    def edge_length(self, eid: int) -> Fraction:
        return self.edges[eid][2]

    def total_length(self) -> Fraction:
        return sum((l for _, _, l in self.edges), Fraction(0))

    def genus(self) -> int:
        b1 = len(self.edges) - len(self.vertex_ids) + 1
        return b1 + sum(self.genus_of.values())

    # -- transformations ----------------------------------------------------

    def subdivide_edge(self, eid: int, positions: Sequence[Fraction]) -> tuple["MetricGraph", list[VertexId]]:
        """Split edge eid at the given distances from its first endpoint.

        Returns the new graph and the list of fresh vertex ids, in order of
        increasing distance.
        """
        u, v, length = self.edges[eid]
        pos = sorted(frac(p) for p in positions)
        if any(p <= 0 or p >= length for p in pos) or len(set(pos)) != len(pos):
            raise ValueError("subdivision positions must be distinct and interior to the edge")
        fresh = [f"_s{eid}_{k}" for k in range(len(pos))]
        verts = [(vid, self.genus_of[vid]) for vid in self.vertex_ids] + [(f, 0) for f in fresh]
        edges = [e for i, e in enumerate(self.edges) if i != eid]
        chain = [u] + fresh + [v]
        cuts = [Fraction(0)] + pos + [length]
        for a, b, l0, l1 in zip(chain, chain[1:], cuts, cuts[1:]):
            edges.append((a, b, l1 - l0))
        return MetricGraph(verts, edges, self.legs), fresh

    def without_legs(self) -> "MetricGraph":
        if not self.legs:
            return self
        return MetricGraph([(v, self.genus_of[v]) for v in self.vertex_ids], self.edges)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v, "genus": self.genus_of[v]} for v in self.vertex_ids],
            "edges": [{"u": u, "v": v, "len": frac_str(l)} for u, v, l in self.edges],
            "legs": [{"v": v} for v in self.legs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MetricGraph":
        verts = [(rec["id"], int(rec.get("genus", 0))) for rec in data["vertices"]]
        edges = [(rec["u"], rec["v"], frac(rec["len"])) for rec in data["edges"]]
        legs = [rec["v"] for rec in data.get("legs", [])]
        return cls(verts, edges, legs)

    def __repr__(self) -> str:
        return f"MetricGraph({len(self.vertex_ids)} vertices, {len(self.edges)} edges, genus {self.genus()})"


def genus(G: MetricGraph) -> int:
    return G.genus()


# ---------------------------------------------------------------------------
# canonical model


def is_canonical(G: MetricGraph) -> bool:
    """No legs and no genus-0 vertices of valence <= 2.

    Exception: a 2-valent genus-0 vertex whose both edge ends belong to one
    loop is allowed — a bare cycle cannot be smoothed further.
    """
    if G.legs:
        return False
    for v in G.vertex_ids:
        if G.genus_of[v] > 0:
            continue
        val = G.valence(v)
        if val < 2:
            return False
        if val == 2:
            inc = G.incident_edges(v)
            if not (len(inc) == 1 and G.is_loop(inc[0])):
                return False
    return True


def canonical_model(G: MetricGraph) -> MetricGraph:
    """Remove legs, prune genus-0 leaves, smooth genus-0 2-valent vertices."""
    if G.genus() == 0:
        raise GenusZero("genus-0 graphs have an empty canonical model")
    genus_of = dict(G.genus_of)
    edges: dict[int, tuple[VertexId, VertexId, Fraction]] = dict(enumerate(G.edges))
    next_id = len(G.edges)

    def valence(v: VertexId) -> int:
        return sum((u == v) + (w == v) for u, w, _ in edges.values())

    changed = True
    while changed:
        changed = False
        for v in list(genus_of):
            if genus_of[v] > 0:
                continue
            inc = [i for i, (u, w, _) in edges.items() if v in (u, w)]
            val = valence(v)
            if val == 0 and len(genus_of) > 1:
                del genus_of[v]
                changed = True
            elif val == 1:
                del edges[inc[0]]
                del genus_of[v]
                changed = True
            elif val == 2 and len(inc) == 2:
                (u1, w1, l1), (u2, w2, l2) = edges[inc[0]], edges[inc[1]]
                a = u1 if w1 == v else w1
                b = u2 if w2 == v else w2
                del edges[inc[0]]
                del edges[inc[1]]
                del genus_of[v]
                edges[next_id] = (a, b, l1 + l2)
                next_id += 1
                changed = True
            if changed:
                break
    if not genus_of:
        raise GenusZero("canonical model is empty")
    out = MetricGraph(list(genus_of.items()), [edges[i] for i in sorted(edges)])
    assert out.genus() == G.genus()
    return out


# ---------------------------------------------------------------------------
# structural statistics used for type identification


def parallel_classes(G: MetricGraph) -> dict[tuple[VertexId, VertexId], list[int]]:
    """Non-loop edges grouped by unordered endpoint pair."""
    out: dict[tuple[VertexId, VertexId], list[int]] = {}
    for i, (u, v, _) in enumerate(G.edges):
        if u != v:
            key = (u, v) if str(u) <= str(v) else (v, u)
            out.setdefault(key, []).append(i)
    return out

def loop_edges(G: MetricGraph) -> dict[VertexId, list[int]]:
    out: dict[VertexId, list[int]] = {}
    for i, (u, v, _) in enumerate(G.edges):
        if u == v:
            out.setdefault(u, []).append(i)
    return out


def bridges(G: MetricGraph) -> list[int]:
    """Edges whose removal disconnects the graph (loops and parallels never qualify)."""
    out = []
    par = parallel_classes(G)
    for i, (u, v, _) in enumerate(G.edges):
        if u == v:
            continue
        key = (u, v) if str(u) <= str(v) else (v, u)
        if len(par[key]) > 1:
            continue
        seen = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for j, (a, b, _) in enumerate(G.edges):
                if j == i or x not in (a, b):
                    continue
                y = b if a == x else a
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if v not in seen:
            out.append(i)
    return out


def signature(G: MetricGraph) -> tuple[int, int, int]:
    """(loop count, double-edge-pair count, bridge count)."""
    loops = sum(len(v) for v in loop_edges(G).values())
    doubles = sum(1 for eids in parallel_classes(G).values() if len(eids) == 2)
    return (loops, doubles, len(bridges(G)))


def has_triangle(G: MetricGraph) -> bool:
    adj: dict[VertexId, set[VertexId]] = {v: set() for v in G.vertex_ids}
    for u, v, _ in G.edges:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    for a in G.vertex_ids:
        for b in adj[a]:
            for c in adj[b]:
                if c != a and c in adj[a]:
                    return True
    return False


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class CombinatorialType:
    """A catalog multigraph with named vertex and edge roles.

    Edge-role keys: singles use the sorted endpoint pair ("xy"), the two
    members of a double edge get "#1"/"#2" suffixes, loops use "loop_v".
    """

    name: str
    genus: int
    vertices: tuple[str, ...]
    edges: dict[str, tuple[str, str]] = field(hash=False)
    realizable: bool = True
    note: str = ""

    def signature(self) -> tuple[int, int, int]:
        return signature(self.as_metric_graph())

    def as_metric_graph(self, lengths: dict[str, Fraction] | None = None) -> MetricGraph:
        """Metric realization; unit lengths unless given per edge key."""
        ls = lengths or {}
        return MetricGraph(
            list(self.vertices),
            [(u, v, ls.get(k, Fraction(1))) for k, (u, v) in sorted(self.edges.items())],
        )

    def edge_key_order(self) -> list[str]:
        return sorted(self.edges)

    def key_of_pair(self) -> dict[tuple[str, str], list[str]]:
        """Non-loop edge keys grouped by endpoint pair (loops handled apart)."""
        out: dict[tuple[str, str], list[str]] = {}
        for k, (u, v) in sorted(self.edges.items()):
            if u == v:
                continue
            pair = (u, v) if u <= v else (v, u)
            out.setdefault(pair, []).append(k)
        return out


def _pair_key(u: str, v: str) -> str:
    return "".join(sorted((u, v)))


def _edges(singles: list[str], doubles: list[str] = [], loops: list[str] = []) -> dict[str, tuple[str, str]]:
    out: dict[str, tuple[str, str]] = {}
    for s in singles:
        u, v = s[0], s[1]
        out[_pair_key(u, v)] = tuple(sorted((u, v)))
    for d in doubles:
        u, v = sorted((d[0], d[1]))
        out[f"{u}{v}#1"] = (u, v)
        out[f"{u}{v}#2"] = (u, v)
    for v in loops:
        out[f"loop_{v}"] = (v, v)
    return out


def _genus3_catalog() -> list[CombinatorialType]:
    k4 = CombinatorialType(
        name="(000)",
        genus=3,
        vertices=("1", "2", "3", "4"),
        # letter roles as used by the F1 length conditions: vertex 4 is the
        # center, x/y/z are its spokes, u/v/w the outer triangle
        edges={
            "v": ("1", "2"),
            "u": ("1", "3"),
            "w": ("2", "3"),
            "x": ("1", "4"),
            "y": ("3", "4"),
            "z": ("2", "4"),
        },
    )
    t020 = CombinatorialType(
        name="(020)",
        genus=3,
        vertices=("1", "3", "4", "5"),
        edges=_edges(["13", "45"], doubles=["14", "35"]),
    )
    t111 = CombinatorialType(
        name="(111)",
        genus=3,
        vertices=("1", "2", "4", "6"),
        edges=_edges(["12", "24", "26"], doubles=["14"], loops=["6"]),
    )
    t212 = CombinatorialType(
        name="(212)",
        genus=3,
        vertices=("2", "4", "5", "6"),
        edges=_edges(["24", "56"], doubles=["45"], loops=["2", "6"]),
    )
    t303 = CombinatorialType(
        name="(303)",
        genus=3,
        vertices=("1", "2", "3", "4"),
        edges=_edges(["12", "13", "14"], loops=["2", "3", "4"]),
        realizable=False,
        note="three loops on bridges at a common vertex; sprawling node",
    )
    return [k4, t020, t111, t212, t303]


def _genus4_catalog() -> list[CombinatorialType]:
    recon = "layout reconstructed from its signature, which determines the graph uniquely"
    types = [
        CombinatorialType(
            name="(000)A",
            genus=4,
            vertices=("x", "y", "z", "u", "v", "w"),
            # triangular prism: triangles x-u-z and w-y-v, rungs xy, zw, uv
            edges=_edges(["xu", "xz", "uz", "wy", "wv", "yv", "xy", "zw", "uv"]),
        ),
        CombinatorialType(
            name="(000)B",
            genus=4,
            vertices=("1", "2", "3", "4", "5", "6"),
            # K_{3,3} with parts {1,3,5} and {2,4,6}
            edges=_edges(["12", "14", "16", "32", "34", "36", "52", "54", "56"]),
            realizable=False,
            note="K_{3,3}; no plane-curve realization on the trigonal polygons",
        ),
        CombinatorialType(
            name="(010)",
            genus=4,
            vertices=("x", "y", "z", "u", "v", "w"),
            edges=_edges(["xu", "yv", "uz", "vz", "wz", "vw", "uw"], doubles=["xy"]),
        ),
        CombinatorialType(
            name="(020)",
            genus=4,
            vertices=("x", "y", "z", "u", "v", "w"),
            edges=_edges(["xz", "zy", "zw", "uw", "wv"], doubles=["xu", "yv"]),
        ),
        CombinatorialType(
            name="(021)",
            genus=4,
            vertices=("x", "y", "z", "u", "v", "w"),
            edges=_edges(["xw", "wz", "zy", "uw", "zv"], doubles=["xu", "yv"]),
        ),
        CombinatorialType(
            name="(030)",
            genus=4,
            vertices=("x", "y", "z", "u", "v", "w"),
            # necklace: doubles xy, zu, vw closed up by yz, uv, wx
            edges=_edges(["yz", "uv", "wx"], doubles=["xy", "zu", "vw"]),
        ),
        CombinatorialType(
            name="(101)",
            genus=4,
            vertices=("x", "y", "z", "u", "v", "w"),
            edges=_edges(["xy", "xz", "xu", "uz", "zy", "uv", "yv", "vw"], loops=["w"]),
        ),
        CombinatorialType(
            name="(111)",
            genus=4,
            vertices=("x", "y", "z", "u", "v", "w"),
            edges=_edges(["xy", "zu", "uy", "uv", "yv", "vw"], doubles=["xz"], loops=["w"]),
        ),
        CombinatorialType(
            name="(121)",
            genus=4,
            vertices=("x", "y", "z", "u", "v", "w"),
            edges=_edges(["uv", "yv", "vw", "xz"], doubles=["zu", "xy"], loops=["w"]),
        ),
        CombinatorialType(
            name="(122)",
            genus=4,
            vertices=("x", "y", "z", "u", "v", "w"),
            edges=_edges(["zy", "xy", "yu", "vw"], doubles=["xz", "uv"], loops=["w"]),
        ),
        CombinatorialType(
            name="(202)",
            genus=4,
            vertices=("x", "y", "z", "u", "v", "w"),
            # K4 on x,y,z,u minus the edge xz, plus bridged loops at x and z
            edges=_edges(["uy", "xy", "xu", "zu", "zy", "xv", "zw"], loops=["v", "w"]),
        ),
        CombinatorialType(
            name="(212)",
            genus=4,
            vertices=("x", "y", "z", "u", "v", "w"),
            edges=_edges(["uy", "xz", "zu", "zv", "uw"], doubles=["xy"], loops=["v", "w"]),
        ),
        CombinatorialType(
            name="(213)",
            genus=4,
            vertices=("x", "y", "z", "w", "a", "b"),
            edges=_edges(["ax", "bx", "xy", "yz", "yw"], doubles=["zw"], loops=["a", "b"]),
            realizable=False,
            note=recon + "; sprawling node at x",
        ),
        CombinatorialType(
            name="(223)",
            genus=4,
            vertices=("a", "b", "c", "d", "e", "f"),
            edges=_edges(["ac", "de", "fb"], doubles=["cd", "ef"], loops=["a", "b"]),
            realizable=False,
            note="chain loop-double-double-loop; completes the trivalent genus-4 census",
        ),
        CombinatorialType(
            name="(303)",
            genus=4,
            vertices=("x", "y", "z", "a", "b", "c"),
            edges=_edges(["xy", "xz", "yz", "ax", "by", "cz"], loops=["a", "b", "c"]),
            realizable=False,
            note="triangle with a bridged loop at each corner",
        ),
        CombinatorialType(
            name="(314)",
            genus=4,
            vertices=("x", "y", "z", "a", "b", "c"),
            edges=_edges(["ax", "bx", "xz", "cy"], doubles=["yz"], loops=["a", "b", "c"]),
            realizable=False,
            note=recon + "; sprawling node at x",
        ),
        CombinatorialType(
            name="(405)",
            genus=4,
            vertices=("x", "y", "a", "b", "c", "d"),
            edges=_edges(["ax", "bx", "xy", "cy", "dy"], loops=["a", "b", "c", "d"]),
            realizable=False,
            note=recon + "; sprawling nodes at x and y",
        ),
    ]
    return types


_CATALOG: dict[int, list[CombinatorialType]] = {3: _genus3_catalog(), 4: _genus4_catalog()}


def catalog(genus_value: int) -> list[CombinatorialType]:
    if genus_value not in _CATALOG:
        raise UnsupportedGenus(f"catalog covers genus 3 and 4, not {genus_value}")
    return list(_CATALOG[genus_value])


def get_type(genus_value: int, name: str) -> CombinatorialType:
    for t in catalog(genus_value):
        if t.name == name:
            return t
    raise UnknownType(f"no genus-{genus_value} type named {name}")


# ---------------------------------------------------------------------------
# identification


@dataclass
class RoleAssignment:
    """One isomorphism from a catalog type onto a concrete graph."""

    vertex_map: dict[str, VertexId]  # catalog vertex role -> graph vertex id
    edge_map: dict[str, int]  # catalog edge key -> graph edge index

    def lengths(self, G: MetricGraph) -> dict[str, Fraction]:
        return {k: G.edge_length(e) for k, e in self.edge_map.items()}


def _iso_onto(T: CombinatorialType, G: MetricGraph) -> RoleAssignment | None:
    """Find one isomorphism T -> G by exhaustive search with degree pruning."""
    gv = list(G.vertex_ids)
    if len(gv) != len(T.vertices) or len(G.edges) != len(T.edges):
        return None
    H = T.as_metric_graph()
    g_loops = loop_edges(G)
    h_loops = loop_edges(H)
    g_par = parallel_classes(G)
    h_par = parallel_classes(H)

    def profile_g(v: VertexId) -> tuple[int, int]:
        return (G.valence(v), len(g_loops.get(v, [])))

    def profile_h(v: str) -> tuple[int, int]:
        return (H.valence(v), len(h_loops.get(v, [])))

    hv = list(T.vertices)
    for perm in permutations(gv):
        if any(profile_h(a) != profile_g(b) for a, b in zip(hv, perm)):
            continue
        vmap = dict(zip(hv, perm))
        ok = True
        for (a, b), keys in T.key_of_pair().items():
            img = (vmap[a], vmap[b])
            img = img if str(img[0]) <= str(img[1]) else (img[1], img[0])
            if len(g_par.get(img, [])) != len(keys):
                ok = False
                break
        if not ok:
            continue
        if sum(len(v) for v in h_par.values()) != sum(len(v) for v in g_par.values()):
            continue
        edge_map: dict[str, int] = {}
        for (a, b), keys in T.key_of_pair().items():
            img = (vmap[a], vmap[b])
            img = img if str(img[0]) <= str(img[1]) else (img[1], img[0])
            for k, eid in zip(keys, sorted(g_par[img])):
                edge_map[k] = eid
        for v in h_loops:
            vkeys = sorted(k for k in T.edges if T.edges[k] == (v, v))
            for k, eid in zip(vkeys, sorted(g_loops.get(vmap[v], []))):
                edge_map[k] = eid
        if len(edge_map) == len(T.edges):
            return RoleAssignment(vmap, edge_map)
    return None


def identify_type(G: MetricGraph) -> tuple[CombinatorialType, RoleAssignment] | None:
    """Match a canonical genus-3/4 graph against the catalog.

    Returns the unique matching type with one role assignment, or None when
    the graph is trivalent-incompatible (e.g. positive vertex genus or a
    4-valent vertex) and therefore matches no catalog entry.
    """
    if not is_canonical(G):
        raise NotCanonical("identify_type needs a canonical model")
    g = G.genus()
    if g not in (3, 4):
        raise UnsupportedGenus(f"catalog covers genus 3 and 4, not genus {g}")
    if any(G.genus_of[v] != 0 for v in G.vertex_ids):
        return None
    if any(G.valence(v) != 3 for v in G.vertex_ids):
        return None
    sig = signature(G)
    for T in catalog(g):
        if T.signature() != sig:
            continue
        got = _iso_onto(T, G)
        if got is not None:
            return T, got
    return None


@dataclass
class RolePermutation:
    vertices: dict[str, str]
    edges: dict[str, str]


def symmetry_group(T: CombinatorialType) -> list[RolePermutation]:
    """All automorphisms of the catalog multigraph as role permutations.

    Parallel-edge slots are permuted in every possible way, so a double edge
    contributes a factor of 2 beyond the vertex automorphisms.
    """
    H = T.as_metric_graph()
    h_loops = loop_edges(H)
    pairs = T.key_of_pair()
    out: list[RolePermutation] = []
    for perm in permutations(T.vertices):
        vmap = dict(zip(T.vertices, perm))
        ok = True
        imaged: dict[tuple[str, str], list[str]] = {}
        for (a, b), keys in pairs.items():
            img = tuple(sorted((vmap[a], vmap[b])))
            if len(pairs.get(img, [])) != len(keys):
                ok = False
                break
            imaged[(a, b)] = pairs[img]
        if not ok:
            continue
        for v, loops in h_loops.items():
            if len(h_loops.get(vmap[v], [])) != len(loops):
                ok = False
                break
        if not ok:
            continue
        # expand slot choices for parallel classes of size 2
        slot_choices: list[list[dict[str, str]]] = []
        base: dict[str, str] = {}
        for (a, b), keys in pairs.items():
            tgt = imaged[(a, b)]
            if len(keys) == 1:
                base[keys[0]] = tgt[0]
            else:
                slot_choices.append(
                    [
                        {keys[0]: tgt[0], keys[1]: tgt[1]},
                        {keys[0]: tgt[1], keys[1]: tgt[0]},
                    ]
                )
        for v in h_loops:
            for k_src, k_tgt in zip(
                sorted(k for k in T.edges if T.edges[k] == (v, v)),
                sorted(k for k in T.edges if T.edges[k] == (vmap[v], vmap[v])),
            ):
                base[k_src] = k_tgt
        stack = [base]
        for choices in slot_choices:
            stack = [dict(m, **c) for m in stack for c in choices]
        for emap in stack:
            out.append(RolePermutation(dict(vmap), emap))
    return out


# ---------------------------------------------------------------------------
# isometry (used heavily in tests)


def is_isometric(G1: MetricGraph, G2: MetricGraph) -> bool:
    """Exhaustive length-preserving isomorphism test for small graphs."""
    if len(G1.vertex_ids) != len(G2.vertex_ids) or len(G1.edges) != len(G2.edges):
        return False
    if sorted(G1.genus_of.values()) != sorted(G2.genus_of.values()):
        return False
    if sorted(l for _, _, l in G1.edges) != sorted(l for _, _, l in G2.edges):
        return False

    def edge_multiset(G: MetricGraph, vmap: dict) -> bool:
        want: dict[tuple, list[Fraction]] = {}
        for u, v, l in G1.edges:
            a, b = vmap[u], vmap[v]
            key = (a, b) if str(a) <= str(b) else (b, a)
            want.setdefault(key, []).append(l)
        have: dict[tuple, list[Fraction]] = {}
        for u, v, l in G2.edges:
            key = (u, v) if str(u) <= str(v) else (v, u)
            have.setdefault(key, []).append(l)
        if set(want) != set(have):
            return False
        return all(sorted(want[k]) == sorted(have[k]) for k in want)

    v2 = list(G2.vertex_ids)
    for perm in permutations(v2):
        vmap = dict(zip(G1.vertex_ids, perm))
        if any(G1.genus_of[a] != G2.genus_of[b] for a, b in vmap.items()):
            continue
        if any(G1.valence(a) != G2.valence(b) for a, b in vmap.items()):
            continue
        if edge_multiset(G1, vmap):
            return True
    return False
