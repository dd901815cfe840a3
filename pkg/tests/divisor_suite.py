"""Shared generators and an independent brute-force rank oracle.

Used by both the unit tests and the acceptance gate.  The oracle never
fires a chip: linear equivalence is decided through exact residues of the
inverse reduced Laplacian, and rank by exhausting effective divisors on the
subdivision grid.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations_with_replacement

from tropigon.divisors import DiscretizedGraph, Divisor, EdgePoint
from tropigon.graphs import MetricGraph
from tropigon.linalg import invert


def random_rr_graph(rng: random.Random) -> MetricGraph:
    """Connected multigraph, genus 1..4, integer lengths 1..3, no vertex genus."""
    V = rng.randint(2, 5)
    edges = []
    for v in range(1, V):
        u = rng.randrange(v)
        edges.append((u, v, rng.choice([1, 1, 2, 3])))
    for _ in range(rng.randint(1, 4)):
        u = rng.randrange(V)
        v = rng.randrange(V)
        # loops of length 1 would double the whole grid; keep them longer
        edges.append((u, v, rng.choice([1, 2, 3]) if u != v else rng.choice([2, 3])))
    return MetricGraph(list(range(V)), edges)


def integer_grid_points(G: MetricGraph) -> list:
    """Vertices plus the integer-offset interior points of every edge."""
    pts: list = list(G.vertex_ids)
    for eid in range(len(G.edges)):
        L = G.edge_length(eid)
        pts.extend(EdgePoint(eid, Fraction(k)) for k in range(1, int(L)))
    return pts


def random_divisor(G: MetricGraph, rng: random.Random, max_abs_degree: int) -> Divisor:
    pts = integer_grid_points(G)
    while True:
        chips = {}
        for p in rng.sample(pts, rng.randint(1, min(4, len(pts)))):
            chips[p] = rng.randint(-2, 3)
        D = Divisor(chips)
        if abs(D.degree()) <= max_abs_degree:
            return D


def fingerprint_fn(delta: DiscretizedGraph):
    """Exact linear-equivalence invariant for chip vectors on `delta`.

    Two divisors are equivalent iff they have equal degree and their
    off-q parts differ by an integer combination of reduced-Laplacian
    columns, i.e. iff L̃⁻¹·(difference) is integral.  The fingerprint is
    therefore (degree, fractional part of L̃⁻¹·off-q chips).
    """
    nodes = delta.nodes
    others = nodes[1:]
    Ltil = [
        [
            Fraction(delta.node_degree[x]) if x == y else Fraction(-delta.adj[x].get(y, 0))
            for y in others
        ]
        for x in others
    ]
    inv = invert(Ltil)

    def fingerprint(vec) -> tuple:
        col = [Fraction(vec.get(x, 0)) for x in others]
        resid = tuple(sum((row[j] * col[j] for j in range(len(col))), Fraction(0)) % 1 for row in inv)
        return (sum(vec.values()), resid)

    return fingerprint


def brute_rank(delta: DiscretizedGraph, vec: dict) -> int:
    """Rank by exhausting effective divisors on the subdivision grid.

    r >= k iff for every effective E of degree k the class of D - E
    contains an effective divisor; both quantifiers run over explicit
    enumerations, with membership decided by fingerprints alone.
    """
    nodes = delta.nodes
    fingerprint = fingerprint_fn(delta)
    deg = sum(vec.values())
    if deg < 0:
        return -1

    effective_classes: dict[int, set] = {}

    def eff_set(m: int) -> set:
        if m not in effective_classes:
            out = set()
            for combo in combinations_with_replacement(range(len(nodes)), m):
                ev: dict = {}
                for i in combo:
                    ev[nodes[i]] = ev.get(nodes[i], 0) + 1
                out.add(fingerprint(ev))
            effective_classes[m] = out
        return effective_classes[m]

    k = 0
    while True:
        if deg - k < 0:
            return k - 1
        targets = eff_set(deg - k)
        for combo in combinations_with_replacement(range(len(nodes)), k):
            diff = dict(vec)
            for i in combo:
                diff[nodes[i]] = diff.get(nodes[i], 0) - 1
            if fingerprint(diff) not in targets:
                return k - 1
        k += 1
