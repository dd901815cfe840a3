"""Edge-length realizability of genus-3/4 curves on Hirzebruch surfaces.

Two complementary deciders answer "does this abstract tropical curve occur
as the skeleton of a smooth tropical plane curve of trigonal degree on the
surface with parameter n?":

* ``check_conditions`` evaluates closed-form linear length conditions for
  the curve's combinatorial type, quantified over the type's symmetry
  group.  The genus-3 (000) set is exact (satisfied if and only if
  realizable); every genus-4 set is necessary only, so a refutation is
  conclusive while a pass means "not excluded".
* ``realizability_by_search`` sweeps the regular unimodular triangulations
  of the matching polygon and solves, per triangulation and per skeleton
  isomorphism, an exact rational feasibility problem in the height
  variables.  It returns a witness (triangulation, heights) or exhausts.

``tropical_maroni`` combines the two: the invariant is the parameter n of
the unique surface whose conditions/certificates accept the curve.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .curves import SkeletonForms, skeleton_length_forms
from .errors import (
    BadMaroniParameter,
    MaroniRange,
    ParityMismatch,
    UnknownType,
)
from .graphs import (
    CombinatorialType,
    MetricGraph,
    RoleAssignment,
    RolePermutation,
    get_type,
    identify_type,
    symmetry_group,
)
from .lattice import (
    HeightFunction,
    LatticePolygon,
    Point,
    Triangulation,
    all_flips,
    bend_forms,
    enumerate_unimodular_triangulations,
    evaluate_form,
    hirzebruch_polygon,
    induces,
    regularity_certificate,
)
from .simplex import solve_lp, strict_feasible

__all__ = [
    "Relation",
    "ConditionSet",
    "ConditionVerdict",
    "condition_set",
    "check_conditions",
    "tropical_maroni",
    "realizability_by_search",
    "SweepEntry",
    "hirzebruch_sweep",
]


# ---------------------------------------------------------------------------
# linear relations over role-labeled edge lengths


_TERM = re.compile(r"(\d*)\s*([a-z][a-z0-9_#]*)")


@dataclass(frozen=True)
class Relation:
    """One linear relation  sum(coeff * length(role))  OP  0.

    ``op`` is "<" (strict), "<=" or "==".  Relations are written in the
    tables below as readable strings like ``"wz + vw < uv"`` and parsed
    against a specific catalog type, which also validates the role keys.
    """

    coefficients: tuple[tuple[str, int], ...]
    op: str

    @classmethod
    def parse(cls, text: str, ctype: CombinatorialType) -> "Relation":
        for op in ("<=", "==", "<"):
            if op in text:
                lhs, rhs = text.split(op)
                break
        else:
            raise ValueError(f"no comparison operator in {text!r}")
        coeffs: dict[str, int] = {}
        for side, sign in ((lhs, 1), (rhs, -1)):
            for part in side.split("+"):
                m = _TERM.fullmatch(part.strip())
                if m is None:
                    raise ValueError(f"bad term {part!r} in {text!r}")
                key = _resolve_key(m.group(2), ctype)
                coeffs[key] = coeffs.get(key, 0) + sign * int(m.group(1) or 1)
        items = tuple(sorted((k, c) for k, c in coeffs.items() if c != 0))
        return cls(items, op)

    def value(self, lengths: Mapping[str, Fraction]) -> Fraction:
        return sum((c * lengths[k] for k, c in self.coefficients), Fraction(0))

    def holds(self, lengths: Mapping[str, Fraction]) -> bool:
        v = self.value(lengths)
        if self.op == "<":
            return v < 0
        if self.op == "<=":
            return v <= 0
        return v == 0

    def __str__(self) -> str:
        def render(terms: list[tuple[str, int]]) -> str:
            if not terms:
                return "0"
            return " + ".join(k if c == 1 else f"{c}{k}" for k, c in terms)

        pos = [(k, c) for k, c in self.coefficients if c > 0]
        neg = [(k, -c) for k, c in self.coefficients if c < 0]
        return f"{render(pos)} {self.op} {render(neg)}"


def _resolve_key(term: str, ctype: CombinatorialType) -> str:
    """Map a relation term onto a catalog edge key.

    Bare two-letter endpoint names are accepted in either order; parallel
    strands must name their slot ("xy#1") and loops their key ("loop_w").
    """
    if term in ctype.edges:
        return term
    base, _, slot = term.partition("#")
    if len(base) == 2:
        normalized = "".join(sorted(base)) + (f"#{slot}" if slot else "")
        if normalized in ctype.edges:
            return normalized
    raise ValueError(f"{term!r} is not an edge role of type {ctype.name}")


# ---------------------------------------------------------------------------
# the condition tables


@dataclass(frozen=True)
class ConditionSet:
    """Realizability conditions for one (combinatorial type, surface) pair.

    ``systems`` is a disjunction of conjunctions: the set is satisfied by
    a length assignment when every relation of some one system holds.  An
    empty disjunction is never satisfied (types with no realization on
    either surface); a single empty conjunction is trivially satisfied
    (types whose realizability carries no known length constraint — their
    decision falls to the certificate search).  ``sufficient`` records
    whether satisfaction is known to imply realizability.
    """

    type_name: str
    genus: int
    surface_n: int
    systems: tuple[tuple[Relation, ...], ...]
    sufficient: bool

    def to_json(self) -> dict:
        return {
            "type": self.type_name,
            "genus": self.genus,
            "surface": self.surface_n,
            "sufficient": self.sufficient,
            "systems": [[str(r) for r in sys] for sys in self.systems],
        }


# genus 3 on the n=1 surface: the (000) conditions are exact; the other
# three realizable types carry no closed-form length test here and the
# sprawling (303) admits no realization at all.
_GENUS3_000 = ("x <= u", "y <= u", "x <= v", "z <= v", "y + z <= w")

# genus 4: necessary conditions per type, keyed by surface parameter n.
# Each value is a list of alternative systems (most types have one).
_GENUS4: dict[str, dict[int, list[tuple[str, ...]]]] = {
    "(000)A": {
        0: [("wz + vw < uv", "wz + uz < uv", "wz + wy < xy", "wz + xz < xy")],
        2: [("wz == uv", "wz + wy < xy", "wz + xz < xy")],
    },
    "(010)": {
        0: [("uz + vz + vy < ux", "vz + 2vy + xy#1 < ux")],
        2: [("vz + vy == ux",)],
    },
    "(020)": {
        0: [("2xz + wz < uw", "2vw + wz < yz")],
        2: [("xz + wz < uw", "vw == yz"), ("2xz + wz < uw", "yz == vw + wz")],
    },
    "(021)": {
        0: [("ux#1 + 2wx < uw", "vy#1 + 2yz < vz")],
        2: [("yz == vz",)],
    },
    "(030)": {
        0: [("2yz + uz#1 + uv < xw", "yz + uz#1 + 2uv < xw")],
        2: [("yz + uz#1 + uv == xw",)],
    },
    "(101)": {
        0: [("2uv + uz == vy",)],
        2: [("uv + uz == vy",)],
    },
    "(111)": {
        0: [("uy + 2uv == vy",)],
        2: [("uy + uv == vy",)],
    },
    "(121)": {
        0: [("xz + zu#1 + 2uv == vy",)],
        2: [("xz + zu#1 + uv == vy",)],
    },
    "(122)": {
        0: [("uv#1 == 2uv#2",)],
        2: [("uv#1 == uv#2",), ("xy == yz",)],
    },
    "(202)": {
        0: [("yz == 2uz + uy", "ux == 2xy + uy")],
        2: [("uz == yz",)],
    },
    "(212)": {
        0: [("xy#1 + 3uy == uz", "uy == xz")],
        2: [("xy#1 + 2uy == uz", "uy == xz")],
    },
}

_CONDITION_CACHE: dict[tuple[int, str, int], ConditionSet] = {}


def _valid_surface(genus: int, n: int) -> None:
    try:
        hirzebruch_polygon(genus, n)
    except (ParityMismatch, MaroniRange) as exc:
        raise BadMaroniParameter(str(exc)) from exc


def condition_set(genus: int, type_name: str, n: int) -> ConditionSet:
    """The stored conditions for a catalog type on the surface n."""
    _valid_surface(genus, n)
    key = (genus, type_name, n)
    if key not in _CONDITION_CACHE:
        ctype = get_type(genus, type_name)
        if not ctype.realizable:
            systems: tuple[tuple[Relation, ...], ...] = ()
            sufficient = False
        elif genus == 3 and type_name == "(000)":
            systems = (tuple(Relation.parse(t, ctype) for t in _GENUS3_000),)
            sufficient = True
        elif genus == 3:
            systems = ((),)
            sufficient = False
        else:
            raw = _GENUS4[type_name][n]
            systems = tuple(
                tuple(Relation.parse(t, ctype) for t in sys) for sys in raw
            )
            sufficient = False
        _CONDITION_CACHE[key] = ConditionSet(type_name, genus, n, systems, sufficient)
    return _CONDITION_CACHE[key]


# ---------------------------------------------------------------------------
# checking conditions on a concrete curve


@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of evaluating a ConditionSet on a curve, up to symmetry."""

    satisfied: bool
    conditions: ConditionSet
    witness: RolePermutation | None = None
    system_index: int | None = None

    def to_json(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "conditions": self.conditions.to_json(),
            "witness": None if self.witness is None else dict(self.witness.edges),
            "system": self.system_index,
        }


def _identified(G: MetricGraph) -> tuple[CombinatorialType, RoleAssignment]:
    got = identify_type(G)
    if got is None:
        raise UnknownType("graph is not a maximal genus-3/4 combinatorial type")
    return got


def check_conditions(G: MetricGraph, n: int) -> ConditionVerdict:
    """Evaluate the length conditions of G's type on the surface n.

    Every role relabeling in the type's symmetry group is tried; the
    verdict carries the first relabeling under which some system of the
    condition set holds (all comparisons exact).
    """
    ctype, ra = _identified(G)
    cs = condition_set(ctype.genus, ctype.name, n)
    base = ra.lengths(G)
    for sym in symmetry_group(ctype):
        relabeled = {k: base[v] for k, v in sym.edges.items()}
        for idx, system in enumerate(cs.systems):
            if all(rel.holds(relabeled) for rel in system):
                return ConditionVerdict(True, cs, sym, idx)
    return ConditionVerdict(False, cs)


def tropical_maroni(G: MetricGraph) -> int | None:
    """The surface parameter on which G is realizable, when unique.

    Genus 3 curves only ever embed on the n=1 surface: the (000) type is
    decided by its exact conditions, the other realizable types by the
    certificate search, and the sprawling type by refusal.  Genus 4
    curves are screened by the necessary conditions for n=0 and n=2;
    the value is the single parameter whose conditions hold, and None is
    returned when neither (or, for the necessary-only tests, both) single
    one out.
    """
    ctype, _ = _identified(G)
    if ctype.genus == 3:
        if not ctype.realizable:
            return None
        if ctype.name == "(000)":
            return 1 if check_conditions(G, 1).satisfied else None
        return 1 if realizability_by_search(G, 1) is not None else None
    hits = [n for n in (0, 2) if check_conditions(G, n).satisfied]
    if len(hits) == 1:
        return hits[0]
    return None


# ---------------------------------------------------------------------------
# sweeping triangulations


@dataclass
class SweepEntry:
    """One regular unimodular triangulation with its symbolic skeleton."""

    triangulation: Triangulation
    certificate: HeightFunction
    margin: Fraction
    forms: SkeletonForms
    type_name: str
    roles: dict[str, int]  # catalog edge key -> skeleton edge index
    _bends: dict | None = field(default=None, repr=False)
    _candidates: list | None = field(default=None, repr=False)
    _row_cache: dict = field(default_factory=dict, repr=False)

    def bends(self) -> dict:
        if self._bends is None:
            self._bends = bend_forms(self.triangulation)
        return self._bends


DEFAULT_WALK_SEED = 320

_SWEEP_CACHE: dict[tuple[int, int, int | None, int], tuple[SweepEntry, ...]] = {}


def _walk_triangulations(P: LatticePolygon, limit: int, seed: int) -> list[Triangulation]:
    """A deterministic flip random walk collecting `limit` triangulations."""
    rng = random.Random(seed)
    current = next(iter(enumerate_unimodular_triangulations(P)))
    seen = {current}
    order = [current]
    stall = 0
    while len(order) < limit and stall < 256:
        options = all_flips(current)
        _, current = options[rng.randrange(len(options))]
        if current in seen:
            stall += 1
        else:
            seen.add(current)
            order.append(current)
            stall = 0
    return order


def _make_entry(T: Triangulation) -> SweepEntry | None:
    cert = regularity_certificate(T)
    if cert is None:
        return None
    heights, margin = cert
    forms = skeleton_length_forms(T)
    got = identify_type(forms.evaluate(heights))
    if got is None:  # pragma: no cover - all sweep skeletons are maximal
        return None
    ctype, ra = got
    return SweepEntry(T, heights, margin, forms, ctype.name, dict(ra.edge_map))


def hirzebruch_sweep(
    g: int, n: int, limit: int | None = None, seed: int = DEFAULT_WALK_SEED
) -> tuple[SweepEntry, ...]:
    """Certified sweep entries for the (g, n) polygon, cached per process.

    With ``limit=None`` every unimodular triangulation is enumerated and
    the sweep is exhaustive (fast for genus 3; expensive for genus 4).
    With a limit, a deterministic flip walk collects that many
    triangulations instead — a reproducible subsample, not a census.
    """
    _valid_surface(g, n)
    key = (g, n, limit, seed)
    if key not in _SWEEP_CACHE:
        P = hirzebruch_polygon(g, n)
        if limit is None:
            source: Iterable[Triangulation] = enumerate_unimodular_triangulations(P)
        else:
            source = _walk_triangulations(P, limit, seed)
        entries = []
        for T in source:
            entry = _make_entry(T)
            if entry is not None:
                entries.append(entry)
        _SWEEP_CACHE[key] = tuple(entries)
    return _SWEEP_CACHE[key]


# ---------------------------------------------------------------------------
# the certificate search


def _screen_candidates(entry: SweepEntry) -> list[tuple[tuple[int, int], ...]]:
    """Linear length functionals worth pre-certifying as non-negative.

    Differences of adjacent skeleton edges and (far edge) - (two edges
    meeting at a vertex) generate every inequality the length conditions
    can impose, so proving a subset of these on the secondary cone lets
    the search reject impossible length targets without running an LP.
    """
    if entry._candidates is None:
        ends = [(u, v) for u, v, _ in entry.forms.edges]
        m = len(ends)
        cands: list[tuple[tuple[int, int], ...]] = []
        seen = set()

        def push(coeffs: dict[int, int]) -> None:
            key = tuple(sorted(coeffs.items()))
            if key not in seen:
                seen.add(key)
                cands.append(key)

        for i in range(m):
            for j in range(m):
                if i != j and set(ends[i]) & set(ends[j]):
                    push({i: 1, j: -1})
        vertices = {v for uv in ends for v in uv}
        for v in vertices:
            incident = [i for i in range(m) if v in ends[i] and ends[i][0] != ends[i][1]]
            for a_pos in range(len(incident)):
                for b_pos in range(a_pos + 1, len(incident)):
                    i, j = incident[a_pos], incident[b_pos]
                    far_i = ends[i][0] if ends[i][1] == v else ends[i][1]
                    far_j = ends[j][0] if ends[j][1] == v else ends[j][1]
                    if far_i == far_j:
                        continue
                    for k in range(m):
                        if k not in (i, j) and set(ends[k]) == {far_i, far_j}:
                            push({k: 1, i: -1, j: -1})
        entry._candidates = cands
    return entry._candidates


def _row_is_valid(entry: SweepEntry, row: tuple[tuple[int, int], ...]) -> bool:
    """Is sum(coeff * edge length) >= 0 on the whole secondary cone?

    The length forms are linear in the heights, so validity is exactly
    membership of the functional in the cone spanned by the bend forms:
    solve for non-negative multipliers reproducing it coefficient-wise.
    """
    cached = entry._row_cache.get(row)
    if cached is not None:
        return cached
    phi: dict[Point, int] = {}
    for idx, coeff in row:
        for p, c in entry.forms.edges[idx][2].items():
            phi[p] = phi.get(p, 0) + coeff * c
    bends = entry.bends()
    keys = sorted(bends)
    points = sorted(entry.triangulation.points())
    a_eq = [[bends[k].get(p, 0) for k in keys] for p in points]
    b_eq = [phi.get(p, 0) for p in points]
    a_ub = [[-(i == j) for j in range(len(keys))] for i in range(len(keys))]
    res = solve_lp([0] * len(keys), a_ub, [0] * len(keys), a_eq, b_eq)
    verdict = res.status == "optimal"
    entry._row_cache[row] = verdict
    return verdict


def _screen_rejects(entry: SweepEntry, target: dict[int, Fraction]) -> bool:
    """Reject a length target that violates a certified inequality."""
    for row in _screen_candidates(entry):
        value = sum(coeff * target[idx] for idx, coeff in row)
        if value < 0 and _row_is_valid(entry, row):
            return True
    return False


def _solve_heights(entry: SweepEntry, target: dict[int, Fraction]) -> HeightFunction | None:
    """Heights strictly inside the secondary cone hitting exact lengths."""
    points = sorted(entry.triangulation.points())
    col = {p: i for i, p in enumerate(points)}
    a_strict, b_strict = [], []
    for form in entry.bends().values():
        row = [Fraction(0)] * len(points)
        for p, c in form.items():
            row[col[p]] = Fraction(-c)
        a_strict.append(row)
        b_strict.append(Fraction(0))
    a_eq, b_eq = [], []
    for idx, (_, _, form) in enumerate(entry.forms.edges):
        row = [Fraction(0)] * len(points)
        for p, c in form.items():
            row[col[p]] = Fraction(c)
        a_eq.append(row)
        b_eq.append(target[idx])
    got = strict_feasible(a_strict, b_strict, a_eq, b_eq)
    if got is None:
        return None
    x, _ = got
    h = HeightFunction({p: x[col[p]] for p in points})
    assert induces(entry.triangulation, h)
    for idx, (_, _, form) in enumerate(entry.forms.edges):
        assert evaluate_form(form, h.values) == target[idx]
    return h


def realizability_by_search(
    G: MetricGraph, n: int, limit: int | None = None
) -> tuple[Triangulation, HeightFunction] | None:
    """Search the (genus, n) triangulation sweep for a realization of G.

    For every sweep triangulation whose skeleton has G's combinatorial
    type and every isomorphism between them, an exact feasibility problem
    asks for heights strictly inside the secondary cone whose skeleton
    lengths equal G's.  A hit is returned as (triangulation, heights); a
    full sweep (``limit=None``) that comes back empty proves G is not the
    skeleton of any smooth curve on that surface, while a limited sweep
    only reports absence within the subsample.
    """
    ctype, ra = _identified(G)
    _valid_surface(ctype.genus, n)
    base = ra.lengths(G)
    targets: list[dict[str, Fraction]] = []
    seen = set()
    for sym in symmetry_group(ctype):
        relabeled = {k: base[v] for k, v in sym.edges.items()}
        key = tuple(sorted(relabeled.items()))
        if key not in seen:
            seen.add(key)
            targets.append(relabeled)
    for entry in hirzebruch_sweep(ctype.genus, n, limit):
        if entry.type_name != ctype.name:
            continue
        for lengths in targets:
            target = {entry.roles[k]: lengths[k] for k in lengths}
            if _screen_rejects(entry, target):
                continue
            h = _solve_heights(entry, target)
            if h is not None:
                return entry.triangulation, h
    return None
