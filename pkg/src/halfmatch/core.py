"""Exact-rational model of matching markets on general graphs.

Agents are vertices of a multigraph and rank their *incident edges*
(parallel edges are distinct alternatives, so two agents may share
several contracts). Matchings assign each edge a rational value with
per-vertex sums at most one. Every quantity in this package is a
`fractions.Fraction`; stability and popularity predicates compare
exactly, never through floats.

Instances and matchings are immutable by convention once built: all
operations here are pure functions of their inputs and safe to share
across concurrent tasks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

Rational = int | str | Fraction

ZERO = Fraction(0)
HALF = Fraction(1, 2)
ONE = Fraction(1)

#: A matching is a plain dict edge-id -> value; absent edges mean zero.
Matching = dict


class InstanceError(ValueError):
    """An instance description violates a structural rule."""


class MatchingError(ValueError):
    """A matching is invalid for the given instance."""


class Edge(NamedTuple):
    eid: str
    u: str
    v: str


def _rat(x: Rational) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Instance:
    """A preference market: vertices, (multi)edges, and per-vertex valuations.

    Construct through :func:`validate_instance`, which canonicalizes and
    checks every invariant. ``pref[v][eid]`` is agent v's valuation of its
    incident edge; larger is better, ties allowed. ``pref_empty[v]`` is the
    value of staying unmatched and is strictly below every incident edge.
    ``gamma`` optionally maps ``(eid, v)`` to a ``(gamma, delta)`` pair of
    improvement thresholds with ``0 < gamma < delta``. ``critical`` is an
    optional set of vertices that solvers may be required to saturate.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    pref: Mapping[str, Mapping[str, Fraction]]
    pref_empty: Mapping[str, Fraction]
    weights: Mapping[str, Fraction] | None
    gamma: Mapping[tuple[str, str], tuple[Fraction, Fraction]] | None
    critical: frozenset[str]
    _incident: Mapping[str, tuple[str, ...]]
    _by_id: Mapping[str, Edge]
    _index: Mapping[str, int]

    # -- structure ----------------------------------------------------

    def incident(self, v: str) -> tuple[str, ...]:
        """Edge ids at v, sorted by id (the canonical incidence order)."""
        return self._incident[v]

    def edge(self, eid: str) -> Edge:
        return self._by_id[eid]

    def other(self, eid: str, v: str) -> str:
        e = self._by_id[eid]
        if v == e.u:
            return e.v
        if v == e.v:
            return e.u
        raise InstanceError(f"edge {eid!r} is not incident to {v!r}")

    def index(self, v: str) -> int:
        """Position of v in the canonical vertex list (fixes orientation)."""
        return self._index[v]

    def lower_endpoint(self, eid: str) -> str:
        e = self._by_id[eid]
        return e.u if self._index[e.u] < self._index[e.v] else e.v

    # -- preferences ---------------------------------------------------

    def pval(self, v: str, eid: str) -> Fraction:
        try:
            return self.pref[v][eid]
        except KeyError:
            raise InstanceError(f"no preference of {v!r} for edge {eid!r}") from None

    def pempty(self, v: str) -> Fraction:
        return self.pref_empty[v]

    def prefers(self, v: str, eid: str, fid: str) -> bool:
        """True when v strictly prefers edge eid over edge fid."""
        return self.pval(v, eid) > self.pval(v, fid)

    def is_strict(self) -> bool:
        """Whether every vertex's valuation is injective on its edges."""
        for v in self.vertices:
            vals = [self.pref[v][e] for e in self._incident[v]]
            if len(set(vals)) != len(vals):
                return False
        return True

    def require_strict(self, what: str = "this operation") -> None:
        if not self.is_strict():
            raise InstanceError(f"{what} requires strict (tie-free) preferences")

    def tie_classes(self, v: str) -> list[list[str]]:
        """Incident edges grouped by equal valuation, best group first.

        Edges inside a group are in canonical id order.
        """
        groups: dict[Fraction, list[str]] = {}
        for eid in self._incident[v]:
            groups.setdefault(self.pref[v][eid], []).append(eid)
        return [groups[val] for val in sorted(groups, reverse=True)]

    def strict_order(self, v: str) -> list[str]:
        """Incident edges best-first; requires a tie-free valuation at v."""
        classes = self.tie_classes(v)
        if any(len(c) > 1 for c in classes):
            raise InstanceError(f"vertex {v!r} has tied preferences")
        return [c[0] for c in classes]

    def gamma_of(self, eid: str, v: str) -> tuple[Fraction, Fraction]:
        if self.gamma is None or (eid, v) not in self.gamma:
            raise InstanceError(f"missing gamma/delta for edge {eid!r} at {v!r}")
        return self.gamma[(eid, v)]

    def has_full_gamma(self) -> bool:
        if self.gamma is None:
            return False
        for e in self.edges:
            if (e.eid, e.u) not in self.gamma or (e.eid, e.v) not in self.gamma:
                return False
        return True


def validate_instance(
    vertices: Sequence[str],
    edges: Iterable[tuple[str, str, str]],
    pref: Mapping[str, Mapping[str, Rational]],
    pref_empty: Mapping[str, Rational] | None = None,
    weights: Mapping[str, Rational] | None = None,
    gamma: Mapping[tuple[str, str], tuple[Rational, Rational]] | None = None,
    critical: Iterable[str] | None = None,
) -> Instance:
    """Check and canonicalize a raw instance description.

    Raises :class:`InstanceError` with a specific message on loop edges,
    duplicate ids, missing or negative preference entries, preference
    entries not strictly above the unmatched value, ``gamma >= delta``,
    or unknown vertices in the critical set. Incidence lists are sorted
    by edge id and edges by id, so iteration order is deterministic.
    """
    vs = tuple(vertices)
    if len(set(vs)) != len(vs):
        raise InstanceError("duplicate vertex ids")
    vset = set(vs)

    by_id: dict[str, Edge] = {}
    for raw in edges:
        e = Edge(*raw)
        if e.eid in by_id:
            raise InstanceError(f"duplicate edge id {e.eid!r}")
        if e.u not in vset or e.v not in vset:
            raise InstanceError(f"edge {e.eid!r} has an unknown endpoint")
        if e.u == e.v:
            raise InstanceError(f"edge {e.eid!r} is a loop; loops are forbidden")
        by_id[e.eid] = e
    es = tuple(by_id[eid] for eid in sorted(by_id))

    incident: dict[str, list[str]] = {v: [] for v in vs}
    for e in es:
        incident[e.u].append(e.eid)
        incident[e.v].append(e.eid)
    inc = {v: tuple(sorted(ids)) for v, ids in incident.items()}

    p_empty = {v: ZERO for v in vs}
    if pref_empty:
        for v, val in pref_empty.items():
            if v not in vset:
                raise InstanceError(f"pref_empty for unknown vertex {v!r}")
            r = _rat(val)
            if r > 0:
                raise InstanceError(f"pref_empty of {v!r} must be <= 0")
            p_empty[v] = r

    p: dict[str, dict[str, Fraction]] = {}
    for v in vs:
        given = dict(pref.get(v, {}))
        mine: dict[str, Fraction] = {}
        for eid in inc[v]:
            if eid not in given:
                raise InstanceError(f"missing preference of {v!r} for edge {eid!r}")
            r = _rat(given.pop(eid))
            if r < 0:
                raise InstanceError(f"preference of {v!r} for {eid!r} is negative")
            if r <= p_empty[v]:
                raise InstanceError(
                    f"preference of {v!r} for {eid!r} must exceed the unmatched value"
                )
            mine[eid] = r
        if given:
            stray = sorted(given)[0]
            raise InstanceError(f"preference of {v!r} for non-incident edge {stray!r}")
        p[v] = mine

    w = None
    if weights is not None:
        w = {}
        for eid, val in weights.items():
            if eid not in by_id:
                raise InstanceError(f"weight for unknown edge {eid!r}")
            w[eid] = _rat(val)

    g = None
    if gamma is not None:
        g = {}
        for (eid, v), (lo, hi) in gamma.items():
            if eid not in by_id:
                raise InstanceError(f"gamma for unknown edge {eid!r}")
            e = by_id[eid]
            if v not in (e.u, e.v):
                raise InstanceError(f"gamma endpoint {v!r} not on edge {eid!r}")
            glo, ghi = _rat(lo), _rat(hi)
            if not (0 < glo < ghi):
                raise InstanceError(
                    f"edge {eid!r} at {v!r}: gamma must be positive and < delta"
                )
            g[(eid, v)] = (glo, ghi)

    crit = frozenset(critical or ())
    unknown = crit - vset
    if unknown:
        raise InstanceError(f"critical set contains unknown vertex {sorted(unknown)[0]!r}")

    return Instance(
        vertices=vs,
        edges=es,
        pref=p,
        pref_empty=p_empty,
        weights=w,
        gamma=g,
        critical=crit,
        _incident=inc,
        _by_id=by_id,
        _index={v: i for i, v in enumerate(vs)},
    )


# ---------------------------------------------------------------------------
# matchings


def matching_size(m: Mapping[str, Fraction]) -> Fraction:
    return sum(m.values(), ZERO)


def vertex_load(inst: Instance, m: Mapping[str, Fraction], v: str) -> Fraction:
    return sum((m.get(eid, ZERO) for eid in inst.incident(v)), ZERO)


def check_matching(inst: Instance, m: Mapping[str, Fraction], half: bool = False) -> None:
    """Raise :class:`MatchingError` unless m is a valid (half-)matching."""
    for eid, val in m.items():
        if eid not in inst._by_id:
            raise MatchingError(f"value for unknown edge {eid!r}")
        if not isinstance(val, Fraction):
            raise MatchingError(f"value of {eid!r} is not an exact rational")
        if val < 0 or val > 1:
            raise MatchingError(f"value of {eid!r} outside [0, 1]")
        if half and val not in (ZERO, HALF, ONE):
            raise MatchingError(f"value of {eid!r} is not in {{0, 1/2, 1}}")
    for v in inst.vertices:
        if vertex_load(inst, m, v) > 1:
            raise MatchingError(f"vertex {v!r} exceeds unit load")


def is_half_matching(m: Mapping[str, Fraction]) -> bool:
    return all(val in (ZERO, HALF, ONE) for val in m.values())


def is_saturated(inst: Instance, m: Mapping[str, Fraction], v: str) -> bool:
    return vertex_load(inst, m, v) == 1


def assigned_value(inst: Instance, v: str, m: Mapping[str, Fraction]) -> Fraction:
    """Agent v's worst positively-held edge value, or the unmatched value.

    Saturated agents are valued by the minimum over edges they hold with
    positive weight; unsaturated agents by ``pref_empty``.
    """
    positive = [inst.pval(v, eid) for eid in inst.incident(v) if m.get(eid, ZERO) > 0]
    if positive and vertex_load(inst, m, v) == 1:
        return min(positive)
    return inst.pempty(v)


def blocking_edges(
    inst: Instance, m: Mapping[str, Fraction], mode: str = "weak"
) -> list[str]:
    """Edges that destabilize m, in canonical id order.

    ``weak`` mode lists every edge with value below one whose endpoints
    both strictly prefer it to their assigned values. ``gamma`` mode uses
    the two-threshold test: edge e=(u,v) blocks when the improvement is
    at least gamma at one endpoint and at least delta at the other, in
    either orientation; it requires gamma/delta on every (edge, endpoint).
    An empty result certifies weak stability / gamma-stability.
    """
    if mode not in ("weak", "gamma"):
        raise ValueError(f"unknown blocking mode {mode!r}")
    if mode == "gamma" and not inst.has_full_gamma():
        raise InstanceError("gamma mode requires gamma/delta on every (edge, endpoint)")
    assigned = {v: assigned_value(inst, v, m) for v in inst.vertices}
    out = []
    for e in inst.edges:
        val = m.get(e.eid, ZERO)
        du = inst.pval(e.u, e.eid) - assigned[e.u]
        dv = inst.pval(e.v, e.eid) - assigned[e.v]
        if mode == "weak":
            if val < 1 and du > 0 and dv > 0:
                out.append(e.eid)
        else:
            gu, deltau = inst.gamma_of(e.eid, e.u)
            gv, deltav = inst.gamma_of(e.eid, e.v)
            if min(du - gu, dv - deltav) >= 0 or min(du - deltau, dv - gv) >= 0:
                out.append(e.eid)
    return out


@dataclass(frozen=True)
class MatchingStats:
    size: Fraction
    saturated: tuple[str, ...]
    unsaturated: tuple[str, ...]
    integral: bool
    critical_ok: bool


def matching_stats(
    inst: Instance, m: Mapping[str, Fraction], critical: Iterable[str] | None = None
) -> MatchingStats:
    """Aggregate size, saturation, integrality and critical coverage of m."""
    crit = frozenset(critical) if critical is not None else inst.critical
    sat = tuple(v for v in inst.vertices if is_saturated(inst, m, v))
    unsat = tuple(v for v in inst.vertices if v not in set(sat))
    return MatchingStats(
        size=matching_size(m),
        saturated=sat,
        unsaturated=unsat,
        integral=all(val in (ZERO, ONE) for val in m.values()),
        critical_ok=all(v in set(sat) for v in crit),
    )


# ---------------------------------------------------------------------------
# support decomposition of half-matchings


@dataclass(frozen=True)
class HalfSupport:
    """Support of a half-matching split into its structural components.

    ``ones`` are the saturated edges. Each cycle/path is a pair of
    aligned tuples ``(vertices, edge_ids)``: for a path of k+1 vertices
    there are k edges, edge t joining vertices t and t+1; for a cycle of
    k vertices there are k edges, edge t joining vertices t and t+1 mod k
    (a two-vertex cycle uses two parallel edges).
    """

    ones: tuple[str, ...]
    cycles: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    paths: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]


def half_support(inst: Instance, m: Mapping[str, Fraction]) -> HalfSupport:
    """Decompose a half-matching's support; deterministic traversal order.

    Paths start at their lower-indexed endpoint; cycles start at their
    lowest-indexed vertex and step first along the smaller incident
    half-edge id.
    """
    check_matching(inst, m, half=True)
    ones = tuple(sorted(eid for eid, val in m.items() if val == ONE))
    halves: dict[str, list[str]] = {}
    for eid, val in m.items():
        if val == HALF:
            e = inst.edge(eid)
            halves.setdefault(e.u, []).append(eid)
            halves.setdefault(e.v, []).append(eid)
    for ids in halves.values():
        ids.sort()

    seen_edges: set[str] = set()
    cycles = []
    paths = []
    # degree-1 vertices seed paths; remaining components are cycles
    endpoints = sorted(
        (v for v, ids in halves.items() if len(ids) == 1), key=inst.index
    )
    for start in endpoints:
        eid = halves[start][0]
        if eid in seen_edges:
            continue
        verts, eids = _walk(inst, halves, start, eid, seen_edges)
        paths.append((tuple(verts), tuple(eids)))
    for start in sorted(halves, key=inst.index):
        nxt = [eid for eid in halves[start] if eid not in seen_edges]
        if not nxt:
            continue
        verts, eids = _walk(inst, halves, start, nxt[0], seen_edges)
        cycles.append((tuple(verts[:-1]), tuple(eids)))
    return HalfSupport(ones=ones, cycles=tuple(cycles), paths=tuple(paths))


def _walk(inst, halves, start, first_eid, seen_edges):
    verts = [start]
    eids = []
    v, eid = start, first_eid
    while True:
        seen_edges.add(eid)
        eids.append(eid)
        v = inst.other(eid, v)
        verts.append(v)
        options = [g for g in halves[v] if g != eid and g not in seen_edges]
        if not options:
            return verts, eids
        eid = options[0]
