"""Head-to-head comparison of fractional matchings.

An agent compares two incident edges (or being unmatched) with a vote
in {-1, 0, +1}. Two matchings M and N are compared by pairing the mass
where M exceeds N against the mass where N exceeds M:

* a *feasible* pairing at each vertex transports exactly the surplus
  masses (plus unmatched slack) onto each other, so the adversarial
  comparison Delta(M, N) decomposes into one tiny exact transportation
  problem per vertex;
* a *sensible* pairing relaxes the marginals to the full M and N masses
  with a shared-diagonal consistency condition across the two endpoints
  of every edge, which couples the vertices and is solved here as one
  exact linear program.

M is popular when Delta(M, N) >= 0 against every rival N; the verifiers
below certify that over all enumerated half-integral rivals (the
vertices of the degree-constrained polytope), optionally supplemented
by seeded random fractional rivals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .core import (
    ONE,
    ZERO,
    Instance,
    InstanceError,
    check_matching,
    is_saturated,
    matching_size,
    vertex_load,
)
from .engine import BoundExceeded, enumerate_half_matchings
from . import simplex

Item = str | None  # an edge id, or None for staying unmatched


class ImbalancedTransport(ValueError):
    """Total supply and total demand differ."""


def vote(inst: Instance, v: str, x: Item, y: Item) -> int:
    """+1 when v strictly prefers x over y, -1 for the reverse, 0 if equal.

    Either side may be None (unmatched), which loses to every edge.
    Arguments must be incident to v; preferences are assumed strict.
    """
    px = None if x is None else inst.pval(v, x)
    py = None if y is None else inst.pval(v, y)
    if x == y:
        return 0
    if px is None:
        return -1
    if py is None:
        return 1
    if px == py:
        return 0
    return 1 if px > py else -1


# ---------------------------------------------------------------------------
# exact balanced transportation


def min_cost_transport(
    supply: Mapping[Item, Fraction],
    demand: Mapping[Item, Fraction],
    cost: Callable[[Item, Item], int | Fraction],
) -> tuple[Fraction, dict[tuple[Item, Item], Fraction]]:
    """Exact optimum of a balanced transportation problem.

    Zero-mass items are ignored; total supply must equal total demand.
    Returns the minimum cost and a canonical optimal plan. Sizes up to
    two on one side are solved in closed form (covering all comparisons
    of half-integral matchings); anything larger falls back to the
    exact simplex.
    """
    sup = [(k, val) for k, val in sorted(supply.items(), key=_key) if val != 0]
    dem = [(k, val) for k, val in sorted(demand.items(), key=_key) if val != 0]
    if any(val < 0 for _, val in sup + dem):
        raise ValueError("negative supply or demand")
    if sum((val for _, val in sup), ZERO) != sum((val for _, val in dem), ZERO):
        raise ImbalancedTransport("total supply differs from total demand")
    if not sup:
        return ZERO, {}
    if len(sup) == 1:
        s, _ = sup[0]
        plan = {(s, d): val for d, val in dem}
        return _plan_cost(plan, cost), plan
    if len(dem) == 1:
        d, _ = dem[0]
        plan = {(s, d): val for s, val in sup}
        return _plan_cost(plan, cost), plan
    if len(sup) == 2:
        return _two_row_transport(sup, dem, cost)
    if len(dem) == 2:
        flipped = lambda d, s: cost(s, d)
        best, plan = _two_row_transport(dem, sup, flipped)
        return best, {(s, d): val for (d, s), val in plan.items()}
    return _simplex_transport(sup, dem, cost)


def _key(pair):
    k = pair[0]
    return (k is None, k if k is not None else "")


def _plan_cost(plan, cost) -> Fraction:
    return sum((val * cost(s, d) for (s, d), val in plan.items()), ZERO)


def _two_row_transport(sup, dem, cost):
    """Two supply rows: the row-1 allocation solves a fractional knapsack.

    With x_d the row-1 share of column d, the cost is linear with per
    column slope cost(s1, d) - cost(s2, d); filling the cheapest slopes
    first (ties by column key) is exact.
    """
    (s1, a1), (s2, a2) = sup
    order = sorted(dem, key=lambda kv: (cost(s1, kv[0]) - cost(s2, kv[0]), _key(kv)))
    plan: dict[tuple[Item, Item], Fraction] = {}
    remaining = a1
    for d, need in order:
        take = min(remaining, need)
        if take > 0:
            plan[(s1, d)] = take
            remaining -= take
        if need - take > 0:
            plan[(s2, d)] = need - take
    return _plan_cost(plan, cost), plan


def _simplex_transport(sup, dem, cost):
    cells = [(s, d) for s, _ in sup for d, _ in dem]
    costs = [Fraction(cost(s, d)) for s, d in cells]
    rows = []
    rhs = []
    for s, val in sup:
        rows.append([ONE if cs == s else ZERO for cs, _ in cells])
        rhs.append(val)
    for d, val in dem:
        rows.append([ONE if cd == d else ZERO for _, cd in cells])
        rhs.append(val)
    x, value = simplex.solve_min(costs, rows, rhs)
    plan = {cells[i]: x[i] for i in range(len(cells)) if x[i] != 0}
    return value, plan


# ---------------------------------------------------------------------------
# Delta over feasible pairings (per-vertex decomposition)


@dataclass(frozen=True)
class Pairing:
    kind: str  # feasible | sensible | product
    phi: Mapping[str, Mapping[tuple[Item, Item], Fraction]]


@dataclass(frozen=True)
class DeltaResult:
    value: Fraction
    pairing: Pairing
    votes: Mapping[str, Fraction]  # per-vertex contribution under the witness


def delta_feasible(
    inst: Instance, m: Mapping[str, Fraction], n: Mapping[str, Fraction]
) -> DeltaResult:
    """The adversarial comparison min over feasible pairings of the vote mass.

    Each vertex transports its M-surplus (plus unmatched slack) onto its
    N-surplus at vote costs; the axioms constrain vertices independently,
    so the global minimum is the sum of the per-vertex optima.
    """
    inst.require_strict("delta over feasible pairings")
    check_matching(inst, m)
    check_matching(inst, n)
    total = ZERO
    phi: dict[str, dict[tuple[Item, Item], Fraction]] = {}
    votes: dict[str, Fraction] = {}
    for v in inst.vertices:
        supply: dict[Item, Fraction] = {}
        demand: dict[Item, Fraction] = {}
        load_m = vertex_load(inst, m, v)
        load_n = vertex_load(inst, n, v)
        for eid in inst.incident(v):
            up = m.get(eid, ZERO) - n.get(eid, ZERO)
            if up > 0:
                supply[eid] = up
            elif up < 0:
                demand[eid] = -up
        if load_n > load_m:
            supply[None] = load_n - load_m
        elif load_m > load_n:
            demand[None] = load_m - load_n
        cost = lambda x, y, v=v: vote(inst, v, x, y)
        value, plan = min_cost_transport(supply, demand, cost)
        total += value
        phi[v] = plan
        votes[v] = value
    return DeltaResult(value=total, pairing=Pairing("feasible", phi), votes=votes)


# ---------------------------------------------------------------------------
# Delta over sensible pairings (one coupled LP)


#: delta_sensible refuses programs larger than this many pair variables;
#: the count grows as the sum of (degree + 1)^2 over the vertices.
SENSIBLE_LP_LIMIT = 4000


def delta_sensible(
    inst: Instance, m: Mapping[str, Fraction], n: Mapping[str, Fraction]
) -> DeltaResult:
    """Exact minimum of the vote mass over sensible pairings.

    Variables are the per-vertex pair weights, with both endpoints of an
    edge sharing one diagonal variable (the cross-endpoint consistency
    condition, which is what prevents per-vertex decomposition). Row and
    column marginals equal the full M and N values; vertices saturated
    by M admit no unmatched-on-the-left mass, and vertices saturated by
    N none on the right.
    """
    inst.require_strict("delta over sensible pairings")
    check_matching(inst, m)
    check_matching(inst, n)
    footprint = sum((len(inst.incident(v)) + 1) ** 2 for v in inst.vertices)
    if footprint > SENSIBLE_LP_LIMIT:
        raise BoundExceeded(
            f"sensible-pairing program needs {footprint} variables, "
            f"over the limit of {SENSIBLE_LP_LIMIT}"
        )

    variables: list[tuple[str, Item, Item]] = []  # ("diag", eid) merged below
    index: dict[tuple[str, Item, Item], int] = {}
    diag_index: dict[str, int] = {}

    def var(v: str, x: Item, y: Item) -> int:
        if x == y and x is not None:
            eid = x
            if eid not in diag_index:
                diag_index[eid] = len(variables)
                variables.append(("diag", eid, eid))
            return diag_index[eid]
        key = (v, x, y)
        if key not in index:
            index[key] = len(variables)
            variables.append(key)
        return index[key]

    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    costs: dict[int, Fraction] = {}

    for v in inst.vertices:
        items: list[Item] = list(inst.incident(v))
        m_side: list[Item] = items + ([] if is_saturated(inst, m, v) else [None])
        n_side: list[Item] = items + ([] if is_saturated(inst, n, v) else [None])
        for eid in inst.incident(v):
            rows.append({var(v, eid, y): ONE for y in n_side})
            rhs.append(m.get(eid, ZERO))
            rows.append({var(v, x, eid): ONE for x in m_side})
            rhs.append(n.get(eid, ZERO))
        for x in m_side:
            for y in n_side:
                if x is None and y is None:
                    continue  # harmless mass; fix it to zero by omission
                j = var(v, x, y)
                costs[j] = costs.get(j, ZERO) + Fraction(vote(inst, v, x, y))

    nvars = len(variables)
    cost_vec = [costs.get(j, ZERO) for j in range(nvars)]
    dense = []
    for row in rows:
        arr = [ZERO] * nvars
        for j, coef in row.items():
            arr[j] = coef
        dense.append(arr)
    x, value = simplex.solve_min(cost_vec, dense, rhs)

    phi: dict[str, dict[tuple[Item, Item], Fraction]] = {v: {} for v in inst.vertices}
    votes: dict[str, Fraction] = {v: ZERO for v in inst.vertices}
    for j, val in enumerate(x):
        if val == 0:
            continue
        tag, a, b = variables[j]
        if tag == "diag":
            e = inst.edge(a)
            phi[e.u][(a, b)] = val
            phi[e.v][(a, b)] = val
        else:
            phi[tag][(a, b)] = val
            votes[tag] += val * vote(inst, tag, a, b)
    return DeltaResult(value=value, pairing=Pairing("sensible", phi), votes=votes)


# ---------------------------------------------------------------------------
# the product pairing (mixed-popularity comparison)


def delta_product(
    inst: Instance, m: Mapping[str, Fraction], n: Mapping[str, Fraction]
) -> Fraction:
    """Vote mass under the independent product pairing of M and N."""
    inst.require_strict("the product comparison")
    total = ZERO
    for v in inst.vertices:
        load_m = vertex_load(inst, m, v)
        load_n = vertex_load(inst, n, v)
        for e in inst.incident(v):
            me = m.get(e, ZERO)
            ne = n.get(e, ZERO)
            if me:
                for f in inst.incident(v):
                    nf = n.get(f, ZERO)
                    if nf:
                        total += me * nf * vote(inst, v, e, f)
                total += me * (1 - load_n)  # vote against being unmatched is +1
            if ne:
                total -= ne * (1 - load_m)
    return total


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class PopularityVerdict:
    popular: bool
    scope: str
    checked: int
    worst_value: Fraction
    counterexample: tuple[dict[str, Fraction], DeltaResult] | None


def _canonical_key(n: Mapping[str, Fraction]) -> tuple:
    return tuple(sorted((eid, val) for eid, val in n.items() if val != 0))


def _scan(
    inst: Instance,
    m: Mapping[str, Fraction],
    rivals: Iterable[Mapping[str, Fraction]],
    compare: Callable[[Mapping[str, Fraction]], Fraction | DeltaResult],
    scope: str,
) -> PopularityVerdict:
    worst = None  # (value, -size, canonical key, rival, result)
    checked = 0
    for rival in rivals:
        outcome = compare(rival)
        value = outcome.value if isinstance(outcome, DeltaResult) else outcome
        checked += 1
        key = (value, -matching_size(rival), _canonical_key(rival))
        if worst is None or key < worst[0]:
            worst = (key, dict(rival), outcome)
    if worst is None:
        return PopularityVerdict(True, scope, 0, ZERO, None)
    (value, _, _), rival, outcome = worst
    counter = None
    if value < 0:
        result = (
            outcome
            if isinstance(outcome, DeltaResult)
            else DeltaResult(value, Pairing("product", {}), {})
        )
        counter = (rival, result)
    return PopularityVerdict(value >= 0, scope, checked, value, counter)


def is_popular(
    inst: Instance,
    m: Mapping[str, Fraction],
    bound: int = 10,
    scope: str = "half",
    samples: int = 200,
    seed: int = 0,
) -> PopularityVerdict:
    """Whether no rival beats m under adversarial feasible pairings.

    Scope ``half`` checks every enumerated half-integral rival, the
    vertex set of the fractional matching polytope; ``sampled`` adds
    seeded random fractional rivals as a probabilistic supplement. The
    reported counterexample is the worst rival (ties: larger, then
    lexicographically smallest).
    """
    rivals = list(enumerate_half_matchings(inst, bound))
    if scope == "sampled":
        rivals += sample_fractional_matchings(inst, seed=seed, count=samples)
    elif scope != "half":
        raise ValueError(f"unknown popularity scope {scope!r}")
    label = "popular (half-integral scope)" if scope == "half" else "popular (sampled scope)"
    return _scan(inst, m, rivals, lambda n: delta_feasible(inst, m, n), label)


def is_popular_mixed(
    inst: Instance, m: Mapping[str, Fraction], bound: int = 10
) -> PopularityVerdict:
    """Whether no half-integral rival beats m under the product pairing."""
    rivals = enumerate_half_matchings(inst, bound)
    return _scan(
        inst, m, rivals, lambda n: delta_product(inst, m, n), "popular mixed"
    )


def is_popular_critical(
    inst: Instance,
    m: Mapping[str, Fraction],
    critical: frozenset[str] | set[str],
    bound: int = 10,
) -> PopularityVerdict:
    """Popularity restricted to rivals saturating the critical set."""
    crit = frozenset(critical)
    for v in crit:
        if not is_saturated(inst, m, v):
            raise InstanceError(f"matching does not saturate critical vertex {v!r}")
    rivals = (
        n
        for n in enumerate_half_matchings(inst, bound)
        if all(is_saturated(inst, n, v) for v in crit)
    )
    return _scan(
        inst, m, rivals, lambda n: delta_feasible(inst, m, n),
        "popular among critical (half-integral scope)",
    )


def sample_fractional_matchings(
    inst: Instance, seed: int, count: int
) -> list[dict[str, Fraction]]:
    """Deterministic random fractional matchings (denominator 16)."""
    rng = random.Random(f"halfmatch-sample-{seed}")
    out = []
    for _ in range(count):
        raw = {e.eid: Fraction(rng.randint(0, 16), 16) for e in inst.edges}
        loads = {
            v: sum((raw[eid] for eid in inst.incident(v)), ZERO)
            for v in inst.vertices
        }
        scaled = {}
        for e in inst.edges:
            cap = min(
                ONE,
                *(ONE / loads[x] for x in (e.u, e.v) if loads[x] > 1),
            ) if (loads[e.u] > 1 or loads[e.v] > 1) else ONE
            val = raw[e.eid] * cap
            if val:
                scaled[e.eid] = val
        check_matching(inst, scaled)
        out.append(scaled)
    return out
