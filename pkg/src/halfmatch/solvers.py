"""End-to-end pipelines: duplicate edges, stabilize, project back.

Every solver follows the same three-step plan: build a strict derived
market with parallel copies per edge, find a stable half-matching
there, and project copy values back onto the original edges. The choice
of construction decides what the projection guarantees:

==================  =====================================================
solve_max_srti      weakly stable, within 3/2 of the largest weakly
                    stable half-matching; integral when no odd
                    preference cycle exists (e.g. bipartite inputs)
solve_max_gamma     gamma-stable, within 3/2 of the largest gamma-stable
                    half-matching
solve_max_pri       popular, maximum size among popular half-matchings
solve_pop_crit      saturates the critical set, popular among matchings
                    that do (checked infeasible-first)
solve_pop_maxw      maximum weight exactly, popular among maximum-weight
                    matchings (via duals: restrict to tight edges, make
                    positive-potential vertices critical)
==================  =====================================================

Each solver re-verifies its own postcondition before returning and
raises :class:`VerificationFailed` otherwise; a failure signals an
implementation bug, never a property of the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .core import (
    ZERO,
    Instance,
    InstanceError,
    blocking_edges,
    is_saturated,
    validate_instance,
)
from .cover import double_cover, max_cardinality_saturating, max_weight_cover_matching
from .engine import stable_half_matching
from .reductions import (
    DerivedInstance,
    build_crit_reduction,
    build_gamma_reduction,
    build_pri_reduction,
    build_srti_reduction,
)


class VerificationFailed(RuntimeError):
    """A solver's self-check failed; this indicates a bug, not bad input."""


class InfeasibleCritical(ValueError):
    """No fractional matching can saturate the requested critical set."""


def _run_pipeline(derived: DerivedInstance) -> dict[str, Fraction]:
    cert = stable_half_matching(derived.inst)
    if blocking_edges(derived.inst, cert.matching, "weak"):
        raise VerificationFailed("derived half-matching is not stable")
    return derived.project(cert.matching)


def solve_max_srti(inst: Instance) -> dict[str, Fraction]:
    """A weakly stable half-matching within 3/2 of the largest one.

    Ties and parallel edges are both welcome. The output is integral
    whenever the instance admits no odd preference cycle.
    """
    out = _run_pipeline(build_srti_reduction(inst))
    bad = blocking_edges(inst, out, "weak")
    if bad:
        raise VerificationFailed(f"projection admits blocking edges {bad}")
    return out


def solve_max_gamma(inst: Instance) -> dict[str, Fraction]:
    """A gamma-stable half-matching within 3/2 of the largest one."""
    out = _run_pipeline(build_gamma_reduction(inst))
    bad = blocking_edges(inst, out, "gamma")
    if bad:
        raise VerificationFailed(f"projection admits gamma-blocking edges {bad}")
    return out


def solve_max_pri(inst: Instance) -> dict[str, Fraction]:
    """A popular half-matching of maximum size among popular ones.

    Requires strict preferences. Popularity holds against every
    fractional rival; the desk-scale verifier certifies it against all
    half-integral rivals.
    """
    inst.require_strict("solve_max_pri")
    return _run_pipeline(build_pri_reduction(inst))


@dataclass(frozen=True)
class DualSolution:
    """An optimal dual of the fractional matching program, with witnesses.

    ``y`` assigns every vertex a nonnegative potential with
    y_u + y_v >= weight(e) on every edge; ``objective`` (the potential
    sum) equals the weight of the primal ``witness``, which lives on the
    ``tight_edges`` and saturates every vertex of ``critical`` (the
    positive-potential vertices). Maximum-weight fractional matchings
    are exactly the fractional matchings with both properties.
    """

    y: Mapping[str, Fraction]
    objective: Fraction
    tight_edges: tuple[str, ...]
    critical: frozenset[str]
    witness: dict[str, Fraction]


def max_weight_dual(inst: Instance, weights: Mapping[str, Fraction]) -> DualSolution:
    """Optimal dual potentials via the bipartite double cover.

    The cover's maximum-weight matching comes with exact potentials on
    both copies of each vertex; averaging the two halves them into a
    feasible dual of the fractional program whose value matches the
    projected primal witness, so optimality and complementary slackness
    are certified rather than assumed. Missing weights count as zero.
    """
    w = {e.eid: Fraction(weights.get(e.eid, ZERO)) for e in inst.edges}
    cov = double_cover(inst)
    res = max_weight_cover_matching(cov, w)
    y = {
        v: (res.y_left[v] + res.y_right[v]) / 2
        for v in inst.vertices
    }
    witness = cov.project(res.matched)
    objective = sum(y.values(), ZERO)
    tight = tuple(
        e.eid for e in inst.edges if y[e.u] + y[e.v] == w[e.eid]
    )
    critical = frozenset(v for v in inst.vertices if y[v] > 0)

    for e in inst.edges:  # dual feasibility
        if y[e.u] + y[e.v] < w[e.eid]:
            raise VerificationFailed(f"dual infeasible at {e.eid}")
    got = sum((w[eid] * val for eid, val in witness.items()), ZERO)
    if got != objective:
        raise VerificationFailed("witness weight differs from the dual objective")
    tight_set = set(tight)
    if any(eid not in tight_set for eid in witness):
        raise VerificationFailed("witness uses a slack edge")
    if any(not is_saturated(inst, witness, v) for v in critical):
        raise VerificationFailed("witness leaves a positive-potential vertex open")
    return DualSolution(
        y=y, objective=objective, tight_edges=tight, critical=critical,
        witness=witness,
    )


def solve_pop_crit(
    inst: Instance, critical: frozenset[str] | set[str]
) -> dict[str, Fraction]:
    """A critical half-matching popular among critical matchings.

    Fails with :class:`InfeasibleCritical` before running the pipeline
    when no fractional matching saturates the set.
    """
    inst.require_strict("solve_pop_crit")
    crit = frozenset(critical)
    unknown = crit - set(inst.vertices)
    if unknown:
        raise InstanceError(f"unknown critical vertex {sorted(unknown)[0]!r}")
    if not max_cardinality_saturating(double_cover(inst), crit):
        raise InfeasibleCritical(
            "no fractional matching saturates the critical set"
        )
    out = _run_pipeline(build_crit_reduction(inst, crit))
    open_crit = [v for v in sorted(crit) if not is_saturated(inst, out, v)]
    if open_crit:
        raise VerificationFailed(f"critical vertices left open: {open_crit}")
    return out


def restrict_to_edges(inst: Instance, keep: set[str] | frozenset[str]) -> Instance:
    """The sub-market on a subset of the edges (same vertices)."""
    kept = [e for e in inst.edges if e.eid in keep]
    pref = {
        v: {eid: inst.pval(v, eid) for eid in inst.incident(v) if eid in keep}
        for v in inst.vertices
    }
    weights = None
    if inst.weights is not None:
        weights = {eid: val for eid, val in inst.weights.items() if eid in keep}
    gamma = None
    if inst.gamma is not None:
        gamma = {k: v for k, v in inst.gamma.items() if k[0] in keep}
    return validate_instance(
        vertices=list(inst.vertices),
        edges=[(e.eid, e.u, e.v) for e in kept],
        pref=pref,
        pref_empty=dict(inst.pref_empty),
        weights=weights,
        gamma=gamma,
        critical=inst.critical,
    )


def solve_pop_maxw(
    inst: Instance, weights: Mapping[str, Fraction]
) -> dict[str, Fraction]:
    """A maximum-weight half-matching popular among maximum-weight ones.

    Solves the dual first, keeps only tight edges, marks every
    positive-potential vertex critical, and defers to the critical
    pipeline; the output's weight is checked against the dual objective
    exactly.
    """
    inst.require_strict("solve_pop_maxw")
    dual = max_weight_dual(inst, weights)
    reduced = restrict_to_edges(inst, set(dual.tight_edges))
    out = solve_pop_crit(reduced, dual.critical)
    got = sum(
        (Fraction(weights.get(eid, ZERO)) * val for eid, val in out.items()), ZERO
    )
    if got != dual.objective:
        raise VerificationFailed(
            f"output weight {got} differs from the optimum {dual.objective}"
        )
    return out
