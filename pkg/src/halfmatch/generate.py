"""Deterministic random market generation.

A fixed seed always produces the same instance, byte for byte, so
fixtures are portable. The sampling procedure is part of the contract:

1. vertices are ``v00 .. v{n-1:02d}``; when ``bipartite`` the even
   indices form one side and odd ones the other;
2. every unordered vertex pair (same-side pairs excluded when
   bipartite) independently becomes an edge with probability
   ``edge_density``, and each accepted pair gains one extra parallel
   edge per success of up to three ``parallel_prob`` trials;
3. each vertex draws a uniformly random permutation of its incident
   edges, and each position merges into the preceding tie class with
   probability ``tie_prob``; valuations are descending integers per
   class (worst class 1, unmatched 0);
4. weights, when requested, are uniform integers over ``weight_range``;
5. gamma presets derive thresholds from the minimum positive valuation
   gap g (1 on the canonical scale): ``min-like`` uses gamma=3g/2,
   delta=7g/4 (close thresholds), ``max-like`` gamma=g/2, delta=3g/2
   (any strict improvement meets gamma), ``generic`` draws gamma from
   {g/2, 3g/2} and delta = gamma + g per slot.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .core import Instance, validate_instance

GAMMA_PRESETS = ("none", "min-like", "max-like", "generic")


def generate_random(
    seed: int,
    n: int,
    edge_density: float = 0.5,
    parallel_prob: float = 0.0,
    tie_prob: float = 0.0,
    weight_range: tuple[int, int] | None = None,
    gamma_preset: str = "none",
    *,
    bipartite: bool = False,
    critical_count: int = 0,
) -> Instance:
    """Sample a market. Deterministic for a fixed argument tuple."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 0 <= edge_density <= 1 or not 0 <= parallel_prob <= 1 or not 0 <= tie_prob <= 1:
        raise ValueError("probabilities must lie in [0, 1]")
    if gamma_preset not in GAMMA_PRESETS:
        raise ValueError(f"gamma_preset must be one of {GAMMA_PRESETS}")
    if weight_range is not None and weight_range[0] > weight_range[1]:
        raise ValueError("empty weight range")
    if critical_count < 0 or critical_count > n:
        raise ValueError("critical_count out of range")

    rng = random.Random(f"halfmatch-{seed}")
    vertices = [f"v{i:02d}" for i in range(n)]

    edges: list[tuple[str, str, str]] = []
    serial = 0
    for i in range(n):
        for j in range(i + 1, n):
            if bipartite and i % 2 == j % 2:
                continue
            if rng.random() >= edge_density:
                continue
            copies = 1
            for _ in range(3):
                if rng.random() < parallel_prob:
                    copies += 1
            for _ in range(copies):
                edges.append((f"e{serial:03d}", vertices[i], vertices[j]))
                serial += 1

    incident: dict[str, list[str]] = {v: [] for v in vertices}
    for eid, u, v in edges:
        incident[u].append(eid)
        incident[v].append(eid)

    pref: dict[str, dict[str, Fraction]] = {}
    for v in vertices:
        order = sorted(incident[v])
        rng.shuffle(order)
        classes: list[list[str]] = []
        for eid in order:
            if classes and rng.random() < tie_prob:
                classes[-1].append(eid)
            else:
                classes.append([eid])
        vals: dict[str, Fraction] = {}
        for depth, group in enumerate(classes):
            for eid in group:
                vals[eid] = Fraction(len(classes) - depth)
        pref[v] = vals

    weights = None
    if weight_range is not None:
        lo, hi = weight_range
        weights = {eid: Fraction(rng.randint(lo, hi)) for eid, _, _ in edges}

    gamma = None
    if gamma_preset != "none":
        g = Fraction(1)  # minimum positive gap on the canonical scale
        gamma = {}
        for eid, u, v in edges:
            for x in (u, v):
                if gamma_preset == "min-like":
                    lo, hi = 3 * g / 2, 7 * g / 4
                elif gamma_preset == "max-like":
                    lo, hi = g / 2, 3 * g / 2
                else:
                    lo = rng.choice([g / 2, 3 * g / 2])
                    hi = lo + g
                gamma[(eid, x)] = (lo, hi)

    critical = None
    if critical_count:
        critical = sorted(rng.sample(vertices, critical_count))

    return validate_instance(
        vertices=vertices,
        edges=edges,
        pref=pref,
        weights=weights,
        gamma=gamma,
        critical=critical,
    )
