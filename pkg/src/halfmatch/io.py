"""Instance and result files.

Both formats are canonical JSON (sorted keys, two-space indent, trailing
newline) so identical inputs produce byte-identical files; no floats
ever appear, rationals travel as "p/q" strings ("3", "1/2").

An instance file stores preferences *ordinally*: per vertex, a list of
tie groups of edge ids, best group first. Parsing assigns canonical
valuations (descending integers per group, worst group 1), and gamma or
delta entries are read on that same scale. Serializing an instance
reconstructs the groups from its valuations, so parse and serialize are
mutually inverse on canonical files.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any, Mapping

from .core import (
    Instance,
    InstanceError,
    ZERO,
    blocking_edges,
    check_matching,
    is_saturated,
    matching_stats,
    validate_instance,
)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceError(f"malformed rational {text!r}") from exc


def _canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# instance files


def serialize_instance(inst: Instance) -> str:
    edges = []
    for e in inst.edges:
        record: dict[str, Any] = {"id": e.eid, "u": e.u, "v": e.v}
        if inst.weights is not None and e.eid in inst.weights:
            record["weight"] = format_rational(inst.weights[e.eid])
        edges.append(record)
    doc: dict[str, Any] = {
        "vertices": list(inst.vertices),
        "edges": edges,
        "prefs": {v: inst.tie_classes(v) for v in inst.vertices},
    }
    if inst.gamma:
        block: dict[str, dict[str, dict[str, str]]] = {}
        for (eid, v), (gam, delta) in sorted(inst.gamma.items()):
            block.setdefault(eid, {})[v] = {
                "gamma": format_rational(gam),
                "delta": format_rational(delta),
            }
        doc["gamma"] = block
    if inst.critical:
        doc["critical"] = sorted(inst.critical)
    return _canonical_json(doc)


def _located(text: str, token: str, message: str) -> InstanceError:
    """Attach the 1-based line of the offending token when findable."""
    pos = text.find(json.dumps(token))
    if pos >= 0:
        return InstanceError(f"line {text.count(chr(10), 0, pos) + 1}: {message}")
    return InstanceError(message)


def parse_instance_text(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: {exc}") from exc
    for key in ("vertices", "edges", "prefs"):
        if key not in doc:
            raise InstanceError(f"instance file lacks the {key!r} section")

    edges = []
    weights: dict[str, Fraction] = {}
    for record in doc["edges"]:
        try:
            edges.append((record["id"], record["u"], record["v"]))
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"malformed edge record {record!r}") from exc
        if "weight" in record:
            weights[record["id"]] = parse_rational(record["weight"])
    known = {eid for eid, _, _ in edges}

    pref: dict[str, dict[str, Fraction]] = {}
    for v, groups in doc["prefs"].items():
        vals: dict[str, Fraction] = {}
        for depth, group in enumerate(groups):
            if not isinstance(group, list):
                raise InstanceError(
                    f"preference list of {v!r} must contain tie groups (lists)"
                )
            for eid in group:
                if eid not in known:
                    raise _located(
                        text, eid,
                        f"preference list of {v!r} mentions unknown edge {eid!r}",
                    )
                if eid in vals:
                    raise _located(
                        text, eid,
                        f"preference list of {v!r} mentions edge {eid!r} twice",
                    )
                vals[eid] = Fraction(len(groups) - depth)
        pref[v] = vals

    gamma = None
    if "gamma" in doc:
        gamma = {}
        for eid, sides in doc["gamma"].items():
            for v, pair in sides.items():
                gamma[(eid, v)] = (
                    parse_rational(pair["gamma"]),
                    parse_rational(pair["delta"]),
                )
    return validate_instance(
        vertices=doc["vertices"],
        edges=edges,
        pref=pref,
        weights=weights or None,
        gamma=gamma,
        critical=doc.get("critical"),
    )


def load_instance(path: str) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance_text(fh.read())


def save_instance(inst: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(inst))


def instance_digest(inst: Instance) -> str:
    return hashlib.sha256(serialize_instance(inst).encode()).hexdigest()


# ---------------------------------------------------------------------------
# matchings and result files


def format_matching(m: Mapping[str, Fraction]) -> dict[str, str]:
    return {eid: format_rational(val) for eid, val in sorted(m.items()) if val != 0}


def parse_matching(doc: Mapping[str, str]) -> dict[str, Fraction]:
    return {eid: parse_rational(text) for eid, text in doc.items()}


def build_result(
    solver: str,
    inst: Instance,
    matching: Mapping[str, Fraction],
    verification: Mapping[str, Any],
    seed: int | None = None,
) -> dict[str, Any]:
    stats = matching_stats(inst, matching)
    return {
        "solver": solver,
        "instance_digest": instance_digest(inst),
        "seed": seed,
        "matching": format_matching(matching),
        "stats": {
            "size": format_rational(stats.size),
            "saturated": list(stats.saturated),
            "unsaturated": list(stats.unsaturated),
            "integral": stats.integral,
            "critical_ok": stats.critical_ok,
        },
        "verification": dict(verification),
    }


def serialize_result(result: Mapping[str, Any]) -> str:
    return _canonical_json(result)


def load_result(path: str) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"result file is not valid JSON: {exc}") from exc


def save_result(result: Mapping[str, Any], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_result(result))


def check_result(inst: Instance, result: Mapping[str, Any]) -> list[str]:
    """Re-derive everything a result file claims; returns the failures.

    A clean re-verification returns an empty list. The matching is
    re-validated, the digest, stats and the per-solver verification
    summary are recomputed from scratch and compared field by field.
    """
    problems: list[str] = []
    digest = instance_digest(inst)
    if result.get("instance_digest") != digest:
        problems.append("instance digest mismatch")
    try:
        m = parse_matching(result.get("matching", {}))
    except InstanceError as exc:
        return problems + [str(exc)]
    try:
        check_matching(inst, m, half=True)
    except Exception as exc:
        problems.append(f"matching invalid: {exc}")
        return problems

    stats = matching_stats(inst, m)
    recorded = result.get("stats", {})
    expect = {
        "size": format_rational(stats.size),
        "saturated": list(stats.saturated),
        "unsaturated": list(stats.unsaturated),
        "integral": stats.integral,
        "critical_ok": stats.critical_ok,
    }
    for key, val in expect.items():
        if recorded.get(key) != val:
            problems.append(f"stats field {key!r} does not re-derive")

    ver = result.get("verification", {})
    mode = ver.get("mode")
    if mode in ("weak", "gamma"):
        bad = blocking_edges(inst, m, mode)
        if bad != ver.get("blocking_edges"):
            problems.append("recorded blocking edges do not re-derive")
        if bool(ver.get("stable")) != (not bad):
            problems.append("stability flag does not re-derive")
        if bad:
            problems.append(f"matching is blocked by {bad}")
    if "critical" in ver:
        crit = ver["critical"]
        open_crit = [v for v in crit if not is_saturated(inst, m, v)]
        if open_crit:
            problems.append(f"critical vertices left open: {open_crit}")
    if "weight" in ver:
        if ver.get("weights_source") == "unit":
            w: Mapping[str, Fraction] = {e.eid: Fraction(1) for e in inst.edges}
        else:
            w = inst.weights or {}
        got = sum((w.get(eid, ZERO) * val for eid, val in m.items()), ZERO)
        if format_rational(got) != ver["weight"]:
            problems.append("recorded weight does not re-derive")
    return problems
