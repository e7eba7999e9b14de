import json
from fractions import Fraction

import pytest

from halfmatch.cli import main
from halfmatch.core import ONE, InstanceError
from halfmatch.generate import generate_random
from halfmatch.io import (
    build_result,
    check_result,
    format_rational,
    instance_digest,
    load_instance,
    load_result,
    parse_instance_text,
    parse_rational,
    save_instance,
    serialize_instance,
    serialize_result,
)

F = Fraction


def test_rational_strings():
    assert format_rational(F(3)) == "3"
    assert format_rational(F(1, 2)) == "1/2"
    assert parse_rational("7/3") == F(7, 3)
    assert parse_rational("4") == 4
    with pytest.raises(InstanceError):
        parse_rational("1/0")
    with pytest.raises(InstanceError):
        parse_rational("nope")


def test_instance_roundtrip_bytes(five_agent_market, tmp_path):
    inst, _, _ = five_agent_market
    text = serialize_instance(inst)
    again = parse_instance_text(text)
    assert serialize_instance(again) == text
    path = tmp_path / "inst.json"
    save_instance(inst, str(path))
    assert serialize_instance(load_instance(str(path))) == text
    assert instance_digest(again) == instance_digest(inst)


def test_instance_roundtrip_with_everything():
    inst = generate_random(
        5, 6, edge_density=0.7, parallel_prob=0.3, tie_prob=0.4,
        weight_range=(0, 4), gamma_preset="generic", critical_count=2,
    )
    text = serialize_instance(inst)
    again = parse_instance_text(text)
    assert serialize_instance(again) == text
    assert again.critical == inst.critical
    assert again.gamma == inst.gamma
    assert again.weights == inst.weights


def test_parse_rejects_unknown_edge_in_prefs_with_line():
    doc = {
        "vertices": ["a", "b"],
        "edges": [{"id": "e", "u": "a", "v": "b"}],
        "prefs": {"a": [["e"]], "b": [["ghost"]]},
    }
    text = json.dumps(doc, sort_keys=True, indent=2)
    expected_line = next(
        i for i, row in enumerate(text.splitlines(), 1) if "ghost" in row
    )
    with pytest.raises(
        InstanceError, match=f"line {expected_line}: .*unknown edge 'ghost'"
    ):
        parse_instance_text(text)


def test_parse_accepts_third_fraction_in_matching(five_agent_market):
    assert parse_rational("1/3") == F(1, 3)


def test_check_result_detects_tampering(five_agent_market):
    inst, _, _ = five_agent_market
    m = {"u1w1": ONE, "u2w2": ONE}
    result = build_result(
        "solve-max-srti", inst, m,
        {"mode": "weak", "blocking_edges": [], "stable": True},
    )
    assert check_result(inst, result) == []
    tampered = json.loads(serialize_result(result))
    tampered["matching"]["u3w2"] = "1"
    problems = check_result(inst, tampered)
    assert any("blocking" in p or "invalid" in p or "stats" in p for p in problems)


# -- CLI ----------------------------------------------------------------------


def write_fixture_instance(path, five_agent_market):
    inst, _, _ = five_agent_market
    save_instance(inst, str(path))
    return inst


def test_cli_generate_and_solve_roundtrip(tmp_path):
    inst_path = tmp_path / "inst.json"
    out_path = tmp_path / "result.json"
    assert main(["generate", "--seed", "3", "--n", "7", "--tie-prob", "0.4",
                 "--parallel-prob", "0.2", "--output", str(inst_path)]) == 0
    assert main(["solve-max-srti", "--input", str(inst_path),
                 "--output", str(out_path)]) == 0
    result = load_result(str(out_path))
    assert result["solver"] == "solve-max-srti"
    assert result["verification"]["stable"] is True
    assert main(["verify", "--input", str(inst_path), "--result", str(out_path)]) == 0


def test_cli_byte_determinism(tmp_path):
    inst_path = tmp_path / "inst.json"
    main(["generate", "--seed", "11", "--n", "8", "--tie-prob", "0.5",
          "--output", str(inst_path)])
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["solve-max-srti", "--input", str(inst_path),
                     "--output", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()

    ca, cb = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (ca, cb):
        assert main(["bench", "--seeds", "6", "--n", "6", "--oracle-bound", "7",
                     "--output", str(out)]) == 0
    assert ca.read_bytes() == cb.read_bytes()


def test_cli_verify_rejects_tampered_result(tmp_path, five_agent_market, capsys):
    inst_path = tmp_path / "inst.json"
    out_path = tmp_path / "result.json"
    write_fixture_instance(inst_path, five_agent_market)
    assert main(["solve-max-srti", "--input", str(inst_path),
                 "--output", str(out_path)]) == 0
    good = json.loads(out_path.read_text())

    # overloading a vertex makes the matching invalid outright
    doc = json.loads(json.dumps(good))
    doc["matching"]["u3w2"] = "1"
    out_path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    assert main(["verify", "--input", str(inst_path), "--result", str(out_path)]) == 1
    assert "verification failure" in capsys.readouterr().err

    # dropping an edge keeps the matching valid but leaves a blocking edge,
    # which the verifier names
    doc = json.loads(json.dumps(good))
    removed = sorted(doc["matching"])[-1]
    del doc["matching"][removed]
    out_path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    assert main(["verify", "--input", str(inst_path), "--result", str(out_path)]) == 1
    assert "blocked by" in capsys.readouterr().err


def test_cli_gamma_and_pri(tmp_path):
    inst_path = tmp_path / "inst.json"
    main(["generate", "--seed", "4", "--n", "6", "--gamma-preset", "min-like",
          "--tie-prob", "0.3", "--output", str(inst_path)])
    out_path = tmp_path / "g.json"
    assert main(["solve-gamma", "--input", str(inst_path),
                 "--output", str(out_path)]) == 0
    result = load_result(str(out_path))
    assert result["verification"]["mode"] == "gamma"
    assert result["verification"]["stable"] is True

    strict_path = tmp_path / "strict.json"
    main(["generate", "--seed", "5", "--n", "6", "--output", str(strict_path)])
    pri_path = tmp_path / "p.json"
    assert main(["solve-max-pri", "--input", str(strict_path),
                 "--output", str(pri_path), "--oracle-bound", "8"]) == 0
    result = load_result(str(pri_path))
    if "popular" in result["verification"]:
        assert result["verification"]["popular"] is True
    assert main(["verify", "--input", str(strict_path), "--result", str(pri_path),
                 "--oracle-bound", "8"]) == 0


def test_cli_pop_crit_and_maxw(tmp_path, five_agent_market, capsys):
    inst_path = tmp_path / "inst.json"
    write_fixture_instance(inst_path, five_agent_market)
    out_path = tmp_path / "c.json"
    assert main(["solve-pop-crit", "--input", str(inst_path),
                 "--critical", "w1,w2", "--output", str(out_path)]) == 0
    result = load_result(str(out_path))
    assert result["verification"]["critical"] == ["w1", "w2"]
    assert set(result["stats"]["saturated"]) >= {"w1", "w2"}

    # an unsatisfiable critical set fails cleanly before solving
    code = main(["solve-pop-crit", "--input", str(inst_path),
                 "--critical", "u1,u2,u3", "--output", str(tmp_path / "x.json")])
    assert code == 2
    assert "no fractional matching saturates" in capsys.readouterr().err

    w_path = tmp_path / "w.json"
    assert main(["solve-pop-maxw", "--input", str(inst_path),
                 "--weights", "unit", "--output", str(w_path)]) == 0
    result = load_result(str(w_path))
    assert result["verification"]["weight"] == result["verification"]["dual_objective"]
    assert main(["verify", "--input", str(inst_path), "--result", str(w_path)]) == 0


def test_cli_bench_ratio_column(tmp_path):
    csv_path = tmp_path / "bench.csv"
    assert main(["bench", "--seeds", "12", "--n", "6", "--oracle-bound", "8",
                 "--tie-prob", "0.5", "--output", str(csv_path)]) == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "seed,n,edges,mode,size,oracle,ratio"
    assert len(lines) == 13
    for line in lines[1:]:
        seed, n, edges, mode, size, oracle, ratio = line.split(",")
        assert mode == "weak"
        if ratio:
            assert parse_rational(ratio) <= F(3, 2)


def test_cli_input_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve-max-srti", "--input", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["solve-max-srti", "--input", str(tmp_path / "missing.json")]) == 2
