from fractions import Fraction

import pytest

from halfmatch.core import validate_instance

F = Fraction
H = Fraction(1, 2)


@pytest.fixture
def five_agent_market():
    """Bipartite 5-agent market: u1,u2,u3 versus w1,w2.

    u1 and u2 both rank w1 over w2, u3 only accepts w2, w1 ranks u1 over
    u2, and w2 ranks u1 over u2 over u3. The companion half-matching
    puts 1/2 on all four edges among {u1,u2} x {w1,w2}.
    """
    inst = validate_instance(
        vertices=["u1", "u2", "u3", "w1", "w2"],
        edges=[
            ("u1w1", "u1", "w1"),
            ("u1w2", "u1", "w2"),
            ("u2w1", "u2", "w1"),
            ("u2w2", "u2", "w2"),
            ("u3w2", "u3", "w2"),
        ],
        pref={
            "u1": {"u1w1": 2, "u1w2": 1},
            "u2": {"u2w1": 2, "u2w2": 1},
            "u3": {"u3w2": 1},
            "w1": {"u1w1": 2, "u2w1": 1},
            "w2": {"u1w2": 3, "u2w2": 2, "u3w2": 1},
        },
    )
    m = {"u1w1": H, "u1w2": H, "u2w1": H, "u2w2": H}
    rival = {"u1w1": F(1), "u2w2": H, "u3w2": H}
    return inst, m, rival


def make_triangle():
    """Odd-party triangle: a prefers b, b prefers c, c prefers a."""
    return validate_instance(
        vertices=["a", "b", "c"],
        edges=[("ab", "a", "b"), ("bc", "b", "c"), ("ca", "c", "a")],
        pref={
            "a": {"ab": 2, "ca": 1},
            "b": {"bc": 2, "ab": 1},
            "c": {"ca": 2, "bc": 1},
        },
    )


@pytest.fixture
def cyclic_triangle():
    return make_triangle()


@pytest.fixture
def single_edge():
    return validate_instance(
        vertices=["a", "b"],
        edges=[("e", "a", "b")],
        pref={"a": {"e": 1}, "b": {"e": 1}},
    )


def make_path(prefs_b_first="a"):
    """Path a-b-c where b prefers its `prefs_b_first` neighbour."""
    b_pref = {"ab": 2, "bc": 1} if prefs_b_first == "a" else {"ab": 1, "bc": 2}
    return validate_instance(
        vertices=["a", "b", "c"],
        edges=[("ab", "a", "b"), ("bc", "b", "c")],
        pref={"a": {"ab": 1}, "b": b_pref, "c": {"bc": 1}},
    )
