"""A small exact linear-program solver over rationals.

Two-phase primal simplex on a dense tableau with Bland's smallest-index
pivoting, which cannot cycle, so termination is guaranteed. Everything
is a Fraction; no tolerance appears anywhere. Intended for the desk
scale problems in this package (a few hundred variables), not for
serious LP work.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class Infeasible(ValueError):
    """The constraint system admits no nonnegative solution."""


class Unbounded(ValueError):
    """The objective is unbounded below on the feasible region."""


def solve_min(
    costs: list[Fraction],
    rows: list[list[Fraction]],
    rhs: list[Fraction],
) -> tuple[list[Fraction], Fraction]:
    """Minimize costs*x subject to rows*x = rhs, x >= 0.

    Returns (x, objective value) at an optimal basic solution.
    """
    m, n = len(rows), len(costs)
    if any(len(r) != n for r in rows) or len(rhs) != m:
        raise ValueError("inconsistent LP dimensions")

    tableau = []
    b = []
    for i in range(m):
        row = list(rows[i])
        bi = rhs[i]
        if bi < 0:
            row = [-x for x in row]
            bi = -bi
        art = [ZERO] * m
        art[i] = ONE
        tableau.append(row + art + [bi])
        b.append(bi)
    basis = list(range(n, n + m))
    width = n + m

    # phase 1: minimize the artificial mass
    phase1 = [ZERO] * n + [ONE] * m
    z = _objective_row(tableau, basis, phase1, width)
    _iterate(tableau, basis, z, width)
    if z[width] != 0:
        raise Infeasible("no feasible point")

    # pivot leftover artificials out of the basis where possible; any that
    # remain sit in redundant rows at value zero and are harmless
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if tableau[i][j] != 0), None)
            if col is not None:
                _pivot(tableau, basis, i, col, z, width)

    # phase 2 on the real objective, artificial columns frozen
    z = _objective_row(tableau, basis, list(costs) + [ZERO] * m, width)
    _iterate(tableau, basis, z, width, limit=n)

    x = [ZERO] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tableau[i][width]
    value = sum((costs[j] * x[j] for j in range(n)), ZERO)
    return x, value


def _objective_row(tableau, basis, costs, width):
    z = [ZERO] * (width + 1)
    for j in range(width + 1):
        z[j] = sum(
            (costs[basis[i]] * tableau[i][j] for i in range(len(tableau))), ZERO
        )
    for j in range(width):
        z[j] -= costs[j]
    return z


def _iterate(tableau, basis, z, width, limit=None):
    cols = width if limit is None else limit
    while True:
        enter = next((j for j in range(cols) if z[j] > 0), None)
        if enter is None:
            return
        best = None
        for i in range(len(tableau)):
            a = tableau[i][enter]
            if a > 0:
                ratio = tableau[i][width] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise Unbounded("objective unbounded below")
        _pivot(tableau, basis, best[1], enter, z, width)


def _pivot(tableau, basis, row, col, z, width):
    piv = tableau[row][col]
    tableau[row] = [x / piv for x in tableau[row]]
    for i in range(len(tableau)):
        if i != row and tableau[i][col] != 0:
            f = tableau[i][col]
            tableau[i] = [a - f * p for a, p in zip(tableau[i], tableau[row])]
    if z[col] != 0:
        f = z[col]
        for j in range(width + 1):
            z[j] -= f * tableau[row][j]
    basis[row] = col
