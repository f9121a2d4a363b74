"""Independent reference computations used to cross-check the library.

Nothing here calls the simplex code: polytope questions are answered by
enumerating vertices with exact Gaussian elimination.
"""

from fractions import Fraction as Frac
from itertools import combinations


def solve_square(rows, rhs):
    """Unique solution of a square system, or None if singular."""
    n = len(rows)
    M = [list(map(Frac, r)) + [Frac(b)] for r, b in zip(rows, rhs)]
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return None
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [v / piv for v in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return [M[i][n] for i in range(n)]


def credal_vertices(table, n):
    """Vertices of {w ≥ 0, Σw = 1, Σ_{a∈V} w_a ≤ table[V] for all V}."""
    full = (1 << n) - 1
    ineq = [([1 if v >> a & 1 else 0 for a in range(n)], table[v]) for v in range(1, full)]
    ineq += [([-1 if a == i else 0 for a in range(n)], 0) for i in range(n)]
    eq = ([1] * n, 1)
    out = set()
    for tight in combinations(ineq, n - 1):
        rows = [eq[0]] + [r for r, _ in tight]
        rhs = [eq[1]] + [b for _, b in tight]
        w = solve_square(rows, rhs)
        if w is None:
            continue
        if all(sum(r[a] * w[a] for a in range(n)) <= b for r, b in ineq):
            out.add(tuple(w))
    return out


def is_upper_by_vertices(table, n):
    if table[0] != 0 or table[(1 << n) - 1] != 1:
        return False
    verts = credal_vertices(table, n)
    if not verts:
        return False
    for u in range(1, 1 << n):
        best = max(sum(w[a] for a in range(n) if u >> a & 1) for w in verts)
        if best != table[u]:
            return False
    return True


def mass_plausibility(focal, u):
    return sum((m for A, m in focal if A & u), Frac(0))


def mass_belief(focal, u):
    return sum((m for A, m in focal if A & ~u == 0), Frac(0))


def envelope_value(family_weights, u):
    return max(sum(w[a] for a in range(len(w)) if u >> a & 1) for w in family_weights)
