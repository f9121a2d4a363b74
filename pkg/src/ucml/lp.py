"""Exact rational linear programming.

Two-phase tableau simplex over ``fractions.Fraction`` with Bland's rule, so
pivoting is deterministic and cannot cycle.  Problems are tiny (one variable
per atom), so the dense tableau is adequate.

    maximize   c·x
    subject to A_ub x ≤ b_ub,  A_eq x = b_eq,  x ≥ 0
"""

from dataclasses import dataclass
from fractions import Fraction as Frac

from .errors import UnboundedError


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" or "infeasible"
    value: Frac = None
    x: tuple = None
    # Farkas multipliers (y_ub, y_eq) when infeasible: y_ub ≥ 0,
    # y·A ≥ 0 columnwise and y·b < 0.
    certificate: tuple = None

    @property
    def feasible(self):
        return self.status == "optimal"


def _pivot(T, r, c):
    row = T[r]
    inv = 1 / row[c]
    if inv != 1:
        T[r] = row = [v * inv for v in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                T[i] = [a - f * b for a, b in zip(other, row)]


def _simplex(T, basis, obj, allowed):
    """Maximize obj over the tableau in place; returns False if unbounded."""
    ncols = len(T[0]) - 1
    while True:
        cb = [obj[b] for b in basis]
        enter = None
        for j in range(ncols):
            if not allowed[j]:
                continue
            r = obj[j] - sum((cb[i] * T[i][j] for i in range(len(T)) if T[i][j]), Frac(0))
            if r > 0:
                enter = j
                break
        if enter is None:
            return True
        leave, best = None, None
        for i, row in enumerate(T):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            return False
        _pivot(T, leave, enter)
        basis[leave] = enter


def solve_lp(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()):
    """Maximize ``c·x`` exactly.  Raises UnboundedError if the optimum is infinite."""
    c = [Frac(v) for v in c]
    n = len(c)
    A_ub = [[Frac(v) for v in row] for row in A_ub]
    A_eq = [[Frac(v) for v in row] for row in A_eq]
    b_ub = [Frac(v) for v in b_ub]
    b_eq = [Frac(v) for v in b_eq]
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq
    nslack = m_ub
    ncols = n + nslack + m
    T, signs = [], []
    for i, row in enumerate(A_ub + A_eq):
        rhs = b_ub[i] if i < m_ub else b_eq[i - m_ub]
        full = row + [Frac(0)] * (nslack + m) + [rhs]
        if i < m_ub:
            full[n + i] = Frac(1)
        s = -1 if rhs < 0 else 1
        if s < 0:
            full = [-v for v in full]
        full[n + nslack + i] = Frac(1)
        T.append(full)
        signs.append(s)
    basis = [n + nslack + i for i in range(m)]

    # Phase I: maximize -(sum of artificials)
    obj1 = [Frac(0)] * (n + nslack) + [Frac(-1)] * m
    _simplex(T, basis, obj1, [True] * ncols)
    phase1 = sum((obj1[b] * T[i][-1] for i, b in enumerate(basis)), Frac(0))
    if phase1 < 0:
        # y = c_B B^{-1}; B^{-1} sits in the artificial columns
        y = [sum((obj1[b] * T[i][n + nslack + k] for i, b in enumerate(basis)), Frac(0)) for k in range(m)]
        u = [yk * s for yk, s in zip(y, signs)]
        return LPResult("infeasible", certificate=(tuple(u[:m_ub]), tuple(u[m_ub:])))

    # drive zero-level artificials out of the basis; drop redundant rows
    art = n + nslack
    i = 0
    while i < len(T):
        if basis[i] >= art:
            j = next((j for j in range(art) if T[i][j] != 0), None)
            if j is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, i, j)
            basis[i] = j
        i += 1

    obj2 = c + [Frac(0)] * (nslack + m)
    allowed = [j < art for j in range(ncols)]
    if not _simplex(T, basis, obj2, allowed):
        raise UnboundedError("objective is unbounded")
    x = [Frac(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Frac(0))
    return LPResult("optimal", value, tuple(x))


def check_certificate(cert, A_ub, b_ub, A_eq, b_eq):
    """True iff ``cert`` proves infeasibility of the constraint system (Farkas)."""
    y_ub, y_eq = cert
    if any(v < 0 for v in y_ub):
        return False
    rows = list(A_ub) + list(A_eq)
    y = list(y_ub) + list(y_eq)
    b = list(b_ub) + list(b_eq)
    ncol = len(rows[0]) if rows else 0
    for j in range(ncol):
        if sum((Frac(yi) * Frac(r[j]) for yi, r in zip(y, rows)), Frac(0)) < 0:
            return False
    return sum((Frac(yi) * Frac(bi) for yi, bi in zip(y, b)), Frac(0)) < 0
