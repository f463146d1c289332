"""Exact rational linear programming, used by the polytope lab.

The simplex tableau keeps only the nonbasic columns:

    x_B(i) + Σ_j A[i][j]·x_N(j) = b[i]        z = z0 + Σ_j c[j]·x_N(j)   (maximized)

and pivots with Bland's smallest-index rule, which cannot cycle.
"""
import logging
from fractions import Fraction

logger = logging.getLogger(__name__)


class SimplexTableau:

    def __init__(self, A, b, c, nb_vars, b_vars, z=Fraction(0)):
        self.A = [[Fraction(x) for x in row] for row in A]
        self.b = [Fraction(x) for x in b]
        self.c = [Fraction(x) for x in c]
        self.nb_vars = list(nb_vars)
        self.b_vars = list(b_vars)
        self.z = Fraction(z)
        self.m = len(self.b)
        self.n = len(self.c)
        self.pivots = 0

    def pivot(self, i, j):
        row = self.A[i]
        piv = row[j]
        delta = self.c[j] / piv
        for l in range(self.n):
            self.c[l] -= delta * row[l]
        self.c[j] = -delta
        self.z += delta * self.b[i]

        new_row = [x / piv for x in row]
        new_row[j] = 1 / piv
        self.A[i] = new_row
        self.b[i] /= piv
        for k in range(self.m):
            if k == i:
                continue
            f = self.A[k][j]
            if f == 0:
                continue
            rk = self.A[k]
            for l in range(self.n):
                rk[l] -= f * new_row[l]
            rk[j] = -f / piv
            self.b[k] -= f * self.b[i]

        self.nb_vars[j], self.b_vars[i] = self.b_vars[i], self.nb_vars[j]
        self.pivots += 1

    def bland_step(self):
        entering = min(((self.nb_vars[j], j) for j in range(self.n) if self.c[j] > 0), default=None)
        if entering is None:
            return 'optimal'
        j = entering[1]
        leaving = min(((self.b[i] / self.A[i][j], self.b_vars[i], i)
                       for i in range(self.m) if self.A[i][j] > 0), default=None)
        if leaving is None:
            return 'unbounded'
        self.pivot(leaving[2], j)
        return 'go_on'

    def bland_primal(self):
        while True:
            status = self.bland_step()
            if status != 'go_on':
                return status

    def basic_values(self):
        return dict(zip(self.b_vars, self.b))


def _equality_rows(columns, target):
    """Rows of [columns | target] plus the Σλ = 1 row, with implied and repeated rows removed.

    Returns None when a row is visibly inconsistent.
    """
    k = len(columns)
    rows = []
    seen = set()
    for d, rhs in enumerate(target):
        coeffs = tuple(Fraction(col[d]) for col in columns)
        rhs = Fraction(rhs)
        if len(set(coeffs)) <= 1:
            # constant coordinate: implied by Σλ = 1, or impossible
            if coeffs and coeffs[0] != rhs:
                return None
            continue
        key = coeffs + (rhs,)
        if key not in seen:
            seen.add(key)
            rows.append((list(coeffs), rhs))
    rows.append(([Fraction(1)] * k, Fraction(1)))
    return rows


def feasible_convex_combination(columns, target):
    """Finds λ >= 0 with Σλ = 1 and Σ λ_k·columns[k] = target, or returns None.

    Phase-1 simplex with one artificial variable per equality row.
    """
    k = len(columns)
    if k == 0:
        return None
    rows = _equality_rows(columns, target)
    if rows is None:
        return None

    A, b = [], []
    for coeffs, rhs in rows:
        if rhs < 0:
            coeffs, rhs = [-x for x in coeffs], -rhs
        A.append(coeffs)
        b.append(rhs)
    m = len(b)
    c = [sum(A[i][j] for i in range(m)) for j in range(k)]
    tableau = SimplexTableau(A, b, c, nb_vars=range(k), b_vars=range(k, k + m), z=-sum(b))
    tableau.bland_primal()
    logger.debug(f"phase 1 on {m} rows x {k} columns: {tableau.pivots} pivots, z = {tableau.z}")

    if tableau.z != 0:
        return None
    values = tableau.basic_values()
    return [values.get(var, Fraction(0)) for var in range(k)]
