"""Exact two-phase simplex over the rationals with Bland's rule.

Rows are sparse dicts ``{column: coefficient}``.  Everything stays in
``Fraction`` so verdicts carry no rounding.
"""
from dataclasses import dataclass
from fractions import Fraction

ZERO = Fraction(0)


@dataclass
class LPResult:
    status: str            # "optimal", "infeasible" or "unbounded"
    x: list = None
    value: Fraction = None


class _Tableau:
    def __init__(self, rows, rhs, basis, ncols):
        self.rows, self.rhs, self.basis, self.ncols = rows, rhs, basis, ncols
        self.cost = {}
        self.value = ZERO

    def set_objective(self, c):
        """Reduced costs for maximising sum c_j x_j at the current basis."""
        cost = dict(c)
        value = ZERO
        for row, b, j in zip(self.rows, self.rhs, self.basis):
            cj = c.get(j, ZERO)
            if cj:
                value += cj * b
                for k, a in row.items():
                    cost[k] = cost.get(k, ZERO) - cj * a
        self.cost = {k: v for k, v in cost.items() if v}
        self.value = value

    def pivot(self, i, j):
        row = self.rows[i]
        p = row[j]
        if p != 1:
            row = {k: a / p for k, a in row.items()}
            self.rows[i] = row
            self.rhs[i] /= p
        b = self.rhs[i]
        for k, other in enumerate(self.rows):
            if k == i:
                continue
            f = other.get(j)
            if f:
                for col, a in row.items():
                    v = other.get(col, ZERO) - f * a
                    if v:
                        other[col] = v
                    else:
                        other.pop(col, None)
                self.rhs[k] -= f * b
        f = self.cost.get(j)
        if f:
            for col, a in row.items():
                v = self.cost.get(col, ZERO) - f * a
                if v:
                    self.cost[col] = v
                else:
                    self.cost.pop(col, None)
            self.value += f * b
        self.basis[i] = j

    def run(self, allowed):
        while True:
            entering = min((j for j, v in self.cost.items() if v > 0 and j in allowed), default=None)
            if entering is None:
                return "optimal"
            best, best_i = None, None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is not None and a > 0:
                    ratio = self.rhs[i] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[best_i]):
                        best, best_i = ratio, i
            if best_i is None:
                return "unbounded"
            self.pivot(best_i, entering)


def maximize(n_vars, objective, eq=(), ub=(), free=()):
    """Maximise ``objective`` subject to ``eq`` (row, rhs) equalities and
    ``ub`` (row, rhs) inequalities ``row . x <= rhs``.

    Variables are nonnegative unless listed in ``free``.
    """
    free = set(free)
    neg = {j: n_vars + k for k, j in enumerate(sorted(free))}
    ncols = n_vars + len(neg)

    def expand(row):
        out = {}
        for j, a in row.items():
            a = Fraction(a)
            if a:
                out[j] = a
                if j in neg:
                    out[neg[j]] = -a
        return out

    rows, rhs, basis, artificial = [], [], [], set()
    col = ncols
    for row, b in ub:
        r, b = expand(row), Fraction(b)
        r[col] = Fraction(1)
        slack = col
        col += 1
        if b < 0:
            r = {k: -a for k, a in r.items()}
            b = -b
            r[col] = Fraction(1)
            artificial.add(col)
            basis.append(col)
            col += 1
        else:
            basis.append(slack)
        rows.append(r)
        rhs.append(b)
    for row, b in eq:
        r, b = expand(row), Fraction(b)
        if b < 0:
            r = {k: -a for k, a in r.items()}
            b = -b
        r[col] = Fraction(1)
        artificial.add(col)
        basis.append(col)
        col += 1
        rows.append(r)
        rhs.append(b)

    tab = _Tableau(rows, rhs, basis, col)
    everything = set(range(col))
    if artificial:
        tab.set_objective({j: Fraction(-1) for j in artificial})
        tab.run(everything)
        if tab.value != 0:
            return LPResult("infeasible")
        for i in range(len(tab.rows) - 1, -1, -1):
            if tab.basis[i] in artificial:
                j = min((k for k in tab.rows[i] if k not in artificial), default=None)
                if j is None:
                    del tab.rows[i], tab.rhs[i], tab.basis[i]
                else:
                    tab.pivot(i, j)
        for row in tab.rows:
            for k in artificial:
                row.pop(k, None)
    c = {}
    for j, v in objective.items():
        v = Fraction(v)
        c[j] = v
        if j in neg:
            c[neg[j]] = -v
    tab.set_objective(c)
    status = tab.run(everything - artificial)
    if status != "optimal":
        return LPResult(status)
    values = [ZERO] * col
    for i, j in enumerate(tab.basis):
        values[j] = tab.rhs[i]
    x = [values[j] - (values[neg[j]] if j in neg else ZERO) for j in range(n_vars)]
    return LPResult("optimal", x, tab.value)
