"""Exact rational linear programming over H-polyhedra.

Two-phase primal simplex with Bland's rule, run after an exact
Gaussian-elimination presolve of the equality rows.  Everything is done in
rational arithmetic so that zero objective values are certified, not
approximated: the max-front sweep hinges on distinguishing sup = 0 from
sup > 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .rationals import Q, ZERO, rat_str

INFEASIBLE = "infeasible"
BOUNDED = "bounded"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class HPolyhedron:
    """A polyhedron {x : eq_rows hold with =, ineq_rows hold with <=}."""

    variables: tuple[str, ...]
    eq_rows: tuple[tuple[tuple, object], ...]
    ineq_rows: tuple[tuple[tuple, object], ...]

    def __post_init__(self):
        n = len(self.variables)
        for coeffs, _ in self.eq_rows + self.ineq_rows:
            if len(coeffs) != n:
                raise ValueError("row width does not match variable count")

    @property
    def dim_ambient(self) -> int:
        return len(self.variables)

    def row_str(self, coeffs, rhs, rel="<=") -> str:
        parts = []
        for name, c in zip(self.variables, coeffs):
            if c == 0:
                continue
            parts.append(f"{rat_str(c)}*{name}")
        lhs = " + ".join(parts) if parts else "0"
        return f"{lhs} {rel} {rat_str(rhs)}"


def make_poly(variables, eq_rows=(), ineq_rows=()) -> HPolyhedron:
    """Build an HPolyhedron, coercing all entries to exact rationals."""
    def conv(rows):
        return tuple((tuple(Q(c) for c in coeffs), Q(rhs)) for coeffs, rhs in rows)
    return HPolyhedron(tuple(variables), conv(eq_rows), conv(ineq_rows))


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Optional[object] = None
    witness: Optional[tuple] = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


def _rref(rows, ncols):
    """In-place reduced row echelon form on rows of width ncols+1.

    Returns the pivot list [(row, col)]; rows beyond the pivots are left in
    place (all-zero coefficient parts).
    """
    pivots = []
    prow = 0
    for col in range(ncols):
        pr = None
        for k in range(prow, len(rows)):
            if rows[k][col] != 0:
                pr = k
                break
        if pr is None:
            continue
        rows[prow], rows[pr] = rows[pr], rows[prow]
        piv = rows[prow][col]
        if piv != 1:
            rows[prow] = [v / piv for v in rows[prow]]
        base = rows[prow]
        for k in range(len(rows)):
            if k != prow and rows[k][col] != 0:
                f = rows[k][col]
                rows[k] = [a - f * b for a, b in zip(rows[k], base)]
        pivots.append((prow, col))
        prow += 1
    return pivots


def _simplex(tab, rhs, basis, cost, ncols):
    """Maximize cost·x on the tableau; Bland's rule. Returns status string."""
    m = len(tab)
    while True:
        cb = [cost[basis[i]] for i in range(m)]
        enter = -1
        for j in range(ncols):
            red = cost[j]
            for i in range(m):
                cbi = cb[i]
                if cbi != 0:
                    tij = tab[i][j]
                    if tij != 0:
                        red -= cbi * tij
            if red > 0:
                enter = j
                break
        if enter < 0:
            return BOUNDED
        leave = -1
        best = None
        for i in range(m):
            tie = tab[i][enter]
            if tie > 0:
                ratio = rhs[i] / tie
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return UNBOUNDED
        piv = tab[leave][enter]
        if piv != 1:
            tab[leave] = [v / piv for v in tab[leave]]
            rhs[leave] = rhs[leave] / piv
        prow = tab[leave]
        prhs = rhs[leave]
        for i in range(m):
            if i != leave:
                f = tab[i][enter]
                if f != 0:
                    tab[i] = [a - f * b for a, b in zip(tab[i], prow)]
                    rhs[i] = rhs[i] - f * prhs
        basis[leave] = enter


def lp_optimize(poly: HPolyhedron, objective, sense: str = "max") -> LPResult:
    """Exact optimum of a linear objective over an H-polyhedron.

    Returns LPResult with status "bounded" (exact value and a witness point),
    "unbounded", or "infeasible".  Deterministic: Bland's pivot rule and a
    fixed presolve order.
    """
    n = len(poly.variables)
    obj = [Q(c) for c in objective]
    if len(obj) != n:
        raise ValueError("objective width mismatch")
    if sense == "min":
        obj = [-c for c in obj]
    elif sense != "max":
        raise ValueError("sense must be 'max' or 'min'")

    eqs = [[Q(c) for c in coeffs] + [Q(b)] for coeffs, b in poly.eq_rows]
    pivots = _rref(eqs, n)
    for k in range(len(pivots), len(eqs)):
        if eqs[k][n] != 0:
            return LPResult(INFEASIBLE)
    pivot_cols = {c for _, c in pivots}
    free_cols = [c for c in range(n) if c not in pivot_cols]

    def reduce_row(row):
        row = list(row)
        for r, c in pivots:
            f = row[c]
            if f != 0:
                row = [a - f * b for a, b in zip(row, eqs[r])]
        return row

    obj_red = reduce_row(obj + [ZERO])
    c_free = [obj_red[c] for c in free_cols]
    c0 = -obj_red[n]

    g_rows, h = [], []
    for coeffs, b in poly.ineq_rows:
        red = reduce_row([Q(c) for c in coeffs] + [Q(b)])
        gr = [red[c] for c in free_cols]
        if all(v == 0 for v in gr):
            if red[n] < 0:
                return LPResult(INFEASIBLE)
            continue
        g_rows.append(gr)
        h.append(red[n])

    def lift(y):
        x = [ZERO] * n
        for j, c in enumerate(free_cols):
            x[c] = y[j]
        for r, c in pivots:
            val = eqs[r][n]
            for j, fc in enumerate(free_cols):
                val -= eqs[r][fc] * y[j]
            x[c] = val
        return tuple(x)

    k = len(free_cols)
    if k == 0:
        value = c0
        if sense == "min":
            value = -value
        return LPResult(BOUNDED, value, lift([]))

    m = len(g_rows)
    nslack = m
    art_cols = []
    ncols = 2 * k + nslack
    tab, rhs, basis = [], [], []
    for i in range(m):
        row = g_rows[i] + [-v for v in g_rows[i]] + [ZERO] * nslack
        row[2 * k + i] = Q(1)
        b = h[i]
        if b < 0:
            row = [-v for v in row]
            b = -b
            art_cols.append(ncols + len(art_cols))
            basis.append(art_cols[-1])
        else:
            basis.append(2 * k + i)
        tab.append(row)
        rhs.append(b)

    if art_cols:
        total = ncols + len(art_cols)
        ai = 0
        for i in range(m):
            ext = [ZERO] * len(art_cols)
            if basis[i] >= ncols:
                ext[basis[i] - ncols] = Q(1)
                ai += 1
            tab[i] = tab[i] + ext
        cost1 = [ZERO] * ncols + [Q(-1)] * len(art_cols)
        _simplex(tab, rhs, basis, cost1, total)
        for i in range(m):
            if basis[i] >= ncols and rhs[i] != 0:
                return LPResult(INFEASIBLE)
        # drive residual artificials out of the basis, or drop their rows
        drop = []
        for i in range(m):
            if basis[i] >= ncols:
                enter = next((j for j in range(ncols) if tab[i][j] != 0), None)
                if enter is None:
                    drop.append(i)
                    continue
                piv = tab[i][enter]
                tab[i] = [v / piv for v in tab[i]]
                rhs[i] = rhs[i] / piv
                for l in range(m):
                    if l != i and tab[l][enter] != 0:
                        f = tab[l][enter]
                        tab[l] = [a - f * b for a, b in zip(tab[l], tab[i])]
                        rhs[l] = rhs[l] - f * rhs[i]
                basis[i] = enter
        for i in reversed(drop):
            del tab[i], rhs[i], basis[i]
        m = len(tab)
        tab = [row[:ncols] for row in tab]

    cost2 = c_free + [-v for v in c_free] + [ZERO] * nslack
    status = _simplex(tab, rhs, basis, cost2, ncols)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)

    y = [ZERO] * k
    for i in range(m):
        bv = basis[i]
        if bv < k:
            y[bv] += rhs[i]
        elif bv < 2 * k:
            y[bv - k] -= rhs[i]
    value = c0
    for j in range(k):
        value += c_free[j] * y[j]
    witness = lift(y)
    if sense == "min":
        value = -value
    return LPResult(BOUNDED, value, witness)


def lp_feasible(poly: HPolyhedron) -> Optional[tuple]:
    """A feasible point of the polyhedron, or None."""
    res = lp_optimize(poly, [ZERO] * len(poly.variables))
    return res.witness if res.feasible else None


def satisfies(poly: HPolyhedron, point) -> bool:
    """Exact membership test."""
    pt = [Q(v) for v in point]
    for coeffs, b in poly.eq_rows:
        if sum((c * v for c, v in zip(coeffs, pt)), ZERO) != b:
            return False
    for coeffs, b in poly.ineq_rows:
        if sum((c * v for c, v in zip(coeffs, pt)), ZERO) > b:
            return False
    return True
