"""Dense exact-rational matrix helpers (kernels, inverses, rank)."""

from __future__ import annotations

from .rationals import Q, ZERO


def identity(n):
    return [[Q(1) if i == j else ZERO for j in range(n)] for i in range(n)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_mul(a, b):
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), ZERO) for col in bt] for row in a]


def mat_vec(a, v):
    return [sum((x * y for x, y in zip(row, v)), ZERO) for row in a]


def transpose(a):
    return [list(row) for row in zip(*a)]


def rref(a):
    """Reduced row echelon form (copy); returns (rows, pivot_columns)."""
    rows = [[Q(v) for v in row] for row in a]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    pr = 0
    for col in range(ncols):
        k = next((i for i in range(pr, len(rows)) if rows[i][col] != 0), None)
        if k is None:
            continue
        rows[pr], rows[k] = rows[k], rows[pr]
        piv = rows[pr][col]
        if piv != 1:
            rows[pr] = [v / piv for v in rows[pr]]
        for i in range(len(rows)):
            if i != pr and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[pr])]
        pivots.append(col)
        pr += 1
    return rows, pivots


def rank(a) -> int:
    if not a:
        return 0
    return len(rref(a)[1])


def kernel_basis(a):
    """Basis of {x : a x = 0}, one vector per free column (list of lists)."""
    if not a:
        return []
    ncols = len(a[0])
    rows, pivots = rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [ZERO] * ncols
        vec[fc] = Q(1)
        for pr, pc in enumerate(pivots):
            vec[pc] = -rows[pr][fc]
        basis.append(vec)
    return basis


def inverse(a):
    """Exact inverse, or None when singular."""
    n = len(a)
    aug = [[Q(v) for v in row] + [Q(1) if i == j else ZERO for j in range(n)]
           for i, row in enumerate(a)]
    rows, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in rows[:n]]


def solve(a, b):
    """Solution of a x = b (a square nonsingular), or None."""
    inv = inverse(a)
    if inv is None:
        return None
    return mat_vec(inv, b)
