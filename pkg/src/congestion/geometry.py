"""Ordinary-polyhedron services: projection, dimension, equality, vertices.

Projection uses exact Gaussian elimination on the equality rows followed by
Fourier-Motzkin on the remaining variables, with LP-certified redundancy
pruning after each elimination step so intermediate systems stay small.
"""

from __future__ import annotations

import itertools
from math import gcd

from .linprog import (BOUNDED, INFEASIBLE, UNBOUNDED, HPolyhedron,
                      lp_optimize, make_poly)
from .rationals import Q, ZERO


class UnboundedError(Exception):
    pass


def _normalize_ineq(coeffs, rhs):
    """Scale an inequality row to primitive integer coefficients (sign kept)."""
    denom = 1
    for c in list(coeffs) + [rhs]:
        denom = denom * c.denominator // gcd(denom, int(c.denominator))
    ints = [int(c * denom) for c in coeffs]
    g = 0
    for v in ints + [int(rhs * denom)]:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
        rhs = Q(int(rhs * denom) // g)
    else:
        rhs = Q(int(rhs * denom))
    return tuple(Q(v) for v in ints), rhs


def _normalize_eq(coeffs, rhs):
    coeffs, rhs = _normalize_ineq(coeffs, rhs)
    lead = next((c for c in coeffs if c != 0), rhs)
    if lead < 0:
        coeffs = tuple(-c for c in coeffs)
        rhs = -rhs
    return coeffs, rhs


def canonical_rows(poly: HPolyhedron):
    """Sorted primitive-integer row lists; a cheap dedup/snapshot key."""
    eqs = sorted(_normalize_eq(c, b) for c, b in poly.eq_rows)
    ineqs = sorted(_normalize_ineq(c, b) for c, b in poly.ineq_rows)
    return tuple(eqs), tuple(ineqs)


def _empty(variables) -> HPolyhedron:
    n = len(variables)
    return make_poly(variables, [], [([ZERO] * n, Q(-1))])


def is_empty(poly: HPolyhedron) -> bool:
    return lp_optimize(poly, [ZERO] * len(poly.variables)).status == INFEASIBLE


def _prune_redundant(variables, eqs, ineqs):
    """Drop duplicate and LP-redundant inequality rows (deterministic)."""
    seen = {}
    for coeffs, rhs in ineqs:
        key, nrhs = _normalize_ineq(coeffs, rhs)
        if key not in seen or nrhs < seen[key]:
            seen[key] = nrhs
    rows = sorted(seen.items())
    kept = list(rows)
    i = 0
    while i < len(kept):
        coeffs, rhs = kept[i]
        others = kept[:i] + kept[i + 1:]
        poly = HPolyhedron(tuple(variables), tuple(eqs), tuple(others))
        res = lp_optimize(poly, coeffs)
        if res.status == BOUNDED and res.value <= rhs:
            kept.pop(i)
        else:
            i += 1
    return kept


def project(poly: HPolyhedron, keep) -> HPolyhedron:
    """Image of the polyhedron under coordinate projection onto `keep`.

    Equality rows are used first to eliminate dropped variables exactly;
    Fourier-Motzkin handles whatever remains, pruning redundant rows after
    each eliminated variable.
    """
    keep = list(keep)
    var_index = {v: i for i, v in enumerate(poly.variables)}
    for v in keep:
        if v not in var_index:
            raise KeyError(v)
    keep_idx = [var_index[v] for v in keep]
    keep_set = set(keep_idx)

    eqs = [[Q(c) for c in coeffs] + [Q(b)] for coeffs, b in poly.eq_rows]
    ineqs = [[Q(c) for c in coeffs] + [Q(b)] for coeffs, b in poly.ineq_rows]
    n = len(poly.variables)

    # Gaussian elimination of dropped variables through equality rows.
    used = []
    while True:
        target = None
        for ri, row in enumerate(eqs):
            for col in range(n):
                if col not in keep_set and row[col] != 0:
                    target = (ri, col)
                    break
            if target:
                break
        if target is None:
            break
        ri, col = target
        base = eqs.pop(ri)
        piv = base[col]
        base = [v / piv for v in base]
        for rows in (eqs, ineqs):
            for k, row in enumerate(rows):
                if row[col] != 0:
                    f = row[col]
                    rows[k] = [a - f * b for a, b in zip(row, base)]
        used.append(col)

    for row in eqs:
        if all(row[c] == 0 for c in range(n)) and row[n] != 0:
            return _empty(keep)

    # Fourier-Motzkin on dropped variables still present in inequalities.
    remaining = sorted({c for row in ineqs for c in range(n)
                        if c not in keep_set and row[c] != 0})
    for col in list(remaining):
        pos = [r for r in ineqs if r[col] > 0]
        neg = [r for r in ineqs if r[col] < 0]
        rest = [r for r in ineqs if r[col] == 0]
        new_rows = rest
        for rp in pos:
            for rn in neg:
                # rp: a x + p*col <= b (p>0); rn: c x + q*col <= d (q<0)
                comb = [rp[i] * (-rn[col]) + rn[i] * rp[col] for i in range(n + 1)]
                comb[col] = ZERO
                if all(comb[i] == 0 for i in range(n)):
                    if comb[n] < 0:
                        return _empty(keep)
                    continue
                new_rows.append(comb)
        pruned = _prune_redundant(
            poly.variables,
            [(tuple(r[:n]), r[n]) for r in eqs],
            [(tuple(r[:n]), r[n]) for r in new_rows])
        ineqs = [list(c) + [b] for c, b in pruned]

    out_eqs = []
    for row in eqs:
        coeffs = tuple(row[i] for i in keep_idx)
        if all(c == 0 for c in coeffs):
            if row[n] != 0:
                return _empty(keep)
            continue
        out_eqs.append(_normalize_eq(coeffs, row[n]))
    out_ineqs = []
    for row in ineqs:
        coeffs = tuple(row[i] for i in keep_idx)
        if all(c == 0 for c in coeffs):
            if row[n] < 0:
                return _empty(keep)
            continue
        out_ineqs.append((coeffs, row[n]))
    out_ineqs = _prune_redundant(keep, out_eqs, out_ineqs)
    return HPolyhedron(tuple(keep), tuple(sorted(set(out_eqs))), tuple(out_ineqs))


def affine_hull_dimension(poly: HPolyhedron):
    """Implicit-equality inequality rows and the polyhedron's dimension.

    Dimension is -1 for an empty polyhedron; otherwise ambient dimension
    minus the rank of the combined (explicit + implicit) equality system.
    """
    n = len(poly.variables)
    if is_empty(poly):
        return [], -1
    implicit = []
    for idx, (coeffs, rhs) in enumerate(poly.ineq_rows):
        res = lp_optimize(poly, coeffs, sense="min")
        if res.status == BOUNDED and res.value == rhs:
            implicit.append(idx)
    eq_rows = [list(c) for c, _ in poly.eq_rows]
    eq_rows += [list(poly.ineq_rows[i][0]) for i in implicit]
    from .linalg import rank
    r = rank(eq_rows) if eq_rows else 0
    return implicit, n - r


def poly_equal(p: HPolyhedron, q: HPolyhedron) -> bool:
    """Set equality of two H-polyhedra over the same variables."""
    if p.variables != q.variables:
        raise ValueError("polyhedra over different variable sets")
    if canonical_rows(p) == canonical_rows(q):
        return True
    pe, qe = is_empty(p), is_empty(q)
    if pe or qe:
        return pe and qe
    return _contains(p, q) and _contains(q, p)


def _contains(outer: HPolyhedron, inner: HPolyhedron) -> bool:
    """Whether every constraint of `outer` is valid over `inner`."""
    for coeffs, rhs in outer.ineq_rows:
        res = lp_optimize(inner, coeffs)
        if res.status == UNBOUNDED or (res.status == BOUNDED and res.value > rhs):
            return False
    for coeffs, rhs in outer.eq_rows:
        for sense, bound in (("max", rhs), ("min", rhs)):
            res = lp_optimize(inner, coeffs, sense=sense)
            if res.status == UNBOUNDED or (res.status == BOUNDED and res.value != bound):
                return False
    return True


def vertices(poly: HPolyhedron):
    """All vertices of a bounded polyhedron, sorted, exact.

    Raises UnboundedError when some coordinate is unbounded over the
    polyhedron (nontrivial recession cone).
    """
    n = len(poly.variables)
    if is_empty(poly):
        return []
    for j in range(n):
        obj = [ZERO] * n
        obj[j] = Q(1)
        for sense in ("max", "min"):
            if lp_optimize(poly, obj, sense=sense).status == UNBOUNDED:
                raise UnboundedError(poly.variables[j])

    from .linalg import rref
    eq = [list(c) + [b] for c, b in poly.eq_rows]
    rows, pivots = rref(eq) if eq else ([], [])
    base_rank = len(pivots)
    need = n - base_rank
    found = set()
    candidates = list(poly.ineq_rows)
    for combo in itertools.combinations(range(len(candidates)), need):
        system = [list(r) for r in rows[:base_rank]]
        system += [list(candidates[i][0]) + [candidates[i][1]] for i in combo]
        solved, piv = rref(system)
        if len(piv) != n or any(c >= n for c in piv):
            continue
        point = tuple(solved[i][n] for i in range(n))
        if point in found:
            continue
        ok = all(sum((c * v for c, v in zip(coeffs, point)), ZERO) <= rhs
                 for coeffs, rhs in poly.ineq_rows)
        if ok:
            found.add(point)
    return sorted(found)


def intersect(poly: HPolyhedron, eq_rows=(), ineq_rows=()) -> HPolyhedron:
    return HPolyhedron(
        poly.variables,
        poly.eq_rows + tuple((tuple(Q(c) for c in cs), Q(b)) for cs, b in eq_rows),
        poly.ineq_rows + tuple((tuple(Q(c) for c in cs), Q(b)) for cs, b in ineq_rows))


def boxed_section(poly: HPolyhedron, normalize: str, box: object) -> HPolyhedron:
    """Intersect with {normalize = 1} and 0 <= v <= box for other variables."""
    n = len(poly.variables)
    idx = poly.variables.index(normalize)
    unit = [ZERO] * n
    unit[idx] = Q(1)
    eq = [(tuple(unit), Q(1))]
    ineq = []
    for j in range(n):
        if j == idx:
            continue
        lo = [ZERO] * n
        lo[j] = Q(-1)
        hi = [ZERO] * n
        hi[j] = Q(1)
        ineq.append((tuple(lo), ZERO))
        ineq.append((tuple(hi), Q(box)))
    return intersect(poly, eq, ineq)


def relint_point_poly(poly: HPolyhedron, strict_rows=None):
    """A point satisfying the given inequality rows strictly (all by default).

    Returns None if no such point exists.  Strictness is certified by
    maximizing a margin variable capped at 1.
    """
    n = len(poly.variables)
    if strict_rows is None:
        strict_rows = range(len(poly.ineq_rows))
    variables = poly.variables + ("_margin",)
    eq = [(c + (ZERO,), b) for c, b in poly.eq_rows]
    ineq = []
    strict = set(strict_rows)
    for idx, (coeffs, rhs) in enumerate(poly.ineq_rows):
        pad = Q(1) if idx in strict else ZERO
        ineq.append((coeffs + (pad,), rhs))
    cap = [ZERO] * n + [Q(1)]
    ineq.append((tuple(cap), Q(1)))
    aux = HPolyhedron(variables, tuple(eq), tuple(ineq))
    obj = [ZERO] * n + [Q(1)]
    res = lp_optimize(aux, obj)
    if res.status != BOUNDED or res.value <= 0:
        return None
    return res.witness[:n]


def contains_point(poly: HPolyhedron, point) -> bool:
    """Whether the point satisfies every row of the polyhedron."""
    for coeffs, rhs in poly.eq_rows:
        if sum(c * x for c, x in zip(coeffs, point)) != rhs:
            return False
    for coeffs, rhs in poly.ineq_rows:
        if sum(c * x for c, x in zip(coeffs, point)) > rhs:
            return False
    return True
