"""Shared oracles for the property tests.

The brute-force front oracle enumerates every candidate front of a lex
system in standard form and checks the nonemptiness of its relative
interior with a margin LP, independently of the sweep algorithm.
"""

import random

from congestion.lexpoly import LexSF, front_polyhedron
from congestion.linprog import BOUNDED, HPolyhedron, lp_optimize
from congestion.rationals import Q, ZERO

import itertools


def piece_nonempty(sf: LexSF, front) -> bool:
    """Whether the lex piece with pattern `front` has a point.

    The piece fixes s^{<f} = 0 and requires s^{f} > 0 strictly (no
    requirement for exhausted groups); strictness is certified by
    maximizing a shared margin capped at 1.
    """
    from congestion.lexpoly import Front

    poly = front_polyhedron(sf, Front(tuple(front)))
    nvars = len(poly.variables)
    strict = []
    for gi, group in enumerate(sf.groups):
        fi = front[gi]
        if fi <= len(group):
            strict.append(group[fi - 1])
    variables = poly.variables + ("_t",)
    eq = [(c + (ZERO,), b) for c, b in poly.eq_rows]
    ineq = [(c + (ZERO,), b) for c, b in poly.ineq_rows]
    for idx in strict:
        row = [ZERO] * (nvars + 1)
        row[idx] = Q(-1)
        row[nvars] = Q(1)
        ineq.append((tuple(row), ZERO))
    cap = [ZERO] * nvars + [Q(1)]
    ineq.append((tuple(cap), Q(1)))
    aux = HPolyhedron(variables, tuple(eq), tuple(ineq))
    obj = [ZERO] * nvars + [Q(1)]
    res = lp_optimize(aux, obj)
    return res.status == BOUNDED and res.value > 0


def brute_force_front(sf: LexSF):
    """Componentwise minimum over the fronts of all nonempty lex pieces.

    The lex-polyhedron is the disjoint union of its pieces, so this is the
    greatest front whose polyhedron contains it; all-exhausted when the
    lex-polyhedron is empty.
    """
    depths = sf.depths
    best = None
    for front in itertools.product(*[range(1, d + 2) for d in depths]):
        if piece_nonempty(sf, front):
            if best is None:
                best = list(front)
            else:
                best = [min(a, b) for a, b in zip(best, front)]
    if best is None:
        best = [d + 1 for d in depths]
    return tuple(best)


def random_lexsf(rng: random.Random) -> LexSF:
    """A small random standard-form system with integer data."""
    nx = rng.randint(1, 4)
    m = rng.randint(1, 3)
    depths = [rng.randint(1, 2) for _ in range(m)]
    x_vars = tuple(f"x{i}" for i in range(nx))
    slack_names = []
    groups = []
    for gi, d in enumerate(depths):
        group = []
        for depth in range(d):
            group.append(nx + len(slack_names))
            slack_names.append(f"s{gi}_{depth}")
        groups.append(tuple(group))
    total = nx + len(slack_names)
    nrows = rng.randint(1, total)
    rows = []
    for _ in range(nrows):
        coeffs = tuple(Q(rng.randint(-2, 2)) for _ in range(total))
        rows.append((coeffs, Q(rng.randint(-3, 3))))
    return LexSF(x_vars, tuple(slack_names), tuple(groups), tuple(rows))


def random_stochastic_matrix(rng: random.Random, n: int):
    """Row-stochastic rational matrix with a few zero entries."""
    P = []
    for _ in range(n):
        weights = [rng.randint(0, 4) for _ in range(n)]
        if sum(weights) == 0:
            weights[rng.randrange(n)] = 1
        s = sum(weights)
        P.append([Q(w, s) for w in weights])
    return P
