"""Lexicographic polyhedra in standard form and the max-front sweep.

A lex-polyhedron is given by equalities A(x,s) = b together with slack
groups (s_i^1, ..., s_i^{d_i}) constrained to be lexicographically
nonnegative.  The max-front sweep computes the greatest front f* such that
the lex-polyhedron is contained in the front polyhedron P^f; P^{f*} is the
closure of the lex-polyhedron, and the lex-polyhedron is empty exactly when
P^{f*} is.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .linprog import (BOUNDED, INFEASIBLE, UNBOUNDED, HPolyhedron, LPResult,
                      lp_optimize, make_poly)
from .rationals import Q, ZERO

__all__ = [
    "HPolyhedron", "LPResult", "lp_optimize", "LexSF", "Front",
    "front_polyhedron", "compute_max_front", "compute_max_front_run",
    "lex_is_empty", "lex_closure", "relint_point", "MaxFrontRun", "Closure",
]


@dataclass(frozen=True)
class LexSF:
    """Standard form: equalities over (x, s) plus lex-nonnegative slack groups.

    variables = x_vars followed by all slack names; groups hold variable
    indices of each slack group, in depth order.  group_tags optionally
    label the origin of each group (e.g. which counter's rho >= 0 it encodes).
    """

    x_vars: tuple[str, ...]
    slack_vars: tuple[str, ...]
    groups: tuple[tuple[int, ...], ...]
    eq_rows: tuple[tuple[tuple, object], ...]
    group_tags: tuple[str, ...] = ()

    def __post_init__(self):
        seen = set()
        for g in self.groups:
            for idx in g:
                if idx in seen:
                    raise ValueError("slack appears in two groups")
                seen.add(idx)
        if len(seen) != len(self.slack_vars):
            raise ValueError("group indices do not cover the slacks")

    @property
    def variables(self) -> tuple[str, ...]:
        return self.x_vars + self.slack_vars

    @property
    def m(self) -> int:
        return len(self.groups)

    @property
    def depths(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.groups)

    @property
    def total_depth(self) -> int:
        return sum(self.depths)


@dataclass(frozen=True)
class Front:
    """Per-group depth marker; f_i ranges over {1, ..., d_i + 1}."""

    f: tuple[int, ...]

    def __iter__(self):
        return iter(self.f)

    def __getitem__(self, i):
        return self.f[i]


def _unit_objective(nvars: int, idx: int):
    obj = [ZERO] * nvars
    obj[idx] = Q(1)
    return obj


def front_polyhedron(sf: LexSF, front: Front) -> HPolyhedron:
    """The polyhedron P^f: equalities, s^{<f} = 0, s^f >= 0."""
    nvars = len(sf.variables)
    eq = list(sf.eq_rows)
    ineq = []
    for gi, group in enumerate(sf.groups):
        fi = front[gi]
        for depth, var_idx in enumerate(group, start=1):
            if depth < fi:
                coeffs = [ZERO] * nvars
                coeffs[var_idx] = Q(1)
                eq.append((tuple(coeffs), ZERO))
            elif depth == fi:
                coeffs = [ZERO] * nvars
                coeffs[var_idx] = Q(-1)
                ineq.append((tuple(coeffs), ZERO))
    return HPolyhedron(sf.variables, tuple(eq), tuple(ineq))


@dataclass
class MaxFrontRun:
    front: Front
    trace: list[Front] = field(default_factory=list)
    lp_calls: int = 0


def compute_max_front_run(sf: LexSF) -> MaxFrontRun:
    """Max-front sweep with its front trace and LP-call count.

    Starting from the all-ones front, each sweep collects the groups whose
    active slack has supremum <= 0 over P^f (an empty P^f counts as -inf,
    an unbounded supremum counts as positive) and advances them together.
    """
    depths = sf.depths
    front = Front(tuple(1 for _ in depths))
    run = MaxFrontRun(front, [front])
    nvars = len(sf.variables)
    while True:
        poly = front_polyhedron(sf, front)
        advance = []
        for gi, group in enumerate(sf.groups):
            fi = front[gi]
            if fi > depths[gi]:
                continue
            res = lp_optimize(poly, _unit_objective(nvars, group[fi - 1]))
            run.lp_calls += 1
            if res.status == INFEASIBLE or (res.status == BOUNDED and res.value <= 0):
                advance.append(gi)
        if not advance:
            break
        f = list(front.f)
        for gi in advance:
            f[gi] += 1
        front = Front(tuple(f))
        run.trace.append(front)
    run.front = front
    return run


def compute_max_front(sf: LexSF) -> Front:
    return compute_max_front_run(sf).front


def lex_is_empty(sf: LexSF, front: Optional[Front] = None) -> bool:
    """The lex-polyhedron is empty iff its max-front polyhedron is."""
    if front is None:
        front = compute_max_front(sf)
    poly = front_polyhedron(sf, front)
    res = lp_optimize(poly, [ZERO] * len(sf.variables))
    return res.status == INFEASIBLE


@dataclass(frozen=True)
class Closure:
    """Closure P^{f*} plus the relative-interior description.

    The relative interior is obtained from the closure by turning the
    s^{f*} >= 0 rows strict; strict_slack_indices lists those slack
    variable indices.
    """

    polyhedron: HPolyhedron
    front: Front
    zero_slack_indices: tuple[int, ...]
    strict_slack_indices: tuple[int, ...]


def lex_closure(sf: LexSF) -> Closure:
    front = compute_max_front(sf)
    zero, strict = [], []
    for gi, group in enumerate(sf.groups):
        fi = front[gi]
        zero.extend(group[: fi - 1])
        if fi <= len(group):
            strict.append(group[fi - 1])
    return Closure(front_polyhedron(sf, front), front, tuple(zero), tuple(strict))


def relint_point(sf: LexSF) -> Optional[tuple]:
    """A rational point in the relative interior of the lex-polyhedron.

    Maximizes an auxiliary variable t bounded by 1 and by every strict
    slack of the closure description; a positive optimum certifies a point
    with s^{f*} > 0, which lies in the lex-polyhedron itself.  Returns None
    when the lex-polyhedron is empty.
    """
    closure = lex_closure(sf)
    poly = closure.polyhedron
    nvars = len(poly.variables)
    variables = poly.variables + ("_t",)
    eq = [(coeffs + (ZERO,), rhs) for coeffs, rhs in poly.eq_rows]
    ineq = [(coeffs + (ZERO,), rhs) for coeffs, rhs in poly.ineq_rows]
    for idx in closure.strict_slack_indices:
        coeffs = [ZERO] * (nvars + 1)
        coeffs[idx] = Q(-1)
        coeffs[nvars] = Q(1)
        ineq.append((tuple(coeffs), ZERO))
    tcap = [ZERO] * (nvars + 1)
    tcap[nvars] = Q(1)
    ineq.append((tuple(tcap), Q(1)))
    aux = HPolyhedron(variables, tuple(eq), tuple(ineq))
    obj = [ZERO] * (nvars + 1)
    obj[nvars] = Q(1)
    res = lp_optimize(aux, obj)
    if res.status != BOUNDED or res.value <= 0:
        return None
    return res.witness[:nvars]
