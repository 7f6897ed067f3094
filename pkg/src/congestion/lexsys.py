"""Stationary lexicographic systems for a fixed policy.

For a policy sigma, an affine regime z(t) = u + rho*t is stationary exactly
when, for every counter i, the chosen action attains the min and every
alternative dominates it for large t.  Substituting the affine form into an
action a yields the pair ([P^a]_i rho, r_i^a + [P^a]_i u - [Pbar^a]_i rho),
and "dominates for large t" is the lexicographic order on (slope, offset).
The resulting system has equalities for the chosen actions, lex-inequalities
for the alternatives, and rho >= 0 sign constraints.

Left limits add a third comparison level.  A left-limit term reads the
counter just before time t, i.e. at t - eps for an infinitesimal eps > 0,
so an action's value is offset + slope*t - eps * (left-limit row . rho).
A chosen action must match z_i(t) exactly, which forces its left-limit row
to annihilate rho (an extra equality); an alternative is compared on the
triple (slope, offset, eps coefficient), giving a depth-3 lex-inequality
whenever the action has left-limit terms.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lexpoly import LexSF
from .model import PWLDynamics, ResourceForm
from .rationals import Q, ZERO

RHO_TAG = "rho_nonneg"


@dataclass(frozen=True)
class Policy:
    choice: tuple[int, ...]

    def validate(self, dyn: PWLDynamics):
        if len(self.choice) != dyn.n:
            raise ValueError("policy length does not match counter count")
        for i, c in enumerate(self.choice):
            if not 0 <= c < len(dyn.actions[i]):
                raise ValueError(f"policy index {c} out of range for counter {i}")

    def __str__(self):
        return ",".join(str(c) for c in self.choice)


@dataclass(frozen=True)
class PolicyMatrices:
    """P = sum_tau P_tau, Pbar = sum_tau tau*P_tau for the chosen actions.

    g holds the chosen actions' exogenous rates (usually zero except for
    arrival counters), so that the slope equations read rho = g + P rho.
    L collects the left-limit coefficient rows; each nonzero row yields the
    stationarity equality [L]_i rho = 0.
    """

    P: tuple[tuple, ...]
    Pbar: tuple[tuple, ...]
    r: tuple[ResourceForm, ...]
    g: tuple[ResourceForm, ...]
    L: tuple[tuple, ...]


def _action_rows(dyn: PWLDynamics, i: int, a: int):
    """Coefficient rows of action a of counter i.

    Returns (P^a_i, Pbar^a_i, left_row, resource, rate).  Left-limit terms
    enter P at delay 0 and contribute 0 to Pbar; their coefficients are
    collected separately in left_row for the infinitesimal comparison level.
    """
    p_row = [ZERO] * dyn.n
    pbar_row = [ZERO] * dyn.n
    left_row = [ZERO] * dyn.n
    action = dyn.actions[i][a]
    for t in action.terms:
        p_row[t.counter_index] += t.coefficient
        pbar_row[t.counter_index] += Q(t.delay) * t.coefficient
        if t.left_limit:
            left_row[t.counter_index] += t.coefficient
    return p_row, pbar_row, left_row, action.resource, action.rate


def policy_matrices(dyn: PWLDynamics, sigma: Policy) -> PolicyMatrices:
    sigma.validate(dyn)
    P, Pbar, r, g, L = [], [], [], [], []
    for i in range(dyn.n):
        p_row, pbar_row, left_row, resource, rate = \
            _action_rows(dyn, i, sigma.choice[i])
        P.append(tuple(p_row))
        Pbar.append(tuple(pbar_row))
        r.append(resource)
        g.append(rate)
        L.append(tuple(left_row))
    return PolicyMatrices(tuple(P), tuple(Pbar), tuple(r), tuple(g), tuple(L))


@dataclass(frozen=True)
class LexInequality:
    """Rows (coeffs . x <= rhs) compared lexicographically, first row most
    significant."""

    rows: tuple[tuple[tuple, object], ...]
    tag: str = ""


@dataclass(frozen=True)
class LexSystem:
    variables: tuple[str, ...]
    equalities: tuple[tuple[tuple, object], ...]
    lex_inequalities: tuple[LexInequality, ...]

    def __post_init__(self):
        n = len(self.variables)
        for coeffs, _ in self.equalities:
            assert len(coeffs) == n
        for li in self.lex_inequalities:
            assert li.rows
            for coeffs, _ in li.rows:
                assert len(coeffs) == n


def build_stationary_system(dyn: PWLDynamics, sigma: Policy) -> LexSystem:
    """The stationary system for policy sigma over (rho, u, resource params).

    Equalities: rho_i = [P]_i rho, u_i = r_i + [P]_i u - [Pbar]_i rho, and
    left_row . rho = 0 for chosen actions with left-limit terms.  For each
    non-chosen action a: (rho_i, u_i, 0) <=lex the (slope, offset, eps)
    triple of action a, a depth-3 inequality when a has left-limit terms
    and depth-2 otherwise.  Sign constraints rho_i >= 0 appear as depth-1
    lex-inequalities.
    """
    sigma.validate(dyn)
    n = dyn.n
    params = dyn.resource_parameters
    variables = tuple(f"rho_{c}" for c in dyn.counter_names) + \
        tuple(f"u_{c}" for c in dyn.counter_names) + tuple(params)
    nv = len(variables)
    pidx = {p: 2 * n + j for j, p in enumerate(params)}

    def pair_rows(i, a):
        """Rows expressing (slope, offset, left) of action a of counter i,
        as coefficient vectors over (rho, u, params) and rational
        constants."""
        p_row, pbar_row, left_row, resource, rate = _action_rows(dyn, i, a)
        slope = [ZERO] * nv
        offset = [ZERO] * nv
        left = [ZERO] * nv
        for j in range(n):
            slope[j] = p_row[j]
            offset[n + j] = p_row[j]
            offset[j] = -pbar_row[j]
            left[j] = left_row[j]
        for pname, c in rate.coefficients:
            slope[pidx[pname]] += c
        for pname, c in resource.coefficients:
            offset[pidx[pname]] += c
        return slope, rate.constant, offset, resource.constant, left

    equalities = []
    lex = []
    for i in range(n):
        slope, sconst, offset, oconst, left = pair_rows(i, sigma.choice[i])
        eq1 = [-c for c in slope]
        eq1[i] += Q(1)
        equalities.append((tuple(eq1), sconst))
        eq2 = [-c for c in offset]
        eq2[n + i] += Q(1)
        equalities.append((tuple(eq2), oconst))
        if any(c != 0 for c in left):
            equalities.append((tuple(left), ZERO))
        for a in range(len(dyn.actions[i])):
            if a == sigma.choice[i]:
                continue
            aslope, asconst, aoffset, aoconst, aleft = pair_rows(i, a)
            row1 = [-c for c in aslope]
            row1[i] += Q(1)
            row2 = [-c for c in aoffset]
            row2[n + i] += Q(1)
            rows = [(tuple(row1), asconst), (tuple(row2), aoconst)]
            if any(c != 0 for c in aleft):
                # eps coefficient of the alternative is -aleft . rho; the
                # chosen side has none, so the third level reads
                # aleft . rho <= 0.
                rows.append((tuple(aleft), ZERO))
            lex.append(LexInequality(tuple(rows), tag=f"alt:{i}:{a}"))
    for i in range(n):
        row = [ZERO] * nv
        row[i] = Q(-1)
        lex.append(LexInequality(((tuple(row), ZERO),), tag=f"{RHO_TAG}:{i}"))
    return LexSystem(variables, tuple(equalities), tuple(lex))


def standardize(sys: LexSystem) -> LexSF:
    """Introduce one slack per lex-inequality row.

    Hard equalities stay as equality rows; each lex-inequality row
    coeffs . x <= rhs becomes coeffs . x + s = rhs with its group
    constrained lex-nonnegative.
    """
    x_vars = sys.variables
    nx = len(x_vars)
    slack_names = []
    groups = []
    tags = []
    for gi, li in enumerate(sys.lex_inequalities):
        group = []
        for depth in range(len(li.rows)):
            group.append(nx + len(slack_names))
            slack_names.append(f"s_{gi + 1}_{depth + 1}")
        groups.append(tuple(group))
        tags.append(li.tag)
    total = nx + len(slack_names)

    eq_rows = [(tuple(coeffs) + (ZERO,) * len(slack_names), rhs)
               for coeffs, rhs in sys.equalities]
    for gi, li in enumerate(sys.lex_inequalities):
        for depth, (coeffs, rhs) in enumerate(li.rows):
            row = list(coeffs) + [ZERO] * len(slack_names)
            row[groups[gi][depth]] = Q(1)
            eq_rows.append((tuple(row), rhs))
    assert all(len(r) == total for r, _ in eq_rows)
    return LexSF(x_vars, tuple(slack_names), tuple(groups), tuple(eq_rows),
                 group_tags=tuple(tags))


def rho_group_index(sf: LexSF, counter: int) -> int:
    """Index of the slack group realizing rho_counter >= 0."""
    tag = f"{RHO_TAG}:{counter}"
    for gi, t in enumerate(sf.group_tags):
        if t == tag:
            return gi
    raise KeyError(tag)
