"""Throughput of a policy from the eigenstructure of its matrix P.

The throughput vector rho of a stationary regime satisfies rho = P rho, so
it lives in the eigenspace of eigenvalue 1.  When that eigenvalue is
semisimple, pairing biorthogonal left/right eigenbases against the delay
matrix Pbar reduces the offset equations to a q x q aggregated system whose
solution pins rho down uniquely as a linear map of the resource parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import linalg
from .lexsys import Policy, PolicyMatrices, policy_matrices
from .model import PWLDynamics, ResourceForm
from .rationals import Q, ZERO, rat_str


@dataclass(frozen=True)
class NotEigenvalueOne:
    """1 is not an eigenvalue of P: rho = 0 is the only fixed point."""


@dataclass(frozen=True)
class NotSemisimple:
    """Eigenvalue 1 has a nontrivial Jordan block."""


@dataclass(frozen=True)
class DegenerateAggregate:
    """The aggregated matrix Mbar is singular at these delay values."""


@dataclass(frozen=True)
class DriftInconsistent:
    """rho = g + P rho has no solution for generic parameter values."""


@dataclass(frozen=True)
class EigenStructure:
    q: int
    V: tuple[tuple, ...]  # n x q, right eigenvectors as columns
    M: tuple[tuple, ...]  # q x n, left eigenvectors, M V = I


def eigen_structure(P) -> Union[EigenStructure, NotEigenvalueOne, NotSemisimple]:
    """Biorthogonal eigenbases of eigenvalue 1, or a typed failure."""
    n = len(P)
    A = linalg.mat_sub(linalg.identity(n), [list(r) for r in P])
    k1 = linalg.kernel_basis(A)
    if not k1:
        return NotEigenvalueOne()
    k2 = linalg.kernel_basis(linalg.mat_mul(A, A))
    if len(k1) != len(k2):
        return NotSemisimple()
    q = len(k1)
    V = [[k1[j][i] for j in range(q)] for i in range(n)]
    mhat = linalg.kernel_basis(linalg.transpose(A))  # rows span left kernel
    W = linalg.mat_mul(mhat, V)
    Winv = linalg.inverse(W)
    assert Winv is not None, "semisimple eigenvalue must give invertible pairing"
    M = linalg.mat_mul(Winv, mhat)
    return EigenStructure(q, tuple(tuple(r) for r in V), tuple(tuple(r) for r in M))


@dataclass(frozen=True)
class ThroughputMap:
    """rho = T . params + affine constant part."""

    parameters: tuple[str, ...]
    T: tuple[tuple, ...]        # n x len(parameters)
    constant: tuple             # length n

    def apply(self, values) -> tuple:
        vec = [Q(values[p]) for p in self.parameters]
        return tuple(c + sum((t * v for t, v in zip(row, vec)), ZERO)
                     for row, c in zip(self.T, self.constant))

    def row_str(self, i: int) -> str:
        parts = []
        for p, c in zip(self.parameters, self.T[i]):
            if c != 0:
                parts.append(f"{rat_str(c)}*{p}")
        if self.constant[i] != 0 or not parts:
            parts.append(rat_str(self.constant[i]))
        return " + ".join(parts)


def _forms_matrix(forms, parameters):
    """Stack resource forms as an n x (p+1) matrix (param columns + constant)."""
    return [[f.coefficient(p) for p in parameters] + [f.constant] for f in forms]


def _solve_particular(A, G):
    """One solution X of A X = G (free variables set to 0), or None."""
    n = len(A)
    width = len(G[0])
    aug = [list(row) + list(grow) for row, grow in zip(A, G)]
    red, pivots = linalg.rref(aug)
    if any(pc >= n for pc in pivots):
        return None
    X = [[ZERO] * width for _ in range(n)]
    for pr, pc in enumerate(pivots):
        X[pc] = red[pr][n:]
    return X


def _solve_square_exact(A, B):
    """Solve A lam = B for a unique lam, with B a matrix of form rows.

    A may have more rows than columns.  Returns ("unique", lam),
    ("under",) when the solution is not unique, or ("inconsistent",).
    """
    q = len(A[0]) if A else 0
    aug = [list(arow) + list(brow) for arow, brow in zip(A, B)]
    red, pivots = linalg.rref(aug)
    if any(pc >= q for pc in pivots):
        return ("inconsistent",)
    if len(pivots) < q:
        return ("under",)
    lam = [None] * q
    for pr, pc in enumerate(pivots):
        lam[pc] = red[pr][q:]
    return ("unique", lam)


def throughput_map(mats: PolicyMatrices, parameters) -> Union[
        ThroughputMap, NotSemisimple, DegenerateAggregate, DriftInconsistent]:
    """Unique stationary throughput as an affine map of the parameters.

    Solves rho = g + P rho by a particular solution plus a kernel part.
    The kernel coordinates come from pairing the offset equations against
    the left eigenbasis (the q x q aggregated system); when that system is
    singular, the left-limit equalities [L]_i rho = 0 supply the missing
    directions.
    """
    parameters = tuple(parameters)
    n = len(mats.P)
    A = linalg.mat_sub(linalg.identity(n), [list(r) for r in mats.P])
    G = _forms_matrix(mats.g, parameters)
    R = _forms_matrix(mats.r, parameters)

    es = eigen_structure(mats.P)
    if isinstance(es, NotSemisimple):
        return es
    if isinstance(es, NotEigenvalueOne):
        full = _solve_particular(A, G)
        if full is None:
            return DriftInconsistent()
    else:
        X = _solve_particular(A, G)
        if X is None:
            return DriftInconsistent()
        V = [list(r) for r in es.V]
        M = [list(r) for r in es.M]
        Pbar = [list(r) for r in mats.Pbar]
        Mbar = linalg.mat_mul(linalg.mat_mul(M, Pbar), V)
        rhs = linalg.mat_mul(M, linalg.mat_sub(R, linalg.mat_mul(Pbar, X)))
        Minv = linalg.inverse(Mbar)
        if Minv is not None:
            lam = linalg.mat_mul(Minv, rhs)            # q x (p+1)
        else:
            # On cells where the aggregate alone leaves rho underdetermined,
            # the left-limit equalities hold identically and close the gap.
            rows = [list(r) for r in Mbar]
            brows = [list(r) for r in rhs]
            width = len(parameters) + 1
            for lrow in mats.L:
                if all(c == 0 for c in lrow):
                    continue
                rows.append([sum((lrow[i] * V[i][k] for i in range(n)), ZERO)
                             for k in range(es.q)])
                lx = [sum((lrow[i] * X[i][c] for i in range(n)), ZERO)
                      for c in range(width)]
                brows.append([-v for v in lx])
            outcome = _solve_square_exact(rows, brows)
            if outcome[0] in ("inconsistent", "under"):
                return DegenerateAggregate()
            lam = outcome[1]                           # q x (p+1)
        full = [[x + v for x, v in zip(xrow, vrow)]
                for xrow, vrow in zip(X, linalg.mat_mul(V, lam))]
    T = tuple(tuple(row[:-1]) for row in full)
    const = tuple(row[-1] for row in full)
    return ThroughputMap(parameters, T, const)


def policy_throughput(dyn: PWLDynamics, sigma: Policy):
    return throughput_map(policy_matrices(dyn, sigma), dyn.resource_parameters)


@dataclass(frozen=True)
class AssumptionReport:
    semisimple: bool
    spectrum_at_0_ok: bool
    alpha_interval_ok: bool
    aggregate_invertible: bool
    notes: tuple[str, ...] = ()

    @property
    def all_ok(self) -> bool:
        return (self.semisimple and self.spectrum_at_0_ok
                and self.alpha_interval_ok and self.aggregate_invertible)


def _delay_slices(dyn: PWLDynamics, sigma: Policy):
    """Per-delay coefficient matrices P_tau of the chosen actions."""
    n = dyn.n
    slices: dict[int, list[list]] = {}
    for i in range(n):
        act = dyn.actions[i][sigma.choice[i]]
        for t in act.terms:
            mat = slices.setdefault(t.delay, [[ZERO] * n for _ in range(n)])
            mat[i][t.counter_index] += t.coefficient
    return slices


def check_existence_assumptions(dyn: PWLDynamics, sigma: Policy) -> AssumptionReport:
    """Exact checks backing the existence of an invariant half-line.

    (a) P(0) (the delay-0 slice) has no real eigenvalue in [1, oo);
    (b) det(I - P(alpha)) != 0 for alpha in [0, 1), where P(alpha) =
        sum_tau P_tau alpha^tau, decided by exact polynomial root isolation;
    (c) I + C_{-1} S is invertible, with C_{-1} = V M the spectral projector
        and S = sum (tau - 1) P_tau.
    """
    import sympy

    sigma.validate(dyn)
    n = dyn.n
    slices = _delay_slices(dyn, sigma)
    notes = []

    p0 = slices.get(0, [[ZERO] * n for _ in range(n)])
    x = sympy.Symbol("x")
    m0 = sympy.Matrix(n, n, lambda i, j: sympy.Rational(str(p0[i][j])))
    charpoly = m0.charpoly(x).as_expr()
    poly = sympy.Poly(charpoly, x)
    # count real roots in [1, oo)
    bad = poly.count_roots(1, None)
    spectrum_ok = bad == 0
    if not spectrum_ok:
        notes.append("P(0) has a real eigenvalue >= 1")

    alpha = sympy.Symbol("alpha")
    pa = sympy.zeros(n, n)
    for tau, mat in slices.items():
        for i in range(n):
            for j in range(n):
                if mat[i][j] != 0:
                    pa[i, j] += sympy.Rational(str(mat[i][j])) * alpha ** tau
    det = (sympy.eye(n) - pa).det()
    detpoly = sympy.Poly(sympy.expand(det), alpha)
    if detpoly.is_zero:
        alpha_ok = False
        notes.append("det(I - P(alpha)) vanishes identically")
    else:
        # count_roots is inclusive on both ends; the interval is [0, 1)
        in_closed = detpoly.count_roots(0, 1)
        if detpoly.eval(0) == 0:
            alpha_ok = False
        else:
            if detpoly.eval(1) == 0:
                in_closed -= 1
            alpha_ok = in_closed == 0
        if not alpha_ok:
            notes.append("det(I - P(alpha)) has a root in [0, 1)")

    mats = policy_matrices(dyn, sigma)
    es = eigen_structure(mats.P)
    semisimple = not isinstance(es, NotSemisimple)
    aggregate_ok = False
    if isinstance(es, EigenStructure):
        V = [list(r) for r in es.V]
        M = [list(r) for r in es.M]
        proj = linalg.mat_mul(V, M)  # spectral projector C_{-1}
        S = [[ZERO] * n for _ in range(n)]
        for tau, mat in slices.items():
            f = Q(tau - 1)
            for i in range(n):
                for j in range(n):
                    S[i][j] += f * mat[i][j]
        test = linalg.mat_mul(proj, S)
        for i in range(n):
            test[i][i] += Q(1)
        aggregate_ok = linalg.inverse(test) is not None
        if not aggregate_ok:
            notes.append("I + C_{-1} S is singular")
    elif isinstance(es, NotEigenvalueOne):
        aggregate_ok = True  # projector is 0, I is invertible
        notes.append("1 is not an eigenvalue of P")
    else:
        notes.append("eigenvalue 1 is not semisimple")
    return AssumptionReport(semisimple, spectrum_ok, alpha_ok, aggregate_ok,
                            tuple(notes))


class InvalidInput(Exception):
    pass


def mdp_mean_payoff(P, r):
    """Mean payoff per unit time of the Markov chain P with rewards r.

    Final classes (recurrent classes) get their invariant measure's average
    reward; transient states mix those values by absorption probability.
    Serves as an independent oracle for the eigenbasis formula on
    row-stochastic matrices with unit delays.
    """
    import networkx as nx

    n = len(P)
    P = [[Q(v) for v in row] for row in P]
    r = [Q(v) for v in r]
    for row in P:
        if len(row) != n or any(v < 0 for v in row):
            raise InvalidInput("P must be nonnegative and square")
        if sum(row, ZERO) != 1:
            raise InvalidInput("P must be row-stochastic")

    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    for i in range(n):
        for j in range(n):
            if P[i][j] != 0:
                g.add_edge(i, j)
    cond = nx.condensation(g)
    final = [c for c in cond.nodes if cond.out_degree(c) == 0]
    classes = [sorted(cond.nodes[c]["members"]) for c in final]
    transient = sorted(set(range(n)) - {i for cls in classes for i in cls})
    t_index = {s: k for k, s in enumerate(transient)}

    gains = []  # average reward of each final class
    values = [[ZERO] * n for _ in classes]  # absorption probabilities v^k
    for k, cls in enumerate(classes):
        idx = {s: j for j, s in enumerate(cls)}
        m = len(cls)
        # left eigenvector: m (P_FF - I) = 0, sum m = 1
        rows = [[P[cls[j]][cls[i]] - (Q(1) if i == j else ZERO) for j in range(m)]
                for i in range(m)]
        rows.append([Q(1)] * m)
        rhs = [ZERO] * m + [Q(1)]
        sol = _solve_overdetermined(rows, rhs)
        gains.append(sum((sol[j] * r[cls[j]] for j in range(m)), ZERO))
        for s in cls:
            values[k][s] = Q(1)

    if transient:
        m = len(transient)
        A = [[(Q(1) if i == j else ZERO) - P[transient[i]][transient[j]]
              for j in range(m)] for i in range(m)]
        Ainv = linalg.inverse(A)
        if Ainv is None:
            raise InvalidInput("absorption system is singular")
        for k, cls in enumerate(classes):
            b = [sum((P[s][t] for t in cls), ZERO) for s in transient]
            sol = linalg.mat_vec(Ainv, b)
            for s, v in zip(transient, sol):
                values[k][s] = v

    rho = [ZERO] * n
    for k in range(len(classes)):
        for i in range(n):
            rho[i] += values[k][i] * gains[k]
    return tuple(rho)


def _solve_overdetermined(rows, rhs):
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    red, pivots = linalg.rref(aug)
    m = len(rows[0])
    sol = [ZERO] * m
    for pr, pc in enumerate(pivots):
        if pc == m:
            raise InvalidInput("inconsistent linear system")
        sol[pc] = red[pr][m]
    return sol
