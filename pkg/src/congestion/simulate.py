"""Discrete-time execution of the counter dynamics.

Counters are evaluated on the integer grid in topological order of their
delay-0 dependencies; a left-limit term reads the value one step back.
Since a chosen action of a stationary regime annihilates its left-limit
row, an affine history still reproduces itself exactly under this
one-step convention.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Action, DelayedTerm, PWLDynamics, ResourceForm, delay_zero_order
from .rationals import Q, ZERO


def refine_grid(dyn: PWLDynamics, g: int) -> PWLDynamics:
    """The same dynamics on a time grid g times finer.

    Scaling every delay by g and every exogenous rate by 1/g turns one
    simulation step into 1/g time units: if z solves the original
    dynamics, w(s) = z(s/g) solves the refined one.  Slopes of the
    refined orbit must be multiplied by g to recover rates per original
    time unit.  The one-step left-limit approximation then covers 1/g
    time units, so its bias on estimated slopes shrinks accordingly.
    """
    if g < 1:
        raise ValueError("refinement factor must be a positive integer")
    actions = []
    for row in dyn.actions:
        refined = []
        for act in row:
            terms = tuple(DelayedTerm(t.counter_index, t.delay * g,
                                      t.coefficient, t.left_limit)
                          for t in act.terms)
            rate = ResourceForm(
                tuple((name, c / Q(g)) for name, c in act.rate.coefficients),
                act.rate.constant / Q(g))
            refined.append(Action(act.resource, terms, act.label, rate))
        actions.append(tuple(refined))
    return PWLDynamics(dyn.counter_names, tuple(actions),
                       dyn.resource_parameters, name=dyn.name,
                       homogeneous=dyn.homogeneous)


@dataclass(frozen=True)
class Trajectory:
    horizon: int
    values: tuple[tuple, ...]     # per counter, index t in [0, horizon]
    bindings: dict

    def slope_at_end(self, i: int) -> Q:
        """Crude end-to-end slope of counter i, for quick inspection."""
        series = self.values[i]
        return (series[-1] - series[0]) / Q(self.horizon)


def simulate(dyn: PWLDynamics, bindings, horizon: int,
             affine_seed=None) -> Trajectory:
    """Run the dynamics from zero history (or an affine seed).

    z_j(t) = 0 for t < 0.  With ``affine_seed=(u, rho)`` the values
    u_i + rho_i * t are imposed for t up to the largest delay, and the
    recursion takes over afterwards.  Counters are clamped to be
    nondecreasing.
    """
    delays = dyn.delay_set
    if horizon < (max(delays) if delays else 0):
        raise ValueError("horizon shorter than the largest delay")
    order = delay_zero_order(dyn)
    n = dyn.n
    bindings = {k: Q(v) for k, v in dict(bindings).items()}
    resources = [
        [act.resource.evaluate(bindings) for act in dyn.actions[i]]
        for i in range(n)]
    rates = [
        [act.rate.evaluate(bindings) for act in dyn.actions[i]]
        for i in range(n)]

    start = 0
    values = [[] for _ in range(n)]
    if affine_seed is not None:
        u, rho = affine_seed
        start = max(max(delays, default=0), 1)
        for i in range(n):
            values[i] = [Q(u[i]) + Q(rho[i]) * t for t in range(start)]

    def read(j, t):
        if t < 0:
            return ZERO
        return values[j][t]

    for t in range(start, horizon + 1):
        for i in order:
            best = None
            for a, act in enumerate(dyn.actions[i]):
                v = resources[i][a] + rates[i][a] * t
                for term in act.terms:
                    back = term.delay + (1 if term.left_limit else 0)
                    v += term.coefficient * read(term.counter_index, t - back)
                if best is None or v < best:
                    best = v
            prev = values[i][t - 1] if t > 0 else ZERO
            if best < prev:
                best = prev
            values[i].append(best)
    return Trajectory(horizon, tuple(tuple(s) for s in values), bindings)


@dataclass(frozen=True)
class ThroughputEstimate:
    slopes: tuple
    residuals: tuple            # max absolute deviation from the fit

    def max_residual(self) -> Q:
        return max(self.residuals)


def estimate_throughput(traj: Trajectory, burn_in=Q(1, 2)) -> ThroughputEstimate:
    """Exact least-squares slope of each counter after a burn-in window."""
    t0 = int(Q(burn_in) * traj.horizon)
    if t0 >= traj.horizon:
        raise ValueError("burn-in leaves no samples")
    ts = list(range(t0, traj.horizon + 1))
    m = len(ts)
    tbar = Q(sum(ts), m)
    denom = sum((Q(t) - tbar) ** 2 for t in ts)
    slopes = []
    residuals = []
    for series in traj.values:
        window = series[t0:]
        zbar = sum(window, ZERO) / Q(m)
        slope = sum((Q(t) - tbar) * (z - zbar)
                    for t, z in zip(ts, window)) / denom
        resid = max(abs(z - (zbar + slope * (Q(t) - tbar)))
                    for t, z in zip(ts, window))
        slopes.append(slope)
        residuals.append(resid)
    return ThroughputEstimate(tuple(slopes), tuple(residuals))
