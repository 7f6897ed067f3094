"""Policy enumeration, strict feasibility, and phase-diagram assembly.

A policy is strictly feasible when its stationary lex system admits a
solution with some rho_i > 0 for some resource values; by the max-front
characterization this happens exactly when some rho_i >= 0 slack group
still has front entry 1.  The closure of a feasible policy's cell is the
projection of the max-front polyhedron onto resource-parameter space.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

from . import geometry
from .lexpoly import Front, HPolyhedron, compute_max_front_run, lex_closure
from .lexsys import Policy, build_stationary_system, rho_group_index, standardize
from .model import PWLDynamics
from .throughput import (DegenerateAggregate, DriftInconsistent,
                         NotSemisimple, ThroughputMap, policy_throughput)


@dataclass(frozen=True)
class FeasibilityResult:
    policy: Policy
    max_front: Front
    strictly_feasible: bool
    positive_rho_indices: frozenset[int]
    front_trace: tuple[tuple[int, ...], ...] = ()
    lp_calls: int = 0


@dataclass(frozen=True)
class PhaseCell:
    closure: HPolyhedron
    relative_interior_rows: tuple[int, ...]  # ineq rows strict on the relint
    dimension: int
    policies: tuple[Policy, ...]
    throughput: Union[ThroughputMap, NotSemisimple, DegenerateAggregate,
                      DriftInconsistent]

    @property
    def degenerate(self) -> bool:
        return not isinstance(self.throughput, ThroughputMap)


@dataclass(frozen=True)
class PolicyStats:
    total: int
    strictly_feasible: int
    full_dimensional: int        # feasible policies whose cell is full-dim
    distinct: int                # merged cells, all dimensions
    full_dimensional_distinct: int


@dataclass(frozen=True)
class PhaseDiagram:
    parameters: tuple[str, ...]
    cells: tuple[PhaseCell, ...]
    stats: PolicyStats


def enumerate_policies(dyn: PWLDynamics):
    """All policies in lexicographic order of their index tuples."""
    ranges = [range(len(a)) for a in dyn.actions]
    for choice in itertools.product(*ranges):
        yield Policy(choice)


def strict_feasibility(dyn: PWLDynamics, sigma: Policy) -> FeasibilityResult:
    sf = standardize(build_stationary_system(dyn, sigma))
    run = compute_max_front_run(sf)
    positive = frozenset(
        i for i in range(dyn.n) if run.front[rho_group_index(sf, i)] == 1)
    return FeasibilityResult(
        sigma, run.front, bool(positive), positive,
        tuple(tuple(f.f) for f in run.trace), run.lp_calls)


def policy_cell(dyn: PWLDynamics, sigma: Policy) -> PhaseCell:
    """Cell closure of a strictly feasible policy, over resource parameters."""
    sf = standardize(build_stationary_system(dyn, sigma))
    closure = lex_closure(sf)
    cell = geometry.project(closure.polyhedron, dyn.resource_parameters)
    implicit, dim = geometry.affine_hull_dimension(cell)
    strict_rows = tuple(i for i in range(len(cell.ineq_rows)) if i not in set(implicit))
    tput = policy_throughput(dyn, sigma)
    return PhaseCell(cell, strict_rows, dim, (sigma,), tput)


def _throughput_key(tput):
    if isinstance(tput, ThroughputMap):
        return ("map", tput.T, tput.constant)
    return (type(tput).__name__,)


def _eval_policy(args):
    dyn, index, sigma = args
    feas = strict_feasibility(dyn, sigma)
    cell = policy_cell(dyn, sigma) if feas.strictly_feasible else None
    return index, feas, cell


def build_diagram(dyn: PWLDynamics, jobs: int = 1,
                  progress=None) -> PhaseDiagram:
    """Evaluate every policy and merge coinciding cells.

    Cells merge only when their closures are equal as sets and their
    throughput maps are identical; the merged cell keeps every generating
    policy.  Output is deterministic and independent of the worker count.
    """
    tasks = [(dyn, i, sigma) for i, sigma in enumerate(enumerate_policies(dyn))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunk = max(1, len(tasks) // (8 * jobs))
            results = list(pool.map(_eval_policy, tasks, chunksize=chunk))
    else:
        results = []
        for t in tasks:
            results.append(_eval_policy(t))
            if progress:
                progress(len(results), len(tasks))
    results.sort(key=lambda r: r[0])

    nparams = len(dyn.resource_parameters)
    feasible = 0
    full_dim = 0
    merged: list[dict] = []
    by_key: dict = {}
    for index, feas, cell in results:
        if cell is None:
            continue
        feasible += 1
        if cell.dimension == nparams:
            full_dim += 1
        tkey = _throughput_key(cell.throughput)
        ckey = (geometry.canonical_rows(cell.closure), tkey)
        home = by_key.get(ckey)
        if home is None:
            for cand in merged:
                if (cand["tkey"] == tkey
                        and cand["cell"].dimension == cell.dimension
                        and geometry.poly_equal(cand["cell"].closure, cell.closure)):
                    home = cand
                    break
        if home is None:
            home = {"cell": cell, "tkey": tkey, "policies": [feas.policy]}
            merged.append(home)
        else:
            home["policies"].append(feas.policy)
        by_key[ckey] = home

    cells = tuple(
        PhaseCell(m["cell"].closure, m["cell"].relative_interior_rows,
                  m["cell"].dimension, tuple(m["policies"]), m["cell"].throughput)
        for m in merged)
    stats = PolicyStats(
        total=len(tasks),
        strictly_feasible=feasible,
        full_dimensional=full_dim,
        distinct=len(cells),
        full_dimensional_distinct=sum(1 for c in cells if c.dimension == nparams),
    )
    return PhaseDiagram(tuple(dyn.resource_parameters), cells, stats)
