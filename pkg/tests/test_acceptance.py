"""End-to-end acceptance checks, one test per criterion.

Each test is self-contained and runs against the public API; the expensive
phase diagrams are shared through session fixtures.  Run with ``pytest -v``
to get one pass/fail line per criterion.
"""

import json
import random
import time

from congestion.diagram import build_diagram
from congestion.geometry import (boxed_section, contains_point,
                                 relint_point_poly, vertices)
from congestion.lexpoly import (Front, LexSF, compute_max_front_run,
                                lex_is_empty, relint_point)
from congestion.lexsys import Policy, build_stationary_system, standardize
from congestion.rationals import Q, ZERO
from congestion.simulate import estimate_throughput, refine_grid, simulate
from congestion.throughput import (EigenStructure, ThroughputMap,
                                   eigen_structure, mdp_mean_payoff,
                                   throughput_map)

from helpers import brute_force_front, random_lexsf, random_stochastic_matrix
from test_diagram import COUNTERS, EXPECTED_MAPS, MERGED_MAP, MERGED_POLICIES
from test_throughput import _unit_delay_matrices


def test_criterion_1_lex_front_sweep_on_contradictory_pair():
    # (y, x) <=lex (x, z) and (x, z) <=lex (y, y - 1) over (x, y, z):
    # the sweep must tighten the front from (1,1) through (2,2) to the
    # all-exhausted (3,3) and certify emptiness, in under a second
    sf = LexSF(
        ("x", "y", "z"), ("s1", "s2", "s3", "s4"), ((3, 4), (5, 6)),
        (
            ((Q(-1), Q(1), ZERO, Q(1), ZERO, ZERO, ZERO), ZERO),
            ((Q(1), ZERO, Q(-1), ZERO, Q(1), ZERO, ZERO), ZERO),
            ((Q(1), Q(-1), ZERO, ZERO, ZERO, Q(1), ZERO), ZERO),
            ((ZERO, Q(-1), Q(1), ZERO, ZERO, ZERO, Q(1)), Q(-1)),
        ),
    )
    start = time.monotonic()
    run = compute_max_front_run(sf)
    elapsed = time.monotonic() - start
    assert tuple(run.trace) == (Front((1, 1)), Front((2, 2)), Front((3, 3)))
    assert lex_is_empty(sf, run.front)
    assert elapsed < 1.0


def test_criterion_2_reduced_diagram_statistics(ed_reduced):
    start = time.monotonic()
    diagram = build_diagram(ed_reduced, jobs=2)
    elapsed = time.monotonic() - start
    assert diagram.stats.total == 32
    assert diagram.stats.strictly_feasible == 16
    assert diagram.stats.full_dimensional_distinct == 7
    assert elapsed < 120.0


def test_criterion_3_reduced_throughput_formulas(reduced_diagram):
    nparams = len(reduced_diagram.parameters)
    fd = [c for c in reduced_diagram.cells if c.dimension == nparams]
    by_policy = {str(p): c for c in fd for p in c.policies}
    assert set(by_policy) == set(EXPECTED_MAPS) | set(MERGED_POLICIES)
    for policy, expected in EXPECTED_MAPS.items():
        tput = by_policy[policy].throughput
        assert isinstance(tput, ThroughputMap)
        for i, counter in enumerate(COUNTERS):
            assert tput.constant[i] == 0
            row = {p: v for p, v in zip(reduced_diagram.parameters, tput.T[i])
                   if v != 0}
            assert row == expected[counter], (policy, counter)
    merged = by_policy[MERGED_POLICIES[0]]
    assert {str(p) for p in merged.policies} == set(MERGED_POLICIES)
    for i, counter in enumerate(COUNTERS):
        row = {p: v for p, v in
               zip(reduced_diagram.parameters, merged.throughput.T[i]) if v != 0}
        assert row == MERGED_MAP[counter]


def test_criterion_4_full_diagram_statistics(full_diagram_timed):
    diagram, elapsed = full_diagram_timed
    assert elapsed < 1800.0
    assert diagram.stats.total == 512
    assert diagram.stats.strictly_feasible == 352
    assert diagram.stats.full_dimensional == 76
    assert diagram.stats.full_dimensional_distinct == 64


def test_criterion_5_max_front_matches_brute_force():
    budget_ok = True
    for seed in range(1000):
        rng = random.Random(seed)
        sf = random_lexsf(rng)
        run = compute_max_front_run(sf)
        assert tuple(run.front) == brute_force_front(sf), seed
        budget_ok = budget_ok and run.lp_calls <= sf.m * sf.total_depth
    assert budget_ok


def test_criterion_6_throughput_matches_markov_oracle():
    checked = 0
    seed = 0
    while checked < 200:
        rng = random.Random(seed)
        seed += 1
        n = rng.randint(1, 6)
        P = random_stochastic_matrix(rng, n)
        if not isinstance(eigen_structure(P), EigenStructure):
            continue
        rewards = [Q(rng.randint(0, 5)) for _ in range(n)]
        tput = throughput_map(_unit_delay_matrices(P, rewards), ())
        if not isinstance(tput, ThroughputMap):
            continue
        assert tput.constant == mdp_mean_payoff(P, rewards), seed
        checked += 1
    assert checked == 200


def _interior_points(cell, parameters, count=3):
    """Distinct interior points of a full-dimensional conic cell."""
    normalize = parameters[0]
    section = boxed_section(cell.closure, normalize, Q(40))
    strict = cell.relative_interior_rows
    center = relint_point_poly(section, strict_rows=strict)
    assert center is not None
    points = [center]
    for v in vertices(section):
        if len(points) >= count:
            break
        candidate = tuple((a + b) / 2 for a, b in zip(center, v))
        if candidate not in points:
            points.append(candidate)
    assert len(points) >= count
    for p in points:
        assert contains_point(cell.closure, p)
    return points


def test_criterion_7_simulation_matches_phase_predictions(ed_reduced,
                                                          reduced_diagram):
    nparams = len(reduced_diagram.parameters)
    horizon = 10**4
    tol = Q(1, 100)
    # a 5x finer grid keeps the left-limit discretization bias well
    # below the tolerance
    grid = 5
    fine = refine_grid(ed_reduced, grid)
    for cell in reduced_diagram.cells:
        if cell.dimension != nparams:
            continue
        assert isinstance(cell.throughput, ThroughputMap)
        for point in _interior_points(cell, reduced_diagram.parameters):
            values = dict(zip(reduced_diagram.parameters, point))
            predicted = cell.throughput.apply(values)
            est = estimate_throughput(simulate(fine, values, horizon))
            for s, p in zip(est.slopes, predicted):
                assert abs(s * grid - p) <= tol * max(Q(1), abs(p)), \
                    (str(cell.policies[0]), values)

    # affine-seed reproduction: seeding the simulator with a stationary
    # regime must reproduce the affine orbit with zero residual
    sigma = Policy((0, 1, 1, 1, 1))
    sf = standardize(build_stationary_system(ed_reduced, sigma))
    witness = relint_point(sf)
    assert witness is not None
    n = ed_reduced.n
    rho = witness[:n]
    u = witness[n:2 * n]
    params = dict(zip(ed_reduced.resource_parameters, witness[2 * n:2 * n + 4]))
    traj = simulate(ed_reduced, params, 500, affine_seed=(u, rho))
    for i in range(n):
        for t, v in enumerate(traj.values[i]):
            assert v == u[i] + rho[i] * t
    assert estimate_throughput(traj).max_residual() == 0


def test_criterion_8_homogeneity(reduced_diagram, full_diagram_timed):
    full_diagram, _ = full_diagram_timed
    for diagram in (reduced_diagram, full_diagram):
        for cell in diagram.cells:
            for _, rhs in cell.closure.eq_rows:
                assert rhs == 0
            for _, rhs in cell.closure.ineq_rows:
                assert rhs == 0
            if not isinstance(cell.throughput, ThroughputMap):
                continue
            assert all(c == 0 for c in cell.throughput.constant)
            base = {p: Q(j + 2, 3) for j, p in enumerate(diagram.parameters)}
            scaled = {p: Q(5) * v for p, v in base.items()}
            rho = cell.throughput.apply(base)
            assert cell.throughput.apply(scaled) == tuple(Q(5) * r for r in rho)


def test_criterion_9_bilevel_call_center_snapshot(ems_b):
    from congestion.cli import _report

    reports = []
    for jobs in (1, 2):
        diagram = build_diagram(ems_b, jobs=jobs)
        report = _report(ems_b, diagram, None, Q(6), False)
        reports.append(json.dumps(report, indent=2, sort_keys=True))
    assert reports[0] == reports[1]
    parsed = json.loads(reports[0])
    assert parsed["stats"]["total"] == 36
    assert parsed["stats"]["strictly_feasible"] > 0
    assert any(c["dimension"] == 4 for c in parsed["cells"])
