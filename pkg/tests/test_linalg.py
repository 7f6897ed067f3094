import random

import pytest

from congestion.linalg import (identity, inverse, kernel_basis, mat_mul,
                               mat_vec, rank, rref, solve)
from congestion.rationals import Q, ZERO


def test_rref_and_rank():
    a = [[Q(1), Q(2)], [Q(2), Q(4)]]
    assert rank(a) == 1
    r, pivots = rref(a)
    assert r[0] == [Q(1), Q(2)]
    assert r[1] == [ZERO, ZERO]
    assert pivots == [0]


def test_kernel_basis_spans_nullspace():
    a = [[Q(1), Q(2), Q(3)], [Q(2), Q(4), Q(6)]]
    basis = kernel_basis(a)
    assert len(basis) == 2
    for v in basis:
        assert mat_vec(a, v) == [ZERO, ZERO]


def test_inverse_exact():
    a = [[Q(2), Q(1)], [Q(1), Q(1)]]
    inv = inverse(a)
    assert mat_mul(a, inv) == identity(2)
    assert inv[0][0] == Q(1)


def test_inverse_singular_returns_none():
    a = [[Q(1), Q(2)], [Q(2), Q(4)]]
    assert inverse(a) is None
    assert solve(a, [Q(1), Q(2)]) is None


def test_solve_square():
    a = [[Q(3), Q(1)], [Q(1), Q(2)]]
    b = [Q(5), Q(5)]
    x = solve(a, b)
    assert mat_vec(a, x) == b
    assert x == [Q(1), Q(2)]


def test_solve_rational_result():
    a = [[Q(3)]]
    assert solve(a, [Q(1)]) == [Q(1, 3)]


@pytest.mark.parametrize("seed", range(20))
def test_rank_nullity(seed):
    rng = random.Random(seed)
    n, m = rng.randint(1, 5), rng.randint(1, 5)
    a = [[Q(rng.randint(-3, 3)) for _ in range(m)] for _ in range(n)]
    assert rank(a) + len(kernel_basis(a)) == m
