"""Shared fixtures: a zoo of small structures plus brute-force oracles.

The oracles deliberately go through the scalar membership path and plain
enumeration so they stay independent of the vectorized tables and closed
forms they are used to check.
"""

import itertools
import math

import pytest

from thresholdlab import (
    Consecutive,
    KOutOfN,
    explicit_from_generators,
    membership,
    parallel,
    product,
    series,
)

# Every variant, all with n <= 16 so influence/Russo checks stay exhaustive.
FIXTURES = [
    KOutOfN(1, 1),
    KOutOfN(2, 3),
    KOutOfN(1, 4),
    KOutOfN(4, 4),
    KOutOfN(3, 7),
    KOutOfN(5, 12),
    Consecutive(2, 4),
    Consecutive(2, 4, "linear"),
    Consecutive(3, 7),
    Consecutive(4, 9, "linear"),
    Consecutive(5, 5),
    product(parallel(2), series(3)),
    product(KOutOfN(2, 3), KOutOfN(2, 4)),
    product(product(series(2), parallel(2)), series(3)),
    explicit_from_generators(4, ["1100", "0011", "1010"]),
    explicit_from_generators(5, ["11000", "00111"]),
]

FIXTURE_IDS = [f"fixture{i}" for i in range(len(FIXTURES))]


def brute_availability(expr, p):
    """Enumerate all configurations through scalar membership."""
    n = expr.n
    terms = []
    for bits in itertools.product((0, 1), repeat=n):
        if membership(expr, bits):
            w = sum(bits)
            terms.append(p**w * (1.0 - p) ** (n - w))
    return math.fsum(terms)


def brute_influence(expr, p, i):
    """Pivotality of coordinate i by direct enumeration over the others."""
    n = expr.n
    terms = []
    for rest in itertools.product((0, 1), repeat=n - 1):
        low = rest[:i] + (0,) + rest[i:]
        high = rest[:i] + (1,) + rest[i:]
        if membership(expr, high) and not membership(expr, low):
            w = sum(rest)
            terms.append(p**w * (1.0 - p) ** (n - 1 - w))
    return math.fsum(terms)


@pytest.fixture(params=FIXTURES, ids=FIXTURE_IDS)
def fixture_expr(request):
    return request.param
