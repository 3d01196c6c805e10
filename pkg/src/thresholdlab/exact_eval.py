"""Exact (non-sampling) evaluation of the failure probability curve.

For a structure A and component failure probability p, ``availability``
returns mu_p(A) = P(configuration in A) computed by the cheapest exact
route for the variant:

* k-out-of-n        -- binomial upper tail (stable log-domain summation),
                       with series/parallel closed forms via expm1/log1p;
* consecutive runs  -- transfer-matrix dynamic program over trailing-run
                       states, differentiated in forward mode;
* product           -- composition mu_p(A x B) = mu_{mu_p(A)}(B);
* explicit sets     -- the reliability polynomial, counted by brute force.

``derivative`` gives d mu_p / dp analytically for every variant, and
``influences`` the per-coordinate pivotality probabilities whose sum it
equals.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from functools import lru_cache, singledispatch

import numpy as np

from . import _binom
from .structures import (
    MAX_ENUM_BITS,
    Consecutive,
    Explicit,
    KOutOfN,
    Product,
    StructureError,
    StructureExpr,
    truth_table,
)

_EPS = sys.float_info.epsilon

METHODS = ("closed_form", "binomial_tail", "dp", "brute_force", "composed")


class EvaluationError(ValueError):
    """Arguments outside an operation's domain."""


@dataclass(frozen=True)
class EvalResult:
    """A probability value plus how it was obtained and how wrong it can be."""

    value: float
    method: str
    abs_error_bound: float

    def __post_init__(self):
        if self.method not in METHODS:
            raise EvaluationError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class ReliabilityPolynomial:
    """Member counts by failure weight: counts[i] configurations with i ones.

    mu_p = sum_i counts[i] p^i (1-p)^(n-i).  Counts are exact integers; the
    evaluation goes through the log domain so huge binomials stay finite.
    """

    n: int
    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if len(counts) != self.n + 1:
            raise EvaluationError(f"need n+1 = {self.n + 1} counts, got {len(counts)}")
        for i, c in enumerate(counts):
            if not 0 <= c <= math.comb(self.n, i):
                raise EvaluationError(f"count {c} at weight {i} exceeds C({self.n},{i})")

    def _terms(self, p: float):
        lp = math.log(p) if p > 0.0 else -math.inf
        lq = math.log1p(-p) if p < 1.0 else -math.inf
        for i, c in enumerate(self.counts):
            if c == 0:
                continue
            logt = math.log(c) + i * lp + (self.n - i) * lq
            yield i, (math.exp(logt) if logt > -745 else 0.0)

    def evaluate(self, p: float) -> float:
        p = _check_prob(p)
        if p == 0.0:
            return float(self.counts[0])
        if p == 1.0:
            return float(bool(self.counts[self.n]))
        return min(1.0, math.fsum(t for _, t in self._terms(p)))

    def derivative_at(self, p: float) -> float:
        p = _check_prob(p)
        if not 0.0 < p < 1.0:
            raise EvaluationError("polynomial derivative needs 0 < p < 1")
        return math.fsum(
            t * (i / p - (self.n - i) / (1.0 - p)) for i, t in self._terms(p)
        )


def _check_prob(p) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise EvaluationError(f"probability must lie in [0, 1], got {p!r}")
    return p


def _closed_form_bound(mu: float, log_work: float) -> float:
    # expm1/log1p pipelines keep the error relative to min(mu, 1-mu)
    return max((abs(log_work) + 4.0) * _EPS * min(mu, 1.0 - mu), 1e-18)


# -- availability ----------------------------------------------------------


@singledispatch
def availability(expr: StructureExpr, p) -> EvalResult:
    """Exact failure probability mu_p(expr) with method and error metadata."""
    raise TypeError(f"no exact evaluation for {type(expr).__name__}")


@availability.register
def _(expr: KOutOfN, p) -> EvalResult:
    p = _check_prob(p)
    k, n = expr.k, expr.n
    if p == 0.0:
        return EvalResult(0.0, "closed_form", 0.0)
    if p == 1.0:
        return EvalResult(1.0, "closed_form", 0.0)
    if k == 1 and n == 1:
        return EvalResult(p, "closed_form", 0.0)
    if k == 1:
        work = n * math.log1p(-p)
        mu = -math.expm1(work)
        return EvalResult(mu, "closed_form", _closed_form_bound(mu, work))
    if k == n:
        work = n * math.log(p)
        mu = math.exp(work)
        return EvalResult(mu, "closed_form", _closed_form_bound(mu, work))
    mu = _binom.upper_tail(n, k, p)
    return EvalResult(mu, "binomial_tail", _binom.error_bound(n, p))


@availability.register
def _(expr: Consecutive, p) -> EvalResult:
    p = _check_prob(p)
    mu, _unused = _consecutive_eval(expr, p, want_deriv=False)
    bound = max(1e-15, 4.0 * _EPS * expr.n)
    return EvalResult(min(1.0, max(0.0, mu)), "dp", bound)


@availability.register
def _(expr: Explicit, p) -> EvalResult:
    p = _check_prob(p)
    poly = _cached_polynomial(expr)
    return EvalResult(poly.evaluate(p), "brute_force", max(1e-15, 4.0 * _EPS * expr.n))


@availability.register
def _(expr: Product, p) -> EvalResult:
    p = _check_prob(p)
    inner = availability(expr.inner, p)
    outer = availability(expr.outer, inner.value)
    if 0.0 < inner.value < 1.0:
        slope = abs(derivative(expr.outer, inner.value))
    else:
        slope = 0.0
    bound = outer.abs_error_bound + inner.abs_error_bound * slope
    return EvalResult(outer.value, "composed", bound)


# -- derivative ------------------------------------------------------------


@singledispatch
def derivative(expr: StructureExpr, p) -> float:
    """Exact d mu_p(expr) / dp for p strictly inside (0, 1)."""
    raise TypeError(f"no exact derivative for {type(expr).__name__}")


def _check_interior(p) -> float:
    p = _check_prob(p)
    if p in (0.0, 1.0):
        raise EvaluationError("derivative is only defined for 0 < p < 1 here")
    return p


@derivative.register
def _(expr: KOutOfN, p) -> float:
    # d/dp P(Bin(n,p) >= k) = n * P(Bin(n-1,p) = k-1)
    p = _check_interior(p)
    return expr.n * _binom.pmf(expr.n - 1, expr.k - 1, p)


@derivative.register
def _(expr: Consecutive, p) -> float:
    p = _check_interior(p)
    _unused, dmu = _consecutive_eval(expr, p, want_deriv=True)
    return dmu


@derivative.register
def _(expr: Explicit, p) -> float:
    p = _check_interior(p)
    return _cached_polynomial(expr).derivative_at(p)


@derivative.register
def _(expr: Product, p) -> float:
    p = _check_interior(p)
    q = availability(expr.inner, p).value
    if not 0.0 < q < 1.0:
        return 0.0  # inner value under/overflowed; the chain factor vanishes
    return derivative(expr.inner, p) * derivative(expr.outer, q)


# -- influences ------------------------------------------------------------


def influences(expr: StructureExpr, p) -> list:
    """Pivotality probability of each coordinate; sums to the derivative.

    Coordinate i is pivotal when flipping it from 0 to 1 moves the
    configuration into the failure set.  Brute force over the truth table,
    so the ground size is capped at MAX_ENUM_BITS.
    """
    p = _check_interior(p)
    n = expr.n
    if n > MAX_ENUM_BITS:
        raise StructureError(f"influences need n <= {MAX_ENUM_BITS}, got {n}")
    t = truth_table(expr)
    idx = np.arange(t.size, dtype=np.int64)
    pop = np.bitwise_count(idx).astype(np.int64)
    # pow tables over the weight of the *other* n-1 coordinates
    pw = [p**w * (1.0 - p) ** (n - 1 - w) for w in range(n)]
    out = []
    for i in range(n):
        lower = idx[(idx >> i) & 1 == 0]
        pivotal = t[lower | (1 << i)] & ~t[lower]
        weights = pop[lower[pivotal]]
        cnt = np.bincount(weights, minlength=n)
        out.append(math.fsum(int(c) * pw[w] for w, c in enumerate(cnt) if c))
    return out


# -- reliability polynomial ------------------------------------------------


def reliability_polynomial(expr: StructureExpr) -> ReliabilityPolynomial:
    """Exact member counts by weight.

    Closed form for k-out-of-n at any size (cost grows with the digits of
    C(n, i)); brute force over the truth table otherwise, capped at
    MAX_ENUM_BITS coordinates.
    """
    if isinstance(expr, KOutOfN):
        counts = tuple(
            math.comb(expr.n, i) if i >= expr.k else 0 for i in range(expr.n + 1)
        )
        return ReliabilityPolynomial(expr.n, counts)
    if expr.n > MAX_ENUM_BITS:
        raise StructureError(
            f"reliability polynomial needs n <= {MAX_ENUM_BITS} "
            f"for {type(expr).__name__}, got {expr.n}"
        )
    t = truth_table(expr)
    pop = np.bitwise_count(np.arange(t.size, dtype=np.int64))
    counts = np.bincount(pop[t], minlength=expr.n + 1)
    return ReliabilityPolynomial(expr.n, tuple(int(c) for c in counts))


@lru_cache(maxsize=256)
def _cached_polynomial(expr: Explicit) -> ReliabilityPolynomial:
    return reliability_polynomial(expr)


# -- consecutive-run dynamic program ---------------------------------------


def _run_chain(n_steps: int, k: int, p: float, s0: int, want_deriv: bool):
    """P(a linear chain seeded with a trailing run of s0 ever reaches run k).

    States track the trailing failure-run length 0..k-1; run k absorbs.
    Forward-mode derivative is carried alongside when requested.
    """
    q = 1.0 - p
    v = [0.0] * k
    v[s0] = 1.0
    dv = [0.0] * k if want_deriv else None
    absorbed = 0.0
    dabs = 0.0
    for _ in range(n_steps):
        tot = math.fsum(v)
        if want_deriv:
            dtot = math.fsum(dv)
            dabs += v[k - 1] + p * dv[k - 1]
            dv = [q * dtot - tot] + [v[s] + p * dv[s] for s in range(k - 1)]
        absorbed += p * v[k - 1]
        v = [q * tot] + [p * v[s] for s in range(k - 1)]
    return absorbed, dabs


def _consecutive_eval(expr: Consecutive, p: float, want_deriv: bool):
    k, n = expr.k, expr.n
    if p == 0.0 or p == 1.0:
        if want_deriv:
            raise EvaluationError("derivative is only defined for 0 < p < 1 here")
        return (0.0 if p == 0.0 else 1.0), 0.0
    if expr.topology == "linear":
        return _run_chain(n, k, p, 0, want_deriv)
    # circular: split on the failure run touching the wrap point.  Either the
    # last k positions are all failed (a run regardless of the rest), or
    # exactly w < k trailing failures precede a working unit, which cuts the
    # cycle open into a chain of n-1-w positions seeded with run w.
    mu_terms = [p**k]
    dmu_terms = [k * p ** (k - 1)] if want_deriv else None
    q = 1.0 - p
    for w in range(min(k, n)):
        chain, dchain = _run_chain(n - 1 - w, k, p, w, want_deriv)
        pw = p**w
        mu_terms.append(pw * q * chain)
        if want_deriv:
            dfactor = (w * p ** (w - 1) * q - pw) if w > 0 else -1.0
            dmu_terms.append(dfactor * chain + pw * q * dchain)
    mu = math.fsum(mu_terms)
    dmu = math.fsum(dmu_terms) if want_deriv else 0.0
    return mu, dmu
