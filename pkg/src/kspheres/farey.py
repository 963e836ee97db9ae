"""Farey sequences, the arc dissection of [0, 1) and major/minor labels.

All endpoints are exact rationals.  Arcs are stored as integer numerator and
denominator arrays so that whole-level checks (every X up to a few hundred)
stay vectorized; ``FareyArc`` records are materialized on demand.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._common import DEFAULT_BUDGET, Budget, DomainError, ResourceError, as_fraction


@dataclass(frozen=True)
class FareyArc:
    """Arc around a/q at level X.

    ``lo`` and ``hi`` are the unshifted mediant endpoints.  The glued arc
    around 0 = 1 wraps, which is recorded as ``lo >= hi`` (it covers
    [lo, 1) together with [0, hi)).  ``shift_lo`` and ``shift_hi`` give the
    shifted interval I(a/q) around the origin.
    """

    a: int
    q: int
    level: int
    lo: Fraction
    hi: Fraction
    shift_lo: Fraction
    shift_hi: Fraction
    major: bool | None = None

    @property
    def wrapped(self) -> bool:
        return self.lo >= self.hi

    @property
    def length(self) -> Fraction:
        return self.shift_hi - self.shift_lo

    @property
    def label(self) -> str:
        if self.major is None:
            return ""
        return "Major" if self.major else "minor"

    def contains(self, t) -> bool:
        t = as_fraction(t) if not isinstance(t, float) else t
        if self.wrapped:
            return t >= self.lo or t < self.hi
        return self.lo <= t < self.hi


def _check_level(X: int, budget: Budget) -> int:
    if int(X) != X or X < 1:
        raise DomainError(f"Farey level must be an integer >= 1, got {X}")
    X = int(X)
    if X > budget.farey_max:
        raise ResourceError(f"Farey level {X} exceeds the budget {budget.farey_max}")
    return X


@lru_cache(maxsize=64)
def _farey_arrays(X: int) -> tuple[np.ndarray, np.ndarray]:
    # next-term recurrence: a/b, c/d consecutive => next = (k c - a)/(k d - b)
    nums = [0]
    dens = [1]
    a, b, c, d = 0, 1, 1, X
    while c <= X:
        nums.append(c)
        dens.append(d)
        kk = (X + b) // d
        a, b, c, d = c, d, kk * c - a, kk * d - b
    num = np.asarray(nums, dtype=np.int64)
    den = np.asarray(dens, dtype=np.int64)
    num.setflags(write=False)
    den.setflags(write=False)
    return num, den


def farey_arrays(X: int, budget: Budget | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Numerators and denominators of F(X) in increasing order."""
    X = _check_level(X, budget or DEFAULT_BUDGET)
    return _farey_arrays(X)


def farey_sequence(X: int, budget: Budget | None = None) -> list[Fraction]:
    num, den = farey_arrays(X, budget)
    return [Fraction(int(p), int(q)) for p, q in zip(num, den)]


def totient_sum(X: int) -> int:
    """1 + sum_{q <= X} phi(q), the length of F(X)."""
    phi = np.arange(X + 1, dtype=np.int64)
    for p in range(2, X + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return int(1 + phi[1:].sum())


@dataclass(frozen=True)
class ArcTable:
    """Vectorized arc data at a level X.

    Row i belongs to the fraction a[i]/q[i]; rows run over F(X) without the
    final 1/1, whose arc is glued to that of 0/1 (row 0).  Endpoints are
    ``lo_num/lo_den`` and ``hi_num/hi_den``; row 0 wraps.  The shifted
    interval is [-1/(q A), 1/(q B)) with A = q + q1 and B = q + q2.
    """

    level: int
    a: np.ndarray
    q: np.ndarray
    lo_num: np.ndarray
    lo_den: np.ndarray
    hi_num: np.ndarray
    hi_den: np.ndarray

    def __len__(self) -> int:
        return int(self.q.shape[0])

    def _A(self) -> np.ndarray:
        # q + q1; the left neighbour of the glued 0/1 is (X-1)/X
        q1 = np.concatenate([[self.level], self.q[:-1]])
        return self.q + q1

    def _B(self) -> np.ndarray:
        # q + q2; the right neighbour of the last row is 1/1
        q2 = np.concatenate([self.q[1:], [1]])
        return self.q + q2

    def arc(self, i: int, R: float | None = None) -> FareyArc:
        a, q = int(self.a[i]), int(self.q[i])
        A, B = int(self._A()[i]), int(self._B()[i])
        major = None if R is None else bool(q < R)
        return FareyArc(
            a=a,
            q=q,
            level=self.level,
            lo=Fraction(int(self.lo_num[i]), int(self.lo_den[i])),
            hi=Fraction(int(self.hi_num[i]), int(self.hi_den[i])),
            shift_lo=Fraction(-1, q * A),
            shift_hi=Fraction(1, q * B),
            major=major,
        )


@lru_cache(maxsize=64)
def _arc_table(X: int) -> ArcTable:
    num, den = _farey_arrays(X)
    # drop the trailing 1/1 and glue its arc onto 0/1
    a = num[:-1]
    q = den[:-1]
    # mediants with the right neighbour (including 1/1 for the last row)
    hi_num = num[:-1] + num[1:]
    hi_den = den[:-1] + den[1:]
    lo_num = np.concatenate([[num[-2] + num[-1]], hi_num[:-1]])
    lo_den = np.concatenate([[den[-2] + den[-1]], hi_den[:-1]])
    return ArcTable(X, a, q, lo_num, lo_den, hi_num, hi_den)


def arc_table(X: int, budget: Budget | None = None) -> ArcTable:
    X = _check_level(X, budget or DEFAULT_BUDGET)
    return _arc_table(X)


def arc_partition(X: int, R: float | None = None, budget: Budget | None = None) -> list[FareyArc]:
    """Arcs of the Farey dissection at level X, starting with the glued arc of 0/1.

    The glued arc is [X/(X+1), 1) joined with [0, 1/(X+1)), the mediants of
    0/1 and 1/1 with their neighbours 1/X and (X-1)/X.  For X = 1 it is the
    whole circle.
    """
    tab = arc_table(X, budget)
    return [tab.arc(i, R) for i in range(len(tab))]


def _exact_dtype(X: int):
    # products below involve up to four factors of size ~2X
    return np.int64 if 16 * X**4 < 2**62 else object


def arc_length_ok(tab: ArcTable) -> np.ndarray:
    """Exact integer check of 1/(qX) <= |I| <= 2/(qX) per arc.

    |I| = (A + B)/(q A B), so the bounds read X(A+B) >= AB and X(A+B) <= 2AB.
    """
    dt = _exact_dtype(tab.level)
    A = tab._A().astype(dt)
    B = tab._B().astype(dt)
    X = tab.level
    lhs = X * (A + B)
    AB = A * B
    return np.asarray((lhs >= AB) & (lhs <= 2 * AB), dtype=bool)


def arcs_tile_exactly(tab: ArcTable) -> bool:
    """Exact check that the unshifted arcs tile [0, 1) disjointly.

    Consecutive arcs must share endpoints, every unglued arc must be a
    nonempty interval, the glued arc must close the circle, and each
    unshifted length must equal the shifted length (A+B)/(qAB).  With shared
    endpoints the lengths telescope, so the total is exactly one.
    """
    n = len(tab)
    if n == 1:
        return tab.lo_num[0] == tab.hi_num[0] == 1 and tab.lo_den[0] == tab.hi_den[0] == 2
    shared = np.array_equal(tab.hi_num[:-1], tab.lo_num[1:]) and np.array_equal(
        tab.hi_den[:-1], tab.lo_den[1:]
    )
    closed = tab.hi_num[-1] == tab.lo_num[0] and tab.hi_den[-1] == tab.lo_den[0]
    if not (shared and closed):
        return False
    A, B = tab._A(), tab._B()
    num = tab.hi_num * tab.lo_den - tab.lo_num * tab.hi_den
    den = tab.lo_den * tab.hi_den
    # glued arc: 1 - lo + hi
    num = num.copy()
    num[0] = (tab.lo_den[0] - tab.lo_num[0]) * tab.hi_den[0] + tab.hi_num[0] * tab.lo_den[0]
    if np.any(num <= 0):
        return False
    # num/den == (A+B)/(qAB)  <=>  num*q*A*B == (A+B)*den
    dt = _exact_dtype(tab.level)
    lhs = num.astype(dt) * tab.q * A * B
    rhs = (A + B).astype(dt) * den
    return bool(np.all(lhs == rhs))


def default_level(R: float, k: int) -> int:
    """floor(R^{k-1}), the dissection level at scale R."""
    if R < 1:
        raise DomainError("R must be >= 1")
    return max(1, int(math.floor(R ** (k - 1) + 1e-12)))


def classify(t, X: int, R: float, budget: Budget | None = None) -> FareyArc:
    """Arc containing t in [0, 1), labelled Major iff q < R."""
    if R < 1:
        raise DomainError("R must be >= 1")
    tf = t if isinstance(t, float) else as_fraction(t)
    if not (0 <= tf < 1):
        raise DomainError(f"t must lie in [0, 1), got {t}")
    tab = arc_table(X, budget)
    n = len(tab)
    if n == 1:
        return tab.arc(0, R)
    tq = as_fraction(tf)
    # row i covers [hi_{i-1}, hi_i); rows past the last upper endpoint wrap to 0
    i = bisect.bisect_right(_hi_fractions(tab.level), tq)
    return tab.arc(0 if i == n else i, R)


@lru_cache(maxsize=16)
def _hi_fractions(X: int) -> list[Fraction]:
    tab = _arc_table(X)
    return [Fraction(int(p), int(q)) for p, q in zip(tab.hi_num, tab.hi_den)]


def continued_fraction_convergents(t, q_max: int | None = None) -> list[tuple[int, int]]:
    """Convergents (a, q) of t in [0, 1), in order, with q <= q_max."""
    x = as_fraction(t)
    out = []
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    while True:
        ai = x.numerator // x.denominator
        h0, h1 = h1, ai * h1 + h0
        k0, k1 = k1, ai * k1 + k0
        if q_max is not None and k1 > q_max:
            break
        out.append((h1, k1))
        frac = x - ai
        if frac == 0:
            break
        x = 1 / frac
    return out
