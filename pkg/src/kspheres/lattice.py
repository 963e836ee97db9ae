"""Lattice points on arithmetic k-spheres {m in Z^d : sum |m_i|^k = n}.

Counts and exponential sums are computed by a dynamic programme over the
level axis: one table of length n+1 per added coordinate.  The same table
answers every level up to ``n`` at once, which the maximal-function and
ergodic modules rely on.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from ._common import (
    DEFAULT_BUDGET,
    Budget,
    DomainError,
    ResourceError,
    integer_kth_root,
    unit_root,
)

_INT64_SAFE = 2**62


@dataclass(frozen=True)
class SphereSpec:
    """Degree k, dimension d and level n = r**k of an arithmetic k-sphere."""

    degree: int
    dimension: int
    level: int

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 2:
            raise DomainError(f"degree must be an integer >= 2, got {self.degree}")
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise DomainError(f"dimension must be an integer >= 1, got {self.dimension}")
        if int(self.level) != self.level or self.level < 0:
            raise DomainError(f"level must be an integer >= 0, got {self.level}")

    @property
    def k(self) -> int:
        return self.degree

    @property
    def d(self) -> int:
        return self.dimension

    @property
    def radius(self) -> float:
        return float(self.level) ** (1.0 / self.degree)


@dataclass(frozen=True)
class SphereCount:
    spec: SphereSpec
    count: int


@dataclass(frozen=True)
class SphereExpSum:
    spec: SphereSpec
    frequency: tuple
    value: complex


def _check_level(n_max: int, budget: Budget) -> None:
    if n_max > budget.level_max:
        raise ResourceError(
            f"level {n_max} exceeds the configured budget {budget.level_max}"
        )


def one_dim_power_counts(k: int, n_max: int, budget: Budget | None = None) -> np.ndarray:
    """c[n] = #{m in Z : |m|^k = n} for 0 <= n <= n_max."""
    budget = budget or DEFAULT_BUDGET
    if k < 2:
        raise DomainError("degree must be >= 2")
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    _check_level(n_max, budget)
    c = np.zeros(n_max + 1, dtype=np.int64)
    c[0] = 1
    j = np.arange(1, integer_kth_root(n_max, k) + 1, dtype=np.int64)
    c[j**k] = 2
    return c


def count_table(k: int, d: int, n_max: int, budget: Budget | None = None) -> np.ndarray:
    """N_{k,d} at every level 0..n_max.

    Returns int64 when every count provably fits, otherwise an object array
    of Python integers.
    """
    budget = budget or DEFAULT_BUDGET
    if d < 1:
        raise DomainError("dimension must be >= 1")
    c1 = one_dim_power_counts(k, n_max, budget)
    jmax = integer_kth_root(n_max, k)
    bound = (2 * jmax + 1) ** d
    dtype = np.int64 if bound < _INT64_SAFE else object
    res = c1.astype(dtype)
    powers = [j**k for j in range(jmax + 1)]
    for _ in range(d - 1):
        new = res.copy()  # j = 0 term
        for j in range(1, jmax + 1):
            p = powers[j]
            new[p:] += 2 * res[: n_max + 1 - p]
        res = new
    return res


def count_sphere(spec: SphereSpec, budget: Budget | None = None) -> SphereCount:
    table = count_table(spec.k, spec.d, spec.level, budget)
    return SphereCount(spec, int(table[spec.level]))


def admissible_levels(k: int, d: int, lo: int, hi: int, budget: Budget | None = None) -> np.ndarray:
    """Levels n in [lo, hi] with a nonempty sphere (n >= 1)."""
    lo = max(int(lo), 1)
    if hi < lo:
        return np.zeros(0, dtype=np.int64)
    table = count_table(k, d, int(hi), budget)
    levels = np.arange(lo, hi + 1)
    return levels[np.asarray(table[lo:], dtype=object) > 0].astype(np.int64)


_POINT_CACHE: dict[tuple[int, int, int], np.ndarray] = {}
_POINT_CACHE_ROWS = 10**5  # only small sub-spheres are kept
_POINT_CACHE_ENTRIES = 1 << 16


def _points(k: int, dd: int, level: int) -> np.ndarray:
    """Lexicographic points of {sum_{i<=dd} |m_i|^k = level}; small results are cached across calls."""
    key = (k, dd, level)
    hit = _POINT_CACHE.get(key)
    if hit is not None:
        return hit
    jm = integer_kth_root(level, k)
    if dd == 1:
        if jm**k != level:
            out = np.zeros((0, 1), dtype=np.int64)
        elif jm == 0:
            out = np.zeros((1, 1), dtype=np.int64)
        else:
            out = np.array([[-jm], [jm]], dtype=np.int64)
    else:
        blocks = []
        for m1 in range(-jm, jm + 1):
            sub = _points(k, dd - 1, level - abs(m1) ** k)
            if sub.shape[0]:
                blk = np.empty((sub.shape[0], dd), dtype=np.int64)
                blk[:, 0] = m1
                blk[:, 1:] = sub
                blocks.append(blk)
        out = np.concatenate(blocks) if blocks else np.zeros((0, dd), dtype=np.int64)
    if out.shape[0] <= _POINT_CACHE_ROWS and len(_POINT_CACHE) < _POINT_CACHE_ENTRIES:
        out.setflags(write=False)
        _POINT_CACHE[key] = out
    return out


def sphere_points(spec: SphereSpec, cap: int | None = None, budget: Budget | None = None) -> np.ndarray:
    """All lattice points of the sphere as an (N, d) int64 array, lexicographic."""
    budget = budget or DEFAULT_BUDGET
    cap = budget.enumeration_cap if cap is None else cap
    k, d, n = spec.k, spec.d, spec.level
    total = int(count_table(k, d, n, budget)[n])
    if total > cap:
        raise ResourceError(
            f"sphere has {total} points, above the enumeration cap {cap}; "
            "use count_sphere for the count-only path"
        )
    out = _points(k, d, n)
    return out.copy() if not out.flags.writeable else out


def enumerate_sphere(spec: SphereSpec, cap: int | None = None, budget: Budget | None = None) -> Iterator[tuple[int, ...]]:
    """Stream the sphere's lattice points once each, in lexicographic order."""
    pts = sphere_points(spec, cap=cap, budget=budget)
    for row in pts.tolist():
        yield tuple(row)


# --- exponential sums -------------------------------------------------------

def _coordinate_phases(k: int, jmax: int, xi_i) -> np.ndarray:
    """e(j xi) + e(-j xi) for j = 0..jmax (j = 0 contributes 1)."""
    j = np.arange(jmax + 1, dtype=np.int64)
    if isinstance(xi_i, Fraction) or isinstance(xi_i, (int, np.integer)):
        x = Fraction(xi_i)
        z = unit_root(j * x.numerator, np.full_like(j, x.denominator))
        vals = 2.0 * z.real
    else:
        vals = 2.0 * np.cos(2.0 * np.pi * np.mod(j * float(xi_i), 1.0))
    vals = vals.astype(complex)
    vals[0] = 1.0
    return vals


def exp_sum_table(k: int, d: int, n_max: int, xi: Sequence, budget: Budget | None = None) -> np.ndarray:
    """Sum over the sphere of e(m . xi) at every level 0..n_max.

    Each coordinate contributes sum_j (e(j xi_i) + e(-j xi_i)) x^{j^k}; the
    coordinates are convolved along the level axis.  Because every sphere is
    symmetric under m -> -m the result is real, but it is returned complex.
    """
    budget = budget or DEFAULT_BUDGET
    if len(xi) != d:
        raise DomainError(f"frequency has {len(xi)} components, expected {d}")
    _check_level(n_max, budget)
    jmax = integer_kth_root(n_max, k)
    powers = np.arange(jmax + 1, dtype=np.int64) ** k
    res = None
    for i in range(d):
        ph = _coordinate_phases(k, jmax, xi[i]).real
        if res is None:
            res = np.zeros(n_max + 1)
            res[powers] = ph
            continue
        new = np.zeros(n_max + 1)
        for j in range(jmax + 1):
            p = powers[j]
            new[p:] += ph[j] * res[: n_max + 1 - p]
        res = new
    return res.astype(complex)


def sphere_exp_sum(spec: SphereSpec, xi: Sequence, budget: Budget | None = None) -> SphereExpSum:
    """Exact value of sum_{m in S_r} e(m . xi) by the level-axis DP.

    Components of ``xi`` given as ``Fraction`` use exact residue phases; real
    components carry an O(n^{1/k} eps) phase error.
    """
    k, d, n = spec.k, spec.d, spec.level
    if len(xi) != d:
        raise DomainError(f"frequency has {len(xi)} components, expected {d}")
    budget = budget or DEFAULT_BUDGET
    _check_level(n, budget)
    jmax = integer_kth_root(n, k)
    powers = np.arange(jmax + 1, dtype=np.int64) ** k
    res = np.zeros(n + 1)
    res[powers] = _coordinate_phases(k, jmax, xi[0]).real
    for i in range(1, d):
        ph = _coordinate_phases(k, jmax, xi[i]).real
        if i == d - 1:
            rem = n - powers
            ok = rem >= 0
            val = float(np.dot(ph[ok], res[rem[ok]]))
            return SphereExpSum(spec, tuple(xi), complex(val))
        new = np.zeros(n + 1)
        for j in range(jmax + 1):
            p = powers[j]
            new[p:] += ph[j] * res[: n + 1 - p]
        res = new
    return SphereExpSum(spec, tuple(xi), complex(res[n]))


def exp_sum_direct(points: np.ndarray, xi: Sequence) -> complex:
    """Direct sum of e(m . xi) over an explicit point list."""
    if points.shape[0] == 0:
        return 0j
    phase = np.mod(points @ np.asarray([float(x) for x in xi]), 1.0)
    return complex(np.exp(2j * np.pi * phase).sum())


def exp_sum_points(k: int, n: int, points: np.ndarray, budget: Budget | None = None,
                   chunk_cells: int = 20_000_000) -> np.ndarray:
    """Values of the sphere exponential sum at level n for many real frequencies.

    ``points`` has shape (P, d).  The level-axis DP runs for all points at
    once, in chunks bounded by ``chunk_cells`` table entries.
    """
    budget = budget or DEFAULT_BUDGET
    _check_level(n, budget)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    P, d = points.shape
    jmax = integer_kth_root(n, k)
    j = np.arange(jmax + 1)
    powers = j**k
    out = np.empty(P)
    step = max(1, chunk_cells // (n + 1))
    for s in range(0, P, step):
        X = points[s : s + step]
        ph = 2.0 * np.cos(2.0 * np.pi * np.mod(X[:, :, None] * j[None, None, :], 1.0))
        ph[:, :, 0] = 1.0
        if d == 1:
            hit = powers == n
            out[s : s + step] = ph[:, 0, hit].sum(axis=1) if hit.any() else 0.0
            continue
        res = np.zeros((X.shape[0], n + 1))
        res[:, powers] = ph[:, 0, :]
        for i in range(1, d - 1):
            new = np.zeros_like(res)
            for jj in range(jmax + 1):
                p = powers[jj]
                new[:, p:] += ph[:, i, jj][:, None] * res[:, : n + 1 - p]
            res = new
        rem = n - powers
        out[s : s + step] = (ph[:, d - 1, :] * res[:, rem]).sum(axis=1)
    return out
