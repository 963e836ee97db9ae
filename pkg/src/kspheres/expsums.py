"""Weyl sums, normalized Gauss sums and the K*(tau) / Hua diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from ._common import (
    DEFAULT_BUDGET,
    Budget,
    DomainError,
    PreconditionError,
    ResourceError,
    as_fraction,
    loglog_slope,
    unit_root,
)
from .farey import continued_fraction_convergents


@dataclass(frozen=True)
class HypothesisConfig:
    tau: float

    def __post_init__(self):
        if not (0 < self.tau <= 1):
            raise DomainError(f"tau must lie in (0, 1], got {self.tau}")

    @classmethod
    def weyl(cls, k: int) -> "HypothesisConfig":
        return cls(2.0 ** (1 - k))

    @classmethod
    def wooley(cls, k: int) -> "HypothesisConfig":
        if k >= 4:
            return cls(1.0 / (2 * k * (k - 2)))
        if k == 3:
            return cls(1.0 / (2 * k * (k - 1)))
        raise DomainError("the Wooley preset needs k >= 3")

    @classmethod
    def montgomery(cls, k: int) -> "HypothesisConfig":
        return cls(1.0 / k)

    @classmethod
    def preset(cls, name: str, k: int) -> "HypothesisConfig":
        table = {"weyl": cls.weyl, "wooley": cls.wooley, "montgomery": cls.montgomery}
        if name not in table:
            raise DomainError(f"unknown tau preset {name!r}; choose from {sorted(table)}")
        return table[name](k)


@dataclass(frozen=True)
class WeylSumSpec:
    """S_N(t, xi) = sum_{n=1}^N e(t n^k + xi n), optionally anchored at a/q.

    ``t`` and ``xi`` may be floats or ``Fraction``s; fractions are summed
    with exact residues.
    """

    degree: int
    length: int
    t: float | Fraction = 0.0
    xi: float | Fraction = 0.0
    rational_anchor: tuple[int, int] | None = None

    def __post_init__(self):
        if self.degree < 1:
            raise DomainError("degree must be >= 1")
        if int(self.length) != self.length or self.length < 1:
            raise DomainError("length N must be an integer >= 1")
        if self.rational_anchor is not None:
            check_anchor(self.t, self.length, self.rational_anchor)


def check_anchor(t, N: int, anchor: tuple[int, int]) -> None:
    a, q = anchor
    if math.gcd(a, q) != 1:
        raise PreconditionError(f"anchor {a}/{q} is not reduced")
    if not (1 <= a < q <= N):
        raise PreconditionError(f"anchor {a}/{q} violates 1 <= a < q <= N = {N}")
    if abs(as_fraction(t) - Fraction(a, q)) > Fraction(1, q * q):
        raise PreconditionError(f"|t - {a}/{q}| exceeds q^-2")


def find_anchor(t, N: int, k: int) -> tuple[int, int]:
    """Best continued-fraction anchor of t with q <= N.

    Among convergents a/q with 1 <= a < q <= N (all of which satisfy
    |t - a/q| <= q^-2) pick the one minimizing 1/q + 1/N + q N^-k; ties go to
    the smallest q.
    """
    tf = as_fraction(t) % 1
    best = None
    for a, q in continued_fraction_convergents(tf, N):
        if not (1 <= a < q):
            continue
        if abs(tf - Fraction(a, q)) > Fraction(1, q * q):
            continue
        cost = Fraction(1, q) + Fraction(1, N) + Fraction(q, N**k)
        if best is None or cost < best[0]:
            best = (cost, a, q)
    if best is None:
        raise PreconditionError(f"no rational anchor a/q with 1 <= a < q <= {N} for t = {t}")
    return best[1], best[2]


def _residue_phases(n: np.ndarray, k: int, t: Fraction, xi: Fraction) -> np.ndarray:
    """e(t n^k + xi n) with both arguments reduced modulo the common denominator."""
    L = math.lcm(t.denominator, xi.denominator)
    ct = t.numerator * (L // t.denominator) % L
    cx = xi.numerator * (L // xi.denominator) % L
    if L < 2**31:
        nk = np.ones_like(n)
        nr = n % L
        for _ in range(k):
            nk = (nk * nr) % L
        res = (ct * nk + cx * nr) % L
        return unit_root(res, np.full_like(res, L))
    # large denominators (e.g. binary expansions of floats): exact Python ints
    res = [(ct * pow(int(m), k, L) + cx * int(m)) % L for m in n]
    num = np.array([Fraction(r, L) for r in res], dtype=object)
    return np.exp(2j * np.pi * num.astype(float))


def _fsum_complex(z: np.ndarray) -> complex:
    return complex(math.fsum(z.real.tolist()), math.fsum(z.imag.tolist()))


def weyl_sum(spec: WeylSumSpec) -> complex:
    """Compensated direct sum of e(t n^k + xi n) for n = 1..N.

    Rational arguments use the period L = lcm of their denominators, so that
    S_N = (N div L) S_L + S_{N mod L} whenever L <= N.
    """
    k, N = spec.degree, int(spec.length)
    t = as_fraction(spec.t)
    xi = as_fraction(spec.xi)
    L = math.lcm(t.denominator, xi.denominator)
    if L <= N:
        n = np.arange(1, L + 1, dtype=np.int64)
        ph = _residue_phases(n, k, t, xi)
        full = _fsum_complex(ph)
        rem = N % L
        part = _fsum_complex(ph[:rem]) if rem else 0j
        return (N // L) * full + part
    n = np.arange(1, N + 1, dtype=np.int64)
    return _fsum_complex(_residue_phases(n, k, t, xi))


def hypothesis_ratio(spec: WeylSumSpec, cfg: HypothesisConfig) -> float:
    """|S_N| / (N (1/q + 1/N + q N^-k)^tau) at the anchor a/q."""
    if spec.rational_anchor is None:
        raise PreconditionError(
            "hypothesis_ratio needs a rational anchor (a, q); use find_anchor to supply a convergent"
        )
    a, q = spec.rational_anchor
    N, k = spec.length, spec.degree
    scale = N * (1.0 / q + 1.0 / N + q * float(N) ** (-k)) ** cfg.tau
    return abs(weyl_sum(spec)) / scale


# --- Gauss sums --------------------------------------------------------------

@dataclass(frozen=True)
class GaussSum:
    degree: int
    dimension: int
    a: int
    q: int
    m: tuple
    value: complex


@lru_cache(maxsize=4096)
def gauss_table(k: int, a: int, q: int) -> np.ndarray:
    """g(a, q, m) = q^-1 sum_{b mod q} e((a b^k + b m)/q) for m = 0..q-1."""
    b = np.arange(q, dtype=np.int64)
    bk = np.ones_like(b)
    for _ in range(k):
        bk = (bk * b) % q
    ph = unit_root(a * bk, np.full_like(b, q))
    out = np.fft.ifft(ph)
    out.setflags(write=False)
    return out


def _check_unit(a: int, q: int) -> None:
    if q < 1 or not (1 <= a <= q):
        raise DomainError(f"need 1 <= a <= q, got a={a}, q={q}")
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd({a}, {q}) != 1")


def gauss_sum(k: int, d: int, a: int, q: int, m: Sequence[int]) -> GaussSum:
    """G(a, q, m) as the product of one-dimensional normalized sums."""
    _check_unit(a, q)
    if len(m) != d:
        raise DomainError(f"m has {len(m)} components, expected {d}")
    tab = gauss_table(k, a % q, q)
    val = 1 + 0j
    for mi in m:
        val *= tab[int(mi) % q]
    return GaussSum(k, d, a, q, tuple(int(x) for x in m), complex(val))


def units(q: int) -> np.ndarray:
    a = np.arange(1, q + 1)
    return a[np.gcd(a, q) == 1]


@dataclass
class HuaTable:
    k: int
    d: int
    q: np.ndarray
    sup: np.ndarray  # sup_{a,m} |G(a,q,m)| (d-dimensional)
    sup_scaled: np.ndarray  # sup * q^{d/k}
    max_scaled: float = field(init=False)
    slope: float = field(init=False)
    scaled_slope: float = field(init=False)

    def __post_init__(self):
        self.max_scaled = float(self.sup_scaled.max())
        big = self.q > 1
        self.slope = loglog_slope(self.q[big], self.sup[big])
        self.scaled_slope = loglog_slope(self.q[big], self.sup_scaled[big])


def hua_diagnostic(k: int, d: int, q_max: int, budget: Budget | None = None) -> HuaTable:
    """Per-q supremum of |G(a,q,m)| q^{d/k} over units a and residues m.

    The product structure reduces the d-dimensional supremum to the d-th
    power of the one-dimensional one.
    """
    budget = budget or DEFAULT_BUDGET
    if q_max < 1:
        raise DomainError("q_max must be >= 1")
    if q_max > budget.hua_q_max:
        raise ResourceError(f"q_max {q_max} exceeds the budget {budget.hua_q_max}")
    qs = np.arange(1, q_max + 1)
    sup1 = np.empty(q_max)
    for i, q in enumerate(qs):
        q = int(q)
        b = np.arange(q, dtype=np.int64)
        bk = np.ones_like(b)
        for _ in range(k):
            bk = (bk * b) % q
        aa = units(q)[:, None]
        ph = unit_root(aa * bk[None, :], np.full((aa.shape[0], q), q))
        sup1[i] = np.abs(np.fft.ifft(ph, axis=1)).max()
    sup = sup1**d
    return HuaTable(k, d, qs, sup, sup * qs.astype(float) ** (d / k))
