"""Shared errors, budgets and small numerical helpers."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


class KSpheresError(Exception):
    """Base class for all library errors."""


class DomainError(KSpheresError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(KSpheresError, ValueError):
    """A caller-side precondition (e.g. a missing rational anchor) is unmet."""


class ResourceError(KSpheresError, RuntimeError):
    """A configured budget (level, enumeration cap, grid size, ...) is exceeded."""


@dataclass(frozen=True)
class Budget:
    level_max: int = 10**7
    enumeration_cap: int = 10**7
    farey_max: int = 10**5
    hua_q_max: int = 200
    shell_dim_max: int = 4
    grid_points_max: int = 4 * 10**8
    rows_max: int = 10**6


DEFAULT_BUDGET = Budget()


def unit_root(num, den) -> np.ndarray:
    """e(num/den) for integer arrays, exact at multiples of 1/4.

    Residues are reduced before the angle is formed, so the phase error does
    not grow with ``num``.
    """
    num = np.asarray(num, dtype=np.int64)
    den = np.asarray(den, dtype=np.int64)
    res = np.mod(num, den)
    out = np.exp(2j * np.pi * (res / den))
    quarter = np.mod(4 * res, den) == 0
    if np.any(quarter):
        table = np.array([1, 1j, -1, -1j], dtype=complex)
        idx = (4 * res // np.where(den == 0, 1, den)) % 4
        out = np.where(quarter, table[idx], out)
    return out


def frac_part(x: float | Fraction) -> Fraction | float:
    if isinstance(x, Fraction):
        return x - (x.numerator // x.denominator)
    return x - np.floor(x)


def is_rational(x) -> bool:
    return isinstance(x, (int, np.integer, Fraction))


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x (positive entries only)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])


def fmt17(x) -> str:
    """Format a number with 17 significant digits (integers stay integers)."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return format(float(x), ".17g")


def integer_kth_root(n: int, k: int) -> int:
    """Largest j >= 0 with j**k <= n."""
    if n < 0:
        raise DomainError("negative level")
    if n < 2:
        return n
    j = int(round(n ** (1.0 / k)))
    while j**k > n:
        j -= 1
    while (j + 1) ** k <= n:
        j += 1
    return j
