"""Spherical averages and maximal functions on the finite torus (Z/LZ)^d.

Averages are cyclic convolutions with the normalized sphere indicator.  For
data supported well inside the window (L > 4 r_max) the cyclic result agrees
with the average on Z^d.
"""
from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ._common import DEFAULT_BUDGET, Budget, DomainError, ResourceError, loglog_slope
from .lattice import SphereSpec, count_table, sphere_points

MAGIC = b"KSGF"
SPARSE_LIMIT = 10**5


@dataclass(frozen=True)
class GridFunction:
    """Complex values on (Z/LZ)^d, stored as a C-ordered array of shape (L,)*d."""

    L: int
    d: int
    values: np.ndarray

    def __post_init__(self):
        if self.L < 1 or self.d < 1:
            raise DomainError("need L >= 1 and d >= 1")
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.L,) * self.d:
            raise DomainError(f"values have shape {v.shape}, expected {(self.L,) * self.d}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, L: int, d: int) -> "GridFunction":
        return cls(L, d, np.zeros((L,) * d, dtype=complex))

    @classmethod
    def constant(cls, L: int, d: int, c: complex = 1.0) -> "GridFunction":
        return cls(L, d, np.full((L,) * d, c, dtype=complex))

    @classmethod
    def delta(cls, L: int, d: int, at: Sequence[int] | None = None) -> "GridFunction":
        v = np.zeros((L,) * d, dtype=complex)
        v[tuple(np.mod(at, L)) if at is not None else (0,) * d] = 1.0
        return cls(L, d, v)

    @classmethod
    def character(cls, L: int, d: int, p: Sequence[int]) -> "GridFunction":
        """x -> e(x . p / L), a lattice character with frequency p/L."""
        idx = np.indices((L,) * d)
        phase = np.zeros((L,) * d, dtype=np.int64)
        for i in range(d):
            phase = phase + idx[i] * int(p[i])
        return cls(L, d, np.exp(2j * np.pi * np.mod(phase, L) / L))

    def norm(self, p: float) -> float:
        a = np.abs(self.values)
        if math.isinf(p):
            return float(a.max())
        return float(np.sum(a**p) ** (1.0 / p))

    def save(self, path: str | Path) -> None:
        """Flat binary: b'KSGF', uint32 L, uint32 d, then L^d complex128, little-endian."""
        path = Path(path)
        with open(path, "wb") as fh:
            fh.write(MAGIC + struct.pack("<II", self.L, self.d))
            fh.write(self.values.astype("<c16").tobytes(order="C"))
        meta = {"L": self.L, "d": self.d, "dtype": "complex128", "byteorder": "little", "order": "C"}
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(meta, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "GridFunction":
        raw = Path(path).read_bytes()
        if raw[:4] != MAGIC:
            raise DomainError("not a grid-function file")
        L, d = struct.unpack("<II", raw[4:12])
        vals = np.frombuffer(raw[12:], dtype="<c16")
        if vals.size != L**d:
            raise DomainError("truncated grid-function file")
        return cls(L, d, vals.reshape((L,) * d))


def _spec_points(spec: SphereSpec, budget: Budget) -> np.ndarray:
    pts = sphere_points(spec, budget=budget)
    if pts.shape[0] == 0:
        raise DomainError(
            f"level {spec.level} is not in the admissible radius set Lambda_{{{spec.k},{spec.d}}}: the sphere is empty"
        )
    return pts


def _average_sparse(values: np.ndarray, pts: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values)
    axes = tuple(range(values.ndim))
    for y in pts:
        out += np.roll(values, shift=tuple(int(c) for c in y), axis=axes)
    return out / pts.shape[0]


def _average_fft(values: np.ndarray, pts: np.ndarray, L: int) -> np.ndarray:
    ind = np.zeros(values.shape)
    np.add.at(ind, tuple(np.mod(pts, L).T), 1.0)
    out = np.fft.ifftn(np.fft.fftn(values) * np.fft.fftn(ind))
    return out / pts.shape[0]


def spherical_average(f: GridFunction, spec: SphereSpec, method: str = "auto",
                      budget: Budget | None = None) -> GridFunction:
    """A_r f(x) = N^{-1} sum_{y in S_r} f(x - y), cyclic on the torus."""
    budget = budget or DEFAULT_BUDGET
    if spec.d != f.d:
        raise DomainError("sphere and grid dimensions differ")
    pts = _spec_points(spec, budget)
    if method == "auto":
        method = "sparse" if pts.shape[0] * f.values.size <= 5e7 and pts.shape[0] < SPARSE_LIMIT else "fft"
    if method == "sparse":
        vals = _average_sparse(f.values, pts)
    elif method == "fft":
        vals = _average_fft(f.values, pts, f.L)
    else:
        raise DomainError(f"unknown method {method!r}")
    return GridFunction(f.L, f.d, vals)


def admissible_levels_in(k: int, d: int, lo: int, hi: int) -> np.ndarray:
    """Levels n in [lo, hi) with a nonempty sphere, n >= 1."""
    lo = max(1, int(lo))
    if hi <= lo:
        return np.zeros(0, dtype=np.int64)
    table = count_table(k, d, hi - 1)
    lv = np.arange(lo, hi)
    return lv[np.asarray(table[lo:hi], dtype=float) > 0]


def _block_levels(k: int, R: int, level_cap: int | None = None) -> tuple[int, int]:
    lo, hi = R**k, (2 * R) ** k
    if level_cap is not None:
        hi = min(hi, level_cap + 1)
    return lo, hi


def _sup_over_levels(f: GridFunction, k: int, levels: np.ndarray, method: str, budget: Budget) -> np.ndarray:
    out = np.zeros(f.values.shape)
    if method == "fft" or (method == "auto" and levels.size > 8):
        F = np.fft.fftn(f.values)
        for n in levels:
            pts = sphere_points(SphereSpec(k, f.d, int(n)), budget=budget)
            ind = np.zeros(f.values.shape)
            np.add.at(ind, tuple(np.mod(pts, f.L).T), 1.0)
            avg = np.fft.ifftn(F * np.fft.fftn(ind)) / pts.shape[0]
            np.maximum(out, np.abs(avg), out=out)
        return out
    for n in levels:
        avg = spherical_average(f, SphereSpec(k, f.d, int(n)), "auto", budget)
        np.maximum(out, np.abs(avg.values), out=out)
    return out


def dyadic_maximal(f: GridFunction, k: int, d: int, R: int, method: str = "auto",
                   budget: Budget | None = None, level_cap: int | None = None) -> GridFunction:
    """sup of |A_r f| over admissible r in [R, 2R), i.e. levels in [R^k, (2R)^k)."""
    budget = budget or DEFAULT_BUDGET
    if d != f.d:
        raise DomainError("dimension mismatch")
    lo, hi = _block_levels(k, int(R), level_cap)
    levels = admissible_levels_in(k, d, lo, hi)
    if levels.size == 0:
        raise DomainError(f"no admissible radius in [{R}, {2 * R})")
    return GridFunction(f.L, f.d, _sup_over_levels(f, k, levels, method, budget).astype(complex))


def _dyadic_blocks(r_max: float) -> list[int]:
    out, R = [], 1
    while R <= r_max:
        out.append(R)
        R *= 2
    return out


def full_maximal(f: GridFunction, k: int, d: int, r_max: float, method: str = "auto",
                 budget: Budget | None = None) -> GridFunction:
    """sup of |A_r f| over admissible 0 < r <= r_max, streamed block by block."""
    budget = budget or DEFAULT_BUDGET
    cap = int(math.floor(float(r_max) ** k + 1e-9))
    if admissible_levels_in(k, d, 1, cap + 1).size == 0:
        raise DomainError(f"no admissible radius r <= {r_max}")
    out = np.zeros(f.values.shape)
    for R in _dyadic_blocks(r_max):
        lo, hi = _block_levels(k, R, cap)
        if admissible_levels_in(k, d, lo, hi).size == 0:
            continue
        blk = dyadic_maximal(f, k, d, R, method, budget, level_cap=cap)
        np.maximum(out, blk.values.real, out=out)
    return GridFunction(f.L, f.d, out.astype(complex))


@dataclass
class MaxOpReport:
    p: float
    r_max: float
    value: float
    block_R: list = field(default_factory=list)
    partial: list = field(default_factory=list)  # ratio after each dyadic block


def maximal_ratio(f: GridFunction, k: int, d: int, r_max: float, p: float, method: str = "auto",
                  budget: Budget | None = None) -> MaxOpReport:
    """||A_* f||_p / ||f||_p with the running value after each dyadic block."""
    if not p > 1:
        raise DomainError("p must exceed 1")
    budget = budget or DEFAULT_BUDGET
    cap = int(math.floor(float(r_max) ** k + 1e-9))
    out = np.zeros(f.values.shape)
    fn = f.norm(p)
    rep = MaxOpReport(p, r_max, 0.0)
    for R in _dyadic_blocks(r_max):
        lo, hi = _block_levels(k, R, cap)
        if admissible_levels_in(k, d, lo, hi).size == 0:
            continue
        blk = dyadic_maximal(f, k, d, R, method, budget, level_cap=cap)
        np.maximum(out, blk.values.real, out=out)
        val = GridFunction(f.L, f.d, out).norm(p) / fn
        rep.block_R.append(R)
        rep.partial.append(val)
        rep.value = val
    if not rep.partial:
        raise DomainError(f"no admissible radius r <= {r_max}")
    return rep


# --- the delta test ------------------------------------------------------------------------

def delta_partial_sums(k: int, d: int, p: float, rhos: Sequence[float]) -> np.ndarray:
    """||A_* delta||_p^p restricted to radii <= rho: sum over admissible n <= rho^k of N(n)^{1-p}.

    Each x != 0 lies on exactly one sphere (level |x|^k), where A_* delta = 1/N.
    For p = inf the value is the supremum max_n 1/N(n).
    """
    rhos = np.asarray(rhos, dtype=float)
    caps = np.floor(rhos**k + 1e-9).astype(np.int64)
    n_max = int(caps.max())
    N = np.asarray(count_table(k, d, n_max), dtype=float)[1:]
    ok = N > 0
    if math.isinf(p):
        term = np.where(ok, 1.0 / np.where(ok, N, 1.0), 0.0)
        run = np.maximum.accumulate(term)
    else:
        term = np.where(ok, np.where(ok, N, 1.0) ** (1.0 - p), 0.0)
        run = np.cumsum(term)
    return np.array([run[c - 1] if c >= 1 else 0.0 for c in caps])


@dataclass
class ProbeRow:
    p: float
    rhos: np.ndarray
    partial: np.ndarray
    slope: float
    converging: bool


@dataclass
class ProbeTable:
    k: int
    d: int
    r_max: float
    rows: list
    threshold: float  # d/(d-k)
    crossover: float  # smallest listed p that flattens
    flat_tol: float


def lp_threshold_probe(k: int, d: int, p_list: Sequence[float], r_max: float, points: int = 12,
                       fit_from: float = 0.25, flat_tol: float = 0.02) -> ProbeTable:
    """Growth slopes of the delta partial sums against the radius.

    The slope is the log-log fit of the partial sum against rho over
    rho in [fit_from * r_max, r_max]; slope ~ 0 means the sums have settled.
    """
    if any(not (p > 1) for p in p_list):
        raise DomainError("every p must exceed 1")
    rhos = np.geomspace(max(1.0, fit_from * r_max), r_max, points)
    rows = []
    for p in p_list:
        s = delta_partial_sums(k, d, p, rhos)
        slope = 0.0 if math.isinf(p) else loglog_slope(rhos, s)
        rows.append(ProbeRow(float(p), rhos, s, slope, bool(slope < flat_tol)))
    flat = [row.p for row in rows if row.converging]
    thr = d / (d - k) if d > k else float("inf")
    return ProbeTable(k, d, r_max, rows, thr, min(flat) if flat else float("nan"), flat_tol)
