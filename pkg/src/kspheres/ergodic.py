"""k-spherical ergodic averages for commuting rotations of the torus T^s.

The system is T_j x = x + alpha_j (j = 1..d).  For a trigonometric observable
f = sum_p c_p e(p . x) the spherical average has the closed form

    A_r f(x) = sum_p c_p e(p . x) a_r(eta(p)) / N(r),   eta(p)_j = p . alpha_j,

which is the spectral shortcut; the direct path sums f along the orbit.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._common import DEFAULT_BUDGET, Budget, DomainError, loglog_slope
from .lattice import SphereSpec, count_table, exp_sum_table, sphere_exp_sum, sphere_points


def _frac_mod1(x):
    if isinstance(x, Fraction):
        return x - math.floor(x)
    return float(x) - math.floor(float(x))


@dataclass(frozen=True)
class TorusSystem:
    """Rotations alpha_1..alpha_d of T^s; entries may be floats or Fractions."""

    s: int
    alphas: tuple  # d rows of s entries

    def __post_init__(self):
        if self.s < 1:
            raise DomainError("ambient dimension s must be >= 1")
        rows = tuple(tuple(_frac_mod1(v) if isinstance(v, Fraction) else float(v) % 1.0 for v in row)
                     for row in self.alphas)
        if not rows or any(len(row) != self.s for row in rows):
            raise DomainError("each alpha_j needs s components")
        object.__setattr__(self, "alphas", rows)

    @property
    def d(self) -> int:
        return len(self.alphas)

    @property
    def rational(self) -> bool:
        return all(isinstance(v, Fraction) for row in self.alphas for v in row)

    def eta(self, p: Sequence[int]) -> tuple:
        """(p . alpha_j mod 1)_j, exact for rational systems."""
        out = []
        for row in self.alphas:
            if all(isinstance(v, Fraction) for v in row):
                val = sum((int(pi) * v for pi, v in zip(p, row)), Fraction(0))
                out.append(_frac_mod1(val))
            else:
                val = math.fsum(int(pi) * float(v) for pi, v in zip(p, row))
                out.append(val - math.floor(val))
        return tuple(out)

    def to_json(self) -> dict:
        return {"s": self.s, "alphas": [[str(v) if isinstance(v, Fraction) else v for v in row] for row in self.alphas]}


@dataclass(frozen=True)
class TrigObservable:
    """f(x) = sum_p c_p e(p . x) on T^s."""

    freqs: tuple  # tuples of s integers
    coeffs: tuple  # complex coefficients

    def __post_init__(self):
        fr = tuple(tuple(int(v) for v in p) for p in self.freqs)
        co = tuple(complex(c) for c in self.coeffs)
        if len(fr) != len(co):
            raise DomainError("frequencies and coefficients differ in length")
        if len({len(p) for p in fr}) > 1:
            raise DomainError("all frequencies need the same length")
        object.__setattr__(self, "freqs", fr)
        object.__setattr__(self, "coeffs", co)

    @property
    def s(self) -> int:
        return len(self.freqs[0]) if self.freqs else 0

    @property
    def mean(self) -> complex:
        return sum((c for p, c in zip(self.freqs, self.coeffs) if not any(p)), 0j)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at points x of shape (..., s)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1], dtype=complex)
        for p, c in zip(self.freqs, self.coeffs):
            out += c * np.exp(2j * np.pi * np.mod(x @ np.asarray(p, dtype=float), 1.0))
        return out

    def coefficient_l1(self) -> float:
        return float(sum(abs(c) for c in self.coeffs))

    def to_json(self) -> dict:
        return {
            "freqs": [list(p) for p in self.freqs],
            "coeffs_re": [c.real for c in self.coeffs],
            "coeffs_im": [c.imag for c in self.coeffs],
        }


def system_from_json(obj: dict) -> tuple[TorusSystem, TrigObservable | None]:
    """Parse {s, alphas, freqs, coeffs_re, coeffs_im} (or real ``coeffs``); alpha strings like '1/2' become Fractions."""
    def parse(v):
        if isinstance(v, str):
            return Fraction(v)
        return float(v)

    try:
        sys_ = TorusSystem(int(obj["s"]), tuple(tuple(parse(v) for v in row) for row in obj["alphas"]))
        f = None
        if "freqs" in obj:
            re = obj["coeffs_re"] if "coeffs_re" in obj else obj["coeffs"]  # plain "coeffs" means real
            im = obj.get("coeffs_im", [0.0] * len(re))
            f = TrigObservable(tuple(tuple(p) for p in obj["freqs"]),
                               tuple(complex(a, b) for a, b in zip(re, im)))
    except (KeyError, TypeError) as e:
        raise DomainError(f"malformed system descriptor: missing or invalid {e}") from None
    return sys_, f


def _check(sys_: TorusSystem, f: TrigObservable, spec: SphereSpec | None = None):
    if f.s != sys_.s:
        raise DomainError("observable and system live on tori of different dimension")
    if spec is not None and spec.d != sys_.d:
        raise DomainError("sphere dimension must equal the number of rotations")


def _eta_arg(eta: tuple):
    """Frequency argument for the lattice DP: Fractions stay exact."""
    return [e if isinstance(e, Fraction) else float(e) for e in eta]


def ergodic_average(sys_: TorusSystem, f: TrigObservable, spec: SphereSpec, x: Sequence[float],
                    method: str = "spectral", budget: Budget | None = None) -> complex:
    """N^{-1} sum_{n in S_r} f(T^n x) by the direct orbit sum or the spectral shortcut."""
    budget = budget or DEFAULT_BUDGET
    _check(sys_, f, spec)
    N = int(count_table(spec.k, spec.d, spec.level, budget)[spec.level])
    if N == 0:
        raise DomainError(f"level {spec.level} is not admissible: the sphere is empty")
    x = np.asarray(x, dtype=float)
    if method == "direct":
        pts = sphere_points(spec, budget=budget)
        alpha = np.array([[float(v) for v in row] for row in sys_.alphas])  # (d, s)
        total = 0j
        for p, c in zip(f.freqs, f.coeffs):
            eta = np.array([float(e) for e in sys_.eta(p)])
            ph = np.mod(pts @ eta, 1.0)
            base = float(np.dot(p, x))
            vals = np.exp(2j * np.pi * np.mod(ph + base, 1.0))
            total += c * complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))
        del alpha
        return total / N
    if method == "spectral":
        total = 0j
        for p, c in zip(f.freqs, f.coeffs):
            a = sphere_exp_sum(spec, _eta_arg(sys_.eta(p)), budget).value
            total += c * np.exp(2j * np.pi * (float(np.dot(p, x)) % 1.0)) * a / N
        return complex(total)
    raise DomainError(f"unknown method {method!r}")


def sample_points(s: int, count: int = 8, seed: int = 0) -> np.ndarray:
    """Kronecker (R_s) quasi-random points on T^s with a seeded offset."""
    # generalized golden ratio: the positive root of x^{s+1} = x + 1
    phi = 2.0
    for _ in range(64):
        phi = (1.0 + phi) ** (1.0 / (s + 1))
    g = np.array([phi ** -(i + 1) for i in range(s)])
    x0 = np.random.default_rng(seed).random(s)
    idx = np.arange(1, count + 1)[:, None]
    return np.mod(x0[None, :] + idx * g[None, :], 1.0)


@dataclass
class ConvergenceScan:
    levels: np.ndarray
    radii: np.ndarray
    deviations: np.ndarray  # (levels, samples) |A_r f(x) - mean|
    max_deviation: np.ndarray
    slope: float


def _multipliers(sys_: TorusSystem, f: TrigObservable, k: int, d: int, n_max: int, budget) -> tuple:
    """a_r(eta(p)) at every level 0..n_max for each frequency, and the counts."""
    N = np.asarray(count_table(k, d, n_max, budget), dtype=float)
    tabs = [exp_sum_table(k, d, n_max, _eta_arg(sys_.eta(p)), budget).real for p in f.freqs]
    return np.array(tabs), N


def convergence_scan(sys_: TorusSystem, f: TrigObservable, k: int, d: int, levels: Sequence[int],
                     x_samples: np.ndarray | None = None, seed: int = 0,
                     budget: Budget | None = None) -> ConvergenceScan:
    """Deviation |A_r f(x) - mean f| along the listed levels at sample points (spectral path)."""
    budget = budget or DEFAULT_BUDGET
    _check(sys_, f)
    if d != sys_.d:
        raise DomainError("d must equal the number of rotations")
    levels = np.asarray(levels, dtype=np.int64)
    if x_samples is None:
        x_samples = sample_points(sys_.s, 8, seed)
    x_samples = np.atleast_2d(np.asarray(x_samples, dtype=float))
    tabs, N = _multipliers(sys_, f, k, d, int(levels.max()), budget)
    if np.any(N[levels] == 0):
        bad = levels[N[levels] == 0]
        raise DomainError(f"levels {bad.tolist()} are not admissible")
    coeffs = np.asarray(f.coeffs)
    fr = np.asarray(f.freqs, dtype=float)
    chars = np.exp(2j * np.pi * np.mod(x_samples @ fr.T, 1.0)) * coeffs[None, :]  # (S, P)
    mult = tabs[:, levels] / N[levels][None, :]  # (P, L)
    avg = (chars @ mult).T  # (L, S)
    dev = np.abs(avg - f.mean)
    mx = dev.max(axis=1)
    radii = levels.astype(float) ** (1.0 / k)
    return ConvergenceScan(levels, radii, dev, mx, loglog_slope(radii, mx))


@dataclass
class SpectralMeasure:
    atoms: list  # eta tuples
    weights: np.ndarray

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def mass_at(self, eta: Sequence, tol: float = 0.0) -> float:
        tot = 0.0
        for a, w in zip(self.atoms, self.weights):
            if all(_circle_dist(x, y) <= tol for x, y in zip(a, eta)):
                tot += w
        return tot

    def integrate_monomial(self, m: Sequence[int]) -> complex:
        """int e(m . eta) d nu(eta)."""
        return complex(sum(w * np.exp(2j * np.pi * (math.fsum(float(mi) * float(e) for mi, e in zip(m, a)) % 1.0))
                           for a, w in zip(self.atoms, self.weights)))


def _circle_dist(x, y) -> float:
    t = float(x) - float(y)
    return abs(t - round(t))


def spectral_measure(sys_: TorusSystem, f: TrigObservable) -> SpectralMeasure:
    """Atoms eta(p) with weights |c_p|^2; coinciding atoms are merged."""
    _check(sys_, f)
    merged: dict = {}
    order = []
    for p, c in zip(f.freqs, f.coeffs):
        key = sys_.eta(p)
        if key not in merged:
            merged[key] = 0.0
            order.append(key)
        merged[key] += abs(c) ** 2
    return SpectralMeasure(order, np.array([merged[k] for k in order]))


def correlation(sys_: TorusSystem, f: TrigObservable, m: Sequence[int]) -> complex:
    """<T^m f, f> = int f(x + sum m_j alpha_j) conj f(x) dx, by exact grid quadrature.

    A trigonometric polynomial of degree D is integrated exactly by the mean
    over a uniform grid with more than 2D points per axis.
    """
    _check(sys_, f)
    D = max(1, max(max(abs(v) for v in p) for p in f.freqs))
    G = 2 * D + 1
    grid = np.stack(np.meshgrid(*([np.arange(G) / G] * sys_.s), indexing="ij"), axis=-1).reshape(-1, sys_.s)
    alpha = np.array([[float(v) for v in row] for row in sys_.alphas])
    shift = np.asarray(m, dtype=float) @ alpha
    return complex(np.mean(f(np.mod(grid + shift, 1.0)) * np.conj(f(grid))))


def verify_spectral_identity(sys_: TorusSystem, f: TrigObservable, count: int = 20, bound: int = 50,
                             seed: int = 0) -> float:
    """Largest |<T^m f, f> - int e(m . eta) d nu_f| over random m."""
    rng = np.random.default_rng(seed)
    nu = spectral_measure(sys_, f)
    worst = 0.0
    for _ in range(count):
        m = rng.integers(-bound, bound + 1, size=sys_.d)
        worst = max(worst, abs(correlation(sys_, f, m) - nu.integrate_monomial(m)))
    return worst


@dataclass
class ErgodicityVerdict:
    status: str  # yes | no | undecided
    witness: tuple | None = None  # (q, p) of the closest relation found
    residual: float = float("nan")
    note: str = ""


def strongly_ergodic(sys_: TorusSystem, q_max: int = 50, p_max: int = 20, tol: float = 1e-9) -> ErgodicityVerdict:
    """Is the family (T_j^q) ergodic for every q >= 1?

    It fails exactly when some q >= 1 and nonzero p in Z^s have q (p . alpha_j) in Z
    for all j.  Rational systems always fail (q = common denominator).  For
    float data the search runs over q <= q_max and |p|_inf <= p_max: a relation
    at round-off level means 'no', a near-relation below ``tol`` means
    'undecided', and no relation in the box means 'yes' (within the box).
    """
    if sys_.rational:
        den = 1
        for row in sys_.alphas:
            for v in row:
                den = math.lcm(den, v.denominator)
        p = (1,) + (0,) * (sys_.s - 1)
        return ErgodicityVerdict("no", (den, p), 0.0, "rational rotations")
    alpha = np.array([[float(v) for v in row] for row in sys_.alphas])  # (d, s)
    rng = range(-p_max, p_max + 1)
    ps = np.array([p for p in itertools.product(rng, repeat=sys_.s) if any(p) and next(v for v in p if v) > 0],
                  dtype=float)
    base = ps @ alpha.T  # (P, d)
    best = (float("inf"), None)
    for q in range(1, q_max + 1):
        v = q * base
        res = np.abs(v - np.rint(v)).max(axis=1)
        i = int(np.argmin(res))
        if res[i] < best[0]:
            best = (float(res[i]), (q, tuple(int(x) for x in ps[i])))
    scale = max(1.0, float(q_max * p_max * sys_.s))
    if best[0] <= 64 * np.finfo(float).eps * scale:
        return ErgodicityVerdict("no", best[1], best[0], "relation at round-off level")
    if best[0] < tol:
        return ErgodicityVerdict("undecided", best[1], best[0], "near-relation below tolerance")
    return ErgodicityVerdict("yes", best[1], best[0], f"no relation with q <= {q_max}, |p| <= {p_max}")


@dataclass
class LowHighSplit:
    r_j: float
    low_mass: float
    high_levels: np.ndarray
    high_values: np.ndarray
    high_decay_slope: float
    predicted: float


def low_high_split_diagnostic(sys_: TorusSystem, f: TrigObservable, k: int, d: int, r_j: float,
                              levels: Sequence[int], x: Sequence[float] | None = None, bins: int = 12,
                              budget: Budget | None = None) -> LowHighSplit:
    """Spectral mass near 0 and decay of the high-frequency part of A_r f.

    low_mass = nu_f({|eta|_inf <= 1/r_j}) with |.| the distance to the nearest
    integer.  The high part keeps the atoms outside that box; its size at x
    is fitted against r on the per-bin maxima of a geometric binning of the
    levels, and compared with -(d-1)/k.
    """
    if r_j <= 0:
        raise DomainError("r_j must be positive")
    _check(sys_, f)
    nu = spectral_measure(sys_, f)
    low = 0.0
    high_idx = []
    for i, (p, c) in enumerate(zip(f.freqs, f.coeffs)):
        eta = sys_.eta(p)
        if max(_circle_dist(e, 0) for e in eta) <= 1.0 / r_j:
            low += abs(c) ** 2
        else:
            high_idx.append(i)
    del nu
    levels = np.asarray(levels, dtype=np.int64)
    x = np.zeros(sys_.s) if x is None else np.asarray(x, dtype=float)
    vals = np.zeros(levels.size)
    if high_idx:
        tabs, N = _multipliers(sys_, TrigObservable(tuple(f.freqs[i] for i in high_idx),
                                                    tuple(f.coeffs[i] for i in high_idx)), k, d,
                               int(levels.max()), budget or DEFAULT_BUDGET)
        ok = N[levels] > 0
        levels = levels[ok]
        chars = np.array([f.coeffs[i] * np.exp(2j * np.pi * (float(np.dot(f.freqs[i], x)) % 1.0)) for i in high_idx])
        vals = np.abs(chars @ (tabs[:, levels] / N[levels][None, :]))
    radii = levels.astype(float) ** (1.0 / k)
    slope = float("nan")
    if high_idx and levels.size >= 4:
        edges = np.geomspace(radii.min(), radii.max() * (1 + 1e-12), bins + 1)
        br, bv = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            sel = (radii >= lo) & (radii < hi)
            if sel.any():
                j = np.argmax(np.where(sel, vals, -1.0))
                br.append(radii[j])
                bv.append(vals[j])
        slope = loglog_slope(br, bv)
    return LowHighSplit(r_j, low, levels, vals, slope, -(d - 1) / k)
