"""Main term of the approximation formula and the measured error E_r.

For a sphere of level n = r^k the main term at xi in T^d is

    C(xi) = r^{d-k} sum_{q <= Q} sum_{a in U_q} e(-a n/q) G(a, q, m)
            Psi(q xi - m) dsigma_r(xi - m/q),

with m the integer vector nearest to q xi and G(a, q, m) the product of the
one-dimensional sums q^{-1} sum_b e((a b^k + b m_i)/q).  The error is the
difference with the exact exponential sum on a uniform grid.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

from ._common import DEFAULT_BUDGET, Budget, DomainError, ResourceError, loglog_slope, unit_root
from .expsums import gauss_table, hua_diagnostic, units
from .farey import FareyArc
from .lattice import SphereSpec, count_table, exp_sum_points, integer_kth_root
from .surface import (
    DEFAULT_BUMP,
    DEFAULT_QUAD,
    BumpFunction,
    QuadratureConfig,
    full_line_t_integral,
    sigma_hat_bessel,
    sigma_hat_unit,
    sphere_volume,
    t_integral,
)


def default_Q(r: float, cap: int = 200) -> int:
    return int(min(cap, max(1, math.ceil(math.sqrt(r)))))


def _radius(spec: SphereSpec) -> float:
    return float(spec.level) ** (1.0 / spec.k)


@dataclass
class MainTermEval:
    spec: SphereSpec
    Q: int
    frequency: tuple
    value: complex
    per_q: np.ndarray  # contribution of each q = 1..Q
    tail_bound: float


def _arith_weights(k: int, n: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Units a mod q, phases e(-a n/q) and the table g(a, q, .) for each unit."""
    a = units(q)
    ph = unit_root(-a * (n % q), np.full(a.shape, q))
    tabs = np.stack([gauss_table(k, int(x), q) for x in a])
    return ph, tabs


def singular_series(k: int, d: int, n: int, Q: int) -> complex:
    """Truncated singular series sum_{q <= Q} sum_a e(-a n/q) G(a, q, 0)."""
    total = 0j
    for q in range(1, Q + 1):
        ph, tabs = _arith_weights(k, n, q)
        total += complex(np.dot(ph, tabs[:, 0] ** d))
    return total


def _sigma_values(k: int, d: int, r: float, eta: np.ndarray, cfg: QuadratureConfig, budget) -> np.ndarray:
    if k == 2 and cfg.method in ("auto", "bessel"):
        return sigma_hat_bessel(d, r * np.linalg.norm(eta, axis=1))
    return np.array([sigma_hat_unit(k, d, r * e, cfg, budget)[0] for e in eta])


def main_term_points(k: int, d: int, n: int, xi: np.ndarray, Q: int, bump: BumpFunction = DEFAULT_BUMP,
                     cfg: QuadratureConfig = DEFAULT_QUAD, budget: Budget | None = None,
                     per_q: bool = False):
    """Main term at each row of ``xi`` (shape (P, d)); optionally the per-q split."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    if xi.shape[1] != d:
        raise DomainError(f"frequencies must have {d} components")
    if Q < 1:
        raise DomainError("Q must be >= 1")
    r = float(n) ** (1.0 / k)
    pre = r ** (d - k)
    P = xi.shape[0]
    out = np.zeros(P, dtype=complex)
    split = np.zeros((P, Q), dtype=complex) if per_q else None
    for q in range(1, Q + 1):
        m = np.rint(q * xi)  # half-integers round to even
        psi = bump(q * xi - m)
        live = np.nonzero(psi > 0)[0]
        if live.size == 0:
            continue
        mm = m[live].astype(np.int64) % q
        ph, tabs = _arith_weights(k, n, q)
        g = np.ones((ph.size, live.size), dtype=complex)
        for i in range(d):
            g *= tabs[:, mm[:, i]]
        S = ph @ g
        eta = xi[live] - m[live] / q
        sig = _sigma_values(k, d, r, eta, cfg, budget)
        contrib = pre * S * psi[live] * sig
        out[live] += contrib
        if per_q:
            split[live, q - 1] = contrib
    return (out, split) if per_q else out


def hua_constant(k: int, d: int, q_max: int = 200) -> float:
    """max_q sup_{a,m} |G(a,q,m)| q^{d/k} over q <= q_max."""
    h = hua_diagnostic(k, 1, q_max)
    return float(h.max_scaled**d)


def tail_bound(k: int, d: int, r: float, Q: int, C_hua: float | None = None) -> float:
    """Bound for sum_{q > Q}: r^{d-k} Vol C_H sum_{q > Q} q^{1-d/k}.

    phi(q) <= q units, |G| <= C_H q^{-d/k} and |Psi dsigma| <= Vol.  The sum
    is bounded by the integral Q^{2-d/k}/(d/k - 2); it diverges for d/k <= 2.
    """
    s = d / k
    if s <= 2:
        return float("inf")
    if C_hua is None:
        C_hua = hua_constant(k, d, 200)
    return r ** (d - k) * sphere_volume(k, d) * C_hua * Q ** (2 - s) / (s - 2)


def main_term(spec: SphereSpec, xi: Sequence[float], Q: int | None = None, bump: BumpFunction | None = None,
              cfg: QuadratureConfig | None = None, budget: Budget | None = None) -> MainTermEval:
    r = _radius(spec)
    Q = default_Q(r) if Q is None else int(Q)
    bump = bump or DEFAULT_BUMP
    cfg = cfg or DEFAULT_QUAD
    val, split = main_term_points(spec.k, spec.d, spec.level, np.asarray(xi, dtype=float)[None, :], Q, bump,
                                  cfg, budget, per_q=True)
    return MainTermEval(spec, Q, tuple(float(x) for x in xi), complex(val[0]), split[0],
                        tail_bound(spec.k, spec.d, r, Q))


# --- J and I multipliers ---------------------------------------------------------------

@dataclass
class JIMultipliers:
    m: tuple
    eta: tuple
    J: complex
    I: complex
    I_closed: complex  # r^{d-k} e^{-2 pi eps r^k} dsigma_r(eta)


def j_and_i_multipliers(k: int, d: int, r: float, arc: FareyArc, xi: Sequence[float], eps: float,
                        cfg: QuadratureConfig | None = None) -> JIMultipliers:
    """J_r and I_r at xi - m/q for the arc of a/q.

    J integrates prod h_{t + i eps}(xi_i - m_i/q) e(-r^k t) over the shifted arc,
    I over the whole line.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    cfg = cfg or DEFAULT_QUAD
    xi = np.asarray(xi, dtype=float)
    q = arc.q
    m = np.rint(q * xi)
    eta = xi - m / q
    lam = float(r) ** k
    J = t_integral(k, eta, eps, lam, float(arc.shift_lo), float(arc.shift_hi))
    I = full_line_t_integral(k, eta, eps, lam)
    sig = sigma_hat_unit(k, d, r * eta, cfg)[0]
    closed = r ** (d - k) * math.exp(-2 * math.pi * eps * lam) * sig
    return JIMultipliers(tuple(int(x) for x in m), tuple(eta.tolist()), J, I, complex(closed))


# --- error scans ------------------------------------------------------------------------

@dataclass
class ErrorReport:
    spec: SphereSpec
    Q: int
    M: int
    sup_error: float
    l2_error: float
    normalized_error: float
    normalized_sup: float
    points: int
    mode: str
    error_at_zero: float
    extra: dict = field(default_factory=dict)


def _fold_weights(F: int, M: int) -> np.ndarray:
    w = np.full(F, 2.0)
    w[0] = 1.0
    if M % 2 == 0:
        w[-1] = 1.0
    return w


def _tuples(F: int, size: int) -> np.ndarray:
    if size == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.combinations_with_replacement(range(F), size)), dtype=np.int64).reshape(-1, size)


def _coord_phase_table(F: int, M: int, jmax: int) -> np.ndarray:
    """t1[i, j] = sum over m = +-j of e(m i/M) (1 for j = 0)."""
    i = np.arange(F)[:, None]
    j = np.arange(jmax + 1)[None, :]
    t = 2.0 * np.cos(2.0 * np.pi * np.mod(i * j, M) / M)
    t[:, 0] = 1.0
    return t


def _level_table(tuples: np.ndarray, t1: np.ndarray, powers: np.ndarray, n: int) -> np.ndarray:
    """Exponential sums of each tuple of coordinates at every level 0..n."""
    T = np.zeros((tuples.shape[0], n + 1))
    T[:, powers] = t1[tuples[:, 0]]
    for c in range(1, tuples.shape[1]):
        new = np.zeros_like(T)
        col = t1[tuples[:, c]]
        for j, p in enumerate(powers):
            new[:, p:] += col[:, j : j + 1] * T[:, : n + 1 - p]
        T = new
    return T


def _multiplicity_parts(tuples: np.ndarray, F: int):
    """Per tuple: product of factorials of value counts and the count array."""
    counts = np.zeros((tuples.shape[0], F), dtype=np.int64)
    for c in range(tuples.shape[1]):
        np.add.at(counts, (np.arange(tuples.shape[0]), tuples[:, c]), 1)
    return counts


def _symmetric_scan(spec: SphereSpec, Q: int, M: int, bump: BumpFunction, budget: Budget) -> tuple:
    """Error sums over the grid j/M for k = 2, using sign and permutation symmetry.

    Every grid point is folded to indices 0..M//2 and sorted.  A sorted tuple
    splits into a head (first d//2 entries) and a tail with head[-1] <= tail[0];
    the exact sum is the level convolution of head and tail tables, and the
    main term factorizes over head and tail except for the Bessel factor.
    """
    k, d, n = spec.k, spec.d, spec.level
    r = _radius(spec)
    pre = r ** (d - k)
    F = M // 2 + 1
    fw = _fold_weights(F, M)
    a_size = d // 2
    b_size = d - a_size
    A = _tuples(F, a_size)
    B = _tuples(F, b_size)
    jmax = integer_kth_root(n, k)
    powers = np.arange(jmax + 1) ** k
    t1 = _coord_phase_table(F, M, jmax)

    TA = _level_table(A, t1, powers, n)
    supp = np.nonzero(count_table(k, a_size, n)[: n + 1] > 0)[0]
    cols = n - supp
    # tail tables at the needed levels only, built from a full table of tail[1:]
    if b_size == 1:
        TB = np.zeros((B.shape[0], cols.size))
        for j, p in enumerate(powers):
            TB[:, cols == p] = t1[B[:, 0], j][:, None]
    else:
        sub = _tuples(F, b_size - 1)
        Tsub = _level_table(sub, t1, powers, n)
        index = {tuple(row): i for i, row in enumerate(sub.tolist())}
        sub_idx = np.array([index[tuple(row)] for row in B[:, 1:].tolist()], dtype=np.int64)
        TB = np.zeros((B.shape[0], cols.size))
        rows_per = max(1, int(4e7 // max(1, cols.size)))
        for s in range(0, B.shape[0], rows_per):
            sl = slice(s, s + rows_per)
            for j, p in enumerate(powers):
                c = cols - p
                ok = c >= 0
                TB[sl, ok] += t1[B[sl, 0], j][:, None] * Tsub[sub_idx[sl]][:, c[ok]]
        del Tsub
    TAs = TA[:, supp]
    del TA

    cA = _multiplicity_parts(A, F)
    cB = _multiplicity_parts(B, F)
    fact = np.array([math.factorial(i) for i in range(d + 1)], dtype=float)

    # main-term ingredients per q, split over head and tail
    def side(T, q):
        xi = T / M
        m = np.rint(q * xi)
        psi = bump(q * xi - m)
        eta2 = np.sum((xi - m / q) ** 2, axis=1)
        return m.astype(np.int64) % q, psi, eta2

    order_B = np.argsort(B[:, 0], kind="stable")
    assert np.all(order_B == np.arange(B.shape[0]))  # combinations are already sorted
    first_B = B[:, 0]
    sum_sq = 0.0
    sup = 0.0
    err0 = 0.0
    pts = 0.0
    q_data = []
    for q in range(1, Q + 1):
        ph, tabs = _arith_weights(k, n, q)
        mA, psiA, e2A = side(A, q)
        mB, psiB, e2B = side(B, q)
        gA = np.ones((ph.size, A.shape[0]), dtype=complex)
        for c in range(a_size):
            gA *= tabs[:, mA[:, c]]
        gB = np.ones((ph.size, B.shape[0]), dtype=complex)
        for c in range(b_size):
            gB *= tabs[:, mB[:, c]]
        q_data.append((ph, gA, psiA, e2A, gB, psiB, e2B))
    lastA = A[:, -1] if a_size else np.zeros(1, dtype=np.int64)
    for g in range(F):
        ia = np.nonzero(lastA == g)[0] if a_size else np.arange(1)
        if ia.size == 0:
            continue
        b0 = int(np.searchsorted(first_B, g, side="left"))
        ib = np.arange(b0, B.shape[0])
        if ib.size == 0:
            continue
        exact = TAs[ia] @ TB[ib].T
        main = np.zeros(exact.shape, dtype=complex)
        for ph, gA, psiA, e2A, gB, psiB, e2B in q_data:
            la = np.nonzero(psiA[ia] > 0)[0]
            lb = np.nonzero(psiB[ib] > 0)[0]
            if la.size == 0 or lb.size == 0:
                continue
            ra, rb = ia[la], ib[lb]
            S = (gA[:, ra] * ph[:, None]).T @ gB[:, rb]
            rho = r * np.sqrt(e2A[ra][:, None] + e2B[rb][None, :])
            sig = sigma_hat_bessel(d, rho)
            main[np.ix_(la, lb)] += pre * S * (psiA[ra][:, None] * psiB[rb][None, :]) * sig
        err = np.abs(exact - main)
        # orbit sizes: permutations times sign folds
        ca = cA[ia]
        cb = cB[ib]
        pfa = np.prod(fact[np.where(np.arange(F)[None, :] == g, 0, ca)], axis=1)
        pfb = np.prod(fact[np.where(np.arange(F)[None, :] == g, 0, cb)], axis=1)
        shared = ca[:, g][:, None] + cb[:, g][None, :]
        perm = fact[d] / (pfa[:, None] * pfb[None, :] * fact[shared])
        fa = np.prod(fw[A[ia]], axis=1) if a_size else np.ones(1)
        fb = np.prod(fw[B[ib]], axis=1)
        w = perm * fa[:, None] * fb[None, :]
        sum_sq += float(np.sum(w * err**2))
        pts += float(w.sum())
        sup = max(sup, float(err.max()))
        if g == 0:
            err0 = float(err[0, 0])
    return sum_sq, pts, sup, err0


def _full_grid_points(M: int, d: int) -> np.ndarray:
    g = np.arange(M) / M
    return np.stack(np.meshgrid(*([g] * d), indexing="ij"), axis=-1).reshape(-1, d)


def error_scan(spec: SphereSpec, Q: int | None = None, M: int | None = None, bump: BumpFunction | None = None,
               cfg: QuadratureConfig | None = None, mode: str = "auto", samples: int = 4096, seed: int = 0,
               budget: Budget | None = None) -> ErrorReport:
    """Exact sum minus main term on the uniform grid (j/M)^d.

    ``mode`` is ``symmetric`` (k = 2, 2 <= d <= 5, folds the grid under the
    hyperoctahedral group), ``full`` (every grid point) or ``sampled``
    (a seeded uniform sample of grid points, used above the point budget).
    """
    budget = budget or DEFAULT_BUDGET
    bump = bump or DEFAULT_BUMP
    cfg = cfg or DEFAULT_QUAD
    k, d, n = spec.k, spec.d, spec.level
    r = _radius(spec)
    Q = default_Q(r) if Q is None else int(Q)
    min_M = 2 * (2 * int(math.ceil(r)) + 1)
    M = min_M if M is None else int(M)
    if M < min_M:
        raise DomainError(f"grid resolution M = {M} is below 2(2r+1) = {min_M}")
    if n > budget.level_max:
        raise ResourceError("level exceeds the lattice budget")
    total = float(M) ** d
    if mode == "auto":
        if k == 2 and 2 <= d <= 5 and cfg.method in ("auto", "bessel"):
            mode = "symmetric"
        elif total <= 2e5:
            mode = "full"
        else:
            mode = "sampled"
    norm = r ** (d - k)
    if mode == "symmetric":
        if not (k == 2 and 2 <= d <= 5):
            raise DomainError("the symmetric scan needs k = 2 and 2 <= d <= 5")
        F = M // 2 + 1
        orbits = math.comb(F + d - 1, d)
        if orbits > budget.grid_points_max:
            raise ResourceError(f"{orbits} symmetry classes exceed the grid budget")
        sum_sq, pts, sup, err0 = _symmetric_scan(spec, Q, M, bump, budget)
        l2 = math.sqrt(sum_sq / pts)
        extra = {"orbits": orbits, "weight_total": pts}
    else:
        if mode == "full":
            if total > budget.grid_points_max:
                raise ResourceError("grid exceeds the point budget; use mode='sampled'")
            X = _full_grid_points(M, d)
        elif mode == "sampled":
            rng = np.random.default_rng(seed)
            idx = rng.integers(0, M, size=(samples, d))
            idx[0] = 0
            X = idx / M
        else:
            raise DomainError(f"unknown scan mode {mode!r}")
        exact = exp_sum_points(k, n, X, budget)
        main = main_term_points(k, d, n, X, Q, bump, cfg, budget)
        err = np.abs(exact - main)
        sup = float(err.max())
        l2 = float(np.sqrt(np.mean(err**2)))
        err0 = float(err[0])
        extra = {}
    return ErrorReport(spec, Q, M, sup, l2, l2 / norm, sup / norm, int(total), mode, err0, extra)


@dataclass
class ExponentFit:
    k: int
    d: int
    R: np.ndarray
    block_error: np.ndarray  # max over the block of the normalized l2 error
    levels: list
    eps_hat: float
    predicted: float
    inconclusive: bool
    reason: str = ""


def error_exponent_fit(k: int, d: int, R_list: Sequence[int], Q: int | None = None, per_block: int = 3,
                       tau: float | None = None, errors: Sequence[float] | None = None,
                       scan_kwargs: dict | None = None) -> ExponentFit:
    """Fit eps_hat in (block error) ~ R^{-eps} over dyadic blocks [R, 2R).

    Each block is represented by ``per_block`` admissible levels spread over
    [R^k, (2R)^k).  ``errors`` bypasses the scans (for synthetic inputs).
    The comparison value min{d - k(k+2), k - d tau} is reported, not asserted.
    """
    R_arr = np.asarray(R_list, dtype=float)
    tau = 2.0 ** (1 - k) if tau is None else tau
    predicted = min(d - k * (k + 2), k - d * tau)
    levels: list = []
    if errors is None:
        scan_kwargs = dict(scan_kwargs or {})
        block = []
        for R in R_list:
            lo, hi = int(R) ** k, (2 * int(R)) ** k - 1
            table = count_table(k, d, hi)
            adm = [x for x in range(lo, hi + 1) if table[x] > 0]
            if not adm:
                block.append(np.nan)
                levels.append([])
                continue
            pick = sorted({adm[int(round(i * (len(adm) - 1) / max(1, per_block - 1)))] for i in range(per_block)})
            levels.append(pick)
            vals = [error_scan(SphereSpec(k, d, lv), Q, **scan_kwargs).normalized_error for lv in pick]
            block.append(max(vals))
        block_err = np.asarray(block, dtype=float)
    else:
        block_err = np.asarray(errors, dtype=float)
    good = np.isfinite(block_err)
    if good.sum() < 4:
        return ExponentFit(k, d, R_arr, block_err, levels, float("nan"), predicted, True, "fewer than 4 scales")
    if np.all(block_err[good] <= 0):
        return ExponentFit(k, d, R_arr, block_err, levels, float("nan"), predicted, True,
                           "degenerate: zero error at every scale")
    slope = loglog_slope(R_arr[good], block_err[good])
    return ExponentFit(k, d, R_arr, block_err, levels, -slope, predicted, False)
