"""Gelfand-Leray surface measures on {sum |x_i|^k = r^k} and their Fourier transforms.

The measure sigma_r is normalized to carry the same total mass for every r,
so that dsigma_r(xi) = dsigma_1(r xi).  Several evaluation routes are
provided:

* ``bessel``  k = 2 closed form through J_{d/2-1};
* ``axis``    frequencies along a coordinate axis (a 1-D Jacobi-weighted integral);
* ``cone``    a face-by-face cone chart over [0,1]^{d-1} (smooth, d <= 4);
* ``theta``   inversion of the separable theta integral, any d;
* ``shell``   thin-shell difference quotients with Richardson extrapolation,
  slow and used as an independent oracle.

The one-dimensional theta integrals h_z(eta) = int e(|u|^k z + u eta) du and
their lattice counterparts live here as well, together with the smooth bumps
used by the main term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import special

from ._common import DEFAULT_BUDGET, Budget, DomainError, ResourceError, loglog_slope

TWO_PI = 2.0 * np.pi


def sphere_volume(k: int, d: int) -> float:
    """Total Gelfand-Leray mass of {sum |x_i|^k = 1}: 2^d Gamma(1+1/k)^d / Gamma(d/k)."""
    return float(2.0**d * special.gamma(1.0 + 1.0 / k) ** d / special.gamma(d / k))


@dataclass(frozen=True)
class QuadratureConfig:
    method: str = "auto"  # auto | bessel | axis | cone | theta | shell
    nodes_per_panel: int = 16
    panels_per_wavelength: float = 0.5
    theta_eps: float = 0.15
    theta_tmax: float | None = None
    shell_delta: float = 0.02
    shell_nodes: int = 48


DEFAULT_QUAD = QuadratureConfig()


@dataclass(frozen=True)
class SurfaceMeasureEval:
    degree: int
    dimension: int
    radius: float
    frequency: tuple
    value: complex
    quadrature_error: float
    method: str


@lru_cache(maxsize=64)
def _gl(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def composite_gl(a: float, b: float, panels: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Gauss-Legendre on [a, b]."""
    x, w = _gl(n)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    return nodes, weights


# --- closed forms and the axis route -----------------------------------------

def sigma_hat_bessel(d: int, xi_norm) -> np.ndarray:
    """k = 2: dsigma_1(xi) = pi |xi|^{1-d/2} J_{d/2-1}(2 pi |xi|)."""
    rho = np.asarray(xi_norm, dtype=float)
    nu = d / 2.0 - 1.0
    out = np.empty_like(rho)
    small = rho < 1e-8
    rs = np.where(small, 1.0, rho)
    out[...] = np.pi * rs ** (-nu) * special.jv(nu, TWO_PI * rs)
    out[small] = np.pi ** (d / 2.0) / special.gamma(d / 2.0)
    return out


def sigma_hat_axis(k: int, d: int, T, n: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """dsigma_1(T e_1) and a two-rule error estimate, vectorized over T.

    Slicing the level set at fixed x_1 gives
    dsigma_1(T e_1) = 2 C_{d-1} int_0^1 cos(2 pi T x) (1 - x^k)^{beta} dx,
    beta = (d-1)/k - 1, with C_{d-1} the mass in one dimension less.  The
    endpoint singularity is handled by a Gauss-Jacobi rule on the last panel.
    """
    T = np.atleast_1d(np.asarray(T, dtype=float))
    if d == 1:
        return (2.0 / k) * np.cos(TWO_PI * T), np.zeros_like(T)
    beta = (d - 1) / k - 1.0
    C = sphere_volume(k, d - 1)
    vals = np.empty_like(T)
    errs = np.empty_like(T)
    for i, t in enumerate(np.abs(T)):
        v1 = _axis_integral(k, beta, t, n)
        v2 = _axis_integral(k, beta, t, n - 6)
        vals[i] = 2.0 * C * v1
        errs[i] = 2.0 * C * abs(v1 - v2)
    return vals, errs


def _axis_integral(k: int, beta: float, T: float, n: int) -> float:
    panels = int(math.ceil(2.0 * T)) + 2
    edges = np.linspace(0.0, 1.0, panels + 1)
    x, w = _gl(n)
    lo, hi = edges[:-2], edges[1:-1]
    h = hi - lo
    xs = (lo[:, None] + h[:, None] * x[None, :]).ravel()
    ws = (h[:, None] * w[None, :]).ravel()
    f = np.cos(TWO_PI * T * xs) * (1.0 - xs**k) ** beta
    total = float(np.dot(ws, f))
    # last panel: (1 - x^k)^beta = (1 - x)^beta g(x), g = (1 + x + ... + x^{k-1})^beta
    a = edges[-2]
    u, wj = special.roots_jacobi(n, beta, 0.0)
    half = 0.5 * (1.0 - a)
    xj = a + half * (u + 1.0)
    g = np.polyval(np.ones(k), xj) ** beta
    total += float(half ** (beta + 1.0) * np.dot(wj, np.cos(TWO_PI * T * xj) * g))
    return total


# --- cone chart ---------------------------------------------------------------

def sigma_hat_cone(k: int, d: int, xi: Sequence[float], cfg: QuadratureConfig = DEFAULT_QUAD,
                   budget: Budget | None = None) -> tuple[float, float]:
    """dsigma_1(xi) by the face-wise cone chart; returns (value, error estimate).

    On the face where x_j is the largest coordinate of the positive orthant,
    x_i = p_i x_j with p in [0,1]^{d-1}, x_j = psi^{-1/k}, psi = 1 + sum p_i^k,
    and the Gelfand-Leray density is psi^{-d/k}/k.  The measure is even in
    every coordinate, so the transform is 2^d times the orthant integral of
    prod cos(2 pi xi_i x_i).
    """
    budget = budget or DEFAULT_BUDGET
    xi = np.asarray(xi, dtype=float)
    if d == 1:
        return float((2.0 / k) * np.cos(TWO_PI * xi[0])), 0.0
    n = cfg.nodes_per_panel
    panels = max(1, int(math.ceil(cfg.panels_per_wavelength * np.abs(xi).max() + 0.5)))
    if (panels * n) ** (d - 1) * d > budget.grid_points_max:
        raise ResourceError("cone-chart grid exceeds the point budget")
    fine = _cone_value(k, d, xi, panels, n)
    coarse = _cone_value(k, d, xi, panels, max(4, n - 6))
    return fine, abs(fine - coarse)


def _cone_value(k, d, xi, panels, n) -> float:
    p, w = composite_gl(0.0, 1.0, panels, n)
    pk = p**k
    total = 0.0
    m = d - 1
    chunk = max(1, int(2_000_000 // max(1, p.size ** (m - 1))))
    for j in range(d):
        others = [i for i in range(d) if i != j]
        for s in range(0, p.size, chunk):
            sl = slice(s, s + chunk)
            grids_p = np.meshgrid(*([p[sl]] + [p] * (m - 1)), indexing="ij", sparse=True)
            grids_pk = np.meshgrid(*([pk[sl]] + [pk] * (m - 1)), indexing="ij", sparse=True)
            grids_w = np.meshgrid(*([w[sl]] + [w] * (m - 1)), indexing="ij", sparse=True)
            psi = 1.0
            for g in grids_pk:
                psi = psi + g
            xj = psi ** (-1.0 / k)
            f = psi ** (-d / k) / k * np.cos(TWO_PI * xi[j] * xj)
            for g, i in zip(grids_p, others):
                f = f * np.cos(TWO_PI * xi[i] * g * xj)
            wt = 1.0
            for g in grids_w:
                wt = wt * g
            total += float(np.sum(f * wt))
    return 2.0**d * total


# --- theta integrals ------------------------------------------------------------

def theta_1d(k: int, z, eta, n: int = 16) -> np.ndarray:
    """int_R e(|u|^k z + u eta) du for Im z > 0, vectorized over z and eta.

    With w = -2 pi i z the integral is
    2 |w|^{-1/k} int_0^inf exp(-e^{i theta} s^k) cos(lambda s) ds,
    theta = arg w and lambda = 2 pi |eta| |w|^{-1/k}.  The ray is rotated to
    s = rho e^{i phi}, phi = -c theta / k, taking the largest c in
    {1, 3/4, 1/2, 1/4, 0} whose growth of the cosine stays below e^10.
    """
    z = np.asarray(z, dtype=complex)
    eta = np.asarray(eta, dtype=float)
    z, eta = np.broadcast_arrays(z, eta)
    shape = z.shape
    z = z.ravel()
    eta = np.abs(eta.ravel())
    if np.any(z.imag <= 0):
        raise DomainError("theta integrals need Im z > 0")
    w = -2j * np.pi * z
    aw = np.abs(w)
    th = np.angle(w)
    lam = TWO_PI * eta * aw ** (-1.0 / k)
    phi = np.zeros_like(th)
    chosen = np.zeros(th.shape, dtype=bool)
    for c in (1.0, 0.75, 0.5, 0.25, 0.0):
        ph = -c * th / k
        b = np.cos(th + k * ph)
        a = lam * np.abs(np.sin(ph))
        rho_star = (a / (k * b)) ** (1.0 / (k - 1))
        growth = a * rho_star * (1.0 - 1.0 / k)
        ok = (~chosen) & (growth <= 10.0)
        phi[ok] = ph[ok]
        chosen |= ok
    b = np.cos(th + k * phi)
    a = lam * np.abs(np.sin(phi))
    rho = (45.0 / b) ** (1.0 / k)
    for _ in range(6):
        rho = ((45.0 + a * rho) / b) ** (1.0 / k)
    phase = lam * np.cos(phi) * rho + rho**k * np.abs(np.sin(th + k * phi))
    panels = np.ceil(phase / np.pi).astype(int) + 2
    out = np.empty(z.shape, dtype=complex)
    x, wq = _gl(n)
    for P in np.unique(panels):
        idx = np.nonzero(panels == P)[0]
        u = (np.arange(P)[:, None] + x[None, :]).ravel() / P  # nodes on [0,1]
        wu = np.tile(wq, P) / P
        s = rho[idx, None] * u[None, :]
        e = np.exp(1j * phi[idx])[:, None]
        rot = np.exp(1j * (th[idx] + k * phi[idx]))[:, None]
        f = np.exp(-rot * s**k) * np.cos(lam[idx, None] * s * e)
        integral = (f * wu[None, :]).sum(axis=1) * rho[idx] * e[:, 0]
        out[idx] = 2.0 * aw[idx] ** (-1.0 / k) * integral
    return out.reshape(shape)


def theta_1d_series(k: int, z, eta, terms: int = 60) -> np.ndarray:
    """Power series in eta of the one-dimensional theta integral (large |z| check)."""
    w = -2j * np.pi * np.asarray(z, dtype=complex)
    eta = np.asarray(eta, dtype=float)
    total = 0j
    for j in range(terms):
        coef = (-(TWO_PI * eta) ** 2) ** j / math.factorial(2 * j) * special.gamma((2 * j + 1) / k)
        total = total + coef * w ** (-(2 * j + 1) / k)
    return (2.0 / k) * total


def theta_1d_gauss(z, eta) -> np.ndarray:
    """k = 2 closed form (-2 i z)^{-1/2} e(-eta^2 / (4 z))."""
    z = np.asarray(z, dtype=complex)
    eta = np.asarray(eta, dtype=float)
    return (-2j * z) ** -0.5 * np.exp(-2j * np.pi * eta**2 / (4.0 * z))


def theta_lattice_1d(k: int, z, eta) -> np.ndarray:
    """sum_{m in Z} e(|m|^k z + m eta), truncated once e^{-2 pi eps m^k} < 1e-16."""
    z = np.asarray(z, dtype=complex)
    eta = np.asarray(eta, dtype=float)
    z, eta = np.broadcast_arrays(z, eta)
    eps = z.imag
    if np.any(eps <= 0):
        raise DomainError("lattice theta sums need Im z > 0")
    M = int((37.0 / (TWO_PI * eps.min())) ** (1.0 / k)) + 1
    m = np.arange(1, M + 1, dtype=float)
    mk = m**k
    zz = z[..., None]
    terms = np.exp(2j * np.pi * np.mod(mk * zz.real, 1.0)) * np.exp(-TWO_PI * mk * zz.imag)
    terms = terms * np.cos(TWO_PI * np.mod(m * eta[..., None], 1.0))
    return 1.0 + 2.0 * terms.sum(axis=-1)


@dataclass(frozen=True)
class ThetaEval:
    degree: int
    dimension: int
    z: complex
    frequency: tuple
    integral_value: complex
    sum_value: complex | None = None

    @property
    def hardy_constant(self) -> float:
        return abs(self.integral_value) * abs(self.z) ** (self.dimension / self.degree)


def _check_z(z) -> complex:
    z = complex(z)
    if z.imag <= 0:
        raise DomainError(f"Im z must be positive, got {z.imag}")
    return z


def theta_integral(k: int, d: int, z, xi: Sequence[float]) -> ThetaEval:
    z = _check_z(z)
    if len(xi) != d:
        raise DomainError(f"frequency has {len(xi)} components, expected {d}")
    vals = theta_1d(k, np.full(d, z), np.asarray(xi, dtype=float))
    return ThetaEval(k, d, z, tuple(float(x) for x in xi), complex(np.prod(vals)))


def theta_lattice_sum(k: int, d: int, z, xi: Sequence[float]) -> ThetaEval:
    z = _check_z(z)
    if len(xi) != d:
        raise DomainError(f"frequency has {len(xi)} components, expected {d}")
    vals = theta_lattice_1d(k, np.full(d, z), np.asarray(xi, dtype=float))
    integral = complex(np.prod(theta_1d(k, np.full(d, z), np.asarray(xi, dtype=float))))
    return ThetaEval(k, d, z, tuple(float(x) for x in xi), integral, complex(np.prod(vals)))


def theta_product(k: int, z: np.ndarray, eta: Sequence[float]) -> np.ndarray:
    """prod_i h_z(eta_i) for an array of z values."""
    z = np.asarray(z, dtype=complex)
    out = np.ones(z.shape, dtype=complex)
    cache: dict[float, np.ndarray] = {}
    for e in eta:
        key = abs(float(e))
        if key not in cache:
            cache[key] = theta_1d(k, z, key)
        out = out * cache[key]
    return out


def _t_panels(a: float, b: float, eps: float, freq: float) -> np.ndarray:
    """Panel edges on [a, b]: fine near t = 0 (scale eps), then width ~ 1/(4 freq)."""
    width = min(0.25 / max(freq, 1e-12), 0.25)
    near = np.linspace(-4 * eps, 4 * eps, 17)
    edges = np.concatenate([np.arange(a, b, width), near, [b]])
    edges = np.unique(edges[(edges >= a) & (edges <= b)])
    return edges


def t_integral(k: int, eta: Sequence[float], eps: float, lam: float, a: float, b: float,
               n: int = 16) -> complex:
    """int_a^b prod_i h_{t + i eps}(eta_i) e(-lam t) dt by composite Gauss-Legendre."""
    edges = _t_panels(a, b, eps, max(lam, 1.0))
    x, w = _gl(n)
    h = np.diff(edges)
    t = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
    wt = (h[:, None] * w[None, :]).ravel()
    H = theta_product(k, t + 1j * eps, eta)
    return complex(np.sum(wt * H * np.exp(-2j * np.pi * np.mod(lam * t, 1.0))))


def _tail(k: int, eta, eps: float, lam: float, T: float) -> complex:
    """int_T^inf H(t) e(-lam t) dt by two steps of integration by parts."""
    hstep = 1e-3 * T
    ts = np.array([T - hstep, T, T + hstep])
    H = theta_product(k, ts + 1j * eps, eta)
    f0 = H[1]
    f1 = (H[2] - H[0]) / (2 * hstep)
    f2 = (H[2] - 2 * H[1] + H[0]) / hstep**2
    s = 2j * np.pi * lam
    return complex(np.exp(-s * T) * (f0 / s + f1 / s**2 + f2 / s**3))


def full_line_t_integral(k: int, eta, eps: float, lam: float, T: float | None = None) -> complex:
    """int_R prod_i h_{t+i eps}(eta_i) e(-lam t) dt with integration-by-parts tails."""
    eta = np.asarray(eta, dtype=float)
    if T is None:
        T = max(60.0, 20.0 * float(np.abs(eta).max(initial=0.0)))
    body = t_integral(k, eta, eps, lam, -T, T)
    # H(-t) = conj(H(t)) and lam is real, so the left tail is the conjugate
    right = _tail(k, eta, eps, lam, T)
    return body + right + np.conj(right)


def sigma_hat_theta(k: int, d: int, xi: Sequence[float], cfg: QuadratureConfig = DEFAULT_QUAD) -> tuple[float, float]:
    """dsigma_1(xi) = e^{2 pi eps} int_R prod h_{t + i eps}(xi_i) e(-t) dt."""
    eps = cfg.theta_eps
    v1 = full_line_t_integral(k, xi, eps, 1.0, cfg.theta_tmax)
    v2 = full_line_t_integral(k, xi, 2 * eps / 3, 1.0, cfg.theta_tmax)
    val1 = math.exp(TWO_PI * eps) * v1.real
    val2 = math.exp(TWO_PI * 2 * eps / 3) * v2.real
    return val1, abs(val1 - val2)


# --- shell oracle ----------------------------------------------------------------

def _ball_ft(k: int, xi: np.ndarray, s: float, n: int) -> float:
    """int_{sum |x_i|^k < s} prod cos(2 pi xi_i x_i) dx by nested quadrature.

    The outer variable is x = s^{1/k}(1 - v^k), which smooths the square-root
    type behaviour of the inner volume near the boundary.
    """
    d = xi.size
    if s <= 0:
        return 0.0
    a = s ** (1.0 / k)
    if d == 1:
        if xi[0] == 0:
            return 2.0 * a
        return math.sin(TWO_PI * xi[0] * a) / (np.pi * xi[0])
    v, w = composite_gl(0.0, 1.0, max(2, int(math.ceil(abs(xi[0]) * a)) + 1), n)
    x = a * (1.0 - v**k)
    jac = a * k * v ** (k - 1)
    inner = np.array([_ball_ft(k, xi[1:], s - xx**k, n) for xx in x])
    return 2.0 * float(np.sum(w * jac * np.cos(TWO_PI * xi[0] * x) * inner))


def sigma_hat_shell(k: int, d: int, xi: Sequence[float], cfg: QuadratureConfig = DEFAULT_QUAD,
                    level: float = 1.0) -> tuple[float, float]:
    """Thin-shell derivative d/ds of the ball transform at s = level, Richardson-extrapolated.

    For ``level`` = r^k this is the unnormalized Gelfand-Leray transform of the
    sphere of radius r, whose mass is r^{d-k} times that of the unit sphere.
    """
    xi = np.asarray(xi, dtype=float)
    n = cfg.shell_nodes
    delta = cfg.shell_delta * level
    D = []
    for j in range(3):
        h = delta / 2**j
        D.append((_ball_ft(k, xi, level + h, n) - _ball_ft(k, xi, level - h, n)) / (2 * h))
    # central differences: error series in h^2
    R1 = [(4 * D[i + 1] - D[i]) / 3 for i in range(2)]
    R2 = (16 * R1[1] - R1[0]) / 15
    return R2, abs(R2 - R1[1])


# --- public entry point -------------------------------------------------------------

def _is_axis(xi: np.ndarray) -> bool:
    return int(np.count_nonzero(xi)) <= 1


def sigma_hat_unit(k: int, d: int, xi: Sequence[float], cfg: QuadratureConfig = DEFAULT_QUAD,
                   budget: Budget | None = None) -> tuple[float, float, str]:
    """dsigma_1(xi) with an error estimate and the route used."""
    budget = budget or DEFAULT_BUDGET
    xi = np.asarray(xi, dtype=float)
    if xi.size != d:
        raise DomainError(f"frequency has {xi.size} components, expected {d}")
    method = cfg.method
    if method == "auto":
        if k == 2:
            method = "bessel"
        elif _is_axis(xi):
            method = "axis"
        elif d <= budget.shell_dim_max:
            method = "cone"
        else:
            method = "theta"
    if method == "bessel":
        if k != 2:
            raise DomainError("the Bessel closed form needs k = 2")
        return float(sigma_hat_bessel(d, np.linalg.norm(xi))), 0.0, method
    if method == "axis":
        if not _is_axis(xi):
            raise DomainError("the axis route needs a frequency along a coordinate axis")
        v, e = sigma_hat_axis(k, d, np.abs(xi).max(initial=0.0))
        return float(v[0]), float(e[0]), method
    if method in ("cone", "shell"):
        if d > budget.shell_dim_max:
            raise ResourceError(
                f"d = {d} exceeds the quadrature budget {budget.shell_dim_max}; "
                "use method='theta' (separable theta route) instead"
            )
        if method == "cone":
            v, e = sigma_hat_cone(k, d, xi, cfg, budget)
        else:
            v, e = sigma_hat_shell(k, d, xi, cfg)
        return v, e, method
    if method == "theta":
        v, e = sigma_hat_theta(k, d, xi, cfg)
        return v, e, method
    raise DomainError(f"unknown quadrature method {method!r}")


def surface_ft(k: int, d: int, r: float, xi: Sequence[float], cfg: QuadratureConfig | None = None,
               budget: Budget | None = None) -> SurfaceMeasureEval:
    """dsigma_r(xi) = dsigma_1(r xi) under the constant-mass normalization."""
    if k < 2 or d < 1:
        raise DomainError("need k >= 2 and d >= 1")
    if not r > 0:
        raise DomainError("radius must be positive")
    cfg = cfg or DEFAULT_QUAD
    scaled = r * np.asarray(xi, dtype=float)
    v, e, method = sigma_hat_unit(k, d, scaled, cfg, budget)
    return SurfaceMeasureEval(k, d, float(r), tuple(float(x) for x in xi), complex(v), e, method)


# --- decay diagnostics -----------------------------------------------------------------

@dataclass
class DecayFit:
    k: int
    d: int
    direction: tuple
    T: np.ndarray
    envelope: np.ndarray
    quad_error: np.ndarray
    gamma_hat: float
    predicted: float
    inconclusive: bool


def decay_fit(k: int, d: int, direction: Sequence[float], T_max: float, points: int = 14,
              window_samples: int = 9, T_min: float = 10.0, cfg: QuadratureConfig | None = None,
              budget: Budget | None = None) -> DecayFit:
    """Log-log slope of the envelope of |dsigma_1(T u)| for T in [T_min, T_max].

    The envelope at T is the largest |dsigma_1| over the window [T, T+1],
    which removes the zeros of the oscillation from the fit.
    """
    cfg = cfg or DEFAULT_QUAD
    u = np.asarray(direction, dtype=float)
    if u.size != d:
        raise DomainError("direction has the wrong length")
    nrm = np.linalg.norm(u)
    if not abs(nrm - 1.0) < 1e-9:
        raise DomainError("direction must be a unit vector")
    if T_max < 100:
        raise DomainError("T_max must be at least 100")
    Ts = np.geomspace(T_min, T_max, points)
    env = np.empty(points)
    err = np.empty(points)
    offs = np.linspace(0.0, 1.0, window_samples)
    for i, T in enumerate(Ts):
        grid = T + offs
        if _is_axis(u) and k != 2:
            v, e = sigma_hat_axis(k, d, grid)
        else:
            res = [sigma_hat_unit(k, d, g * u, cfg, budget) for g in grid]
            v = np.array([x[0] for x in res])
            e = np.array([x[1] for x in res])
        j = int(np.argmax(np.abs(v)))
        env[i] = abs(v[j])
        err[i] = float(np.max(e))
    inconclusive = bool(np.any(err > 0.1 * env))
    gamma = float("nan") if inconclusive else loglog_slope(Ts, env)
    return DecayFit(k, d, tuple(u.tolist()), Ts, env, err, gamma, -(d - 1) / k, inconclusive)


# --- Hardy diagnostics -----------------------------------------------------------------

@dataclass
class HardySweep:
    k: int
    d: int
    abs_z: np.ndarray
    sup_scaled: np.ndarray  # sup over angles and frequencies of |h_z| |z|^{d/k}
    slope: float
    constant: float


def hardy_sweep(k: int, d: int, abs_z: Sequence[float] | None = None, angles: Sequence[float] | None = None,
                xis: Sequence[Sequence[float]] | None = None, seed: int = 0) -> HardySweep:
    """sup of |h_z(xi)| |z|^{d/k} on a log grid of |z| (first Hardy estimate)."""
    if abs_z is None:
        abs_z = np.geomspace(1e-4, 1.0, 13)
    abs_z = np.asarray(abs_z, dtype=float)
    if angles is None:
        angles = np.linspace(0.05, np.pi - 0.05, 9)
    if xis is None:
        rng = np.random.default_rng(seed)
        xis = [np.zeros(d), rng.uniform(-0.5, 0.5, d)]
    sup = np.zeros(abs_z.size)
    for i, az in enumerate(abs_z):
        zs = az * np.exp(1j * np.asarray(angles))
        for xi in xis:
            vals = np.ones(zs.size, dtype=complex)
            for c in xi:
                vals = vals * theta_1d(k, zs, c)
            sup[i] = max(sup[i], float(np.max(np.abs(vals))) * az ** (d / k))
    return HardySweep(k, d, abs_z, sup, loglog_slope(abs_z, sup), float(sup.max()))


@dataclass
class HardyLocalization:
    k: int
    d: int
    q: int
    offsets: np.ndarray  # |q xi - m|
    log_abs: np.ndarray
    slope: float  # fitted slope of log|h| against offset^{k/(k-1)}
    K_hat: float


def hardy_localization(k: int, d: int, q: int, z: complex | None = None,
                       offsets: Sequence[float] | None = None) -> HardyLocalization:
    """Decay of |h_z(xi - m/q)| in |q xi - m| (second Hardy estimate), even k.

    Frequencies are taken along the diagonal; z defaults to i q^{-k}, the
    scale on which the offsets are of order one.
    """
    if k % 2:
        raise DomainError("the localization estimate is only checked for even k")
    if z is None:
        z = 1j * float(q) ** (-k)
    if offsets is None:
        offsets = np.linspace(1.0, 5.0, 17)
    offsets = np.asarray(offsets, dtype=float)
    direction = np.ones(d) / math.sqrt(d)
    vals = np.ones(offsets.size, dtype=complex)
    for c in direction:
        vals = vals * theta_1d(k, np.full(offsets.size, z, dtype=complex), offsets * c / q)
    la = np.log(np.maximum(np.abs(vals), 1e-300))
    x = offsets ** (k / (k - 1))
    slope = float(np.polyfit(x, la, 1)[0])
    return HardyLocalization(k, d, q, offsets, la, slope, -slope)


# --- bumps ----------------------------------------------------------------------------

def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 1 for t <= 0, 0 for t >= 1, built from e^{-1/t}."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f1 = np.where(t < 1.0, np.exp(-1.0 / np.where(t < 1.0, 1.0 - t, 1.0)), 0.0)
        f0 = np.where(t > 0.0, np.exp(-1.0 / np.where(t > 0.0, t, 1.0)), 0.0)
    return f1 / (f1 + f0)


@dataclass(frozen=True)
class BumpFunction:
    """Tensor-product plateau bump: 1 on [-s_in, s_in]^d, 0 outside [-s_out, s_out]^d."""

    s_in: float = 0.125
    s_out: float = 0.25

    def __post_init__(self):
        if not (0 < self.s_in < self.s_out <= 0.5):
            raise DomainError(f"need 0 < s_in < s_out <= 1/2, got ({self.s_in}, {self.s_out})")

    def profile(self, x) -> np.ndarray:
        ax = np.abs(np.asarray(x, dtype=float))
        return _smooth_step((ax - self.s_in) / (self.s_out - self.s_in))

    def __call__(self, x) -> np.ndarray:
        """Evaluate on points; the last axis indexes coordinates."""
        x = np.asarray(x, dtype=float)
        return np.prod(self.profile(x), axis=-1)


def make_bump(s_in: float = 0.125, s_out: float = 0.25) -> BumpFunction:
    if s_in >= s_out:
        raise DomainError("s_in must be smaller than s_out")
    return BumpFunction(s_in, s_out)


DEFAULT_BUMP = BumpFunction(0.125, 0.25)
