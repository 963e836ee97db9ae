"""Command-line front end: one subcommand per operation family.

Every command builds a :class:`kspheres.io.Result` from library calls only,
so the emitted bytes equal the library serialization.  Exit status: 0 on
success, 2 on a validation error, 3 when a resource budget is exceeded.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import approx, ergodic, expsums, farey, lattice, operators, surface
from ._common import Budget, DomainError, KSpheresError, PreconditionError, ResourceError, loglog_slope
from .io import Result

COMMANDS = (
    "count", "enumerate", "expsum", "weyl", "gauss", "hua", "farey", "classify", "sigma-hat",
    "decay-fit", "theta", "approx-scan", "main-term", "error-fit", "average", "maxop", "probe",
    "ergodic", "spectral", "convergence",
)


@dataclasses.dataclass
class RunConfig:
    command: str = ""
    k: int | None = None
    d: int | None = None
    level: int | None = None
    levels: str | None = None
    xi: str | None = None
    t: str | None = None
    N: str | None = None
    a: int | None = None
    q: int | None = None
    m: str | None = None
    q_max: int | None = None
    X: int | None = None
    R: str | None = None
    r: float | None = None
    direction: str | None = None
    T_max: float | None = None
    points: int | None = None
    z: str | None = None
    Q: int | None = None
    M: int | None = None
    mode: str = "auto"
    L: int | None = None
    input: str | None = None
    p: float | None = None
    p_list: str | None = None
    r_max: float | None = None
    system: str | None = None
    x: str | None = None
    samples: int = 8
    r_j: float | None = None
    tau: str = "weyl"
    method: str = "auto"
    output: str | None = None
    format: str = "csv"
    threads: int = 1
    seed: int = 0
    level_max: int | None = None
    enumeration_cap: int | None = None

    def budget(self) -> Budget:
        kw = {}
        if self.level_max is not None:
            kw["level_max"] = int(self.level_max)
        if self.enumeration_cap is not None:
            kw["enumeration_cap"] = int(self.enumeration_cap)
        return Budget(**kw)

    def need(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise DomainError(f"{self.command} needs --{', --'.join(n.replace('_', '-') for n in missing)}")


# --- value parsing --------------------------------------------------------------------------

def parse_number(s: str):
    s = s.strip()
    if "/" in s:
        return Fraction(s)
    try:
        return int(s)
    except ValueError:
        return float(s)


def parse_list(s, cast=parse_number) -> list:
    if s is None:
        return []
    if isinstance(s, (list, tuple)):
        return [cast(str(v)) for v in s]
    return [cast(v) for v in str(s).split(",") if v.strip()]


def parse_points(s) -> list[list]:
    """'1,0;0.5,0.5' -> [[1, 0], [0.5, 0.5]]."""
    if isinstance(s, (list, tuple)):
        return [parse_list(p) for p in s]
    return [parse_list(p) for p in str(s).split(";") if p.strip()]


def parse_levels(s, k: int | None = None, d: int | None = None, admissible: bool = False) -> list[int]:
    """Comma list of levels; 'lo:hi' expands to every level (or admissible level) in [lo, hi]."""
    out: list[int] = []
    for part in str(s).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            lo, hi = (int(v) for v in part.split(":"))
            if admissible:
                out.extend(int(v) for v in lattice.admissible_levels(k, d, lo, hi))
            else:
                out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if any(v < 0 for v in out):
        raise DomainError("levels must be >= 0")
    return out


def parse_complex(s: str) -> complex:
    parts = parse_list(s, float)
    if len(parts) != 2:
        raise DomainError("z must be given as 're,im'")
    return complex(parts[0], parts[1])


def pmap(fn: Callable, items, threads: int) -> list:
    """Ordered map, optionally on a thread pool; the result never depends on ``threads``."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _cplx(z) -> dict:
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


# --- commands ---------------------------------------------------------------------------------

def cmd_count(c: RunConfig) -> Result:
    c.need("k", "d", "levels")
    levels = parse_levels(c.levels)
    b = c.budget()
    counts = pmap(lambda n: lattice.count_sphere(lattice.SphereSpec(c.k, c.d, n), b).count, levels, c.threads)
    rows = [{"k": c.k, "d": c.d, "level": n, "count": int(v)} for n, v in zip(levels, counts)]
    return Result("count", rows, {"levels": len(rows), "total": int(sum(int(v) for v in counts))}, "total")


def cmd_enumerate(c: RunConfig) -> Result:
    c.need("k", "d", "level")
    spec = lattice.SphereSpec(c.k, c.d, int(c.level))
    pts = lattice.sphere_points(spec, budget=c.budget())
    rows = [{f"x{i + 1}": int(v) for i, v in enumerate(p)} for p in pts]
    return Result("enumerate", rows, {"count": len(rows)}, "count")


def cmd_expsum(c: RunConfig) -> Result:
    c.need("k", "d", "levels", "xi")
    levels = parse_levels(c.levels, c.k, c.d, admissible=True)
    xi = parse_list(c.xi)
    if len(xi) != c.d:
        raise DomainError("xi needs d components")
    b = c.budget()
    vals = pmap(lambda n: lattice.sphere_exp_sum(lattice.SphereSpec(c.k, c.d, n), xi, b).value, levels, c.threads)
    N = lattice.count_table(c.k, c.d, max(levels), b) if levels else []
    rows = [{"level": n, "count": int(N[n]), "value": _cplx(v), "normalized_abs": abs(v) / int(N[n]) if int(N[n]) else 0.0}
            for n, v in zip(levels, vals)]
    return Result("expsum", rows, {"max_normalized_abs": max((r["normalized_abs"] for r in rows), default=0.0)},
                  "max_normalized_abs")


def cmd_weyl(c: RunConfig) -> Result:
    c.need("k", "N", "t")
    Ns = parse_levels(c.N)
    t = parse_number(c.t)
    xi = parse_number(c.xi) if c.xi is not None else 0
    cfg = expsums.HypothesisConfig.preset(c.tau, c.k)

    def one(N):
        anchor = expsums.find_anchor(t, N, c.k)
        spec = expsums.WeylSumSpec(c.k, N, t, xi, anchor)
        return anchor, expsums.weyl_sum(spec), expsums.hypothesis_ratio(spec, cfg)

    res = pmap(one, Ns, c.threads)
    rows = [{"N": N, "a": an[0], "q": an[1], "value": _cplx(v), "abs": abs(v), "ratio": ratio}
            for N, (an, v, ratio) in zip(Ns, res)]
    keep = [r for r in rows if r["abs"] > 1e-9 * r["N"]]  # exact zeros carry no growth information
    slope = loglog_slope([r["N"] for r in keep], [r["ratio"] for r in keep])
    return Result("weyl", rows, {"tau": cfg.tau, "ratio_slope": slope}, "ratio_slope")


def cmd_gauss(c: RunConfig) -> Result:
    c.need("k", "d", "a", "q")
    m = parse_list(c.m, int) if c.m is not None else [0] * c.d
    g = expsums.gauss_sum(c.k, c.d, int(c.a), int(c.q), m)
    rows = [{"k": c.k, "d": c.d, "a": c.a, "q": c.q, "m": list(m), "value": _cplx(g.value), "abs": abs(g.value)}]
    return Result("gauss", rows, {"abs": abs(g.value)}, "abs")


def cmd_hua(c: RunConfig) -> Result:
    c.need("k", "d", "q_max")
    h = expsums.hua_diagnostic(c.k, c.d, int(c.q_max), c.budget())
    rows = [{"q": int(q), "sup": float(s), "sup_scaled": float(ss)} for q, s, ss in zip(h.q, h.sup, h.sup_scaled)]
    return Result("hua", rows, {"max_scaled": h.max_scaled, "slope": h.slope, "scaled_slope": h.scaled_slope},
                  "max_scaled")


def _arc_row(arc: farey.FareyArc) -> dict:
    return {"a": arc.a, "q": arc.q, "lo": arc.lo, "hi": arc.hi, "length": arc.length, "major": arc.major,
            "wrapped": arc.wrapped}


def cmd_farey(c: RunConfig) -> Result:
    c.need("X")
    R = float(parse_number(c.R)) if c.R is not None else None
    tab = farey.arc_table(int(c.X), c.budget())
    arcs = farey.arc_partition(int(c.X), R, c.budget())
    rows = [_arc_row(a) for a in arcs]
    ok = bool(farey.arcs_tile_exactly(tab) and farey.arc_length_ok(tab).all())
    return Result("farey", rows, {"arcs": len(rows), "tiles_exactly": ok}, "tiles_exactly")


def cmd_classify(c: RunConfig) -> Result:
    c.need("t", "R")
    ts = parse_list(c.t)
    R = float(parse_number(c.R))
    X = int(c.X) if c.X is not None else farey.default_level(R, c.k or 2)
    arcs = pmap(lambda t: farey.classify(t, X, R, c.budget()), ts, c.threads)
    rows = [dict(t=t, **_arc_row(a)) for t, a in zip(ts, arcs)]
    return Result("classify", rows, {"X": X, "major": sum(1 for a in arcs if a.major)}, "major")


def cmd_sigma_hat(c: RunConfig) -> Result:
    c.need("k", "d", "xi")
    pts = parse_points(c.xi)
    r = float(c.r) if c.r is not None else 1.0
    cfg = surface.QuadratureConfig(method=c.method)
    res = pmap(lambda p: surface.surface_ft(c.k, c.d, r, [float(v) for v in p], cfg, c.budget()), pts, c.threads)
    rows = [{"r": r, "xi": [float(v) for v in p], "value": e.value, "error": e.quadrature_error, "method": e.method}
            for p, e in zip(pts, res)]
    return Result("sigma-hat", rows, {"max_error": max(e.quadrature_error for e in res)}, "max_error")


def cmd_decay_fit(c: RunConfig) -> Result:
    c.need("k", "d", "direction", "T_max")
    direction = [float(v) for v in parse_list(c.direction)]
    fit = surface.decay_fit(c.k, c.d, direction, float(c.T_max), points=int(c.points or 14), budget=c.budget())
    rows = [{"T": float(T), "envelope": float(e), "quad_error": float(q)} for T, e, q in zip(fit.T, fit.envelope, fit.quad_error)]
    return Result("decay-fit", rows, {"gamma_hat": fit.gamma_hat, "predicted": fit.predicted,
                                      "inconclusive": fit.inconclusive}, "gamma_hat")


def cmd_theta(c: RunConfig) -> Result:
    c.need("k", "d", "z", "xi")
    z = parse_complex(c.z)
    pts = parse_points(c.xi)

    def one(p):
        p = [float(v) for v in p]
        return surface.theta_integral(c.k, c.d, z, p), surface.theta_lattice_sum(c.k, c.d, z, p)

    res = pmap(one, pts, c.threads)
    rows = [{"xi": [float(v) for v in p], "integral": _cplx(i.integral_value), "lattice_sum": _cplx(s.sum_value),
             "hardy_scaled": i.hardy_constant} for p, (i, s) in zip(pts, res)]
    return Result("theta", rows, {"max_hardy_scaled": max(r["hardy_scaled"] for r in rows)}, "max_hardy_scaled")


def _report_row(rep: approx.ErrorReport) -> dict:
    return {"level": rep.spec.level, "Q": rep.Q, "M": rep.M, "sup_error": rep.sup_error, "l2_error": rep.l2_error,
            "normalized_error": rep.normalized_error, "normalized_sup": rep.normalized_sup, "points": rep.points,
            "mode": rep.mode}


def cmd_approx_scan(c: RunConfig) -> Result:
    c.need("k", "d")
    if c.levels is not None:
        levels = parse_levels(c.levels, c.k, c.d, admissible=True)
    else:
        c.need("level")
        levels = [int(c.level)]
    reps = pmap(lambda n: approx.error_scan(lattice.SphereSpec(c.k, c.d, n), c.Q, c.M, mode=c.mode, seed=c.seed,
                                            budget=c.budget()), levels, c.threads)
    rows = [_report_row(r) for r in reps]
    return Result("approx-scan", rows, {"max_normalized_error": max(r["normalized_error"] for r in rows)},
                  "max_normalized_error")


def cmd_main_term(c: RunConfig) -> Result:
    c.need("k", "d", "level")
    pts = parse_points(c.xi) if c.xi is not None else [[0.0] * c.d]
    spec = lattice.SphereSpec(c.k, c.d, int(c.level))
    N = lattice.count_sphere(spec, c.budget()).count
    res = pmap(lambda p: approx.main_term(spec, [float(v) for v in p], c.Q, budget=c.budget()), pts, c.threads)
    rows = [{"xi": [float(v) for v in p], "Q": e.Q, "value": _cplx(e.value), "count": int(N),
             "ratio": float(np.real(e.value)) / int(N) if int(N) else float("nan"), "tail_bound": e.tail_bound}
            for p, e in zip(pts, res)]
    return Result("main-term", rows, {"ratio_at_first": rows[0]["ratio"]}, "ratio_at_first")


def cmd_error_fit(c: RunConfig) -> Result:
    c.need("k", "d", "R")
    R_list = parse_levels(c.R)
    fit = approx.error_exponent_fit(c.k, c.d, R_list, c.Q, scan_kwargs={"mode": c.mode, "seed": c.seed})
    rows = [{"R": int(R), "block_error": float(e)} for R, e in zip(fit.R, fit.block_error)]
    return Result("error-fit", rows, {"eps_hat": fit.eps_hat, "predicted": fit.predicted,
                                      "inconclusive": fit.inconclusive, "reason": fit.reason}, "eps_hat")


def _grid_input(c: RunConfig) -> operators.GridFunction:
    if c.input:
        return operators.GridFunction.load(c.input)
    c.need("L", "d")
    return operators.GridFunction.delta(int(c.L), int(c.d))


def cmd_average(c: RunConfig) -> Result:
    c.need("k", "d", "levels")
    f = _grid_input(c)
    levels = parse_levels(c.levels, c.k, c.d, admissible=True)
    b = c.budget()
    outs = pmap(lambda n: operators.spherical_average(f, lattice.SphereSpec(c.k, c.d, n), c.method, b), levels, c.threads)
    rows = [{"level": n, "at_origin": _cplx(g.values.flat[0]), "sup": float(np.abs(g.values).max()),
             "l2": g.norm(2.0)} for n, g in zip(levels, outs)]
    return Result("average", rows, {"max_sup": max((r["sup"] for r in rows), default=0.0)}, "max_sup")


def cmd_maxop(c: RunConfig) -> Result:
    c.need("k", "d", "r_max", "p")
    f = _grid_input(c)
    rep = operators.maximal_ratio(f, c.k, c.d, float(c.r_max), float(c.p), c.method, c.budget())
    rows = [{"R": int(R), "ratio": float(v)} for R, v in zip(rep.block_R, rep.partial)]
    return Result("maxop", rows, {"ratio": rep.value}, "ratio")


def cmd_probe(c: RunConfig) -> Result:
    c.need("k", "d", "p_list", "r_max")
    ps = parse_list(c.p_list, _exponent)
    tab = operators.lp_threshold_probe(c.k, c.d, ps, float(c.r_max), points=int(c.points or 12))
    rows = [{"k": c.k, "d": c.d, "p": row.p, "r_max": tab.r_max, "partial_sum": float(row.partial[-1]),
             "slope": row.slope} for row in tab.rows]
    return Result("probe", rows, {"threshold": tab.threshold, "crossover": tab.crossover}, "crossover")


def _exponent(s: str) -> float:
    s = s.strip()
    return math.inf if s in ("inf", "Infinity") else float(Fraction(s))


def _system(c: RunConfig):
    c.need("system")
    src = c.system
    obj = json.loads(Path(src).read_text()) if not src.lstrip().startswith("{") else json.loads(src)
    sys_, f = ergodic.system_from_json(obj)
    if f is None:
        raise DomainError("the system descriptor needs freqs and coeffs")
    return sys_, f


def cmd_ergodic(c: RunConfig) -> Result:
    c.need("k", "levels")
    sys_, f = _system(c)
    levels = parse_levels(c.levels, c.k, sys_.d, admissible=True)
    x = [float(v) for v in parse_list(c.x)] if c.x is not None else [0.0] * sys_.s
    method = c.method if c.method in ("direct", "spectral") else "spectral"
    vals = pmap(lambda n: ergodic.ergodic_average(sys_, f, lattice.SphereSpec(c.k, sys_.d, n), x, method, c.budget()),
                levels, c.threads)
    rows = [{"level": n, "average": _cplx(v), "deviation": abs(v - f.mean)} for n, v in zip(levels, vals)]
    verdict = ergodic.strongly_ergodic(sys_)
    return Result("ergodic", rows, {"strongly_ergodic": verdict.status,
                                    "last_deviation": rows[-1]["deviation"] if rows else float("nan")},
                  "last_deviation")


def cmd_spectral(c: RunConfig) -> Result:
    sys_, f = _system(c)
    nu = ergodic.spectral_measure(sys_, f)
    err = ergodic.verify_spectral_identity(sys_, f, seed=c.seed)
    rows = [{"eta": [float(e) for e in a], "weight": float(w)} for a, w in zip(nu.atoms, nu.weights)]
    return Result("spectral", rows, {"total_mass": nu.total_mass, "identity_error": err}, "identity_error")


def cmd_convergence(c: RunConfig) -> Result:
    c.need("k", "levels")
    sys_, f = _system(c)
    levels = parse_levels(c.levels, c.k, sys_.d, admissible=True)
    xs = ergodic.sample_points(sys_.s, int(c.samples), c.seed)
    scan = ergodic.convergence_scan(sys_, f, c.k, sys_.d, levels, xs, budget=c.budget())
    rows = [{"level": int(n), "x_index": j, "dev": float(scan.deviations[i, j])}
            for i, n in enumerate(scan.levels) for j in range(xs.shape[0])]
    summary = {"slope": scan.slope}
    if c.r_j is not None:
        split = ergodic.low_high_split_diagnostic(sys_, f, c.k, sys_.d, float(c.r_j), levels, budget=c.budget())
        summary.update(low_mass=split.low_mass, high_decay_slope=split.high_decay_slope)
    return Result("convergence", rows, summary, "slope")


HANDLERS = {name: globals()["cmd_" + name.replace("-", "_")] for name in COMMANDS}


def run(config: RunConfig) -> Result:
    """Dispatch a validated config to its command; raises library errors."""
    if config.command not in HANDLERS:
        raise DomainError(f"unknown subcommand {config.command!r}")
    if config.format not in ("csv", "json"):
        raise DomainError("format must be csv or json")
    if config.threads < 1:
        raise DomainError("threads must be >= 1")
    return HANDLERS[config.command](config)


# --- argument parsing --------------------------------------------------------------------------

_COMMON = {
    "k": int, "d": int, "level": int, "levels": str, "xi": str, "t": str, "N": str, "a": int, "q": int, "m": str,
    "q_max": int, "X": int, "R": str, "r": float, "direction": str, "T_max": float, "points": int, "z": str,
    "Q": int, "M": int, "mode": str, "L": int, "input": str, "p": float, "p_list": str, "r_max": float,
    "system": str, "x": str, "samples": int, "r_j": float, "tau": str, "method": str,
    "level_max": int, "enumeration_cap": int,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kspheres", description="Arithmetic k-sphere experiments.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name in COMMANDS:
        sp = sub.add_parser(name, help=HANDLERS[name].__doc__ or name, argument_default=argparse.SUPPRESS)
        for key, typ in _COMMON.items():
            flags = ["--" + key.replace("_", "-")]
            if "_" in key:
                flags.append("--" + key)
            sp.add_argument(*flags, dest=key, type=typ)
        sp.add_argument("--output", "-o")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
        sp.add_argument("--threads", type=int)
        sp.add_argument("--seed", type=int)
    return parser


def config_from_args(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    values: dict = {}
    cfg_path = ns.pop("config", None)
    if cfg_path:
        values.update(json.loads(Path(cfg_path).read_text()))
    values.update(ns)
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise DomainError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**values)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except SystemExit as e:  # argparse usage errors
        return int(e.code or 0) if e.code in (0, None) else 2
    except (KSpheresError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        res = run(cfg)
        text = res.render(cfg.format)
    except ResourceError as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return 3
    except (DomainError, PreconditionError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    print(res.summary_line(), file=sys.stderr)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
