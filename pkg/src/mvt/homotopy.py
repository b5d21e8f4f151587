"""A compact numerical polynomial-system solver.

Total-degree homotopy and parameter homotopy with a fourth-order Runge-Kutta
predictor on the Davidenko equation and a Newton corrector, adaptive step
control, and endpoint classification.  Systems are compiled once into flat
term arrays so that each tracker step costs a handful of vectorized
operations.

Path tracking is embarrassingly parallel; results are merged in path order so
output is deterministic regardless of the worker count.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .poly import MultiPoly, UsageError


@dataclass(frozen=True)
class TrackerOptions:
    step_init: float = 0.05
    step_min: float = 1e-7
    step_max: float = 0.25
    tol_corrector: float = 1e-10
    max_corrector_iters: int = 3
    residual_cap: float = 1e-6
    tol_dedup: float = 1e-8
    real_tol: float = 1e-8
    blowup: float = 1e8
    max_steps: int = 10_000
    cond_cap: float = 1e12
    growth_streak: int = 4

    def to_json(self) -> dict:
        return {
            "step_init": self.step_init,
            "step_min": self.step_min,
            "step_max": self.step_max,
            "tol_corrector": self.tol_corrector,
            "max_corrector_iters": self.max_corrector_iters,
            "residual_cap": self.residual_cap,
            "tol_dedup": self.tol_dedup,
            "real_tol": self.real_tol,
            "blowup": self.blowup,
            "cond_cap": self.cond_cap,
        }


@dataclass(frozen=True)
class Solution:
    point: tuple
    residual: float
    cond: float
    status: str  # regular | singular | at_infinity | failed
    is_real: bool
    path_id: int

    def to_json(self) -> dict:
        return {
            "point": [[z.real, z.imag] for z in self.point],
            "residual": self.residual,
            "cond": self.cond,
            "status": self.status,
            "real": self.is_real,
            "path": self.path_id,
        }


class _TermStack:
    """Flat term table: value[out] += coef * prod x_i^xe_i * prod p_j^pe_j."""

    __slots__ = ("coef", "xe", "pe", "scatter", "x_used", "p_used", "size")

    def __init__(self, n_out, coefs, xexps, pexps, outs):
        self.size = len(coefs)
        self.coef = np.asarray(coefs, dtype=np.complex128)
        xe = np.asarray(xexps, dtype=np.int64).reshape(len(xexps), -1)
        pe = np.asarray(pexps, dtype=np.int64).reshape(len(pexps), -1)
        self.xe = xe[: self.size]
        self.pe = pe[: self.size]
        scatter = np.zeros((n_out, max(self.size, 1)))
        for t, o in enumerate(outs):
            scatter[o, t] = 1.0
        self.scatter = scatter
        self.x_used = [i for i in range(self.xe.shape[1]) if self.xe[:, i].any()]
        self.p_used = [j for j in range(self.pe.shape[1]) if self.pe[:, j].any()]

    def max_degrees(self, nx, nq):
        dx = [int(self.xe[:, i].max()) if self.size else 0 for i in range(nx)]
        dp = [int(self.pe[:, j].max()) if self.size else 0 for j in range(nq)]
        return dx, dp

    def eval(self, xpow, ppow):
        if self.size == 0:
            return np.zeros(self.scatter.shape[0], dtype=np.complex128)
        v = self.coef
        for i in self.x_used:
            v = v * xpow[i][self.xe[:, i]]
        for j in self.p_used:
            v = v * ppow[j][self.pe[:, j]]
        return self.scatter @ v

    def eval_abs(self, xpow, ppow):
        """Sum of term magnitudes per output (the natural residual scale)."""
        if self.size == 0:
            return np.zeros(self.scatter.shape[0])
        v = np.abs(self.coef)
        for i in self.x_used:
            v = v * np.abs(xpow[i][self.xe[:, i]])
        for j in self.p_used:
            v = v * np.abs(ppow[j][self.pe[:, j]])
        return self.scatter @ v


class CompiledSystem:
    """Square (or rectangular) polynomial system with fast batched evaluation
    of values and Jacobians with respect to unknowns and parameters."""

    def __init__(self, equations: Sequence[MultiPoly], unknowns: Sequence[str], parameters: Sequence[str] = ()):
        if not equations:
            raise UsageError("empty system")
        table = equations[0].table
        for eq in equations:
            if eq.table != table:
                raise UsageError("equations use different variable tables")
        self.n_eqs = len(equations)
        self.unknowns = list(unknowns)
        self.parameters = list(parameters)
        self.n = len(self.unknowns)
        self.q = len(self.parameters)
        x_idx = [table.index(v) for v in self.unknowns]
        p_idx = [table.index(v) for v in self.parameters]
        allowed = set(x_idx) | set(p_idx)

        val = ([], [], [], [])  # coefs, xexps, pexps, outs
        jx = ([], [], [], [])
        jp = ([], [], [], [])
        degrees = []
        for e, eq in enumerate(equations):
            deg = 0
            for mono, coeff in eq.terms.items():
                for i, expnt in enumerate(mono):
                    if expnt and i not in allowed:
                        raise UsageError(
                            f"variable {table.names[i]!r} is neither unknown nor parameter"
                        )
                xvec = tuple(mono[i] for i in x_idx)
                pvec = tuple(mono[j] for j in p_idx)
                deg = max(deg, sum(xvec))
                c = complex(coeff)
                val[0].append(c)
                val[1].append(xvec)
                val[2].append(pvec)
                val[3].append(e)
                for a, expnt in enumerate(xvec):
                    if expnt:
                        lowered = xvec[:a] + (expnt - 1,) + xvec[a + 1:]
                        jx[0].append(c * expnt)
                        jx[1].append(lowered)
                        jx[2].append(pvec)
                        jx[3].append(e * self.n + a)
                for b, expnt in enumerate(pvec):
                    if expnt:
                        lowered = pvec[:b] + (expnt - 1,) + pvec[b + 1:]
                        jp[0].append(c * expnt)
                        jp[1].append(xvec)
                        jp[2].append(lowered)
                        jp[3].append(e * self.q + b)
            degrees.append(deg)
        self.degrees = tuple(degrees)
        nx, nq = max(self.n, 1), max(self.q, 1)
        self._val = _TermStack(self.n_eqs, val[0], val[1] or [[0] * nx], val[2] or [[0] * nq], val[3])
        self._jx = _TermStack(self.n_eqs * self.n, jx[0], jx[1] or [[0] * nx], jx[2] or [[0] * nq], jx[3])
        if self.q:
            self._jp = _TermStack(self.n_eqs * self.q, jp[0], jp[1] or [[0] * nx], jp[2] or [[0] * nq], jp[3])
        else:
            self._jp = None
        dmax_x = [0] * self.n
        dmax_p = [0] * self.q
        for stack in filter(None, (self._val, self._jx, self._jp)):
            dx, dp = stack.max_degrees(self.n, self.q)
            dmax_x = [max(a, b) for a, b in zip(dmax_x, dx)] if self.n else []
            dmax_p = [max(a, b) for a, b in zip(dmax_p, dp)] if self.q else []
        self._dmax_x = dmax_x
        self._dmax_p = dmax_p

    def _powers(self, x, p):
        xpow = [None] * self.n
        for i in range(self.n):
            d = self._dmax_x[i]
            arr = np.empty(d + 1, dtype=np.complex128)
            arr[0] = 1.0
            for e in range(1, d + 1):
                arr[e] = arr[e - 1] * x[i]
            xpow[i] = arr
        ppow = [None] * self.q
        for j in range(self.q):
            d = self._dmax_p[j]
            arr = np.empty(d + 1, dtype=np.complex128)
            arr[0] = 1.0
            for e in range(1, d + 1):
                arr[e] = arr[e - 1] * p[j]
            ppow[j] = arr
        return xpow, ppow

    def eval(self, x, p=()):
        xpow, ppow = self._powers(x, p)
        return self._val.eval(xpow, ppow)

    def jac_x(self, x, p=()):
        xpow, ppow = self._powers(x, p)
        return self._jx.eval(xpow, ppow).reshape(self.n_eqs, self.n)

    def jac_p(self, x, p=()):
        if self._jp is None:
            raise UsageError("system has no parameters")
        xpow, ppow = self._powers(x, p)
        return self._jp.eval(xpow, ppow).reshape(self.n_eqs, self.q)

    def eval_and_jac(self, x, p=()):
        xpow, ppow = self._powers(x, p)
        return (
            self._val.eval(xpow, ppow),
            self._jx.eval(xpow, ppow).reshape(self.n_eqs, self.n),
        )

    def residual_scale(self, x, p=()):
        xpow, ppow = self._powers(x, p)
        return self._val.eval_abs(xpow, ppow)


# -- homotopies --------------------------------------------------------------------


class _TotalDegreeHomotopy:
    """H(x, s) = s F(x) + (1 - s) gamma (x_i^{d_i} - b_i)."""

    def __init__(self, system: CompiledSystem, gamma: complex, consts: np.ndarray):
        self.f = system
        self.gamma = gamma
        self.b = consts
        self.d = np.asarray(system.degrees, dtype=np.int64)

    def _start(self, x):
        return x ** self.d - self.b

    def value(self, x, s):
        return s * self.f.eval(x) + (1.0 - s) * self.gamma * self._start(x)

    def jac(self, x, s):
        j = s * self.f.jac_x(x)
        j[np.diag_indices_from(j)] += (1.0 - s) * self.gamma * self.d * x ** (self.d - 1)
        return j

    def value_jac_ds(self, x, s):
        fval, fjac = self.f.eval_and_jac(x)
        g = self._start(x)
        h = s * fval + (1.0 - s) * self.gamma * g
        j = s * fjac
        j[np.diag_indices_from(j)] += (1.0 - s) * self.gamma * self.d * x ** (self.d - 1)
        return h, j, fval - self.gamma * g

    def residual_scale(self, x, s):
        return self.f.residual_scale(x) + np.abs(x) ** self.d + np.abs(self.b)


class _ParameterHomotopy:
    """H(x, s) = F(x; p(s)) along a randomly detoured parameter path.

    Coordinates away from zero move geometrically (in log space), which keeps
    the path well conditioned when start and target moments differ by orders
    of magnitude; near-zero coordinates fall back to a straight segment.  The
    complex detour bump keeps the path off the discriminant; it vanishes at
    both endpoints, so identity moves return the same solutions.
    """

    def __init__(self, system: CompiledSystem, p0, p1, rng: np.random.Generator, style: str = "log"):
        self.f = system
        p0 = np.asarray(p0, dtype=np.complex128)
        p1 = np.asarray(p1, dtype=np.complex128)
        self.p0 = p0
        self.p1 = p1
        q = len(p0)
        floor = 1e-8 * (1.0 + max(np.max(np.abs(p0)), np.max(np.abs(p1))))
        if style == "linear":
            self.log_mask = np.zeros(q, dtype=bool)
        else:
            self.log_mask = (np.abs(p0) > floor) & (np.abs(p1) > floor)
        with np.errstate(divide="ignore", invalid="ignore"):
            self.l0 = np.where(self.log_mask, np.log(np.where(self.log_mask, p0, 1.0)), 0.0)
            self.l1 = np.where(self.log_mask, np.log(np.where(self.log_mask, p1, 1.0)), 0.0)
        noise = rng.standard_normal(q) + 1j * rng.standard_normal(q)
        self.bump_log = 0.4 * noise
        self.bump_lin = 0.25 * (1.0 + np.abs(p0) + np.abs(p1)) * noise

    def _p_dp(self, s):
        ell = (1.0 - s) * self.l0 + s * self.l1 + s * (1.0 - s) * self.bump_log
        p_log = np.exp(ell)
        dp_log = p_log * (self.l1 - self.l0 + (1.0 - 2.0 * s) * self.bump_log)
        p_lin = (1.0 - s) * self.p0 + s * self.p1 + s * (1.0 - s) * self.bump_lin
        dp_lin = self.p1 - self.p0 + (1.0 - 2.0 * s) * self.bump_lin
        return np.where(self.log_mask, p_log, p_lin), np.where(self.log_mask, dp_log, dp_lin)

    def value(self, x, s):
        p, _ = self._p_dp(s)
        return self.f.eval(x, p)

    def jac(self, x, s):
        p, _ = self._p_dp(s)
        return self.f.jac_x(x, p)

    def value_jac_ds(self, x, s):
        p, dp = self._p_dp(s)
        h = self.f.eval(x, p)
        j = self.f.jac_x(x, p)
        ds = self.f.jac_p(x, p) @ dp
        return h, j, ds

    def residual_scale(self, x, s):
        p, _ = self._p_dp(s)
        return self.f.residual_scale(x, p)


# -- the tracker --------------------------------------------------------------------


def _davidenko(hom, x, s):
    _, j, ds = hom.value_jac_ds(x, s)
    return np.linalg.solve(j, -ds)


def _newton(hom, x, s, iters, tol):
    """Newton iterations at fixed s; returns (converged, x)."""
    for _ in range(iters):
        h = hom.value(x, s)
        j = hom.jac(x, s)
        try:
            dx = np.linalg.solve(j, -h)
        except np.linalg.LinAlgError:
            return False, x
        x = x + dx
        if not np.all(np.isfinite(x)):
            return False, x
        if np.max(np.abs(dx)) <= tol * (1.0 + np.max(np.abs(x))):
            return True, x
    return False, x


def _track_path(hom, x0, opts: TrackerOptions):
    """Track from s=0 to s=1; returns (x, status, s) with status one of
    tracked | at_infinity | failed."""
    with np.errstate(all="ignore"):
        return _track_path_inner(hom, x0, opts)


def _track_path_inner(hom, x0, opts: TrackerOptions):
    x = np.asarray(x0, dtype=np.complex128)
    s = 0.0
    h = opts.step_init
    streak = 0
    for _ in range(opts.max_steps):
        if s >= 1.0:
            return x, "tracked", s
        h_eff = min(h, 1.0 - s)
        ok = False
        try:
            k1 = _davidenko(hom, x, s)
            k2 = _davidenko(hom, x + 0.5 * h_eff * k1, s + 0.5 * h_eff)
            k3 = _davidenko(hom, x + 0.5 * h_eff * k2, s + 0.5 * h_eff)
            k4 = _davidenko(hom, x + h_eff * k3, s + h_eff)
            xp = x + (h_eff / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if np.all(np.isfinite(xp)):
                ok, xc = _newton(hom, xp, s + h_eff, opts.max_corrector_iters, opts.tol_corrector)
        except (np.linalg.LinAlgError, FloatingPointError):
            ok = False
        if ok:
            x = xc
            s += h_eff
            streak += 1
            if np.max(np.abs(x)) > opts.blowup:
                return x, "at_infinity", s
            if streak >= opts.growth_streak:
                h = min(h * 2.0, opts.step_max)
                streak = 0
        else:
            streak = 0
            h *= 0.5
            if h < opts.step_min:
                if np.max(np.abs(x)) > 1e4:
                    return x, "at_infinity", s
                return x, "failed", s
    return x, "failed", s


def _scaled_residual(hom, x, s) -> float:
    """Residual relative to the sum of term magnitudes (backward-error style),
    so the check is meaningful regardless of the system's natural scale."""
    value = np.abs(hom.value(x, s))
    scale = 1.0 + hom.residual_scale(x, s)
    return float(np.max(value / scale))


def _classify_endpoint(hom, x, status, path_id, opts: TrackerOptions, s_reached: float = 1.0):
    """Polish a tracked endpoint at s=1 and classify it."""
    with np.errstate(all="ignore"):
        return _classify_endpoint_inner(hom, x, status, path_id, opts, s_reached)


def _classify_endpoint_inner(hom, x, status, path_id, opts: TrackerOptions, s_reached: float = 1.0):
    if status == "at_infinity":
        return Solution(tuple(x), float("inf"), float("inf"), "at_infinity", False, path_id)
    if status == "failed":
        # a path that stalled close to the end may still polish to a genuine
        # root; anything Newton certifies at s=1 is a root of the target
        if s_reached >= 0.9 and np.all(np.isfinite(x)):
            ok, xf = _newton(hom, x, 1.0, 25, 1e-13)
            if ok and np.max(np.abs(xf)) <= 1e4 and _scaled_residual(hom, xf, 1.0) <= opts.residual_cap:
                return _classify_endpoint_inner(hom, xf, "tracked", path_id, opts)
            if np.max(np.abs(x)) > 1e3:
                return Solution(tuple(x), float("inf"), float("inf"), "at_infinity", False, path_id)
        return Solution(tuple(x), float("inf"), float("inf"), "failed", False, path_id)
    _, xf = _newton(hom, x, 1.0, 25, 1e-13)
    if not np.all(np.isfinite(xf)) or np.max(np.abs(xf)) > opts.blowup:
        return Solution(tuple(x), float("inf"), float("inf"), "at_infinity", False, path_id)
    residual = _scaled_residual(hom, xf, 1.0)
    if residual > opts.residual_cap:
        return Solution(tuple(xf), residual, float("inf"), "failed", False, path_id)
    jac = hom.jac(xf, 1.0)
    # row-equilibrate so badly scaled equations do not masquerade as singular
    row_scale = np.maximum(np.max(np.abs(jac), axis=1), 1e-300)
    try:
        cond = float(np.linalg.cond(jac / row_scale[:, None]))
    except np.linalg.LinAlgError:  # pragma: no cover
        cond = float("inf")
    regular = residual <= opts.tol_corrector and cond < opts.cond_cap
    status = "regular" if regular else "singular"
    is_real = bool(np.all(np.abs(xf.imag) <= opts.real_tol * (1.0 + np.abs(xf.real))))
    return Solution(tuple(xf), residual, cond, status, is_real, path_id)


def _rel_dist(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    scale = 1.0 + np.maximum(np.abs(a), np.abs(b))
    return float(np.max(np.abs(a - b) / scale))


def dedup_solutions(solutions: Sequence[Solution], tol: float) -> list:
    """Keep one representative per cluster of coordinatewise-close points."""
    kept: list = []
    for sol in solutions:
        if any(_rel_dist(sol.point, other.point) < tol for other in kept):
            continue
        kept.append(sol)
    return kept


def _map_paths(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class SolveReport:
    solutions: list
    paths_tracked: int
    converged: int
    at_infinity: int
    failed: int
    seed: int
    options: TrackerOptions
    warnings: list = field(default_factory=list)

    @property
    def regular_count(self) -> int:
        return sum(1 for s in self.solutions if s.status == "regular")

    def to_json(self) -> dict:
        return {
            "paths_tracked": self.paths_tracked,
            "converged": self.converged,
            "at_infinity": self.at_infinity,
            "failed": self.failed,
            "regular_count": self.regular_count,
            "seed": self.seed,
            "warnings": list(self.warnings),
            "options": self.options.to_json(),
            "solutions": [s.to_json() for s in self.solutions],
        }


def _canonical_sort(solutions: list) -> list:
    return sorted(
        solutions,
        key=lambda s: tuple(v for z in s.point for v in (round(z.real, 10), round(z.imag, 10))),
    )


def total_degree_solve(
    equations: Sequence[MultiPoly],
    unknowns: Sequence[str],
    opts: TrackerOptions | None = None,
    seed: int = 0,
    workers: int = 1,
) -> SolveReport:
    """Solve a square system by continuation from x_i^{d_i} = b_i.

    Tracks prod(d_i) paths and returns the deduplicated finite endpoints; the
    report carries full path accounting.
    """
    opts = opts or TrackerOptions()
    system = CompiledSystem(equations, unknowns)
    if system.n_eqs != system.n:
        raise UsageError("total-degree solve needs a square system")
    if any(d == 0 for d in system.degrees):
        raise UsageError("every equation must have positive degree in the unknowns")
    rng = np.random.default_rng(seed)
    gamma = np.exp(2j * np.pi * rng.random())
    consts = (0.5 + rng.random(system.n)) * np.exp(2j * np.pi * rng.random(system.n))
    hom = _TotalDegreeHomotopy(system, gamma, consts)

    roots_per_var = []
    for i, d in enumerate(system.degrees):
        base = consts[i] ** (1.0 / d)
        roots_per_var.append([base * np.exp(2j * np.pi * m / d) for m in range(d)])
    starts = [np.array(combo, dtype=np.complex128) for combo in itertools.product(*roots_per_var)]

    def run(args):
        path_id, x0 = args
        x, status, s = _track_path(hom, x0, opts)
        return _classify_endpoint(hom, x, status, path_id, opts, s)

    endpoints = _map_paths(run, list(enumerate(starts)), workers)
    finite = [s for s in endpoints if s.status in ("regular", "singular")]
    deduped = dedup_solutions(_canonical_sort(finite), opts.tol_dedup)
    n_inf = sum(1 for s in endpoints if s.status == "at_infinity")
    n_fail = sum(1 for s in endpoints if s.status == "failed")
    warnings = []
    if n_fail > 0.01 * len(starts):
        warnings.append(f"{n_fail} of {len(starts)} paths failed; counts may be unreliable")
    return SolveReport(
        solutions=deduped,
        paths_tracked=len(starts),
        converged=len(finite),
        at_infinity=n_inf,
        failed=n_fail,
        seed=seed,
        options=opts,
        warnings=warnings,
    )


def parameter_track(
    system: CompiledSystem,
    start_params: Sequence[complex],
    start_solutions: Sequence[Sequence[complex]],
    target_params: Sequence[complex],
    opts: TrackerOptions | None = None,
    rng: np.random.Generator | None = None,
    workers: int = 1,
    path_style: str = "log",
    retries: int = 2,
) -> list:
    """Track solutions of F(x; p) from p = start_params to p = target_params.

    The parameter path takes a random complex detour off the straight segment
    to avoid the discriminant; coordinates move geometrically by default
    (``path_style="log"``), which handles start and target scales differing
    by orders of magnitude.  Paths that stall are retried along fresh detours
    with more conservative stepping.  Endpoints come back in start order;
    paths that never reach a finite solution are flagged, never dropped.
    """
    opts = opts or TrackerOptions()
    rng = rng if rng is not None else np.random.default_rng(0)
    p0 = np.asarray(start_params, dtype=np.complex128)
    p1 = np.asarray(target_params, dtype=np.complex128)
    hom = _ParameterHomotopy(system, p0, p1, rng, style=path_style)

    for x in start_solutions:
        xv = np.asarray(x, dtype=np.complex128)
        res = float(
            np.max(np.abs(system.eval(xv, p0)) / (1.0 + system.residual_scale(xv, p0)))
        )
        if res > opts.residual_cap:
            raise UsageError(f"start solution residual {res:.3e} exceeds the cap")

    def runner(h, o):
        def run(args):
            path_id, x0 = args
            x, status, s = _track_path(h, np.asarray(x0, dtype=np.complex128), o)
            return _classify_endpoint(h, x, status, path_id, o, s)
        return run

    results = _map_paths(runner(hom, opts), list(enumerate(start_solutions)), workers)
    rank = {"regular": 3, "singular": 2, "at_infinity": 1, "failed": 0}
    for attempt in range(retries):
        bad = [i for i, r in enumerate(results) if r.status in ("failed", "at_infinity")]
        if not bad:
            break
        retry_opts = replace(
            opts,
            step_init=opts.step_init / (2.0 ** (attempt + 1)),
            step_min=opts.step_min / 10.0,
            max_corrector_iters=opts.max_corrector_iters + 1,
        )
        # a fresh detour usually clears the obstruction; flipping the path
        # geometry on the last attempt handles the stubborn cases
        retry_style = path_style
        if attempt == retries - 1:
            retry_style = "linear" if path_style == "log" else "log"
        retry_hom = _ParameterHomotopy(system, p0, p1, rng, style=retry_style)
        redone = _map_paths(
            runner(retry_hom, retry_opts),
            [(i, start_solutions[i]) for i in bad],
            workers,
        )
        for sol in redone:
            if rank[sol.status] > rank[results[sol.path_id].status]:
                results[sol.path_id] = sol
    return results
