"""Method-of-moments estimation: closed forms for single components and
homotopy-backed estimation for 2-mixtures.

Mixture estimation tracks a precomputed generic start set (built once per
(kind, k) by monodromy and cached on disk) to the observed sample moments,
filters the endpoints down to statistically admissible candidates, optionally
refines them by weighted least squares over all supplied moments, and returns
them ranked by residual.  The selection policy (admissibility filter, then
residual ranking) is a library policy choice; the moment equations themselves
generically admit several complex solutions.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

from . import __version__
from .counting import mixture_system, monodromy_count
from .homotopy import TrackerOptions, dedup_solutions, parameter_track
from .moments import Dist, PARAM_VARS, moment_floats
from .poly import UsageError
from .sampling import MixtureModel, SampleMoments, _chart_to_natural, _natural_to_chart
from .varieties import Family

REAL_TOL = 1e-6
NEAR_REAL_TOL = 5e-2
POSITIVE_MARGIN = 1e-9


def gmm_weight_matrix(data, d: int) -> np.ndarray:
    """Two-step GMM weight: inverse of the estimated covariance of the first
    d sample moments.  Needs sample moments up to order 2d."""
    from .sampling import sample_moments

    sm2 = sample_moments(data, 2 * d)
    m = [1.0] + sm2.values
    n = sm2.n
    sigma = np.array([[(m[r + s] - m[r] * m[s]) / n for s in range(1, d + 1)] for r in range(1, d + 1)])
    scale = 1.0 / (1.0 + np.abs(np.array(m[1:d + 1])))
    dmat = np.diag(scale)
    c = dmat @ sigma @ dmat
    c = 0.5 * (c + c.T) + 1e-10 * np.eye(d) * np.trace(c) / d
    w = dmat @ np.linalg.inv(c) @ dmat
    return 0.5 * (w + w.T)


def mom_single(kind: Dist, sm: SampleMoments) -> tuple:
    """Closed-form single-component method of moments."""
    kind = Dist(kind)
    m1 = sm.values[0]
    if kind in (Dist.EXP, Dist.CHI2):
        return (m1,)
    if sm.d < 2:
        raise UsageError("two-parameter families need moments up to order 2")
    m2 = sm.values[1]
    var = m2 - m1 * m1
    if var <= 0:
        raise UsageError("degenerate variance: m2 <= m1^2")
    if kind is Dist.IG:
        return (m1, m1 ** 3 / var)
    if kind is Dist.GAMMA:
        return (m1 * m1 / var, var / m1)
    if kind is Dist.GAUSSIAN:
        return (m1, var)
    raise UsageError(f"unknown kind {kind}")


# -- start-set cache -------------------------------------------------------------


@dataclass
class StartSet:
    kind: str
    k: int
    params: np.ndarray    # complex generic parameter point
    solutions: list       # complex solution vectors
    version: str

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "kind": self.kind,
            "k": self.k,
            "version": self.version,
            "params": [[z.real, z.imag] for z in self.params],
            "solutions": [[[z.real, z.imag] for z in s] for s in self.solutions],
        }

    @staticmethod
    def from_json(payload: dict) -> "StartSet":
        params = np.array([complex(a, b) for a, b in payload["params"]])
        sols = [np.array([complex(a, b) for a, b in s]) for s in payload["solutions"]]
        return StartSet(payload["kind"], payload["k"], params, sols, payload["version"])


def default_cache_dir() -> Path:
    env = os.environ.get("MVT_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "mvt"


def _cache_file(cache_dir: Path, kind: Dist, k: int) -> Path:
    return Path(cache_dir) / f"startset-{kind.value}-k{k}.json"


def build_start_set(
    kind: Dist,
    k: int,
    seed: int = 20240,
    opts: TrackerOptions | None = None,
    workers: int = 1,
    progress=None,
) -> StartSet:
    """Saturate the fiber by monodromy, then park it at a generic complex
    parameter point for later tracking to arbitrary targets."""
    kind = Dist(kind)
    opts = opts or TrackerOptions()
    if progress:
        progress(f"building start set for {kind.value} k={k} (monodromy)")
    rep = monodromy_count(Family(kind.value), k, seed=seed, opts=opts, workers=workers)
    system, _, _ = mixture_system(Family(kind.value), k)
    rng = np.random.default_rng(seed + 1)
    d = 3 * k - 1
    scale = 1.0 + np.abs(rep.base_params)
    generic = rep.base_params + scale * (rng.standard_normal(d) + 1j * rng.standard_normal(d))
    tracked = parameter_track(system, rep.base_params, rep.solutions, generic, opts, rng, workers)
    sols = [np.asarray(s.point) for s in dedup_solutions(
        [s for s in tracked if s.status == "regular"], opts.tol_dedup)]
    if progress:
        progress(f"start set ready: {len(sols)} of {rep.raw_count} solutions retained")
    return StartSet(kind.value, k, generic, sols, __version__)


def load_or_build_start_set(
    kind: Dist,
    k: int,
    cache_dir: Path | str | None = None,
    seed: int = 20240,
    opts: TrackerOptions | None = None,
    workers: int = 1,
    progress=None,
) -> StartSet:
    kind = Dist(kind)
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    path = _cache_file(cache_dir, kind, k)
    if path.exists():
        try:
            payload = json.loads(path.read_text())
            if payload.get("version") == __version__ and payload.get("k") == k:
                return StartSet.from_json(payload)
        except (ValueError, KeyError):
            pass
    start = build_start_set(kind, k, seed=seed, opts=opts, workers=workers, progress=progress)
    cache_dir.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(start.to_json()))
    tmp.replace(path)
    return start


# -- admissibility and refinement --------------------------------------------------


def _real_if_admissible(vec: np.ndarray, kind: Dist, k: int, real_tol: float = REAL_TOL) -> list | None:
    """Return real parameters [comp params ..., weights] if the complex
    solution is statistically admissible, else None."""
    n_params = len(PARAM_VARS[kind])
    if np.any(np.abs(vec.imag) > real_tol * (1.0 + np.abs(vec.real))):
        return None
    real = vec.real
    comps = [tuple(real[i * n_params:(i + 1) * n_params]) for i in range(k)]
    alphas = list(real[k * n_params:])
    weights = alphas + [1.0 - sum(alphas)]
    for c in comps:
        if kind is Dist.GAUSSIAN:
            if c[1] < POSITIVE_MARGIN:
                return None
        elif any(v < POSITIVE_MARGIN for v in c):
            return None
    if any(not POSITIVE_MARGIN < w < 1.0 - POSITIVE_MARGIN for w in weights):
        return None
    return [comps, weights]


def _near_real_seed(vec: np.ndarray, kind: Dist, k: int) -> list | None:
    """Real projection of a mildly complex solution, clamped into the open
    admissible chamber; used only as a refinement seed when noisy moments
    push a real solution just off the real locus."""
    n_params = len(PARAM_VARS[kind])
    if np.any(np.abs(vec.imag) > NEAR_REAL_TOL * (1.0 + np.abs(vec.real))):
        return None
    real = vec.real
    comps = []
    for i in range(k):
        c = list(real[i * n_params:(i + 1) * n_params])
        for j in range(n_params):
            if kind is Dist.GAUSSIAN and j == 0:
                continue
            if c[j] < 1e-6:
                c[j] = 1e-6
        comps.append(tuple(c))
    alphas = [min(max(a, 1e-4), 1.0 - 1e-4) for a in real[k * n_params:]]
    if sum(alphas) >= 1.0 - 1e-4:
        return None
    weights = alphas + [1.0 - sum(alphas)]
    return [comps, weights]


def _pack(kind: Dist, comps, weights) -> np.ndarray:
    flat = [v for c in comps for v in c]
    flat.extend(weights[:-1])
    return np.asarray(flat, dtype=np.float64)


def _unpack(kind: Dist, x: np.ndarray, k: int):
    n_params = len(PARAM_VARS[kind])
    comps = [tuple(x[i * n_params:(i + 1) * n_params]) for i in range(k)]
    alphas = list(x[k * n_params:])
    weights = alphas + [1.0 - sum(alphas)]
    return comps, weights


def _mixture_moments_chart(kind: Dist, comps, weights, d: int) -> np.ndarray:
    acc = np.zeros(d)
    for w, c in zip(weights, comps):
        acc += w * np.asarray(moment_floats(kind, c, d)[1:])
    return acc


def _residual(kind: Dist, comps, weights, targets: np.ndarray, lmat: np.ndarray | None) -> float:
    r = _mixture_moments_chart(kind, comps, weights, len(targets)) - targets
    if lmat is not None:
        r = lmat @ r
    return float(np.sqrt(np.sum(r * r)))


def _refine(kind: Dist, comps, weights, targets: np.ndarray, k: int, lmat: np.ndarray | None):
    """Local weighted least-squares polish over all supplied moments."""
    x0 = _pack(kind, comps, weights)
    n_params = len(PARAM_VARS[kind])

    def fun(x):
        comps_x, weights_x = _unpack(kind, x, k)
        r = _mixture_moments_chart(kind, comps_x, weights_x, len(targets)) - targets
        return lmat @ r if lmat is not None else r

    lo = np.full(len(x0), POSITIVE_MARGIN)
    hi = np.full(len(x0), np.inf)
    if kind is Dist.GAUSSIAN:
        for i in range(k):
            lo[i * n_params] = -np.inf
    lo[k * n_params:] = 1e-6
    hi[k * n_params:] = 1.0 - 1e-6
    x0 = np.clip(x0, lo + 1e-12, hi - 1e-12 if np.all(np.isfinite(hi)) else None)
    try:
        res = least_squares(fun, x0, bounds=(lo, hi), method="trf", xtol=1e-14, ftol=1e-14)
        return _unpack(kind, res.x, k)
    except (ValueError, RuntimeError):
        return comps, weights


@dataclass
class Candidate:
    model: MixtureModel
    residual: float
    admissible: bool = True

    def to_json(self, rank: int) -> dict:
        return {
            "rank": rank,
            "weights": list(self.model.weights),
            "components": [list(c) for c in self.model.components],
            "residual": self.residual,
            "admissible": self.admissible,
        }


@dataclass
class EstimateResult:
    kind: str
    k: int
    candidates: list
    complex_count: int
    tracked: int
    failed_paths: int
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "candidates": [c.to_json(i + 1) for i, c in enumerate(self.candidates)],
            "complex_count": self.complex_count,
            "tracked": self.tracked,
            "failed_paths": self.failed_paths,
            "diagnostics": self.diagnostics,
        }


def _canonical_model(kind: Dist, comps, weights) -> MixtureModel:
    """Components sorted by mean, natural parameterization."""
    means = []
    for c in comps:
        if kind is Dist.GAMMA:
            means.append(c[0] * c[1])
        else:
            means.append(c[0])
    order = sorted(range(len(comps)), key=lambda i: means[i])
    natural = [_chart_to_natural(kind, comps[i]) for i in order]
    w = [weights[i] for i in order]
    return MixtureModel(kind, natural, w)


def mom_mixture(
    kind: Dist,
    k: int,
    sm: SampleMoments,
    cache_dir: Path | str | None = None,
    seed: int = 0,
    opts: TrackerOptions | None = None,
    weight_matrix: np.ndarray | None = None,
    workers: int = 1,
    progress=None,
) -> EstimateResult:
    """Mixture method of moments via parameter homotopy.

    Solves the square subsystem on the first 3k-1 moments from the cached
    start set, keeps the admissible endpoints, refines them on all d supplied
    moments when d > 3k-1 (optionally under a positive-semidefinite weight
    matrix), and returns candidates ranked by residual."""
    kind = Dist(kind)
    if kind not in (Dist.IG, Dist.GAMMA, Dist.GAUSSIAN):
        raise UsageError("mixture estimation supports ig, gamma, gaussian")
    if k == 1:
        params = mom_single(kind, sm)
        model = MixtureModel(kind, [params], [1.0])
        chart = _natural_to_chart(kind, params)
        resid = _residual(kind, [chart], [1.0], np.asarray(sm.values), None)
        return EstimateResult(kind.value, 1, [Candidate(model, resid)], 1, 0, 0)
    need = 3 * k - 1
    if sm.d < need:
        raise UsageError(f"k={k} needs moments up to order {need}, got {sm.d}")
    opts = opts or TrackerOptions()

    lmat = None
    if weight_matrix is not None:
        w = np.asarray(weight_matrix, dtype=np.float64)
        if w.shape != (sm.d, sm.d):
            raise UsageError("weight matrix must be d x d")
        lmat = np.linalg.cholesky(w + 1e-300 * np.eye(sm.d)).T

    start = load_or_build_start_set(
        kind, k, cache_dir=cache_dir, opts=opts, workers=workers, progress=progress
    )
    system, _, _ = mixture_system(Family(kind.value), k)
    targets = np.asarray(sm.values[:need], dtype=np.complex128)
    # retry whole tracks with fresh detours until the fiber looks complete;
    # every regular endpoint is a genuine solution, so merging is safe
    distinct: list = []
    failed = 0
    for round_id in range(4):
        rng = np.random.default_rng([seed, round_id])
        endpoints = parameter_track(system, start.params, start.solutions, targets,
                                    opts, rng, workers)
        finite = [e for e in endpoints if e.status == "regular"]
        failed = len(endpoints) - len(finite)
        distinct = dedup_solutions(distinct + finite, opts.tol_dedup)
        if len(distinct) >= len(start.solutions):
            break

    all_targets = np.asarray(sm.values, dtype=np.float64)
    candidates = []
    rescued = 0
    for sol in distinct:
        vec = np.asarray(sol.point)
        adm = _real_if_admissible(vec, kind, k)
        if adm is None and sm.d > need:
            # noisy moments near a fold push real solutions slightly complex;
            # the least-squares polish pulls the projection back if genuine
            adm = _near_real_seed(vec, kind, k)
            if adm is None:
                continue
            rescued += 1
        elif adm is None:
            continue
        comps, weights = adm
        if sm.d > need:
            comps, weights = _refine(kind, comps, weights, all_targets, k, lmat)
            if _real_if_admissible(_pack(kind, comps, weights).astype(complex), kind, k) is None:
                continue
        resid = _residual(kind, comps, weights, all_targets, lmat)
        try:
            model = _canonical_model(kind, comps, weights)
        except UsageError:
            continue
        candidates.append(Candidate(model, resid))
    candidates.sort(key=lambda c: c.residual)
    # canonicalization folds label swaps onto one representative; drop copies
    kept = []
    for cand in candidates:
        vec = np.asarray([v for c in cand.model.components for v in c] + cand.model.weights)
        dup = False
        for other in kept:
            ovec = np.asarray([v for c in other.model.components for v in c] + other.model.weights)
            if np.max(np.abs(vec - ovec) / (1.0 + np.maximum(np.abs(vec), np.abs(ovec)))) < 1e-7:
                dup = True
                break
        if not dup:
            kept.append(cand)
    candidates = kept
    return EstimateResult(
        kind.value,
        k,
        candidates,
        complex_count=len(distinct),
        tracked=len(endpoints),
        failed_paths=failed,
        diagnostics={"start_set_size": len(start.solutions), "near_real_rescued": rescued},
    )
