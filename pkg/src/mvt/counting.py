"""Solution counting runs: Euclidean-distance degrees and identifiability
degrees of 2-mixtures via monodromy.

The ED run solves the critical system of the squared distance from a generic
complex target to the d=3 moment hypersurface patch.  The monodromy run
plants a random mixture, then grows the fiber over its moment vector by
tracking loops through random complex parameter points, applying the
component-relabeling symmetry after every loop, and stopping after a fixed
number of loops with no new solutions.  Counts are reported as reproduced
lower bounds.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Sequence

import numpy as np

from . import moments as mo
from .homotopy import (
    CompiledSystem,
    TrackerOptions,
    _rel_dist,
    parameter_track,
    total_degree_solve,
)
from .poly import MultiPoly, UsageError, VarTable
from .varieties import Family, generators


_MIXTURE_FAMILIES = (Family.IG, Family.GAMMA, Family.GAUSSIAN)


def patch_generator(family: Family) -> MultiPoly:
    """The single generator of the d=3 hypersurface on the patch m0 = 1,
    as a polynomial in (m1, m2, m3)."""
    family = Family(family)
    if family not in _MIXTURE_FAMILIES:
        raise UsageError("patch generators exist for ig, gamma, gaussian")
    gens = generators(family, 3)
    assert len(gens) == 1
    table = VarTable(["m1", "m2", "m3"])
    mapping = {
        "m0": table.const(1),
        "m1": table.variable("m1"),
        "m2": table.variable("m2"),
        "m3": table.variable("m3"),
    }
    return gens[0].compose(mapping, table)


@dataclass
class EdDegreeReport:
    family: str
    count: int
    seed: int
    reliable: bool
    solve: object

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "count": self.count,
            "seed": self.seed,
            "reliable": self.reliable,
            "paths_tracked": self.solve.paths_tracked,
            "at_infinity": self.solve.at_infinity,
            "failed": self.solve.failed,
        }


def ed_degree(
    family: Family,
    seed: int = 0,
    opts: TrackerOptions | None = None,
    workers: int = 1,
) -> EdDegreeReport:
    """Count the critical points of the squared distance from a generic
    complex target to the d=3 hypersurface patch: the system

        f = 0,   u * df/dm_i - (m_i - target_i) = 0   (i = 1..3)

    in unknowns (m1, m2, m3, u), solved by total-degree continuation."""
    family = Family(family)
    f3 = patch_generator(family)
    table = VarTable(["m1", "m2", "m3", "u"])
    mapping = {v: table.variable(v) for v in ("m1", "m2", "m3")}
    f = f3.compose(mapping, table)
    u = table.variable("u")

    rng = np.random.default_rng(seed)
    target = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    eqs = [f]
    for i, v in enumerate(("m1", "m2", "m3")):
        eq = u * f.diff(v) - table.variable(v) + table.const(complex(target[i]))
        eqs.append(eq)
    solve = total_degree_solve(eqs, ["m1", "m2", "m3", "u"], opts=opts, seed=seed, workers=workers)
    return EdDegreeReport(
        family=family.value,
        count=solve.regular_count,
        seed=seed,
        reliable=not solve.warnings,
        solve=solve,
    )


# -- mixture moment systems ----------------------------------------------------------


def mixture_unknowns(family: Family, k: int) -> list:
    dist = mo.Dist(family.value)
    names = []
    for i in range(1, k + 1):
        names.extend(f"{v}{i}" for v in mo.PARAM_VARS[dist])
    names.extend(f"a{i}" for i in range(1, k))
    return names


def mixture_system(family: Family, k: int, d: int | None = None):
    """The square moment-matching system for a k-mixture.

    Unknowns: component parameter pairs plus k-1 mixing weights (3k-1 total);
    parameters: the target moments mt1..mtd with d = 3k-1 by default.
    Returns (CompiledSystem, unknown names, parameter names).
    """
    family = Family(family)
    if family not in _MIXTURE_FAMILIES:
        raise UsageError("mixture systems exist for ig, gamma, gaussian")
    if k < 1:
        raise UsageError("k must be >= 1")
    d = 3 * k - 1 if d is None else d
    dist = mo.Dist(family.value)
    pnames = mo.PARAM_VARS[dist]
    unknowns = mixture_unknowns(family, k)
    params = [f"mt{r}" for r in range(1, d + 1)]
    table = VarTable(unknowns + params)

    seq = mo.moments(dist, d).entries
    comp_moments = []
    for i in range(1, k + 1):
        ren = {v: f"{v}{i}" for v in pnames}
        comp_moments.append([e.rename(ren, table) for e in seq])

    alphas = [table.variable(f"a{i}") for i in range(1, k)]
    alpha_last = table.const(1)
    for a in alphas:
        alpha_last = alpha_last - a
    weights = alphas + [alpha_last]

    eqs = []
    for r in range(1, d + 1):
        acc = table.zero()
        for i in range(k):
            acc = acc + weights[i] * comp_moments[i][r]
        eqs.append(acc - table.variable(f"mt{r}"))
    system = CompiledSystem(eqs, unknowns, params)
    return system, unknowns, params


def swap_images(point: Sequence[complex], k: int, n_params: int = 2) -> list:
    """All label-swapped copies of a mixture solution vector.

    The vector layout is k parameter blocks followed by the first k-1
    weights; the last weight is implicit as 1 - sum."""
    point = list(point)
    blocks = [point[i * n_params:(i + 1) * n_params] for i in range(k)]
    alphas = point[k * n_params:]
    weights = alphas + [1.0 - sum(alphas)]
    images = []
    for perm in itertools.permutations(range(k)):
        vec = []
        for i in perm:
            vec.extend(blocks[i])
        w = [weights[i] for i in perm]
        vec.extend(w[:-1])
        images.append(np.asarray(vec, dtype=np.complex128))
    return images


def plant_mixture(family: Family, k: int, rng: random.Random):
    """A well-separated random rational mixture and its exact moment vector.

    Component means differ by a factor of at least 1.5 and weights stay in
    [0.2, 0.8], which keeps the start solution away from the discriminant.
    """
    family = Family(family)
    dist = mo.Dist(family.value)
    d = 3 * k - 1

    def rand_frac(lo, hi, denom=64):
        return Fraction(rng.randint(ceil(lo * denom), floor(hi * denom)), denom)

    for _ in range(256):
        comps = []
        for _ in range(k):
            if dist is mo.Dist.IG:
                comps.append((rand_frac(0.5, 4), rand_frac(0.05, 1)))  # (mu, t)
            elif dist is mo.Dist.GAMMA:
                comps.append((rand_frac(0.5, 5), rand_frac(0.25, 3)))  # (k, theta)
            else:
                comps.append((rand_frac(0.5, 5), rand_frac(0.25, 3)))  # (mu, s2)
        if dist is mo.Dist.GAMMA:
            means = [c[0] * c[1] for c in comps]
        else:
            means = [c[0] for c in comps]
        separated = all(
            max(a, b) >= Fraction(3, 2) * min(a, b)
            for i, a in enumerate(means)
            for b in means[i + 1:]
        )
        if not separated or len(set(comps)) != k:
            continue
        if k > 1:
            weights = []
            remaining = Fraction(1)
            ok = True
            for i in range(k - 1):
                w = rand_frac(0.2, 0.8) * remaining
                if not Fraction(1, 20) <= w:
                    ok = False
                    break
                weights.append(w)
                remaining -= w
            if not ok or not Fraction(1, 20) <= remaining <= Fraction(19, 20):
                continue
            weights.append(remaining)
        else:
            weights = [Fraction(1)]

        moment_vec = [Fraction(0)] * (d + 1)
        for w, c in zip(weights, comps):
            vals = mo.moment_values(dist, c, d)
            for r in range(d + 1):
                moment_vec[r] += w * vals[r]

        x = []
        for c in comps:
            x.extend(float(v) for v in c)
        x.extend(float(w) for w in weights[:-1])
        return (
            np.asarray(x, dtype=np.complex128),
            np.asarray([float(v) for v in moment_vec[1:]], dtype=np.complex128),
            {"components": comps, "weights": weights},
        )
    raise UsageError("failed to plant a well-separated mixture")


def _merge_new(known: list, candidates: Sequence[np.ndarray], tol: float) -> int:
    added = 0
    for cand in candidates:
        if not np.all(np.isfinite(cand)):
            continue
        if any(_rel_dist(cand, x) < tol for x in known):
            continue
        known.append(cand)
        added += 1
    return added


def _orbit_classes(points: list, k: int, n_params: int, tol: float) -> list:
    """Group solutions into label-swap orbits; returns a list of orbit sizes."""
    unused = list(range(len(points)))
    sizes = []
    while unused:
        i = unused.pop(0)
        orbit = [i]
        for img in swap_images(points[i], k, n_params):
            for j in list(unused):
                if _rel_dist(img, points[j]) < tol:
                    unused.remove(j)
                    orbit.append(j)
        sizes.append(len(orbit))
    return sizes


@dataclass
class MonodromyReport:
    family: str
    k: int
    seed: int
    raw_count: int
    class_count: int
    loops: int
    stalled: bool
    lost_paths: int
    orbit_sizes: list = field(default_factory=list)
    base_params: np.ndarray | None = None
    solutions: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "k": self.k,
            "seed": self.seed,
            "raw_count": self.raw_count,
            "class_count": self.class_count,
            "loops": self.loops,
            "stalled": self.stalled,
            "lost_paths": self.lost_paths,
            "orbit_sizes": self.orbit_sizes,
            "lower_bound": True,
        }


def monodromy_count(
    family: Family,
    k: int,
    seed: int = 0,
    opts: TrackerOptions | None = None,
    stall_loops: int = 10,
    max_loops: int = 400,
    workers: int = 1,
) -> MonodromyReport:
    """Grow the fiber of the mixture moment map over a planted moment vector.

    Loops pass through random complex parameter points (triangles and
    two-leg detours, alternating path geometry); the label-swap group
    saturates orbits after every loop; stops after ``stall_loops``
    consecutive loops without a new solution."""
    family = Family(family)
    if k < 2:
        raise UsageError("monodromy counting needs k >= 2")
    opts = opts or TrackerOptions()
    d = 3 * k - 1
    system, unknowns, _ = mixture_system(family, k)
    n_params = len(mo.PARAM_VARS[mo.Dist(family.value)])

    py_rng = random.Random(seed)
    np_rng = np.random.default_rng(seed)
    x_star, base, _model = plant_mixture(family, k, py_rng)

    # polish the planted solution and seed the set with its swap orbit
    sols: list = []
    res = np.max(np.abs(system.eval(x_star, base)) / (1.0 + system.residual_scale(x_star, base)))
    assert res < 1e-10, f"planted start residual {res}"
    _merge_new(sols, [x_star], opts.tol_dedup)
    _merge_new(sols, swap_images(x_star, k, n_params), opts.tol_dedup)

    scale = 1.0 + np.abs(base)
    stall = 0
    loops = 0
    lost = 0
    while stall < stall_loops and loops < max_loops:
        loops += 1
        # rotate loop geometries and radii; a single geometry can leave an
        # orbit undiscovered inside the stall budget
        style = ("linear", "log", "mixed")[loops % 3]
        radius = float(np.exp(np_rng.uniform(-0.9, 1.1)))
        q1 = base + radius * scale * (np_rng.standard_normal(d) + 1j * np_rng.standard_normal(d))
        if style == "mixed":
            legs = [(base, q1, "linear"), (q1, base, "log")]
        else:
            q2 = base + radius * scale * (np_rng.standard_normal(d) + 1j * np_rng.standard_normal(d))
            legs = [(base, q1, style), (q1, q2, style), (q2, base, style)]
        xs = [np.asarray(s, dtype=np.complex128) for s in sols]
        for p_from, p_to, leg_style in legs:
            results = parameter_track(system, p_from, xs, p_to, opts, np_rng, workers,
                                      path_style=leg_style)
            good = [np.asarray(r.point) for r in results if r.status == "regular"]
            lost += len(xs) - len(good)
            xs = good
            if not xs:
                break
        added = _merge_new(sols, xs, opts.tol_dedup)
        for x in list(sols):
            added += _merge_new(sols, swap_images(x, k, n_params), opts.tol_dedup)
        stall = 0 if added else stall + 1

    orbit_sizes = _orbit_classes(sols, k, n_params, 1e-6)
    assert sum(orbit_sizes) == len(sols)
    return MonodromyReport(
        family=family.value,
        k=k,
        seed=seed,
        raw_count=len(sols),
        class_count=len(orbit_sizes),
        loops=loops,
        stalled=stall >= stall_loops,
        lost_paths=lost,
        orbit_sizes=orbit_sizes,
        base_params=base,
        solutions=sols,
    )
