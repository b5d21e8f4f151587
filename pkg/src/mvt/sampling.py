"""Random sampling for the five distributions and their mixtures.

All samplers are vectorized over numpy and deterministic per seed.  Normal
deviates come from the Marsaglia polar method, gamma deviates from the
Marsaglia-Tsang squeeze (with the boost trick for shape below one), inverse
Gaussian deviates from the Michael-Schucany-Haas transform, exponentials from
the inverse CDF, and chi-squared deviates are gamma specializations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .moments import Dist, moment_floats
from .poly import UsageError


@dataclass
class MixtureModel:
    """A k-component mixture with positive weights summing to one.

    Component parameter tuples use the natural parameterization per family:
    ig (mu, lambda), gamma (shape, scale), gaussian (mu, sigma^2),
    exp (mean,), chi2 (dof,).
    """

    kind: Dist
    components: list
    weights: list

    def __post_init__(self):
        self.kind = Dist(self.kind)
        self.components = [tuple(float(v) for v in c) for c in self.components]
        self.weights = [float(w) for w in self.weights]
        if len(self.components) != len(self.weights) or not self.components:
            raise UsageError("components and weights must be non-empty and aligned")
        if any(w <= 0 for w in self.weights):
            raise UsageError("weights must be positive")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise UsageError("weights must sum to 1")
        arity = {"ig": 2, "gamma": 2, "gaussian": 2, "exp": 1, "chi2": 1}[self.kind.value]
        for c in self.components:
            if len(c) != arity:
                raise UsageError(f"{self.kind.value} components take {arity} parameters")
            if self.kind is Dist.GAUSSIAN:
                if c[1] <= 0:
                    raise UsageError("gaussian variance must be positive")
            elif any(v <= 0 for v in c):
                raise UsageError(f"{self.kind.value} parameters must be positive")

    @property
    def k(self) -> int:
        return len(self.components)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "k": self.k,
            "components": [list(c) for c in self.components],
            "weights": list(self.weights),
        }


def _polar_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    out = np.empty(size)
    filled = 0
    while filled < size:
        need = size - filled
        m = max(need, 64)
        u = 2.0 * rng.random(m) - 1.0
        v = 2.0 * rng.random(m) - 1.0
        s = u * u + v * v
        ok = (s > 0.0) & (s < 1.0)
        factor = np.sqrt(-2.0 * np.log(s[ok]) / s[ok])
        z = np.concatenate([u[ok] * factor, v[ok] * factor])
        take = min(len(z), need)
        out[filled:filled + take] = z[:take]
        filled += take
    return out


def _sample_gaussian(rng, mu: float, s2: float, size: int) -> np.ndarray:
    return mu + np.sqrt(s2) * _polar_normals(rng, size)


def _sample_gamma(rng, shape: float, scale: float, size: int) -> np.ndarray:
    if shape < 1.0:
        boost = rng.random(size) ** (1.0 / shape)
        return _sample_gamma(rng, shape + 1.0, scale, size) * boost
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(size)
    filled = 0
    while filled < size:
        need = size - filled
        m = max(need, 64)
        x = _polar_normals(rng, m)
        v = (1.0 + c * x) ** 3
        u = rng.random(m)
        ok = v > 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            squeeze = u < 1.0 - 0.0331 * x ** 4
            slow = np.log(u) < 0.5 * x * x + d * (1.0 - v + np.log(np.where(ok, v, 1.0)))
        accept = ok & (squeeze | slow)
        z = d * v[accept] * scale
        take = min(len(z), need)
        out[filled:filled + take] = z[:take]
        filled += take
    return out


def _sample_ig(rng, mu: float, lam: float, size: int) -> np.ndarray:
    nu = _polar_normals(rng, size)
    y = nu * nu
    x = mu + mu * mu * y / (2.0 * lam) - (mu / (2.0 * lam)) * np.sqrt(
        4.0 * mu * lam * y + mu * mu * y * y
    )
    z = rng.random(size)
    pick_x = z <= mu / (mu + x)
    return np.where(pick_x, x, mu * mu / x)


def _sample_exp(rng, mean: float, size: int) -> np.ndarray:
    return -mean * np.log(1.0 - rng.random(size))


def _sample_chi2(rng, dof: float, size: int) -> np.ndarray:
    return _sample_gamma(rng, dof / 2.0, 2.0, size)


_SAMPLERS = {
    Dist.IG: _sample_ig,
    Dist.GAMMA: _sample_gamma,
    Dist.GAUSSIAN: _sample_gaussian,
    Dist.EXP: _sample_exp,
    Dist.CHI2: _sample_chi2,
}


def sample(model: MixtureModel, n: int, seed: int) -> np.ndarray:
    """n i.i.d. draws from the mixture: component chosen by weight, then the
    family sampler; deterministic per seed."""
    if n < 1:
        raise UsageError("n must be >= 1")
    rng = np.random.default_rng(seed)
    labels = rng.choice(model.k, size=n, p=model.weights)
    out = np.empty(n)
    for i, params in enumerate(model.components):
        mask = labels == i
        count = int(mask.sum())
        if count:
            out[mask] = _SAMPLERS[model.kind](rng, *params, count)
    return out


@dataclass
class SampleMoments:
    """Sample moments m~_1..m~_d of a data vector."""

    d: int
    values: list
    n: int
    warnings: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"d": self.d, "moments": list(self.values), "n": self.n, "warnings": self.warnings}


def sample_moments(data: Sequence[float], d: int) -> SampleMoments:
    """Averages of powers, m~_r = mean(x^r) for r = 1..d.

    Uses numpy's pairwise summation; raises if a power overflows."""
    if d < 1:
        raise UsageError("d must be >= 1")
    arr = np.asarray(data, dtype=np.float64)
    if arr.size == 0:
        raise UsageError("data must be non-empty")
    values = []
    power = np.ones_like(arr)
    with np.errstate(over="ignore", invalid="ignore"):
        for r in range(1, d + 1):
            power = power * arr
            if not np.all(np.isfinite(power)):
                raise UsageError(f"moment of order {r} overflows")
            values.append(float(np.mean(power)))
    warnings = []
    if values[0] ** 2 >= values[1] + 1e-300 and d >= 2:
        warnings.append("sample variance is not positive")
    return SampleMoments(d, values, int(arr.size), warnings)


def mixture_moment_floats(model: MixtureModel, d: int) -> list:
    """Model moments m_1..m_d of a mixture (floats)."""
    acc = np.zeros(d)
    for w, comp in zip(model.weights, model.components):
        params = _natural_to_chart(model.kind, comp)
        vals = moment_floats(model.kind, params, d)
        acc += w * np.asarray(vals[1:])
    return list(acc)


def _natural_to_chart(kind: Dist, comp: Sequence[float]) -> tuple:
    """Natural parameters to the polynomial chart (ig uses t = 1/lambda)."""
    if kind is Dist.IG:
        return (comp[0], 1.0 / comp[1])
    return tuple(comp)


def _chart_to_natural(kind: Dist, params: Sequence[float]) -> tuple:
    if kind is Dist.IG:
        return (params[0], 1.0 / params[1])
    return tuple(params)
