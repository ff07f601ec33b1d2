"""Catalog of one-dimensional distributions.

Every model is an immutable value with exact moments, a vectorized density,
a closed-form differential entropy where one exists (nats), affine
transforms, and seeded sampling.  Models with no closed-form entropy
(mixtures, gridded densities) are handled numerically by
:mod:`entrolab.grids`.

One-sided families (exponential, gamma) carry an optional shift and a
``reflected`` flag so that the catalog is closed under affine maps ``a*X + b``
with ``a != 0``; reflection and shift leave the entropy untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy import special

if TYPE_CHECKING:  # pragma: no cover
    from .grids import GridDensity

__all__ = [
    "ModelError",
    "MomentSummary",
    "DensityModel",
    "Gaussian",
    "Uniform",
    "Exponential",
    "Laplace",
    "Gamma",
    "Mixture",
    "Gridded",
    "make_model",
    "model_to_dict",
    "closed_form_entropy",
    "affine",
    "sample",
]

LN_2PI_E = math.log(2.0 * math.pi * math.e)

# Per-tail probability used when converting a sigma window into a finite
# grid window for heavy-shouldered (exponential-type) tails.
TAIL_EPS = 1e-13

WEIGHT_SUM_TOL = 1e-9


class ModelError(ValueError):
    """Distribution parameters violate the catalog contract."""


@dataclass(frozen=True)
class MomentSummary:
    """Mean and variance of a model, exact for analytic kinds."""

    mean: float
    variance: float


@dataclass(frozen=True)
class DensityModel:
    """Base class for catalog entries.  Instances are immutable values."""

    def moments(self) -> MomentSummary:
        raise NotImplementedError

    def closed_form_entropy(self) -> float | None:
        """Differential entropy in nats, or None when no closed form exists."""
        return None

    def pdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def cdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    def window(self, eps: float = TAIL_EPS) -> tuple[float, float]:
        """Finite interval containing all mass except at most eps per tail."""
        raise NotImplementedError

    def bounded_density(self) -> bool:
        return True

    def affine(self, a: float, b: float) -> "DensityModel":
        raise NotImplementedError

    def sample_rng(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Gaussian(DensityModel):
    mean: float
    variance: float

    def __post_init__(self):
        if not (self.variance > 0.0) or not math.isfinite(self.variance):
            raise ModelError(f"gaussian variance must be positive, got {self.variance}")
        if not math.isfinite(self.mean):
            raise ModelError("gaussian mean must be finite")

    def moments(self) -> MomentSummary:
        return MomentSummary(self.mean, self.variance)

    def closed_form_entropy(self) -> float:
        return 0.5 * (LN_2PI_E + math.log(self.variance))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.mean) ** 2 / (2.0 * self.variance)
        return np.exp(-z) / math.sqrt(2.0 * math.pi * self.variance)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return special.ndtr((x - self.mean) / math.sqrt(self.variance))

    def window(self, eps: float = TAIL_EPS):
        half = -special.ndtri(eps) * math.sqrt(self.variance)
        return (self.mean - half, self.mean + half)

    def affine(self, a, b):
        _check_scale(a)
        return Gaussian(a * self.mean + b, a * a * self.variance)

    def sample_rng(self, rng, n):
        return rng.normal(self.mean, math.sqrt(self.variance), n)

    def to_dict(self):
        return {"kind": "gaussian", "mean": self.mean, "variance": self.variance}


@dataclass(frozen=True)
class Uniform(DensityModel):
    lower: float
    upper: float

    def __post_init__(self):
        if not (self.upper > self.lower):
            raise ModelError(f"uniform needs lower < upper, got [{self.lower}, {self.upper}]")
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ModelError("uniform bounds must be finite")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def moments(self) -> MomentSummary:
        return MomentSummary(0.5 * (self.lower + self.upper), self.width ** 2 / 12.0)

    def closed_form_entropy(self) -> float:
        return math.log(self.width)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lower) & (x <= self.upper)
        return np.where(inside, 1.0 / self.width, 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip((x - self.lower) / self.width, 0.0, 1.0)

    def support(self):
        return (self.lower, self.upper)

    def window(self, eps: float = TAIL_EPS):
        return (self.lower, self.upper)

    def affine(self, a, b):
        _check_scale(a)
        lo, hi = a * self.lower + b, a * self.upper + b
        return Uniform(min(lo, hi), max(lo, hi))

    def sample_rng(self, rng, n):
        return rng.uniform(self.lower, self.upper, n)

    def to_dict(self):
        return {"kind": "uniform", "lower": self.lower, "upper": self.upper}


@dataclass(frozen=True)
class Exponential(DensityModel):
    """Law of ``s*E + shift`` with E ~ Exponential(rate), s = -1 if reflected."""

    rate: float
    shift: float = 0.0
    reflected: bool = False

    def __post_init__(self):
        if not (self.rate > 0.0) or not math.isfinite(self.rate):
            raise ModelError(f"exponential rate must be positive, got {self.rate}")

    def _sign(self) -> float:
        return -1.0 if self.reflected else 1.0

    def moments(self) -> MomentSummary:
        return MomentSummary(self._sign() / self.rate + self.shift, 1.0 / self.rate ** 2)

    def closed_form_entropy(self) -> float:
        return 1.0 - math.log(self.rate)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        t = self._sign() * (x - self.shift)
        return np.where(t >= 0.0, self.rate * np.exp(-self.rate * np.clip(t, 0.0, None)), 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        t = self.rate * (x - self.shift)
        if self.reflected:
            return np.where(t < 0.0, np.exp(np.clip(t, None, 0.0)), 1.0)
        return np.where(t > 0.0, -np.expm1(-np.clip(t, 0.0, None)), 0.0)

    def support(self):
        if self.reflected:
            return (-math.inf, self.shift)
        return (self.shift, math.inf)

    def window(self, eps: float = TAIL_EPS):
        reach = -math.log(eps) / self.rate
        if self.reflected:
            return (self.shift - reach, self.shift)
        return (self.shift, self.shift + reach)

    def affine(self, a, b):
        _check_scale(a)
        return Exponential(
            rate=self.rate / abs(a),
            shift=a * self.shift + b,
            reflected=self.reflected ^ (a < 0),
        )

    def sample_rng(self, rng, n):
        return self._sign() * rng.exponential(1.0 / self.rate, n) + self.shift

    def to_dict(self):
        d = {"kind": "exponential", "rate": self.rate}
        if self.shift != 0.0:
            d["shift"] = self.shift
        if self.reflected:
            d["reflected"] = True
        return d


@dataclass(frozen=True)
class Laplace(DensityModel):
    location: float
    scale: float

    def __post_init__(self):
        if not (self.scale > 0.0) or not math.isfinite(self.scale):
            raise ModelError(f"laplace scale must be positive, got {self.scale}")

    def moments(self) -> MomentSummary:
        return MomentSummary(self.location, 2.0 * self.scale ** 2)

    def closed_form_entropy(self) -> float:
        return 1.0 + math.log(2.0 * self.scale)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-np.abs(x - self.location) / self.scale) / (2.0 * self.scale)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        t = (x - self.location) / self.scale
        return np.where(t < 0.0, 0.5 * np.exp(np.clip(t, None, 0.0)),
                        1.0 - 0.5 * np.exp(-np.clip(t, 0.0, None)))

    def window(self, eps: float = TAIL_EPS):
        reach = self.scale * math.log(1.0 / (2.0 * eps))
        return (self.location - reach, self.location + reach)

    def affine(self, a, b):
        _check_scale(a)
        return Laplace(a * self.location + b, abs(a) * self.scale)

    def sample_rng(self, rng, n):
        return rng.laplace(self.location, self.scale, n)

    def to_dict(self):
        return {"kind": "laplace", "location": self.location, "scale": self.scale}


@dataclass(frozen=True)
class Gamma(DensityModel):
    """Law of ``s*G + shift`` with G ~ Gamma(shape, scale), s = -1 if reflected."""

    shape: float
    scale: float
    shift: float = 0.0
    reflected: bool = False

    def __post_init__(self):
        if not (self.shape > 0.0) or not (self.scale > 0.0):
            raise ModelError(
                f"gamma shape and scale must be positive, got ({self.shape}, {self.scale})"
            )

    def _sign(self) -> float:
        return -1.0 if self.reflected else 1.0

    def moments(self) -> MomentSummary:
        return MomentSummary(self._sign() * self.shape * self.scale + self.shift,
                             self.shape * self.scale ** 2)

    def closed_form_entropy(self) -> float:
        k = self.shape
        return k + math.log(self.scale) + math.lgamma(k) + (1.0 - k) * special.digamma(k)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        t = self._sign() * (x - self.shift) / self.scale
        t = np.clip(t, 0.0, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            logpdf = ((self.shape - 1.0) * np.log(t) - t
                      - math.lgamma(self.shape) - math.log(self.scale))
        out = np.exp(logpdf)
        return np.where(self._sign() * (x - self.shift) > 0.0, out, 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        t = np.clip(self._sign() * (x - self.shift) / self.scale, 0.0, None)
        c = special.gammainc(self.shape, t)
        return 1.0 - c if self.reflected else c

    def support(self):
        if self.reflected:
            return (-math.inf, self.shift)
        return (self.shift, math.inf)

    def window(self, eps: float = TAIL_EPS):
        reach = special.gammaincinv(self.shape, 1.0 - eps) * self.scale
        if self.reflected:
            return (self.shift - reach, self.shift)
        return (self.shift, self.shift + reach)

    def bounded_density(self) -> bool:
        # shape < 1 puts an integrable singularity at the support edge
        return self.shape >= 1.0

    def affine(self, a, b):
        _check_scale(a)
        return Gamma(
            shape=self.shape,
            scale=self.scale * abs(a),
            shift=a * self.shift + b,
            reflected=self.reflected ^ (a < 0),
        )

    def sample_rng(self, rng, n):
        return self._sign() * rng.gamma(self.shape, self.scale, n) + self.shift

    def to_dict(self):
        d = {"kind": "gamma", "shape": self.shape, "scale": self.scale}
        if self.shift != 0.0:
            d["shift"] = self.shift
        if self.reflected:
            d["reflected"] = True
        return d


@dataclass(frozen=True)
class Mixture(DensityModel):
    weights: tuple[float, ...]
    components: tuple[DensityModel, ...]

    def __post_init__(self):
        if len(self.components) == 0:
            raise ModelError("mixture needs at least one component")
        if len(self.weights) != len(self.components):
            raise ModelError("mixture weights and components must have equal length")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0.0):
            raise ModelError("mixture weights must be nonnegative")
        total = float(w.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ModelError(f"mixture weights sum to {total}, beyond {WEIGHT_SUM_TOL} of 1")
        object.__setattr__(self, "weights", tuple(float(x) for x in w / total))
        object.__setattr__(self, "components", tuple(self.components))

    def moments(self) -> MomentSummary:
        ms = [c.moments() for c in self.components]
        mean = sum(w * m.mean for w, m in zip(self.weights, ms))
        second = sum(w * (m.variance + m.mean ** 2) for w, m in zip(self.weights, ms))
        return MomentSummary(mean, second - mean ** 2)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for w, c in zip(self.weights, self.components):
            out += w * c.pdf(x)
        return out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for w, c in zip(self.weights, self.components):
            out += w * c.cdf(x)
        return out

    def support(self):
        los, his = zip(*(c.support() for c in self.components))
        return (min(los), max(his))

    def window(self, eps: float = TAIL_EPS):
        los, his = zip(*(c.window(eps) for c in self.components))
        return (min(los), max(his))

    def bounded_density(self) -> bool:
        return all(c.bounded_density() for c in self.components)

    def affine(self, a, b):
        _check_scale(a)
        return Mixture(self.weights, tuple(c.affine(a, b) for c in self.components))

    def sample_rng(self, rng, n):
        idx = rng.choice(len(self.weights), size=n, p=np.asarray(self.weights))
        out = np.empty(n, dtype=float)
        for i, c in enumerate(self.components):
            where = idx == i
            cnt = int(where.sum())
            if cnt:
                out[where] = c.sample_rng(rng, cnt)
        return out

    def to_dict(self):
        return {
            "kind": "mixture",
            "weights": list(self.weights),
            "components": [c.to_dict() for c in self.components],
        }


@dataclass(frozen=True)
class Gridded(DensityModel):
    """A density given only through its grid representation."""

    grid: "GridDensity"

    def _axes(self):
        spec = self.grid.spec
        centers = spec.origin + (np.arange(spec.count) + 0.5) * spec.step
        return centers, spec.step

    def moments(self) -> MomentSummary:
        x, step = self._axes()
        v = self.grid.values
        mean = float(np.sum(x * v) * step)
        var = float(np.sum((x - mean) ** 2 * v) * step)
        return MomentSummary(mean, var)

    def pdf(self, x):
        centers, _ = self._axes()
        return np.interp(np.asarray(x, dtype=float), centers, self.grid.values,
                         left=0.0, right=0.0)

    def cdf(self, x):
        centers, step = self._axes()
        cum = np.cumsum(self.grid.values) * step
        return np.interp(np.asarray(x, dtype=float), centers, cum, left=0.0, right=1.0)

    def support(self):
        spec = self.grid.spec
        return (spec.origin, spec.origin + spec.count * spec.step)

    def window(self, eps: float = TAIL_EPS):
        return self.support()

    def affine(self, a, b):
        _check_scale(a)
        from .grids import GridDensity, GridSpec

        spec = self.grid.spec
        width = spec.count * spec.step
        if a > 0:
            origin = a * spec.origin + b
            values = self.grid.values / a
        else:
            origin = a * (spec.origin + width) + b
            values = self.grid.values[::-1] / (-a)
        new_spec = GridSpec(origin=origin, step=abs(a) * spec.step, count=spec.count)
        return Gridded(GridDensity(spec=new_spec, values=values,
                                   mass_defect=self.grid.mass_defect,
                                   error_estimate=self.grid.error_estimate))

    def sample_rng(self, rng, n):
        spec = self.grid.spec
        cell_mass = self.grid.values * spec.step
        cum = np.cumsum(cell_mass)
        cum /= cum[-1]
        u = rng.random(n)
        cells = np.searchsorted(cum, u, side="right")
        cells = np.clip(cells, 0, spec.count - 1)
        return spec.origin + (cells + rng.random(n)) * spec.step

    def to_dict(self):
        spec = self.grid.spec
        m = self.moments()
        return {
            "kind": "gridded",
            "origin": spec.origin,
            "step": spec.step,
            "count": spec.count,
            "mean": m.mean,
            "variance": m.variance,
        }


def _check_scale(a: float) -> None:
    if a == 0.0 or not math.isfinite(a):
        raise ModelError("affine scale must be finite and nonzero")


_KINDS = {
    "gaussian": lambda d: Gaussian(d["mean"], d["variance"]),
    "uniform": lambda d: Uniform(d["lower"], d["upper"]),
    "exponential": lambda d: Exponential(d["rate"], d.get("shift", 0.0),
                                         d.get("reflected", False)),
    "laplace": lambda d: Laplace(d["location"], d["scale"]),
    "gamma": lambda d: Gamma(d["shape"], d["scale"], d.get("shift", 0.0),
                             d.get("reflected", False)),
}


def make_model(spec: dict) -> DensityModel:
    """Build a validated model from a parameter record (see ``to_dict``)."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ModelError(f"model spec must be a dict with a 'kind' field, got {spec!r}")
    kind = spec["kind"]
    if kind == "mixture":
        comps = tuple(make_model(c) for c in spec["components"])
        return Mixture(tuple(spec["weights"]), comps)
    if kind in _KINDS:
        try:
            return _KINDS[kind](spec)
        except KeyError as e:
            raise ModelError(f"missing parameter {e} for kind '{kind}'") from e
    raise ModelError(f"unknown model kind '{kind}'")


def model_to_dict(m: DensityModel) -> dict:
    return m.to_dict()


def closed_form_entropy(m: DensityModel) -> float | None:
    """Exact differential entropy in nats, or None for mixture/gridded kinds."""
    return m.closed_form_entropy()


def affine(m: DensityModel, a: float, b: float) -> DensityModel:
    """Law of ``a*X + b``; entropy shifts by log|a|."""
    return m.affine(a, b)


def sample(m: DensityModel, n: int, seed: int) -> np.ndarray:
    """Draw n reproducible samples; identical (model, n, seed) give identical output."""
    if n < 1:
        raise ModelError("sample count must be >= 1")
    rng = np.random.default_rng(seed)
    return m.sample_rng(rng, n)
