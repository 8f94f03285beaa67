"""Density descriptors for the absolutely continuous part of a law.

Each descriptor knows its density, CDF, characteristic function, total
variation, and essential support.  Analytic families keep closed forms;
tabulated densities are hat-function expansions (see `fourier`).

Characteristic-function closed forms (convention F(z) = E exp(izX)):

    normal(mean b, variance a)   exp(i b z - a z^2 / 2)
    exponential(rate r, shift c) exp(i c z) * r / (r - i z)
    uniform(l, r)                exp(i (l+r) z / 2) * sinc((r-l) z / 2)
    variance mix                 sum w_i exp(-t_i z^2/2) + segment terms

All evaluators are vectorized over z (or x) and return numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import SpecError
from .fourier import hat_l1_norm, hat_transform_grid, hat_transform_points, sinc

__all__ = [
    "NormalDensity",
    "ExponentialDensity",
    "UniformDensity",
    "TabulatedDensity",
    "MixtureDensity",
    "GaussianVarianceMixDensity",
    "DensityDescriptor",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _as_x(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class NormalDensity:
    mean: float
    variance: float

    kind = "normal"

    def __post_init__(self):
        if not self.variance > 0:
            raise SpecError("normal density needs variance > 0")

    def pdf(self, x):
        x = _as_x(x)
        s2 = self.variance
        return np.exp(-0.5 * (x - self.mean) ** 2 / s2) / np.sqrt(2 * np.pi * s2)

    def cdf(self, x):
        return ndtr((_as_x(x) - self.mean) / np.sqrt(self.variance))

    def charfn(self, z):
        z = np.asarray(z, dtype=float)
        return np.exp(1j * self.mean * z - 0.5 * self.variance * z * z)

    def total_variation(self) -> float:
        # unimodal: twice the peak height
        return 2.0 / np.sqrt(2 * np.pi * self.variance)

    def support(self, eps: float = 1e-6) -> tuple[float, float]:
        q = float(ndtri(0.5 * eps))  # negative
        half = -q * np.sqrt(self.variance)
        return self.mean - half, self.mean + half

    def scaled(self, s: float) -> "NormalDensity":
        return NormalDensity(self.mean * s, self.variance * s * s)

    def shifted(self, c: float) -> "NormalDensity":
        return NormalDensity(self.mean + c, self.variance)


@dataclass(frozen=True)
class ExponentialDensity:
    rate: float
    shift: float = 0.0

    kind = "exponential"

    def __post_init__(self):
        if not self.rate > 0:
            raise SpecError("exponential density needs rate > 0")

    def pdf(self, x):
        x = _as_x(x) - self.shift
        out = np.zeros_like(x)
        pos = x >= 0
        out[pos] = self.rate * np.exp(-self.rate * x[pos])
        return out

    def cdf(self, x):
        x = _as_x(x) - self.shift
        out = np.zeros_like(x)
        pos = x >= 0
        out[pos] = -np.expm1(-self.rate * x[pos])
        return out

    def charfn(self, z):
        z = np.asarray(z, dtype=float)
        return np.exp(1j * self.shift * z) * self.rate / (self.rate - 1j * z)

    def total_variation(self) -> float:
        # jump of size rate at the left edge plus the decaying slope
        return 2.0 * self.rate

    def support(self, eps: float = 1e-6) -> tuple[float, float]:
        return self.shift, self.shift - np.log(eps) / self.rate

    def scaled(self, s: float) -> "ExponentialDensity":
        if s <= 0:
            raise SpecError("exponential density only scales by s > 0")
        return ExponentialDensity(self.rate / s, self.shift * s)

    def shifted(self, c: float) -> "ExponentialDensity":
        return ExponentialDensity(self.rate, self.shift + c)


@dataclass(frozen=True)
class UniformDensity:
    left: float
    right: float

    kind = "uniform"

    def __post_init__(self):
        if not self.right > self.left:
            raise SpecError("uniform density needs left < right")

    def pdf(self, x):
        x = _as_x(x)
        out = np.zeros_like(x)
        inside = (x >= self.left) & (x <= self.right)
        out[inside] = 1.0 / (self.right - self.left)
        return out

    def cdf(self, x):
        x = _as_x(x)
        return np.clip((x - self.left) / (self.right - self.left), 0.0, 1.0)

    def charfn(self, z):
        z = np.asarray(z, dtype=float)
        mid = 0.5 * (self.left + self.right)
        half = 0.5 * (self.right - self.left)
        return np.exp(1j * mid * z) * sinc(half * z)

    def total_variation(self) -> float:
        return 2.0 / (self.right - self.left)

    def support(self, eps: float = 1e-6) -> tuple[float, float]:
        return self.left, self.right

    def scaled(self, s: float) -> "UniformDensity":
        a, b = self.left * s, self.right * s
        return UniformDensity(min(a, b), max(a, b))

    def shifted(self, c: float) -> "UniformDensity":
        return UniformDensity(self.left + c, self.right + c)


@dataclass(frozen=True)
class TabulatedDensity:
    """Hat-function expansion of a density on a uniform grid.

    The tabulation (x0, dx, values) is the piecewise-linear function through
    the samples, rolling off to zero over one cell beyond each end, so the
    integral is exactly dx * sum(values).
    """

    x0: float
    dx: float
    values: tuple

    kind = "tabulated"

    def __post_init__(self):
        if not self.dx > 0:
            raise SpecError("tabulated density needs dx > 0")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 4:
            raise SpecError("tabulated density needs at least 4 samples")
        if np.any(~np.isfinite(vals)):
            raise SpecError("tabulated density contains non-finite values")
        if np.any(vals < -1e-12):
            raise SpecError("tabulated density has negative values")
        object.__setattr__(self, "values", tuple(float(v) for v in vals))

    def _vals(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def _grid(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(len(self.values))

    def integral(self) -> float:
        return float(self.dx * self._vals().sum())

    def pdf(self, x):
        x = _as_x(x)
        v = self._vals()
        ext_x = np.concatenate(([self.x0 - self.dx], self._grid(),
                                [self.x0 + self.dx * len(v)]))
        ext_v = np.concatenate(([0.0], v, [0.0]))
        return np.interp(x, ext_x, ext_v, left=0.0, right=0.0)

    def cdf(self, x):
        # Exact CDF of the hat expansion: quadratic inside each cell.
        x = _as_x(x)
        v = self._vals()
        ext_v = np.concatenate(([0.0], v, [0.0]))
        ext_x = np.concatenate(([self.x0 - self.dx], self._grid(),
                                [self.x0 + self.dx * len(v)]))
        node_cdf = np.concatenate(
            ([0.0], np.cumsum(0.5 * self.dx * (ext_v[:-1] + ext_v[1:]))))
        idx = np.clip(np.searchsorted(ext_x, x, side="right") - 1,
                      0, ext_x.size - 2)
        u = np.clip(x - ext_x[idx], 0.0, self.dx)
        dens = ext_v[idx]
        slope = (ext_v[idx + 1] - ext_v[idx]) / self.dx
        out = node_cdf[idx] + dens * u + 0.5 * slope * u * u
        out[x <= ext_x[0]] = 0.0
        out[x >= ext_x[-1]] = node_cdf[-1]
        return out

    def charfn(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        return hat_transform_points(self._vals().astype(complex),
                                    self.x0, self.dx, z)

    def charfn_grid(self, z0: float, dz: float, m: int):
        return hat_transform_grid(self._vals().astype(complex),
                                  self.x0, self.dx, z0, dz, m)

    def total_variation(self) -> float:
        v = self._vals()
        return float(np.abs(np.diff(v)).sum() + abs(v[0]) + abs(v[-1]))

    def curvature_l1(self) -> float:
        """Integral of |f''| for the hat expansion: the sum of slope jumps.

        The expansion is piecewise linear, so f'' is a string of point
        masses at the knots whose weights are exactly the slope changes.
        """
        v = self._vals()
        slopes = np.concatenate(([v[0]], np.diff(v), [-v[-1]])) / self.dx
        return float(np.abs(np.diff(slopes)).sum())

    def l1_norm(self) -> float:
        return hat_l1_norm(self._vals(), self.dx)

    def support(self, eps: float = 1e-6) -> tuple[float, float]:
        n = len(self.values)
        return self.x0 - self.dx, self.x0 + self.dx * n

    def scaled(self, s: float) -> "TabulatedDensity":
        if s == 0:
            raise SpecError("cannot scale a tabulated density by 0")
        v = self._vals() / abs(s)
        if s > 0:
            return TabulatedDensity(self.x0 * s, self.dx * s, tuple(v))
        grid = self._grid() * s
        return TabulatedDensity(float(grid[-1]), self.dx * abs(s),
                                tuple(v[::-1]))

    def shifted(self, c: float) -> "TabulatedDensity":
        return TabulatedDensity(self.x0 + c, self.dx, self.values)


@dataclass(frozen=True)
class MixtureDensity:
    """Convex mixture of density descriptors; weights sum to 1."""

    components: tuple  # of (weight, descriptor)

    kind = "mixture"

    def __post_init__(self):
        if len(self.components) == 0:
            raise SpecError("mixture needs at least one component")
        wsum = 0.0
        for w, comp in self.components:
            if not w > 0:
                raise SpecError("mixture weights must be positive")
            wsum += w
        if abs(wsum - 1.0) > 1e-9:
            raise SpecError(
                f"mixture weights sum to {wsum!r}, expected 1 within 1e-9"
            )

    def pdf(self, x):
        x = _as_x(x)
        return sum(w * comp.pdf(x) for w, comp in self.components)

    def cdf(self, x):
        x = _as_x(x)
        return sum(w * comp.cdf(x) for w, comp in self.components)

    def charfn(self, z):
        return sum(w * comp.charfn(z) for w, comp in self.components)

    def total_variation(self) -> float:
        return float(sum(w * comp.total_variation()
                         for w, comp in self.components))

    def support(self, eps: float = 1e-6) -> tuple[float, float]:
        spans = [comp.support(eps) for _, comp in self.components]
        return min(s[0] for s in spans), max(s[1] for s in spans)

    def scaled(self, s: float) -> "MixtureDensity":
        return MixtureDensity(tuple((w, comp.scaled(s))
                                    for w, comp in self.components))

    def shifted(self, c: float) -> "MixtureDensity":
        return MixtureDensity(tuple((w, comp.shifted(c))
                                    for w, comp in self.components))


@dataclass(frozen=True)
class GaussianVarianceMixDensity:
    """Density of integral N(0, t) rho(dt) for an atomic + uniform-segment rho.

    ``atoms`` lists (t_i, w_i) with t_i > 0; ``segments`` lists (a, b, w) for
    a uniform mixing component w * U(a, b) on the variance axis.  Weights sum
    to 1.  The characteristic function is exact:

        sum_i w_i exp(-t_i z^2/2)
      + sum_seg w * (-expm1(-(b-a) z^2/2)) * exp(-a z^2/2) / ((b-a) z^2/2)

    The density and CDF integrate the segment parts with a fixed 64-node
    Gauss-Legendre rule after substituting t = a + (b-a) v^2, which removes
    the 1/sqrt(t - a) edge behavior when a caller pushes a towards 0.
    """

    atoms: tuple  # of (variance, weight)
    segments: tuple = ()  # of (lo, hi, weight)

    kind = "gaussian_variance_mix"

    def __post_init__(self):
        total = 0.0
        for t, w in self.atoms:
            if not (t > 0 and w > 0):
                raise SpecError("variance-mix atoms need t > 0 and weight > 0")
            total += w
        for a, b, w in self.segments:
            if not (0 <= a < b and w > 0):
                raise SpecError("variance-mix segments need 0 <= lo < hi")
            total += w
        if abs(total - 1.0) > 1e-9:
            raise SpecError("variance-mix weights must sum to 1 within 1e-9")

    def _segment_quad(self, x, fn):
        """integral over [a,b] of fn(x, t) dt/(b-a), GL after t = a+(b-a)v^2."""
        x = _as_x(x)
        out = np.zeros_like(x)
        v = 0.5 * (_GL_NODES + 1.0)  # map to (0, 1)
        wq = 0.5 * _GL_WEIGHTS
        for a, b, w in self.segments:
            t = a + (b - a) * v * v
            jac = 2.0 * v * wq  # dt/(b-a) = 2 v dv
            acc = np.zeros_like(x)
            for tj, wj in zip(t, jac):
                if tj <= 0:
                    continue
                acc += wj * fn(x, tj)
            out += w * acc
        return out

    def pdf(self, x):
        x = _as_x(x)
        out = np.zeros_like(x)
        for t, w in self.atoms:
            out += w * np.exp(-0.5 * x * x / t) / np.sqrt(2 * np.pi * t)
        out += self._segment_quad(
            x, lambda xx, t: np.exp(-0.5 * xx * xx / t) / np.sqrt(2 * np.pi * t))
        return out

    def cdf(self, x):
        x = _as_x(x)
        out = np.zeros_like(x)
        for t, w in self.atoms:
            out += w * ndtr(x / np.sqrt(t))
        out += self._segment_quad(x, lambda xx, t: ndtr(xx / np.sqrt(t)))
        return out

    def charfn(self, z):
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape, dtype=complex)
        for t, w in self.atoms:
            out += w * np.exp(-0.5 * t * z * z)
        for a, b, w in self.segments:
            u = 0.5 * (b - a) * z * z
            ratio = np.where(u > 1e-12, -np.expm1(-u) / np.where(u > 0, u, 1.0), 1.0)
            out += w * np.exp(-0.5 * a * z * z) * ratio
        return out

    def total_variation(self) -> float:
        return float(2.0 * self.pdf(np.zeros(1))[0])

    def support(self, eps: float = 1e-6) -> tuple[float, float]:
        t_max = max([t for t, _ in self.atoms] +
                    [b for _, b, _ in self.segments])
        q = float(ndtri(0.5 * eps))
        half = -q * np.sqrt(t_max)
        return -half, half

    def scaled(self, s: float) -> "GaussianVarianceMixDensity":
        s2 = s * s
        return GaussianVarianceMixDensity(
            tuple((t * s2, w) for t, w in self.atoms),
            tuple((a * s2, b * s2, w) for a, b, w in self.segments),
        )

    def shifted(self, c: float) -> "GaussianVarianceMixDensity":
        if c == 0.0:
            return self
        raise SpecError(
            "variance mixtures are centered at 0; shift the surrounding "
            "law rather than the density"
        )


DensityDescriptor = Union[
    NormalDensity,
    ExponentialDensity,
    UniformDensity,
    TabulatedDensity,
    MixtureDensity,
    GaussianVarianceMixDensity,
]
