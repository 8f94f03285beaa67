"""Distinguished logarithm and winding index of non-vanishing curves.

The log branch is anchored at the node just right of z = 0 with its
principal argument (for a characteristic-function grid the value there is
close to 1, realizing the L(0) = 0 normalization) and extended continuously
in both directions.  Whenever consecutive samples move too far apart
(|F(z_{j+1})/F(z_j) - 1| > 0.5) the interval is bisected through the
originating distribution, up to 20 levels, so deep modulus dips cannot alias
the phase.  Once every sub-step satisfies the ratio bound its phase step is
below pi/6, well under the pi/2 safety threshold.

Two winding estimators:

* `winding_from_log` averages Im L over the outermost 5 percent of nodes at
  each end and takes the difference over 2 pi.  Works on any sampled curve.
* `winding_index` uses the atom structure: for a law p delta_{x0} + w f,
  the recentred curve is p (1 + u(z)) with u = w f_hat e^{-i x0 z} / p, so
  the continuous phase minus the principal argument of 1 + u is an exact
  multiple of 2 pi once |u| < 1.  The branch counters at the two grid ends
  give the index as an exact integer difference, with the distance of the
  pre-rounding values from integers (< 0.05 required) as the settledness
  check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .charfn import CharFunctionGrid
from .distribution import Distribution
from .errors import UnwrapError

__all__ = [
    "LogGrid",
    "unwrap_phase",
    "distinguished_log",
    "winding_from_log",
    "winding_from_samples",
    "winding_index",
]

_RATIO_TOL = 0.5
_PHASE_LIMIT = np.pi / 2
_MIN_MODULUS = 1e-8
_EXP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LogGrid:
    """Continuous log samples L with exp(L) = F at every node."""

    z_grid: np.ndarray
    values: np.ndarray
    source: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z_grid, dtype=float)
        vals = np.asarray(self.values, dtype=complex)
        src = np.asarray(self.source, dtype=complex)
        for arr in (z, vals, src):
            arr.setflags(write=False)
        object.__setattr__(self, "z_grid", z)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "source", src)
        if not (z.size == vals.size == src.size):
            raise UnwrapError("log grid arrays must share a length")
        err = float(np.abs(np.exp(vals) - src).max(initial=0.0))
        if err > _EXP_TOL:
            raise UnwrapError(
                f"exp(L) deviates from F by {err:.3g} > 1e-10"
            )
        steps = np.abs(np.diff(vals.imag))
        if steps.size and float(steps.max()) >= np.pi:
            j = int(np.argmax(steps))
            raise UnwrapError(
                f"phase step {float(steps.max()):.3g} >= pi between "
                f"z = {z[j]!r} and z = {z[j + 1]!r}; grid too coarse"
            )


def _refined_increment(z1: float, z2: float, v1: complex, v2: complex,
                       evaluator: Optional[Callable], depth: int) -> float:
    ratio = v2 / v1
    ang = float(np.angle(ratio))
    if abs(ratio - 1.0) <= _RATIO_TOL:
        return ang
    if evaluator is None or depth <= 0:
        if abs(ang) < _PHASE_LIMIT:
            return ang
        raise UnwrapError(
            f"cannot track the phase across [{z1!r}, {z2!r}]: "
            "refinement budget exhausted (near-zero of F?)"
        )
    zm = 0.5 * (z1 + z2)
    vm = complex(np.asarray(evaluator(np.array([zm])))[0])
    if vm == 0:
        raise UnwrapError(f"F vanishes at refined node z = {zm!r}")
    return (_refined_increment(z1, zm, v1, vm, evaluator, depth - 1)
            + _refined_increment(zm, z2, vm, v2, evaluator, depth - 1))


def unwrap_phase(z: np.ndarray, values: np.ndarray,
                 evaluator: Optional[Callable] = None,
                 max_bisect: int = 20) -> np.ndarray:
    """Continuous phase along the curve, anchored just right of center."""
    z = np.asarray(z, dtype=float)
    values = np.asarray(values, dtype=complex)
    if np.any(values == 0):
        raise UnwrapError("curve passes through 0; no continuous phase")
    ratios = values[1:] / values[:-1]
    inc = np.angle(ratios)
    for j in np.nonzero(np.abs(ratios - 1.0) > _RATIO_TOL)[0]:
        inc[j] = _refined_increment(z[j], z[j + 1], values[j], values[j + 1],
                                    evaluator, max_bisect)
    anchor = values.size // 2
    theta = np.empty(values.size)
    theta[anchor] = float(np.angle(values[anchor]))
    if anchor < values.size - 1:
        theta[anchor + 1:] = theta[anchor] + np.cumsum(inc[anchor:])
    if anchor > 0:
        theta[:anchor] = theta[anchor] - np.cumsum(inc[:anchor][::-1])[::-1]
    return theta


def distinguished_log(F: CharFunctionGrid, dist: Optional[Distribution] = None,
                      max_bisect: int = 20) -> LogGrid:
    """Continuous log branch of a characteristic-function grid."""
    moduli = np.abs(F.values)
    low = float(moduli.min())
    if low <= _MIN_MODULUS:
        raise UnwrapError(
            f"minimum modulus {low:.3g} <= 1e-8; the log branch is not "
            "numerically trustworthy (check for zeros first)"
        )
    z = F.z_grid()
    evaluator = dist.charfn if dist is not None else None
    theta = unwrap_phase(z, F.values, evaluator, max_bisect)
    return LogGrid(z, np.log(moduli) + 1j * theta, F.values)


def winding_from_log(log_grid: LogGrid) -> tuple[float, int]:
    """(pre-rounding estimate, index) via outermost-5-percent tail averages."""
    im = log_grid.values.imag
    k = max(1, int(round(0.05 * im.size)))
    raw = float((im[-k:].mean() - im[:k].mean()) / (2 * np.pi))
    m = int(round(raw))
    if abs(raw - m) >= 0.05:
        raise UnwrapError(
            f"winding estimate {raw!r} is {abs(raw - m):.3g} from an "
            "integer; tails not settled, increase z_max"
        )
    return raw, m


def winding_from_samples(z, values, evaluator: Optional[Callable] = None) -> int:
    """Winding index of a raw sampled non-vanishing curve."""
    z = np.asarray(z, dtype=float)
    values = np.asarray(values, dtype=complex)
    theta = unwrap_phase(z, values, evaluator)
    log_grid = LogGrid(z, np.log(np.abs(values)) + 1j * theta, values)
    return winding_from_log(log_grid)[1]


def winding_index(F: CharFunctionGrid, dist: Distribution) -> int:
    """Winding index of the recentred curve e^{-i x0 z} charfn(z).

    Requires a verdict of no real zeros (the caller's responsibility) and a
    single atom; multi-atom laws go through the lattice route instead.
    """
    if len(dist.atoms) != 1:
        raise UnwrapError(
            "winding index needs exactly one atom; lattice laws have their "
            "own period winding"
        )
    atom = dist.atoms[0]
    log_grid = distinguished_log(F, dist)
    z_end = F.z_max
    theta_ends = np.array([log_grid.values.imag[0], log_grid.values.imag[-1]])
    z_ends = np.array([log_grid.z_grid[0], log_grid.z_grid[-1]])
    if dist.ac_weight > 0:
        u = (dist.ac_weight / atom.mass) * \
            np.asarray(dist.ac_density.charfn(z_ends)) * \
            np.exp(-1j * atom.location * z_ends)
    else:
        u = np.zeros(2, dtype=complex)
    if np.any(np.abs(u) >= 1.0):
        raise UnwrapError(
            f"AC part still dominates the atom at |z| = {z_end!r}; "
            "increase z_max beyond the tail cutoff"
        )
    recentred = theta_ends - atom.location * z_ends
    branch_raw = (recentred - np.angle(1.0 + u)) / (2 * np.pi)
    branch = np.round(branch_raw)
    settle = float(np.abs(branch_raw - branch).max())
    if settle >= 0.05:
        raise UnwrapError(
            f"branch counters are {settle:.3g} from integers; tails not "
            "settled, increase z_max"
        )
    return int(branch[1] - branch[0])
