"""Characteristic-function grids and tail bounds.

Convention throughout: charfn(z) = integral of exp(ixz) against the law, so
a normal(b, a) law gives exp(ibz - a z^2/2) and exponential(rate) gives
rate / (rate - iz).

`charfn_eval` samples a Distribution on the symmetric endpoint grid
z_j = -z_max + j * 2 z_max/(n-1) and wraps the samples in a
`CharFunctionGrid`, which enforces the invariants every probability
characteristic function must satisfy (Hermitian symmetry, modulus <= 1,
value 1 at the origin).  Because n is even the grid has no z = 0 node, so
the origin value is checked by direct evaluation and stored alongside.

`tail_cutoff` produces the scan limit Z beyond which the discrete part
dominates the AC part: ac_weight * |f_hat(z)| <= ac_weight * TV(f)/|z| < floor
for |z| > Z = ac_weight * TV(f) / floor, where floor is a provable lower
bound for |mu_hat_discrete|:

    single atom of mass p       floor = p
    declared lattice (r, h)     floor = min |sum p_k e^{ikhz}| over a period,
                                computed on a 2^12-point period grid
    several off-lattice atoms   floor = 2 max_j p_j - p_tot if positive
                                (one mass outvotes the rest), else no bound
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .densities import (
    ExponentialDensity,
    GaussianVarianceMixDensity,
    MixtureDensity,
    NormalDensity,
    TabulatedDensity,
    UniformDensity,
)
from .distribution import Distribution, _point_sum
from .errors import GridError, ScanError

__all__ = [
    "CharFunctionGrid",
    "TailBound",
    "charfn_eval",
    "tail_cutoff",
    "discrete_floor",
    "riemann_lebesgue_bound",
    "total_variation",
]

_HERMITIAN_TOL = 1e-10
_MODULUS_TOL = 1.0 + 1e-10
_ALIASING_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class CharFunctionGrid:
    """Samples of a characteristic function on a symmetric uniform grid."""

    z_max: float
    values: np.ndarray
    value_at_zero: complex = 1.0 + 0.0j

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        n = vals.size
        if n < 1024 or n > (1 << 20) or (n & (n - 1)) != 0:
            raise GridError(
                f"n_points = {n} must be a power of two in [2^10, 2^20]"
            )
        if not self.z_max > 0:
            raise GridError("z_max must be positive")
        if abs(self.value_at_zero - 1.0) > _HERMITIAN_TOL:
            raise GridError(
                f"charfn(0) = {self.value_at_zero!r}, expected 1 within 1e-10"
            )
        moduli = np.abs(vals)
        if moduli.max(initial=0.0) > _MODULUS_TOL:
            worst = float(moduli.max())
            raise GridError(f"modulus {worst!r} exceeds 1 + 1e-10")
        herm = np.abs(vals - np.conj(vals[::-1])).max(initial=0.0)
        if herm > _HERMITIAN_TOL:
            raise GridError(
                f"Hermitian symmetry violated by {float(herm)!r} > 1e-10"
            )

    @property
    def n_points(self) -> int:
        return int(self.values.size)

    @property
    def dz(self) -> float:
        return 2.0 * self.z_max / (self.n_points - 1)

    def z_grid(self) -> np.ndarray:
        return -self.z_max + self.dz * np.arange(self.n_points)


@dataclass(frozen=True)
class TailBound:
    """|f_hat(z)| <= bound_constant / |z| for |z| >= z_threshold."""

    z_threshold: float
    bound_constant: float

    def __post_init__(self):
        if not self.z_threshold > 0:
            raise GridError("tail bound threshold must be positive")
        if self.bound_constant < 0:
            raise GridError("tail bound constant must be nonnegative")

    def at(self, z: float) -> float:
        if abs(z) < self.z_threshold:
            raise GridError(f"tail bound not valid at |z| = {abs(z)!r}")
        return self.bound_constant / abs(z)


def total_variation(density) -> float:
    return float(density.total_variation())


def riemann_lebesgue_bound(density, z: float) -> float:
    """TV(f)/|z|, an upper bound for |f_hat(z)| for piecewise-C1 densities."""
    if z == 0:
        raise ScanError("tail bound undefined at z = 0")
    return total_variation(density) / abs(z)


def _check_tabulated_resolution(density, weight: float) -> None:
    # The hat expansion is evaluated exactly, so the only frequency-domain
    # error is the interpolation gap to the true density:
    # weight * |f_hat - hat_hat| <= weight * dx^2/8 * integral|f''|.
    if isinstance(density, TabulatedDensity):
        est = weight * density.dx ** 2 * density.curvature_l1() / 8.0
        if est > _ALIASING_TOL:
            raise GridError(
                f"tabulated density too coarse: estimated transform error "
                f"{est:.3g} > {_ALIASING_TOL}; refine the x grid"
            )
    elif isinstance(density, MixtureDensity):
        for w, comp in density.components:
            _check_tabulated_resolution(comp, weight * w)


def charfn_eval(dist: Distribution, z_max: float, n_points: int) -> CharFunctionGrid:
    """Sample the characteristic function on the symmetric endpoint grid."""
    if n_points < 1024 or (n_points & (n_points - 1)) != 0:
        raise GridError("n_points must be a power of two >= 1024")
    if n_points > (1 << 20):
        raise GridError("n_points capped at 2^20")
    if not z_max > 0:
        raise GridError("z_max must be positive")
    if dist.ac_weight > 0:
        _check_tabulated_resolution(dist.ac_density, dist.ac_weight)
    dz = 2.0 * z_max / (n_points - 1)
    vals = dist.charfn_uniform(-z_max, dz, n_points)
    at_zero = complex(dist.charfn(0.0)[0])
    return CharFunctionGrid(z_max, vals, at_zero)


def discrete_floor(dist: Distribution) -> float:
    """Provable lower bound for |charfn| of the purely atomic part.

    Raises ScanError when no positive bound is available (no atoms, a lattice
    whose period function vanishes, or off-lattice atoms with no dominant
    mass).
    """
    p_tot = dist.total_atom_mass()
    if p_tot == 0:
        raise ScanError("no atoms: the discrete part has no modulus floor")
    if len(dist.atoms) == 1:
        return float(dist.atoms[0].mass)
    if dist.lattice is not None:
        r, h = dist.lattice
        w = np.linspace(0.0, 2.0 * np.pi / h, 1 << 12, endpoint=False)
        vals = _point_sum(dist.atom_locations() - r, dist.atom_masses(), w)
        floor = float(np.abs(vals).min())
        if floor <= 1e-12 * p_tot:
            raise ScanError(
                "lattice part vanishes somewhere on its period; "
                "no tail floor exists"
            )
        return floor
    p_max = float(dist.atom_masses().max())
    floor = 2.0 * p_max - p_tot
    if floor <= 0:
        raise ScanError(
            "off-lattice atoms with no dominant mass: cannot bound the "
            "discrete part away from zero"
        )
    return floor


def tail_cutoff(dist: Distribution) -> tuple[TailBound, float]:
    """Tail bound for the AC transform plus the scan limit Z.

    Beyond Z the law's transform cannot vanish:
    |charfn(z)| >= floor - ac_weight * TV/|z| > 0 for |z| > Z.
    """
    floor = discrete_floor(dist)
    if dist.ac_weight == 0:
        return TailBound(1.0, 0.0), 0.0
    tv = total_variation(dist.ac_density)
    bound = TailBound(1.0, tv)
    _verify_tail_bound(dist.ac_density, bound)
    return bound, float(dist.ac_weight * tv / floor)


def _verify_tail_bound(density, bound: TailBound) -> None:
    # Closed forms exist for the analytic families; sample 10 points past
    # the threshold and insist the bound actually dominates there.
    if isinstance(density, (NormalDensity, ExponentialDensity, UniformDensity,
                            MixtureDensity, GaussianVarianceMixDensity)):
        z = bound.z_threshold * (1.0 + np.arange(1, 11, dtype=float))
        observed = np.abs(density.charfn(z))
        allowed = bound.bound_constant / z
        if np.any(observed > allowed * (1 + 1e-12) + 1e-15):
            worst = float((observed - allowed).max())
            raise ScanError(
                f"tail bound fails verification by {worst:.3g}; "
                "total-variation computation is inconsistent"
            )
