"""Distribution model: atoms plus an absolutely continuous part.

A `Distribution` is a probability law

    mu = sum_j p_j delta_{x_j} + w * f(x) dx

with all p_j > 0 and sum p_j + w = 1 (checked to 1e-12, never silently
renormalized).  An optional declared lattice (r, h) asserts that every atom
location lies on r + h*Z; the assertion is validated, not inferred.

`validate_spec` maps the JSON wire format onto this type, `cdf_grid` samples
the CDF over a window after checking the window actually covers the law.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .densities import (
    DensityDescriptor,
    ExponentialDensity,
    GaussianVarianceMixDensity,
    MixtureDensity,
    NormalDensity,
    TabulatedDensity,
    UniformDensity,
)
from .errors import GridError, SpecError
from .fourier import inverse_transform_padded, offset_grid

__all__ = ["Atom", "Distribution", "validate_spec", "cdf_grid"]

_MASS_TOL = 1e-12
_DENSITY_MASS_TOL = 1e-9
_CHUNK = 4_000_000  # complex exponentials per chunk in direct sums


def _point_sum(locations: np.ndarray, masses: np.ndarray, z: np.ndarray) -> np.ndarray:
    """sum_j p_j exp(i x_j z), chunked so huge grids stay in memory bounds."""
    out = np.zeros(z.shape, dtype=complex)
    if locations.size == 0:
        return out
    step = max(1, _CHUNK // max(1, locations.size))
    for k in range(0, z.size, step):
        sl = slice(k, k + step)
        out[sl] = np.exp(1j * np.outer(z[sl], locations)) @ masses
    return out


@dataclass(frozen=True)
class Atom:
    location: float
    mass: float

    def __post_init__(self):
        if not (0 < self.mass <= 1):
            raise SpecError(f"atom mass {self.mass!r} outside (0, 1]")
        if not np.isfinite(self.location):
            raise SpecError("atom location must be finite")


@dataclass(frozen=True)
class Distribution:
    atoms: tuple = ()
    ac_weight: float = 0.0
    ac_density: Optional[DensityDescriptor] = None
    lattice: Optional[tuple] = None  # (offset r, step h)

    def __post_init__(self):
        if not (0 <= self.ac_weight <= 1):
            raise SpecError(f"ac_weight {self.ac_weight!r} outside [0, 1]")
        if self.ac_weight > 0 and self.ac_density is None:
            raise SpecError("positive ac_weight requires a density")
        if self.ac_weight == 0 and self.ac_density is not None:
            raise SpecError("density given but ac_weight is 0")
        total = float(sum(a.mass for a in self.atoms) + self.ac_weight)
        if abs(total - 1.0) > _MASS_TOL:
            raise SpecError(
                f"atom masses + ac_weight sum to {total!r}, expected 1 "
                f"within {_MASS_TOL}"
            )
        locs = [a.location for a in self.atoms]
        if len(set(locs)) != len(locs):
            raise SpecError("duplicate atom locations; merge masses explicitly")
        if self.lattice is not None:
            r, h = self.lattice
            if not h > 0:
                raise SpecError("lattice step must be positive")
            tol = 1e-12 * max(1.0, abs(r), h)
            for loc in locs:
                k = round((loc - r) / h)
                if abs(loc - (r + h * k)) > tol:
                    raise SpecError(
                        f"atom at {loc!r} is off the declared lattice "
                        f"r={r!r}, h={h!r}"
                    )
        if isinstance(self.ac_density, TabulatedDensity):
            mass = self.ac_density.integral()
            if abs(mass - 1.0) > _DENSITY_MASS_TOL:
                raise SpecError(
                    f"tabulated density integrates to {mass!r}, expected 1 "
                    f"within {_DENSITY_MASS_TOL}"
                )

    # -- basic structure ---------------------------------------------------

    @staticmethod
    def dirac(location: float = 0.0) -> "Distribution":
        return Distribution(atoms=(Atom(location, 1.0),))

    def atom_locations(self) -> np.ndarray:
        return np.array([a.location for a in self.atoms], dtype=float)

    def atom_masses(self) -> np.ndarray:
        return np.array([a.mass for a in self.atoms], dtype=float)

    def total_atom_mass(self) -> float:
        return float(self.atom_masses().sum())

    # -- evaluation --------------------------------------------------------

    def charfn(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = _point_sum(self.atom_locations(), self.atom_masses(), z)
        if self.ac_weight > 0:
            out = out + self.ac_weight * self.ac_density.charfn(z)
        return out

    def charfn_uniform(self, z0: float, dz: float, m: int) -> np.ndarray:
        """charfn on z0 + dz*arange(m); czt path for tabulated densities."""
        z = z0 + dz * np.arange(m)
        out = _point_sum(self.atom_locations(), self.atom_masses(), z)
        if self.ac_weight > 0:
            dens = self.ac_density
            if hasattr(dens, "charfn_grid"):
                out = out + self.ac_weight * dens.charfn_grid(z0, dz, m)
            else:
                out = out + self.ac_weight * dens.charfn(z)
        return out

    def cdf(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        for a in self.atoms:
            out += a.mass * (x >= a.location)
        if self.ac_weight > 0:
            out += self.ac_weight * self.ac_density.cdf(x)
        return out

    def essential_support(self, eps: float = 1e-6) -> tuple[float, float]:
        lows, highs = [], []
        if self.atoms:
            locs = self.atom_locations()
            lows.append(float(locs.min()))
            highs.append(float(locs.max()))
        if self.ac_weight > 0:
            lo, hi = self.ac_density.support(eps)
            lows.append(lo)
            highs.append(hi)
        return min(lows), max(highs)

    # -- transforms --------------------------------------------------------

    def shifted(self, c: float) -> "Distribution":
        if c == 0.0:
            return self
        atoms = tuple(Atom(a.location + c, a.mass) for a in self.atoms)
        dens = self.ac_density.shifted(c) if self.ac_weight > 0 else None
        lat = (self.lattice[0] + c, self.lattice[1]) if self.lattice else None
        return Distribution(atoms, self.ac_weight, dens, lat)

    def scaled(self, s: float) -> "Distribution":
        """Law of s*X; s = 0 collapses to the point mass at 0."""
        if s == 0:
            return Distribution.dirac(0.0)
        atoms = tuple(Atom(a.location * s, a.mass) for a in self.atoms)
        dens = self.ac_density.scaled(s) if self.ac_weight > 0 else None
        lat = None
        if self.lattice is not None:
            lat = (self.lattice[0] * s, self.lattice[1] * abs(s))
        return Distribution(atoms, self.ac_weight, dens, lat)

    def convolve(self, other: "Distribution", *,
                 z_max: float = 4096.0, n_points: int = 1 << 15) -> "Distribution":
        """Convolution of two laws.

        Atom*atom and atom*density terms are exact.  A density*density term
        uses closed forms where available (normal pairs) and otherwise
        tabulates the inverse transform of the product characteristic
        function; that tabulation is clipped at 0 and renormalized, so it is
        an internal construction, not a validated user input.
        """
        merged: dict[float, float] = {}
        for a in self.atoms:
            for b in other.atoms:
                loc = a.location + b.location
                merged[loc] = merged.get(loc, 0.0) + a.mass * b.mass
        parts: list[tuple[float, DensityDescriptor]] = []
        if other.ac_weight > 0:
            for a in self.atoms:
                parts.append((a.mass * other.ac_weight,
                              other.ac_density.shifted(a.location)))
        if self.ac_weight > 0:
            for b in other.atoms:
                parts.append((b.mass * self.ac_weight,
                              self.ac_density.shifted(b.location)))
        if self.ac_weight > 0 and other.ac_weight > 0:
            parts.append((self.ac_weight * other.ac_weight,
                          _convolve_densities(self.ac_density, other.ac_density,
                                              z_max, n_points)))
        atoms = tuple(Atom(loc, m) for loc, m in sorted(merged.items()))
        w = float(sum(w for w, _ in parts))
        if not parts:
            return Distribution(atoms=atoms)
        if len(parts) == 1:
            dens = parts[0][1]
        else:
            dens = MixtureDensity(tuple((pw / w, d) for pw, d in parts))
        return Distribution(atoms, w, dens)


def _convolve_densities(d1, d2, z_max: float, n_points: int):
    if isinstance(d1, NormalDensity) and isinstance(d2, NormalDensity):
        return NormalDensity(d1.mean + d2.mean, d1.variance + d2.variance)
    z0, dz, z = offset_grid(z_max, n_points)
    fz = np.asarray(d1.charfn(z)) * np.asarray(d2.charfn(z))
    x0, dx, vals = inverse_transform_padded(fz, z0, dz)
    dens = np.real(vals)
    lo1, hi1 = d1.support(1e-9)
    lo2, hi2 = d2.support(1e-9)
    grid = x0 + dx * np.arange(dens.size)
    keep = (grid >= lo1 + lo2 - 1.0) & (grid <= hi1 + hi2 + 1.0)
    first = int(np.argmax(keep))
    dens = np.clip(dens[keep], 0.0, None)
    mass = dx * dens.sum()
    if abs(mass - 1.0) > 1e-4:
        raise GridError(
            f"convolution tabulation captured mass {mass!r}; "
            "widen z_max or n_points"
        )
    dens = dens / mass
    return TabulatedDensity(float(grid[first]), dx, tuple(dens))


# -- spec parsing ----------------------------------------------------------


def _require_real(obj, key: str, ctx: str) -> float:
    if key not in obj:
        raise SpecError(f"{ctx}: missing field {key!r}")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, numbers.Real):
        raise SpecError(f"{ctx}: field {key!r} must be a real number")
    val = float(val)
    if not np.isfinite(val):
        raise SpecError(f"{ctx}: field {key!r} must be finite")
    return val


def _parse_density(obj: dict, ctx: str = "ac") -> DensityDescriptor:
    if not isinstance(obj, dict):
        raise SpecError(f"{ctx}: expected an object")
    kind = obj.get("kind")
    if kind == "normal":
        return NormalDensity(_require_real(obj, "mean", ctx),
                             _require_real(obj, "variance", ctx))
    if kind == "exponential":
        return ExponentialDensity(_require_real(obj, "rate", ctx))
    if kind == "uniform":
        left = _require_real(obj, "left", ctx)
        right = _require_real(obj, "right", ctx)
        return UniformDensity(left, right)
    if kind == "mixture":
        comps = obj.get("components")
        if not isinstance(comps, list) or not comps:
            raise SpecError(f"{ctx}: mixture needs a nonempty components list")
        parsed = []
        for i, comp in enumerate(comps):
            w = _require_real(comp, "weight", f"{ctx}.components[{i}]")
            parsed.append((w, _parse_density(comp, f"{ctx}.components[{i}]")))
        return MixtureDensity(tuple(parsed))
    if kind == "tabulated":
        if "file" in obj:
            raise SpecError(
                f"{ctx}: tabulated 'file' references must be inlined "
                "(the CLI does this) before validation"
            )
        if "x" in obj:
            xs = np.asarray(obj["x"], dtype=float)
            if xs.size < 4:
                raise SpecError(f"{ctx}: tabulated grid needs >= 4 nodes")
            steps = np.diff(xs)
            if np.any(steps <= 0):
                raise SpecError(f"{ctx}: tabulated grid must be increasing")
            dx = float(steps[0])
            if np.any(np.abs(steps - dx) > 1e-9 * max(1.0, dx)):
                raise SpecError(f"{ctx}: tabulated grid must be uniform")
            x0 = float(xs[0])
        else:
            x0 = _require_real(obj, "x0", ctx)
            dx = _require_real(obj, "dx", ctx)
        values = obj.get("values")
        if values is None:
            raise SpecError(f"{ctx}: tabulated density needs 'values'")
        vals = tuple(float(v) for v in values)
        if "x" in obj and len(vals) != len(obj["x"]):
            raise SpecError(f"{ctx}: 'x' and 'values' lengths differ")
        return TabulatedDensity(x0, dx, vals)
    if kind == "gaussian_variance_mix":
        atoms = tuple((float(t), float(w))
                      for t, w in obj.get("variance_atoms", []))
        segments = tuple((float(a), float(b), float(w))
                         for a, b, w in obj.get("variance_segments", []))
        if not atoms and not segments:
            raise SpecError(f"{ctx}: variance mix needs atoms or segments")
        return GaussianVarianceMixDensity(atoms, segments)
    raise SpecError(f"{ctx}: unknown density kind {kind!r}")


def validate_spec(raw: dict) -> Distribution:
    """Build a Distribution from the JSON wire format, rejecting bad specs.

    Masses are checked, never renormalized; lattice declarations are
    verified against every atom location.
    """
    if not isinstance(raw, dict):
        raise SpecError("distribution spec must be a JSON object")
    known = {"atoms", "lattice", "ac"}
    extra = set(raw) - known
    if extra:
        raise SpecError(f"unknown top-level fields: {sorted(extra)}")
    atoms = []
    for i, entry in enumerate(raw.get("atoms", [])):
        x = _require_real(entry, "x", f"atoms[{i}]")
        p = _require_real(entry, "p", f"atoms[{i}]")
        atoms.append(Atom(x, p))
    lattice = None
    if "lattice" in raw and raw["lattice"] is not None:
        lat = raw["lattice"]
        lattice = (_require_real(lat, "r", "lattice"),
                   _require_real(lat, "h", "lattice"))
    ac_weight = 0.0
    density = None
    if "ac" in raw and raw["ac"] is not None:
        ac = raw["ac"]
        ac_weight = _require_real(ac, "weight", "ac")
        if not (0 <= ac_weight <= 1):
            raise SpecError(f"ac weight {ac_weight!r} outside [0, 1]")
        if ac_weight > 0:
            density = _parse_density(ac)
    if not atoms and ac_weight == 0:
        raise SpecError("spec describes no mass at all")
    return Distribution(tuple(atoms), ac_weight, density, lattice)


def cdf_grid(dist: Distribution, x_grid) -> np.ndarray:
    """CDF samples over a window that must cover the law (tail mass < 1e-6)."""
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise GridError("cdf_grid needs a 1-d grid with at least 2 nodes")
    if np.any(np.diff(x) <= 0):
        raise GridError("cdf_grid needs a strictly increasing grid")
    outside = 0.0
    for a in dist.atoms:
        if a.location < x[0] or a.location > x[-1]:
            outside += a.mass
    if dist.ac_weight > 0:
        dens = dist.ac_density
        outside += dist.ac_weight * float(
            dens.cdf(np.array([x[0]]))[0] + 1.0 - dens.cdf(np.array([x[-1]]))[0]
        )
    if outside >= 1e-6:
        raise GridError(
            f"grid [{x[0]!r}, {x[-1]!r}] misses tail mass {outside:.3g} "
            ">= 1e-6; widen the window"
        )
    return dist.cdf(x)
