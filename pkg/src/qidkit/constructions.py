"""Law constructions: interpolation paths, mixtures, scalings, sequences.

These build Distributions (and rescale triplets) whose analysis exercises
every certification route: convex spectral interpolation between two laws,
normal mixtures factored through their minimal-variance component,
Gaussian variance mixtures split around the bottom of the mixing support,
and convolution sequences that converge weakly to a target while every
member keeps a real zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .charfn import tail_cutoff
from .densities import (
    GaussianVarianceMixDensity,
    MixtureDensity,
    NormalDensity,
)
from .distribution import Atom, Distribution
from .errors import ScanError, SpecError, UnsupportedFormError
from .krein import (
    KreinReport,
    QuasiLevyTriplet,
    SignedTabulation,
    assemble_triplet,
    reconstruct_on_grid,
)
from .zeros import ScanConfig, ZeroCertificate, find_zeros

__all__ = [
    "MixingDistribution",
    "interpolate",
    "variance_mixture",
    "variance_cofactor",
    "variance_report",
    "normal_mixture",
    "normal_mixture_factor",
    "normal_mixture_report",
    "nonqid_sequence",
    "sequence_zero_certificate",
    "scale_triplet",
]

_MIN_VAR_REL = 1e-12


def interpolate(mu1: Distribution, mu2: Distribution, t: float,
                **convolve_kwargs) -> Distribution:
    """Law with transform mu1_hat(t z) mu2_hat((1-t) z), t in [0, 1].

    The path starts at mu2 (t = 0) and ends at mu1 (t = 1); intermediate
    laws are the convolution of the two scaled factors.
    """
    if not 0.0 <= t <= 1.0:
        raise SpecError(f"interpolation parameter {t!r} outside [0, 1]")
    if t == 0.0:
        return mu2
    if t == 1.0:
        return mu1
    return mu1.scaled(t).convolve(mu2.scaled(1.0 - t), **convolve_kwargs)


@dataclass(frozen=True)
class MixingDistribution:
    """Mixing law on the variance axis: atoms plus uniform segments.

    The bottom of the support must carry an atom (t1, w1) with w1 > 0;
    segments live at or above t1.  Masses sum to 1.
    """

    atoms: tuple  # of (t, w), t > 0
    segments: tuple = ()  # of (lo, hi, w)

    def __post_init__(self):
        if not self.atoms:
            raise SpecError("mixing law needs at least one atom")
        total = 0.0
        for t, w in self.atoms:
            if not (t > 0 and w > 0):
                raise SpecError("mixing atoms need t > 0 and weight > 0")
            total += w
        t1 = min(t for t, _ in self.atoms)
        for lo, hi, w in self.segments:
            if not (lo < hi and w > 0):
                raise SpecError("mixing segments need lo < hi, weight > 0")
            if lo < t1 - 1e-12:
                raise SpecError(
                    f"segment [{lo!r}, {hi!r}] reaches below the bottom "
                    f"atom t1 = {t1!r}"
                )
            total += w
        if abs(total - 1.0) > 1e-12:
            raise SpecError(f"mixing masses sum to {total!r}, not 1")

    @property
    def t1(self) -> float:
        return min(t for t, _ in self.atoms)

    def bottom_mass(self) -> float:
        t1 = self.t1
        return sum(w for t, w in self.atoms if t == t1)


def variance_mixture(mixing: MixingDistribution) -> Distribution:
    """The law integral N(0, t) mixing(dt); purely AC, always QID."""
    return Distribution(
        ac_weight=1.0,
        ac_density=GaussianVarianceMixDensity(mixing.atoms, mixing.segments),
    )


def variance_cofactor(mixing: MixingDistribution) -> tuple[float, Distribution]:
    """(t1, cofactor) with law = N(0, t1) * cofactor.

    The cofactor mixes N(0, t - t1) over the shifted mixing law, so the
    bottom atom becomes a point mass at 0 and everything else stays AC.
    Its transform is a positive combination of Gaussians plus a constant,
    hence strictly positive: the cofactor (and so the whole law) is QID.
    """
    t1 = mixing.t1
    p = mixing.bottom_mass()
    atoms = tuple((t - t1, w) for t, w in mixing.atoms if t > t1)
    segments = tuple((lo - t1, hi - t1, w) for lo, hi, w in mixing.segments)
    w_ac = 1.0 - p
    if w_ac <= 0:
        return t1, Distribution(atoms=(Atom(0.0, 1.0),))
    scale = 1.0 / w_ac
    dens = GaussianVarianceMixDensity(
        tuple((t, w * scale) for t, w in atoms),
        tuple((lo, hi, w * scale) for lo, hi, w in segments),
    )
    return t1, Distribution(atoms=(Atom(0.0, p),), ac_weight=w_ac,
                            ac_density=dens)


def _recompose_report(base: KreinReport, law: Distribution, *,
                      add_variance: float = 0.0,
                      add_drift: float = 0.0) -> KreinReport:
    """Shift a cofactor report by a Gaussian factor and recheck against law."""
    t = base.triplet
    triplet = QuasiLevyTriplet(
        gaussian_variance=t.gaussian_variance + add_variance,
        drift=t.drift + add_drift,
        ac_density=t.ac_density,
        index_m=t.index_m,
        lattice_atoms=t.lattice_atoms,
        location_shift=t.location_shift,
    )
    n_chk = 4096
    z_hi = 64.0
    z_grid = np.linspace(-z_hi, z_hi, n_chk)
    dz = z_grid[1] - z_grid[0]
    model = reconstruct_on_grid(triplet, z_grid[0], dz, n_chk)
    target = law.charfn_uniform(z_grid[0], dz, n_chk)
    recon_error = float(np.abs(model - target).max())
    return KreinReport(
        triplet=triplet,
        im_residual=base.im_residual,
        recon_error=recon_error,
        q_est=base.q_est,
        truncated_mass=base.truncated_mass,
        certificate=base.certificate,
    )


def variance_report(mixing: MixingDistribution, *,
                    n_points: int = 1 << 16) -> KreinReport:
    """Full triplet of a Gaussian variance mixture.

    Extraction runs on the cofactor (whose transform stays strictly
    positive) and the Gaussian factor contributes t1 to the variance; the
    final reconstruction is checked against the mixture itself.
    """
    t1, cof = variance_cofactor(mixing)
    base = assemble_triplet(cof, n_points=n_points)
    law = variance_mixture(mixing)
    return _recompose_report(base, law, add_variance=t1)


def normal_mixture(weights: Sequence[float], means: Sequence[float],
                   variances: Sequence[float]) -> Distribution:
    """Finite normal mixture sum_i w_i N(b_i, a_i), purely AC."""
    if not (len(weights) == len(means) == len(variances)) or not weights:
        raise SpecError("normal mixture needs matching nonempty lists")
    if len(weights) == 1:
        return Distribution(ac_weight=1.0,
                            ac_density=NormalDensity(means[0], variances[0]))
    comps = tuple((float(w), NormalDensity(float(b), float(a)))
                  for w, b, a in zip(weights, means, variances))
    return Distribution(ac_weight=1.0, ac_density=MixtureDensity(comps))


def normal_mixture_factor(weights: Sequence[float], means: Sequence[float],
                          variances: Sequence[float]
                          ) -> tuple[float, float, Distribution]:
    """(a1, b1, cofactor) with mixture = N(b1, a1) * cofactor.

    a1 is the smallest component variance; components attaining it turn
    into atoms of the cofactor (at b_i - b1), the rest stay normal with
    variance a_i - a1.  Zeros of the mixture transform are exactly the
    zeros of the cofactor transform, so certification transfers.
    """
    if not (len(weights) == len(means) == len(variances)) or not weights:
        raise SpecError("normal mixture needs matching nonempty lists")
    ws = np.asarray(weights, dtype=float)
    bs = np.asarray(means, dtype=float)
    vs = np.asarray(variances, dtype=float)
    if np.any(ws <= 0):
        raise SpecError("mixture weights must be positive")
    if abs(ws.sum() - 1.0) > 1e-9:
        raise SpecError("mixture weights must sum to 1")
    if np.any(vs <= 0):
        raise SpecError("component variances must be positive")
    a1 = float(vs.min())
    minimal = vs <= a1 * (1.0 + _MIN_VAR_REL)
    b1 = float(bs[minimal][0])

    atom_locs = bs[minimal] - b1
    atom_ws = ws[minimal]
    order = np.argsort(atom_locs)
    atoms = tuple(Atom(float(x), float(w))
                  for x, w in zip(atom_locs[order], atom_ws[order]))

    rest = ~minimal
    if not rest.any():
        return a1, b1, Distribution(atoms=atoms)
    w_ac = float(ws[rest].sum())
    comps = tuple((float(w / w_ac), NormalDensity(float(b - b1),
                                                  float(a - a1)))
                  for w, b, a in zip(ws[rest], bs[rest], vs[rest]))
    dens = comps[0][1] if len(comps) == 1 else MixtureDensity(comps)
    return a1, b1, Distribution(atoms=atoms, ac_weight=w_ac, ac_density=dens)


def normal_mixture_report(weights: Sequence[float], means: Sequence[float],
                          variances: Sequence[float], *,
                          n_points: int = 1 << 16) -> KreinReport:
    """Triplet of a normal mixture via its minimal-variance factorization.

    Only mixtures whose cofactor has a single atom (one strictly minimal
    variance) are handled here; several minimal components put multiple
    atoms in the cofactor, which needs the lattice route.
    """
    a1, b1, cof = normal_mixture_factor(weights, means, variances)
    if len(cof.atoms) != 1:
        raise UnsupportedFormError(
            "cofactor has several atoms; analyze the mixture through the "
            "lattice route instead"
        )
    base = assemble_triplet(cof, n_points=n_points)
    law = normal_mixture(weights, means, variances)
    return _recompose_report(base, law, add_variance=a1, add_drift=b1)


def _factor_nonzero_at(mu: Distribution, z: float) -> bool:
    """Can mu_hat(z) = 0 be ruled out at this specific point?"""
    from .zeros import _analytic_positive

    if _analytic_positive(mu):
        return True
    try:
        _, z_tail = tail_cutoff(mu)
        if z > z_tail:
            return True
    except ScanError:
        pass
    return bool(abs(complex(mu.charfn(np.array([z]))[0])) > 1e-8)


def nonqid_sequence(mu: Distribution, nu: Distribution, n: int, *,
                    nu_certificate: Optional[ZeroCertificate] = None,
                    scan_config: Optional[ScanConfig] = None,
                    z_max: float = 256.0,
                    n_points: int = 1 << 13) -> Distribution:
    """Member n of the sequence mu * (nu scaled by 1/n).

    Each member inherits the real zero of nu_hat at n z1, so none is QID,
    yet the sequence converges weakly to mu (which may well be QID): the
    non-QID laws are dense enough to reach QID limits.
    """
    if n < 1:
        raise SpecError("sequence index must be >= 1")
    if nu_certificate is None:
        nu_certificate = find_zeros(nu, scan_config or ScanConfig())
    if nu_certificate.verdict != "zero_found":
        raise SpecError("nu has no detected zero; the sequence would not "
                        "stay outside the QID laws")
    return mu.convolve(nu.scaled(1.0 / n), z_max=z_max, n_points=n_points)


def sequence_zero_certificate(mu: Distribution, nu: Distribution, n: int,
                              nu_certificate: ZeroCertificate
                              ) -> ZeroCertificate:
    """Zero certificate for member n, built from the factorization.

    The transform of member n is mu_hat(z) nu_hat(z/n), which vanishes at
    n z1 once mu_hat does not; scanning the tabulated convolution instead
    would drown the far-out zero in quadrature noise.
    """
    if nu_certificate.verdict != "zero_found":
        raise SpecError("need a zero_found certificate for nu")
    z1 = nu_certificate.refined_location
    loc = n * z1
    if not _factor_nonzero_at(mu, loc):
        raise SpecError(
            f"cannot rule out a zero of the limit law at {loc!r}; "
            "the factorized certificate does not apply"
        )
    mod_nu = nu_certificate.refined_modulus
    mod_mu = abs(complex(mu.charfn(np.array([loc]))[0]))
    return ZeroCertificate(
        verdict="zero_found",
        min_modulus_observed=mod_mu * mod_nu,
        z_lo=n * nu_certificate.z_lo,
        z_hi=n * nu_certificate.z_hi,
        refined_location=loc,
        refined_modulus=mod_mu * mod_nu,
        z_max_used=loc,
    )


def scale_triplet(triplet: QuasiLevyTriplet, t: float) -> QuasiLevyTriplet:
    """Triplet of the law scaled by t (image measure under x -> t x).

    Variance picks up t^2, drift and atom locations scale by t, and the
    quasi-Levy density g becomes g(x/t)/|t| on the rescaled grid.  The
    index term e^{-|x|}/|x| is not scale invariant: for t != 1 its image
    sign(t) m sgn(x) e^{-|x|/|t|}/|x| is evaluated in closed form at the
    grid nodes and folded into the tabulated density, and the reported
    index drops to 0 (the tabulation then carries the 1/|x| shape).
    """
    if t == 0:
        raise SpecError("scale factor must be nonzero")
    if t == 1.0:
        return triplet
    a = triplet.gaussian_variance * t * t
    drift = triplet.drift * t
    atoms = tuple((loc * t, b) for loc, b in triplet.lattice_atoms)
    shift = triplet.location_shift * t
    m = triplet.index_m
    dens = triplet.ac_density

    if dens is None:
        if m != 0:
            raise UnsupportedFormError(
                "triplet has an index term but no tabulation to fold its "
                "scaled image into"
            )
        return QuasiLevyTriplet(a, drift, None, 0, atoms, shift)

    if t > 0:
        x0 = dens.x0 * t
        dx = dens.dx * t
        vals = dens.values / t
    else:
        grid = dens.x_grid() * t
        x0 = float(grid[-1])
        dx = dens.dx * abs(t)
        vals = dens.values[::-1] / abs(t)
    if m != 0:
        x = x0 + dx * np.arange(vals.size)
        if np.any(x == 0.0):
            raise UnsupportedFormError(
                "tabulation grid has a node at x = 0; the scaled index "
                "image diverges there"
            )
        vals = vals + np.sign(t) * m * np.sign(x) \
            * np.exp(-np.abs(x) / abs(t)) / np.abs(x)
    return QuasiLevyTriplet(a, drift, SignedTabulation(x0, dx, vals),
                            0, atoms, shift)
