"""Discrete-lattice analysis: Wiener inversion and lattice triplets.

A purely atomic law on r + h Z has transform e^{irz} phi(h z) with
phi(w) = sum_k p_k e^{ikw} a trigonometric polynomial.  Everything here
works on that periodic symbol:

* ``wiener_invert`` builds the inverse measure (the coefficient sequence of
  1/phi), which exists in l1 exactly when phi has no zero on the period.
* ``lattice_triplet`` takes the continuous log of phi around one period.
  The winding count n becomes part of the drift, the remaining periodic
  log is a Fourier series whose coefficients b_k (k != 0) are the signed
  masses of the quasi-Levy measure on the lattice.
* ``mixed_triplet`` splits a lattice + AC law as mu = mu_d * (rho * mu_ac
  convolved back), where rho is the inverse measure of the discrete part.
  The companion curve F = w_d (1 + w_ac rho_hat f_hat) has a dominant
  constant term, so the single-atom extraction core applies verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distribution import Distribution
from .errors import ExtractionError, GridError, ScanError, SpecError
from .krein import (
    _IM_RESIDUAL_HARD,
    KreinProblem,
    KreinReport,
    QuasiLevyTriplet,
    QidVerdict,
    SignedTabulation,
    _trivial_extraction,
    extract_core,
    im_residual,
    reconstruct_on_grid,
)
from .zeros import ScanConfig, ZeroCertificate, find_zeros

__all__ = [
    "LatticeSeries",
    "LatticeLogResult",
    "MixedDecomposition",
    "wiener_invert",
    "lattice_triplet",
    "mixed_decompose",
    "mixed_triplet",
    "mixed_qid_verdict",
]

_INVERT_TRUNC_TOL = 1e-14
_INVERT_RESIDUAL_TOL = 1e-8
_LOG_RECON_TOL = 1e-8
_LOG_IM_TOL = 1e-10
_CHUNK = 4_000_000


@dataclass(frozen=True, eq=False)
class LatticeSeries:
    """Finitely supported measure sum_k coef[k] delta_{offset + k step}.

    ``coefficients`` holds the run from index ``k_min`` upward; interior
    gaps are stored as zeros.
    """

    offset: float
    step: float
    k_min: int
    coefficients: np.ndarray

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=complex)
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)
        if not self.step > 0:
            raise SpecError("lattice step must be positive")
        if coef.ndim != 1 or coef.size == 0:
            raise SpecError("lattice series needs a 1-d coefficient array")
        if coef[0] == 0 and coef.size > 1:
            raise SpecError("coefficient run must start at a nonzero entry")

    @staticmethod
    def from_distribution(dist: Distribution) -> "LatticeSeries":
        if dist.lattice is None:
            raise SpecError("distribution does not declare a lattice")
        if not dist.atoms:
            raise SpecError("lattice series needs at least one atom")
        r, h = dist.lattice
        locs = dist.atom_locations()
        ks = np.round((locs - r) / h).astype(int)
        k_min, k_max = int(ks.min()), int(ks.max())
        coef = np.zeros(k_max - k_min + 1, dtype=complex)
        coef[ks - k_min] = dist.atom_masses()
        return LatticeSeries(r, h, k_min, coef)

    @property
    def k_indices(self) -> np.ndarray:
        return self.k_min + np.arange(self.coefficients.size)

    def locations(self) -> np.ndarray:
        return self.offset + self.step * self.k_indices

    def l1_norm(self) -> float:
        return float(np.abs(self.coefficients).sum())

    def total(self) -> complex:
        return complex(self.coefficients.sum())

    def symbol(self, w) -> np.ndarray:
        """sum_k coef_k e^{ikw} on the period variable w = step * z."""
        w = np.atleast_1d(np.asarray(w, dtype=float))
        out = np.zeros(w.shape, dtype=complex)
        ks = self.k_indices
        step_rows = max(1, _CHUNK // max(1, w.size))
        for start in range(0, ks.size, step_rows):
            sl = slice(start, start + step_rows)
            out += self.coefficients[sl] @ np.exp(
                1j * np.outer(ks[sl], w))
        return out

    def charfn(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.exp(1j * self.offset * z) * self.symbol(self.step * z)

    def normalized(self) -> "LatticeSeries":
        tot = self.total()
        if abs(tot) < 1e-300:
            raise SpecError("cannot normalize a series with zero total mass")
        return LatticeSeries(self.offset, self.step, self.k_min,
                             self.coefficients / tot)

    def rows(self):
        """(k, re, im) triples for every stored coefficient."""
        for k, c in zip(self.k_indices, self.coefficients):
            yield int(k), float(c.real), float(c.imag)


def _min_symbol_modulus(series: LatticeSeries, n_grid: int) -> float:
    w = 2 * np.pi * np.arange(n_grid) / n_grid
    return float(np.abs(series.symbol(w)).min())


def wiener_invert(series: LatticeSeries, *, n_fft: int = 1 << 12,
                  truncation_tol: float = _INVERT_TRUNC_TOL) -> LatticeSeries:
    """Coefficients of 1/phi, truncated and residual-checked.

    The inverse of sum coef_k delta_{offset + k step} lives on
    -offset + step Z.  Raises ScanError when the symbol (numerically)
    vanishes on the period and GridError when the truncated inverse does
    not convolve back to delta_0 within 1e-8 in l1 after two grid
    doublings.
    """
    l1 = series.l1_norm()
    for attempt in range(3):
        n = n_fft << attempt
        w = 2 * np.pi * np.arange(n) / n
        sym = series.symbol(w)
        if float(np.abs(sym).min()) <= 1e-12 * l1:
            raise ScanError(
                "lattice symbol vanishes on the period; no summable inverse"
            )
        # c_k = (1/n) sum_j (1/phi)(w_j) e^{-ikw_j}, aliased mod n
        c_alias = np.fft.fft(1.0 / sym) / n
        ks = np.where(np.arange(n) < n // 2, np.arange(n),
                      np.arange(n) - n)
        c_l1 = float(np.abs(c_alias).sum())
        keep = np.abs(c_alias) >= truncation_tol * c_l1
        if not keep.any():
            raise GridError("inverse series truncated to nothing")
        kept_k = ks[keep]
        k_lo, k_hi = int(kept_k.min()), int(kept_k.max())
        coef = np.zeros(k_hi - k_lo + 1, dtype=complex)
        coef[kept_k - k_lo] = c_alias[keep]
        if abs(coef[0]) == 0:
            lead = int(np.argmax(coef != 0))
            k_lo += lead
            coef = coef[lead:]

        # residual ||p * c - delta_0||_l1 measures aliasing + truncation
        conv = np.convolve(series.coefficients, coef)
        conv_k0 = series.k_min + k_lo
        delta_pos = -conv_k0
        residual = np.abs(conv).sum()
        if 0 <= delta_pos < conv.size:
            residual += abs(conv[delta_pos] - 1.0) - abs(conv[delta_pos])
        if residual < _INVERT_RESIDUAL_TOL:
            inv_k_min = k_lo
            return LatticeSeries(-series.offset, series.step,
                                 inv_k_min, coef)
    raise GridError(
        f"inverse series residual {residual:.3g} still above 1e-8 after "
        "doubling the period grid twice; symbol is too close to zero"
    )


@dataclass(frozen=True, eq=False)
class LatticeLogResult:
    """Period winding and signed lattice masses of log phi."""

    winding: int
    step: float
    offset: float
    b_indices: np.ndarray
    b_values: np.ndarray
    im_max: float
    recon_error: float

    def atoms(self) -> tuple:
        """((location, mass)) pairs on the lattice, k = 0 excluded."""
        return tuple((float(self.step * k), float(b))
                     for k, b in zip(self.b_indices, self.b_values))


def lattice_triplet(series: LatticeSeries, *, n_grid: int = 1 << 12,
                    truncation_tol: float = _INVERT_TRUNC_TOL) -> LatticeLogResult:
    """Continuous log of a probability symbol over one period.

    phi(w) = exp(i n w + sum_{k != 0} b_k (e^{ikw} - 1)) with n the
    winding count of phi around 0.  Requires sum coef = 1; coefficients
    must be real and nonnegative up to roundoff.
    """
    if abs(series.total() - 1.0) > 1e-9:
        raise SpecError("lattice triplet needs a probability series "
                        f"(total mass {series.total():.6g})")
    if float(np.abs(series.coefficients.imag).max()) > 1e-12:
        raise SpecError("lattice triplet needs real coefficients")

    # refine the period grid until adjacent phase steps are comfortably
    # inside (-pi, pi); a deep symbol minimum can spin the phase quickly
    for _ in range(6):
        w = 2 * np.pi * np.arange(n_grid) / n_grid
        sym = series.symbol(w)
        if float(np.abs(sym).min()) <= 1e-12:
            raise ScanError("lattice symbol vanishes on the period; "
                            "the law is not quasi-infinitely divisible")
        ratios = np.concatenate((sym[1:], sym[:1])) / sym
        inc_all = np.angle(ratios)
        if float(np.abs(inc_all).max()) < np.pi / 2:
            break
        n_grid *= 2
    else:
        raise GridError("period grid would not settle below pi/2 steps")
    inc = inc_all[:-1]
    theta = np.concatenate(([np.angle(sym[0])],
                            np.angle(sym[0]) + np.cumsum(inc)))
    raw_n = (theta[-1] + inc_all[-1] - theta[0]) / (2 * np.pi)
    n = int(round(raw_n))
    if abs(raw_n - n) > 1e-6:
        raise GridError(f"period winding {raw_n!r} did not settle")

    lam = np.log(np.abs(sym)) + 1j * (theta - n * w)
    b_alias = np.fft.fft(lam) / n_grid
    ks = np.where(np.arange(n_grid) < n_grid // 2, np.arange(n_grid),
                  np.arange(n_grid) - n_grid)

    im_max = float(np.abs(b_alias.imag).max())
    if im_max > _LOG_IM_TOL:
        raise ExtractionError(
            f"lattice log coefficients have Im up to {im_max:.3g} > 1e-10"
        )
    b_real = b_alias.real

    # reconstruction on offset nodes is an independent consistency check
    b_l1 = float(np.abs(b_real).sum())
    keep = (ks != 0) & (np.abs(b_real) >= truncation_tol * max(b_l1, 1.0))
    kept_k = ks[keep]
    kept_b = b_real[keep]
    order = np.argsort(kept_k)
    kept_k, kept_b = kept_k[order], kept_b[order]

    w_probe = 2 * np.pi * (np.arange(512) + 0.5) / 512
    expo = 1j * n * w_probe
    expo = expo + (kept_b @ (np.exp(1j * np.outer(kept_k, w_probe)) - 1.0))
    recon = np.exp(expo)
    target = series.symbol(w_probe)
    recon_error = float(np.abs(recon - target).max())
    if recon_error > _LOG_RECON_TOL:
        raise ExtractionError(
            f"lattice log reconstruction off by {recon_error:.3g} > 1e-8"
        )

    return LatticeLogResult(n, series.step, series.offset,
                            kept_k, kept_b, im_max, recon_error)


@dataclass(frozen=True, eq=False)
class MixedDecomposition:
    """mu = discrete * (rho conv mu_ac) with rho the inverse measure."""

    discrete: LatticeSeries
    inverse: LatticeSeries
    ac_weight: float
    identity_error: float
    problem: Optional[KreinProblem]


def mixed_decompose(dist: Distribution, *, n_fft: int = 1 << 12,
                    identity_points: int = 512) -> MixedDecomposition:
    """Split a lattice + AC law around its purely atomic factor.

    Checks the factorization mu_hat = s_hat (1 + u) on a probe grid to
    1e-8, where s_hat is the transform of the atoms and
    u = w_ac rho_hat f_hat.
    """
    series = LatticeSeries.from_distribution(dist)
    w_d = float(series.total().real)
    inverse = wiener_invert(series, n_fft=n_fft)
    w_ac = dist.ac_weight

    if w_ac == 0:
        return MixedDecomposition(series, inverse, 0.0, 0.0, None)

    dens = dist.ac_density
    inv_locs = inverse.locations()
    inv_coef = inverse.coefficients

    def u_points(z):
        return w_ac * inverse.charfn(z) * dens.charfn(np.asarray(z, float))

    def u_uniform(z0, dz, n):
        z = z0 + dz * np.arange(n)
        if hasattr(dens, "charfn_grid"):
            fh = dens.charfn_grid(z0, dz, n)
        else:
            fh = dens.charfn(z)
        return w_ac * inverse.charfn(z) * fh

    def curve_points(z):
        z = np.asarray(z, dtype=float)
        return w_d * dist.charfn(z) / series.charfn(z)

    def curve_uniform(z0, dz, n):
        z = z0 + dz * np.arange(n)
        return w_d * dist.charfn_uniform(z0, dz, n) / series.charfn(z)

    def addback(x):
        out = np.zeros(np.asarray(x, float).shape)
        for loc, c in zip(inv_locs, inv_coef):
            out += c.real * dens.pdf(x - loc)
        return w_ac * out

    lo, hi = dens.support(1e-9)
    support = (lo + float(inv_locs.min()), hi + float(inv_locs.max()))

    # tail scale: |u| <= w_ac ||c||_l1 TV_f / |z|
    try:
        from .charfn import total_variation
        z_tail = w_ac * inverse.l1_norm() * total_variation(dens)
    except Exception:
        z_tail = 1.0
    z_star = max(512.0, min(8.0 * max(z_tail, 1.0), 1024.0))

    probe = np.linspace(-64.0, 64.0, identity_points)
    lhs = dist.charfn(probe)
    rhs = series.charfn(probe) * (1.0 + u_points(probe))
    identity_error = float(np.abs(lhs - rhs).max())
    if identity_error > 1e-8:
        raise ExtractionError(
            f"lattice/AC factorization off by {identity_error:.3g} > 1e-8"
        )

    problem = KreinProblem(
        p=w_d,
        z_star=z_star,
        curve_uniform=curve_uniform,
        curve_points=curve_points,
        u_uniform=u_uniform,
        u_points=u_points,
        addback=addback,
        support=support,
    )
    return MixedDecomposition(series, inverse, w_ac, identity_error, problem)


def mixed_triplet(dist: Distribution, *, n_points: int = 1 << 16,
                  certificate: Optional[ZeroCertificate] = None,
                  scan_config: Optional[ScanConfig] = None) -> KreinReport:
    """Quasi-Levy triplet of a declared-lattice law, AC part optional.

    Drift is r + n h from the period winding; the lattice masses b_k sit
    at k h (k != 0); Gaussian variance is 0; the continuous density g and
    the index m come from the companion curve.
    """
    if certificate is None:
        certificate = find_zeros(dist, scan_config or ScanConfig())
    if certificate.verdict != "no_zeros":
        raise ExtractionError(
            "characteristic function has a real zero; no triplet exists"
        )
    decomp = mixed_decompose(dist)
    log_res = lattice_triplet(decomp.discrete.normalized())

    if decomp.problem is None:
        extraction = _trivial_extraction(512.0, certificate)
    else:
        extraction = extract_core(decomp.problem, n_points=n_points,
                                  certificate=certificate)
        w_d = float(decomp.discrete.total().real)
        if abs(extraction.q_est - np.log(w_d)) > 1e-6:
            raise ExtractionError(
                "companion tail constant disagrees with the atomic mass: "
                f"{extraction.q_est!r} vs ln {w_d:.6g}"
            )

    im_res = im_residual(extraction.g_values)
    if im_res > _IM_RESIDUAL_HARD:
        raise ExtractionError(
            f"imaginary residual {im_res:.3g} exceeds 1e-4"
        )
    g_tab = None
    if extraction.g_values.size and np.abs(extraction.g_values).max() > 0:
        g_tab = SignedTabulation(extraction.x0, extraction.dx,
                                 extraction.g_values.real)

    drift = log_res.offset + log_res.winding * log_res.step
    triplet = QuasiLevyTriplet(
        gaussian_variance=0.0,
        drift=drift,
        ac_density=g_tab,
        index_m=extraction.index_m,
        lattice_atoms=log_res.atoms(),
    )

    z_chk = min(64.0, extraction.z_star)
    n_chk = 4096
    z_grid = np.linspace(-z_chk, z_chk, n_chk)
    model = reconstruct_on_grid(triplet, z_grid[0],
                                z_grid[1] - z_grid[0], n_chk)
    target = dist.charfn_uniform(z_grid[0], z_grid[1] - z_grid[0], n_chk)
    recon_error = float(np.abs(model - target).max())

    return KreinReport(
        triplet=triplet,
        im_residual=im_res,
        recon_error=recon_error,
        q_est=extraction.q_est,
        truncated_mass=extraction.truncated_mass,
        certificate=certificate,
    )


def mixed_qid_verdict(dist: Distribution, *, n_points: int = 1 << 16,
                      scan_config: Optional[ScanConfig] = None) -> QidVerdict:
    """QID or NotQID for a declared-lattice law, with report when QID."""
    certificate = find_zeros(dist, scan_config or ScanConfig())
    if certificate.verdict == "zero_found":
        return QidVerdict("NotQID", certificate, None)
    report = mixed_triplet(dist, n_points=n_points, certificate=certificate)
    return QidVerdict("QID", certificate, report)
