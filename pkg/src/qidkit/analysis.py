"""Single-entry analysis: route a law to its certification pipeline.

Routing by form:

* one atom (+ optional AC part): log extraction around the atom;
* several atoms on a declared or detected lattice: Wiener inversion of the
  discrete part, then extraction on the companion curve;
* several off-lattice atoms: zero certification only (the dominant-atom
  floor still decides QID), the triplet stays unsupported;
* pure normal / exponential / Gaussian variance mixture: closed-form or
  cofactor-based triplets, transforms known positive;
* normal mixtures: factored through the minimal-variance component;
* anything else purely AC: best-effort zero scan, otherwise indeterminate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constructions import (
    MixingDistribution,
    _recompose_report,
    normal_mixture_factor,
    variance_report,
)
from .densities import (
    ExponentialDensity,
    GaussianVarianceMixDensity,
    MixtureDensity,
    NormalDensity,
    UniformDensity,
)
from .distribution import Distribution
from .errors import IndeterminateZeroError, ScanError, SpecError
from .krein import (
    KreinReport,
    QuasiLevyTriplet,
    qid_verdict,
    reconstruct_on_grid,
)
from .lattice import mixed_qid_verdict
from .zeros import ScanConfig, ZeroCertificate, find_zeros

__all__ = ["AnalysisReport", "analyze", "detect_lattice"]


@dataclass(frozen=True)
class AnalysisReport:
    """Verdict plus (when supported) the extracted triplet evidence."""

    verdict: str  # "QID" | "NotQID" | "indeterminate"
    form: str
    certificate: Optional[ZeroCertificate] = None
    report: Optional[KreinReport] = None
    note: str = ""

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "form": self.form,
            "note": self.note,
            "certificate": self.certificate.to_dict()
            if self.certificate is not None else None,
        }
        if self.report is not None:
            rep = self.report
            out["triplet"] = rep.triplet.to_header(rep.im_residual,
                                                   rep.recon_error)
            out["q_est"] = {"re": float(np.real(rep.q_est)),
                            "im": float(np.imag(rep.q_est))}
            out["truncated_mass"] = rep.truncated_mass
            out["lattice_atom_count"] = len(rep.triplet.lattice_atoms)
        else:
            out["triplet"] = None
        return out


def _float_gcd(a: float, b: float, tol: float) -> float:
    a, b = abs(a), abs(b)
    while b > tol:
        a, b = b, a % b
    return a


def detect_lattice(locations, tol: float = 1e-9,
                   max_sites: int = 4096) -> Optional[tuple]:
    """(offset, step) when every location sits on a common lattice.

    Incommensurable spacings drive the float gcd towards zero; the
    ``max_sites`` cap rejects the microscopic pseudo-steps that survive
    the tolerance by accident.
    """
    locs = np.sort(np.asarray(locations, dtype=float))
    if locs.size < 2:
        return None
    diffs = locs[1:] - locs[0]
    scale = max(1.0, float(np.abs(locs).max()))
    g = diffs[0]
    for d in diffs[1:]:
        g = _float_gcd(g, d, tol * scale)
    if g <= tol * scale or (locs[-1] - locs[0]) / g > max_sites:
        return None
    ks = np.round(diffs / g)
    # least-squares refinement through the origin sharpens the float gcd
    h = float((ks @ diffs) / (ks @ ks))
    if np.any(np.abs(diffs - ks * h) > 1e-9 * scale):
        return None
    return float(locs[0]), h


def _from_qid_verdict(v, form: str) -> AnalysisReport:
    return AnalysisReport(v.status, form, v.certificate, v.report)


def _pure_normal_report(dist: Distribution,
                        config: ScanConfig) -> AnalysisReport:
    dens = dist.ac_density
    certificate = find_zeros(dist, config)
    triplet = QuasiLevyTriplet(
        gaussian_variance=dens.variance, drift=dens.mean,
        ac_density=None, index_m=0,
    )
    n_chk = 2048
    z = np.linspace(-32.0, 32.0, n_chk)
    dz = z[1] - z[0]
    recon = reconstruct_on_grid(triplet, z[0], dz, n_chk)
    recon_error = float(np.abs(recon - dist.charfn(z)).max())
    report = KreinReport(triplet, 0.0, recon_error, 0.0 + 0.0j, 0.0,
                         certificate)
    return AnalysisReport("QID", "normal", certificate, report)


def _normal_mixture_route(dist: Distribution, n_points: int,
                          config: ScanConfig) -> AnalysisReport:
    comps = dist.ac_density.components
    weights = [w for w, _ in comps]
    means = [c.mean for _, c in comps]
    variances = [c.variance for _, c in comps]
    a1, b1, cof = normal_mixture_factor(weights, means, variances)

    if len(cof.atoms) == 1:
        v = qid_verdict(cof, n_points=n_points, scan_config=config)
        if v.status != "QID":
            return AnalysisReport(v.status, "normal_mixture", v.certificate)
        report = _recompose_report(v.report, dist,
                                   add_variance=a1, add_drift=b1)
        return AnalysisReport("QID", "normal_mixture", v.certificate, report)

    # several minimal-variance components: the cofactor atoms may still
    # form a lattice, in which case the mixed route applies
    det = detect_lattice(cof.atom_locations())
    if det is not None:
        try:
            cof_lat = Distribution(cof.atoms, cof.ac_weight,
                                   cof.ac_density, det)
        except SpecError:
            cof_lat = None
        if cof_lat is not None:
            v = mixed_qid_verdict(cof_lat, n_points=n_points,
                                  scan_config=config)
            if v.status != "QID":
                return AnalysisReport(v.status, "normal_mixture",
                                      v.certificate)
            report = _recompose_report(v.report, dist,
                                       add_variance=a1, add_drift=b1)
            return AnalysisReport("QID", "normal_mixture", v.certificate,
                                  report)
    certificate = find_zeros(cof, config)
    verdict = "NotQID" if certificate.verdict == "zero_found" else "QID"
    return AnalysisReport(
        verdict, "normal_mixture", certificate,
        note="minimal-variance components sit off-lattice; verdict only",
    )


def analyze(dist: Distribution, *, n_points: int = 1 << 16,
            scan_config: Optional[ScanConfig] = None) -> AnalysisReport:
    """Classify the law, certify zeros, extract the triplet when supported."""
    config = scan_config or ScanConfig()
    try:
        return _analyze_inner(dist, n_points, config)
    except IndeterminateZeroError as exc:
        return AnalysisReport(
            "indeterminate", "unresolved", None, None,
            note=f"modulus {exc.modulus:.3g} at z = {exc.location:.6g} "
                 "falls inside the indeterminate band [1e-10, 1e-6]",
        )
    except ScanError as exc:
        return AnalysisReport("indeterminate", "unresolved", None, None,
                              note=str(exc))


def _analyze_inner(dist: Distribution, n_points: int,
                   config: ScanConfig) -> AnalysisReport:
    if dist.atoms:
        if len(dist.atoms) == 1 and dist.lattice is None:
            v = qid_verdict(dist, n_points=n_points, scan_config=config)
            form = "atom_ac" if dist.ac_weight > 0 else "atom"
            return _from_qid_verdict(v, form)
        if dist.lattice is not None:
            v = mixed_qid_verdict(dist, n_points=n_points,
                                  scan_config=config)
            form = "lattice_ac" if dist.ac_weight > 0 else "lattice"
            return _from_qid_verdict(v, form)
        det = detect_lattice(dist.atom_locations())
        if det is not None:
            try:
                declared = Distribution(dist.atoms, dist.ac_weight,
                                        dist.ac_density, det)
            except SpecError:
                declared = None
            if declared is not None:
                v = mixed_qid_verdict(declared, n_points=n_points,
                                      scan_config=config)
                form = "lattice_ac" if dist.ac_weight > 0 else "lattice"
                return _from_qid_verdict(v, form)
        certificate = find_zeros(dist, config)
        verdict = ("NotQID" if certificate.verdict == "zero_found"
                   else "QID")
        return AnalysisReport(
            verdict, "multi_atom", certificate,
            note="atoms share no lattice; triplet extraction unsupported",
        )

    dens = dist.ac_density
    if isinstance(dens, NormalDensity):
        return _pure_normal_report(dist, config)
    if isinstance(dens, GaussianVarianceMixDensity):
        try:
            mixing = MixingDistribution(dens.atoms, dens.segments)
        except SpecError:
            # no atom at the bottom of the variance support; the transform
            # is still positive, so certify but skip the triplet
            certificate = find_zeros(dist, config)
            return AnalysisReport(
                "QID", "variance_mixture", certificate,
                note="mixing law carries no bottom atom; verdict only")
        report = variance_report(mixing, n_points=n_points)
        return AnalysisReport("QID", "variance_mixture",
                              report.certificate, report)
    if isinstance(dens, MixtureDensity) and all(
            isinstance(c, NormalDensity) for _, c in dens.components):
        return _normal_mixture_route(dist, n_points, config)
    if isinstance(dens, ExponentialDensity):
        certificate = find_zeros(dist, config)
        return AnalysisReport(
            "QID", "exponential", certificate,
            note="classically infinitely divisible; the Levy density "
                 "e^{-rate x}/x on x > 0 is left in closed form",
        )
    if isinstance(dens, UniformDensity) and config.scan_bound is None:
        half = 0.5 * (dens.right - dens.left)
        config = ScanConfig(z_scan_min=config.z_scan_min,
                            refine_tol=config.refine_tol,
                            scan_bound=2.5 * np.pi / half)
    certificate = find_zeros(dist, config)
    verdict = "NotQID" if certificate.verdict == "zero_found" else "QID"
    return AnalysisReport(verdict, "ac", certificate,
                          note="" if verdict == "NotQID" else
                          "no real zeros; triplet extraction for this "
                          "form is unsupported")
