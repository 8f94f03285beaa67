"""Zero detection on the real line and its certificates."""

import numpy as np
import pytest

from qidkit import (
    Distribution,
    ExponentialDensity,
    IndeterminateZeroError,
    MixtureDensity,
    NormalDensity,
    ScanConfig,
    ScanError,
    UniformDensity,
    ZeroCertificate,
    find_zeros,
    golden_min,
)

from laws import atom_plus_exponential, atom_plus_normal, atom_plus_uniform


def bisect_zero(fn, lo, hi, steps=80):
    """Plain bisection for a sign change; used as an independent oracle."""
    flo = fn(lo)
    assert flo * fn(hi) < 0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if flo * fn(mid) <= 0:
            hi = mid
        else:
            lo = mid
            flo = fn(lo)
    return 0.5 * (lo + hi)


def test_golden_min_on_a_parabola():
    # comparisons go flat within sqrt(eps) of a smooth minimum, so expect
    # about 1e-8 here; true zeros are V-shaped and refine much further
    loc = golden_min(lambda t: (t - 1.7) ** 2 + 3.0, 0.0, 4.0, 1e-12)
    assert loc == pytest.approx(1.7, abs=1e-7)


def test_golden_min_on_a_kink():
    loc = golden_min(lambda t: abs(t - 1.7), 0.0, 4.0, 1e-12)
    assert loc == pytest.approx(1.7, abs=1e-11)


def test_uniform_mixture_zero_matches_bisection():
    # 0.1 + 0.9 sin(z)/z changes sign between 3 and 4; the scan must land on
    # that root, not on the later minimum of the sinc itself
    oracle = bisect_zero(lambda z: 0.1 + 0.9 * np.sin(z) / z, 3.0, 4.0)
    cert = find_zeros(atom_plus_uniform(0.1))
    assert cert.verdict == "zero_found"
    assert cert.refined_location == pytest.approx(oracle, abs=1e-6)
    assert cert.refined_modulus < 1e-10
    assert cert.z_lo < cert.refined_location < cert.z_hi


def test_heavier_atom_blocks_the_zero():
    # min of sin(z)/z is about -0.2172, so 0.5 + 0.5 sinc never vanishes
    cert = find_zeros(atom_plus_uniform(0.5))
    assert cert.verdict == "no_zeros"
    assert cert.tail_kind == "atomic_floor"
    assert cert.min_modulus_observed > 0.2


def test_pure_uniform_zero_at_pi():
    law = Distribution((), 1.0, UniformDensity(-1.0, 1.0))
    cert = find_zeros(law, ScanConfig(scan_bound=8.0))
    assert cert.verdict == "zero_found"
    assert cert.refined_location == pytest.approx(np.pi, abs=1e-9)


def test_gaussian_tail_underflow_is_not_a_zero():
    # far out the transform underflows to subnormal dust; the scan must not
    # mistake that plateau for a crossing
    cert = find_zeros(Distribution((), 1.0, NormalDensity(1.0, 2.0)))
    assert cert.verdict == "no_zeros"
    assert cert.tail_kind == "analytic_positive"
    assert cert.min_modulus_observed > 0.0


def test_analytic_families_certify_without_atoms():
    cert = find_zeros(Distribution((), 1.0, ExponentialDensity(1.0)))
    assert cert.verdict == "no_zeros"
    assert cert.tail_kind == "analytic_positive"


def test_clean_scan_without_justification_is_an_error():
    # two-normal mixture: no atoms, not an analytic family the engine can
    # certify, and no zeros show up, so the honest answer is "cannot say"
    dens = MixtureDensity(((0.5, NormalDensity(0.0, 1.0)),
                           (0.5, NormalDensity(1.0, 2.0))))
    with pytest.raises(ScanError):
        find_zeros(Distribution((), 1.0, dens))


def test_indeterminate_band_is_refused():
    # tune the atom so the global minimum of |p + (1-p) sinc| lands at 5e-8,
    # squarely inside the indeterminate band [1e-10, 1e-6]
    z0 = bisect_zero(lambda z: np.tan(z) - z, 4.3, 4.6)  # sinc minimum
    s0 = float(np.sin(z0) / z0)
    p = (5e-8 - s0) / (1.0 - s0)  # solves p + (1 - p) s0 = 5e-8
    with pytest.raises(IndeterminateZeroError):
        find_zeros(atom_plus_uniform(p))


def test_scan_extends_past_requested_minimum():
    cert = find_zeros(atom_plus_exponential(0.5, 1.0))
    assert cert.verdict == "no_zeros"
    # tail cutoff for this law is z = 2, well under the default floor of 64
    assert cert.z_max_used >= 64.0


def test_certificate_self_checks():
    with pytest.raises(ScanError):
        ZeroCertificate("zero_found", 1e-3, refined_modulus=1e-7)
    with pytest.raises(ScanError):
        ZeroCertificate("no_zeros", 0.0, tail_kind="atomic_floor")
    with pytest.raises(ScanError):
        ZeroCertificate("no_zeros", 0.5, tail_kind="hope")
    with pytest.raises(ScanError):
        ZeroCertificate("perhaps", 0.5)


def test_certificate_to_dict_drops_unset_fields():
    cert = ZeroCertificate("no_zeros", 0.5, z_max_used=64.0,
                           tail_kind="atomic_floor")
    d = cert.to_dict()
    assert d["verdict"] == "no_zeros"
    assert "refined_location" not in d


def test_scan_config_validation():
    with pytest.raises(ScanError):
        ScanConfig(z_scan_min=0.0)
    with pytest.raises(ScanError):
        ScanConfig(refine_tol=-1.0)
