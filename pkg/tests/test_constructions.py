"""Interpolation paths, variance mixtures, factorizations, scaling."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qidkit import (
    Atom,
    Distribution,
    MixingDistribution,
    NormalDensity,
    ScanConfig,
    SpecError,
    UniformDensity,
    UnsupportedFormError,
    assemble_triplet,
    find_zeros,
    interpolate,
    levy_distance,
    nonqid_sequence,
    normal_mixture,
    normal_mixture_factor,
    normal_mixture_report,
    reconstruct_on_grid,
    scale_triplet,
    sequence_zero_certificate,
    variance_cofactor,
    variance_mixture,
    variance_report,
)

from laws import atom_plus_exponential, atom_plus_normal


def test_interpolation_endpoints_are_the_laws_themselves():
    a = Distribution((), 1.0, NormalDensity(0.0, 1.0))
    b = Distribution((), 1.0, NormalDensity(1.0, 2.0))
    assert interpolate(a, b, 0.0) is b
    assert interpolate(a, b, 1.0) is a
    with pytest.raises(SpecError):
        interpolate(a, b, 1.5)
    with pytest.raises(SpecError):
        interpolate(a, b, -0.1)


def test_interpolation_transform_identity():
    a = Distribution((), 1.0, NormalDensity(0.0, 1.0))
    b = Distribution((), 1.0, NormalDensity(1.0, 2.0))
    z = np.linspace(-10.0, 10.0, 81)
    for t in (0.25, 0.5, 0.9):
        path = interpolate(a, b, t)
        oracle = a.charfn(t * z) * b.charfn((1.0 - t) * z)
        assert_allclose(path.charfn(z), oracle, atol=1e-13)


def test_interpolation_of_normal_and_dirac_is_exact():
    a = Distribution((), 1.0, NormalDensity(0.0, 1.0))
    b = Distribution.dirac(2.0)
    mid = interpolate(a, b, 0.5)
    assert isinstance(mid.ac_density, NormalDensity)
    assert mid.ac_density.mean == pytest.approx(1.0)
    assert mid.ac_density.variance == pytest.approx(0.25)


def test_mixing_distribution_validation():
    MixingDistribution(((0.5, 0.4), (1.5, 0.6)))
    with pytest.raises(SpecError):
        MixingDistribution(())
    with pytest.raises(SpecError):
        MixingDistribution(((0.5, 0.4), (1.5, 0.5)))  # mass 0.9
    with pytest.raises(SpecError):
        # segment dips below the bottom atom
        MixingDistribution(((1.0, 0.5),), ((0.5, 2.0, 0.5),))
    m = MixingDistribution(((0.5, 0.4), (1.5, 0.35)), ((1.0, 2.0, 0.25),))
    assert m.t1 == 0.5
    assert m.bottom_mass() == pytest.approx(0.4)


def test_variance_mixture_of_a_point_is_a_normal():
    law = variance_mixture(MixingDistribution(((1.0, 1.0),)))
    z = np.linspace(-6.0, 6.0, 49)
    assert_allclose(law.charfn(z), np.exp(-z * z / 2), atol=1e-13)


def test_variance_cofactor_factorizes_the_transform():
    mixing = MixingDistribution(((0.5, 0.4), (1.5, 0.35)), ((1.0, 2.0, 0.25),))
    t1, cof = variance_cofactor(mixing)
    assert t1 == 0.5
    assert cof.atoms == (Atom(0.0, 0.4),)
    assert cof.ac_weight == pytest.approx(0.6)
    law = variance_mixture(mixing)
    z = np.linspace(-8.0, 8.0, 65)
    assert_allclose(np.exp(-t1 * z * z / 2) * cof.charfn(z), law.charfn(z),
                    atol=1e-13)


def test_variance_report_carries_the_bottom_variance():
    mixing = MixingDistribution(((0.5, 0.4), (1.5, 0.6)))
    report = variance_report(mixing)
    t = report.triplet
    assert t.gaussian_variance == pytest.approx(0.5)
    assert t.index_m == 0
    assert report.q_est.real == pytest.approx(np.log(0.4), abs=1e-5)
    assert report.recon_error < 1e-6
    assert report.im_residual < 1e-8


def test_normal_mixture_factor_unique_minimum():
    a1, b1, cof = normal_mixture_factor((0.001, 0.999), (0.0, 1.0), (1.0, 2.0))
    assert a1 == 1.0
    assert b1 == 0.0
    assert cof.atoms == (Atom(0.0, 0.001),)
    assert cof.ac_weight == pytest.approx(0.999)
    assert isinstance(cof.ac_density, NormalDensity)
    assert cof.ac_density.mean == 1.0
    assert cof.ac_density.variance == pytest.approx(1.0)


def test_normal_mixture_factor_ties_become_lattice_atoms():
    a1, b1, cof = normal_mixture_factor((0.5, 0.3, 0.2), (0.0, 1.0, 0.5),
                                        (1.0, 1.0, 2.0))
    assert a1 == 1.0
    assert [(a.location, a.mass) for a in cof.atoms] == [(0.0, 0.5),
                                                         (1.0, 0.3)]
    with pytest.raises(UnsupportedFormError):
        normal_mixture_report((0.5, 0.3, 0.2), (0.0, 1.0, 0.5),
                              (1.0, 1.0, 2.0))


def test_normal_mixture_report_recomposes():
    weights, means, variances = (0.001, 0.999), (0.0, 1.0), (1.0, 2.0)
    report = normal_mixture_report(weights, means, variances)
    t = report.triplet
    assert t.gaussian_variance == pytest.approx(1.0)
    assert t.index_m == 2
    law = normal_mixture(weights, means, variances)
    z0, dz, m = -32.0, 64.0 / 2000, 2001
    z = z0 + dz * np.arange(m)
    err = np.abs(reconstruct_on_grid(t, z0, dz, m) - law.charfn(z)).max()
    assert err < 1e-4


def test_scale_triplet_tracks_the_scaled_law():
    law = atom_plus_exponential(0.5, 1.0)
    base = assemble_triplet(law).triplet
    z0, dz, m = -20.0, 40.0 / 500, 501
    z = z0 + dz * np.arange(m)
    for t in (0.5, 2.0):
        scaled = scale_triplet(base, t)
        oracle = law.scaled(t).charfn(z)
        assert np.abs(reconstruct_on_grid(scaled, z0, dz, m) - oracle).max() \
            < 1e-6
    assert scale_triplet(base, 1.0) is base
    with pytest.raises(SpecError):
        scale_triplet(base, 0.0)


def test_scale_triplet_folds_the_index_term():
    law = atom_plus_normal(0.001, 1.0, 1.0)
    base = assemble_triplet(law).triplet
    assert base.index_m == 2
    scaled = scale_triplet(base, 1.3)
    assert scaled.index_m == 0  # folded into the tabulation
    z0, dz, m = -32.0, 64.0 / 1000, 1001
    z = z0 + dz * np.arange(m)
    oracle = law.scaled(1.3).charfn(z)
    assert np.abs(reconstruct_on_grid(scaled, z0, dz, m) - oracle).max() < 1e-4


def test_sequence_members_carry_scaled_zeros():
    mu = Distribution((), 1.0, NormalDensity(0.0, 1.0))
    nu = Distribution((), 1.0, UniformDensity(-1.0, 1.0))
    nu_cert = find_zeros(nu, ScanConfig(scan_bound=8.0))
    assert nu_cert.verdict == "zero_found"

    for n in (1, 3):
        cert = sequence_zero_certificate(mu, nu, n, nu_cert)
        assert cert.refined_location == pytest.approx(n * np.pi, abs=1e-8)
        member = nonqid_sequence(mu, nu, n, nu_certificate=nu_cert)
        observed = abs(complex(member.charfn(
            np.array([cert.refined_location]))[0]))
        assert observed < 1e-6


def test_sequence_converges_to_the_limit():
    mu = Distribution((), 1.0, NormalDensity(0.0, 1.0))
    nu = Distribution((), 1.0, UniformDensity(-1.0, 1.0))
    nu_cert = find_zeros(nu, ScanConfig(scan_bound=8.0))
    d1, _ = levy_distance(nonqid_sequence(mu, nu, 1, nu_certificate=nu_cert),
                          mu)
    d5, _ = levy_distance(nonqid_sequence(mu, nu, 5, nu_certificate=nu_cert),
                          mu)
    assert d5 < d1


def test_sequence_input_gates():
    mu = Distribution((), 1.0, NormalDensity(0.0, 1.0))
    nu = Distribution((), 1.0, UniformDensity(-1.0, 1.0))
    nu_cert = find_zeros(nu, ScanConfig(scan_bound=8.0))
    with pytest.raises(SpecError):
        nonqid_sequence(mu, nu, 0, nu_certificate=nu_cert)
    good_cert = find_zeros(mu)  # no_zeros: unusable for the sequence
    with pytest.raises(SpecError):
        nonqid_sequence(mu, nu, 2, nu_certificate=good_cert)
    with pytest.raises(SpecError):
        sequence_zero_certificate(mu, nu, 2, good_cert)
