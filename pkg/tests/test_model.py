"""Law construction, validation, and closed-form transforms."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qidkit import (
    Atom,
    Distribution,
    ExponentialDensity,
    GaussianVarianceMixDensity,
    MixtureDensity,
    NormalDensity,
    SpecError,
    TabulatedDensity,
    UniformDensity,
    cdf_grid,
    validate_spec,
)

from laws import atom_plus_exponential, atom_plus_normal


def test_atom_mass_bounds():
    with pytest.raises(SpecError):
        Atom(0.0, 0.0)
    with pytest.raises(SpecError):
        Atom(0.0, 1.2)
    Atom(0.0, 1.0)  # full mass is fine


def test_mass_budget_must_close():
    with pytest.raises(SpecError):
        Distribution((Atom(0.0, 0.6), Atom(1.0, 0.6)))
    with pytest.raises(SpecError):
        Distribution((Atom(0.0, 0.5),), 0.4, NormalDensity(0.0, 1.0))


def test_weight_and_density_must_pair_up():
    with pytest.raises(SpecError):
        Distribution((Atom(0.0, 0.5),), 0.5, None)
    with pytest.raises(SpecError):
        Distribution((Atom(0.0, 1.0),), 0.0, NormalDensity(0.0, 1.0))


def test_duplicate_atom_locations_rejected():
    with pytest.raises(SpecError):
        Distribution((Atom(1.0, 0.5), Atom(1.0, 0.5)))


def test_declared_lattice_membership():
    Distribution((Atom(0.5, 0.4), Atom(1.5, 0.6)), lattice=(0.5, 0.5))
    with pytest.raises(SpecError):
        Distribution((Atom(0.5, 0.4), Atom(1.7, 0.6)), lattice=(0.5, 0.5))
    with pytest.raises(SpecError):
        Distribution((Atom(0.0, 1.0),), lattice=(0.0, -1.0))


def test_normal_transform_closed_form():
    law = Distribution((), 1.0, NormalDensity(0.7, 2.0))
    z = np.linspace(-8.0, 8.0, 101)
    assert_allclose(law.charfn(z), np.exp(0.7j * z - z * z), atol=1e-14)


def test_uniform_transform_is_shifted_sinc():
    law = Distribution((), 1.0, UniformDensity(-1.0, 3.0))
    z = np.linspace(-5.0, 5.0, 81)
    z = z[z != 0]
    expected = np.exp(1j * z) * np.sin(2 * z) / (2 * z)
    assert_allclose(law.charfn(z), expected, atol=1e-13)


def test_exponential_transform_closed_form():
    law = Distribution((), 1.0, ExponentialDensity(2.0, shift=-1.0))
    z = np.linspace(-10.0, 10.0, 77)
    expected = np.exp(-1j * z) * 2.0 / (2.0 - 1j * z)
    assert_allclose(law.charfn(z), expected, atol=1e-14)


def test_transform_normalization_and_symmetry(rng):
    law = atom_plus_normal(0.2, -0.5, 1.3)
    z = rng.uniform(-30, 30, size=200)
    f = law.charfn(z)
    assert complex(law.charfn(0.0)[0]) == 1.0 + 0.0j
    assert_allclose(law.charfn(-z), np.conj(f), atol=1e-15)
    assert np.all(np.abs(f) <= 1 + 1e-12)


def test_charfn_uniform_matches_pointwise(rng):
    law = atom_plus_exponential(0.3, 1.5)
    z0, dz, m = -7.0, 0.125, 113
    grid_vals = law.charfn_uniform(z0, dz, m)
    z = z0 + dz * np.arange(m)
    assert_allclose(grid_vals, law.charfn(z), atol=1e-12)


def test_shift_identity(rng):
    law = atom_plus_exponential(0.3, 1.5)
    z = rng.uniform(-20, 20, size=64)
    shifted = law.shifted(0.8)
    assert_allclose(shifted.charfn(z), np.exp(0.8j * z) * law.charfn(z),
                    atol=1e-14)


def test_scale_identity(rng):
    law = atom_plus_normal(0.2, 0.3, 1.1)
    z = rng.uniform(-10, 10, size=64)
    assert_allclose(law.scaled(-2.5).charfn(z), law.charfn(-2.5 * z),
                    atol=1e-14)
    assert law.scaled(0.0).atoms == (Atom(0.0, 1.0),)
    with pytest.raises(SpecError):
        atom_plus_exponential().scaled(-1.0)


def test_convolve_normal_pair_stays_closed_form():
    a = Distribution((), 1.0, NormalDensity(0.0, 1.0))
    b = Distribution((), 1.0, NormalDensity(1.0, 2.0))
    c = a.convolve(b)
    assert isinstance(c.ac_density, NormalDensity)
    assert c.ac_density.mean == 1.0
    assert c.ac_density.variance == 3.0
    assert not c.atoms


def test_convolve_merges_atoms():
    two = Distribution((Atom(0.0, 0.5), Atom(1.0, 0.5)))
    four = two.convolve(two)
    assert [(a.location, a.mass) for a in four.atoms] == [
        (0.0, 0.25), (1.0, 0.5), (2.0, 0.25)]


def test_convolve_with_dirac_is_a_shift():
    law = atom_plus_normal(0.1)
    moved = law.convolve(Distribution.dirac(2.0))
    z = np.linspace(-6, 6, 41)
    assert_allclose(moved.charfn(z), np.exp(2j * z) * law.charfn(z),
                    atol=1e-13)


def test_convolve_densities_tabulates_the_product():
    a = atom_plus_exponential(0.5, 2.0)
    b = atom_plus_exponential(0.5, 2.0)
    c = a.convolve(b)
    z = np.linspace(-4.0, 4.0, 17)
    assert_allclose(c.charfn(z), a.charfn(z) * b.charfn(z), atol=5e-4)


def test_tabulated_integral_is_exactly_hat_mass():
    dens = TabulatedDensity(-1.0, 0.5, (0.2, 0.6, 0.4, 0.8))
    assert dens.integral() == 0.5 * 2.0
    Distribution((), 1.0, dens)


def test_tabulated_mass_gate():
    dens = TabulatedDensity(-1.0, 0.5, (0.2, 0.6, 0.4, 0.6))
    with pytest.raises(SpecError):
        Distribution((), 1.0, dens)


def test_tabulated_rejects_bad_samples():
    with pytest.raises(SpecError):
        TabulatedDensity(0.0, 0.5, (0.1, -0.2, 0.1, 0.1))
    with pytest.raises(SpecError):
        TabulatedDensity(0.0, -0.5, (0.1, 0.2, 0.1, 0.1))
    with pytest.raises(SpecError):
        TabulatedDensity(0.0, 0.5, (0.1, 0.2))


def test_triangle_tabulation_transform_is_exact():
    # the triangle max(0, 1 - |x|) is a single hat, so its transform must be
    # sinc^2(z/2) with no quadrature error at all
    dens = TabulatedDensity(-1.0, 1.0, (0.0, 1.0, 0.0, 0.0))
    law = Distribution((), 1.0, dens)
    z = np.linspace(-12.0, 12.0, 97)
    half = z / 2
    expected = np.ones_like(z)
    nz = half != 0
    expected[nz] = (np.sin(half[nz]) / half[nz]) ** 2
    vals = law.charfn(z)
    assert_allclose(vals.real, expected, atol=1e-12)
    assert_allclose(vals.imag, 0.0, atol=1e-12)


def test_variance_mix_transform_closed_form():
    dens = GaussianVarianceMixDensity(((1.0, 0.5), (2.0, 0.25)),
                                      ((0.5, 1.5, 0.25),))
    z = np.linspace(-6.0, 6.0, 49)
    z = z[z != 0]
    s = z * z / 2
    # segment part by hand: integral of exp(-t s) dt / (b - a) over [a, b]
    seg = (np.exp(-0.5 * s) - np.exp(-1.5 * s)) / s
    expected = 0.5 * np.exp(-s) + 0.25 * np.exp(-2 * s) + 0.25 * seg
    assert_allclose(dens.charfn(z), expected, atol=1e-13)


def test_variance_mix_density_integrates_to_one():
    dens = GaussianVarianceMixDensity(((0.5, 0.6),), ((0.1, 1.0, 0.4),))
    x = np.linspace(-30.0, 30.0, 6001)
    mass = np.trapezoid(dens.pdf(x), x)
    assert mass == pytest.approx(1.0, abs=1e-6)
    assert dens.cdf(30.0)[0] == pytest.approx(1.0, abs=1e-7)


def test_variance_mix_weight_validation():
    with pytest.raises(SpecError):
        GaussianVarianceMixDensity(((1.0, 0.5),))
    with pytest.raises(SpecError):
        GaussianVarianceMixDensity(((0.0, 1.0),))
    with pytest.raises(SpecError):
        GaussianVarianceMixDensity(((1.0, 0.5),), ((1.0, 0.5, 0.5),))


def test_validate_spec_full_wire_format():
    raw = {
        "atoms": [{"x": 0.0, "p": 0.2}, {"x": 1.0, "p": 0.3}],
        "lattice": {"r": 0.0, "h": 1.0},
        "ac": {"weight": 0.5, "kind": "normal", "mean": 0.0, "variance": 1.0},
    }
    law = validate_spec(raw)
    assert law.lattice == (0.0, 1.0)
    assert law.ac_weight == 0.5
    assert isinstance(law.ac_density, NormalDensity)
    assert law.total_atom_mass() == pytest.approx(0.5)


def test_validate_spec_atoms_only():
    law = validate_spec({"atoms": [{"x": 1.5, "p": 1.0}]})
    assert law.atoms == (Atom(1.5, 1.0),)
    assert law.ac_weight == 0.0


def test_validate_spec_rejects_unknown_density():
    with pytest.raises(SpecError):
        validate_spec({"ac": {"weight": 1.0, "kind": "cauchy", "scale": 1.0}})


def test_validate_spec_rejects_bad_atoms():
    with pytest.raises(SpecError):
        validate_spec({"atoms": [{"x": 0.0, "p": 2.0}]})
    with pytest.raises(SpecError):
        validate_spec({"atoms": [{"x": 0.0}]})


def test_validate_spec_mixture_and_tabulated():
    raw = {"ac": {"weight": 1.0, "kind": "mixture", "components": [
        {"weight": 0.4, "kind": "uniform", "left": -1.0, "right": 1.0},
        {"weight": 0.6, "kind": "exponential", "rate": 2.0},
    ]}}
    law = validate_spec(raw)
    assert isinstance(law.ac_density, MixtureDensity)

    raw = {"ac": {"weight": 1.0, "kind": "tabulated",
                  "x0": -1.0, "dx": 1.0, "values": [0.0, 1.0, 0.0, 0.0]}}
    law = validate_spec(raw)
    assert isinstance(law.ac_density, TabulatedDensity)


def test_essential_support_brackets_the_mass():
    law = atom_plus_exponential(0.5, 1.0)
    lo, hi = law.essential_support()
    assert lo <= 0.0 and hi >= 10.0
    x = np.linspace(lo - 1, hi + 1, 301)
    c = cdf_grid(law, x)
    assert np.all(np.diff(c) >= -1e-12)
    assert c[0] < 1e-5 and c[-1] > 1 - 1e-5


def test_cdf_shows_the_atom_jump():
    law = atom_plus_normal(0.3, 0.0, 1.0)
    below, above = law.cdf([-1e-9, 1e-9])
    assert above - below >= 0.3 - 1e-6
