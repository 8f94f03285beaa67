"""Phase unwrapping and winding counts for non-vanishing curves."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qidkit import (
    Atom,
    CharFunctionGrid,
    Distribution,
    LogGrid,
    NormalDensity,
    UnwrapError,
    charfn_eval,
    distinguished_log,
    unwrap_phase,
    winding_from_log,
    winding_from_samples,
    winding_index,
)

from laws import atom_plus_normal


def cayley_power(z, m):
    """((z - i)/(z + i))^m: unit-modulus curve that winds m times."""
    return ((z - 1j) / (z + 1j)) ** m


def test_unwrap_recovers_a_smooth_phase():
    z = np.linspace(-10.0, 10.0, 2001)
    theta_true = 0.3 * z * z - z
    values = np.exp(1j * theta_true)
    theta = unwrap_phase(z, values)
    # same phase up to one global multiple of 2 pi
    offset = (theta - theta_true)[1000]
    assert offset == pytest.approx(round(offset / (2 * np.pi)) * 2 * np.pi,
                                   abs=1e-9)
    assert_allclose(np.diff(theta), np.diff(theta_true), atol=1e-9)
    assert_allclose(np.exp(1j * theta), values, atol=1e-12)


def test_unwrap_refuses_a_vanishing_curve():
    z = np.linspace(-1.0, 1.0, 11)
    values = z.astype(complex)
    with pytest.raises(UnwrapError):
        unwrap_phase(z, values)


def test_unwrap_bisects_fast_phase_with_an_evaluator():
    # phase steps of 3.3 rad per sample alias badly; with the evaluator the
    # unwrap must bisect its way through and still get the slope right
    def curve(z):
        return np.exp(3.3j * np.asarray(z))

    z = np.linspace(0.0, 12.0, 13)
    theta = unwrap_phase(z, curve(z), curve)
    assert_allclose(np.diff(theta), 3.3, atol=1e-9)


def test_unwrap_without_evaluator_refuses_aliased_steps():
    z = np.linspace(0.0, 12.0, 13)
    values = np.exp(3.3j * z)
    with pytest.raises(UnwrapError):
        unwrap_phase(z, values)


def test_log_grid_invariants():
    z = np.linspace(-1.0, 1.0, 21)
    vals = np.full(21, 0.5 + 0.0j)
    LogGrid(z, np.log(vals), vals)
    with pytest.raises(UnwrapError):
        LogGrid(z, np.log(vals) + 0.1, vals)  # exp(L) != F
    jumpy = np.log(vals).copy()
    jumpy[10:] += 3.2j  # phase step wider than pi
    with pytest.raises(UnwrapError):
        LogGrid(z, jumpy, np.exp(jumpy))


def test_winding_counts_cayley_powers():
    z = np.linspace(-200.0, 200.0, 4001)
    for m in (0, 1, 2, 3):
        assert winding_from_samples(z, cayley_power(z, m)) == m
    assert winding_from_samples(z, cayley_power(z, 1) ** -1) == -1


def test_winding_needs_settled_tails():
    # truncating the same curve at |z| = 20 leaves the tail phase about
    # 0.2 rad short of its limit, which must be refused, not rounded
    z = np.linspace(-20.0, 20.0, 2001)
    values = cayley_power(z, 2)
    theta = unwrap_phase(z, values)
    grid = LogGrid(z, np.log(np.abs(values)) + 1j * theta, values)
    with pytest.raises(UnwrapError):
        winding_from_log(grid)


def test_winding_raw_estimate_is_near_the_integer():
    z = np.linspace(-400.0, 400.0, 8001)
    values = cayley_power(z, 2)
    theta = unwrap_phase(z, values)
    grid = LogGrid(z, np.log(np.abs(values)) + 1j * theta, values)
    raw, m = winding_from_log(grid)
    assert m == 2
    assert abs(raw - 2.0) < 0.05


def test_distinguished_log_needs_modulus_headroom():
    n = 1 << 10
    z = np.linspace(-8.0, 8.0, n)
    vals = ((z - 0.5j) / (z + 0.5j)) * np.exp(-z * z / 2)
    F = CharFunctionGrid(8.0, vals)
    with pytest.raises(UnwrapError):
        distinguished_log(F)


def test_distinguished_log_exponentiates_back():
    law = atom_plus_normal(0.2, 0.0, 1.0)
    F = charfn_eval(law, 24.0, 1 << 10)
    grid = distinguished_log(F, law)
    assert_allclose(np.exp(grid.values), F.values, atol=1e-11)


def test_winding_index_of_small_atom_on_normal():
    law = atom_plus_normal(0.001, 1.0, 1.0)
    F = charfn_eval(law, 512.0, 1 << 14)
    assert winding_index(F, law) == 2


def test_winding_index_zero_when_atom_dominates():
    law = atom_plus_normal(0.6, 0.0, 1.0)
    F = charfn_eval(law, 256.0, 1 << 13)
    assert winding_index(F, law) == 0


def test_winding_index_rejects_multi_atom_laws():
    law = Distribution((Atom(0.0, 0.3), Atom(1.0, 0.3)), 0.4,
                       NormalDensity(0.0, 1.0))
    F = charfn_eval(law, 64.0, 1 << 10)
    with pytest.raises(UnwrapError):
        winding_index(F, law)
