"""Levy metric: known distances, symmetry, triangle inequality."""

import numpy as np
import pytest
from scipy.special import ndtr

from qidkit import (
    Atom,
    Distribution,
    NormalDensity,
    UniformDensity,
    levy_distance,
)

from laws import atom_plus_normal, atom_plus_uniform


def test_identical_laws_are_at_distance_zero():
    law = Distribution((), 1.0, NormalDensity(0.0, 1.0))
    d, _ = levy_distance(law, law)
    assert d == 0.0


def test_dirac_pair_distance_is_the_gap():
    d, spacing = levy_distance(Distribution.dirac(0.0),
                               Distribution.dirac(0.3))
    assert spacing < 1e-3
    assert d == pytest.approx(0.3, abs=spacing)


def test_dirac_pair_distance_saturates_at_one():
    d, _ = levy_distance(Distribution.dirac(0.0), Distribution.dirac(5.0))
    assert d == 1.0


def test_shifted_normal_matches_scalar_oracle():
    # for F = Phi and G = Phi(. - c) the worst sandwich gap sits at the
    # midpoint, so the distance solves 2 Phi((c - eps)/2) - 1 = eps
    c = 0.5

    def h(eps):
        return 2.0 * ndtr((c - eps) / 2.0) - 1.0 - eps

    lo, hi = 0.0, c
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    oracle = 0.5 * (lo + hi)

    a = Distribution((), 1.0, NormalDensity(0.0, 1.0))
    b = Distribution((), 1.0, NormalDensity(c, 1.0))
    d, spacing = levy_distance(a, b)
    assert d == pytest.approx(oracle, abs=1e-6)


def test_symmetry_is_exact():
    pairs = [
        (Distribution.dirac(0.0), atom_plus_uniform(0.3)),
        (atom_plus_normal(0.2, 0.0, 1.0),
         Distribution((), 1.0, UniformDensity(-1.0, 2.0))),
        (Distribution((Atom(0.0, 0.4), Atom(1.0, 0.6))),
         Distribution((), 1.0, NormalDensity(0.5, 0.5))),
    ]
    for a, b in pairs:
        assert levy_distance(a, b)[0] == levy_distance(b, a)[0]


def test_triangle_inequality_on_mixed_triples(rng):
    def random_law():
        kind = rng.integers(0, 3)
        if kind == 0:
            return Distribution.dirac(float(rng.uniform(-1, 1)))
        if kind == 1:
            return Distribution((), 1.0,
                                NormalDensity(float(rng.uniform(-1, 1)),
                                              float(rng.uniform(0.3, 2.0))))
        p = float(rng.uniform(0.2, 0.8))
        return Distribution((Atom(float(rng.uniform(-1, 1)), p),), 1.0 - p,
                            UniformDensity(-1.0, 1.0))

    for _ in range(6):
        a, b, c = random_law(), random_law(), random_law()
        dab, s1 = levy_distance(a, b)
        dbc, s2 = levy_distance(b, c)
        dac, s3 = levy_distance(a, c)
        slack = 2.0 * max(s1, s2, s3)
        assert dac <= dab + dbc + slack


def test_distance_separates_distinct_laws():
    a = atom_plus_uniform(0.3)
    b = atom_plus_uniform(0.5)
    d, _ = levy_distance(a, b)
    assert d > 0.01
