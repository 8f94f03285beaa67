"""Builders for the handful of laws the suite keeps coming back to."""

from qidkit import (
    Atom,
    Distribution,
    ExponentialDensity,
    NormalDensity,
    UniformDensity,
)


def atom_plus_normal(p: float = 0.001, mean: float = 1.0,
                     variance: float = 1.0) -> Distribution:
    """Point mass p at 0 riding a normal background."""
    return Distribution((Atom(0.0, p),), 1.0 - p, NormalDensity(mean, variance))


def atom_plus_exponential(p: float = 0.5, rate: float = 1.0) -> Distribution:
    return Distribution((Atom(0.0, p),), 1.0 - p, ExponentialDensity(rate))


def atom_plus_uniform(p: float, half: float = 1.0) -> Distribution:
    return Distribution((Atom(0.0, p),), 1.0 - p, UniformDensity(-half, half))


def two_point(p0: float = 0.7, p1: float = 0.3) -> Distribution:
    """Bernoulli-type lattice law p0 d_0 + p1 d_1."""
    return Distribution((Atom(0.0, p0), Atom(1.0, p1)), lattice=(0.0, 1.0))
