"""Fourier helpers shared by the characteristic-function machinery.

Conventions used throughout the package:

    forward   F(z) = integral f(x) exp(+i x z) dx
    inverse   f(x) = (1/2pi) integral F(z) exp(-i x z) dz

Tabulated functions are always interpreted as hat-function (piecewise
linear) expansions on a uniform grid: the tabulation ``(x0, dx, values)``
stands for sum_j values[j] * Lambda((x - x_j)/dx) with x_j = x0 + j*dx.
The expansion rolls off linearly to zero over one extra cell at each end,
so its integral is exactly dx * sum(values) and its Fourier transform has
the closed form

    F(z) = dx * sinc(z dx / 2)^2 * sum_j values[j] exp(i x_j z),

with sinc(u) = sin(u)/u.  The discrete sum is evaluated with the chirp-z
transform on uniform z grids and by direct summation otherwise.

Summations rely on numpy's pairwise accumulation, so results do not depend
on chunking or execution order.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import czt

__all__ = [
    "sinc",
    "offset_grid",
    "hat_transform_grid",
    "hat_transform_points",
    "hat_l1_norm",
    "inverse_transform_padded",
]

# Above this many target points the direct O(n*m) sum is refused; callers
# should be on a uniform grid long before reaching it.
_DIRECT_SUM_LIMIT = 80_000_000


def sinc(u):
    """sin(u)/u with the removable singularity filled in."""
    u = np.asarray(u, dtype=float)
    out = np.ones_like(u)
    nz = np.abs(u) > 1e-150
    out[nz] = np.sin(u[nz]) / u[nz]
    return out


def offset_grid(half_width: float, n: int) -> tuple[float, float, np.ndarray]:
    """Symmetric uniform grid of n points straddling 0 without containing it.

    Returns (start, step, grid) with grid[k] = -half_width + step*(k + 1/2).
    The midpoint offset keeps 0 off the grid, which matters wherever a
    tabulated function has a jump exactly at the origin.
    """
    if n < 2:
        raise ValueError("offset grid needs at least 2 points")
    step = 2.0 * half_width / n
    start = -half_width + 0.5 * step
    return start, step, start + step * np.arange(n)


def _czt_sum(values: np.ndarray, x0: float, dx: float,
             z0: float, dz: float, m: int) -> np.ndarray:
    """sum_j values[j] exp(i x_j z_k) on the uniform grid z_k = z0 + k*dz."""
    w = np.exp(1j * dx * dz)
    a = np.exp(-1j * dx * z0)
    z = z0 + dz * np.arange(m)
    return czt(values, m=m, w=w, a=a) * np.exp(1j * x0 * z)


def hat_transform_grid(values: np.ndarray, x0: float, dx: float,
                       z0: float, dz: float, m: int) -> np.ndarray:
    """Fourier transform of a hat expansion on a uniform z grid.

    Exact for the piecewise-linear interpolant (including the roll-off
    cells), cost O((n + m) log(n + m)) via the chirp-z transform.
    """
    z = z0 + dz * np.arange(m)
    shape = dx * sinc(0.5 * dx * z) ** 2
    return shape * _czt_sum(np.asarray(values, dtype=complex), x0, dx, z0, dz, m)


def hat_transform_points(values: np.ndarray, x0: float, dx: float,
                         z: np.ndarray) -> np.ndarray:
    """Fourier transform of a hat expansion at scattered z values.

    Direct summation; intended for small batches (zero refinement,
    adaptive phase bisection), not for full grids.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    values = np.asarray(values, dtype=complex)
    if z.size * values.size > _DIRECT_SUM_LIMIT:
        raise ValueError(
            "scattered-point transform too large; evaluate on a uniform grid"
        )
    x = x0 + dx * np.arange(values.size)
    shape = dx * sinc(0.5 * dx * z) ** 2
    # chunk over z to bound the temporary (z, x) matrix
    out = np.empty(z.size, dtype=complex)
    step = max(1, _DIRECT_SUM_LIMIT // max(values.size, 1))
    for lo in range(0, z.size, step):
        hi = min(lo + step, z.size)
        out[lo:hi] = np.exp(1j * np.outer(z[lo:hi], x)) @ values
    return shape * out


def hat_l1_norm(values: np.ndarray, dx: float) -> float:
    """Exact L1 norm of the hat expansion (sign changes inside cells included).

    On a cell where the interpolant runs linearly from a to b the integral
    of the absolute value is dx*(|a|+|b|)/2 when a and b share a sign and
    dx*(a^2+b^2)/(2|a-b|) otherwise.  The two half-cells rolling off at the
    ends contribute dx*|v|/2 each.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return 0.0
    a, b = v[:-1], v[1:]
    same = a * b >= 0.0
    cells = np.where(
        same,
        0.5 * (np.abs(a) + np.abs(b)),
        0.5 * (a * a + b * b) / np.maximum(np.abs(a - b), 1e-300),
    )
    return float(dx * (cells.sum() + 0.5 * np.abs(v[0]) + 0.5 * np.abs(v[-1])))


def inverse_transform_padded(fz: np.ndarray, z0: float, dz: float,
                             pad: int = 16) -> tuple[float, float, np.ndarray]:
    """Inverse transform of samples F(z_k), z_k = z0 + k*dz, onto a fine grid.

    Approximates f(x) = (1/2pi) integral F(z) e^{-ixz} dz by the Riemann sum
    over the sampled band and evaluates it on the zero-padded dual grid

        x_j = (j - M/2 + 1/2) * dx_out,   dx_out = 2pi/(M*dz),

    where M = pad * next_pow2(len(fz)).  The half-sample offset keeps x = 0
    off the grid.  Returns (x_start, dx_out, f_values).

    The sampled band must already carry decayed tails; no window is applied.
    """
    fz = np.asarray(fz, dtype=complex)
    n = fz.size
    m = pad * (1 << int(np.ceil(np.log2(max(n, 2)))))
    k = np.arange(n)
    weighted = fz * np.exp(1j * np.pi * k * (1.0 - 1.0 / m))
    padded = np.zeros(m, dtype=complex)
    padded[:n] = weighted
    spectrum = np.fft.fft(padded)
    dx_out = 2.0 * np.pi / (m * dz)
    j = np.arange(m)
    x = (j - 0.5 * m + 0.5) * dx_out
    f = spectrum * np.exp(-1j * x * z0) * (dz / (2.0 * np.pi))
    return float(x[0]), float(dx_out), f
