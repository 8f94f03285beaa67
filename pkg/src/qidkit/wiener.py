"""Elements p + f of the unitized L^1 convolution algebra.

An element is a complex constant (the delta-at-zero coefficient) plus a
tabulated complex integrable function.  Norm: |p| + ||f||_1 with the L^1 part
measured by trapezoid quadrature of |f| including the one-cell roll-off at
each end (dx * sum |v|).  That quadrature dominates the interpolant's exact
L^1 norm, which keeps the norm submultiplicative under the discrete product
up to float roundoff.

Products multiply constants, scale-and-add the cross terms, and convolve the
function parts with the trapezoid rule (dx * convolve(v1, v2)).  Grids must
share dx and have origins differing by an integer number of cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridError

__all__ = ["WienerElement", "wiener_norm", "wiener_product"]


@dataclass(frozen=True)
class WienerElement:
    constant: complex
    x0: float = 0.0
    dx: float = 1.0
    values: Optional[tuple] = None  # complex samples; None means f = 0

    def __post_init__(self):
        if self.values is not None:
            if not self.dx > 0:
                raise GridError("wiener element needs dx > 0")
            vals = tuple(complex(v) for v in self.values)
            if len(vals) == 0:
                object.__setattr__(self, "values", None)
            else:
                object.__setattr__(self, "values", vals)

    def f_array(self) -> np.ndarray:
        if self.values is None:
            return np.zeros(0, dtype=complex)
        return np.asarray(self.values, dtype=complex)

    @staticmethod
    def unit() -> "WienerElement":
        return WienerElement(1.0 + 0.0j)


def wiener_norm(e: WienerElement) -> float:
    """|p| + dx * sum|v|; the L^1 norm of the hat expansion of |f|."""
    norm = abs(e.constant)
    if e.values is not None:
        norm += float(e.dx * np.abs(e.f_array()).sum())
    return float(norm)


def _aligned_offset(x0_a: float, x0_b: float, dx: float) -> int:
    shift = (x0_b - x0_a) / dx
    k = round(shift)
    if abs(shift - k) > 1e-9:
        raise GridError(
            f"grids with origins {x0_a!r} and {x0_b!r} are not aligned "
            f"to a common dx={dx!r} lattice"
        )
    return int(k)


def wiener_product(a: WienerElement, b: WienerElement) -> WienerElement:
    """(p_a + f_a)(p_b + f_b) with the trapezoid convolution for f_a * f_b."""
    p = a.constant * b.constant
    terms: list[tuple[float, np.ndarray]] = []
    if b.values is not None:
        terms.append((b.x0, a.constant * b.f_array()))
    if a.values is not None:
        terms.append((a.x0, b.constant * a.f_array()))
    if a.values is not None and b.values is not None:
        if abs(a.dx - b.dx) > 1e-12 * max(a.dx, b.dx):
            raise GridError(
                f"cannot convolve tabulations with dx {a.dx!r} and {b.dx!r}"
            )
        conv = a.dx * np.convolve(a.f_array(), b.f_array())
        terms.append((a.x0 + b.x0, conv))
    dx = a.dx if a.values is not None else b.dx
    terms = [(x0, v) for x0, v in terms if v.size and np.any(v != 0)]
    if not terms:
        return WienerElement(p, dx=dx)
    base_x0 = min(x0 for x0, _ in terms)
    offsets = [_aligned_offset(base_x0, x0, dx) for x0, _ in terms]
    length = max(off + v.size for off, (_, v) in zip(offsets, terms))
    out = np.zeros(length, dtype=complex)
    for off, (_, v) in zip(offsets, terms):
        out[off:off + v.size] += v
    return WienerElement(p, base_x0, dx, tuple(out))
