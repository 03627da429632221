"""Convolution weights of the discrete T-Caputo operator.

``M_j = (j + 1)^(2 - alpha) - j^(2 - alpha)`` and their first differences
``G_j = M_j - M_{j-1}`` drive the memory term of the time-stepping scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fracmim.special_fn import gamma

# below this index the direct difference is exact enough
_DIRECT_LIMIT = 64


@dataclass(frozen=True)
class WeightTable:
    """``m[j] = M_j`` for j = 0..count-1 and ``g[j-1] = G_j`` for j = 1..count-1."""

    alpha: float
    m: np.ndarray
    g: np.ndarray

    @property
    def count(self) -> int:
        return len(self.m)

    def G(self, j: int) -> float:
        """G_j with the 1-based index used by the scheme."""
        if j < 1:
            raise IndexError("G is indexed from 1")
        return float(self.g[j - 1])

    def check_invariants(self) -> None:
        m, g = self.m, self.g
        if m[0] != 1.0:
            raise AssertionError("M_0 must equal 1")
        if np.any(m <= 0):
            raise AssertionError("M_j must be positive")
        if np.any(np.diff(m) < 0):
            raise AssertionError("M_j must be nondecreasing")
        if np.any(g < 0) or np.any(np.diff(g) > 0):
            raise AssertionError("G_j must be nonnegative and nonincreasing")
        if not np.array_equal(g, np.diff(m)):
            raise AssertionError("G_j must equal M_j - M_{j-1}")


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def build_weights(alpha: float, count: int) -> WeightTable:
    """Precompute ``M_0..M_{count-1}`` and ``G_1..G_{count-1}``."""
    _check_alpha(alpha)
    if count < 1:
        raise ValueError("count must be positive")
    p = 2.0 - alpha
    j = np.arange(count, dtype=np.float64)
    m = np.empty(count)
    small = j < _DIRECT_LIMIT
    m[small] = (j[small] + 1.0) ** p - j[small] ** p
    jb = j[~small]
    # j^p ((1 + 1/j)^p - 1) avoids subtracting two nearly equal large powers
    m[~small] = jb**p * np.expm1(p * np.log1p(1.0 / jb))
    m[0] = 1.0
    g = np.diff(m)
    m.setflags(write=False)
    g.setflags(write=False)
    return WeightTable(alpha=alpha, m=m, g=g)


def stability_margin(alpha: float, tau: float) -> float:
    """Gamma(3 - alpha) - (2^(2 - alpha) - 3) tau^(1 - alpha).

    A nonnegative value certifies the sufficient stability condition of the
    Crank-Nicolson scheme; it holds for every ``tau <= 1``.
    """
    _check_alpha(alpha)
    if not (tau > 0 and math.isfinite(tau)):
        raise ValueError("tau must be positive")
    return gamma(3.0 - alpha) - (2.0 ** (2.0 - alpha) - 3.0) * tau ** (1.0 - alpha)
