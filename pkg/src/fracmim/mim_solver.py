r"""Crank-Nicolson finite differences for the fractional mobile/immobile model

.. math::

    u_t + D_C^\alpha u = u_{xx} + f, \qquad 0 < \alpha < 1,

on :math:`[0, L] \times [0, T]` with :math:`u(x, 0) = \phi(x)` and homogeneous
Dirichlet data. The Caputo term is rewritten through the T-Caputo derivative
plus the shift :math:`\psi(x) t^{1-\alpha} / \Gamma(2 - \alpha)`, where
:math:`\psi = \phi_{xx} + f(\cdot, 0)` is the initial time derivative.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from fracmim.special_fn import gamma
from fracmim.weights import WeightTable, build_weights, stability_margin

SpaceFn = Callable[[np.ndarray], np.ndarray]
SourceFn = Callable[[np.ndarray, float], np.ndarray]


class PivotBreakdownError(ArithmeticError):
    """A forward-elimination pivot vanished in the tridiagonal solve."""


def _zero_source(x, t):
    return np.zeros_like(x)


@dataclass(frozen=True)
class Problem:
    """Model data. ``source(x, t)`` and ``exact(x, t)`` take a node array and a scalar time."""

    length: float = 1.0
    horizon: float = 1.0
    alpha: float = 0.5
    phi: SpaceFn = np.zeros_like
    source: SourceFn = _zero_source
    phi_xx: SpaceFn | None = None
    exact: SourceFn | None = None

    def __post_init__(self) -> None:
        if not (self.length > 0 and self.horizon > 0):
            raise ValueError("length and horizon must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        ends = np.asarray(self.phi(np.array([0.0, self.length])), dtype=np.float64)
        scale = max(1.0, float(np.max(np.abs(self.phi(np.linspace(0, self.length, 17))))))
        if np.any(np.abs(ends) > 1e-12 * scale):
            raise ValueError("initial data must vanish at both ends of the domain")


@dataclass(frozen=True)
class Grid:
    M: int
    N: int
    length: float = 1.0
    horizon: float = 1.0

    def __post_init__(self) -> None:
        if self.M < 2:
            raise ValueError("need at least two spatial intervals")
        if self.N < 1:
            raise ValueError("need at least one time step")

    @classmethod
    def for_problem(cls, problem: Problem, M: int, N: int) -> Grid:
        return cls(M, N, problem.length, problem.horizon)

    @classmethod
    def from_steps(cls, h: float, tau: float, length: float = 1.0, horizon: float = 1.0) -> Grid:
        """Grid with the given step sizes, which must divide the domain evenly."""
        M = round(length / h)
        N = round(horizon / tau)
        if abs(M * h - length) > 1e-12 * length or abs(N * tau - horizon) > 1e-12 * horizon:
            raise ValueError(f"steps h={h}, tau={tau} do not divide the domain evenly")
        return cls(M, N, length, horizon)

    @property
    def h(self) -> float:
        return self.length / self.M

    @property
    def tau(self) -> float:
        return self.horizon / self.N

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.M + 1)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.N + 1)


@dataclass
class TridiagonalSystem:
    """``lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]``.

    ``lower[0]`` and ``upper[-1]`` are ignored.
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray

    def is_diagonally_dominant(self) -> bool:
        off = np.abs(self.lower).copy()
        off[0] = 0.0
        up = np.abs(self.upper).copy()
        up[-1] = 0.0
        return bool(np.all(np.abs(self.diag) > off + up))

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag.astype(np.float64))
        a += np.diag(self.lower[1:], -1) + np.diag(self.upper[:-1], 1)
        return a


@dataclass
class SolutionHistory:
    """All time levels ``levels[k]`` over nodes 0..M; only the first ``filled`` are valid."""

    levels: np.ndarray
    psi: np.ndarray
    filled: int = 1

    def level(self, k: int) -> np.ndarray:
        if not 0 <= k < self.filled:
            raise IndexError(f"time level {k} not available (have {self.filled})")
        return self.levels[k]

    @property
    def final(self) -> np.ndarray:
        return self.levels[self.filled - 1]


def compute_psi(problem: Problem, grid: Grid) -> np.ndarray:
    """psi = phi_xx + f(., 0) at interior nodes."""
    x = grid.x
    if problem.phi_xx is not None:
        phi_xx = np.asarray(problem.phi_xx(x[1:-1]), dtype=np.float64)
    else:
        phi = np.asarray(problem.phi(x), dtype=np.float64)
        phi_xx = (phi[2:] - 2.0 * phi[1:-1] + phi[:-2]) / grid.h**2
    f0 = np.asarray(problem.source(x[1:-1], 0.0), dtype=np.float64)
    return phi_xx * np.ones(grid.M - 1) + f0


def initial_history(problem: Problem, grid: Grid) -> SolutionHistory:
    levels = np.zeros((grid.N + 1, grid.M + 1))
    levels[0] = problem.phi(grid.x)
    return SolutionHistory(levels, compute_psi(problem, grid))


def assemble_step(
    k: int,
    history: SolutionHistory,
    weights: WeightTable,
    problem: Problem,
    grid: Grid,
) -> TridiagonalSystem:
    """Linear system for level k+1 given levels 0..k."""
    if weights.count < grid.N:
        raise ValueError(f"weights hold {weights.count} entries, need {grid.N}")
    alpha, tau, h = problem.alpha, grid.tau, grid.h
    uk = history.level(k)
    history.level(0)
    beta = tau ** (1.0 - alpha) / gamma(3.0 - alpha)
    r = tau / (2.0 * h * h)
    n = grid.M - 1

    lower = np.full(n, -r)
    upper = np.full(n, -r)
    diag = np.full(n, 2.0 * r + 1.0 + beta)

    rhs = r * (uk[2:] + uk[:-2]) + (1.0 - 2.0 * r + beta) * uk[1:-1]
    if k >= 1:
        g = weights.g
        rhs -= beta * g[0] * uk[1:-1]
        rhs += beta * g[k - 1] * history.levels[0, 1:-1]
        if k >= 2:
            # coefficient of U^j is G_{k-j} - G_{k-j+1}, j = 1..k-1 ascending
            idx = k - np.arange(1, k)
            coef = g[idx - 1] - g[idx]
            rhs += beta * (coef @ history.levels[1:k, 1:-1])
    t_half = (k + 0.5) * tau
    x = grid.x[1:-1]
    psi = history.psi
    rhs += tau * beta * weights.m[k] * psi
    rhs += tau * np.asarray(problem.source(x, t_half), dtype=np.float64)
    rhs -= tau * psi * t_half ** (1.0 - alpha) / gamma(2.0 - alpha)
    return TridiagonalSystem(lower, diag, upper, rhs)


def thomas_solve(system: TridiagonalSystem) -> np.ndarray:
    """Solve a tridiagonal system by forward elimination and back substitution."""
    a = system.lower.tolist()
    b = system.diag.tolist()
    c = system.upper.tolist()
    d = system.rhs.tolist()
    n = len(b)
    cp = [0.0] * n
    dp = [0.0] * n
    piv = b[0]
    if abs(piv) < 1e-300:
        raise PivotBreakdownError("zero pivot at row 0")
    cp[0] = c[0] / piv
    dp[0] = d[0] / piv
    for i in range(1, n):
        piv = b[i] - a[i] * cp[i - 1]
        if abs(piv) < 1e-300:
            raise PivotBreakdownError(f"zero pivot at row {i}")
        cp[i] = c[i] / piv
        dp[i] = (d[i] - a[i] * dp[i - 1]) / piv
    x = [0.0] * n
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return np.array(x)


def solve(
    problem: Problem,
    grid: Grid,
    on_system: Callable[[int, TridiagonalSystem], None] | None = None,
) -> SolutionHistory:
    """March the scheme from level 0 to level N.

    ``on_system(k, system)`` is called with every assembled system, which
    lets tests inspect the per-step matrices.
    """
    if not (
        math.isclose(grid.length, problem.length, rel_tol=1e-12)
        and math.isclose(grid.horizon, problem.horizon, rel_tol=1e-12)
    ):
        raise ValueError("grid and problem disagree on the domain")
    margin = stability_margin(problem.alpha, grid.tau)
    if margin < 0:
        warnings.warn(
            f"tau={grid.tau} violates the sufficient stability condition "
            f"(margin {margin:.3e})",
            RuntimeWarning,
            stacklevel=2,
        )
    weights = build_weights(problem.alpha, max(grid.N, 1))
    history = initial_history(problem, grid)
    for k in range(grid.N):
        system = assemble_step(k, history, weights, problem, grid)
        if on_system is not None:
            on_system(k, system)
        history.levels[k + 1, 1:-1] = thomas_solve(system)
        history.filled = k + 2
    return history
