"""Verification battery: manufactured solutions, convergence tables, and the
truncation and stability probes."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from fracmim.frac_deriv import FractionalOrder, QuadratureConfig, SmoothFunction, tcaputo_eval
from fracmim.mim_solver import Grid, Problem, solve
from fracmim.special_fn import gamma, lower_incomplete_gamma_regularized
from fracmim.weights import build_weights


def discrete_l2_norm(v, h: float) -> float:
    """sqrt(sum h v_i^2) over the interior nodes passed in ``v``."""
    v = np.asarray(v, dtype=np.float64)
    return math.sqrt(h * float(v @ v))


# {{{ manufactured problems

# (profile S, S'') for u(x, t) = e^t S(x)
_PROFILES = {
    1: (lambda x: np.sin(np.pi * x), lambda x: -np.pi**2 * np.sin(np.pi * x)),
    2: (lambda x: x**2 * (1 - x) ** 2, lambda x: 2 - 12 * x + 12 * x**2),
}


def manufactured_source(example_id: int, alpha: float) -> Problem:
    """Problem on [0, 1] x [0, 1] with exact solution e^t sin(pi x) (example 1)
    or e^t x^2 (1 - x)^2 (example 2).

    The Caputo derivative of e^t is e^t P(1 - alpha, t), so
    ``f = e^t (S (1 + P(1 - alpha, t)) - S'')``.
    """
    try:
        S, Sxx = _PROFILES[example_id]
    except KeyError:
        raise ValueError(f"unknown example {example_id!r}; expected 1 or 2") from None
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    a = 1.0 - alpha

    def source(x, t):
        caputo = lower_incomplete_gamma_regularized(a, t)
        return math.exp(t) * (S(x) * (1.0 + caputo) - Sxx(x))

    def exact(x, t):
        return math.exp(t) * S(x)

    return Problem(
        length=1.0,
        horizon=1.0,
        alpha=alpha,
        phi=S,
        source=source,
        phi_xx=Sxx,
        exact=exact,
    )


def zero_problem(alpha: float = 0.5) -> Problem:
    return Problem(alpha=alpha)


# }}}


# {{{ convergence


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    tau: float
    error: float
    rate: float | None
    max_time_error: float


@dataclass
class ConvergenceReport:
    alpha: float
    refine_axis: str
    rows: list[ConvergenceRow] = field(default_factory=list)

    @property
    def errors(self) -> list[float]:
        return [r.error for r in self.rows]

    @property
    def rates(self) -> list[float | None]:
        return [r.rate for r in self.rows]


def observed_rate(e_coarse: float, e_fine: float, step_coarse: float, step_fine: float) -> float:
    return math.log(e_coarse / e_fine) / math.log(step_coarse / step_fine)


def final_time_errors(problem: Problem, grid: Grid) -> tuple[float, float]:
    """(L2 error at T, max over levels of the L2 error)."""
    if problem.exact is None:
        raise ValueError("problem has no exact solution")
    history = solve(problem, grid)
    x = grid.x
    errs = [
        discrete_l2_norm(history.levels[k, 1:-1] - problem.exact(x[1:-1], t), grid.h)
        for k, t in enumerate(grid.t)
    ]
    return errs[-1], max(errs)


def convergence_study(
    example: int | Problem,
    alpha: float,
    refine_axis: str,
    fixed_step: float,
    steps: Sequence[float],
) -> ConvergenceReport:
    """Solve once per entry of ``steps`` and tabulate errors and observed rates.

    ``refine_axis="time"`` varies tau with h fixed at ``fixed_step``;
    ``"space"`` varies h with tau fixed.
    """
    if refine_axis not in ("space", "time"):
        raise ValueError("refine_axis must be 'space' or 'time'")
    steps = list(steps)
    if not steps:
        raise ValueError("need at least one step size")
    if any(b >= a for a, b in zip(steps, steps[1:])):
        raise ValueError("steps must be strictly decreasing")
    problem = manufactured_source(example, alpha) if isinstance(example, int) else example

    report = ConvergenceReport(alpha=problem.alpha, refine_axis=refine_axis)
    prev = None
    for step in steps:
        h, tau = (step, fixed_step) if refine_axis == "space" else (fixed_step, step)
        grid = Grid.from_steps(h, tau, problem.length, problem.horizon)
        err, max_err = final_time_errors(problem, grid)
        rate = None
        if prev is not None:
            rate = observed_rate(prev[1], err, prev[0], step)
        report.rows.append(ConvergenceRow(grid.h, grid.tau, err, rate, max_err))
        prev = (step, err)
    return report


# }}}


# {{{ truncation probe


@dataclass(frozen=True)
class TruncationRow:
    tau: float
    error: float
    order: float | None


@dataclass
class TruncationReport:
    alpha: float
    t_eval: float
    rows: list[TruncationRow] = field(default_factory=list)


def discrete_tcaputo(u_samples: np.ndarray, u_prime0: float, alpha: float, tau: float) -> float:
    """Discrete T-Caputo operator at t_{k+1/2} from samples u^0..u^{k+1}.

    Evaluates ``beta [M_0 d^{k+1} - sum_j (M_{k-j} - M_{k-j+1}) d^j - M_k psi]``
    with ``d^j = (u^j - u^{j-1}) / tau`` and ``psi = u'(0)``.
    """
    k = len(u_samples) - 2
    if k < 0:
        raise ValueError("need at least two samples")
    w = build_weights(alpha, k + 2)
    d = np.diff(u_samples) / tau
    m = w.m
    total = m[0] * d[k]
    if k >= 1:
        j = np.arange(1, k + 1)
        total -= float((m[k - j] - m[k - j + 1]) @ d[j - 1])
    total -= m[k] * u_prime0
    return tau ** (1.0 - alpha) / gamma(3.0 - alpha) * total


def truncation_probe(
    alpha: float,
    probe: SmoothFunction,
    t_eval: float,
    taus: Sequence[float],
    cfg: QuadratureConfig | None = None,
) -> TruncationReport:
    """Compare the discrete operator on exact samples with the continuous
    T-Caputo derivative at ``t_eval = (k + 1/2) tau`` for each tau."""
    if probe.max_order < 2:
        raise ValueError("probe must register at least two derivatives")
    order = FractionalOrder(alpha)
    if order.regime.name != "SUB_ONE":
        raise ValueError("alpha must lie in (0, 1)")
    cfg = cfg or QuadratureConfig(rel_tol=1e-12)
    reference = tcaputo_eval(probe, order, t_eval, cfg)
    u_prime0 = float(probe.derivative(1)(np.float64(0.0)))

    report = TruncationReport(alpha=alpha, t_eval=t_eval)
    prev = None
    for tau in taus:
        half = t_eval / tau - 0.5
        k = round(half)
        if k < 0 or abs(half - k) > 1e-9 * max(1.0, half):
            raise ValueError(f"t_eval={t_eval} is not a half-step point of tau={tau}")
        samples = np.asarray(probe(tau * np.arange(k + 2)), dtype=np.float64)
        err = abs(discrete_tcaputo(samples, u_prime0, alpha, tau) - reference)
        rate = None
        if prev is not None and err > 0 and prev[1] > 0:
            rate = observed_rate(prev[1], err, prev[0], tau)
        report.rows.append(TruncationRow(tau, err, rate))
        prev = (tau, err)
    return report


def half_step_taus(t_eval: float, count: int, start: int = 1) -> list[float]:
    """tau = 2 t_eval / 3^i, each placing t_eval on a half step."""
    return [2.0 * t_eval / 3**i for i in range(start, start + count)]


# }}}


# {{{ stability probe


@dataclass(frozen=True)
class StabilityReport:
    alpha: float
    M: int
    N: int
    tau: float
    max_ratio: float
    ratios: np.ndarray


def stability_probe(alpha: float, grid: Grid, perturbation_seed: int, scale: float = 1.0) -> StabilityReport:
    """Growth of an initial-data perturbation under the homogeneous scheme.

    Both runs use f = 0 and share psi (the perturbation is piecewise linear
    in x, so its second derivative vanishes), hence the difference of the two
    solutions follows the perturbation recursion exactly. ``scale=0`` gives
    identical runs and a ratio of 0 by convention.
    """
    rng = np.random.default_rng(perturbation_seed)
    x = grid.x
    base_nodes = np.zeros(grid.M + 1)
    base_nodes[1:-1] = rng.standard_normal(grid.M - 1)
    pert_nodes = np.zeros(grid.M + 1)
    pert_nodes[1:-1] = scale * rng.standard_normal(grid.M - 1)

    def node_fn(values):
        return lambda s: np.interp(s, x, values)

    def flat(s):
        return np.zeros_like(s)

    runs = []
    for values in (base_nodes, base_nodes + pert_nodes):
        problem = Problem(grid.length, grid.horizon, alpha, phi=node_fn(values), phi_xx=flat)
        runs.append(solve(problem, grid).levels)
    rho = runs[1][:, 1:-1] - runs[0][:, 1:-1]
    norms = np.sqrt(grid.h * np.sum(rho * rho, axis=1))
    if norms[0] == 0.0:
        ratios = np.zeros_like(norms)
    else:
        ratios = norms / norms[0]
    return StabilityReport(alpha, grid.M, grid.N, grid.tau, float(np.max(ratios[1:], initial=0.0)), ratios)


# }}}
