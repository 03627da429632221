r"""Caputo and transformative Caputo (T-Caputo) derivatives of smooth functions.

For an order :math:`n - 1 < \alpha < n` the two derivatives are

.. math::

    D_C^\alpha u(t) = \frac{1}{\Gamma(n - \alpha)}
        \int_0^t u^{(n)}(s) (t - s)^{n - 1 - \alpha} \,\mathrm{d}s,
    \qquad
    D_{TC}^\alpha u(t) = \frac{1}{\Gamma(n + 1 - \alpha)}
        \int_0^t u^{(n + 1)}(s) (t - s)^{n - \alpha} \,\mathrm{d}s,

and they differ by the shift :math:`u^{(n)}(0) t^{n - \alpha} / \Gamma(n + 1 - \alpha)`.
For integer :math:`\alpha = n` the T-Caputo derivative reduces to
:math:`u^{(n)}(t) - u^{(n)}(0)`.

Both integrals are evaluated by product integration: the integrand derivative
is interpolated linearly on uniform panels and integrated exactly against the
power kernel.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from fracmim.special_fn import gamma, lower_incomplete_gamma_regularized


class QuadratureError(RuntimeError):
    """Raised when successive quadrature refinements fail to agree."""


class Regime(enum.Enum):
    SUB_ONE = "sub_one"
    BAND = "band"
    INTEGER = "integer"


@dataclass(frozen=True)
class FractionalOrder:
    """A positive derivative order together with its regime.

    ``n`` is :math:`\\lceil \\alpha \\rceil`, so ``SUB_ONE`` has ``n == 1``,
    ``BAND`` covers :math:`n - 1 < \\alpha < n` for ``n >= 2`` and ``INTEGER``
    is :math:`\\alpha = n` exactly.
    """

    alpha: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"order must be finite and positive, got {self.alpha!r}")

    @property
    def n(self) -> int:
        return math.ceil(self.alpha)

    @property
    def regime(self) -> Regime:
        if self.alpha == self.n:
            return Regime.INTEGER
        if self.alpha < 1:
            return Regime.SUB_ONE
        return Regime.BAND


@dataclass(frozen=True)
class SmoothFunction:
    """A function of time with caller-supplied analytic derivatives.

    ``derivatives[k]`` evaluates :math:`u^{(k)}`, so ``derivatives[0]`` is the
    function itself. All callables must accept numpy arrays.
    """

    derivatives: tuple[Callable[[np.ndarray], np.ndarray], ...]
    name: str = "u"

    def __post_init__(self) -> None:
        if not self.derivatives:
            raise ValueError("at least the function value must be registered")
        object.__setattr__(self, "derivatives", tuple(self.derivatives))

    @property
    def max_order(self) -> int:
        return len(self.derivatives) - 1

    def __call__(self, t):
        return self.derivatives[0](t)

    def derivative(self, k: int) -> Callable[[np.ndarray], np.ndarray]:
        if k > self.max_order:
            raise ValueError(
                f"{self.name}: derivative of order {k} requested, "
                f"only {self.max_order} registered"
            )
        return self.derivatives[k]

    def shifted(self, k: int) -> SmoothFunction:
        """The k-th derivative as a SmoothFunction of its own."""
        self.derivative(k)
        return SmoothFunction(self.derivatives[k:], name=f"{self.name}^({k})")


@dataclass(frozen=True)
class QuadratureConfig:
    panels_per_unit_time: int = 256
    refinement_cap: int = 4
    rel_tol: float = 1e-8

    def __post_init__(self) -> None:
        if self.panels_per_unit_time < 8:
            raise ValueError("panels_per_unit_time must be at least 8")
        if self.refinement_cap < 1:
            raise ValueError("refinement_cap must be positive")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")


# {{{ product integration


def _power_diff(p: float, m: np.ndarray) -> np.ndarray:
    """m**p - (m - 1)**p for integer m >= 1 without cancellation."""
    out = np.ones_like(m, dtype=np.float64)
    big = m > 1
    mb = m[big].astype(np.float64)
    out[big] = -(mb**p) * np.expm1(p * np.log1p(-1.0 / mb))
    return out


@lru_cache(maxsize=64)
def _panel_moments(mu: float, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Kernel moments over the panels v in [m - 1, m], m = 1..size.

    Returns ``(I0, I1)`` with ``I0[m-1] = int v^mu dv`` and
    ``I1[m-1] = int (v - m + 1) v^mu dv``.
    """
    m = np.arange(1, size + 1)
    i0 = _power_diff(mu + 1.0, m) / (mu + 1.0)
    i1 = m.astype(np.float64) ** (mu + 1.0) / (mu + 1.0) - _power_diff(
        mu + 2.0, m
    ) / ((mu + 1.0) * (mu + 2.0))
    i0.setflags(write=False)
    i1.setflags(write=False)
    return i0, i1


def _node_weights(mu: float, n: int) -> np.ndarray:
    """Weights w_j (unit step) of the product rule for int_0^n g(s) (n - s)^mu ds."""
    size = 1 << max(n - 1, 1).bit_length()
    i0, i1 = _panel_moments(float(mu), size)
    i0, i1 = i0[:n], i1[:n]
    # node j lies at distance m = n - j from the evaluation point
    w = np.zeros(n + 1)
    w[: n] += i1[::-1]
    w[1:] += (i0 - i1)[::-1]
    return w


def _product_integral(
    g: Callable[[np.ndarray], np.ndarray], mu: float, t: float, n: int
) -> tuple[float, float]:
    h = t / n
    s = np.linspace(0.0, t, n + 1)
    gs = np.asarray(g(s), dtype=np.float64) * np.ones_like(s)
    w = _node_weights(mu, n)
    scale = h ** (mu + 1.0)
    return scale * float(w @ gs), scale * float(w @ np.abs(gs))


def _error_exponents(mu: float) -> list[float]:
    # smooth part contributes h^2, h^3, ...; the kernel endpoint h^(3+mu), h^(4+mu)
    return sorted({2.0, 3.0, 4.0, 3.0 + mu, 4.0 + mu})


def _kernel_integral(
    g: Callable[[np.ndarray], np.ndarray], mu: float, t: float, cfg: QuadratureConfig
) -> float:
    """int_0^t g(s) (t - s)^mu ds by panel doubling and Richardson extrapolation.

    Each doubling adds a row to the extrapolation table; the value is accepted
    once the best estimates of two successive rows agree to ``rel_tol``.
    """
    exponents = _error_exponents(mu)
    n = max(1, math.ceil(cfg.panels_per_unit_time * t))
    value, _ = _product_integral(g, mu, t, n)
    prev_row = [value]
    for _ in range(cfg.refinement_cap):
        n *= 2
        value, mag = _product_integral(g, mu, t, n)
        row = [value]
        for j, p in enumerate(exponents[: len(prev_row)]):
            row.append(row[j] + (row[j] - prev_row[j]) / (2.0**p - 1.0))
        best, prev_best = row[-1], prev_row[-1]
        if abs(best - prev_best) <= cfg.rel_tol * max(abs(best), mag):
            return best
        prev_row = row
    raise QuadratureError(
        f"kernel integral with exponent {mu} at t={t} did not reach "
        f"rel_tol={cfg.rel_tol} after {cfg.refinement_cap} doublings"
    )


# }}}


def _check_time(t: float) -> None:
    if not (math.isfinite(t) and t > 0):
        raise ValueError(f"evaluation time must be positive, got {t!r}")


def caputo_eval(
    u: SmoothFunction,
    order: FractionalOrder,
    t: float,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Caputo derivative of ``u`` at ``t``."""
    cfg = cfg or QuadratureConfig()
    _check_time(t)
    n = order.n
    un = u.derivative(n)
    if order.regime is Regime.INTEGER:
        return float(un(np.float64(t)))
    mu = n - 1 - order.alpha
    return _kernel_integral(un, mu, t, cfg) / gamma(n - order.alpha)


def tcaputo_eval(
    u: SmoothFunction,
    order: FractionalOrder,
    t: float,
    cfg: QuadratureConfig | None = None,
) -> float:
    """T-Caputo derivative of ``u`` at ``t``.

    Integer orders return :math:`u^{(n)}(t) - u^{(n)}(0)` without quadrature.
    """
    cfg = cfg or QuadratureConfig()
    _check_time(t)
    n = order.n
    if order.regime is Regime.INTEGER:
        un = u.derivative(n)
        return float(un(np.float64(t)) - un(np.float64(0.0)))
    un1 = u.derivative(n + 1)
    mu = n - order.alpha
    return _kernel_integral(un1, mu, t, cfg) / gamma(n + 1 - order.alpha)


def shift_term(un_at_zero: float, order: FractionalOrder, t: float) -> float:
    """Difference Caputo minus T-Caputo for a function with ``u^(n)(0) = un_at_zero``."""
    _check_time(t)
    if order.regime is Regime.INTEGER:
        raise ValueError("the shift term is defined only for non-integer orders")
    n = order.n
    return un_at_zero * t ** (n - order.alpha) / gamma(n + 1 - order.alpha)


# {{{ reference functions


def monomial(p: int, nderiv: int = 6) -> SmoothFunction:
    """t**p with derivatives through order ``nderiv``."""
    if p < 0:
        raise ValueError("monomial power must be non-negative")

    def make(k: int):
        if k > p:
            return lambda t: np.zeros_like(np.asarray(t, dtype=np.float64))
        coeff = math.factorial(p) / math.factorial(p - k)
        return lambda t: coeff * np.asarray(t, dtype=np.float64) ** (p - k)

    return SmoothFunction(tuple(make(k) for k in range(nderiv + 1)), name=f"t^{p}")


def exponential(nderiv: int = 6) -> SmoothFunction:
    return SmoothFunction(tuple(np.exp for _ in range(nderiv + 1)), name="exp")


def _trig(phase: int, nderiv: int, name: str) -> SmoothFunction:
    cycle = (np.sin, np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t))
    return SmoothFunction(
        tuple(cycle[(phase + k) % 4] for k in range(nderiv + 1)), name=name
    )


def sine(nderiv: int = 6) -> SmoothFunction:
    return _trig(0, nderiv, "sin")


def cosine(nderiv: int = 6) -> SmoothFunction:
    return _trig(1, nderiv, "cos")


def reference_closed_form(
    function_id: str, order: FractionalOrder, t: float, p: int | None = None
) -> tuple[float, float]:
    """Closed-form ``(caputo, tcaputo)`` for ``t**p`` (``"monomial"``) or ``e**t``.

    The monomial case holds for any non-integer order; the exponential case
    needs :math:`0 < \\alpha < 1`.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if order.regime is Regime.INTEGER:
        raise ValueError("closed forms are provided for non-integer orders only")
    a = order.alpha
    n = order.n
    if function_id == "monomial":
        if p is None or p < 0:
            raise ValueError("monomial needs a non-negative integer power p")
        if t == 0 or p < n:
            caputo = 0.0
        else:
            caputo = gamma(p + 1) / gamma(p + 1 - a) * t ** (p - a)
        un0 = float(math.factorial(n)) if p == n else 0.0
        shift = un0 * t ** (n - a) / gamma(n + 1 - a) if t > 0 else 0.0
        return caputo, caputo - shift
    if function_id == "exp":
        if order.regime is not Regime.SUB_ONE:
            raise ValueError("the exponential closed form needs 0 < alpha < 1")
        if t == 0:
            return 0.0, 0.0
        caputo = math.exp(t) * lower_incomplete_gamma_regularized(1.0 - a, t)
        return caputo, caputo - t ** (1.0 - a) / gamma(2.0 - a)
    raise ValueError(f"unsupported function id {function_id!r}")


# }}}


@dataclass(frozen=True)
class CurvePoint:
    t: float
    alpha: float
    caputo: float
    tcaputo: float


def agreement_curves(
    function_id: str,
    alphas: Sequence[float],
    t_max: float = 20.0,
    samples: int = 400,
    cfg: QuadratureConfig | None = None,
) -> list[CurvePoint]:
    """Sample Caputo and T-Caputo derivatives of cos (0 < alpha < 1) or
    sin (1 < alpha < 2) on ``samples`` uniform points of (0, t_max].

    Both functions have a vanishing n-th derivative at zero, so the two
    columns coincide.
    """
    if function_id == "cos":
        u, lo, hi = cosine(), 0.0, 1.0
    elif function_id == "sin":
        u, lo, hi = sine(), 1.0, 2.0
    else:
        raise ValueError(f"unsupported function id {function_id!r}")
    if samples < 2:
        raise ValueError("need at least two samples")
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    orders = []
    for a in alphas:
        if not lo < a < hi:
            raise ValueError(f"{function_id} curves need {lo} < alpha < {hi}, got {a}")
        orders.append(FractionalOrder(a))

    rows = []
    times = t_max * np.arange(1, samples + 1) / samples
    for order in orders:
        for t in times:
            t = float(t)
            rows.append(
                CurvePoint(
                    t,
                    order.alpha,
                    caputo_eval(u, order, t, cfg),
                    tcaputo_eval(u, order, t, cfg),
                )
            )
    return rows
