"""The six variable-order fractional operators on an interval, plus the
partial (two-variable) versions obtained by freezing the other coordinate.

Conventions, applied uniformly through :class:`SingularKernelSpec`:

* left kernels read the order as alpha(t, tau), right kernels as
  alpha(tau, t) -- the argument transposition lives in the quadrature
  engine and nowhere else;
* Riemann-Liouville derivatives differentiate the order-(1 - alpha)
  integral in its free endpoint; the derivative is taken with a 5-point
  central stencil whose step shrinks proportionally to the distance from
  the weakly singular endpoint (the integral's derivatives blow up there,
  and a fixed step would lose all accuracy), falling back to one-sided
  4th-order stencils against the opposite, regular endpoint;
* Caputo derivatives apply the order-(1 - alpha) integral to df/dtau,
  using the analytic derivative when available and a finite-difference
  fallback otherwise;
* at an empty range, integrals and Caputo derivatives return 0 by
  continuity while Riemann-Liouville derivatives raise, their limit being
  genuinely undefined.

All operations are pure; grid evaluation may fan points out across
threads as long as the supplied callables are safe to call concurrently.
"""

from __future__ import annotations

import enum
from typing import Optional

import numpy as np

from .domain import Rect2, SmoothFn1, SmoothFn2, VariableOrder
from .errors import DomainError
from .parallel import map_ordered
from .quadrature import (DEFAULT_QUAD, QuadConfig, Side, SingularKernelSpec,
                         WeightShift, singular_integral)

# step = min(h, _STEP_DISTANCE_FRACTION * distance-to-singular-endpoint)
_STEP_DISTANCE_FRACTION = 0.1
_DEFAULT_STEP_FRACTION = 1e-4


class OpKind(enum.Enum):
    I_LEFT = "I_left"
    I_RIGHT = "I_right"
    D_RL_LEFT = "D_rl_left"
    D_RL_RIGHT = "D_rl_right"
    D_CAP_LEFT = "D_cap_left"
    D_CAP_RIGHT = "D_cap_right"


def left_rl_integral(f, alpha: VariableOrder, a: float, t: float,
                     cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """Left Riemann-Liouville integral of variable order at t.

    Integral over [a, t] of (t - tau)**(alpha(t, tau) - 1) / Gamma(alpha(t, tau)) * f(tau).
    """
    f = SmoothFn1.wrap(f)
    if t < a:
        raise DomainError(f"left integral needs t >= a, got t={t}, a={a}")
    spec = SingularKernelSpec(alpha, Side.LEFT, WeightShift.INTEGRAL)
    return singular_integral(spec, f.value, a, t, cfg)


def right_rl_integral(f, alpha: VariableOrder, t: float, b: float,
                      cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """Right Riemann-Liouville integral of variable order at t.

    Integral over [t, b] of (tau - t)**(alpha(tau, t) - 1) / Gamma(alpha(tau, t)) * f(tau);
    note the transposed order arguments.
    """
    f = SmoothFn1.wrap(f)
    if t > b:
        raise DomainError(f"right integral needs t <= b, got t={t}, b={b}")
    spec = SingularKernelSpec(alpha, Side.RIGHT, WeightShift.INTEGRAL)
    return singular_integral(spec, f.value, t, b, cfg)


def _stencil_derivative(F, t: float, lo: float, hi: float, h: float,
                        dist_to_singular: float) -> float:
    """d/dt of a field F with algebraic endpoint behaviour, 4th order."""
    if h <= 0.0:
        raise DomainError(f"stencil step must be positive, got {h}")
    h_eff = min(h, _STEP_DISTANCE_FRACTION * dist_to_singular)
    if h_eff <= 0.0:
        raise DomainError("evaluation point coincides with the singular endpoint")
    if t - 2.0 * h_eff >= lo and t + 2.0 * h_eff <= hi:
        return (F(t - 2 * h_eff) - 8.0 * F(t - h_eff)
                + 8.0 * F(t + h_eff) - F(t + 2 * h_eff)) / (12.0 * h_eff)
    if t + 4.0 * h_eff <= hi:
        return (-25.0 * F(t) + 48.0 * F(t + h_eff) - 36.0 * F(t + 2 * h_eff)
                + 16.0 * F(t + 3 * h_eff) - 3.0 * F(t + 4 * h_eff)) / (12.0 * h_eff)
    if t - 4.0 * h_eff >= lo:
        return (25.0 * F(t) - 48.0 * F(t - h_eff) + 36.0 * F(t - 2 * h_eff)
                - 16.0 * F(t - 3 * h_eff) + 3.0 * F(t - 4 * h_eff)) / (12.0 * h_eff)
    raise DomainError(
        f"no 5-point stencil of step {h_eff:.3e} fits inside [{lo}, {hi}] at t={t}; "
        f"reduce the step h"
    )


def left_rl_derivative(f, alpha: VariableOrder, a: float, t: float,
                       cfg: QuadConfig = DEFAULT_QUAD, h: Optional[float] = None) -> float:
    """Left Riemann-Liouville derivative: d/dt of the left (1 - alpha)-integral."""
    f = SmoothFn1.wrap(f)
    if t <= a:
        raise DomainError(f"left RL derivative is undefined for t <= a (t={t}, a={a})")
    if h is None:
        h = alpha.domain.length * _DEFAULT_STEP_FRACTION
    spec = SingularKernelSpec(alpha, Side.LEFT, WeightShift.DERIVATIVE)
    F = lambda x: singular_integral(spec, f.value, a, x, cfg)
    return _stencil_derivative(F, t, lo=a, hi=alpha.domain.b, h=h, dist_to_singular=t - a)


def right_rl_derivative(f, alpha: VariableOrder, t: float, b: float,
                        cfg: QuadConfig = DEFAULT_QUAD, h: Optional[float] = None) -> float:
    """Right Riemann-Liouville derivative: -d/dt of the right (1 - alpha)-integral."""
    f = SmoothFn1.wrap(f)
    if t >= b:
        raise DomainError(f"right RL derivative is undefined for t >= b (t={t}, b={b})")
    if h is None:
        h = alpha.domain.length * _DEFAULT_STEP_FRACTION
    spec = SingularKernelSpec(alpha, Side.RIGHT, WeightShift.DERIVATIVE)
    F = lambda x: singular_integral(spec, f.value, x, b, cfg)
    return -_stencil_derivative(F, t, lo=alpha.domain.a, hi=b, h=h, dist_to_singular=b - t)


def left_caputo_derivative(f, alpha: VariableOrder, a: float, t: float,
                           cfg: QuadConfig = DEFAULT_QUAD, *,
                           allow_fd_derivative: bool = True) -> float:
    """Left Caputo derivative: left (1 - alpha)-integral applied to df/dtau."""
    f = SmoothFn1.wrap(f)
    if t < a:
        raise DomainError(f"left Caputo derivative needs t >= a, got t={t}, a={a}")
    if t == a:
        return 0.0
    dfn, _ = f.derivative_callable(alpha.domain, allow_fd_derivative)
    spec = SingularKernelSpec(alpha, Side.LEFT, WeightShift.DERIVATIVE)
    return singular_integral(spec, dfn, a, t, cfg)


def right_caputo_derivative(f, alpha: VariableOrder, t: float, b: float,
                            cfg: QuadConfig = DEFAULT_QUAD, *,
                            allow_fd_derivative: bool = True) -> float:
    """Right Caputo derivative: minus the right (1 - alpha)-integral of df/dtau."""
    f = SmoothFn1.wrap(f)
    if t > b:
        raise DomainError(f"right Caputo derivative needs t <= b, got t={t}, b={b}")
    if t == b:
        return 0.0
    dfn, _ = f.derivative_callable(alpha.domain, allow_fd_derivative)
    spec = SingularKernelSpec(alpha, Side.RIGHT, WeightShift.DERIVATIVE)
    return -singular_integral(spec, dfn, t, b, cfg)


def partial_op(kind: OpKind, axis: int, f, alpha: VariableOrder,
               p: tuple[float, float], rect: Rect2,
               cfg: QuadConfig = DEFAULT_QUAD, h: Optional[float] = None, *,
               allow_fd_derivative: bool = True) -> float:
    """Partial variable-order operator along one axis of a rectangle.

    Freezes the other coordinate of ``f``, forms the one-variable section,
    and delegates to the matching one-variable operator; by construction
    this is exactly the partial operator definition.
    """
    if axis not in (1, 2):
        raise DomainError(f"axis must be 1 or 2, got {axis}")
    kind = OpKind(kind)
    f2 = SmoothFn2.wrap(f)
    interval = rect.axis(axis)
    ti = p[axis - 1]
    frozen = p[1] if axis == 1 else p[0]
    if not interval.contains(ti):
        raise DomainError(f"coordinate {ti} leaves [{interval.a}, {interval.b}] along axis {axis}")
    section = f2.section(axis, frozen, rect, allow_fd_derivative)

    if kind is OpKind.I_LEFT:
        return left_rl_integral(section, alpha, interval.a, ti, cfg)
    if kind is OpKind.I_RIGHT:
        return right_rl_integral(section, alpha, ti, interval.b, cfg)
    if kind is OpKind.D_RL_LEFT:
        return left_rl_derivative(section, alpha, interval.a, ti, cfg, h)
    if kind is OpKind.D_RL_RIGHT:
        return right_rl_derivative(section, alpha, ti, interval.b, cfg, h)
    if kind is OpKind.D_CAP_LEFT:
        return left_caputo_derivative(section, alpha, interval.a, ti, cfg,
                                      allow_fd_derivative=allow_fd_derivative)
    return right_caputo_derivative(section, alpha, ti, interval.b, cfg,
                                   allow_fd_derivative=allow_fd_derivative)


def eval_on_grid(op, points, threads: int = 1) -> np.ndarray:
    """Evaluate a scalar operation at many points, optionally in parallel.

    Results come back in input order regardless of thread count, so output
    is deterministic.
    """
    return np.array(map_ordered(op, list(points), threads), dtype=float)
