"""Numerical integration back ends.

Two rules live here:

* :func:`integrate` -- globally adaptive 21-point Gauss-Kronrod on a finite
  interval, for general (possibly kinked) integrands.  Integrands must accept
  a 1-D numpy array of abscissae and return an array of the same shape.
* :func:`de_unit_interval` -- double-exponential (tanh-sinh) rule on [0, 1]
  evaluated in log space.  The map supplies ``log u`` and ``log(1-u)``
  directly, so power-type endpoint singularities never lose precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError, ValidationError

__all__ = [
    "QuadratureControl",
    "QuadResult",
    "integrate",
    "de_unit_interval",
]

# Largest step-halving level the tanh-sinh rule will attempt, whatever
# max_levels says; 2**14 * 2T nodes is already far past any sane integrand.
_DE_LEVEL_CAP = 14
_EPS = np.finfo(float).eps

# Kronrod abscissae (descending, last one is the centre) and weights of the
# 10/21-point Gauss-Kronrod pair.
_XK_HALF = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WK_HALF = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG_HALF = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

_XK = np.concatenate([-_XK_HALF[:-1], _XK_HALF[::-1]])
_WK = np.concatenate([_WK_HALF[:-1], _WK_HALF[::-1]])
# Gauss nodes are every other Kronrod node, starting from the second.
_G_IDX = np.array([1, 3, 5, 7, 9, 11, 13, 15, 17, 19])
_WG = np.concatenate([_WG_HALF, _WG_HALF[::-1]])


# per-interval rounding floor of the error estimate, and a memory guard
_FLOOR = 50.0 * _EPS
_MAX_INTERVALS = 50_000


@dataclass(frozen=True)
class QuadratureControl:
    """Accuracy budget for every quadrature in the package.

    ``rel_tol`` is measured against the integral of ``|f|`` so that
    sign-changing integrands with near-zero integrals still terminate.
    ``max_levels`` bounds bisection depth for Gauss-Kronrod and the number of
    step halvings for tanh-sinh (the latter also hard-capped at 14).
    """

    rel_tol: float = 1e-12
    max_levels: int = 30

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-2):
            raise ValidationError(f"rel_tol must lie in (0, 1e-2], got {self.rel_tol}")
        if int(self.max_levels) != self.max_levels or self.max_levels < 1:
            raise ValidationError(f"max_levels must be a positive integer, got {self.max_levels}")


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error: float
    n_evals: int


def _gk_batch(f, lo, hi):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * _XK[None, :]
    with np.errstate(all="ignore"):
        fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise DomainError(f"integrand is not finite at x={bad!r}")
    kron = half * (fx @ _WK)
    gauss = half * (fx[:, _G_IDX] @ _WG)
    resabs = np.abs(half) * (np.abs(fx) @ _WK)
    mean = (fx @ _WK) * 0.5
    resasc = np.abs(half) * (np.abs(fx - mean[:, None]) @ _WK)
    err = np.abs(kron - gauss)
    # QUADPACK error scaling
    with np.errstate(all="ignore"):
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5), err)
    scaled = np.maximum(scaled, _FLOOR * resabs)
    return kron, scaled, resabs


def integrate(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              ctl: QuadratureControl | None = None) -> QuadResult:
    """Globally adaptive Gauss-Kronrod quadrature of ``f`` over ``[a, b]``.

    The interval with the largest error estimate is bisected (in batches)
    until the summed error is at most ``ctl.rel_tol`` times ``∫|f|``.
    Raises :class:`ConvergenceError` if a bisection would exceed
    ``ctl.max_levels``, the interval count would pass 50 000, or ``rel_tol``
    is below the rule's rounding floor.  Raises :class:`DomainError` if
    ``f`` is not finite at a node.
    """
    ctl = ctl or QuadratureControl()
    a = float(a)
    b = float(b)
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    if a > b:
        r = integrate(f, b, a, ctl)
        return QuadResult(-r.value, r.abs_error, r.n_evals)

    lo = np.array([a])
    hi = np.array([b])
    depth = np.array([0])
    kron, err, resabs = _gk_batch(f, lo, hi)
    n_evals = 21
    while True:
        total_err = float(err.sum())
        tol = ctl.rel_tol * float(resabs.sum())
        if total_err <= tol:
            return QuadResult(math.fsum(kron), total_err, n_evals)
        order = np.argsort(-err, kind="stable")
        remaining = total_err - np.cumsum(err[order])
        n_split = int(np.searchsorted(-remaining, -0.5 * tol)) + 1
        pick = order[:n_split]
        if np.all(err[pick] <= _FLOOR * resabs[pick]):
            raise ConvergenceError(
                f"quadrature on [{a}, {b}]: rel_tol={ctl.rel_tol} is below the rounding "
                f"floor of the rule (error estimate {total_err:.3e})",
                partial=math.fsum(kron),
            )
        if np.any(depth[pick] >= ctl.max_levels) or lo.size + n_split > _MAX_INTERVALS:
            raise ConvergenceError(
                f"quadrature on [{a}, {b}] did not reach rel_tol={ctl.rel_tol} "
                f"within {ctl.max_levels} bisection levels (error estimate {total_err:.3e})",
                partial=math.fsum(kron),
            )
        keep = np.ones(lo.size, dtype=bool)
        keep[pick] = False
        mid = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        new_depth = np.concatenate([depth[pick], depth[pick]]) + 1
        k2, e2, r2 = _gk_batch(f, new_lo, new_hi)
        n_evals += 21 * new_lo.size
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        depth = np.concatenate([depth[keep], new_depth])
        kron = np.concatenate([kron[keep], k2])
        err = np.concatenate([err[keep], e2])
        resabs = np.concatenate([resabs[keep], r2])


def _de_terms(log_g, taus):
    s = 0.5 * math.pi * np.sinh(taus)
    log_u = -np.logaddexp(0.0, -2.0 * s)
    log_v = -np.logaddexp(0.0, 2.0 * s)
    with np.errstate(all="ignore"):
        vals = np.exp(log_g(log_u, log_v)) * (math.pi * np.cosh(taus))
    vals = np.where(np.isnan(vals), 0.0, vals)
    if not np.all(np.isfinite(vals)):
        raise DomainError("double-exponential integrand overflowed")
    return vals


def de_unit_interval(log_g: Callable[[np.ndarray, np.ndarray], np.ndarray],
                     ctl: QuadratureControl | None = None,
                     s_max: float = 20.0) -> QuadResult:
    """Tanh-sinh integral over [0, 1] of a function given in log form.

    ``log_g(log_u, log_v)`` must return ``log(f(u) * u * (1 - u))`` with
    ``v = 1 - u``; the ``u(1-u)`` factor is the Jacobian of the
    double-exponential map and usually cancels endpoint singularities.
    ``s_max`` bounds the half-range of the inner variable ``(pi/2) sinh(tau)``;
    choose it so the integrand has decayed to negligibility there.
    """
    ctl = ctl or QuadratureControl()
    t_max = math.asinh(2.0 * s_max / math.pi)
    n0 = int(math.floor(t_max))
    h = 1.0
    total = h * math.fsum(_de_terms(log_g, np.arange(-n0, n0 + 1, dtype=float)))
    n_evals = 2 * n0 + 1
    levels = min(ctl.max_levels, _DE_LEVEL_CAP)
    err = math.inf
    for level in range(1, levels + 1):
        h *= 0.5
        j_max = int(math.floor((t_max / h - 1.0) / 2.0))
        odd = h * (2.0 * np.arange(-j_max - 1, j_max + 1, dtype=float) + 1.0)
        new = 0.5 * total + h * math.fsum(_de_terms(log_g, odd))
        n_evals += odd.size
        err = abs(new - total)
        total = new
        if level >= 3 and err <= ctl.rel_tol * abs(total):
            return QuadResult(total, err, n_evals)
    raise ConvergenceError(
        f"tanh-sinh quadrature did not reach rel_tol={ctl.rel_tol} in {levels} levels "
        f"(last change {err:.3e})",
        partial=total,
    )
