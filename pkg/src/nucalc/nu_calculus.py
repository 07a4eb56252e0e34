"""Truncated nu-fractional derivative and integral.

Every operator takes the MLF parameters as an :class:`MLParams` and works
through the scale factor ``C = nu_constant(params)``:

* chain-rule derivative  ``V(g)(t) = C t^{1-mu} g'(t)``
* limit-form derivative  ``lim [g(t S(eps t^-mu)) - g(t)] / eps`` with the
  truncated S-function, estimated on an epsilon schedule
* integral               ``I(g)(t) = C^{-1} ∫_a^t g(x) x^{mu-1} dx``

Functions are anything with ``eval``/``eval_d`` methods (normally a parsed
:class:`~nucalc.expr.FnHandle`); ``eval`` must accept numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError, UnsupportedRegimeError, ValidationError
from .mittag_leffler import SeriesControl, ml3, s_truncated_increment, sum_series
from .quadrature import QuadratureControl, QuadResult, integrate
from .special_functions import CANONICAL, MLParams, gamma_fn, gamma_ratio, nu_constant

__all__ = [
    "EpsilonSchedule",
    "DerivResult",
    "CLOSED_FORM_KINDS",
    "deriv_chain",
    "deriv_limit",
    "deriv_n",
    "integral",
    "compose_deriv",
    "closed_form_deriv",
    "generating_expression",
    "deriv_ml2",
    "deriv_ml2_n",
    "integral_ml2",
    "integral_power_kernel",
    "nth_derivative",
]

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class EpsilonSchedule:
    """Decreasing epsilon values for the limit-form derivative."""

    eps_values: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    extrapolate: bool = True

    def __post_init__(self):
        vals = tuple(float(e) for e in self.eps_values)
        object.__setattr__(self, "eps_values", vals)
        if not vals:
            raise ValidationError("epsilon schedule is empty")
        if any(not (e > 0 and math.isfinite(e)) for e in vals):
            raise ValidationError(f"epsilon values must be positive and finite, got {vals}")
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise ValidationError(f"epsilon values must be strictly decreasing, got {vals}")


# Higher-order derivatives are finite-differenced, so the schedule stays
# coarser to keep differencing noise below the O(eps) bias.
_COARSE_SCHEDULE = EpsilonSchedule((1e-1, 3e-2, 1e-2, 3e-3, 1e-3))


@dataclass(frozen=True)
class DerivResult:
    value: float
    per_eps: list[tuple[float, float]] = field(default_factory=list)
    observed_order: float = math.nan

    def __float__(self) -> float:
        return self.value


def _check_mu(mu: float, upper: float = 1.0) -> float:
    mu = float(mu)
    if not (0.0 < mu <= upper):
        raise DomainError(f"order mu must lie in (0, {upper:g}], got {mu}")
    return mu


def _check_t(t):
    arr = np.asarray(t, dtype=float)
    if not np.all(arr > 0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"t must be positive and finite, got {t!r}")
    return arr


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def deriv_chain(f, t, mu: float, params: MLParams = CANONICAL,
                qctl: QuadratureControl | None = None):
    """Chain-rule form ``C t^{1-mu} f'(t)``; ``t`` may be an array."""
    mu = _check_mu(mu)
    arr = _check_t(t)
    d = np.asarray(f.eval_d(arr).derivative, dtype=float)
    return _out(nu_constant(params, qctl) * arr ** (1.0 - mu) * d)


def _neville_at_zero(x: list[float], y: list[float]) -> float:
    p = list(y)
    n = len(x)
    for m in range(1, n):
        for k in range(n - m):
            p[k] = (x[k + m] * p[k] - x[k] * p[k + 1]) / (x[k + m] - x[k])
    return p[0]


def _slope(eps: list[float], est: list[float], ref: float) -> float:
    pts = [(math.log(e), math.log(abs(d - ref))) for e, d in zip(eps, est) if d != ref]
    if len(pts) < 2:
        return math.nan
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    return float(np.polyfit(xs, ys, 1)[0])


def _limit_estimates(g: Callable[[float], float], t: float, scale: float, i: int,
                     params: MLParams, sched: EpsilonSchedule,
                     qctl: QuadratureControl | None) -> DerivResult:
    # scale * eps is the argument z of the truncated S-function
    g0 = g(t)
    per_eps = []
    for eps in sched.eps_values:
        dt = t * s_truncated_increment(i, params, eps * scale, qctl)
        d = float((g(t + dt) - g0) / eps)
        if not math.isfinite(d):
            raise ConvergenceError(f"difference quotient is not finite at eps={eps}")
        per_eps.append((eps, d))
    eps_list = [e for e, _ in per_eps]
    est = [d for _, d in per_eps]
    if len(est) >= 3:
        diffs = [abs(b - a) for a, b in zip(est, est[1:])]
        size = max(abs(v) for v in est)
        if diffs[-1] > diffs[0] and diffs[-1] > 1e-8 * max(size, 1.0):
            raise ConvergenceError(
                f"limit estimates do not settle across the schedule: {est}", partial=est[-1]
            )
    value = _neville_at_zero(eps_list, est) if sched.extrapolate else est[-1]
    return DerivResult(value, per_eps, _slope(eps_list, est, value))


def _limit_preconditions(params: MLParams, i: int) -> int:
    if params.p != 0:
        raise UnsupportedRegimeError(
            "the limit-form derivative needs p = 0; for p > 0 the truncated S-function "
            "does not equal 1 at eps = 0 (use deriv_chain instead)"
        )
    if int(i) != i or i < 1:
        raise DomainError(
            f"truncation index i must be an integer >= 1 (got {i}); with i = 0 the "
            "S-function is constant and the difference quotient is identically 0"
        )
    return int(i)


def deriv_limit(f, t: float, mu: float, params: MLParams = CANONICAL, i: int = 1,
                sched: EpsilonSchedule | None = None,
                qctl: QuadratureControl | None = None) -> DerivResult:
    """Limit-form derivative estimated over ``sched`` (default 1e-2 ... 1e-6).

    With ``sched.extrapolate`` the reported value is the polynomial
    extrapolant to eps = 0 through all estimates; otherwise it is the
    estimate at the smallest eps.
    """
    mu = _check_mu(mu)
    t = float(_check_t(t))
    i = _limit_preconditions(params, i)
    sched = sched or EpsilonSchedule()
    return _limit_estimates(f.eval, t, t ** (-mu), i, params, sched, qctl)


def nth_derivative(f, x: float, n: int) -> float:
    """``f^{(n)}(x)``: exact for n <= 1, nested central differences of f' above."""
    if n == 0:
        return float(f.eval(x))
    if n == 1:
        return float(f.eval_d(x).derivative)
    h = _EPS ** (1.0 / (n + 1)) * (1.0 + abs(x))

    def diff(k, y):
        if k == 1:
            return float(f.eval_d(y).derivative)
        return (diff(k - 1, y + h) - diff(k - 1, y - h)) / (2.0 * h)

    return diff(n, x)


def deriv_n(f, t: float, mu: float, n: int, params: MLParams = CANONICAL, i: int = 1,
            sched: EpsilonSchedule | None = None,
            qctl: QuadratureControl | None = None) -> DerivResult:
    """n-th order limit-form derivative, ``n < mu <= n+1``.

    Tends to ``C t^{n+1-mu} f^{(n+1)}(t)``.  For n >= 2 the default schedule
    is coarser, since f^{(n)} itself comes from finite differences.
    """
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    n = int(n)
    mu = float(mu)
    if not (n < mu <= n + 1):
        raise DomainError(f"order mu must lie in ({n}, {n + 1}] for n={n}, got {mu}")
    t = float(_check_t(t))
    i = _limit_preconditions(params, i)
    if sched is None:
        sched = _COARSE_SCHEDULE if n >= 2 else EpsilonSchedule()
    return _limit_estimates(lambda x: nth_derivative(f, x, n), t, t ** (n - mu), i,
                            params, sched, qctl)


def _as_vector_fn(f, vectorized: bool):
    if hasattr(f, "eval"):
        return lambda x: np.asarray(f.eval(x), dtype=float)
    if vectorized:
        return lambda x: np.asarray(f(x), dtype=float)
    return lambda x: np.array([float(f(v)) for v in np.ravel(x)]).reshape(np.shape(x))


def integral(f, a: float, t: float, mu: float, params: MLParams = CANONICAL,
             ctl: QuadratureControl | None = None, *, vectorized: bool = True,
             full_output: bool = False):
    """``C^{-1} ∫_a^t f(x) x^{mu-1} dx`` by adaptive Gauss-Kronrod.

    ``f`` is an expression handle or a callable; plain callables must accept
    numpy arrays unless ``vectorized=False``.  For mu < 1 the weight is
    removed by the substitution ``x = s^{1/mu}``.  Any mu > 0 is accepted
    (orders above 1 arise in the two-order composition formula).
    """
    mu = float(mu)
    if not (mu > 0 and math.isfinite(mu)):
        raise DomainError(f"order mu must be positive, got {mu}")
    a = float(a)
    t = float(t)
    if not (a >= 0 and math.isfinite(a) and math.isfinite(t)):
        raise DomainError(f"need finite a >= 0, got a={a}")
    if t < a:
        raise DomainError(f"need t >= a, got a={a}, t={t}")
    ctl = ctl or QuadratureControl()
    if t == a:
        res = QuadResult(0.0, 0.0, 0)
    else:
        g = _as_vector_fn(f, vectorized)
        if mu < 1.0:
            inv = 1.0 / mu
            raw = integrate(lambda s: g(s ** inv), a ** mu, t ** mu, ctl)
            res = QuadResult(raw.value / mu, raw.abs_error / mu, raw.n_evals)
        else:
            res = integrate(lambda x: g(x) * x ** (mu - 1.0), a, t, ctl)
        c = nu_constant(params, ctl)
        res = QuadResult(res.value / c, res.abs_error / c, res.n_evals)
    return res if full_output else res.value


def _second_derivative(f, t: float) -> float:
    h = 1e-5 * (1.0 + abs(t))
    return (float(f.eval_d(t + h).derivative) - float(f.eval_d(t - h).derivative)) / (2.0 * h)


def compose_deriv(f, t: float, mu: float, eta: float, params: MLParams = CANONICAL,
                  qctl: QuadratureControl | None = None) -> float:
    """``V_mu(V_eta f)(t) = C^2 [(1-eta) t^{1-mu-eta} f'(t) + t^{2-mu-eta} f''(t)]``.

    f'' is a central difference of the exact f' with step 1e-5 (1+|t|).
    This is not the single derivative of order mu+eta.
    """
    mu = _check_mu(mu)
    eta = _check_mu(eta)
    t = float(_check_t(t))
    c = nu_constant(params, qctl)
    d1 = float(f.eval_d(t).derivative)
    d2 = _second_derivative(f, t)
    return c * c * ((1.0 - eta) * t ** (1.0 - mu - eta) * d1 + t ** (2.0 - mu - eta) * d2)


CLOSED_FORM_KINDS = (
    "exp_at",
    "sin_at",
    "cos_at",
    "power_a",
    "power_mu_over_mu",
    "eigen_sin",
    "eigen_cos",
    "eigen_exp",
)


def generating_expression(kind: str, a: float, mu: float) -> str:
    """Source text of the function whose derivative ``closed_form_deriv`` gives."""
    a = repr(float(a))
    m = repr(float(mu))
    table = {
        "exp_at": f"exp({a}*t)",
        "sin_at": f"sin({a}*t)",
        "cos_at": f"cos({a}*t)",
        "power_a": f"t^{a}",
        "power_mu_over_mu": f"t^{m}/{m}",
        "eigen_sin": f"sin(t^{m}/{m})",
        "eigen_cos": f"cos(t^{m}/{m})",
        "eigen_exp": f"exp(t^{m}/{m})",
    }
    if kind not in table:
        raise ValidationError(f"unknown closed-form kind {kind!r}; choose from {CLOSED_FORM_KINDS}")
    return table[kind]


def closed_form_deriv(kind: str, a: float, t: float, mu: float,
                      params: MLParams = CANONICAL,
                      qctl: QuadratureControl | None = None) -> float:
    """Closed forms of V for exponentials, sines, powers and the eigenfunctions.

    Signs and exponents follow the chain rule: ``V(cos at) = -C t^{1-mu} a sin(at)``
    and ``V(t^a) = C a t^{a-mu}``.  ``a`` is ignored by the kinds built on
    ``t^mu/mu``.
    """
    generating_expression(kind, a, mu)  # validates kind
    mu = _check_mu(mu)
    t = float(_check_t(t))
    a = float(a)
    c = nu_constant(params, qctl)
    w = t ** (1.0 - mu)
    u = t ** mu / mu
    if kind == "exp_at":
        return c * w * a * math.exp(a * t)
    if kind == "sin_at":
        return c * w * a * math.cos(a * t)
    if kind == "cos_at":
        return -c * w * a * math.sin(a * t)
    if kind == "power_a":
        return c * a * t ** (a - mu)
    if kind == "power_mu_over_mu":
        return c
    if kind == "eigen_sin":
        return c * math.cos(u)
    if kind == "eigen_cos":
        return -c * math.sin(u)
    return c * math.exp(u)


def deriv_ml2(lam: float, delta: float, t: float, mu: float, params: MLParams = CANONICAL,
              ctl: SeriesControl | None = None, qctl: QuadratureControl | None = None) -> float:
    """V of the two-parameter MLF: ``t^{1-mu} C E^2_{lam, lam+delta}(t)``."""
    mu = _check_mu(mu)
    t = float(_check_t(t))
    c = nu_constant(params, qctl)
    return t ** (1.0 - mu) * c * ml3(2.0, lam, lam + delta, t, ctl).value


def deriv_ml2_n(lam: float, delta: float, t: float, mu: float, n: int,
                params: MLParams = CANONICAL, ctl: SeriesControl | None = None,
                qctl: QuadratureControl | None = None) -> float:
    """n-th order V of the two-parameter MLF.

    ``t^{n+1-mu} C Γ(n+2) E^{n+2}_{lam, delta+lam(n+1)}(t)``, i.e.
    ``C t^{n+1-mu}`` times the (n+1)-th ordinary derivative.  The order is
    only required to be positive, so the formula can be probed outside
    ``(n, n+1]``.
    """
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    n = int(n)
    mu = float(mu)
    if not mu > 0:
        raise DomainError(f"order mu must be positive, got {mu}")
    t = float(_check_t(t))
    c = nu_constant(params, qctl)
    e = ml3(n + 2.0, lam, delta + lam * (n + 1), t, ctl).value
    return t ** (n + 1.0 - mu) * c * gamma_fn(n + 2.0) * e


def integral_ml2(lam: float, delta: float, a: float, t: float, mu: float,
                 params: MLParams = CANONICAL, ctl: SeriesControl | None = None,
                 qctl: QuadratureControl | None = None) -> float:
    """Termwise integral ``C^{-1} Σ_k (t^{k+mu} - a^{k+mu}) / ((k+mu) Γ(lam k + delta))``."""
    mu = _check_mu(mu)
    a = float(a)
    t = float(t)
    if not (a >= 0 and t >= a and math.isfinite(t)):
        raise DomainError(f"need 0 <= a <= t, got a={a}, t={t}")
    if t == a:
        return 0.0
    if lam <= 0 or delta <= 0:
        raise DomainError(f"lambda and delta must be positive, got ({lam}, {delta})")

    def term(k):
        num = t ** (k + mu) - (a ** (k + mu) if a > 0 else 0.0)
        g = lam * k + delta
        if g <= 170.0:
            return num / ((k + mu) * math.gamma(g))
        if num == 0.0:
            return 0.0
        return math.copysign(math.exp(math.log(abs(num)) - math.lgamma(g)), num) / (k + mu)

    total = sum_series(term, ctl).value
    return total / nu_constant(params, qctl)


def integral_power_kernel(lam: float, t: float, mu: float, params: MLParams = CANONICAL,
                          qctl: QuadratureControl | None = None) -> float:
    """I of ``x -> (t-x)^lam`` from 0 to t: ``C^{-1} Γ(lam+1)Γ(mu)/Γ(lam+1+mu) t^{lam+mu}``."""
    lam = float(lam)
    if not lam > -1:
        raise DomainError(f"lambda must exceed -1, got {lam}")
    mu = _check_mu(mu)
    t = float(_check_t(t))
    c = nu_constant(params, qctl)
    return gamma_ratio((lam + 1.0, mu), (lam + 1.0 + mu,)) * t ** (lam + mu) / c
