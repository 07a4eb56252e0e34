"""Series evaluation of the Mittag-Leffler family.

Infinite series stop after ``tail_streak`` consecutive terms that are
negligible relative to the running sum; the finite truncated forms are plain
sums and carry no convergence machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import ConvergenceError, DomainError, ValidationError
from .quadrature import QuadratureControl
from .special_functions import (
    MLParams,
    beta_fn,
    extended_beta,
    gamma_fn,
    gamma_ratio,
)

__all__ = [
    "SeriesControl",
    "SeriesResult",
    "ml1",
    "ml2",
    "ml3",
    "ml_extended",
    "ml_extended_gen",
    "ml_truncated",
    "s_truncated",
    "s_truncated_increment",
    "sum_series",
]

_EPS = 2.220446049250313e-16
# Per-term relative error of a directly evaluated term (pow, gamma, a few
# products); enters the rounding allowance of tail_estimate.
_TERM_ULPS = 16.0


@dataclass(frozen=True)
class SeriesControl:
    rel_tol: float = 1e-15
    max_terms: int = 1000
    tail_streak: int = 3

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-2):
            raise ValidationError(f"rel_tol must lie in (0, 1e-2], got {self.rel_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValidationError(f"max_terms must be a positive integer, got {self.max_terms}")
        if int(self.tail_streak) != self.tail_streak or self.tail_streak < 1:
            raise ValidationError(f"tail_streak must be a positive integer, got {self.tail_streak}")


@dataclass(frozen=True)
class SeriesResult:
    """Converged partial sum.

    ``tail_estimate`` bounds the discarded tail (geometric extrapolation of
    the last term ratio) plus a floating-point allowance for the retained
    terms.
    """

    value: float
    terms_used: int
    tail_estimate: float

    def __float__(self) -> float:
        return self.value


def sum_series(term: Callable[[int], float], ctl: SeriesControl | None = None,
               coef_rel_err: float = 0.0) -> SeriesResult:
    """Sum ``term(0) + term(1) + ...`` under the stopping rule of ``ctl``.

    ``coef_rel_err`` is an extra relative error carried by each term (for
    instance from quadrature-evaluated coefficients); it is folded into
    ``tail_estimate``.
    """
    ctl = ctl or SeriesControl()
    terms: list[float] = []
    abs_sum = 0.0
    streak = 0
    prev = None
    for n in range(ctl.max_terms):
        t = float(term(n))
        if not math.isfinite(t):
            raise ConvergenceError(f"series term {n} is not finite", partial=math.fsum(terms))
        terms.append(t)
        abs_sum += abs(t)
        total = math.fsum(terms)
        if abs(t) <= ctl.rel_tol * abs(total):
            streak += 1
        else:
            streak = 0
        if streak >= ctl.tail_streak:
            if prev is not None and prev != 0.0 and abs(t / prev) < 1.0:
                r = abs(t / prev)
                tail = abs(t) * r / (1.0 - r)
            else:
                tail = abs(t) * ctl.tail_streak
            rounding = (_TERM_ULPS * _EPS + coef_rel_err) * abs_sum + _EPS * abs(total)
            return SeriesResult(total, n + 1, tail + rounding)
        prev = t
    raise ConvergenceError(
        f"series did not converge within max_terms={ctl.max_terms}", partial=math.fsum(terms)
    )


def _power_over_gamma(z: float, n: int, g_arg: float) -> float:
    """z**n / Γ(g_arg), falling back to log space when either part overflows."""
    if n == 0:
        return 1.0 / gamma_fn(g_arg)
    if z == 0.0:
        return 0.0
    log_abs = n * math.log(abs(z))
    if g_arg <= 170.0 and log_abs < 700.0:
        return z ** n / math.gamma(g_arg)
    sign = -1.0 if (z < 0 and n % 2) else 1.0
    return sign * math.exp(log_abs - math.lgamma(g_arg))


def _check_positive(**kw):
    for name, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be a positive finite number, got {v}")


def ml3(rho: float, lam: float, delta: float, z: float,
        ctl: SeriesControl | None = None) -> SeriesResult:
    """Three-parameter (Prabhakar) MLF Σ (ρ)_n zⁿ / (Γ(λn+δ) n!)."""
    _check_positive(rho=rho, lam=lam, delta=delta)
    z = float(z)
    ratio = [1.0]  # (rho)_n / n!, built by recurrence

    def term(n):
        if n >= len(ratio):
            ratio.append(ratio[-1] * (rho + n - 1) / n)
        return ratio[n] * _power_over_gamma(z, n, lam * n + delta)

    return sum_series(term, ctl)


def ml2(lam: float, delta: float, z: float, ctl: SeriesControl | None = None) -> SeriesResult:
    """Two-parameter MLF E_{λ,δ}(z)."""
    return ml3(1.0, lam, delta, z, ctl)


def ml1(alpha: float, z: float, ctl: SeriesControl | None = None) -> SeriesResult:
    """Classic one-parameter MLF E_α(z) = Σ zⁿ/Γ(αn+1)."""
    return ml3(1.0, alpha, 1.0, z, ctl)


class _ExtendedCoefficients:
    """Coefficients B_p(ν+n, c-ν)(c)_n / (B(ν, c-ν) Γ(θn+ϑ) n!)."""

    def __init__(self, theta, vartheta, nu, c, p, qctl):
        _check_positive(theta=theta, vartheta=vartheta, nu=nu)
        if not c > nu:
            raise DomainError(f"need c > nu, got c={c}, nu={nu}")
        if not p >= 0:
            raise DomainError(f"need p >= 0, got {p}")
        self.theta, self.vartheta, self.nu, self.c, self.p = theta, vartheta, nu, c, p
        self.qctl = qctl or QuadratureControl()
        self.b0 = beta_fn(nu, c - nu)
        self._rising = [1.0]  # (c)_n / n!

    def beta_ratio(self, n: int) -> float:
        return extended_beta(self.nu + n, self.c - self.nu, self.p, self.qctl) / self.b0

    def rising(self, n: int) -> float:
        while len(self._rising) <= n:
            k = len(self._rising)
            self._rising.append(self._rising[-1] * (self.c + k - 1) / k)
        return self._rising[n]

    def term(self, n: int, z: float) -> float:
        return self.beta_ratio(n) * self.rising(n) * _power_over_gamma(z, n, self.theta * n + self.vartheta)


def ml_extended(theta: float, vartheta: float, nu: float, c: float, p: float, x: float,
                ctl: SeriesControl | None = None,
                qctl: QuadratureControl | None = None) -> SeriesResult:
    """Extended MLF Σ B_p(ν+n, c-ν)(c)_n xⁿ / (B(ν, c-ν) Γ(θn+ϑ) n!)."""
    coef = _ExtendedCoefficients(theta, vartheta, nu, c, p, qctl)
    x = float(x)
    return sum_series(lambda n: coef.term(n, x), ctl, coef_rel_err=coef.qctl.rel_tol)


def ml_extended_gen(mu: float, delta: float, vartheta: float, q: float, c: float, p: float,
                    z: float, ctl: SeriesControl | None = None,
                    qctl: QuadratureControl | None = None) -> SeriesResult:
    """Five-parameter extended generalised MLF.

    Σ B_p(ϑ+nq, c-ϑ) (ϑ)_{nq} zⁿ / (B(ϑ, c-ϑ) Γ(μn+δ) n!), with the real-index
    Pochhammer symbol (ϑ)_{nq} = Γ(ϑ+nq)/Γ(ϑ).
    """
    _check_positive(mu=mu, delta=delta, vartheta=vartheta, q=q)
    if not c > vartheta:
        raise DomainError(f"need c > vartheta, got c={c}, vartheta={vartheta}")
    if not p >= 0:
        raise DomainError(f"need p >= 0, got {p}")
    qctl = qctl or QuadratureControl()
    z = float(z)
    b0 = beta_fn(vartheta, c - vartheta)

    def term(n):
        bp = extended_beta(vartheta + n * q, c - vartheta, p, qctl)
        if n == 0:
            return bp / (b0 * gamma_fn(delta))
        if z == 0.0:
            return 0.0
        try:
            g = gamma_ratio((vartheta + n * q,), (vartheta, n + 1.0, mu * n + delta))
        except OverflowError:
            g = math.inf
        if g == 0.0 or not math.isfinite(g):
            # deep tail (or divergence): do the whole magnitude in log space
            lg = (math.lgamma(vartheta + n * q) - math.lgamma(vartheta) - math.lgamma(n + 1.0)
                  - math.lgamma(mu * n + delta) + n * math.log(abs(z)) + math.log(bp / b0))
            if lg > 709.0:
                return math.inf
            sign = -1.0 if (z < 0 and n % 2) else 1.0
            return sign * math.exp(lg)
        return (bp / b0) * g * z ** n

    return sum_series(term, ctl, coef_rel_err=qctl.rel_tol)


def _check_index(i) -> int:
    if int(i) != i or i < 0:
        raise DomainError(f"truncation index must be a nonnegative integer, got {i}")
    return int(i)


def ml_truncated(i: int, params: MLParams, z: float,
                 qctl: QuadratureControl | None = None) -> float:
    """Finite sum of the 4-parameter extended MLF over n = 0..i."""
    i = _check_index(i)
    coef = _ExtendedCoefficients(params.alpha, params.beta, params.gamma, params.c, params.p, qctl)
    z = float(z)
    return math.fsum(coef.term(n, z) for n in range(i + 1))


def s_truncated(i: int, params: MLParams, z: float,
                qctl: QuadratureControl | None = None) -> float:
    """Γ(β) times :func:`ml_truncated`."""
    return gamma_fn(params.beta) * ml_truncated(i, params, z, qctl)


def s_truncated_increment(i: int, params: MLParams, z: float,
                          qctl: QuadratureControl | None = None) -> float:
    """``s_truncated(i, params, z) - s_truncated(i, params, 0)`` without cancellation.

    Only the n >= 1 terms are summed, so the result is exact zero at z = 0
    and keeps full relative precision for tiny z.
    """
    i = _check_index(i)
    coef = _ExtendedCoefficients(params.alpha, params.beta, params.gamma, params.c, params.p, qctl)
    z = float(z)
    return gamma_fn(params.beta) * math.fsum(coef.term(n, z) for n in range(1, i + 1))
