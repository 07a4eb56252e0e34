"""Real gamma/beta family and the scaling constant of the nu-operators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, PoleError, ValidationError
from .quadrature import QuadratureControl, QuadResult, de_unit_interval

__all__ = [
    "MLParams",
    "CANONICAL",
    "QuadratureControl",
    "gamma_fn",
    "log_gamma",
    "pochhammer",
    "beta_fn",
    "extended_beta",
    "nu_constant",
    "gamma_ratio",
]

# Γ overflows a double just above 171.62; stay clear of it for direct products.
_GAMMA_DIRECT_MAX = 170.0


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


@dataclass(frozen=True)
class MLParams:
    """Parameters (alpha, beta, gamma, c, p) of the truncated 4-parameter MLF.

    Invariants: alpha, beta, gamma > 0, c > gamma, p >= 0, all finite.
    """

    alpha: float
    beta: float
    gamma: float
    c: float
    p: float = 0.0

    def __post_init__(self):
        vals = (self.alpha, self.beta, self.gamma, self.c, self.p)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"non-finite parameter in {vals}")
        if self.alpha <= 0 or self.beta <= 0 or self.gamma <= 0:
            raise ValidationError("alpha, beta and gamma must be positive")
        if self.c <= self.gamma:
            raise ValidationError(f"c must exceed gamma (c={self.c}, gamma={self.gamma})")
        if self.p < 0:
            raise ValidationError(f"p must be nonnegative, got {self.p}")

    @classmethod
    def parse(cls, text: str) -> "MLParams":
        """Build from ``"alpha,beta,gamma,c,p"`` (p may be omitted)."""
        parts = [s.strip() for s in text.split(",") if s.strip()]
        if len(parts) not in (4, 5):
            raise ValidationError(f"expected 'alpha,beta,gamma,c[,p]', got {text!r}")
        try:
            nums = [float(s) for s in parts]
        except ValueError as exc:
            raise ValidationError(f"bad number in {text!r}") from exc
        return cls(*nums)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.c, self.p)


CANONICAL = MLParams(1.0, 1.0, 1.0, 2.0, 0.0)


def gamma_fn(x: float) -> float:
    """Γ(x) for real x, accurate to a few ulp on (0, 170]."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at {x}")
    try:
        return math.gamma(x)
    except OverflowError:
        raise OverflowError(f"gamma({x}) exceeds the double range") from None


def log_gamma(x: float) -> float:
    x = float(x)
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def gamma_ratio(num: tuple[float, ...], den: tuple[float, ...]) -> float:
    """Π Γ(num) / Π Γ(den) for positive arguments.

    Uses direct gamma products while every argument is below 170 (a few ulp
    of error) and falls back to log-gamma sums otherwise.
    """
    args = tuple(num) + tuple(den)
    if any(not a > 0 for a in args):
        raise DomainError(f"gamma_ratio needs positive arguments, got {args}")
    if all(a <= _GAMMA_DIRECT_MAX for a in args):
        top = 1.0
        for a in num:
            top *= math.gamma(a)
        bot = 1.0
        for a in den:
            bot *= math.gamma(a)
        if math.isfinite(top) and math.isfinite(bot) and bot != 0.0:
            return top / bot
    s = math.fsum(math.lgamma(a) for a in num) - math.fsum(math.lgamma(a) for a in den)
    return math.exp(s)


def pochhammer(c: float, x: float) -> float:
    """Rising factorial (c)_x = Γ(c+x)/Γ(c), generalised to real x >= 0."""
    c = float(c)
    x = float(x)
    if x < 0:
        raise DomainError(f"pochhammer index must be nonnegative, got {x}")
    if x == math.floor(x) and x <= 1000:
        out = 1.0
        for k in range(int(x)):
            out *= c + k
        if not math.isfinite(out):
            raise OverflowError(f"pochhammer({c}, {x}) overflows")
        return out
    if c > 0:
        return gamma_ratio((c + x,), (c,))
    if _is_nonpositive_integer(c) or _is_nonpositive_integer(c + x):
        raise PoleError(f"pochhammer({c}, {x}) hits a gamma pole")
    return gamma_fn(c + x) / gamma_fn(c)


def beta_fn(z: float, y: float) -> float:
    """Euler beta B(z, y) = Γ(z)Γ(y)/Γ(z+y)."""
    z = float(z)
    y = float(y)
    if not (z > 0 and y > 0):
        raise DomainError(f"beta requires z, y > 0, got ({z}, {y})")
    return gamma_ratio((z, y), (z + y,))


def _beta_s_max(z: float, y: float, p: float) -> float:
    # Decay of u^z (1-u)^y exp(-p/(u(1-u))) along the tanh-sinh map is
    # exp(-2 m s - p e^{2s}) with m = min(z, y); stop once that is ~e^-45.
    m = min(z, y)
    s = 45.0 / (2.0 * m)
    if p > 0:
        s = min(s, 0.5 * math.log(45.0 / p) + 1.0)
    return max(s, 3.0)


@lru_cache(maxsize=8192)
def _extended_beta_cached(z: float, y: float, p: float, rel_tol: float, max_levels: int) -> QuadResult:
    def log_g(log_u, log_v):
        out = z * log_u + y * log_v
        if p > 0:
            out = out - p * np.exp(-(log_u + log_v))
        return out

    return de_unit_interval(log_g, QuadratureControl(rel_tol, max_levels), _beta_s_max(z, y, p))


def extended_beta(z: float, y: float, p: float, ctl: QuadratureControl | None = None,
                  *, full_output: bool = False):
    """Extended beta B_p(z, y) = ∫₀¹ u^{z-1}(1-u)^{y-1} exp(-p/(u(1-u))) du.

    Evaluated by tanh-sinh quadrature in log space for every p >= 0 (p = 0
    included, so it can be checked against :func:`beta_fn`).  Results are
    memoised per argument tuple; the cache is safe under concurrent reads.

    With ``full_output=True`` a :class:`QuadResult` is returned instead of
    the bare value.
    """
    ctl = ctl or QuadratureControl()
    z = float(z)
    y = float(y)
    p = float(p)
    if not (z > 0 and y > 0):
        raise DomainError(f"extended beta requires z, y > 0, got ({z}, {y})")
    if not p >= 0 or not math.isfinite(p):
        raise DomainError(f"extended beta requires finite p >= 0, got {p}")
    res = _extended_beta_cached(z, y, p, ctl.rel_tol, ctl.max_levels)
    return res if full_output else res.value


def nu_constant(params: MLParams, ctl: QuadratureControl | None = None) -> float:
    """C = Γ(β) B_p(γ+1, c-γ) Γ(c+1) / (Γ(γ) Γ(c-γ) Γ(α+β)).

    This is the first-order coefficient of the truncated S-function and the
    scale factor of both nu-operators.  It equals 1 at :data:`CANONICAL`.
    """
    a, b, g, c, p = params.as_tuple()
    # p = 0 reduces to the Euler beta; use it so C is exact at CANONICAL
    bp = beta_fn(g + 1.0, c - g) if p == 0 else extended_beta(g + 1.0, c - g, p, ctl)
    return bp * gamma_ratio((b, c + 1.0), (g, c - g, a + b))
