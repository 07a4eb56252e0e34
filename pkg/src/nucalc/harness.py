"""Randomised certification of the nu-calculus identities.

Four check families (derivative rules, mean-value searches, integral
identities, MLF theorems) each draw ``n_cases`` inputs from a per-case
generator seeded by ``(seed, family, case_index)``, so every case is
reproducible on its own.  Case 0 of each family is a fixed analytic anchor.

A failing identity is recorded, never raised.  :func:`run_suite` merges the
families and writes a JSON-lines report.
"""

from __future__ import annotations

import dataclasses
import datetime as _dt
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .errors import ConvergenceError, IoError, NuCalcError, SearchFailure, ValidationError
from .expr import BinOp, EvalPair, FnHandle, Func, Num, Var, compose, const, div, mul, parse
from .expr import add as expr_add
from .mittag_leffler import ml2, s_truncated_increment
from .nu_calculus import (
    CLOSED_FORM_KINDS,
    closed_form_deriv,
    compose_deriv,
    deriv_chain,
    deriv_limit,
    deriv_ml2,
    deriv_ml2_n,
    deriv_n,
    generating_expression,
    integral,
    integral_ml2,
    integral_power_kernel,
)
from .quadrature import QuadratureControl
from .special_functions import CANONICAL, MLParams, extended_beta, gamma_fn, nu_constant

__all__ = [
    "CheckCase",
    "CheckReport",
    "THEOREMS",
    "NumericFn",
    "find_point",
    "param_pool",
    "random_expression",
    "check_algebraic_rules",
    "check_mean_value",
    "check_integral_identities",
    "check_mlf_theorems",
    "run_suite",
    "write_report",
]

# theorem_id -> statement checked
THEOREMS = {
    "deriv.linearity": "V(a g + b h) = a V(g) + b V(h)",
    "deriv.product": "V(g h) = g V(h) + h V(g)",
    "deriv.quotient": "V(g / h) = (h V(g) - g V(h)) / h^2",
    "deriv.constant": "V(k) = 0 for constant k",
    "deriv.composition": "V(g o h)(t) = g'(h(t)) V(h)(t)",
    "deriv.chain_rule": "limit definition agrees with C t^{1-mu} g'(t)",
    "deriv.continuity": "mu-differentiable implies continuous",
    "deriv.closed_form": "closed forms for e^{at}, sin(at), cos(at), t^a, t^mu/mu",
    "deriv.eigen_form": "closed forms for sin, cos, exp of t^mu/mu",
    "deriv.order_composition": "V_mu(V_eta g) expansion with g' and g''",
    "deriv.nth_order": "n-th order limit definition tends to C t^{n+1-mu} g^{(n+1)}",
    "mvt.rolle": "Rolle: g(a) = g(b) gives V(g)(c) = 0",
    "mvt.mean_value": "mean value: V(g)(c) = C (g(b) - g(a)) / ((b^mu - a^mu)/mu)",
    "mvt.cauchy": "Cauchy mean value: V(g)(c) (h(b)-h(a)) = V(h)(c) (g(b)-g(a))",
    "integ.linearity": "I(a g + b h) = a I(g) + b I(h)",
    "integ.nullity": "I(g) = 0 when t = a",
    "integ.positivity": "g >= 0 gives I(g) >= 0",
    "integ.inverse": "V(I(g))(t) = g(t)",
    "integ.ftc": "I(V(g))(t) = g(t) - g(a)",
    "integ.parts": "I(g V(h)) = g h |_a^t - I(h V(g))",
    "integ.triangle": "|I(g)| <= I(|g|)",
    "integ.sup_bound": "|I(g)| <= C^{-1} N (t^mu - a^mu)/mu",
    "integ.mean_value": "I(g h) = g(x0) I(h) for h >= 0",
    "integ.composition": "I_mu(I_eta g) = C^{-1}[(t^mu/mu) I_eta g - (1/mu) I_{mu+eta} g]",
    "mlf.deriv_ml2": "V(E_{l,d})(t) = t^{1-mu} C E^2_{l,l+d}(t)",
    "mlf.deriv_ml2_n": "n-th order: t^{n+1-mu} C Gamma(n+2) E^{n+2}_{l,d+l(n+1)}(t)",
    "mlf.integral_ml2": "termwise I(E_{l,d}) equals quadrature",
    "mlf.power_kernel": "I((t-x)^l) = C^{-1} B(l+1, mu) t^{l+mu}",
    "mlf.power_kernel_rl": "I((t-x)^l) = C^{-1} Gamma(mu) J^mu t^l (Riemann-Liouville)",
}

_FAMILY_CODES = {"algebraic": 1, "mean_value": 2, "integral": 3, "mlf": 4, "pool": 99}
_TINY = 1e-300


@dataclass(frozen=True)
class CheckCase:
    theorem_id: str
    seed: int
    case_index: int
    inputs: dict
    residual: float
    tolerance: float
    passed: bool

    def to_record(self) -> dict:
        return {
            "record": "case",
            "theorem_id": self.theorem_id,
            "seed": self.seed,
            "case_index": self.case_index,
            "inputs": _jsonable(self.inputs),
            "residual": _jsonable(self.residual),
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class CheckReport:
    seed: int
    n_cases: int
    cases: list[CheckCase] = field(default_factory=list)

    @property
    def totals(self) -> dict:
        passed = sum(c.passed for c in self.cases)
        return {"cases": len(self.cases), "passed": passed, "failed": len(self.cases) - passed}

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.cases)

    def by_theorem(self) -> dict[str, list[CheckCase]]:
        out: dict[str, list[CheckCase]] = {}
        for c in self.cases:
            out.setdefault(c.theorem_id, []).append(c)
        return out

    def failures(self) -> list[CheckCase]:
        return [c for c in self.cases if not c.passed]

    def sorted(self) -> "CheckReport":
        cases = sorted(self.cases, key=lambda c: (c.theorem_id, c.case_index))
        return CheckReport(self.seed, self.n_cases, cases)

    @classmethod
    def merge(cls, reports: list["CheckReport"]) -> "CheckReport":
        if not reports:
            raise ValidationError("nothing to merge")
        cases = [c for r in reports for c in r.cases]
        return cls(reports[0].seed, reports[0].n_cases, cases).sorted()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x if isinstance(x, str) or x is None else str(x)


# ----------------------------------------------------------------- helpers

class NumericFn:
    """Wrap a scalar callable so the calculus operators can use it.

    ``eval_d`` uses the five-point central stencil with step ``h``.
    """

    def __init__(self, fun: Callable[[float], float], h: float = 1e-3, label: str = "<numeric>"):
        self.fun = fun
        self.h = h
        self.source = label

    def eval(self, x):
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            return float(self.fun(float(arr)))
        return np.array([float(self.fun(float(v))) for v in arr.ravel()]).reshape(arr.shape)

    def eval_d(self, x):
        h = self.h
        v = self.eval(x)
        d = (-self.eval(np.asarray(x) + 2 * h) + 8 * self.eval(np.asarray(x) + h)
             - 8 * self.eval(np.asarray(x) - h) + self.eval(np.asarray(x) - 2 * h)) / (12 * h)
        return EvalPair(v, d)

    __call__ = eval


def _rel(lhs: float, rhs: float, scale: float) -> float:
    diff = abs(lhs - rhs)
    if diff == 0.0:
        return 0.0
    if not math.isfinite(diff):
        return math.inf
    return diff / max(scale, _TINY)


def find_point(phi: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
               n_grid: int = 512, n_bisect: int = 60) -> float:
    """Point in (lo, hi) where ``phi`` vanishes: grid scan, then bisection.

    ``phi`` must accept an array.  Raises :class:`SearchFailure` when the
    scan sees no sign change.
    """
    xs = np.linspace(lo, hi, n_grid + 2)[1:-1]
    vals = np.asarray(phi(xs), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise SearchFailure("residual function is not finite on the scan grid")
    for k in range(n_grid):
        if vals[k] == 0.0:
            return float(xs[k])
        if k + 1 < n_grid and vals[k] * vals[k + 1] < 0:
            left, right, f_left = xs[k], xs[k + 1], vals[k]
            for _ in range(n_bisect):
                mid = 0.5 * (left + right)
                f_mid = float(np.asarray(phi(np.array([mid])))[0])
                if f_mid == 0.0:
                    return float(mid)
                if (f_mid < 0) == (f_left < 0):
                    left, f_left = mid, f_mid
                else:
                    right = mid
            return float(0.5 * (left + right))
    raise SearchFailure(f"no sign change on a {n_grid}-point grid over ({lo}, {hi})")


def param_pool(seed: int) -> list[MLParams]:
    """Canonical parameters plus five random sets drawn from ``seed``."""
    rng = np.random.default_rng([seed, _FAMILY_CODES["pool"]])
    pool = [CANONICAL]
    for _ in range(5):
        a, b, g = rng.uniform(0.5, 3.0, size=3)
        c = g + rng.uniform(0.5, 2.0)
        p = float(rng.choice([0.0, 0.5, 1.0]))
        pool.append(MLParams(*(round(float(v), 6) for v in (a, b, g, c)), p))
    return pool


def _coef(rng) -> float:
    return round(float(rng.uniform(-2.0, 2.0)), 3)


def _random_ast(rng, depth: int):
    if depth == 0 or rng.random() < 0.25:
        return Var() if rng.random() < 0.6 else Num(_coef(rng))
    kind = rng.choice(["add", "mul", "sin", "exp"])
    if kind in ("add", "mul"):
        return BinOp(str(kind), _random_ast(rng, depth - 1), _random_ast(rng, depth - 1))
    # keep exponentials tame by scaling the argument
    inner = _random_ast(rng, depth - 1)
    if kind == "exp":
        inner = BinOp("mul", Num(round(float(rng.uniform(-0.8, 0.8)), 3)), inner)
    return Func(str(kind), inner)


def random_expression(rng, lo: float = 0.05, hi: float = 4.0, depth: int = 3,
                      min_slope: float = 1e-2, bound: float = 1e3) -> FnHandle:
    """Random smooth expression over {t, constants, +, *, sin, exp}.

    Draws until the value and derivative stay below ``bound`` on [lo, hi]
    and the derivative is not negligible somewhere there.
    """
    xs = np.linspace(lo, hi, 65)
    for _ in range(200):
        f = FnHandle.from_ast(_random_ast(rng, depth))
        try:
            v, d = f.eval_d(xs)
        except NuCalcError:
            continue
        if np.max(np.abs(v)) <= bound and np.max(np.abs(d)) <= bound and np.max(np.abs(d)) >= min_slope:
            return f
    raise SearchFailure("could not draw a well-conditioned random expression")


def _u(rng, lo, hi, nd=6) -> float:
    return round(float(rng.uniform(lo, hi)), nd)


def _case(theorem_id, seed, idx, tol, fn) -> CheckCase:
    inputs: dict = {}
    try:
        residual = float(fn(inputs))
    except (NuCalcError, ArithmeticError, ValueError) as exc:
        inputs["error"] = f"{type(exc).__name__}: {exc}"
        residual = math.inf
    passed = math.isfinite(residual) and residual <= tol
    return CheckCase(theorem_id, seed, idx, inputs, residual, tol, passed)


def _rng(seed, family, idx):
    return np.random.default_rng([seed, _FAMILY_CODES[family], idx])


def _check_n(n_cases):
    if int(n_cases) != n_cases or n_cases < 1:
        raise ValidationError(f"n_cases must be a positive integer, got {n_cases}")
    return int(n_cases)


def _p0(params: MLParams) -> MLParams:
    return dataclasses.replace(params, p=0.0)


def _sup(f, lo, hi, n=257) -> float:
    return float(np.max(np.abs(f.eval(np.linspace(lo, hi, n)))))


# ------------------------------------------------------- derivative rules

def check_algebraic_rules(seed: int, n_cases: int) -> CheckReport:
    """Linearity, product, quotient, constant and composition rules, plus the
    limit/chain agreement, continuity, closed forms, two-order composition
    and the n-th order definition."""
    n_cases = _check_n(n_cases)
    pool = param_pool(seed)
    cases: list[CheckCase] = []
    for idx in range(n_cases):
        rng = _rng(seed, "algebraic", idx)
        params = pool[idx % len(pool)]
        if idx == 0:
            g, h = parse("t^2"), parse("sin(t)")
            a, b, t, mu, eta = 2.0, -1.0, 1.0, 0.5, 0.5
        else:
            g = random_expression(rng)
            h = random_expression(rng)
            a, b = _coef(rng), _coef(rng)
            t, mu, eta = _u(rng, 0.5, 2.5), _u(rng, 0.1, 0.9), _u(rng, 0.1, 0.9)
        # quotient needs a denominator bounded away from zero
        hq = h if abs(h.eval(t)) >= 0.1 else expr_add(h, const(1.0 if h.eval(t) >= 0 else -1.0))
        if abs(hq.eval(t)) < 0.1:
            hq = expr_add(hq, const(0.5))
        base = {"g": g.source, "h": h.source, "t": t, "mu": mu, "params": params.as_tuple()}
        cases.extend(_algebraic_case(seed, idx, rng, params, g, h, hq, a, b, t, mu, eta, base))
    return CheckReport(seed, n_cases, cases).sorted()


def _algebraic_case(seed, idx, rng, params, g, h, hq, a, b, t, mu, eta, base):
    c = nu_constant(params)
    V = lambda f, x=t: deriv_chain(f, x, mu, params)  # noqa: E731
    out = []

    def linearity(inp):
        inp.update(base, a=a, b=b)
        lhs = V(expr_add(g, h, a, b))
        vg, vh = V(g), V(h)
        return _rel(lhs, a * vg + b * vh, abs(a * vg) + abs(b * vh))

    def product(inp):
        inp.update(base)
        lhs = V(mul(g, h))
        r1, r2 = g.eval(t) * V(h), h.eval(t) * V(g)
        return _rel(lhs, r1 + r2, abs(r1) + abs(r2))

    def quotient(inp):
        inp.update(base, h=hq.source)
        hv = hq.eval(t)
        lhs = V(div(g, hq))
        r1, r2 = hv * V(g), g.eval(t) * V(hq)
        return _rel(lhs, (r1 - r2) / hv ** 2, (abs(r1) + abs(r2)) / hv ** 2)

    def constant(inp):
        k = a if idx else 7.0
        inp.update(base, k=k)
        return abs(V(const(k)))

    def composition(inp):
        inp.update(base)
        lhs = V(compose(g, h))
        rhs = g.eval_d(h.eval(t)).derivative * V(h)
        return _rel(lhs, rhs, abs(rhs))

    def chain_rule(inp):
        p0 = _p0(params)
        inp.update(base, params=p0.as_tuple())
        res = deriv_limit(g, t, mu, p0)
        ch = deriv_chain(g, t, mu, p0)
        inp.update(limit=res.value, chain=ch, observed_order=res.observed_order)
        return _rel(res.value, ch, max(abs(ch), nu_constant(p0) * t ** (1 - mu) * 1e-3))

    def continuity(inp):
        p0 = _p0(params)
        eps = 1e-9
        inp.update(base, params=p0.as_tuple(), eps=eps)
        moved = t + t * s_truncated_increment(1, p0, eps * t ** (-mu))
        return abs(g.eval(moved) - g.eval(t)) / (1.0 + abs(g.eval(t)))

    def closed(kinds):
        def run(inp):
            kind = "power_mu_over_mu" if idx == 0 and kinds is _T3 else (
                "eigen_exp" if idx == 0 else str(rng.choice(kinds)))
            aa = _u(rng, 0.5, 3.0, 3) if kind == "power_a" else _coef(rng)
            src = generating_expression(kind, aa, mu)
            inp.update(base, kind=kind, a=aa, generating=src)
            cf = closed_form_deriv(kind, aa, t, mu, params)
            ch = deriv_chain(parse(src), t, mu, params)
            return _rel(cf, ch, max(abs(cf), abs(ch), 1e-3 * c))
        return run

    def order_composition(inp):
        inp.update(base, eta=eta)
        lhs = compose_deriv(g, t, mu, eta, params)
        inner = NumericFn(lambda x: deriv_chain(g, x, eta, params), h=1e-3)
        rhs = deriv_chain(inner, t, mu, params)
        d1 = g.eval_d(t).derivative
        d2 = (g.eval_d(t + 1e-4).derivative - g.eval_d(t - 1e-4).derivative) / 2e-4
        scale = c * c * (abs((1 - eta) * t ** (1 - mu - eta) * d1) + abs(t ** (2 - mu - eta) * d2))
        return _rel(lhs, rhs, max(scale, 1e-3 * c * c))

    def nth_order(inp):
        p0 = _p0(params)
        n = idx % 2
        mu_n = n + (mu if idx else 0.5)
        inp.update(base, params=p0.as_tuple(), n=n, mu=mu_n)
        res = deriv_n(g, t, mu_n, n, p0)
        if n == 0:
            d = g.eval_d(t).derivative
        else:
            hh = 1e-3
            dd = lambda x: g.eval_d(x).derivative  # noqa: E731
            d = (-dd(t + 2 * hh) + 8 * dd(t + hh) - 8 * dd(t - hh) + dd(t - 2 * hh)) / (12 * hh)
        c0 = nu_constant(p0)
        ref = c0 * t ** (n + 1 - mu_n) * d
        inp.update(limit=res.value, reference=ref)
        return _rel(res.value, ref, max(abs(ref), 1e-3 * c0))

    checks = [
        ("deriv.linearity", 1e-8, linearity),
        ("deriv.product", 1e-8, product),
        ("deriv.quotient", 1e-8, quotient),
        ("deriv.constant", 1e-8, constant),
        ("deriv.composition", 1e-8, composition),
        ("deriv.chain_rule", 1e-6, chain_rule),
        ("deriv.continuity", 1e-8, continuity),
        ("deriv.closed_form", 1e-10, closed(_T3)),
        ("deriv.eigen_form", 1e-10, closed(_T4)),
        ("deriv.order_composition", 1e-6, order_composition),
        ("deriv.nth_order", 1e-6, nth_order),
    ]
    for tid, tol, fn in checks:
        out.append(_case(tid, seed, idx, tol, fn))
    return out


_T3 = ("exp_at", "sin_at", "cos_at", "power_a", "power_mu_over_mu")
_T4 = ("eigen_sin", "eigen_cos", "eigen_exp")
assert set(_T3 + _T4) == set(CLOSED_FORM_KINDS)


# ---------------------------------------------------------- mean values

def check_mean_value(seed: int, n_cases: int) -> CheckReport:
    """Rolle, mean-value and Cauchy mean-value point searches."""
    n_cases = _check_n(n_cases)
    pool = param_pool(seed)
    cases: list[CheckCase] = []
    for idx in range(n_cases):
        rng = _rng(seed, "mean_value", idx)
        params = pool[idx % len(pool)]
        c = nu_constant(params)
        a = _u(rng, 0.2, 1.5)
        b = round(a + _u(rng, 0.5, 2.0), 6)
        mu = _u(rng, 0.1, 0.9)

        def V(f, x, mu=mu, params=params):
            return deriv_chain(f, x, mu, params)

        def rolle(inp, a=a, b=b, mu=mu, params=params, V=V, rng=rng):
            if idx == 0:
                g, a, b, mu, params = parse("(t-1)*(2-t)"), 1.0, 2.0, 0.5, CANONICAL
            else:
                c1, c2, c3 = _coef(rng) / 2, _u(rng, 0.5, 4.0, 3), _coef(rng)
                g = parse(f"(t-{a!r})*({b!r}-t)*exp({c1!r}*t)*(1.5+sin({c2!r}*t+{c3!r}))")
            inp.update(g=g.source, a=a, b=b, mu=mu, params=params.as_tuple())
            phi = lambda x: V(g, x, mu, params)  # noqa: E731
            x0 = find_point(phi, a, b)
            inp["point"] = x0
            scale = float(np.max(np.abs(phi(np.linspace(a, b, 257)))))
            return _rel(phi(x0), 0.0, scale)

        def mean_value(inp, a=a, b=b, mu=mu, params=params, c=c, V=V, rng=rng):
            if idx == 0:
                g, a, b, mu, params, c = parse("t^2"), 1.0, 2.0, 1.0, CANONICAL, 1.0
            else:
                g = random_expression(rng, a, b)
            k = (g.eval(b) - g.eval(a)) / ((b ** mu - a ** mu) / mu)
            target = c * k
            inp.update(g=g.source, a=a, b=b, mu=mu, params=params.as_tuple(), target=target)
            phi = lambda x: V(g, x, mu, params) - target  # noqa: E731
            x0 = find_point(phi, a, b)
            inp["point"] = x0
            scale = float(np.max(np.abs(V(g, np.linspace(a, b, 257), mu, params)))) + abs(target)
            return _rel(phi(x0), 0.0, scale)

        def cauchy(inp, a=a, b=b, mu=mu, params=params, V=V, rng=rng):
            g = random_expression(rng, a, b)
            h = random_expression(rng, a, b)
            if abs(h.eval(b) - h.eval(a)) < 0.1:
                h = expr_add(h, parse("t"))
            dg, dh = g.eval(b) - g.eval(a), h.eval(b) - h.eval(a)
            inp.update(g=g.source, h=h.source, a=a, b=b, mu=mu, params=params.as_tuple())
            phi = lambda x: V(g, x, mu, params) * dh - V(h, x, mu, params) * dg  # noqa: E731
            x0 = find_point(phi, a, b)
            inp["point"] = x0
            xs = np.linspace(a, b, 257)
            scale = float(np.max(np.abs(V(g, xs, mu, params) * dh) + np.abs(V(h, xs, mu, params) * dg)))
            return _rel(phi(x0), 0.0, scale)

        cases.append(_case("mvt.rolle", seed, idx, 1e-6, rolle))
        cases.append(_case("mvt.mean_value", seed, idx, 1e-6, mean_value))
        cases.append(_case("mvt.cauchy", seed, idx, 1e-6, cauchy))
    return CheckReport(seed, n_cases, cases).sorted()


# ------------------------------------------------------------- integrals

def check_integral_identities(seed: int, n_cases: int) -> CheckReport:
    """Integral linearity, nullity, positivity, inverse, FTC, parts, triangle,
    sup bound, integral mean value and the two-order composition formula."""
    n_cases = _check_n(n_cases)
    pool = param_pool(seed)
    cases: list[CheckCase] = []
    for idx in range(n_cases):
        rng = _rng(seed, "integral", idx)
        params = pool[idx % len(pool)]
        cases.extend(_integral_case(seed, idx, rng, params))
    return CheckReport(seed, n_cases, cases).sorted()


def _integral_case(seed, idx, rng, params):
    c = nu_constant(params)
    if idx == 0:
        a, t, mu, eta = 0.0, 1.0, 0.5, 0.5
        g, h = parse("t^2"), parse("1")
        ka, kb = 1.0, 1.0
    else:
        a = 0.0 if idx % 5 == 1 else _u(rng, 0.0, 1.0)
        t = round(a + _u(rng, 0.5, 2.0), 6)
        mu, eta = _u(rng, 0.1, 0.9), _u(rng, 0.1, 0.9)
        g = random_expression(rng, a, t)
        h = random_expression(rng, a, t)
        ka, kb = _coef(rng), _coef(rng)
    base = {"g": g.source, "a": a, "t": t, "mu": mu, "params": params.as_tuple()}

    def I(f, lo=a, hi=t, order=mu, **kw):  # noqa: E743
        return integral(f, lo, hi, order, params, **kw)

    def absf(f):
        return lambda x: np.abs(f.eval(x))

    def linearity(inp):
        inp.update(base, h=h.source, ka=ka, kb=kb)
        lhs = I(expr_add(g, h, ka, kb))
        rhs = ka * I(g) + kb * I(h)
        return _rel(lhs, rhs, abs(ka) * I(absf(g)) + abs(kb) * I(absf(h)))

    def nullity(inp):
        inp.update(base)
        return abs(I(g, a, a))

    def positivity(inp):
        gp = mul(g, g)
        inp.update(base, g=gp.source)
        v = I(gp)
        return 0.0 if v >= 0 else abs(v) / max(I(absf(gp)), _TINY)

    def inverse(inp):
        gi = parse("1") if idx == 0 else g
        inp.update(base, g=gi.source)
        big_i = NumericFn(lambda x: I(gi, a, x), h=1e-3)
        lhs = deriv_chain(big_i, t, mu, params)
        return _rel(lhs, gi.eval(t), _sup(gi, a, t))

    def ftc(inp):
        inp.update(base)
        lhs = I(lambda x: deriv_chain(g, x, mu, params))
        rhs = g.eval(t) - g.eval(a)
        inp["value"] = lhs
        return _rel(lhs, rhs, _sup(g, a, t))

    def parts(inp):
        inp.update(base, h=h.source)
        gvh = lambda x: g.eval(x) * deriv_chain(h, x, mu, params)  # noqa: E731
        hvg = lambda x: h.eval(x) * deriv_chain(g, x, mu, params)  # noqa: E731
        lhs = I(gvh)
        boundary = g.eval(t) * h.eval(t) - g.eval(a) * h.eval(a)
        rhs = boundary - I(hvg)
        scale = (I(lambda x: np.abs(gvh(x))) + I(lambda x: np.abs(hvg(x)))
                 + abs(g.eval(t) * h.eval(t)) + abs(g.eval(a) * h.eval(a)))
        return _rel(lhs, rhs, scale)

    def triangle(inp):
        k, ph = _u(rng, 8.0, 15.0, 3), _coef(rng)
        gs = mul(parse(f"sin({k!r}*t+{ph!r})"), g)
        inp.update(base, g=gs.source)
        lhs, rhs = abs(I(gs)), I(absf(gs))
        return max(0.0, lhs - rhs) / max(rhs, _TINY)

    def sup_bound(inp):
        inp.update(base)
        n_sup = float(np.max(np.abs(g.eval(np.linspace(a, t, 4097)))))
        bound = n_sup * (t ** mu - a ** mu) / mu / c
        v = abs(I(g))
        inp.update(sup=n_sup, bound=bound, value=v)
        return max(0.0, v - bound) / max(bound, _TINY)

    def mean_value(inp):
        hp = expr_add(mul(h, h), const(0.1))
        inp.update(base, h=hp.source)
        k = I(mul(g, hp)) / I(hp)
        x0 = find_point(lambda x: g.eval(x) - k, a, t)
        inp.update(ratio=k, point=x0)
        return _rel(g.eval(x0), k, _sup(g, a, t))

    def composition(inp):
        lo = a if idx == 0 else max(a, 0.2)
        outer_ctl = QuadratureControl(rel_tol=1e-10)
        inp.update(base, a=lo, eta=eta)
        inner = lambda x: integral(g, lo, x, eta, params)  # noqa: E731
        lhs = integral(inner, lo, t, mu, params, outer_ctl, vectorized=False)
        i_eta = integral(g, lo, t, eta, params)
        i_sum = integral(g, lo, t, mu + eta, params)
        rhs = ((t ** mu / mu) * i_eta - i_sum / mu) / c
        scale = ((t ** mu / mu) * integral(absf(g), lo, t, eta, params)
                 + integral(absf(g), lo, t, mu + eta, params) / mu) / c
        return _rel(lhs, rhs, scale)

    checks = [
        ("integ.linearity", linearity),
        ("integ.nullity", nullity),
        ("integ.positivity", positivity),
        ("integ.inverse", inverse),
        ("integ.ftc", ftc),
        ("integ.parts", parts),
        ("integ.triangle", triangle),
        ("integ.sup_bound", sup_bound),
        ("integ.mean_value", mean_value),
        ("integ.composition", composition),
    ]
    return [_case(tid, seed, idx, 1e-7, fn) for tid, fn in checks]


# ----------------------------------------------------------- MLF theorems

def _ml2_derivative_bruteforce(lam, delta, t, order):
    """d^order/dt^order of E_{lam,delta} by differentiating term by term."""
    total, k = 0.0, order
    small = 0
    terms = []
    while k < 5000:
        g = lam * k + delta
        coef = math.perm(k, order)
        term = math.exp(math.log(coef) + (k - order) * math.log(t) - math.lgamma(g)) if t > 0 else 0.0
        terms.append(term)
        total = math.fsum(terms)
        small = small + 1 if term <= 1e-17 * abs(total) else 0
        if small >= 3:
            return total
        k += 1
    raise ConvergenceError("brute-force MLF derivative did not converge")


def check_mlf_theorems(seed: int, n_cases: int) -> CheckReport:
    """The Mittag-Leffler derivative, n-th derivative, termwise integral and
    power-kernel theorems against independent oracles."""
    n_cases = _check_n(n_cases)
    pool = param_pool(seed)
    cases: list[CheckCase] = []
    for idx in range(n_cases):
        rng = _rng(seed, "mlf", idx)
        params = pool[idx % len(pool)]
        c = nu_constant(params)
        if idx == 0:
            lam, delta, t, mu = 1.0, 1.0, 1.0, 0.5
        else:
            lam, delta = _u(rng, 0.5, 2.0), _u(rng, 0.5, 2.0)
            t, mu = _u(rng, 0.2, 2.0), _u(rng, 0.1, 0.9)
        base = {"lambda": lam, "delta": delta, "t": t, "mu": mu, "params": params.as_tuple()}

        def d_ml2(inp):
            inp.update(base)
            lhs = deriv_ml2(lam, delta, t, mu, params)
            e = NumericFn(lambda x: ml2(lam, delta, x).value, h=1e-3)
            rhs = deriv_chain(e, t, mu, params)
            return _rel(lhs, rhs, abs(rhs))

        def d_ml2_n(inp):
            n = idx % 3
            mu_n = n + (mu if idx else 0.5)
            inp.update(base, n=n, mu=mu_n)
            lhs = deriv_ml2_n(lam, delta, t, mu_n, n, params)
            rhs = c * t ** (n + 1 - mu_n) * _ml2_derivative_bruteforce(lam, delta, t, n + 1)
            return _rel(lhs, rhs, abs(rhs))

        def i_ml2(inp):
            a = 0.0 if idx == 0 or idx % 4 == 1 else _u(rng, 0.0, 0.5)
            tt = t if idx == 0 else round(a + _u(rng, 0.3, 1.5), 6)
            inp.update(base, a=a, t=tt)
            lhs = integral_ml2(lam, delta, a, tt, mu, params)
            rhs = integral(lambda x: ml2(lam, delta, x).value, a, tt, mu, params, vectorized=False)
            return _rel(lhs, rhs, abs(rhs))

        lam_k = 1.0 if idx == 0 else _u(rng, -0.9, 3.0)

        def kernel(inp):
            inp.update(base, **{"lambda": lam_k})
            lhs = integral_power_kernel(lam_k, t, mu, params)
            rhs = extended_beta(mu, lam_k + 1.0, 0.0) * t ** (lam_k + mu) / c
            return _rel(lhs, rhs, abs(rhs))

        def kernel_rl(inp):
            inp.update(base, **{"lambda": lam_k})
            lhs = integral_power_kernel(lam_k, t, mu, params)
            # Riemann-Liouville J^mu t^lam = (1/Γ(mu)) ∫_0^t (t-x)^{mu-1} x^lam dx
            j = extended_beta(lam_k + 1.0, mu, 0.0) * t ** (lam_k + mu) / gamma_fn(mu)
            rhs = gamma_fn(mu) * j / c
            return _rel(lhs, rhs, abs(rhs))

        cases.append(_case("mlf.deriv_ml2", seed, idx, 1e-7, d_ml2))
        cases.append(_case("mlf.deriv_ml2_n", seed, idx, 1e-7, d_ml2_n))
        cases.append(_case("mlf.integral_ml2", seed, idx, 1e-7, i_ml2))
        cases.append(_case("mlf.power_kernel", seed, idx, 1e-7, kernel))
        cases.append(_case("mlf.power_kernel_rl", seed, idx, 1e-7, kernel_rl))
    return CheckReport(seed, n_cases, cases).sorted()


# ------------------------------------------------------------------ suite

def write_report(report: CheckReport, path, timestamp: str | None = None) -> None:
    """Write ``report`` as JSON lines: one header record, then one per case."""
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    header = {
        "record": "header",
        "suite_version": __version__,
        "timestamp": timestamp,
        "seed": report.seed,
        "n_cases": report.n_cases,
        "totals": report.totals,
    }
    lines = [json.dumps(header)] + [json.dumps(c.to_record()) for c in report.cases]
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write report to {path}: {exc}") from exc


def run_suite(seed: int, n_cases: int, out_path=None) -> CheckReport:
    """Run all four families and, if ``out_path`` is given, write the report."""
    n_cases = _check_n(n_cases)
    report = CheckReport.merge([
        check_algebraic_rules(seed, n_cases),
        check_mean_value(seed, n_cases),
        check_integral_identities(seed, n_cases),
        check_mlf_theorems(seed, n_cases),
    ])
    if out_path is not None:
        write_report(report, out_path)
    return report
