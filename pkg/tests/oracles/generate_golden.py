"""Regenerate tests/golden_values.json with mpmath at 40 significant digits.

Everything here is independent of the nucalc package: extended beta by
mpmath.quad, series by direct high-precision summation, derivatives by
mpmath.diff.  Run from the repository root:

    python3 tests/oracles/generate_golden.py
"""

import json
import pathlib

import mpmath as mp
import numpy as np

mp.mp.dps = 40
OUT = pathlib.Path(__file__).resolve().parent.parent / "golden_values.json"


def bp(z, y, p):
    z, y, p = mp.mpf(z), mp.mpf(y), mp.mpf(p)
    if p == 0:
        return mp.beta(z, y)
    f = lambda u: u ** (z - 1) * (1 - u) ** (y - 1) * mp.exp(-p / (u * (1 - u)))
    return mp.quad(f, [0, mp.mpf(1) / 4, mp.mpf(1) / 2, mp.mpf(3) / 4, 1])


def bp_quad(z, y, p):
    z, y, p = mp.mpf(z), mp.mpf(y), mp.mpf(p)
    f = lambda u: u ** (z - 1) * (1 - u) ** (y - 1) * mp.exp(-p / (u * (1 - u)))
    return mp.quad(f, [0, mp.mpf(1) / 2, 1])


def ml3(rho, lam, delta, z):
    rho, lam, delta, z = map(mp.mpf, (rho, lam, delta, z))
    return mp.nsum(lambda n: mp.rf(rho, n) * z ** n / (mp.gamma(lam * n + delta) * mp.factorial(n)),
                   [0, mp.inf])


def nu_c(a, b, g, c, p):
    a, b, g, c = map(mp.mpf, (a, b, g, c))
    return mp.gamma(b) * bp(g + 1, c - g, p) * mp.gamma(c + 1) / (
        mp.gamma(g) * mp.gamma(c - g) * mp.gamma(a + b))


def f(x):
    return float(x)


gold = {}

gold["extended_beta"] = [
    {"z": z, "y": y, "p": p, "value": f(bp_quad(z, y, p))}
    for z, y, p in [(1, 1, 1), (2, 3, 1), (3, 2, 1), (0.5, 2.5, 0.3), (4.5, 0.7, 0.05), (1.3, 1.9, 2.0)]
]

rng = np.random.default_rng(20241015)
red = []
for _ in range(20):
    z, y = (round(float(v), 4) for v in rng.uniform(0.2, 8.0, 2))
    th, vt = (round(float(v), 4) for v in rng.uniform(0.3, 2.5, 2))
    nu = round(float(rng.uniform(0.2, 3.0)), 4)
    c = round(nu + float(rng.uniform(0.3, 3.0)), 4)
    x = round(float(rng.uniform(-2.0, 2.0)), 4)
    red.append({"z": z, "y": y, "beta": f(mp.beta(z, y)),
                "theta": th, "vartheta": vt, "nu": nu, "c": c, "x": x,
                "ml3": f(ml3(nu, th, vt, x))})
gold["reductions"] = red

gold["ml_extended"] = {
    "args": [1, 1, 1, 2, 1, 0.5],
    "value": f(mp.nsum(lambda n: bp_quad(1 + n, 1, 1) * mp.rf(2, n) * mp.mpf("0.5") ** n
                       / (mp.beta(1, 1) * mp.gamma(n + 1) * mp.factorial(n)), [0, mp.inf])),
}


def mlgen(mu, delta, vt, q, c, p, z):
    mu, delta, vt, q, c, z = map(mp.mpf, (mu, delta, vt, q, c, z))
    b0 = mp.beta(vt, c - vt)
    return mp.nsum(lambda n: bp(vt + n * q, c - vt, p) * mp.rf(vt, n * q) * z ** n
                   / (b0 * mp.gamma(mu * n + delta) * mp.factorial(n)), [0, mp.inf])


gold["ml_extended_gen"] = [
    {"args": [1, 1, 1, 2, 3, 0, 0.2], "value": f(mlgen(1, 1, 1, 2, 3, 0, "0.2"))},
    {"args": [0.8, 1.2, 0.7, 1, 2.1, 0, 0.6], "value": f(mlgen(0.8, 1.2, 0.7, 1, 2.1, 0, "0.6"))},
    {"args": [1.5, 0.9, 1.2, 0.5, 2.6, 0.4, -0.8], "value": f(mlgen(1.5, 0.9, 1.2, 0.5, 2.6, 0.4, "-0.8"))},
]

gold["ml3"] = [
    {"args": a, "value": f(ml3(*a))}
    for a in [(1, 1, 1, 1), (1, 1, 2, 1), (1, 2, 1, 1), (1, 0.5, 1, -2), (2.5, 0.7, 1.3, 1.7),
              (0.4, 1.8, 0.6, -3.0), (1, 1, 1, -5)]
]

params = [(1, 1, 1, 2, 0), (0.7, 2.2, 1.4, 2.9, 0), (1.9, 0.6, 0.8, 1.5, 0.5), (2.5, 1.3, 2.1, 3.3, 1.0),
          (1.1, 2.8, 0.55, 2.4, 0.25)]
gold["nu_constant"] = [{"params": list(pp), "value": f(nu_c(*pp))} for pp in params]

def weighted_quad(g, a, t, mu):
    """∫_a^t g(x) x^{mu-1} dx via s = x^mu (plain quad loses digits at x = 0)."""
    mu = mp.mpf(mu)
    nodes = mp.linspace(mp.mpf(a) ** mu, mp.mpf(t) ** mu, 9)
    return mp.quad(lambda s: g(s ** (1 / mu)), nodes) / mu


# integral C^{-1} ∫_a^t g(x) x^{mu-1} dx for a few g
integ = []
for expr, g, a, t, mu, pp in [
    ("exp(t)", mp.exp, 0, 1, 0.3, params[1]),
    ("sin(3*t)+t^2", lambda x: mp.sin(3 * x) + x ** 2, 0.2, 2.5, 0.8, params[2]),
    ("exp(t)", mp.exp, 0, 1, 1.7, params[0]),
    ("cos(t)*exp(-t)", lambda x: mp.cos(x) * mp.exp(-x), 0, 3, 0.15, params[3]),
]:
    val = weighted_quad(g, a, t, mu) / nu_c(*pp)
    integ.append({"expr": expr, "a": a, "t": t, "mu": mu, "params": list(pp), "value": f(val)})
gold["integral"] = integ

# MLF theorems: n-th derivative and termwise integral of E_{lam,delta}
rng = np.random.default_rng(77)
d_n, i_ml = [], []
for k in range(10):
    lam, delta = (round(float(v), 4) for v in rng.uniform(0.5, 2.0, 2))
    t = round(float(rng.uniform(0.2, 2.0)), 4)
    n = k % 3
    mu = round(n + float(rng.uniform(0.1, 1.0)), 4)
    pp = params[k % len(params)]
    e = lambda x, lam=lam, delta=delta: mp.nsum(lambda j: x ** j / mp.gamma(lam * j + delta), [0, mp.inf])
    val = nu_c(*pp) * mp.mpf(t) ** (n + 1 - mp.mpf(mu)) * mp.diff(e, mp.mpf(t), n + 1)
    d_n.append({"lambda": lam, "delta": delta, "t": t, "mu": mu, "n": n, "params": list(pp), "value": f(val)})
    a = 0.0 if k % 3 == 0 else round(float(rng.uniform(0.0, 0.5)), 4)
    tt = round(a + float(rng.uniform(0.3, 1.5)), 4)
    mu_i = round(float(rng.uniform(0.1, 0.9)), 4)
    val = weighted_quad(e, a, tt, mu_i) / nu_c(*pp)
    i_ml.append({"lambda": lam, "delta": delta, "a": a, "t": tt, "mu": mu_i, "params": list(pp), "value": f(val)})
gold["deriv_ml2_n"] = d_n
gold["integral_ml2"] = i_ml
gold["integral_ml2_anchor"] = f(weighted_quad(mp.exp, 0, 1, 0.5))
# same integrand from a = 1e-8: the gap is about a^mu/mu = 2e-4
gold["integral_ml2_shifted"] = f(weighted_quad(mp.exp, "1e-8", 1, 0.5))

OUT.write_text(json.dumps(gold, indent=1) + "\n")
print(f"wrote {OUT}")
