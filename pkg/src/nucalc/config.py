"""Defaults for the command line, loaded from ``key=value`` files.

Recognised keys::

    params             alpha,beta,gamma,c[,p]
    series.rel_tol     series.max_terms     series.tail_streak
    quad.rel_tol       quad.max_levels
    eps.values         comma-separated, strictly decreasing
    eps.extrapolate    true / false

Blank lines and lines starting with ``#`` are ignored.  The file comes from
``--config`` or, failing that, the ``NUCALC_CONFIG`` environment variable.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field

from .errors import IoError, ValidationError
from .mittag_leffler import SeriesControl
from .nu_calculus import EpsilonSchedule
from .quadrature import QuadratureControl
from .special_functions import CANONICAL, MLParams

__all__ = ["Config", "load_config", "parse_config"]

ENV_VAR = "NUCALC_CONFIG"


@dataclass(frozen=True)
class Config:
    params: MLParams = CANONICAL
    series: SeriesControl = field(default_factory=SeriesControl)
    quad: QuadratureControl = field(default_factory=QuadratureControl)
    sched: EpsilonSchedule = field(default_factory=EpsilonSchedule)


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"expected a boolean, got {text!r}")


def _num(text: str, kind=float):
    try:
        v = float(text)
    except ValueError:
        raise ValidationError(f"expected a number, got {text!r}") from None
    if kind is int:
        if v != int(v):
            raise ValidationError(f"expected an integer, got {text!r}")
        return int(v)
    return v


def parse_config(text: str, base: Config | None = None) -> Config:
    """Apply the ``key=value`` lines in ``text`` on top of ``base``."""
    cfg = base or Config()
    series, quad, sched = {}, {}, {}
    params = cfg.params
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "params":
            params = MLParams.parse(value)
        elif key == "series.rel_tol":
            series["rel_tol"] = _num(value)
        elif key == "series.max_terms":
            series["max_terms"] = _num(value, int)
        elif key == "series.tail_streak":
            series["tail_streak"] = _num(value, int)
        elif key == "quad.rel_tol":
            quad["rel_tol"] = _num(value)
        elif key == "quad.max_levels":
            quad["max_levels"] = _num(value, int)
        elif key == "eps.values":
            sched["eps_values"] = tuple(_num(v) for v in value.split(",") if v.strip())
        elif key == "eps.extrapolate":
            sched["extrapolate"] = _bool(value)
        else:
            raise ValidationError(f"config line {lineno}: unknown key {key!r}")
    return Config(
        params,
        dataclasses.replace(cfg.series, **series),
        dataclasses.replace(cfg.quad, **quad),
        dataclasses.replace(cfg.sched, **sched),
    )


def load_config(path: str | None = None, environ=None) -> Config:
    """Built-in defaults overlaid with the config file, if any."""
    environ = os.environ if environ is None else environ
    path = path or environ.get(ENV_VAR) or None
    if path is None:
        return Config()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)
