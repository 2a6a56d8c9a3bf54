"""Model parameters and the flat ``key = value`` configuration format.

The configuration is a plain text file of dotted keys, one per line::

    # comment
    model.m = 2
    model.c1 = 0.5
    grid.t_min_exp = 16

Sections are optional; ``model.m`` and ``m`` are the same key.  Values are
parsed as int, float, bool or left as strings.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np


class ConfigError(ValueError):
    """Raised when a configuration file or parameter set is invalid."""


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the glued family.

    Parameters
    ----------
    m : int
        Branching order of the model cone, ``m >= 2``.
    a : float
        Amplitude of the unscaled special Lagrangian, ``a > 0``.
    l : float
        Period of the ``u3`` circle.
    R0, R0prime : float
        Outer radius of the chart and inner cut-off radius of the scaled
        neighborhood (in units of ``t``).
    c1, c2 : float
        Inner and outer gluing exponents, ``b1 = t**c1`` and ``b2 = t**c2``.
        Requires ``c1 > c2 > 0``.
    eta1, eta2 : float
        Exponents of the alternative parametrization ``b_i = t**(1 - eta_i)``
        used by the curvature and slope criteria.
    a_exp, b_exp : float
        Exponents of the logarithmic cut-off ``F``, ``0 < a_exp < b_exp``.
    t_min_exp, t_max_exp : int
        The scale grid is ``t = 2**-k`` for ``k = t_max_exp .. t_min_exp``.
    fit_min_exp : int
        Smallest ``k`` used in exponent fits.
    quad_tol, fit_tol : float
        Relative quadrature tolerance and exponent-fit tolerance.
    seed : int
        Seed for every random draw in the pipeline.
    """

    m: int = 2
    a: float = 1.0
    l: float = 2.0 * np.pi
    R0: float = 1.0
    R0prime: float = 0.5
    c1: float = 0.5
    c2: float = 0.3
    eta1: float = 0.2
    eta2: float = 0.3
    a_exp: float = 0.4
    b_exp: float = 0.6
    t_min_exp: int = 16
    t_max_exp: int = 4
    fit_min_exp: int = 10
    quad_tol: float = 1e-10
    fit_tol: float = 0.15
    seed: int = 0

    def __post_init__(self) -> None:
        problems = self.violations()
        if problems:
            raise ConfigError("; ".join(problems))

    def violations(self) -> list[str]:
        """Return a list of human-readable constraint violations."""
        out = []
        if int(self.m) != self.m or self.m < 2:
            out.append(f"m must be an integer >= 2, got {self.m}")
        if not self.a > 0:
            out.append(f"a must be positive, got {self.a}")
        if not self.l > 0:
            out.append(f"l must be positive, got {self.l}")
        if not (self.R0 > 0 and self.R0prime > 0):
            out.append("R0 and R0prime must be positive")
        if not (self.c1 > self.c2 > 0):
            out.append(f"need c1 > c2 > 0, got c1={self.c1}, c2={self.c2}")
        if not (0 < self.eta1 < self.eta2 < 1):
            out.append(f"need 0 < eta1 < eta2 < 1, got {self.eta1}, {self.eta2}")
        if not (0 < self.a_exp < self.b_exp):
            out.append(f"need 0 < a_exp < b_exp, got {self.a_exp}, {self.b_exp}")
        if not (1 <= self.t_max_exp < self.t_min_exp):
            out.append("need 1 <= t_max_exp < t_min_exp")
        if not (self.t_max_exp <= self.fit_min_exp < self.t_min_exp):
            out.append("fit_min_exp must lie inside the grid")
        if not (self.quad_tol > 0 and self.fit_tol > 0):
            out.append("tolerances must be positive")
        return out

    def replace(self, **changes: Any) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    # scale grid ------------------------------------------------------------

    def t_exponents(self) -> np.ndarray:
        return np.arange(self.t_max_exp, self.t_min_exp + 1)

    def t_grid(self) -> np.ndarray:
        """Scales ``2**-k``, ordered from the largest to the smallest."""
        return 2.0 ** -self.t_exponents().astype(float)

    def fit_mask(self) -> np.ndarray:
        return self.t_exponents() >= self.fit_min_exp

    def b1(self, t: float) -> float:
        return float(t) ** self.c1

    def b2(self, t: float) -> float:
        return float(t) ** self.c2

    def amplitude(self, t: float) -> float:
        """Amplitude of the scaled model, ``a * t**(m-1)``."""
        return self.a * float(t) ** (self.m - 1)

    def profile_scale(self, t: float) -> float:
        """``a**(1/m) * t**((m-1)/m)``, the prefactor of the glued profile."""
        return self.a ** (1.0 / self.m) * float(t) ** ((self.m - 1) / self.m)

    def with_eta(self) -> "ModelParams":
        """Same model with ``c_i = 1 - eta_i``."""
        return self.replace(c1=1.0 - self.eta1, c2=1.0 - self.eta2)


_FIELDS = {f.name: f for f in dataclasses.fields(ModelParams)}


def _coerce(raw: str) -> Any:
    text = raw.strip()
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def parse_flat_config(text: str) -> dict[str, Any]:
    """Parse ``key = value`` lines into a dict of dotted keys.

    Blank lines and lines starting with ``#`` are skipped; trailing ``#``
    comments are stripped.  Duplicate keys are an error.
    """
    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in body.split("=", 1))
        if not key or any(c.isspace() for c in key):
            raise ConfigError(f"line {lineno}: bad key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = _coerce(value)
    return out


def params_from_mapping(values: dict[str, Any], base: ModelParams | None = None) -> ModelParams:
    """Build :class:`ModelParams` from a dotted-key mapping.

    Only the last component of each key is significant, so ``model.m`` and
    ``grid.m`` both set ``m``.  Unknown keys raise :class:`ConfigError`.
    """
    base = base or ModelParams()
    changes: dict[str, Any] = {}
    problems: list[str] = []
    for key, value in values.items():
        name = key.rsplit(".", 1)[-1]
        if name not in _FIELDS:
            problems.append(f"unknown configuration key {key!r}")
            continue
        kind = type(getattr(base, name))
        try:
            changes[name] = kind(value)
        except (TypeError, ValueError):
            problems.append(f"{key}: cannot convert {value!r} to {kind.__name__}")
            continue
        if kind is int and float(value) != int(value):
            problems.append(f"{key}: expected an integer, got {value!r}")
    if problems:
        try:
            base.replace(**changes)
        except ConfigError as exc:
            problems.append(str(exc))
        raise ConfigError("; ".join(problems))
    return base.replace(**changes)


def load_config(path: str | Path | None, base: ModelParams | None = None) -> ModelParams:
    """Read a flat config file; ``None`` returns the defaults."""
    if path is None:
        return base or ModelParams()
    text = Path(path).read_text()
    return params_from_mapping(parse_flat_config(text), base)


def dump_config(params: ModelParams) -> str:
    lines = [f"model.{f} = {getattr(params, f)!r}" for f in _FIELDS]
    return "\n".join(lines) + "\n"

