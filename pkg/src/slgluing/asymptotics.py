"""Norms of the phase field over ``P``, ``Q`` and ``K`` and their ``t``-exponents.

The phase ``eps`` of the glued family is measured through model fields that
carry its size on each piece:

* on ``P`` (radial variable ``r2``): ``eps = r1 + r2`` with ``r1 = A^-1 r2^m``
  and ``|d eps| = m A^-1 r2^(m-1) + 1``, with volume density
  ``2 pi l r2 lam(r2)``;
* on ``Q`` (radial variable ``r1``): ``eps = |r2| + |r2'|`` and
  ``|d eps| = |r2'| + |r2''|`` from the glued profile, with volume density
  ``2 pi m l sqrt(E G)``;
* on ``K`` both vanish and the density is the flat ``2 pi m l r1``.

All integrals reduce to one radial quadrature because the fields do not depend
on the angle or on ``u3``.  The exact pointwise phase of the profile surface
does depend on the angle; :func:`profile_phase_norm` integrates it with the
closed-form angular mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gammaln

from .config import ModelParams
from .geometry import (beta_sup_norms, conformal_factor, connection_norm,
                       conjugate_radius_proxy, fiber_radius_check, profile_phase_parts,
                       sup_curvature)
from .gluing import SmoothCutoff, cutoff_for, profile_jet
from .regions import (classify_region, p_region_exponent, predicted_exponent,
                      sup_exponents, table_for)

Array = np.ndarray

QUANTITY_TAGS = (
    "epsC0_P", "epsC0_Q", "epsL65_P", "epsL65_Q", "epsL1_P", "epsL1_Q",
    "depsL6_P", "depsL6_Q", "dF_L3", "oneMinusF_L65", "betaNorm_k", "curvSup", "slopeMin",
)

#: tag -> (field, p, table quantity)
_LNORMS = {
    "epsL65": ("eps", 6 / 5, "eps_L65"),
    "epsL1": ("eps", 1.0, "eps_L1"),
    "depsL6": ("deps", 6.0, "deps_L6"),
}

ALLOWED_P = (1.0, 6 / 5, 2.0, 3.0, 6.0)


class QuadratureError(RuntimeError):
    """The requested relative tolerance was not reached."""


# ---------------------------------------------------------------------------
# radial domains and model fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialDomain:
    """One piece of the glued surface reduced to its radial variable."""

    region: str
    variable: str
    lo: float
    hi: float
    density: Callable[[Array], Array]
    breaks: tuple[float, ...] = ()


def _p_outer(t: float, params: ModelParams, cutoff: SmoothCutoff) -> float:
    return params.profile_scale(t) * cutoff.b1 ** (1.0 / params.m)


def _sign_roots(fn: Callable[[Array], Array], lo: float, hi: float, n: int = 4001) -> list[float]:
    r = np.linspace(lo, hi, n)
    v = fn(r)
    idx = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]
    return [brentq(lambda x: float(fn(np.array([x]))[0]), r[i], r[i + 1], xtol=1e-15 * hi)
            for i in idx]


def region_domain(region: str, t: float, params: ModelParams,
                  cutoff: SmoothCutoff | None = None, R0: float | None = None) -> RadialDomain:
    """Radial reduction of ``P``, ``Q`` or ``K`` at scale ``t``.

    The density already contains the angular and ``u3`` integrals.
    """
    cutoff = cutoff or cutoff_for(t, params)
    m, l = params.m, params.l
    if region == "P":
        hi = _p_outer(t, params, cutoff)
        amp = params.amplitude(t)
        # where m A^-1 r2^(m-1) = 1, the two scales of the integrand cross
        r_star = (amp / m) ** (1.0 / (m - 1))
        breaks = tuple(x for x in (r_star,) if 0 < x < hi)

        def density(r):
            return 2 * np.pi * l * r * conformal_factor(r, t, params)

        return RadialDomain("P", "r2", 0.0, hi, density, breaks)
    if region == "Q":
        lo, hi = cutoff.b1, cutoff.b2
        edges = [x + s * cutoff.h for x in cutoff.knots for s in (-1.0, 0.0, 1.0)]
        for k in range(3):
            edges += _sign_roots(lambda r, k=k: profile_jet(r, t, params, cutoff, upto=k)[k],
                                 lo, hi)
        breaks = tuple(sorted(x for x in set(edges) if lo < x < hi))

        def density(r):
            r2, d1 = profile_jet(r, t, params, cutoff, upto=1)
            return 2 * np.pi * m * l * np.sqrt((1.0 + d1 ** 2) * (r ** 2 + r2 ** 2 / m ** 2))

        return RadialDomain("Q", "r1", lo, hi, density, breaks)
    if region == "K":
        hi = params.R0 if R0 is None else R0

        def density(r):
            return 2 * np.pi * m * l * r

        return RadialDomain("K", "r1", cutoff.b2, hi, density)
    raise ValueError(f"unknown region {region!r}")


def model_field(name: str, region: str, t: float, params: ModelParams,
                cutoff: SmoothCutoff | None = None) -> Callable[[Array], Array]:
    """The model field ``name`` in ``{"eps", "deps"}`` on ``region``."""
    cutoff = cutoff or cutoff_for(t, params)
    m = params.m
    if region == "K":
        return lambda r: np.zeros_like(np.asarray(r, float))
    if region == "P":
        amp = params.amplitude(t)
        if name == "eps":
            return lambda r: np.asarray(r, float) ** m / amp + np.asarray(r, float)
        if name == "deps":
            return lambda r: m * np.asarray(r, float) ** (m - 1) / amp + 1.0
    if region == "Q":
        if name == "eps":
            def eps(r):
                r2, d1 = profile_jet(np.asarray(r, float), t, params, cutoff, upto=1)
                return np.abs(r2) + np.abs(d1)
            return eps
        if name == "deps":
            def deps(r):
                _, d1, d2 = profile_jet(np.asarray(r, float), t, params, cutoff, upto=2)
                return np.abs(d1) + np.abs(d2)
            return deps
    raise ValueError(f"unknown field {name!r} on region {region!r}")


def _as_callable(fld, region, t, params, cutoff) -> Callable[[Array], Array]:
    if callable(fld):
        return fld
    if isinstance(fld, str):
        return model_field(fld, region, t, params, cutoff)
    value = float(fld)
    return lambda r: np.full_like(np.asarray(r, float), value)


# ---------------------------------------------------------------------------
# integrals and sup norms
# ---------------------------------------------------------------------------


_GL_CACHE: dict[int, tuple[Array, Array]] = {}


def _gauss_legendre(n: int) -> tuple[Array, Array]:
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def adaptive_gauss(fn: Callable[[Array], Array], edges: Sequence[float], tol: float,
                   order: int = 16, max_level: int = 40, max_cells: int = 200_000
                   ) -> tuple[float, float]:
    """Integrate a vectorized ``fn`` over consecutive ``edges``.

    Every cell is integrated with ``order`` and ``2 order`` Gauss-Legendre
    points; a cell is accepted when the two values agree to ``tol`` relative
    to the cell value or to its length share of the running total, otherwise
    it is bisected.  Returns the sum of the
    accepted higher-order values and the sum of their error estimates.
    """
    x1, w1 = _gauss_legendre(order)
    x2, w2 = _gauss_legendre(2 * order)
    cells = np.array([(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a], float)
    total, err = 0.0, 0.0
    for _ in range(max_level):
        if len(cells) == 0:
            break
        if len(cells) > max_cells:
            raise QuadratureError("subdivision budget exhausted")
        a, b = cells[:, :1], cells[:, 1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        lo = (fn((mid + half * x1).ravel()).reshape(-1, order) * w1).sum(axis=1) * half[:, 0]
        hi = (fn((mid + half * x2).ravel()).reshape(-1, 2 * order) * w2).sum(axis=1) * half[:, 0]
        e = np.abs(hi - lo)
        scale = abs(total) + np.abs(hi).sum()
        share = scale * (b[:, 0] - a[:, 0]) / (edges[-1] - edges[0])
        ok = e <= tol * np.maximum(np.abs(hi), share) + 1e-300
        ok |= (b[:, 0] - a[:, 0]) <= 1e-14 * max(abs(edges[-1]), 1e-300)
        total += float(hi[ok].sum())
        err += float(e[ok].sum())
        bad = cells[~ok]
        m = 0.5 * (bad[:, 0] + bad[:, 1])
        cells = np.concatenate([np.stack([bad[:, 0], m], 1), np.stack([m, bad[:, 1]], 1)])
    if len(cells):
        raise QuadratureError("maximum subdivision depth reached")
    return total, err


def integrate_norm(fld, region: str, p: float, t: float, params: ModelParams,
                   cutoff: SmoothCutoff | None = None, tol: float | None = None,
                   ) -> float:
    """``(int |fld|^p dV^t)^(1/p)`` over one piece of the glued surface.

    ``fld`` is a model-field name, a constant, or a callable of the radial
    variable of the region.  The radial interval is split at the cut-off
    knots, at sign changes of the profile and at geometric points toward the
    inner end; each piece is integrated adaptively.
    """
    if not any(abs(p - q) < 1e-12 for q in ALLOWED_P):
        raise ValueError(f"p must be one of {ALLOWED_P}, got {p}")
    cutoff = cutoff or cutoff_for(t, params)
    tol = params.quad_tol if tol is None else tol
    dom = region_domain(region, t, params, cutoff)
    f = _as_callable(fld, region, t, params, cutoff)
    if dom.hi <= dom.lo:
        return 0.0
    lo = dom.lo if dom.lo > 0 else dom.hi * 1e-12
    grading = np.geomspace(lo, dom.hi, 9)[1:-1]
    pts = sorted({dom.lo, dom.hi, *dom.breaks, *grading})

    def integrand(r):
        return np.abs(f(r)) ** p * dom.density(r)

    total, err = adaptive_gauss(integrand, pts, tol)
    if err > max(tol * abs(total), 1e-300):
        raise QuadratureError(f"{region}: error {err:.3g} for integral {total:.3g}")
    return total ** (1.0 / p)


@dataclass(frozen=True)
class SupResult:
    value: float
    argmax: float
    refinement_delta: float
    converged: bool


def _sup_mesh(dom: RadialDomain, n: int) -> Array:
    lo = dom.lo if dom.lo > 0 else dom.hi * 1e-9
    parts = [np.linspace(dom.lo, dom.hi, n), np.geomspace(lo, dom.hi, n), np.array(dom.breaks)]
    return np.unique(np.concatenate(parts))


def sup_norm(fld, region: str, t: float, params: ModelParams,
             cutoff: SmoothCutoff | None = None, n: int = 2000, rtol: float = 1e-3) -> SupResult:
    """Maximum of ``|fld|`` over a mesh refined twice.

    The reported value is the one on the finest mesh; ``refinement_delta`` is
    its relative change from the previous level.
    """
    cutoff = cutoff or cutoff_for(t, params)
    dom = region_domain(region, t, params, cutoff)
    f = _as_callable(fld, region, t, params, cutoff)
    vals = []
    for level in range(3):
        r = _sup_mesh(dom, n * 2 ** level)
        v = np.abs(f(r))
        i = int(np.argmax(v))
        vals.append((float(v[i]), float(r[i])))
    (prev, _), (best, where) = vals[1], vals[2]
    delta = abs(best - prev) / best if best > 0 else 0.0
    return SupResult(best, where, delta, delta <= rtol)


# ---------------------------------------------------------------------------
# the exact phase of the profile surface
# ---------------------------------------------------------------------------


def mean_abs_cos_power(p: float) -> float:
    """Mean of ``|cos x|^p`` over a period."""
    return math.exp(gammaln((p + 1) / 2) - gammaln(p / 2 + 1)) / math.sqrt(math.pi)


def profile_phase_norm(p: float, t: float, params: ModelParams,
                       cutoff: SmoothCutoff | None = None, tol: float | None = None) -> float:
    """``L^p`` norm over ``Q`` of ``Im Omega / vol`` on the profile surface.

    The angular factor is ``|cos((m+1) th/m)|^p``; its integral over the
    ``m``-fold angle is ``2 pi m`` times :func:`mean_abs_cos_power`.
    """
    cutoff = cutoff or cutoff_for(t, params)
    tol = params.quad_tol if tol is None else tol
    dom = region_domain("Q", t, params, cutoff)
    ang = 2 * np.pi * params.m * mean_abs_cos_power(p)

    def integrand(r):
        F, _, vol = profile_phase_parts(r, t, params, cutoff)
        return np.abs(F / vol) ** p * vol

    total, _ = adaptive_gauss(integrand, [dom.lo, *dom.breaks, dom.hi], tol)
    return (params.l * ang * total) ** (1.0 / p)


# ---------------------------------------------------------------------------
# exponent fits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares fit of ``log v = p log t + kappa log|log t| + c``."""

    exponent: float
    intercept: float
    log_power: float
    r_squared: float
    n_used: int
    skipped_zeros: int


def fit_exponent(t: Sequence[float], values: Sequence[float],
                 log_power: float | str | None = None) -> ExponentFit:
    """Fit a power law, optionally with a ``|log t|^kappa`` factor.

    ``log_power`` is ``None`` (pure power), a number (fixed ``kappa``, divided
    out before fitting) or ``"free"`` (``kappa`` fitted too).
    """
    t = np.asarray(t, float)
    v = np.asarray(values, float)
    keep = v > 0
    skipped = int(np.count_nonzero(~keep))
    t, v = t[keep], v[keep]
    if len(t) < 2:
        raise ValueError("need at least two positive samples to fit")
    x = np.log(t)
    y = np.log(v)
    L = np.log(np.abs(np.log(t)))
    kappa = 0.0
    if log_power == "free":
        M = np.stack([x, L, np.ones_like(x)], axis=1)
    else:
        if log_power is not None:
            kappa = float(log_power)
            y = y - kappa * L
        M = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(M, y, rcond=None)
    resid = y - M @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    if log_power == "free":
        kappa = float(coef[1])
    return ExponentFit(float(coef[0]), float(coef[-1]), kappa, float(min(max(r2, 0.0), 1.0)),
                       len(t), skipped)


@dataclass(frozen=True)
class NormCurve:
    """Samples of one quantity over the ``t`` grid and its fitted exponent."""

    quantity: str
    region: str
    m: int
    c1: float
    c2: float
    t: tuple[float, ...]
    values: tuple[float, ...]
    fitted_exponent: float
    log_corrected: bool
    predicted_exponent: float | str
    r_squared: float
    bound_kind: str = "equality-order"
    log_power: float = 0.0
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        t = np.asarray(self.t)
        if len(t) > 1 and not np.all(np.diff(t) < 0):
            raise ValueError("samples must be strictly decreasing in t")
        v = np.asarray(self.values)
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError(f"{self.quantity}: values must be finite and non-negative")

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.t, self.values))

    def as_dict(self) -> dict:
        pred = self.predicted_exponent
        return {"quantity": self.quantity, "region": self.region, "m": self.m,
                "c1": self.c1, "c2": self.c2, "fitted_exponent": self.fitted_exponent,
                "predicted_exponent": pred, "log_corrected": self.log_corrected,
                "log_power": self.log_power, "r_squared": self.r_squared,
                "bound_kind": self.bound_kind, "flags": list(self.flags)}


def make_curve(quantity: str, t: Sequence[float], values: Sequence[float], fit_mask: Array,
               *, region: str = "", params: ModelParams | None = None,
               predicted: float | str = "upper-bound-only", bound_kind: str = "equality-order",
               log_power: float | str | None = None, flags: Sequence[str] = ()) -> NormCurve:
    """Fit the masked samples and wrap everything in a :class:`NormCurve`."""
    params = params or ModelParams()
    t = np.asarray(t, float)
    v = np.asarray(values, float)
    fit = fit_exponent(t[fit_mask], v[fit_mask], log_power)
    flags = list(flags)
    if fit.skipped_zeros:
        flags.append(f"skipped {fit.skipped_zeros} zero samples")
    return NormCurve(quantity, region, params.m, params.c1, params.c2, tuple(map(float, t)),
                     tuple(map(float, v)), fit.exponent, log_power is not None,
                     predicted, fit.r_squared, bound_kind, fit.log_power, tuple(flags))


# ---------------------------------------------------------------------------
# sweeps over the t grid
# ---------------------------------------------------------------------------


def _split_tag(quantity: str) -> tuple[str, str]:
    if quantity not in QUANTITY_TAGS or "_" not in quantity:
        raise KeyError(f"not a phase-norm quantity: {quantity!r}")
    kind, region = quantity.rsplit("_", 1)
    if region not in ("P", "Q"):
        raise KeyError(f"not a phase-norm quantity: {quantity!r}")
    return kind, region


def predicted_for(quantity: str, params: ModelParams) -> tuple[Fraction, Fraction, str, str]:
    """``(exponent, log power, bound kind, table region)`` for a phase norm."""
    kind, region = _split_tag(quantity)
    m, c1, c2 = params.m, params.c1, params.c2
    if kind == "epsC0":
        return sup_exponents(m, c1, c2)[region], Fraction(0), "upper", region
    table_q = _LNORMS[kind][2]
    if region == "P":
        return p_region_exponent(table_q, m, c1), Fraction(0), "equality-order", "P"
    pred = predicted_exponent(table_q, m, c1, c2)
    return pred.exponent, pred.log_power, "upper", pred.region


def sup_bound(quantity: str, t: float, params: ModelParams) -> float:
    """The bound expression of the sup estimate with unit constants."""
    _, region = _split_tag(quantity)
    m, c1, c2 = params.m, params.c1, params.c2
    q = 1.0 - 1.0 / m
    if region == "P":
        return t ** c1 + t ** (q + c1 / m)
    return t ** (q - 2 * c2) + t ** (q * (1 - c1))


def quantity_value(quantity: str, t: float, params: ModelParams,
                   cutoff: SmoothCutoff | None = None) -> float:
    """One sample of a phase-norm quantity at scale ``t``."""
    kind, region = _split_tag(quantity)
    cutoff = cutoff or cutoff_for(t, params)
    if kind == "epsC0":
        return sup_norm("eps", region, t, params, cutoff).value
    fld, p, _ = _LNORMS[kind]
    return integrate_norm(fld, region, p, t, params, cutoff)


def norm_curve(quantity: str, params: ModelParams) -> NormCurve:
    """Sweep ``quantity`` over the ``t`` grid and fit its exponent.

    The fit uses the small-``t`` part of the grid (``k >= fit_min_exp``).
    Table rows carrying ``|log t|`` factors are fitted with that factor
    divided out.
    """
    ts = params.t_grid()
    if len(ts) < 6 or ts[0] / ts[-1] < 1e3:
        raise ValueError("the t grid needs at least 6 points over 3 decades")
    pred, logp, kind, region = predicted_for(quantity, params)
    vals = [quantity_value(quantity, float(t), params) for t in ts]
    flags = []
    if params.m in (2, 6, 11) and region not in ("P", "Q"):
        flags.append(f"m={params.m} is excluded from the global estimate")
    return make_curve(quantity, ts, vals, params.fit_mask(), region=region, params=params,
                      predicted=float(pred), bound_kind=kind,
                      log_power=float(logp) if logp else None, flags=flags)


@dataclass(frozen=True)
class Verification:
    quantity: str
    passed: bool
    predicted: float
    fitted: float
    tolerance: float
    bound_kind: str
    detail: dict = field(default_factory=dict)


def running_max_variation(ratios: Sequence[float]) -> float:
    """Relative growth of the running maximum over the second half of a sequence."""
    run = np.maximum.accumulate(np.asarray(ratios, float))
    half = len(run) // 2
    base = run[half - 1] if half > 0 else run[0]
    return float((run[-1] - base) / base) if base > 0 else 0.0


def bounded_ratio(t: Sequence[float], values: Sequence[float], exponent: float,
                  log_power: float = 0.0, max_growth: float = 0.2) -> dict:
    """``value / (t^p |log t|^k)`` over the grid and whether it stays bounded."""
    t = np.asarray(t, float)
    ratio = np.asarray(values, float) / (t ** exponent * np.abs(np.log(t)) ** log_power)
    growth = running_max_variation(ratio)
    return {"ratio": ratio.tolist(), "growth": growth, "bounded": bool(growth <= max_growth)}


def verify_curve(curve: NormCurve, tol: float, log_power: float = 0.0) -> Verification:
    pred = float(curve.predicted_exponent)
    fitted = curve.fitted_exponent
    if curve.bound_kind == "equality-order":
        ok = abs(fitted - pred) <= tol
        return Verification(curve.quantity, ok, pred, fitted, tol, curve.bound_kind)
    ratio = bounded_ratio(curve.t, curve.values, pred, log_power)
    ok = fitted >= pred - tol and ratio["bounded"]
    return Verification(curve.quantity, ok, pred, fitted, tol, curve.bound_kind,
                        {"growth": ratio["growth"]})


def verify_quantity(quantity: str, params: ModelParams) -> tuple[Verification, NormCurve]:
    """Compare a swept quantity with its predicted exponent.

    Equality-order quantities need ``|fitted - predicted| <= fit_tol``.
    Upper-bound quantities need ``fitted >= predicted - fit_tol`` and a
    bounded ratio ``value / t^predicted``.
    """
    curve = norm_curve(quantity, params)
    return verify_curve(curve, params.fit_tol, curve.log_power), curve


def sup_ratio_check(region: str, params: ModelParams, max_growth: float = 0.2) -> dict:
    """``sup |eps| / bound`` over the grid for the sup estimate on ``region``."""
    quantity = f"epsC0_{region}"
    ts = params.t_grid()
    sups = np.array([quantity_value(quantity, float(t), params) for t in ts])
    bound = np.array([sup_bound(quantity, float(t), params) for t in ts])
    ratio = sups / bound
    growth = running_max_variation(ratio)
    return {"t": ts.tolist(), "sup": sups.tolist(), "ratio": ratio.tolist(),
            "growth": growth, "passed": bool(growth <= max_growth)}


# ---------------------------------------------------------------------------
# the logarithmic partition of unity
# ---------------------------------------------------------------------------


def smoothstep7(x):
    """``35x^4 - 84x^5 + 70x^6 - 20x^7`` clamped to ``[0, 1]``."""
    x = np.clip(x, 0.0, 1.0)
    return x ** 4 * (35 - 84 * x + 70 * x ** 2 - 20 * x ** 3)


def smoothstep7_prime(x):
    x = np.asarray(x, float)
    inside = (x > 0) & (x < 1)
    return np.where(inside, 140 * x ** 3 * (1 - x) ** 3, 0.0)


@dataclass(frozen=True)
class LogProfile:
    """Decreasing ``G`` with ``G = 1`` on ``(0, a]`` and ``G = 0`` on ``[b, inf)``."""

    a: float
    b: float
    constant: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.a < self.b:
            raise ValueError("need 0 < a < b")

    def __call__(self, s):
        if self.constant:
            return np.ones_like(np.asarray(s, float))
        return 1.0 - smoothstep7((np.asarray(s, float) - self.a) / (self.b - self.a))

    def derivative(self, s):
        if self.constant:
            return np.zeros_like(np.asarray(s, float))
        return -smoothstep7_prime((np.asarray(s, float) - self.a) / (self.b - self.a)) / (
            self.b - self.a)


def dF_L3(t: float, m: int, l: float, G: LogProfile, tol: float = 1e-10) -> float:
    """``||dF^t||_(L^3)`` on the flat chart, ``r = t^s`` substituted.

    ``int |dF|^3 dV = 2 pi m l |log t|^-2 int_a^b |G'(s)|^3 t^-s ds``.
    """
    L = -math.log(t)
    val, _ = quad(lambda s: abs(float(G.derivative(s))) ** 3 * math.exp(s * L), G.a, G.b,
                  epsabs=0.0, epsrel=tol, limit=200)
    return (2 * math.pi * m * l * val / L ** 2) ** (1.0 / 3.0)


def one_minus_F_L65(t: float, m: int, l: float, amp: float, G: LogProfile,
                    tol: float = 1e-10) -> float:
    """``||1 - F^t||_(L^(6/5))`` on the scaled model, density as in the model chart.

    The density is ``r (1 + m^-2 amp^(2/m) r^(2(1-m)/m))`` over
    ``r in [0, t^a]`` and the full ``m``-fold angle.
    """
    L = -math.log(t)
    c = amp ** (2.0 / m) / m ** 2

    def dens(r):
        return r * (1.0 + c * r ** (2.0 * (1 - m) / m))

    def weight(r):
        if r <= 0:
            return 0.0
        return (1.0 - float(G(math.log(r) / -L))) ** 1.2

    tb, ta = t ** G.b, t ** G.a
    # on [0, t^b] the weight is 1 and the density integrates in closed form
    inner = 0.5 * tb ** 2 + 0.5 * m * c * tb ** (2.0 / m)
    # on [t^b, t^a] substitute r = t^s
    mid, _ = quad(lambda s: weight(t ** s) * dens(t ** s) * t ** s * L, G.a, G.b,
                  epsabs=0.0, epsrel=tol, limit=200)
    return (2 * math.pi * m * l * (inner + mid)) ** (5.0 / 6.0)


@dataclass(frozen=True)
class PartitionResult:
    dF: NormCurve
    one_minus_F: NormCurve
    b_prime: float
    dF_window: tuple[float, float]
    target_one_minus_F: float


def sobolev_partition_curves(params: ModelParams, a: float | None = None,
                             b: float | None = None, b_prime: float | None = None,
                             G: LogProfile | None = None) -> PartitionResult:
    """``||dF^t||_(L^3)`` and ``||1 - F^t||_(L^(6/5))`` over the ``t`` grid.

    ``a``, ``b`` default to ``params.a_exp``, ``params.b_exp`` and must satisfy
    ``0 < a < b < 1 - eta2``.  ``b_prime`` (default the midpoint of
    ``[a, b]``) sets the slower end of the admissible window for the
    ``dF`` exponent.
    """
    a = params.a_exp if a is None else a
    b = params.b_exp if b is None else b
    if not 0 < a < b < 1 - params.eta2:
        raise ValueError(f"need 0 < a < b < 1 - eta2, got a={a}, b={b}, eta2={params.eta2}")
    G = G or LogProfile(a, b)
    b_prime = 0.5 * (a + b) if b_prime is None else b_prime
    ts = params.t_grid()
    mask = params.fit_mask()
    dF = [dF_L3(float(t), params.m, params.l, G, params.quad_tol) for t in ts]
    omf = [one_minus_F_L65(float(t), params.m, params.l, params.a, G, params.quad_tol)
           for t in ts]
    target = 5 * a / (3 * params.m)
    c_dF = make_curve("dF_L3", ts, dF, mask, region="L'", params=params,
                      predicted=-b / 3, bound_kind="window", log_power=-1.0)
    c_omf = make_curve("oneMinusF_L65", ts, omf, mask, region="tL'", params=params,
                       predicted=target, bound_kind="equality-order")
    return PartitionResult(c_dF, c_omf, b_prime, (-b / 3 - 0.05, -b_prime / 3 + 0.05), target)


def lemma_summands(t: Sequence[float], m: int, a: float, eta1: float, eta2: float) -> dict:
    """The three summands bounding the profile slope on ``[b1, t^a]``.

    Returns their exponents, values on the grid, and the threshold condition
    ``eta2 > max(1/2 (1 + 1/m), (1 - a)/m)``.
    """
    t = np.asarray(t, float)
    ex = (2 * eta2 - 1 - 1 / m, eta2 - (1 - a) / m, (1 - 1 / m) * eta1)
    vals = [t ** e for e in ex]
    thr = max(0.5 * (1 + 1 / m), (1 - a) / m)
    return {"exponents": ex, "values": [v.tolist() for v in vals], "threshold": thr,
            "above_threshold": bool(eta2 > thr and 0 < eta1 < eta2 < 1 - a),
            "decreasing": [bool(np.all(np.diff(v) < 0)) for v in vals]}


def lemma_slope_check(params: ModelParams, a: float) -> dict:
    """Measured ``sup |r2'|`` over ``[b1, t^a]`` with ``b_i = t^(1 - eta_i)``
    next to the three summands."""
    pe = params.with_eta()
    ts = params.t_grid()
    sup = []
    for t in ts:
        cut = cutoff_for(float(t), pe)
        hi = float(t) ** a
        r = np.unique(np.concatenate([np.linspace(cut.b1, hi, 4000),
                                      np.geomspace(cut.b1, hi, 4000)]))
        sup.append(float(np.max(np.abs(profile_jet(r, float(t), pe, cut, upto=1)[1]))))
    out = lemma_summands(ts, params.m, a, params.eta1, params.eta2)
    out["sup_slope"] = sup
    return out


# ---------------------------------------------------------------------------
# scaling of the neighborhood criteria
# ---------------------------------------------------------------------------


def _extremum_growth(values: Sequence[float], kind: str) -> float:
    v = np.asarray(values, float)
    if kind == "max":
        return running_max_variation(v)
    run = np.minimum.accumulate(v)
    half = len(run) // 2
    base = run[half - 1]
    return float((base - run[-1]) / base) if base > 0 else 0.0


def connection_decay_slope(params: ModelParams, r_lo: float = 1e2, r_hi: float = 1e6) -> float:
    """Log-log slope of the base connection size at large radius."""
    r = np.geomspace(r_lo, r_hi, 50)
    c = connection_norm(r, params.amplitude(1.0), params.m)
    return float(np.polyfit(np.log(r), np.log(c), 1)[0])


def criteria_report(params: ModelParams, ts: Sequence[float] | None = None,
                    max_growth: float = 0.2, beta_kw: dict | None = None) -> dict:
    """Scaled sups over the grid and whether each stays bounded.

    Entries: ``beta_k = sup |nabla^k beta| t^k`` (``k = 0..3``),
    ``curv = sup |Rm| t^2``, ``proxy = pi / sqrt(sup |sec|) / t`` and
    ``slope = min slope / t``.  Upper quantities are bounded when their running
    maximum grows by at most ``max_growth`` over the second half of the grid,
    lower ones when their running minimum shrinks by at most that much.
    """
    ts = np.asarray(params.t_grid() if ts is None else ts, float)
    beta_kw = beta_kw or {}
    beta = np.array([beta_sup_norms(float(t), params, **beta_kw) * float(t) ** np.arange(4)
                     for t in ts])
    curv, proxy, slope = [], [], []
    for t in ts:
        t = float(t)
        cut = cutoff_for(t, params)
        curv.append(sup_curvature(t, params, cut)["all"] * t ** 2)
        proxy.append(conjugate_radius_proxy(t, params, cut)["proxy"] / t)
        slope.append(fiber_radius_check(t, params)["ratio"])
    entries = {f"beta_{k}": (beta[:, k], "max") for k in range(4)}
    entries.update({"curv": (np.array(curv), "max"), "proxy": (np.array(proxy), "min"),
                    "slope": (np.array(slope), "min")})
    out: dict = {"t": ts.tolist(), "entries": {}}
    for name, (vals, kind) in entries.items():
        growth = _extremum_growth(vals, kind)
        out["entries"][name] = {"values": vals.tolist(), "kind": kind,
                                "max": float(vals.max()), "min": float(vals.min()),
                                "growth": growth, "bounded": bool(growth <= max_growth)}
    slope_conn = connection_decay_slope(params)
    target = (2 - 3 * params.m) / params.m
    out["connection_slope"] = {"measured": slope_conn, "target": target,
                               "passed": bool(abs(slope_conn - target) <= 0.1)}
    out["passed"] = bool(all(e["bounded"] for e in out["entries"].values())
                         and out["connection_slope"]["passed"])
    return out


def region_summary(params: ModelParams) -> dict:
    """Region ids of ``(c1, c2)`` in both tables."""
    return {q: classify_region(params.m, params.c1, params.c2, table_for(q))
            for q in ("eps_L65", "deps_L6")}
