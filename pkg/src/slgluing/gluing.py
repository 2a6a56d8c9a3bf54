"""Smooth cut-off, glued profile and glued immersions of the scaled family.

The cut-off ``chi`` is built by mollifying a piecewise-linear function
``chi_hat`` whose third antiderivative-like integral gives a function equal to
1 below ``b1`` and 0 above ``b2``.  Concretely ``chi''' = rho_h * chi_hat``
with three signed triangular bumps in ``chi_hat``; the bump heights are fixed
by requiring ``chi'' = chi' = chi = 0`` at ``b2``.  Every derivative of
``chi`` up to order four is an explicit piecewise polynomial.

The glued profile over the downstairs radius ``r1`` is

    r2(r1) = a^(1/m) T [ m/(m+1) chi'(r1) + chi(r1) r1^(1/m) ],   T = t^((m-1)/m),

which is the model radius ``a^(1/m) T r1^(1/m)`` on ``P = {r1 <= b1}`` and the
fixed plane ``r2 = 0`` on ``K = {r1 >= b2}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial
from typing import Literal

import numpy as np
from numpy.polynomial import Polynomial

from .config import ModelParams
from .flat_model import AmbientPoint, DomainPoint, _rotated_to_array

Array = np.ndarray

#: fractions of the transition interval at which chi_hat has its peaks and zeros
KNOT_FRACTIONS = (1 / 8, 1 / 4, 1 / 2, 3 / 4, 7 / 8)
#: mollifier half-width as a fraction of the transition interval
MOLLIFIER_FRACTION = 1 / 64


class CutoffError(ValueError):
    """Raised when a cut-off cannot be built for the requested radii."""


# ---------------------------------------------------------------------------
# mollified hinge kernels
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _kernel_pieces() -> dict[int, tuple[Polynomial, Polynomial]]:
    """Unit-width kernels ``R^[n](y)`` as (inner, outer) polynomial pieces.

    ``phi(s) = 35/32 (1 - s^2)^3`` on ``[-1, 1]`` and
    ``R^[n](y) = int_{-1}^{min(y,1)} phi(s) (y-s)^(n+1) / (n+1)! ds`` for
    ``n >= 0``; ``R^[-1]`` is the distribution function of ``phi`` and
    ``R^[-2] = phi``.  ``R^[n]`` vanishes for ``y <= -1``; the inner piece is
    valid on ``[-1, 1]`` and the outer piece on ``[1, inf)``.
    """
    s = Polynomial([0.0, 1.0])
    phi = 35.0 / 32.0 * (1 - s ** 2) ** 3
    prims = {}
    for i in range(6):
        prims[i] = (phi * (-s) ** i).integ(lbnd=-1.0)
    out = {-2: (phi, Polynomial([0.0])), -1: (prims[0], Polynomial([prims[0](1.0)]))}
    for n in range(0, 4):
        k = n + 1
        inner = Polynomial([0.0])
        outer = Polynomial([0.0])
        for j in range(k + 1):
            coef = comb(k, j) / factorial(k)
            inner = inner + coef * s ** j * prims[k - j]
            outer = outer + coef * prims[k - j](1.0) * s ** j
        out[n] = (inner, outer)
    return out


def _kernel_table() -> tuple[Array, Array]:
    """Coefficient tables ``(inner, outer)`` of shape ``(6, deg+1)``, index ``n+2``."""
    pieces = _kernel_pieces()
    deg = max(max(p.degree(), q.degree()) for p, q in pieces.values())
    inner = np.zeros((6, deg + 1))
    outer = np.zeros((6, deg + 1))
    for n, (p, q) in pieces.items():
        inner[n + 2, : p.degree() + 1] = p.coef
        outer[n + 2, : q.degree() + 1] = q.coef
    return inner, outer


_INNER, _OUTER = _kernel_table()


def _polyval(coef, y, xp):
    out = xp.zeros_like(y)
    for c in coef[::-1]:
        out = out * y + c
    return out


def unit_kernel(n: int, y, xp=np):
    """Evaluate ``R^[n]`` at ``y`` with array module ``xp`` (numpy or jax.numpy)."""
    inner = _polyval(_INNER[n + 2], y, xp)
    outer = _polyval(_OUTER[n + 2], y, xp)
    return xp.where(y <= -1.0, 0.0, xp.where(y >= 1.0, outer, inner))


# ---------------------------------------------------------------------------
# the cut-off
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmoothCutoff:
    """A ``C^4`` cut-off equal to 1 on ``[0, b1]`` and 0 on ``[b2, inf)``.

    ``chi(r) = 1 + sum_k w_k h^4 R^[3]((r - x_k)/h)``, where ``x_k`` are the
    corners of the piecewise-linear ``chi_hat`` and ``w_k`` its slope jumps.
    """

    t: float
    b1: float
    b2: float
    knots: tuple[float, ...]
    amplitudes: tuple[float, float, float]
    h: float
    weights: tuple[float, ...] = field(repr=False)
    preasymptotic: bool = False
    C0: float = float("nan")

    def derivative(self, r, order: int = 0, xp=np):
        """``d^order chi / dr^order`` at ``r`` for ``order`` in ``0..4``."""
        if not 0 <= order <= 4:
            raise ValueError("order must be between 0 and 4")
        n = 3 - order
        r = xp.asarray(r, dtype=float) if xp is np else r
        acc = xp.zeros_like(r) + (1.0 if order == 0 else 0.0)
        scale = self.h ** (n + 1)
        for xk, wk in zip(self.knots, self.weights):
            acc = acc + wk * scale * unit_kernel(n, (r - xk) / self.h, xp)
        # outside (b1, b2) the sum is constant analytically; drop the rounding residue
        inner = 1.0 if order == 0 else 0.0
        return xp.where(r >= self.b2, 0.0, xp.where(r <= self.b1, inner, acc))

    def __call__(self, r, xp=np):
        return self.derivative(r, 0, xp)

    def jet(self, r, upto: int = 4, xp=np) -> list:
        return [self.derivative(r, k, xp) for k in range(upto + 1)]

    def chi_hat(self, r) -> Array:
        """The piecewise-linear function whose mollification is ``chi'''``."""
        r = np.asarray(r, float)
        return sum(wk * np.maximum(r - xk, 0.0) for xk, wk in zip(self.knots, self.weights))

    def certify(self, samples: int = 10_000) -> dict[str, float]:
        """Sampled ``sup |chi^(k)| b2^k`` for ``k = 1, 2, 3`` and their maximum."""
        r = np.linspace(self.b1, self.b2, samples)
        out = {f"k{k}": float(np.max(np.abs(self.derivative(r, k))) * self.b2 ** k)
               for k in (1, 2, 3)}
        out["C0"] = max(out.values())
        return out


def _hinge_weights(knots: Array) -> Array:
    """Slope jumps of chi_hat as a linear map of the three bump heights.

    chi_hat vanishes at knots 0, 2, 4, 6 and takes heights ``(A1, A2, A3)`` at
    knots 1, 3, 5.  Returns the ``7 x 3`` matrix ``W`` with ``weights = W A``.
    """
    vals = np.zeros((7, 3))
    vals[1, 0] = vals[3, 1] = vals[5, 2] = 1.0
    slopes = np.diff(vals, axis=0) / np.diff(knots)[:, None]
    padded = np.vstack([np.zeros((1, 3)), slopes, np.zeros((1, 3))])
    return np.diff(padded, axis=0)


def build_cutoff(t: float, b1: float, b2: float, *, allow_preasymptotic: bool = False,
                 certify_samples: int = 10_000) -> SmoothCutoff:
    """Construct the cut-off for the transition interval ``[b1, b2]``.

    The corners of ``chi_hat`` sit at fixed fractions ``KNOT_FRACTIONS`` of the
    interval ``[b1, b2]``, with the end corners pulled in by the mollifier
    half-width ``h = (b2 - b1)/64`` so that the support of ``chi - 1`` and of
    ``chi`` stays inside the prescribed sets.

    Parameters
    ----------
    t : float
        Scale parameter, recorded for reference.
    b1, b2 : float
        Inner and outer radii, ``0 < b1 < b2``.
    allow_preasymptotic : bool
        By default ``b1 >= b2/8`` is rejected, since the construction is meant
        for ``b1 << b2``.  Set to True to build it anyway; the result is then
        flagged ``preasymptotic``.

    Raises
    ------
    CutoffError
        If ``b1 >= b2`` or, without ``allow_preasymptotic``, ``b1 >= b2/8``,
        or if the bump heights do not have the expected sign pattern.
    """
    if not 0 < b1 < b2:
        raise CutoffError(f"need 0 < b1 < b2, got b1={b1}, b2={b2}")
    pre = b1 >= b2 / 8
    if pre and not allow_preasymptotic:
        raise CutoffError(f"b1={b1:.3g} is not below b2/8={b2 / 8:.3g}")
    span = b2 - b1
    h = MOLLIFIER_FRACTION * span
    knots = np.array([b1 + h, *(b1 + f * span for f in KNOT_FRACTIONS), b2 - h])
    W = _hinge_weights(knots)

    # conditions at b2: chi'' = 0, chi' = 0, chi - 1 = -1
    M = np.zeros((3, 3))
    for row, n in enumerate((1, 2, 3)):
        y = (b2 - knots) / h
        M[row] = (h ** (n + 1) * unit_kernel(n, y)) @ W
    amps = np.linalg.solve(M, np.array([0.0, 0.0, -1.0]))
    if not (amps[0] < 0 < amps[1] and amps[2] < 0):
        raise CutoffError(f"unexpected bump heights {amps}")
    weights = W @ amps
    cut = SmoothCutoff(t=float(t), b1=float(b1), b2=float(b2), knots=tuple(knots),
                       amplitudes=tuple(float(a) for a in amps), h=float(h),
                       weights=tuple(float(w) for w in weights), preasymptotic=bool(pre))
    c0 = cut.certify(certify_samples)["C0"] if certify_samples else float("nan")
    return SmoothCutoff(**{**cut.__dict__, "C0": c0})


def cutoff_for(t: float, params: ModelParams, **kw) -> SmoothCutoff:
    """Cut-off for ``b1 = t^c1``, ``b2 = t^c2``, allowing the pre-asymptotic range."""
    kw.setdefault("allow_preasymptotic", True)
    return build_cutoff(t, params.b1(t), params.b2(t), **kw)


# ---------------------------------------------------------------------------
# regions and the profile
# ---------------------------------------------------------------------------

Region = Literal["P", "Q", "K"]


def region_of_radius(r1: float, b1: float, b2: float) -> Region:
    if r1 <= b1:
        return "P"
    if r1 <= b2:
        return "Q"
    return "K"


def region_of(x: DomainPoint, t: float, params: ModelParams) -> Region:
    """Region label of a domain point by its downstairs radius ``|w|^m``."""
    return region_of_radius(x.radius(params.m), params.b1(t), params.b2(t))


def region_mask(r1, b1: float, b2: float) -> dict[str, Array]:
    r1 = np.asarray(r1, float)
    return {"P": r1 <= b1, "Q": (r1 > b1) & (r1 <= b2), "K": r1 > b2}


def profile_jet(r1, t: float, params: ModelParams, cutoff: SmoothCutoff,
                upto: int = 3, xp=np) -> list:
    """``[r2, r2', ..., r2^(upto)]`` of the glued profile at ``r1 > 0``.

    ``r2`` is signed; in the pre-asymptotic range the ``chi'`` term can make it
    negative near ``b2``.  ``upto`` is at most 3 (needs ``chi^(4)``).
    """
    if upto > 3:
        raise ValueError("the profile is only C^3 in closed form")
    m = params.m
    k = params.profile_scale(t)
    c = m / (m + 1.0)
    chi = cutoff.jet(r1, upto + 1, xp)
    # derivatives of rho = r^(1/m)
    rho = []
    coef = 1.0
    for j in range(upto + 1):
        rho.append(coef * r1 ** (1.0 / m - j))
        coef *= 1.0 / m - j
    out = []
    for n in range(upto + 1):
        val = c * chi[n + 1]
        for j in range(n + 1):
            val = val + comb(n, j) * chi[n - j] * rho[j]
        out.append(k * val)
    return out


def glued_profile(r1, t: float, params: ModelParams, cutoff: SmoothCutoff | None = None):
    """Signed profile radius ``r2(r1)``; vectorized over ``r1 >= 0``."""
    cutoff = cutoff or cutoff_for(t, params)
    r1 = np.asarray(r1, float)
    if np.any(r1 < 0):
        raise ValueError("radius must be non-negative")
    safe = np.where(r1 > 0, r1, 1.0)
    val = profile_jet(safe, t, params, cutoff, upto=0)[0]
    return np.where(r1 > 0, val, 0.0)


def profile_sign_changes(t: float, params: ModelParams, cutoff: SmoothCutoff | None = None,
                         samples: int = 4001) -> int:
    """Number of sign changes of the profile on ``[b1, b2]``."""
    cutoff = cutoff or cutoff_for(t, params)
    r = np.linspace(cutoff.b1, cutoff.b2 * (1 - 1e-9), samples)
    s = np.sign(glued_profile(r, t, params, cutoff))
    s = s[s != 0]
    return int(np.count_nonzero(np.diff(s)))


# ---------------------------------------------------------------------------
# immersions
# ---------------------------------------------------------------------------


def profile_surface(r1, theta1, u3, t: float, params: ModelParams, cutoff: SmoothCutoff) -> Array:
    """Ambient coordinates of ``(r1 e^(i th1), u3, r2(r1) e^(i th1/m), 0)``."""
    r1 = np.asarray(r1, float)
    theta1 = np.asarray(theta1, float)
    r2 = glued_profile(r1, t, params, cutoff)
    return _rotated_to_array(r1 * np.exp(1j * theta1), u3,
                             r2 * np.exp(1j * theta1 / params.m), 0.0)


def profile_frame(r1: float, theta1: float, t: float, params: ModelParams,
                  cutoff: SmoothCutoff) -> Array:
    """Tangent frame (rows ``d/dr1, d/dth1, d/du3``) of the profile surface."""
    m = params.m
    r2, r2p = profile_jet(r1, t, params, cutoff, upto=1)
    e1, em = np.exp(1j * theta1), np.exp(1j * theta1 / m)
    rows = [
        _rotated_to_array(e1, 0.0, r2p * em, 0.0),
        _rotated_to_array(1j * r1 * e1, 0.0, 1j * r2 / m * em, 0.0),
        _rotated_to_array(0.0, 1.0, 0.0, 0.0),
    ]
    return np.stack(rows)


def graph_scale_function(w, t: float, params: ModelParams, cutoff: SmoothCutoff):
    """``zh2`` of the exact graph immersion ``Phi(graph d(chi T h^a))``."""
    m = params.m
    w = np.asarray(w, complex)
    r = np.abs(w) ** m
    chi, dchi = cutoff.jet(r, 1)
    k = params.profile_scale(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(r > 0, m / (m + 1.0) * dchi * r * np.real(w ** (m + 1)) / w ** m, 0.0)
    return k * (chi * w + corr)


def glued_immersion(x: DomainPoint, t: float, params: ModelParams,
                    cutoff: SmoothCutoff | None = None,
                    variant: Literal["profile", "graph"] = "profile") -> AmbientPoint:
    """The glued immersion ``iota^t`` at a domain point.

    ``variant="profile"`` uses the rotationally symmetric profile surface
    ``(w^m, x3, r2(|w|^m) e^(i arg w), 0)``.  ``variant="graph"`` uses the
    image under ``Phi`` of the graph of ``d(chi(|w|^m) T h^a)``, which is
    Lagrangian everywhere.  Both equal ``t psi^a`` on ``P`` and the plane
    ``zh2 = v3 = 0`` on ``K``.
    """
    cutoff = cutoff or cutoff_for(t, params)
    m = params.m
    w = x.w
    zh1 = w ** m
    if variant == "profile":
        r1 = abs(w) ** m
        r2 = float(glued_profile(r1, t, params, cutoff))
        zh2 = r2 * np.exp(1j * np.angle(w)) if r1 > 0 else 0j
    elif variant == "graph":
        zh2 = complex(graph_scale_function(w, t, params, cutoff))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return AmbientPoint.from_rotated(zh1, x.x3, zh2, 0.0, params.l)


def glued_jacobian(x: DomainPoint, t: float, params: ModelParams, cutoff: SmoothCutoff,
                   variant: Literal["profile", "graph"] = "graph", step: float = 1e-7) -> Array:
    """``6 x 3`` Jacobian in ``(x1, x2, x3)`` by central differences."""
    base = np.array([x.x1, x.x2, x.x3])
    cols = []
    for j in range(3):
        d = np.zeros(3)
        d[j] = step
        plus = glued_immersion(DomainPoint(*(base + d), params.l), t, params, cutoff, variant)
        minus = glued_immersion(DomainPoint(*(base - d), params.l), t, params, cutoff, variant)
        diff = plus.as_array() - minus.as_array()
        diff[2] = (diff[2] + 0.5 * params.l) % params.l - 0.5 * params.l
        cols.append(diff / (2 * step))
    return np.stack(cols, axis=-1)
