"""Flat ambient space, its calibrated forms and the model special Lagrangian.

The ambient space is ``C^2 x (R/lZ x R)`` with real coordinates
``(u1, u2, u3, v1, v2, v3)`` and ``z_k = u_k + i v_k``.  Tangent vectors are
real 6-vectors in that coordinate order.  The rotated complex coordinates

    zh1 = u1 + i u2,    zh2 = v1 - i v2

make the model family holomorphic:  ``psi^a`` sends ``w = x1 + i x2`` to
``(zh1, u3, zh2, v3) = (w**m, x3, a**(1/m) w, 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .config import ModelParams

Array = np.ndarray


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AmbientPoint:
    """A point of the flat ambient space; ``u3`` is reduced modulo ``l``."""

    u1: float
    u2: float
    u3: float
    v1: float
    v2: float
    v3: float
    l: float = 2.0 * np.pi

    def __post_init__(self) -> None:
        object.__setattr__(self, "u3", float(np.mod(self.u3, self.l)))

    @classmethod
    def from_rotated(cls, zh1: complex, u3: float, zh2: complex, v3: float,
                     l: float = 2.0 * np.pi) -> "AmbientPoint":
        return cls(zh1.real, zh1.imag, u3, zh2.real, -zh2.imag, v3, l)

    def as_array(self) -> Array:
        return np.array([self.u1, self.u2, self.u3, self.v1, self.v2, self.v3])

    @property
    def z(self) -> tuple[complex, complex, complex]:
        return (complex(self.u1, self.v1), complex(self.u2, self.v2), complex(self.u3, self.v3))

    @property
    def zh1(self) -> complex:
        return complex(self.u1, self.u2)

    @property
    def zh2(self) -> complex:
        return complex(self.v1, -self.v2)

    def rotated(self) -> tuple[complex, float, complex, float]:
        return (self.zh1, self.u3, self.zh2, self.v3)

    def distance(self, other: "AmbientPoint") -> float:
        """Flat distance, taking the shortest way around the ``u3`` circle."""
        d = self.as_array() - other.as_array()
        d[2] = (d[2] + 0.5 * self.l) % self.l - 0.5 * self.l
        return float(np.linalg.norm(d))


@dataclass(frozen=True)
class DomainPoint:
    """A point ``(x1, x2, x3)`` of the parameter domain ``C x S^1``."""

    x1: float
    x2: float
    x3: float
    l: float = 2.0 * np.pi

    def __post_init__(self) -> None:
        object.__setattr__(self, "x3", float(np.mod(self.x3, self.l)))

    @property
    def w(self) -> complex:
        return complex(self.x1, self.x2)

    def radius(self, m: int) -> float:
        """Downstairs radius ``|w|**m``."""
        return abs(self.w) ** m

    def angle(self, m: int) -> float:
        """Downstairs angle ``m * arg w`` in ``[0, 2 pi m)``."""
        return float(m * np.mod(np.angle(self.w), 2.0 * np.pi))


# ---------------------------------------------------------------------------
# forms
# ---------------------------------------------------------------------------


def _dz(vec: Array) -> Array:
    """Values of ``dz1, dz2, dz3`` on a tangent vector (last axis of length 6)."""
    vec = np.asarray(vec)
    return vec[..., 0:3] + 1j * vec[..., 3:6]


def _dzh(vec: Array) -> tuple[Array, Array]:
    vec = np.asarray(vec)
    return vec[..., 0] + 1j * vec[..., 1], vec[..., 3] - 1j * vec[..., 4]


def _wedge(a_v, a_w, b_v, b_w):
    return a_v * b_w - a_w * b_v


def omega_form(v: Array, w: Array) -> Array:
    """Flat Kaehler form ``sum du_k ^ dv_k`` on a pair of tangent vectors."""
    v = np.asarray(v, float)
    w = np.asarray(w, float)
    return np.sum(v[..., 0:3] * w[..., 3:6] - w[..., 0:3] * v[..., 3:6], axis=-1)


def holomorphic_volume(frame: Array) -> complex:
    """``dz1 ^ dz2 ^ dz3`` on three tangent vectors, the rows of ``frame``."""
    return complex(np.linalg.det(_dz(np.asarray(frame, float)).T))


def phase_of_frame(frame: Array) -> float:
    """``Im Omega / vol`` on an oriented 3-frame (0 for a calibrated frame)."""
    frame = np.asarray(frame, float)
    vol = np.sqrt(abs(np.linalg.det(frame @ frame.T)))
    if vol == 0.0:
        raise ValueError("degenerate frame")
    return holomorphic_volume(frame).imag / vol


def rotation_identity_residual(v: Array, w: Array) -> dict[str, float]:
    """Residuals of the two form identities relating the two complex views.

    ``du1^dv1 + du2^dv2 = Re(dzh1 ^ dzh2)`` and
    ``dz1^dz2 = -1/2 Im(dzh1^dzh1bar + dzh2^dzh2bar) - i Im(dzh1^dzh2)``,
    both evaluated on the pair ``(v, w)``.
    """
    v = np.asarray(v, float)
    w = np.asarray(w, float)
    dz_v, dz_w = _dz(v), _dz(w)
    a1v, a2v = _dzh(v)
    a1w, a2w = _dzh(w)

    lhs1 = v[0] * w[3] - w[0] * v[3] + v[1] * w[4] - w[1] * v[4]
    rhs1 = _wedge(a1v, a1w, a2v, a2w).real

    lhs2 = _wedge(dz_v[0], dz_w[0], dz_v[1], dz_w[1])
    h1 = _wedge(a1v, a1w, np.conj(a1v), np.conj(a1w))
    h2 = _wedge(a2v, a2w, np.conj(a2v), np.conj(a2w))
    rhs2 = -0.5 * (h1 + h2).imag - 1j * _wedge(a1v, a1w, a2v, a2w).imag
    return {"kaehler": float(abs(lhs1 - rhs1)), "volume": float(abs(lhs2 - rhs2))}


# ---------------------------------------------------------------------------
# the model family
# ---------------------------------------------------------------------------


def _rotated_to_array(zh1, u3, zh2, v3) -> Array:
    zh1, zh2 = np.asarray(zh1, complex), np.asarray(zh2, complex)
    u3, v3 = np.broadcast_arrays(np.asarray(u3, float), np.asarray(v3, float))
    return np.stack([zh1.real, zh1.imag, u3, zh2.real, -zh2.imag, v3], axis=-1)


def psi_rotated(w, x3, amplitude: float, m: int):
    """``psi^amplitude`` in rotated coordinates, vectorized over ``w``."""
    w = np.asarray(w, complex)
    return w ** m, np.asarray(x3, float), amplitude ** (1.0 / m) * w, np.zeros_like(np.real(w))


def psi_a(x: DomainPoint, params: ModelParams, amplitude: float | None = None) -> AmbientPoint:
    """The model special Lagrangian ``psi^a`` at a domain point."""
    amp = params.a if amplitude is None else amplitude
    zh1, u3, zh2, v3 = psi_rotated(x.w, x.x3, amp, params.m)
    return AmbientPoint.from_rotated(complex(zh1), float(u3), complex(zh2), float(v3), params.l)


def psi_a_scaled(x: DomainPoint, t: float, params: ModelParams,
                 route: Literal["amplitude", "partial"] = "amplitude") -> AmbientPoint:
    """The scaled member ``t * psi^a = psi^(a t^(m-1))`` at a domain point.

    ``route="amplitude"`` evaluates ``psi`` with amplitude ``a t^(m-1)``;
    ``route="partial"`` evaluates ``psi^a`` at the partially rescaled point
    ``(t^(-1/m) w, x3)`` and multiplies the result by ``t``.  The two agree.
    """
    if not t > 0:
        raise ValueError(f"scale must be positive, got {t}")
    m = params.m
    if route == "amplitude":
        return psi_a(x, params, params.amplitude(t))
    if route == "partial":
        w = t ** (-1.0 / m) * x.w
        zh1, u3, zh2, v3 = psi_rotated(w, x.x3, params.a, m)
        return AmbientPoint.from_rotated(t * complex(zh1), float(u3), t * complex(zh2),
                                         t * float(v3), params.l)
    raise ValueError(f"unknown route {route!r}")


def psi_jacobian(x: DomainPoint, t: float, params: ModelParams) -> Array:
    """Real ``6 x 3`` Jacobian of ``t * psi^a`` with respect to ``(x1, x2, x3)``."""
    m = params.m
    k = params.amplitude(t) ** (1.0 / m)
    d1 = m * x.w ** (m - 1)
    cols = []
    for dzh1, du3, dzh2 in ((d1, 0.0, k), (1j * d1, 0.0, 1j * k), (0.0, 1.0, 0.0)):
        cols.append(_rotated_to_array(dzh1, du3, dzh2, 0.0))
    return np.stack(cols, axis=-1)


def psi_frame(x: DomainPoint, t: float, params: ModelParams) -> Array:
    """Tangent frame (rows) of ``t * psi^a`` at ``x``."""
    return psi_jacobian(x, t, params).T


def sl_residual(x: DomainPoint, t: float, params: ModelParams) -> dict[str, float]:
    """Lagrangian and phase residuals of ``t * psi^a`` at ``x``."""
    e = psi_frame(x, t, params)
    om = max(abs(omega_form(e[i], e[j])) for i in range(3) for j in range(i + 1, 3))
    return {"omega": float(om), "phase": float(abs(phase_of_frame(e)))}


# ---------------------------------------------------------------------------
# potential and the symplectic cover
# ---------------------------------------------------------------------------


def potential_h(w, params: ModelParams, amplitude: float | None = None):
    """Potential ``h^a = m/(m+1) a^(1/m) Re(w^(m+1))`` of the model graph."""
    amp = params.a if amplitude is None else amplitude
    m = params.m
    return m / (m + 1.0) * amp ** (1.0 / m) * np.real(np.asarray(w, complex) ** (m + 1))


def potential_dh(w, params: ModelParams, amplitude: float | None = None):
    """Fiber coordinates ``(p1, p2)`` of ``dh^a``; ``p1 - i p2 = m a^(1/m) w^m``."""
    amp = params.a if amplitude is None else amplitude
    q = params.m * amp ** (1.0 / params.m) * np.asarray(w, complex) ** params.m
    return np.real(q), -np.imag(q)


def symplectic_cover_rotated(w, x3, p1, p2, p3, m: int):
    """``Phi(x, p) = (w^m, x3, (p1 - i p2) w^(1-m) / m, p3)`` in rotated form."""
    w = np.asarray(w, complex)
    q = np.asarray(p1, float) - 1j * np.asarray(p2, float)
    return w ** m, np.asarray(x3, float), q * w ** (1 - m) / m, np.asarray(p3, float)


def symplectic_cover_phi(x: DomainPoint, p: tuple[float, float, float],
                         params: ModelParams) -> AmbientPoint:
    """The map ``Phi`` from ``T^*(C^* x S^1)`` to the ambient space."""
    if x.w == 0:
        raise ValueError("Phi is only defined away from w = 0")
    zh1, u3, zh2, v3 = symplectic_cover_rotated(x.w, x.x3, *p, params.m)
    return AmbientPoint.from_rotated(complex(zh1), float(u3), complex(zh2), float(v3), params.l)


def graph_matches_image(x: DomainPoint, params: ModelParams,
                        amplitude: float | None = None) -> float:
    """Defect of ``Phi(graph dh^a)`` from the image of ``psi^a``.

    The image is cut out by ``zh2^m = a zh1`` and ``v3 = 0``; the return value
    is ``|a zh1 - zh2^m| + |v3|`` at ``Phi(x, dh^a(x))``.
    """
    amp = params.a if amplitude is None else amplitude
    p1, p2 = potential_dh(x.w, params, amp)
    y = symplectic_cover_phi(x, (float(p1), float(p2), 0.0), params)
    return float(abs(amp * y.zh1 - y.zh2 ** params.m) + abs(y.v3))


def phi_pullback_defect(x: DomainPoint, p: tuple[float, float, float], params: ModelParams,
                        step: float = 1e-6) -> float:
    """Max entry of ``Phi^* omega' - sum dx_k ^ dp_k`` at ``(x, p)``.

    The Jacobian is taken by central differences, so the defect is of order
    ``step**2`` for a symplectic ``Phi``.
    """
    base = np.array([x.x1, x.x2, x.x3, *p], float)

    def phi(y):
        zh1, u3, zh2, v3 = symplectic_cover_rotated(complex(y[0], y[1]), y[2], y[3], y[4], y[5],
                                                     params.m)
        return _rotated_to_array(zh1, u3, zh2, v3)

    jac = np.empty((6, 6))
    for j in range(6):
        dy = np.zeros(6)
        dy[j] = step
        jac[:, j] = (phi(base + dy) - phi(base - dy)) / (2 * step)
    std = np.zeros((6, 6))
    std[0:3, 3:6] = np.eye(3)
    std -= std.T
    pulled = jac.T @ std @ jac
    return float(np.max(np.abs(pulled - std)))
