"""Induced geometry of the glued family.

Two charts are used for the glued surface.  On ``P`` the image is the
holomorphic curve ``zh2^m = A zh1`` (``A = a t^(m-1)``), written in the polar
chart ``(r2, th2, u3)`` of ``zh2`` where the metric is conformal,

    g = lam(r2) (dr2^2 + r2^2 dth2^2) + du3^2,   lam = 1 + m^2 A^-2 r2^(2(m-1)).

Everywhere else the profile chart ``(r1, th1, u3)`` is used, with
``g = E dr1^2 + G dth1^2 + du3^2``, ``E = 1 + r2'^2``, ``G = r1^2 + r2^2/m^2``.

Pointwise Christoffel symbols and curvature come from automatic
differentiation of these metric formulas (jax, float64).  The sweeps use the
closed-form Gaussian curvature, which the pointwise code cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, partial
from typing import Callable

import jax
import jax.numpy as jnp
import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import subspace_angles

from .config import ModelParams
from .flat_model import DomainPoint, holomorphic_volume
from .gluing import SmoothCutoff, cutoff_for, profile_frame, profile_jet

jax.config.update("jax_enable_x64", True)

Array = np.ndarray


# ---------------------------------------------------------------------------
# metric formulas
# ---------------------------------------------------------------------------


def conformal_factor(r2, t: float, params: ModelParams, xp=np):
    """``lam(r2) = 1 + m^2 A^-2 r2^(2(m-1))`` of the holomorphic piece."""
    m = params.m
    c = m ** 2 / params.amplitude(t) ** 2
    return 1.0 + c * r2 ** (2 * (m - 1))


def profile_metric_diag(r1, t: float, params: ModelParams, cutoff: SmoothCutoff, xp=np):
    """``(E, G)`` of the profile chart at ``r1 > 0``."""
    r2, r2p = profile_jet(r1, t, params, cutoff, upto=1, xp=xp)
    return 1.0 + r2p ** 2, r1 ** 2 + r2 ** 2 / params.m ** 2


def metric_function(chart: str, t: float, params: ModelParams,
                    cutoff: SmoothCutoff | None = None) -> Callable:
    """``q -> g(q)`` as a jax-traceable function for the given chart.

    ``chart`` is ``"holomorphic"`` (``(r2, th2, u3)``), ``"profile"``
    (``(r1, th1, u3)``) or ``"flat"`` (``(r1, th1, u3)`` on ``K``).
    """
    if chart == "holomorphic":
        def g(q):
            lam = conformal_factor(q[0], t, params, jnp)
            return jnp.diag(jnp.stack([lam, lam * q[0] ** 2, jnp.ones_like(lam)]))
    elif chart == "profile":
        if cutoff is None:
            raise ValueError("the profile chart needs a cutoff")

        def g(q):
            E, G = profile_metric_diag(q[0], t, params, cutoff, jnp)
            return jnp.diag(jnp.stack([E, G, jnp.ones_like(E)]))
    elif chart == "flat":
        def g(q):
            return jnp.diag(jnp.stack([jnp.ones_like(q[0]), q[0] ** 2, jnp.ones_like(q[0])]))
    else:
        raise ValueError(f"unknown chart {chart!r}")
    return g


def christoffel(metric: Callable, q) -> jnp.ndarray:
    """``Gamma[i, j, k] = Gamma^i_{jk}`` of ``metric`` at ``q``."""
    g = metric(q)
    dg = jax.jacfwd(metric)(q)  # dg[i, j, k] = d_k g_ij
    ginv = jnp.linalg.inv(g)
    lower = 0.5 * (jnp.einsum("lkj->ljk", dg) + jnp.einsum("ljk->ljk", dg)
                   - jnp.einsum("jkl->ljk", dg))
    return jnp.einsum("il,ljk->ijk", ginv, lower)


def riemann(metric: Callable, q) -> jnp.ndarray:
    """``R[i, j, k, l] = R^i_{jkl}`` with ``R(d_k, d_l) d_j = R^i_{jkl} d_i``."""
    gam = partial(christoffel, metric)
    G = gam(q)
    dG = jax.jacfwd(gam)(q)  # dG[i, j, k, l] = d_l Gamma^i_{jk}
    term1 = jnp.einsum("iljk->ijkl", dG)  # d_k Gamma^i_{lj}
    term2 = jnp.einsum("ikjl->ijkl", dG)  # d_l Gamma^i_{kj}
    quad = jnp.einsum("ikp,plj->ijkl", G, G) - jnp.einsum("ilp,pkj->ijkl", G, G)
    return term1 - term2 + quad


def riemann_norm(metric: Callable, q) -> float:
    """Full tensor norm ``sqrt(R_ijkl R^ijkl)``."""
    g = metric(q)
    ginv = jnp.linalg.inv(g)
    R = riemann(metric, q)
    low = jnp.einsum("ia,ajkl->ijkl", g, R)
    up = jnp.einsum("ia,jb,kc,ld,abcd->ijkl", ginv, ginv, ginv, ginv, low)
    return float(jnp.sqrt(jnp.abs(jnp.sum(low * up))))


@dataclass(frozen=True)
class MetricSample:
    """Induced metric data at one point."""

    point: tuple[float, float, float]
    chart: str
    region: str
    g: Array
    sqrt_det_g: float
    christoffel: Array
    riemann_norm: float


def _chart_point(x: DomainPoint, t: float, params: ModelParams, cutoff: SmoothCutoff):
    m = params.m
    r1 = x.radius(m)
    if r1 <= cutoff.b1:
        r2 = params.amplitude(t) ** (1.0 / m) * abs(x.w)
        return "holomorphic", "P", (r2, float(np.mod(np.angle(x.w), 2 * np.pi)), x.x3)
    region = "Q" if r1 <= cutoff.b2 else "K"
    chart = "profile" if region == "Q" else "flat"
    return chart, region, (r1, x.angle(m), x.x3)


def induced_metric(x: DomainPoint, t: float, params: ModelParams,
                   cutoff: SmoothCutoff | None = None) -> MetricSample:
    """Metric, volume density, Christoffel symbols and ``|Rm|`` at ``x``.

    The chart is chosen by region: holomorphic on ``P``, profile on ``Q``,
    flat on ``K``.  The axis ``w = 0`` is a coordinate singularity and is
    rejected.
    """
    cutoff = cutoff or cutoff_for(t, params)
    if x.w == 0:
        raise ValueError("polar charts are singular on the axis")
    chart, region, q = _chart_point(x, t, params, cutoff)
    metric = metric_function(chart, t, params, cutoff)
    qa = jnp.asarray(q, dtype=jnp.float64)
    g = np.asarray(metric(qa))
    return MetricSample(point=tuple(float(v) for v in q), chart=chart, region=region, g=g,
                        sqrt_det_g=float(np.sqrt(np.linalg.det(g))),
                        christoffel=np.asarray(christoffel(metric, qa)),
                        riemann_norm=riemann_norm(metric, qa))


def curvature(x: DomainPoint, t: float, params: ModelParams,
              cutoff: SmoothCutoff | None = None) -> float:
    """``|Rm(g^t)|`` at ``x`` by automatic differentiation."""
    return induced_metric(x, t, params, cutoff).riemann_norm


# ---------------------------------------------------------------------------
# closed-form curvature for sweeps
# ---------------------------------------------------------------------------


def gaussian_curvature_holomorphic(r2, t: float, params: ModelParams) -> Array:
    """``K = -2 n^2 c r^(2n-2) / lam^3`` with ``n = m-1``, ``c = m^2 A^-2``."""
    m = params.m
    n = m - 1
    c = m ** 2 / params.amplitude(t) ** 2
    r2 = np.asarray(r2, float)
    lam = 1.0 + c * r2 ** (2 * n)
    return -2.0 * n ** 2 * c * r2 ** (2 * n - 2) / lam ** 3


def gaussian_curvature_profile(r1, t: float, params: ModelParams, cutoff: SmoothCutoff) -> Array:
    """Gaussian curvature of ``E dr^2 + G dth^2`` from the profile jet."""
    m = params.m
    r1 = np.asarray(r1, float)
    r2, d1, d2 = profile_jet(r1, t, params, cutoff, upto=2)
    E = 1.0 + d1 ** 2
    Ep = 2.0 * d1 * d2
    G = r1 ** 2 + r2 ** 2 / m ** 2
    Gp = 2.0 * r1 + 2.0 * r2 * d1 / m ** 2
    Gpp = 2.0 + 2.0 * (d1 ** 2 + r2 * d2) / m ** 2
    EG = E * G
    return -Gpp / (2.0 * EG) + Gp * (Ep * G + E * Gp) / (4.0 * EG ** 2)


def _p_radius(t: float, params: ModelParams, b1: float) -> float:
    """``r2`` at the outer edge of ``P``."""
    return params.profile_scale(t) * b1 ** (1.0 / params.m)


def curvature_profile_samples(t: float, params: ModelParams, cutoff: SmoothCutoff | None = None,
                              n: int = 4000) -> dict[str, tuple[Array, Array]]:
    """``(radius, |K|)`` samples over ``P`` (in ``r2``) and ``Q`` (in ``r1``)."""
    cutoff = cutoff or cutoff_for(t, params)
    rp = _p_radius(t, params, cutoff.b1)
    r2 = np.geomspace(rp * 1e-6, rp, n)
    qr = np.linspace(cutoff.b1, cutoff.b2, n)
    return {"P": (r2, np.abs(gaussian_curvature_holomorphic(r2, t, params))),
            "Q": (qr, np.abs(gaussian_curvature_profile(qr, t, params, cutoff)))}


def sup_curvature(t: float, params: ModelParams, cutoff: SmoothCutoff | None = None,
                  n: int = 4000) -> dict[str, float]:
    """Sup of ``|Rm| = 2|K|`` over ``P``, ``Q`` and overall (``K`` is flat)."""
    samples = curvature_profile_samples(t, params, cutoff, n)
    out = {reg: float(2.0 * np.max(vals)) for reg, (_, vals) in samples.items()}
    out["all"] = max(out.values())
    return out


def conjugate_radius_proxy(t: float, params: ModelParams, cutoff: SmoothCutoff | None = None,
                           n: int = 4000) -> dict[str, float]:
    """``pi / sqrt(sup |sec|)`` with its change under one mesh doubling.

    The sectional curvatures of a surface times a circle are ``K`` and 0, so
    ``sup |sec| = sup |K|``.  Also reports the length of the only essential
    coordinate loop, the ``u3`` circle.
    """
    cutoff = cutoff or cutoff_for(t, params)
    coarse = 0.5 * sup_curvature(t, params, cutoff, n)["all"]
    fine = 0.5 * sup_curvature(t, params, cutoff, 2 * n)["all"]
    proxy = np.pi / np.sqrt(fine)
    return {"proxy": float(proxy), "sup_sec": float(fine),
            "refinement_change": float(abs(np.pi / np.sqrt(coarse) - proxy) / proxy),
            "loop_u3": float(params.l)}


# ---------------------------------------------------------------------------
# phase of the profile surface
# ---------------------------------------------------------------------------


def profile_phase_parts(r1, t: float, params: ModelParams, cutoff: SmoothCutoff):
    """``(F, ReOmega, vol)``: ``Im Omega = -cos((m+1) th/m) F`` on the profile chart.

    ``F = r2/m - r1 r2'``; the Kaehler form restricts to
    ``-sin((m+1) th/m) F dr1 ^ dth1``.
    """
    m = params.m
    r2, d1 = profile_jet(r1, t, params, cutoff, upto=1)
    F = r2 / m - r1 * d1
    re = r1 + r2 * d1 / m
    E, G = 1.0 + d1 ** 2, r1 ** 2 + r2 ** 2 / m ** 2
    return F, re, np.sqrt(E * G)


def flat_phase(r1, theta1, t: float, params: ModelParams, cutoff: SmoothCutoff):
    """``Im Omega / vol`` of the profile surface, vectorized."""
    F, _, vol = profile_phase_parts(r1, t, params, cutoff)
    return -np.cos((params.m + 1) * np.asarray(theta1) / params.m) * F / vol


def phase_from_frame(r1: float, theta1: float, t: float, params: ModelParams,
                     cutoff: SmoothCutoff) -> float:
    """Same quantity as :func:`flat_phase`, from the tangent frame."""
    e = profile_frame(r1, theta1, t, params, cutoff)
    vol = np.sqrt(np.linalg.det(e @ e.T))
    return holomorphic_volume(e).imag / vol


# ---------------------------------------------------------------------------
# the beta form on the cotangent model and its covariant derivatives
# ---------------------------------------------------------------------------

_LEVI = np.zeros((3, 3, 3))
for _i, _j, _k, _s in ((0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1),
                       (0, 2, 1, -1), (2, 1, 0, -1), (1, 0, 2, -1)):
    _LEVI[_i, _j, _k] = _s


def _cotangent_phi(y, amp, m, sheet):
    """``Phi`` on ``T^*L'`` in polar coordinates ``(r, th, u3, p_r, p_th, p_u)``.

    Returns the ambient coordinates ``(u1, u2, u3, v1, v2, v3)``.
    """
    r, th, u3, pr, pth, pu = y[0], y[1], y[2], y[3], y[4], y[5]
    e = jnp.exp(1j * th)
    zh1 = r * e
    pz = jnp.conj(e) * (pr - 1j * pth / r)
    zh2 = pz + amp ** (1.0 / m) * r ** (1.0 / m) * jnp.exp(1j * (th + 2 * jnp.pi * sheet) / m)
    return jnp.stack([zh1.real, zh1.imag, u3, zh2.real, -zh2.imag, pu])


def beta_form(y, amp, m, sheet=0):
    """Components ``beta[a, b, c]`` of ``Phi^* Im(dz1 ^ dz2 ^ dz3)``."""
    J = jax.jacfwd(_cotangent_phi)(y, amp, m, sheet)
    Z = J[0:3] + 1j * J[3:6]
    return jnp.einsum("ijk,ia,jb,kc->abc", _LEVI, Z, Z, Z).imag


def base_metric(y, amp, m):
    """Diagonal of ``g = A dr^2 + A r^2 dth^2 + du3^2`` on ``L'``."""
    r = y[0]
    A = 1.0 + m ** -2.0 * amp ** (2.0 / m) * r ** (2.0 * (1 - m) / m)
    return jnp.stack([A, A * r ** 2, jnp.ones_like(A)])


def connection_hat(y, amp, m):
    """``Gamma_hat[i, c, j]``: base Levi-Civita block, zero elsewhere (6x6x6)."""
    def g(q):
        return jnp.diag(base_metric(jnp.concatenate([q, y[3:]]), amp, m))

    gam = christoffel(g, y[0:3])
    return jnp.zeros((6, 6, 6)).at[0:3, 0:3, 0:3].set(gam)


def _covariant(fn, amp, m):
    """``y -> nabla_hat fn(y)``; the new derivative index comes first."""
    def out(y):
        T = fn(y)
        dT = jnp.moveaxis(jax.jacfwd(fn)(y), -1, 0)
        gam = connection_hat(y, amp, m)
        corr = jnp.zeros_like(dT)
        for slot in range(T.ndim):
            # - Gamma^i_{c j} T_{.. i ..}: contract slot with i, replace by j
            moved = jnp.moveaxis(T, slot, 0)
            term = jnp.einsum("icj,i...->cj...", gam, moved)
            corr = corr + jnp.moveaxis(term, 1, slot + 1)
        return dT - corr
    return out


@lru_cache(maxsize=None)
def _beta_derivatives(m: int, order: int):
    fns = [lambda y, amp: beta_form(y, amp, m)]
    for _ in range(order):
        prev = fns[-1]
        fns.append(lambda y, amp, prev=prev: _covariant(lambda z: prev(z, amp), amp, m)(y))
    return [jax.jit(jax.vmap(f, in_axes=(0, None))) for f in fns]


def tensor_norm(T, y, amp, m):
    """Norm of a covariant tensor for ``g_hat = diag(g, g^-1)`` (coordinate coframe)."""
    gdiag = base_metric(y, amp, m)
    w = jnp.concatenate([1.0 / gdiag, gdiag])
    acc = T ** 2
    for ax in range(T.ndim):
        shape = [1] * T.ndim
        shape[ax] = 6
        acc = acc * w.reshape(shape)
    return jnp.sqrt(jnp.sum(acc))


@dataclass(frozen=True)
class ConnectionSample:
    """``|nabla_hat^k beta|`` for ``k = 0..3`` and the base connection size."""

    point: tuple[float, ...]
    beta_norms: tuple[float, float, float, float]
    connection_norm: float


def connection_norm(r, amp: float, m: int):
    """Size ``|A'| / (2A)`` of the base connection in the Cartesian chart."""
    r = np.asarray(r, float)
    c = m ** -2.0 * amp ** (2.0 / m)
    A = 1.0 + c * r ** (2.0 * (1 - m) / m)
    dA = c * 2.0 * (1 - m) / m * r ** (2.0 * (1 - m) / m - 1)
    return np.abs(dA) / (2.0 * A)


def connection_beta_batch(points: Array, t: float, params: ModelParams, order: int = 3) -> Array:
    """``|nabla_hat^k beta|`` at many points of ``T^*L'^(a t^(m-1))``.

    ``points`` has shape ``(n, 6)`` in ``(r, th, u3, p_r, p_th, p_u)``.
    Returns an ``(n, order+1)`` array.
    """
    m = params.m
    amp = params.amplitude(t)
    pts = jnp.asarray(points, dtype=jnp.float64)
    fns = _beta_derivatives(m, order)
    norm = jax.jit(jax.vmap(tensor_norm, in_axes=(0, 0, None, None)), static_argnums=3)
    return np.stack([np.asarray(norm(f(pts, amp), pts, amp, m)) for f in fns], axis=-1)


def connection_beta(point, t: float, params: ModelParams) -> ConnectionSample:
    """Pointwise version of :func:`connection_beta_batch`."""
    vals = connection_beta_batch(np.asarray(point, float)[None, :], t, params)[0]
    return ConnectionSample(point=tuple(float(v) for v in point),
                            beta_norms=tuple(float(v) for v in vals),
                            connection_norm=float(connection_norm(point[0], params.amplitude(t),
                                                                  params.m)))


def fiber_sample_points(t: float, params: ModelParams, A1: float = 1.0, n_r: int = 24,
                        n_th: int = 3, seed: int = 0) -> Array:
    """Sample points ``r in [R0' t, R0]`` with fiber radius at most ``A1 t``.

    Fiber vectors have ``|p|_(g^-1)`` in ``{0, A1 t / 2, A1 t}`` along random
    directions drawn from ``seed``.
    """
    rng = np.random.default_rng(seed)
    amp = params.amplitude(t)
    pts = []
    for r in np.geomspace(params.R0prime * t, params.R0, n_r):
        for th in np.linspace(0.1, 2 * np.pi, n_th, endpoint=False):
            gd = np.asarray(base_metric(jnp.array([r, th, 0.0]), amp, params.m))
            for s in (0.0, 0.5, 1.0):
                d = rng.normal(size=3)
                d /= np.linalg.norm(d)
                p = s * A1 * t * np.sqrt(gd) * d
                pts.append([r, th, 0.3, *p])
    return np.array(pts)


def beta_sup_norms(t: float, params: ModelParams, **kw) -> Array:
    """``max`` over the sample set of ``|nabla_hat^k beta|``, ``k = 0..3``."""
    pts = fiber_sample_points(t, params, **kw)
    return connection_beta_batch(pts, t, params).max(axis=0)


# ---------------------------------------------------------------------------
# Hamiltonian flow of a fiberwise quadratic function
# ---------------------------------------------------------------------------


@dataclass
class HamiltonianNeighborhood:
    """Time-``tau`` flow of ``f(q, p) = 1/2 rho(|p|^2) p^T A(q) p`` on ``T^*R^n``.

    ``A_fn`` must be jax-traceable and return a symmetric matrix.  ``p_cut``
    sets the radius beyond which the fiber cut-off ``rho`` starts to decay;
    ``None`` means no cut-off.
    """

    A_fn: Callable
    dim: int
    tau: float = 1.0
    p_cut: float | None = None
    rtol: float = 1e-12
    atol: float = 1e-14

    def __post_init__(self) -> None:
        n = self.dim

        def rho(s):
            if self.p_cut is None:
                return jnp.ones_like(s)
            x = jnp.clip((s - self.p_cut ** 2) / (3 * self.p_cut ** 2), 0.0, 1.0)
            return 1.0 - x ** 3 * (10 - 15 * x + 6 * x ** 2)

        def H(z):
            q, p = z[:n], z[n:]
            return 0.5 * rho(p @ p) * (p @ self.A_fn(q) @ p)

        grad = jax.grad(H)

        def field(z):
            g = grad(z)
            return jnp.concatenate([g[n:], -g[:n]])

        self._field = jax.jit(field)
        self._dfield = jax.jit(jax.jacfwd(field))

    def _rhs(self, _s, state):
        n2 = 2 * self.dim
        z = state[:n2]
        J = state[n2:].reshape(n2, n2)
        dz = np.asarray(self._field(z))
        dJ = np.asarray(self._dfield(z)) @ J
        return np.concatenate([dz, dJ.ravel()])

    def flow(self, q, p) -> tuple[Array, Array]:
        """End point and Jacobian of the time-``tau`` flow from ``(q, p)``."""
        n2 = 2 * self.dim
        z0 = np.concatenate([np.asarray(q, float), np.asarray(p, float)])
        state = np.concatenate([z0, np.eye(n2).ravel()])
        sol = solve_ivp(self._rhs, (0.0, self.tau), state, method="DOP853",
                        rtol=self.rtol, atol=self.atol)
        if not sol.success:
            raise RuntimeError(sol.message)
        end = sol.y[:, -1]
        return end[:n2], end[n2:].reshape(n2, n2)

    def symplectic_defect(self, q, p) -> float:
        n = self.dim
        _, J = self.flow(q, p)
        om = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
        return float(np.max(np.abs(J.T @ om @ J - om)))

    def tangency_angle(self, q) -> float:
        """Largest principal angle between ``flow_*(vertical)`` at the zero
        section and the graph ``{(tau A(q) xi, xi)}``."""
        n = self.dim
        _, J = self.flow(q, np.zeros(n))
        image = J[:, n:]
        A = np.asarray(self.A_fn(jnp.asarray(q, dtype=jnp.float64)))
        target = np.vstack([self.tau * A, np.eye(n)])
        return float(np.max(subspace_angles(image, target)))


def hamiltonian_neighborhood(A_fn: Callable, dim: int, tau: float = 1.0,
                             p_cut: float | None = None) -> HamiltonianNeighborhood:
    """Build the flow object for a quadratic Hamiltonian with matrix ``A_fn(q)``."""
    return HamiltonianNeighborhood(A_fn=A_fn, dim=dim, tau=tau, p_cut=p_cut)


# ---------------------------------------------------------------------------
# slope bound for the immersed neighborhood
# ---------------------------------------------------------------------------


def fiber_radius_check(t: float, params: ModelParams, n: int = 20_000) -> dict[str, float]:
    """``min 1/sqrt(1 + r2'^2)`` over ``[t R0', b2]`` with ``b_i = t^(1 - eta_i)``.

    Returns the minimum, its ratio to ``t`` and the location of the minimum.
    """
    pe = params.with_eta()
    cut = cutoff_for(t, pe)
    lo, hi = t * params.R0prime, cut.b2
    if lo >= hi:
        raise ValueError("t R0' must lie below b2")
    r = np.unique(np.concatenate([np.geomspace(lo, hi, n), np.linspace(cut.b1, hi, n)]))
    r = r[r >= lo]
    d1 = profile_jet(r, t, pe, cut, upto=1)[1]
    slope = 1.0 / np.sqrt(1.0 + d1 ** 2)
    i = int(np.argmin(slope))
    return {"min_slope": float(slope[i]), "ratio": float(slope[i] / t), "argmin": float(r[i])}
