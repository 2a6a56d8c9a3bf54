"""First eigenvalues on solid-torus models of a branched cover.

A solid torus ``N = D^2_eps x S^1`` is meshed in coordinates
``(r, phi, theta)`` with ``phi, theta`` periodic.  Every metric used here is
diagonal and depends on ``r`` only,

    ds^2 = a(r) dr^2 + b(r) dphi^2 + c dtheta^2,

and is discretized by a cell-centred finite-volume scheme: one unknown per
cell, two-point fluxes through the faces, the exact volume ``sqrt(a b c)`` per
cell.  At ``r = 0`` the radial face weight ``sqrt(b c / a)`` vanishes, so the
axis needs no special stencil; inner walls at ``r > 0`` are Dirichlet (the
exhaustion ``X'_j``) or Neumann.

The branched pull-back metric is ``g' = dr^2 + m^2 r^2 dphi^2 + L^2 dtheta^2``
with ``L = l / 2 pi``; the comparison metric ``g`` replaces ``m`` by
``h(r) m`` where ``h`` climbs from ``1/m`` to 1 across ``[eps/3, 2 eps/3]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize
from scipy.sparse.linalg import LinearOperator, cg, eigsh

from .config import ModelParams
from .geometry import profile_metric_diag
from .gluing import cutoff_for

Array = np.ndarray
Boundary = Literal["dirichlet", "neumann", "periodic"]


class EigenError(RuntimeError):
    """The eigensolver did not converge."""


def smoothstep5(x):
    x = np.clip(x, 0.0, 1.0)
    return x ** 3 * (10 - 15 * x + 6 * x ** 2)


def h_profile(r, m: int, eps: float):
    """Increasing ``h`` equal to ``1/m`` below ``eps/3`` and 1 above ``2 eps/3``."""
    s = smoothstep5((np.asarray(r, float) - eps / 3) / (eps / 3))
    return 1.0 / m + (1.0 - 1.0 / m) * s


# ---------------------------------------------------------------------------
# meshes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TensorMesh:
    """Structured grid with an ``r``-dependent diagonal metric.

    ``edges`` are the radial cell faces; ``metric(r)`` returns ``(a, b)`` and
    ``c`` is constant.  ``n2``, ``n3`` cells cover the periodic angles of
    length ``period2``, ``period3``.
    """

    edges: Array
    n2: int
    n3: int
    metric: Callable[[Array], tuple[Array, Array]]
    c: float
    period2: float = 2 * np.pi
    period3: float = 2 * np.pi
    inner: Boundary = "neumann"
    outer: Boundary = "dirichlet"

    @property
    def centers(self) -> Array:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def shape(self) -> tuple[int, int, int]:
        return len(self.edges) - 1, self.n2, self.n3

    @property
    def size(self) -> int:
        n1, n2, n3 = self.shape
        return n1 * n2 * n3

    def cell_volumes(self) -> Array:
        a, b = self.metric(self.centers)
        d1 = np.diff(self.edges)
        d2, d3 = self.period2 / self.n2, self.period3 / self.n3
        vol1 = np.sqrt(a * b * self.c) * d1 * d2 * d3
        return np.repeat(vol1, self.n2 * self.n3)

    def volume(self) -> float:
        return float(self.cell_volumes().sum())


def _index(i, j, k, n2, n3):
    return (i * n2 + j) * n3 + k


def assemble(mesh: TensorMesh) -> tuple[sp.csr_matrix, sp.dia_matrix]:
    """Stiffness ``S`` and diagonal mass ``M`` with ``u^T S u = int |du|^2``."""
    n1, n2, n3 = mesh.shape
    e = mesh.edges
    rc = mesh.centers
    d1 = np.diff(e)
    d2, d3 = mesh.period2 / n2, mesh.period3 / n3
    a_c, b_c = mesh.metric(rc)
    c = mesh.c
    rows, cols, vals = [], [], []
    diag = np.zeros(mesh.size)

    def couple(p, q, w):
        rows.extend([p, q])
        cols.extend([q, p])
        vals.extend([-w, -w])
        np.add.at(diag, p, w)
        np.add.at(diag, q, w)

    J, K = np.meshgrid(np.arange(n2), np.arange(n3), indexing="ij")
    J, K = J.ravel(), K.ravel()
    # radial faces between cells i and i+1; the flux uses the face metric
    if n1 > 1:
        a_f, b_f = mesh.metric(e[1:-1])
        w_face = np.sqrt(b_f * c / a_f) * d2 * d3 / (rc[1:] - rc[:-1])
        for i in range(n1 - 1):
            couple(_index(i, J, K, n2, n3), _index(i + 1, J, K, n2, n3), np.full(J.shape, w_face[i]))
    for side, bc in (("inner", mesh.inner), ("outer", mesh.outer)):
        i = 0 if side == "inner" else n1 - 1
        r_face = e[0] if side == "inner" else e[-1]
        if bc == "dirichlet":
            a_f, b_f = mesh.metric(np.array([r_face]))
            w = float(np.sqrt(b_f * c / a_f)[0]) * d2 * d3 / abs(r_face - rc[i])
            np.add.at(diag, _index(i, J, K, n2, n3), w)
        elif bc == "periodic" and side == "inner":
            a_f, b_f = mesh.metric(np.array([e[0]]))
            w = float(np.sqrt(b_f * c / a_f)[0]) * d2 * d3 / (0.5 * (d1[0] + d1[-1]))
            couple(_index(0, J, K, n2, n3), _index(n1 - 1, J, K, n2, n3), np.full(J.shape, w))
    # angular faces (periodic)
    for i in range(n1):
        vol_fac = np.sqrt(a_c[i] * b_c[i] * c)
        if n2 > 1:
            w2 = vol_fac / b_c[i] * d1[i] * d3 / d2
            couple(_index(i, J, K, n2, n3), _index(i, (J + 1) % n2, K, n2, n3), np.full(J.shape, w2))
        if n3 > 1:
            w3 = vol_fac / c * d1[i] * d2 / d3
            couple(_index(i, J, K, n2, n3), _index(i, J, (K + 1) % n3, n2, n3), np.full(J.shape, w3))
    S = sp.coo_matrix((np.concatenate([np.atleast_1d(v) for v in vals]) if vals else [],
                       (np.concatenate([np.atleast_1d(v) for v in rows]) if rows else [],
                        np.concatenate([np.atleast_1d(v) for v in cols]) if cols else [])),
                      shape=(mesh.size, mesh.size)).tocsr()
    S = S + sp.diags(diag)
    return S.tocsr(), sp.diags(mesh.cell_volumes())


@dataclass(frozen=True)
class BranchedMesh:
    """The pair ``(g', g)`` on one exhaustion domain of the solid torus."""

    m: int
    l: float
    eps: float
    inner_radius: float
    j: int
    primed: TensorMesh
    smooth: TensorMesh

    @property
    def c(self) -> float:
        return float(self.m)

    def dilatation(self) -> Array:
        """Cellwise ratio ``g'_(phi phi) / g_(phi phi)``; the other entries agree."""
        r = self.primed.centers
        return self.primed.metric(r)[1] / self.smooth.metric(r)[1]


def build_branched_mesh(m: int, l: float, eps: float, nr: int, nphi: int, ntheta: int,
                        j: int = 1, j0: int = 10, inner_radius: float | None = None,
                        inner: Boundary = "dirichlet", outer: Boundary = "dirichlet"
                        ) -> BranchedMesh:
    """Meshes of ``g'`` and ``g`` on ``[1/(j + j0), eps] x S^1 x S^1``."""
    if min(nr, nphi, ntheta) < 4:
        raise ValueError("resolutions must be at least 4")
    r_in = 1.0 / (j + j0) if inner_radius is None else inner_radius
    if not 0 <= r_in < eps:
        raise ValueError(f"need 0 <= inner radius < eps, got {r_in}, {eps}")
    L = l / (2 * np.pi)
    edges = np.linspace(r_in, eps, nr + 1)

    def primed(r):
        r = np.asarray(r, float)
        return np.ones_like(r), (m * r) ** 2

    def smooth(r):
        r = np.asarray(r, float)
        return np.ones_like(r), (h_profile(r, m, eps) * m * r) ** 2

    kw = dict(edges=edges, n2=nphi, n3=ntheta, c=L ** 2, inner=inner, outer=outer)
    return BranchedMesh(m, l, eps, r_in, j, TensorMesh(metric=primed, **kw),
                        TensorMesh(metric=smooth, **kw))


def flat_torus_mesh(n: int, side: float = 1.0) -> TensorMesh:
    """Periodic cube of edge ``side`` with the flat metric."""
    edges = np.linspace(0.0, side, n + 1)

    def flat(r):
        r = np.asarray(r, float)
        return np.ones_like(r), np.ones_like(r)

    return TensorMesh(edges, n, n, flat, 1.0, side, side, inner="periodic", outer="periodic")


def interval_mesh(n: int, length: float = np.pi) -> TensorMesh:
    """``[0, length]`` with Dirichlet ends, as a one-cell-thick tensor mesh."""
    def flat(r):
        r = np.asarray(r, float)
        return np.ones_like(r), np.ones_like(r)

    return TensorMesh(np.linspace(0.0, length, n + 1), 1, 1, flat, 1.0, 1.0, 1.0,
                      inner="dirichlet", outer="dirichlet")


# ---------------------------------------------------------------------------
# eigenvalues
# ---------------------------------------------------------------------------


def _has_kernel(mesh: TensorMesh) -> bool:
    return "dirichlet" not in (mesh.inner, mesh.outer)


def eigenpairs(mesh: TensorMesh, k: int = 1, tol: float = 1e-10,
               direct_limit: int = 20_000) -> tuple[Array, Array]:
    """Smallest nonzero generalized eigenpairs of ``S u = lam M u``.

    Shift-invert Lanczos around a negative shift; constants are dropped when
    the mesh has no Dirichlet boundary.  Meshes above ``direct_limit`` cells
    apply the inverse by preconditioned conjugate gradients instead of a
    sparse factorization.
    """
    S, M = assemble(mesh)
    extra = 1 if _has_kernel(mesh) else 0
    n = mesh.size
    want = k + extra
    if n <= want + 1:
        raise EigenError("mesh too small for the sparse solver")
    ratio = S.diagonal() / M.diagonal()
    # a fixed start vector; ARPACK's own draw depends on earlier calls
    v0 = 1.0 + 0.5 * np.sin(1.7 * np.arange(n))
    try:
        if n <= direct_limit:
            sigma = -1e-6 * float(ratio.max())
            vals, vecs = eigsh(S, k=want, M=M, sigma=sigma, which="LM", tol=tol, v0=v0)
        else:
            # inverse iteration with conjugate-gradient inner solves
            sigma = -1e-2 * float(ratio.min())
            A = (S - sigma * M).tocsr()
            pre = LinearOperator(A.shape, matvec=lambda x, d=1.0 / A.diagonal(): d * x)

            def solve(b):
                x, info = cg(A, b, rtol=1e-12, atol=0.0, M=pre, maxiter=20 * n)
                if info != 0:
                    raise EigenError(f"inner CG solve failed ({info})")
                return x

            op = LinearOperator(A.shape, matvec=solve)
            vals, vecs = eigsh(S, k=want, M=M, sigma=sigma, which="LM", OPinv=op, tol=tol,
                               v0=v0)
    except EigenError:
        raise
    except Exception as exc:  # ArpackNoConvergence and friends
        raise EigenError(str(exc)) from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    return vals[extra:], vecs[:, extra:]


def first_eigenvalue(mesh: TensorMesh) -> float:
    """Smallest nonzero eigenvalue of the mesh Laplacian."""
    return float(eigenpairs(mesh, 1)[0][0])


@dataclass(frozen=True)
class Comparison:
    lam_primed: float
    lam_smooth: float
    c: float
    divisor: float
    holds: bool
    max_dilatation: float


def eigenvalue_comparison(mesh: BranchedMesh, dim: int = 3) -> Comparison:
    """``lam_1(g') >= lam_1(g) / c^(2 dim + 2)`` on one mesh."""
    lp = first_eigenvalue(mesh.primed)
    ls = first_eigenvalue(mesh.smooth)
    div = mesh.c ** (2 * dim + 2)
    return Comparison(lp, ls, mesh.c, div, bool(lp * (1 + 1e-12) >= ls / div),
                      float(mesh.dilatation().max()))


def energy_ratio(u: Array, S, M) -> float:
    """``||u||_2 / ||du||_2``."""
    du2 = float(u @ (S @ u))
    if du2 <= 0:
        raise ValueError("u has zero discrete gradient")
    return float(np.sqrt((u @ (M @ u)) / du2))


def mean_zero(u: Array, M) -> Array:
    w = M.diagonal()
    return u - (w @ u) / w.sum()


@dataclass(frozen=True)
class PoincareResult:
    worst_ratio: float
    bound: float
    holds: bool
    eigen_ratio: float
    lam_primed: float
    lam_smooth: float


def poincare_check(mesh: BranchedMesh, trials: int = 100, seed: int = 0,
                   dim: int = 3) -> PoincareResult:
    """Random mean-zero ``u``: ``||u|| / ||du|| <= c^(dim+1) / lam_1(g)^(1/2)``.

    Both metrics use the boundary conditions of ``mesh``; with no Dirichlet
    part the mean is taken with the ``g'`` volume.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    S, M = assemble(mesh.primed)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        u = rng.standard_normal(mesh.primed.size)
        if _has_kernel(mesh.primed):
            u = mean_zero(u, M)
        worst = max(worst, energy_ratio(u, S, M))
    lam_p, vec = eigenpairs(mesh.primed, 1)
    lam_s = first_eigenvalue(mesh.smooth)
    bound = mesh.c ** (dim + 1) / np.sqrt(lam_s)
    return PoincareResult(worst, float(bound), bool(worst <= bound),
                          energy_ratio(vec[:, 0], S, M), float(lam_p[0]), lam_s)


def exhaustion_eigenvalues(m: int, l: float, eps: float, dr: float, js, nphi: int = 8,
                           ntheta: int = 6, j0: int = 10) -> list[tuple[int, float, float]]:
    """``lam_1(X'_j, g')`` with the inner wall snapped to a fixed radial grid.

    Returns ``(j, inner radius, lam_1)``; on nested grids the Dirichlet
    eigenvalues cannot increase with ``j``.
    """
    out = []
    for j in js:
        ncell = int(np.floor((eps - 1.0 / (j + j0)) / dr + 1e-9))
        r_in = eps - ncell * dr
        mesh = build_branched_mesh(m, l, eps, ncell, nphi, ntheta, inner_radius=r_in)
        out.append((int(j), float(r_in), first_eigenvalue(mesh.primed)))
    return out


def convergence_order(errors) -> list[float]:
    e = np.asarray(errors, float)
    return list(np.log2(e[:-1] / e[1:]))


# ---------------------------------------------------------------------------
# exploratory Sobolev probe on the glued tube
# ---------------------------------------------------------------------------


def glued_tube_mesh(t: float, params: ModelParams, nr: int = 40, nphi: int = 8,
                    ntheta: int = 6) -> TensorMesh:
    """The tube ``|w|^m <= R0`` with the induced metric of the glued profile.

    Radial coordinate ``r1``, angle ``phi = th1 / m`` and ``u3 = L theta``.
    Faces are graded geometrically toward the axis so that ``P`` and ``Q``
    are resolved.  Both ends are Neumann (the axis face has zero weight).
    """
    cut = cutoff_for(t, params)
    m, L = params.m, params.l / (2 * np.pi)
    r_min = min(cut.b1, 1e-3 * params.R0) / 10
    edges = np.unique(np.concatenate([[0.0], np.geomspace(r_min, params.R0, nr)]))

    def metric(r):
        r = np.maximum(np.asarray(r, float), 1e-300)
        E, G = profile_metric_diag(r, t, params, cut)
        return E, m ** 2 * G

    return TensorMesh(edges, nphi, ntheta, metric, L ** 2, inner="neumann", outer="neumann")


def flat_tube_mesh(m: int, l: float, R0: float, nr: int = 40, nphi: int = 8,
                   ntheta: int = 6) -> TensorMesh:
    """The flat ``m``-fold tube, the ``t -> 0`` reference for the probe."""
    L = l / (2 * np.pi)
    edges = np.linspace(0.0, R0, nr + 1)

    def metric(r):
        r = np.asarray(r, float)
        return np.ones_like(r), (m * r) ** 2

    return TensorMesh(edges, nphi, ntheta, metric, L ** 2, inner="neumann", outer="neumann")


@dataclass(frozen=True)
class SobolevProbe:
    estimate: float
    best_starts: int
    converged: bool
    n_modes: int


def sobolev_probe(mesh: TensorMesh, n_modes: int = 20, starts: int = 8,
                  seed: int = 0) -> SobolevProbe:
    """Estimate ``sup ||v||_6 / ||dv||_2`` over mean-zero ``v`` in a mode span.

    ``v`` ranges over combinations of the lowest ``n_modes`` nonconstant
    Neumann eigenfunctions; the ratio is maximized from several seeded
    starting points.
    """
    lam, phi = eigenpairs(mesh, n_modes)
    vol = mesh.cell_volumes()

    def neg_ratio(c):
        v = phi @ c
        num = np.sum(vol * v ** 6) ** (1 / 6)
        den = np.sqrt(np.sum(lam * c ** 2))
        return -num / den

    rng = np.random.default_rng(seed)
    best, ok, hits = 0.0, True, 0
    for _ in range(starts):
        res = minimize(neg_ratio, rng.standard_normal(n_modes), method="L-BFGS-B")
        ok &= bool(res.success)
        val = -float(res.fun)
        if val > best * (1 + 1e-6):
            best, hits = val, 1
        elif abs(val - best) <= 1e-6 * best:
            hits += 1
    return SobolevProbe(best, hits, ok, n_modes)


def sobolev_trend(params: ModelParams, ts=None, **mesh_kw) -> dict:
    """Probe estimate over a list of scales; exploratory output only."""
    ts = params.t_grid() if ts is None else np.asarray(ts, float)
    est = [sobolev_probe(glued_tube_mesh(float(t), params, **mesh_kw), seed=params.seed).estimate
           for t in ts]
    ref = sobolev_probe(flat_tube_mesh(params.m, params.l, params.R0, **mesh_kw),
                        seed=params.seed).estimate
    return {"t": list(map(float, ts)), "estimate": est, "flat_reference": ref}
