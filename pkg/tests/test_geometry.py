import jax.numpy as jnp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slgluing.config import ModelParams
from slgluing.flat_model import DomainPoint
from slgluing.geometry import (base_metric, conformal_factor, connection_norm, curvature,
                               fiber_radius_check, gaussian_curvature_profile,
                               hamiltonian_neighborhood, induced_metric, metric_function,
                               riemann, sup_curvature, conjugate_radius_proxy)
from slgluing.gluing import build_cutoff, cutoff_for, profile_surface

P = ModelParams()
T = 2.0 ** -6


@pytest.fixture(scope="module")
def cut():
    return cutoff_for(T, P)


def test_flat_chart_on_K(cut):
    r = 2 * cut.b2 ** (1 / P.m)
    s = induced_metric(DomainPoint(r, 0.0, 0.5), T, P, cut)
    assert s.region == "K"
    np.testing.assert_allclose(s.g, np.diag([1.0, s.point[0] ** 2, 1.0]), rtol=1e-14)
    assert s.riemann_norm <= 1e-10


def test_pure_model_metric_by_substitution():
    prm = ModelParams(m=2, a=1.0)
    A = base_metric(jnp.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), prm.amplitude(1.0), 2)
    assert np.asarray(A)[:2] == pytest.approx([1.25, 1.25])
    big = build_cutoff(1.0, 2.0, 4.0, allow_preasymptotic=True)
    g = metric_function("profile", 1.0, prm, big)(jnp.array([1.0, 0.0, 0.0]))
    assert np.diag(np.asarray(g))[:2] == pytest.approx([1.25, 1.25])


def _gram(fn, q, h=1e-6):
    J = np.stack([(fn(*(q + h * e)) - fn(*(q - h * e))) / (2 * h) for e in np.eye(3)])
    return J @ J.T


@settings(max_examples=25)
@given(st.floats(0.02, 0.98), st.floats(0, 2 * np.pi))
def test_profile_metric_is_the_gram_matrix(frac, th):
    cut = cutoff_for(T, P)
    r1 = cut.b1 + frac * (cut.b2 - cut.b1)
    q = np.array([r1, th, 0.3])
    G = _gram(lambda a, b, c: profile_surface(a, b, c, T, P, cut), q)
    g = np.asarray(metric_function("profile", T, P, cut)(jnp.asarray(q)))
    assert np.max(np.abs(G - g) / np.abs(np.diag(g)).max()) <= 1e-8


@settings(max_examples=25)
@given(st.floats(0.05, 1.0), st.floats(0, 2 * np.pi))
def test_holomorphic_metric_is_the_gram_matrix(frac, th):
    m, amp = P.m, P.amplitude(T)
    k = amp ** (1 / m)
    r2 = frac * 0.1

    def emb(r, a, u):
        z2 = r * np.exp(1j * a)
        z1 = (z2 / k) ** m
        return np.array([z1.real, z1.imag, u, z2.real, -z2.imag, 0.0])

    q = np.array([r2, th, 0.2])
    G = _gram(emb, q, h=1e-7 * r2)
    lam = conformal_factor(r2, T, P)
    g = np.diag([lam, lam * r2 ** 2, 1.0])
    assert np.max(np.abs(G - g)) / np.abs(g).max() <= 1e-6


def test_circle_direction_is_flat(cut):
    q = jnp.array([0.5 * (cut.b1 + cut.b2), 0.3, 0.1])
    R = np.asarray(riemann(metric_function("profile", T, P, cut), q))
    for idx in np.ndindex(*R.shape):
        if 2 in idx:
            assert abs(R[idx]) <= 1e-9


def test_autodiff_curvature_matches_closed_form(cut):
    r1 = cut.b1 + 0.37 * (cut.b2 - cut.b1)
    x = DomainPoint(r1 ** (1 / P.m), 0.0, 0.0)
    K = gaussian_curvature_profile(np.array([r1]), T, P, cut)[0]
    # |Rm| of a surface times a circle is 2|K|
    assert curvature(x, T, P, cut) == pytest.approx(2 * abs(K), rel=1e-6)


def test_proxy_stable_under_refinement(cut):
    out = conjugate_radius_proxy(T, P, cut)
    assert out["refinement_change"] <= 0.05
    assert sup_curvature(T, P, cut)["all"] > 0


def test_connection_decay_slope():
    r = np.geomspace(1, 100, 30)
    for m in (2, 3, 5):
        c = connection_norm(r, 1.0, m)
        slope = np.polyfit(np.log(r), np.log(c), 1)[0]
        assert slope == pytest.approx((2 - 3 * m) / m, abs=0.1)


def test_fiber_slope_is_order_t():
    ratios = [fiber_radius_check(t, P)["ratio"] for t in 2.0 ** -np.arange(4, 12)]
    assert min(ratios) > 0 and max(ratios) / min(ratios) < 50


def test_flow_constant_matrix_closed_form():
    A = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 1.5]])
    flow = hamiltonian_neighborhood(lambda q: jnp.asarray(A), 3, tau=0.7)
    q, p = np.array([0.1, -0.2, 0.3]), np.array([0.5, 0.1, -0.4])
    end, _ = flow.flow(q, p)
    assert np.max(np.abs(end - np.concatenate([q + 0.7 * A @ p, p]))) <= 1e-10
    assert flow.symplectic_defect(q, p) <= 1e-10
    eye = hamiltonian_neighborhood(lambda q: jnp.eye(3), 3)
    assert eye.flow(np.zeros(3), np.eye(3)[0])[0][:3] == pytest.approx(np.eye(3)[0], abs=1e-12)


def test_flow_linear_matrix():
    C = np.zeros((3, 3, 3))
    C[0, 1, 2] = C[1, 0, 2] = 0.2
    flow = hamiltonian_neighborhood(lambda q: jnp.eye(3) + jnp.einsum("ijk,k->ij", C, q), 3,
                                    p_cut=1.0)
    q, p = np.array([0.2, 0.1, -0.3]), np.array([0.4, -0.2, 0.1])
    assert flow.symplectic_defect(q, p) <= 1e-8
    assert flow.tangency_angle(q) <= 1e-6
