import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slgluing.spectral import (EigenError, assemble, build_branched_mesh, convergence_order,
                               eigenpairs, eigenvalue_comparison, energy_ratio,
                               exhaustion_eigenvalues, first_eigenvalue, flat_torus_mesh,
                               h_profile, interval_mesh, mean_zero, poincare_check,
                               sobolev_probe, flat_tube_mesh)

L = 2 * np.pi


def test_interval_oracle_and_order():
    errs = [abs(first_eigenvalue(interval_mesh(n)) - 1.0) for n in (50, 100, 200)]
    assert errs[0] <= 5e-3
    assert min(convergence_order(errs)) >= 1.8


def test_flat_torus_oracle():
    lam = first_eigenvalue(flat_torus_mesh(32))
    assert lam == pytest.approx(4 * np.pi ** 2, rel=0.02)


def test_unbranched_weights_agree():
    mesh = build_branched_mesh(1, L, 1.0, 8, 6, 4)
    r = mesh.primed.centers
    for a, b in zip(mesh.primed.metric(r), mesh.smooth.metric(r)):
        np.testing.assert_allclose(a, b)
    c = eigenvalue_comparison(mesh)
    assert c.lam_primed == pytest.approx(c.lam_smooth, rel=1e-12)


@pytest.mark.parametrize("m", [2, 3])
def test_dilatation_bounded_by_c_squared(m):
    mesh = build_branched_mesh(m, L, 1.0, 16, 8, 6)
    d = mesh.dilatation()
    assert d.max() <= m ** 2 * (1 + 1e-12) and d.min() >= 1 - 1e-12


def test_h_profile_is_one_outside():
    r = np.linspace(0, 2, 101)
    h = h_profile(r, 3, 1.0)
    assert np.all(h[r >= 1.0] == 1.0) and np.all(h > 0)


def test_volume_of_branched_solid_torus():
    mesh = build_branched_mesh(2, L, 1.0, 32, 8, 6, inner_radius=0.0)
    assert mesh.primed.volume() == pytest.approx(2 * np.pi * 1.0 ** 2 * L, rel=0.02)


@pytest.mark.parametrize("m", [2, 3])
def test_eigenvalue_lower_bound(m):
    for nr in (16, 32):
        c = eigenvalue_comparison(build_branched_mesh(m, L, 1.0, nr, 8, 6))
        assert c.holds and c.divisor == m ** 8


def test_poincare_ratios_and_extremal_case():
    mesh = build_branched_mesh(2, L, 1.0, 12, 8, 6, inner_radius=0.0, inner="neumann",
                               outer="neumann")
    res = poincare_check(mesh, 100, seed=3)
    assert res.holds
    assert res.eigen_ratio == pytest.approx(res.lam_primed ** -0.5, rel=1e-6)
    assert res.worst_ratio <= res.eigen_ratio * (1 + 1e-8)


def test_zero_gradient_rejected():
    mesh = build_branched_mesh(2, L, 1.0, 8, 6, 4, inner_radius=0.0, inner="neumann",
                               outer="neumann")
    S, M = assemble(mesh.primed)
    u = np.ones(mesh.primed.size)
    assert np.allclose(mean_zero(u, M), 0)
    with pytest.raises(ValueError):
        energy_ratio(mean_zero(u, M) * 0, S, M)


@settings(max_examples=10)
@given(st.integers(0, 1000))
def test_random_ratios_never_beat_the_first_mode(seed):
    mesh = build_branched_mesh(3, L, 1.0, 8, 6, 4)
    S, M = assemble(mesh.primed)
    lam = first_eigenvalue(mesh.primed)
    u = np.random.default_rng(seed).standard_normal(mesh.primed.size)
    assert energy_ratio(u, S, M) <= lam ** -0.5 * (1 + 1e-8)


def test_exhaustion_is_monotone():
    vals = [v[2] for v in exhaustion_eigenvalues(2, L, 1.0, 1 / 40, [1, 2, 4, 8, 16])]
    assert all(b <= a * (1 + 1e-10) for a, b in zip(vals, vals[1:]))


def test_eigenpairs_validation():
    with pytest.raises(ValueError):
        build_branched_mesh(2, L, 1.0, 2, 6, 4)
    with pytest.raises((EigenError, ValueError)):
        eigenpairs(interval_mesh(10), k=0)


def test_probe_excludes_constants():
    mesh = flat_tube_mesh(2, L, 1.0, nr=12, nphi=6, ntheta=4)
    lam, phi = eigenpairs(mesh, 5)
    assert lam.min() > 1e-8
    w = mesh.cell_volumes().ravel()
    assert np.max(np.abs(w @ phi)) <= 1e-8 * np.abs(phi).max() * w.sum()
    assert sobolev_probe(mesh, n_modes=5, starts=2).estimate > 0
