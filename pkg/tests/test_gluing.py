import numpy as np
import pytest
from hypothesis import given, strategies as st

from slgluing.config import ModelParams
from slgluing.flat_model import DomainPoint, psi_a_scaled
from slgluing.gluing import (CutoffError, build_cutoff, cutoff_for, glued_immersion,
                             glued_profile, profile_jet, region_of_radius)

P = ModelParams()
T = 2.0 ** -8


@pytest.fixture(scope="module")
def cut():
    return cutoff_for(T, P)


def test_cutoff_ends(cut):
    assert cut(cut.b1 / 2) == 1.0 and cut(cut.b2) == 0.0
    for k in range(1, 5):
        assert cut.derivative(cut.b1 / 2, k) == 0.0 and cut.derivative(cut.b2, k) == 0.0


def test_cutoff_monotone_and_bounded(cut):
    r = np.linspace(cut.b1, cut.b2, 5001)
    v = cut(r)
    assert np.all(np.diff(v) <= 1e-14) and v.min() >= -1e-14 and v.max() <= 1 + 1e-14


def test_cutoff_derivatives_are_consistent(cut):
    r = np.linspace(cut.b1, cut.b2, 40001)
    for k in range(4):
        num = np.gradient(cut.derivative(r, k), r)
        ref = cut.derivative(r, k + 1)
        assert np.max(np.abs(num - ref)[5:-5]) <= 1e-3 * np.max(np.abs(ref))


def test_cutoff_constant_uniform_in_t():
    c0 = [build_cutoff(t, t, t ** 0.2).C0 for t in 2.0 ** -np.arange(4, 17)]
    assert max(c0) / min(c0) <= 2.0


def test_cutoff_rejections():
    with pytest.raises(CutoffError):
        build_cutoff(0.1, 0.5, 0.4)
    with pytest.raises(CutoffError):
        build_cutoff(0.1, 0.5, 1.0)
    assert build_cutoff(0.1, 0.5, 1.0, allow_preasymptotic=True).preasymptotic
    with pytest.raises(ValueError):
        build_cutoff(0.1, 0.01, 1.0).derivative(0.5, 5)


def test_profile_on_P_by_substitution():
    prm = ModelParams(m=2, a=1.0, c1=0.5, c2=0.3)
    t = 0.01
    assert glued_profile(prm.b1(t), t, prm) == pytest.approx(0.1 * np.sqrt(0.1), rel=1e-12)


@given(st.floats(0.0, 1.0))
def test_profile_closed_form_on_P(frac):
    cut = cutoff_for(T, P)
    r1 = frac * cut.b1
    ref = P.a ** 0.5 * T ** 0.5 * r1 ** 0.5
    assert glued_profile(r1, T, P, cut) == pytest.approx(ref, rel=1e-12, abs=1e-300)


def test_profile_vanishes_on_K(cut):
    r = np.linspace(cut.b2, P.R0, 50)
    assert np.all(glued_profile(r, T, P, cut) == 0)
    assert np.all(profile_jet(r, T, P, cut, upto=3)[3] == 0)


def test_region_of_radius(cut):
    assert region_of_radius(0.0, cut.b1, cut.b2) == "P"
    assert region_of_radius(0.5 * (cut.b1 + cut.b2), cut.b1, cut.b2) == "Q"
    assert region_of_radius(2 * cut.b2, cut.b1, cut.b2) == "K"


@pytest.mark.parametrize("variant", ["profile", "graph"])
def test_glued_immersion_pieces(cut, variant):
    rng = np.random.default_rng(1)
    for th in rng.uniform(0, 2 * np.pi, 20):
        rin = 0.9 * cut.b1 ** (1 / P.m)
        x = DomainPoint(rin * np.cos(th), rin * np.sin(th), 0.4)
        assert glued_immersion(x, T, P, cut, variant).distance(psi_a_scaled(x, T, P)) <= 1e-12
        rout = 1.1 * cut.b2 ** (1 / P.m)
        x = DomainPoint(rout * np.cos(th), rout * np.sin(th), 0.4)
        zh1, u3, zh2, v3 = glued_immersion(x, T, P, cut, variant).rotated()
        assert zh1 == pytest.approx(x.w ** P.m) and zh2 == 0 and v3 == 0


@pytest.mark.parametrize("variant", ["profile", "graph"])
def test_glued_immersion_continuous_at_region_edges(cut, variant):
    d = 1e-12
    for th in np.linspace(0, 2 * np.pi, 50, endpoint=False):
        for b in (cut.b1, cut.b2):
            r = b ** (1 / P.m)
            lo = DomainPoint((r - d) * np.cos(th), (r - d) * np.sin(th), 1.0)
            hi = DomainPoint((r + d) * np.cos(th), (r + d) * np.sin(th), 1.0)
            y0 = glued_immersion(lo, T, P, cut, variant)
            y1 = glued_immersion(hi, T, P, cut, variant)
            assert y0.distance(y1) <= 1e-10
