import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from slgluing.asymptotics import (LogProfile, NormCurve, adaptive_gauss, bounded_ratio, dF_L3,
                                  fit_exponent, integrate_norm, make_curve, mean_abs_cos_power,
                                  model_field, one_minus_F_L65, predicted_for,
                                  profile_phase_norm, region_domain, running_max_variation,
                                  sup_norm, verify_quantity)
from slgluing.config import ModelParams
from slgluing.gluing import cutoff_for

P = ModelParams()
T = 2.0 ** -8


def test_fit_exact_power_law():
    t = 2.0 ** -np.arange(4, 17)
    fit = fit_exponent(t, 3 * t ** 1.5)
    assert fit.exponent == pytest.approx(1.5, abs=1e-6) and fit.r_squared == pytest.approx(1)


def test_fit_log_corrected():
    t = 2.0 ** -np.arange(10, 17)
    v = t ** (-1 / 3) / -np.log(t)
    assert fit_exponent(t, v, -1.0).exponent == pytest.approx(-1 / 3, abs=0.05)
    free = fit_exponent(2.0 ** -np.arange(4, 40), (2.0 ** -np.arange(4, 40)) ** 0.5
                        * np.arange(4, 40) ** 2.0, "free")
    assert free.log_power == pytest.approx(2.0, abs=1e-6)


@given(st.floats(-3, 3), st.floats(0.1, 10))
def test_fit_recovers_any_exponent(p, c):
    t = 2.0 ** -np.arange(4, 17)
    assert fit_exponent(t, c * t ** p).exponent == pytest.approx(p, abs=1e-8)


def test_fit_skips_zeros():
    t = 2.0 ** -np.arange(4, 10)
    v = t ** 2.0
    v[0] = 0.0
    assert fit_exponent(t, v).skipped_zeros == 1


def test_curve_validation():
    t = 2.0 ** -np.arange(4, 10)
    c = make_curve("x", t, t, np.ones(6, bool))
    assert len(c.samples) == 6
    with pytest.raises(ValueError):
        make_curve("x", t[::-1], t, np.ones(6, bool))
    with pytest.raises(ValueError):
        make_curve("x", t, -t, np.ones(6, bool))


def test_adaptive_gauss_polynomial_and_singular():
    val, _ = adaptive_gauss(lambda x: x ** 5, [0.0, 1.0], 1e-12)
    assert val == pytest.approx(1 / 6, rel=1e-14)
    val, _ = adaptive_gauss(lambda x: x ** -0.5, [1e-12, 1.0], 1e-10)
    assert val == pytest.approx(2 - 2e-6, rel=1e-9)


def test_K_annulus_volume():
    cut = cutoff_for(T, P)
    vol = integrate_norm(1.0, "K", 1.0, T, P, cut)
    # the domain is the m-fold cover of the flat annulus
    ref = P.m * math.pi * (P.R0 ** 2 - cut.b2 ** 2) * P.l
    assert vol == pytest.approx(ref, rel=1e-10)
    assert integrate_norm(0.0, "K", 1.0, T, P, cut) == 0
    assert integrate_norm("eps", "K", 6 / 5, T, P, cut) == 0


def test_P_volume_closed_form():
    cut = cutoff_for(T, P)
    dom = region_domain("P", T, P, cut)
    r, m, A = dom.hi, P.m, P.amplitude(T)
    # 2 pi l int (r + m^2 A^-2 r^(2m-1)) dr
    ref = 2 * math.pi * P.l * (r ** 2 / 2 + m ** 2 / A ** 2 * r ** (2 * m) / (2 * m))
    assert integrate_norm(1.0, "P", 1.0, T, P, cut) == pytest.approx(ref, rel=1e-10)


def test_norm_of_constant_and_bad_p():
    cut = cutoff_for(T, P)
    vol = integrate_norm(1.0, "Q", 1.0, T, P, cut)
    assert integrate_norm(2.0, "Q", 3.0, T, P, cut) == pytest.approx(2 * vol ** (1 / 3))
    with pytest.raises(ValueError):
        integrate_norm(1.0, "Q", 4.0, T, P, cut)


def test_sup_norm_values():
    cut = cutoff_for(T, P)
    assert sup_norm("eps", "K", T, P, cut).value == 0
    assert sup_norm(2.5, "Q", T, P, cut).value == 2.5
    dom = region_domain("P", T, P, cut)
    bound = T ** P.c1 + T ** ((1 - 1 / P.m) + P.c1 / P.m)
    res = sup_norm("eps", "P", T, P, cut)
    assert res.converged and res.value == pytest.approx(model_field("eps", "P", T, P)(dom.hi))
    assert res.value <= 3 * bound


@pytest.mark.parametrize("p", [1.0, 1.2, 2.0, 3.0, 6.0])
def test_mean_abs_cos_power(p):
    x = np.linspace(0, 2 * np.pi, 200001)
    assert mean_abs_cos_power(p) == pytest.approx(np.trapezoid(np.abs(np.cos(x)) ** p, x)
                                                  / (2 * np.pi), rel=1e-8)


def test_profile_phase_norm_is_dominated_by_model_field():
    cut = cutoff_for(T, P)
    exact = profile_phase_norm(1.0, T, P, cut)
    assert 0 < exact <= integrate_norm("eps", "Q", 1.0, T, P, cut)


def test_running_max_and_bounded_ratio():
    assert running_max_variation([1, 2, 3, 3, 3, 3]) == 0
    assert running_max_variation([1, 1, 1, 2]) == 1
    t = 2.0 ** -np.arange(4, 17)
    assert bounded_ratio(t, 5 * t ** 0.5, 0.5)["bounded"]
    assert not bounded_ratio(t, t ** 0.3, 0.5)["bounded"]


def test_predicted_for_examples():
    assert predicted_for("epsC0_P", P)[0] == 0.5
    assert predicted_for("epsL65_Q", P)[3] == "7"
    with pytest.raises(KeyError):
        predicted_for("dF_L3", P)


def test_epsL1_P_fit():
    v, curve = verify_quantity("epsL1_P", P)
    assert v.passed and curve.fitted_exponent == pytest.approx(1.5, abs=0.1)


def test_partition_norms():
    G = LogProfile(0.4, 0.5)
    assert dF_L3(1e-3, 2, P.l, LogProfile(0.4, 0.5, constant=True)) == 0
    t = 2.0 ** -np.arange(10, 17)
    omf = [one_minus_F_L65(x, 2, P.l, 1.0, G) for x in t]
    assert fit_exponent(t, omf).exponent == pytest.approx(1 / 3, abs=0.1)
    with pytest.raises(ValueError):
        LogProfile(0.5, 0.4)
    # G and G' agree by differences
    s = np.linspace(0.41, 0.49, 9)
    num = (G(s + 1e-7) - G(s - 1e-7)) / 2e-7
    assert np.allclose(num, G.derivative(s), atol=1e-5)


def test_curve_json_view():
    t = 2.0 ** -np.arange(4, 10)
    d = make_curve("x", t, t, np.ones(6, bool), predicted=1.0).as_dict()
    assert d["fitted_exponent"] == pytest.approx(1.0) and d["predicted_exponent"] == 1.0
    assert isinstance(NormCurve.__dataclass_fields__["flags"].default, tuple)
