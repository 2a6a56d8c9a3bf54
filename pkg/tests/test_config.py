import numpy as np
import pytest
from hypothesis import given, strategies as st

from slgluing.config import (ConfigError, ModelParams, dump_config, load_config,
                             params_from_mapping, parse_flat_config)


def test_defaults_give_the_standard_grid():
    p = ModelParams()
    np.testing.assert_array_equal(p.t_grid(), 2.0 ** -np.arange(4, 17))
    assert p.fit_mask().sum() == 7


def test_c2_not_below_c1_is_rejected_naming_both():
    with pytest.raises(ConfigError) as err:
        ModelParams(c1=0.3, c2=0.3)
    assert "c1" in str(err.value) and "c2" in str(err.value)


def test_violations_are_aggregated():
    with pytest.raises(ConfigError) as err:
        params_from_mapping({"model.m": 1, "model.a": -1.0, "model.bogus": 3})
    msg = str(err.value)
    assert "bogus" in msg and "m must" in msg and "a must" in msg


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ConfigError, match="line 2"):
        parse_flat_config("model.m = 2\nnot a pair\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_flat_config("m = 2\nm = 3\n")


def test_comments_and_types():
    vals = parse_flat_config("# header\nmodel.m = 3  # order\nmodel.a = 0.5\nname = 'x'\n")
    assert vals == {"model.m": 3, "model.a": 0.5, "name": "x"}


def test_integer_fields_reject_fractions():
    with pytest.raises(ConfigError, match="integer"):
        params_from_mapping({"m": 2.5})


def test_dump_round_trip(tmp_path):
    p = ModelParams(m=3, c1=0.8, c2=0.5, seed=7)
    f = tmp_path / "c.cfg"
    f.write_text(dump_config(p))
    assert load_config(f) == p


@given(st.integers(2, 12), st.floats(0.05, 3.0), st.floats(0.01, 0.99))
def test_with_eta_maps_exponents(m, c1, frac):
    p = ModelParams(m=m, c1=c1, c2=c1 * frac)
    q = p.with_eta()
    assert q.c1 == pytest.approx(1 - p.eta1) and q.c2 == pytest.approx(1 - p.eta2)
    assert p.b1(0.5) < p.b2(0.5)
