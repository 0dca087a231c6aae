import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cascade_dim.errors import DomainError, RegimeError
from cascade_dim.weights import (
    LOG4,
    WeightModel,
    classify_regime,
    gamma,
    log2_moment,
    log2_moment_slope,
    parse_model,
    path_log2_weights,
    require_subcritical,
    root_keys,
    child_keys,
    sample_weight,
    weights_from_keys,
    w_log2w,
)

LN2 = math.log(2.0)
# independent oracles: direct evaluation of the defining expectations
TP99_GAMMA = -math.log2(math.sqrt(1 - 0.99**2))
TP99_WLOGW = 0.5 * (0.01 * math.log2(0.01) + 1.99 * math.log2(1.99))


def test_frozen_oracle_values():
    assert TP99_GAMMA == pytest.approx(2.8255439, abs=1e-6)
    assert TP99_WLOGW == pytest.approx(0.9545853, abs=1e-6)


class TestConstruction:
    def test_lognormal_location_is_forced(self):
        m = WeightModel.log_normal(0.8)
        assert m.mu == -0.4

    @pytest.mark.parametrize("xi", [0.0, 1.0, -0.2, 1.5])
    def test_two_point_range(self, xi):
        with pytest.raises(DomainError):
            WeightModel.two_point(xi)

    @pytest.mark.parametrize("s2", [0.0, -1.0, math.inf])
    def test_lognormal_variance(self, s2):
        with pytest.raises(DomainError):
            WeightModel.log_normal(s2)

    def test_supercritical_is_constructible(self):
        m = WeightModel.log_normal(3.0)
        assert classify_regime(m).regime == "supercritical"
        with pytest.raises(RegimeError):
            require_subcritical(m)


class TestParse:
    def test_sigma2(self):
        assert parse_model("lognormal:sigma2=0.5") == WeightModel.log_normal(0.5)

    def test_two_point(self):
        assert parse_model("twopoint:xi=0.99") == WeightModel.two_point(0.99)

    def test_sigma_convention_squares(self):
        m = parse_model("lognormal:sigma2=0.5", sigma_convention="sigma")
        assert m.sigma2 == 0.25
        assert parse_model("lognormal:sigma=0.5") == m

    def test_near_critical_value_read_as_sigma_is_supercritical(self):
        m = parse_model(f"lognormal:sigma2={LOG4 - 0.01}", sigma_convention="sigma")
        assert classify_regime(m).regime == "supercritical"

    @pytest.mark.parametrize("text", ["lognormal", "twopoint:sigma2=0.5", "lognormal:xi=0.5",
                                      "gauss:sigma2=1", "lognormal:sigma2=abc"])
    def test_rejects(self, text):
        with pytest.raises(DomainError):
            parse_model(text)

    @given(st.floats(0.01, 0.99))
    def test_spec_string_round_trips(self, xi):
        m = WeightModel.two_point(xi)
        assert parse_model(m.spec_string()) == m


class TestMoments:
    def test_examples(self, ln_half):
        assert log2_moment(ln_half, 1.0) == 0.0
        assert log2_moment(ln_half, 2.0) == pytest.approx(1.0, abs=1e-15)
        assert log2_moment(WeightModel.two_point(0.5), 0.0) == 0.0

    def test_negative_order_rejected(self, ln_half):
        with pytest.raises(DomainError):
            log2_moment(ln_half, -0.1)
        with pytest.raises(DomainError):
            log2_moment_slope(ln_half, [0.2, -1.0])

    def test_two_point_closed_form(self):
        m = WeightModel.two_point(0.3)
        t = 1.7
        assert log2_moment(m, t) == pytest.approx(math.log2((0.7**t + 1.3**t) / 2), rel=1e-14)

    def test_mean_one(self, any_model):
        assert abs(log2_moment(any_model, 1.0)) < 1e-12

    def test_convex_on_grid(self, any_model):
        t = np.linspace(0, 4, 401)
        v = log2_moment(any_model, t)
        assert np.all(v[2:] - 2 * v[1:-1] + v[:-2] >= -1e-9)

    def test_slope_matches_finite_differences(self, any_model):
        t = np.linspace(1e-3, 4, 300)
        h = 1e-6
        fd = (log2_moment(any_model, t + h) - log2_moment(any_model, t - h)) / (2 * h)
        assert np.max(np.abs(fd - log2_moment_slope(any_model, t))) < 1e-6

    def test_slope_at_zero_is_minus_gamma(self, any_model):
        assert abs(log2_moment_slope(any_model, 0.0) + gamma(any_model)) < 1e-12

    def test_slope_examples(self, ln_half):
        assert log2_moment_slope(ln_half, 0.0) == -0.5
        assert log2_moment_slope(ln_half, 0.5) == 0.0
        m = WeightModel.two_point(0.99)
        h = 1e-6
        fd = (log2_moment(m, h) - log2_moment(m, 0.0)) / h
        assert log2_moment_slope(m, 0.0) == pytest.approx(fd, abs=1e-4)
        assert log2_moment_slope(m, 0.0) == pytest.approx(-TP99_GAMMA, abs=1e-12)

    @given(st.floats(0.05, 1.38), st.floats(0, 5), st.floats(0.001, 2))
    def test_slope_strictly_increasing(self, s2, t, dt):
        for m in (WeightModel.log_normal(s2), WeightModel.two_point(min(s2 / 1.4, 0.99))):
            assert log2_moment_slope(m, t + dt) > log2_moment_slope(m, t)

    def test_array_in_array_out(self, ln_half):
        out = log2_moment(ln_half, np.array([0.0, 1.0, 2.0]))
        assert isinstance(out, np.ndarray) and out.shape == (3,)
        assert isinstance(log2_moment(ln_half, 2.0), float)


class TestGammaAndRegime:
    def test_gamma_examples(self, ln_half):
        assert gamma(WeightModel.log_normal(LOG4)) == 1.0
        assert gamma(ln_half) == 0.5
        assert gamma(WeightModel.two_point(0.99)) == pytest.approx(TP99_GAMMA, abs=1e-12)

    def test_regime_examples(self):
        assert classify_regime(WeightModel.log_normal(LOG4 - 0.01)).regime == "subcritical"
        assert classify_regime(WeightModel.log_normal(LOG4)).regime == "critical"
        rep = classify_regime(WeightModel.two_point(0.99))
        assert rep.regime == "subcritical"
        assert rep.w_logw == pytest.approx(TP99_WLOGW, abs=1e-12)

    @given(st.floats(0.01, 3.0))
    def test_lognormal_threshold(self, s2):
        rep = classify_regime(WeightModel.log_normal(s2))
        assert rep.subcritical == (s2 < LOG4)

    def test_both_sides_of_boundary(self):
        assert classify_regime(WeightModel.log_normal(LOG4 * (1 - 1e-9))).subcritical
        assert classify_regime(WeightModel.log_normal(LOG4 * (1 + 1e-9))).regime == "supercritical"

    def test_w_log2w_two_point(self):
        assert w_log2w(WeightModel.two_point(0.99)) == pytest.approx(TP99_WLOGW, abs=1e-14)


class TestSampling:
    @given(st.integers(0, 2**64 - 1), st.lists(st.integers(0, 1), min_size=1, max_size=40))
    def test_deterministic(self, seed, path):
        m = WeightModel.log_normal(0.5)
        assert sample_weight(m, seed, path) == sample_weight(m, seed, path)

    @given(st.integers(0, 2**63), st.lists(st.integers(0, 1), min_size=1, max_size=30))
    def test_two_point_support(self, seed, path):
        assert sample_weight(WeightModel.two_point(0.5), seed, path) in (0.5, 1.5)

    def test_root_has_no_weight(self, ln_half):
        with pytest.raises(DomainError):
            sample_weight(ln_half, 0, [])

    def test_tree_and_path_agree(self, ln_half):
        keys = root_keys(42)
        for _ in range(5):
            keys = child_keys(keys)
        path = [1, 0, 1, 1, 0]
        idx = int("".join(map(str, path)), 2)
        tree_w = weights_from_keys(ln_half, keys)[idx]
        assert tree_w == sample_weight(ln_half, 42, path)

    @pytest.mark.parametrize("model", [WeightModel.log_normal(LN2), WeightModel.two_point(0.99)])
    def test_mean_and_log_mean(self, model):
        # levels 1..20 of 50k independent realizations: 10^6 node draws
        path = [0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 0, 0, 1, 0, 1, 1, 0, 1, 0]
        w = np.exp2(path_log2_weights(model, np.arange(50_000), path)).ravel()
        se = w.std(ddof=1) / math.sqrt(w.size)
        assert abs(w.mean() - 1.0) < 3 * se + 1e-12
        assert abs(w.mean() - 1.0) < 0.01
        lw = np.log2(w)
        se_log = lw.std(ddof=1) / math.sqrt(lw.size)
        assert abs(lw.mean() + gamma(model)) < 3 * se_log

    def test_siblings_are_not_identical(self, ln_half):
        keys = child_keys(root_keys(range(1000))[:, None])
        w = weights_from_keys(ln_half, keys)
        assert np.all(w[:, 0] != w[:, 1])
        assert abs(np.corrcoef(np.log(w[:, 0]), np.log(w[:, 1]))[0, 1]) < 0.1

    @pytest.mark.parametrize("model", [WeightModel.log_normal(LN2), WeightModel.two_point(0.5)])
    def test_strong_law_along_zero_path(self, model):
        k = 10_000
        logs = path_log2_weights(model, np.arange(100), [0] * k)
        drift = logs.mean(axis=1)
        sd = np.log2(weights_from_keys(model, root_keys(np.arange(10_000)))).std()
        inside = np.abs(drift + gamma(model)) <= 4 * sd / math.sqrt(k)
        assert inside.mean() >= 0.95
