import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tact.oracle import GridSimConfig, grid_fire
from tact.timing import (
    DomainError,
    EncodingConfig,
    RailSpec,
    SpikeEvent,
    choose_threshold,
    decode_same_sign_sum,
    decode_time,
    encode,
    solve_firing_time,
)

unit = st.floats(0.0, 1.0, allow_nan=False)


def rail(events, theta, start=0.0):
    return RailSpec.from_events([SpikeEvent(t, k) for t, k in events], theta, start)


class TestEncoding:
    @pytest.mark.parametrize("x, t_in, expected", [(1.0, 1.0, 0.0), (0.0, 1.0, 1.0), (0.25, 2.0, 1.5)])
    def test_encode(self, x, t_in, expected):
        assert encode(x, EncodingConfig(t_in=t_in)) == expected

    @pytest.mark.parametrize("t, t_in, expected", [(0.0, 1.0, 1.0), (1.0, 1.0, 0.0), (1.5, 2.0, 0.25)])
    def test_decode(self, t, t_in, expected):
        assert decode_time(t, EncodingConfig(t_in=t_in)) == expected

    def test_window_start_offsets(self):
        cfg = EncodingConfig(t_in=2.0)
        assert encode(0.5, cfg, window_start=3.0) == 4.0
        assert decode_time(4.0, cfg, window_start=3.0) == 0.5

    @pytest.mark.parametrize("x", [-0.01, 1.01, math.nan])
    def test_encode_rejects_out_of_range(self, x):
        with pytest.raises(DomainError):
            encode(x, EncodingConfig())

    def test_decode_rejects_outside_window(self):
        with pytest.raises(DomainError):
            decode_time(1.5, EncodingConfig(), window_start=0.0)

    @given(unit, st.floats(1e-3, 1e3), st.floats(-100, 100))
    def test_round_trip(self, x, t_in, start):
        cfg = EncodingConfig(t_in=t_in)
        back = decode_time(encode(x, cfg, start), cfg, start)
        assert back == pytest.approx(x, rel=1e-12, abs=1e-12 * (1 + abs(start) / t_in))


class TestConfig:
    @pytest.mark.parametrize("kwargs", [{"t_in": 0}, {"lam": -1}, {"epsilon": -0.1}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            EncodingConfig(**kwargs)


class TestThreshold:
    def test_reference_value(self):
        # 26.41 after rounding
        assert choose_threshold(24.01, EncodingConfig(epsilon=0.1)) == pytest.approx(26.411)

    def test_zero_beta(self):
        assert choose_threshold(0.0, EncodingConfig()) == 0.0

    def test_substitution(self):
        assert choose_threshold(1.0, EncodingConfig(t_in=3.0, lam=2.0, epsilon=0.0)) == 6.0

    def test_lower_bound(self):
        cfg = EncodingConfig(t_in=1.5, lam=0.7, epsilon=0.05)
        assert choose_threshold(3.0, cfg) >= cfg.lam * 3.0 * cfg.t_in


class TestSolver:
    def test_single_ramp(self):
        assert solve_firing_time(rail([(0.0, 1.0)], 2.0)) == (True, 2.0)

    def test_two_ramps(self):
        # V = t before 1, 2t - 1 after; 2t - 1 = 3
        result = solve_firing_time(rail([(0.0, 1.0), (1.0, 1.0)], 3.0))
        assert result.fired and result.t_nu == pytest.approx(2.0, abs=1e-15)

    def test_crossing_before_later_event(self):
        result = solve_firing_time(rail([(0.0, 2.0), (5.0, 10.0)], 4.0))
        assert result.t_nu == pytest.approx(2.0)

    def test_all_at_window_start_hits_upper_end(self):
        cfg = EncodingConfig(epsilon=0.1)
        a = np.array([0.5, 1.5, 3.0])
        r = RailSpec(np.zeros(3), cfg.lam * a, choose_threshold(a.sum(), cfg))
        assert solve_firing_time(r).t_nu == pytest.approx((1 + cfg.epsilon) * cfg.t_in, abs=1e-12)

    def test_no_slope_never_fires(self):
        assert not solve_firing_time(rail([(0.0, 0.0), (0.5, 0.0)], 1.0)).fired
        assert not solve_firing_time(RailSpec(np.array([]), np.array([]), 0.0)).fired

    def test_ties_merge(self):
        split = solve_firing_time(rail([(0.3, 1.0), (0.3, 2.0), (0.7, 1.0)], 5.0))
        merged = solve_firing_time(rail([(0.3, 3.0), (0.7, 1.0)], 5.0))
        assert split.t_nu == merged.t_nu

    def test_order_independent(self):
        events = [(0.9, 1.0), (0.1, 2.0), (0.5, 0.5)]
        assert (solve_firing_time(rail(events, 3.0)).t_nu
                == solve_firing_time(rail(events[::-1], 3.0)).t_nu)

    def test_rejects_negative_slope(self):
        with pytest.raises(ValueError):
            rail([(0.0, -1.0)], 1.0)

    def test_rejects_nonpositive_theta(self):
        with pytest.raises(ValueError):
            rail([(0.0, 1.0)], 0.0)

    def test_fires_after_earliest_event(self):
        r = rail([(2.0, 1.0), (3.0, 1.0)], 1e-9)
        assert solve_firing_time(r).t_nu >= 2.0


rails = st.integers(1, 64).flatmap(lambda n: st.tuples(
    st.lists(unit, min_size=n, max_size=n),
    st.lists(st.floats(0.0, 10.0), min_size=n, max_size=n),
))


def _window_rail(xs, slopes, cfg, start=0.0):
    times = np.array([encode(x, cfg, start) for x in xs])
    k = cfg.lam * np.array(slopes)
    return RailSpec(times, k, choose_threshold(k.sum() / cfg.lam, cfg), start)


class TestSolverProperties:
    @settings(max_examples=200)
    @given(rails, st.floats(-50, 50))
    def test_shift_invariance(self, data, delta):
        xs, slopes = data
        if sum(slopes) == 0:
            return
        cfg = EncodingConfig()
        r = _window_rail(xs, slopes, cfg)
        shifted = RailSpec(r.times + delta, r.slopes, r.theta)
        assert (solve_firing_time(shifted).t_nu
                == pytest.approx(solve_firing_time(r).t_nu + delta, abs=1e-12 * (1 + abs(delta))))

    @settings(max_examples=200)
    @given(rails, st.floats(1e-3, 1e3))
    def test_scale_invariance(self, data, c):
        xs, slopes = data
        if sum(slopes) == 0:
            return
        r = _window_rail(xs, slopes, EncodingConfig())
        scaled = RailSpec(r.times, r.slopes * c, r.theta * c)
        assert solve_firing_time(scaled).t_nu == pytest.approx(solve_firing_time(r).t_nu, rel=1e-12)

    @settings(max_examples=200)
    @given(rails, st.floats(0.0, 0.5), st.floats(-5, 5))
    def test_window_law(self, data, eps, start):
        xs, slopes = data
        if sum(slopes) == 0:
            return
        cfg = EncodingConfig(t_in=1.0, epsilon=eps)
        t = solve_firing_time(_window_rail(xs, slopes, cfg, start)).t_nu
        tol = 1e-12 * (1 + abs(start))
        assert start + (1 + eps) * cfg.t_in - tol <= t <= start + (2 + eps) * cfg.t_in + tol

    @settings(max_examples=200)
    @given(rails)
    def test_decode_same_sign(self, data):
        xs, slopes = data
        beta = sum(slopes)
        if beta == 0:
            return
        cfg = EncodingConfig()
        res = solve_firing_time(_window_rail(xs, slopes, cfg))
        expected = math.fsum(a * x for a, x in zip(slopes, xs))
        assert decode_same_sign_sum(res, beta, cfg) == pytest.approx(expected, rel=1e-9, abs=1e-12 * beta)

    @settings(max_examples=200)
    @given(rails, st.data())
    def test_monotone_in_inputs(self, data, draw):
        xs, slopes = data
        if sum(slopes) == 0:
            return
        cfg = EncodingConfig()
        i = draw.draw(st.integers(0, len(xs) - 1))
        bumped = list(xs)
        bumped[i] = draw.draw(st.floats(xs[i], 1.0))
        before = solve_firing_time(_window_rail(xs, slopes, cfg)).t_nu
        after = solve_firing_time(_window_rail(bumped, slopes, cfg)).t_nu
        assert after <= before + 1e-12

    def test_matches_grid(self):
        rng = np.random.default_rng(7)
        cfg = EncodingConfig()
        step = 1e-3
        for _ in range(50):
            n = rng.integers(1, 65)
            r = _window_rail(rng.uniform(0, 1, n), rng.uniform(0, 10, n), cfg)
            exact = solve_firing_time(r)
            approx = grid_fire(r, GridSimConfig(step, 2.5))
            assert 0.0 <= approx.t_nu - exact.t_nu <= step


class TestDecodeSameSign:
    cfg = EncodingConfig(epsilon=0.1)

    def test_all_max(self):
        from tact.timing import FiringResult
        assert decode_same_sign_sum(FiringResult(True, 1.1), 3.0, self.cfg) == pytest.approx(3.0)

    def test_all_min(self):
        from tact.timing import FiringResult
        assert decode_same_sign_sum(FiringResult(True, 2.1), 3.0, self.cfg) == pytest.approx(0.0)

    def test_brute_force_cross_check(self):
        # weights [1, 1] with x = [0.5, 0.5] sum to 1.0 and fire at 1.6
        r = _window_rail([0.5, 0.5], [1.0, 1.0], self.cfg)
        exact = solve_firing_time(r)
        assert exact.t_nu == pytest.approx(1.6)
        grid = grid_fire(r, GridSimConfig(1e-5, 2.5))
        assert decode_same_sign_sum(grid, 2.0, self.cfg) == pytest.approx(1.0, abs=2 * 2e-5)
        assert decode_same_sign_sum(exact, 2.0, self.cfg) == pytest.approx(1.0)

    def test_not_fired(self):
        from tact.timing import NO_FIRE
        with pytest.raises(DomainError):
            decode_same_sign_sum(NO_FIRE, 1.0, self.cfg)
