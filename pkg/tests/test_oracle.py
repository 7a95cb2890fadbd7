import numpy as np
import pytest

from tact.modelio import generate_model
from tact.network import Activation, DenseLayer, LayeredModel
from tact.oracle import GridSimConfig, compare, grid_fire, oracle_forward, relative_error
from tact.timing import RailSpec, solve_firing_time


def test_zero_weights():
    m = LayeredModel([DenseLayer(np.zeros((2, 3)), np.zeros(3), Activation.NONE)])
    pre, acts = oracle_forward(m, [0.5, 0.5])
    assert list(pre) == [0.0, 0.0, 0.0]
    assert len(acts) == 1


def test_scalar_identity():
    m = LayeredModel([DenseLayer([[1.0]], [0.0], Activation.NONE)])
    assert oracle_forward(m, [0.7])[0][0] == 0.7


def test_matches_numpy_matmul():
    rng = np.random.default_rng(0)
    m = generate_model([20, 16, 4], 0)
    x = rng.uniform(0, 1, 20)
    h = np.maximum(x @ m.layers[0].weights + m.layers[0].biases, 0)
    out = h @ m.layers[1].weights + m.layers[1].biases
    np.testing.assert_allclose(oracle_forward(m, x)[0], out, rtol=1e-12, atol=1e-14)


class TestGridFire:
    def test_single_ramp(self):
        r = RailSpec(np.array([0.0]), np.array([1.0]), 2.0)
        t = grid_fire(r, GridSimConfig(1e-3, 5.0)).t_nu
        assert 2.0 <= t <= 2.001 + 1e-12

    def test_unreachable(self):
        r = RailSpec(np.array([0.0]), np.array([1.0]), 100.0)
        assert not grid_fire(r, GridSimConfig(1e-3, 5.0)).fired

    def test_random_rails_within_step(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            n = rng.integers(1, 30)
            k = rng.uniform(0, 10, n)
            r = RailSpec(rng.uniform(0, 1, n), k, 1.1 * k.sum())
            exact = solve_firing_time(r).t_nu
            approx = grid_fire(r, GridSimConfig(1e-3, 2.5)).t_nu
            assert 0 <= approx - exact <= 1e-3

    def test_converges_linearly(self):
        rng = np.random.default_rng(2)
        k = rng.uniform(0, 10, 10)
        r = RailSpec(rng.uniform(0, 1, 10), k, 1.1 * k.sum())
        exact = solve_firing_time(r).t_nu
        for step in (1e-2, 1e-3, 1e-4):
            assert abs(grid_fire(r, GridSimConfig(step, 2.5)).t_nu - exact) <= step


class TestCompare:
    def test_same_path_zero_error(self):
        m = generate_model([5, 4, 3], 3)
        X = np.random.default_rng(3).uniform(0, 1, (4, 5))
        rep = compare(m, X)
        assert rep.n_inputs == 4 and rep.agreement == 4
        assert rep.overall_max_rel <= 1e-9

    def test_deterministic(self):
        m = generate_model([5, 4, 3], 3)
        X = np.random.default_rng(3).uniform(0, 1, (4, 5))
        assert compare(m, X).to_dict() == compare(m, X).to_dict()

    def test_negative_control_reports_error(self):
        m = generate_model([20, 16, 4], 4)
        X = np.random.default_rng(4).uniform(0, 1, (5, 20))
        rep = compare(m, X, threshold_factor=0.5)
        assert rep.overall_max_abs > 1e-3

    def test_summary_format(self):
        m = generate_model([3, 2], 0)
        assert "argmax_match=1/1" in compare(m, [[0.1, 0.2, 0.3]]).summary()


def test_relative_error_floor():
    assert relative_error(0.0, 0.0) == 0.0
    assert relative_error(1.0, 1.0 + 1e-10) == pytest.approx(1e-10, rel=1e-3)
