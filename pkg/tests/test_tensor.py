#!/usr/bin/env python3
"""
Unit tests for the tensor core: operations, reverse mode and random streams
"""
import numpy as np
import pytest

from src.autodiff import (
    Rng, RngStreams, Tensor, bias_add, concat, constant, ewise, gradcheck, linear, matmul,
    no_grad, parameter, reduce_mean, relu, scale, sigmoid, sin, square, tanh, transpose, unary,
)
from src.errors import ContractError, DimensionError, DomainError

POINTS = 100
TOLERANCE = 1e-6
CHAIN_TOLERANCE = 1e-5


class TestForwardValues:
    """Operations compute what numpy computes."""

    def setup_method(self):
        self.a = np.array([[1.0, -2.0], [0.5, 3.0]])
        self.b = np.array([[0.25, 1.0], [-1.0, 2.0]])

    def test_elementwise(self):
        assert np.array_equal(ewise("add", self.a, self.b).data, self.a + self.b)
        assert np.array_equal(ewise("sub", self.a, self.b).data, self.a - self.b)
        assert np.array_equal(ewise("mul", self.a, self.b).data, self.a * self.b)

    def test_scalar_broadcast(self):
        assert np.array_equal(ewise("mul", 2.0, self.a).data, 2.0 * self.a)
        assert np.array_equal(ewise("add", self.a, np.array([1.5])).data, self.a + 1.5)

    def test_unary(self):
        assert np.allclose(sin(self.a).data, np.sin(self.a))
        assert np.allclose(tanh(self.a).data, np.tanh(self.a))
        assert np.allclose(sigmoid(self.a).data, 1.0 / (1.0 + np.exp(-self.a)))
        assert np.array_equal(square(self.a).data, self.a ** 2)
        assert np.array_equal(relu(self.a).data, np.maximum(self.a, 0.0))
        assert np.array_equal(scale(self.a, 3.0).data, 3.0 * self.a)

    def test_sigmoid_never_overflows(self):
        values = sigmoid(np.array([-1e4, 0.0, 1e4])).data
        assert np.all(np.isfinite(values))
        assert values[0] == 0.0 and values[1] == 0.5 and values[2] == 1.0

    def test_linear_and_bias(self):
        w = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        bias = np.array([0.1, 0.2, 0.3])
        out = linear(self.a, w, bias).data
        assert out.shape == (2, 3)
        assert np.allclose(out, self.a @ w.T + bias)

    def test_concat_columns(self):
        out = concat([self.a, self.b], axis=1).data
        assert np.array_equal(out, np.hstack([self.a, self.b]))

    def test_reduce_mean(self):
        assert reduce_mean(self.a).item() == pytest.approx(np.mean(self.a))


class TestShapeErrors:
    """Mismatched shapes raise instead of broadcasting."""

    def test_ewise_mismatch(self):
        with pytest.raises(DimensionError):
            ewise("add", np.zeros((2, 3)), np.zeros((3, 2)))

    def test_matmul_mismatch(self):
        with pytest.raises(DimensionError):
            matmul(np.zeros((2, 3)), np.zeros((2, 3)))

    def test_bias_mismatch(self):
        with pytest.raises(DimensionError):
            bias_add(np.zeros((2, 3)), np.zeros(2))

    def test_transpose_needs_matrix(self):
        with pytest.raises(DimensionError):
            transpose(np.zeros(3))

    def test_mean_of_empty(self):
        with pytest.raises(DomainError):
            reduce_mean(np.zeros((0, 3)))

    def test_unknown_ops(self):
        with pytest.raises(DomainError):
            ewise("div", 1.0, 2.0)
        with pytest.raises(DomainError):
            unary("log", 1.0)


class TestBackward:
    """Reverse-mode gradients."""

    def setup_method(self):
        self.rng = np.random.default_rng(0)

    def test_linear_gradients(self):
        x = constant(self.rng.normal(size=(5, 3)))
        w = parameter(self.rng.normal(size=(2, 3)), "w")
        b = parameter(np.zeros(2), "b")
        loss = reduce_mean(square(linear(x, w, b)))
        loss.backward()
        y = x.data @ w.data.T + b.data
        expected_w = 2.0 * y.T @ x.data / y.size
        assert np.allclose(w.grad, expected_w)
        assert np.allclose(b.grad, 2.0 * y.sum(axis=0) / y.size)

    def test_gradients_accumulate(self):
        w = parameter(np.array([1.0, 2.0]), "w")
        reduce_mean(square(w)).backward()
        first = w.grad.copy()
        reduce_mean(square(w)).backward()
        assert np.allclose(w.grad, 2.0 * first)
        w.zero_grad()
        assert np.all(w.grad == 0.0)

    def test_shared_node_sums_paths(self):
        w = parameter(np.array([3.0]), "w")
        y = ewise("mul", w, w)
        ewise("add", y, w).backward()
        assert w.grad[0] == pytest.approx(2.0 * 3.0 + 1.0)

    def test_constants_receive_no_gradient(self):
        frozen = constant(np.array([[1.0, 2.0]]))
        w = parameter(np.array([[0.5, -0.5]]), "w")
        reduce_mean(ewise("mul", frozen, w)).backward()
        assert np.all(frozen.grad == 0.0)
        assert not frozen.requires_grad

    def test_non_scalar_root(self):
        w = parameter(np.ones(3), "w")
        with pytest.raises(ContractError):
            square(w).backward()

    def test_no_grad_records_nothing(self):
        w = parameter(np.ones(3), "w")
        with no_grad():
            out = square(w)
        assert out.is_leaf
        assert not out.requires_grad

    def test_leaves_are_read_only(self):
        w = parameter(np.ones(2), "w")
        with pytest.raises(ValueError):
            w.data[0] = 5.0
        with pytest.raises(ContractError):
            w.assign(np.ones(3))


class TestGradcheck:
    """Every differentiable operation agrees with central differences."""

    def setup_method(self):
        rng = np.random.default_rng(7)
        self.points = rng.uniform(-2.0, 2.0, POINTS)
        self.others = rng.uniform(-2.0, 2.0, POINTS)

    @staticmethod
    def pointwise_error(fn, *columns) -> float:
        """Worst relative error over single-element checks, one per sample point."""
        return max(
            gradcheck(lambda *ts: reduce_mean(fn(*ts)), [np.array([v]) for v in values])
            for values in zip(*columns)
        )

    @pytest.mark.parametrize("op", ["sin", "cos", "tanh", "sigmoid", "exp", "square", "neg"])
    def test_unary_ops(self, op):
        assert self.pointwise_error(lambda t: unary(op, t), self.points) < TOLERANCE

    def test_scale(self):
        assert self.pointwise_error(lambda t: scale(t, -1.7), self.points) < TOLERANCE

    def test_relu_away_from_kink(self):
        points = self.points[np.abs(self.points) > 1e-3]
        assert self.pointwise_error(relu, points) < TOLERANCE

    @pytest.mark.parametrize("op", ["add", "sub", "mul"])
    def test_elementwise_ops(self, op):
        assert self.pointwise_error(lambda a, b: ewise(op, a, b), self.points, self.others) < TOLERANCE

    def test_sin_squared_slope(self):
        x = parameter(np.array([0.3]), "x")
        reduce_mean(square(sin(x))).backward()
        assert x.grad[0] == pytest.approx(np.sin(0.6), abs=1e-12)
        assert self.pointwise_error(lambda t: square(sin(t)), self.points[:64]) < TOLERANCE

    def test_linear_function_is_exact(self):
        assert gradcheck(lambda t: reduce_mean(scale(t, 3.0)), [np.array([0.25, -0.5, 1.5])]) < 1e-9

    def test_linear_chain(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(4, 3))
        w = rng.normal(size=(2, 3))
        b = rng.normal(size=2)

        def f(xt, wt, bt):
            return reduce_mean(square(sin(linear(xt, wt, bt))))

        assert gradcheck(f, [x, w, b]) < CHAIN_TOLERANCE

    def test_concat_and_scalar_mul(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=(3, 2))
        b = rng.normal(size=(3, 1))
        s = np.array([0.7])

        def f(at, bt, st):
            return reduce_mean(square(ewise("mul", st, concat([at, bt], axis=1))))

        assert gradcheck(f, [a, b, s]) < CHAIN_TOLERANCE

    def test_reports_wrong_gradient(self):
        def broken(t):
            # value of sin but a tape that claims the derivative is zero
            return reduce_mean(Tensor(np.sin(t.data)) + ewise("mul", 0.0, t))

        assert gradcheck(broken, [np.array([0.3, 0.8])]) > 0.5


class TestRandomStreams:
    """Seeded, independent, restorable streams."""

    def test_same_seed_same_draws(self):
        assert np.array_equal(Rng(5, "init").uniform(0, 1, 8), Rng(5, "init").uniform(0, 1, 8))

    def test_streams_are_independent(self):
        streams = RngStreams(3)
        reference = RngStreams(3).sampler.uniform(0, 1, 4)
        streams.init.uniform(0, 1, 1000)
        assert np.array_equal(streams.sampler.uniform(0, 1, 4), reference)

    def test_derive_differs_by_name(self):
        root = Rng(1)
        assert not np.array_equal(root.derive("a").uniform(0, 1, 4), root.derive("b").uniform(0, 1, 4))

    def test_state_round_trip(self):
        streams = RngStreams(9)
        streams.noise.normal(1.0, 10)
        saved = streams.state()
        expected = streams.noise.normal(1.0, 5)
        restored = RngStreams(9)
        restored.set_state(saved)
        assert np.array_equal(restored.noise.normal(1.0, 5), expected)

    def test_state_of_other_seed_rejected(self):
        with pytest.raises(ContractError):
            RngStreams(1).set_state(RngStreams(2).state())

    def test_bernoulli_is_binary(self):
        draws = Rng(0).bernoulli(0.5, (100,))
        assert set(np.unique(draws)) <= {0.0, 1.0}
