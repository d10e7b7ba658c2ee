"""Closed-form values, invariants, and gradient checks for every loss term."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

import physwm.losses as L
from physwm.errors import ShapeError

TOL = 1e-9


def finite_floats(lo=-10.0, hi=10.0):
    return st.floats(min_value=lo, max_value=hi, allow_nan=False, width=64)


def arrays(shape, lo=-10.0, hi=10.0):
    return hnp.arrays(np.float64, shape, elements=finite_floats(lo, hi))


# ---------------------------------------------------------------------------
# closed forms

class TestClosedForms:
    def test_elbo_perfect(self):
        x = np.ones((2, 3))
        assert L.reconstruction_elbo(x, x, np.zeros((2, 4)), np.zeros((2, 4)),
                                     beta=1.0) == pytest.approx(0.0, abs=TOL)

    def test_kl_unit_gaussian_is_zero(self):
        assert L.kl_to_unit(np.zeros((5, 8)), np.zeros((5, 8))) == pytest.approx(
            0.0, abs=TOL)

    def test_kl_half(self):
        assert L.kl_to_unit(np.array([[1.0, 0.0]]),
                            np.zeros((1, 2))) == pytest.approx(0.5, abs=TOL)

    def test_branch_all_zero(self):
        total, per = L.structured_branch_loss(
            [(np.zeros(3), np.zeros(3), 1.0), (np.ones(2), np.ones(2), 1.0)])
        assert total == pytest.approx(0.0, abs=TOL)
        assert per == [0.0, 0.0]

    def test_branch_one_plus_two(self):
        total, per = L.structured_branch_loss(
            [(np.array([1.0]), np.array([0.0]), 1.0),
             (np.array([np.sqrt(2.0)]), np.array([0.0]), 1.0)])
        assert total == pytest.approx(3.0, abs=TOL)
        assert per[0] == pytest.approx(1.0, abs=TOL)

    def test_branch_additivity(self):
        residual = [(np.array([2.0]), np.array([1.0]), 1.0)]
        state_perfect = [(np.array([0.3]), np.array([0.3]), 1.0)]
        total, _ = L.structured_branch_loss(state_perfect + residual)
        residual_only, _ = L.structured_branch_loss(residual)
        assert total == pytest.approx(residual_only, abs=TOL)

    def test_equivariance_identity(self):
        z = np.array([[0.4, -1.2, 3.0]])
        assert L.equivariance_value(z, z, lam=1.0) == pytest.approx(0.0, abs=TOL)

    def test_equivariance_constant_encoder(self):
        enc = lambda x: np.array([2.0, 0.0])
        pair = L.TransformPair("any", L.LatentShift((0,), (0.0,)))
        value = L.equivariance_loss(enc, [(None, None)], [pair], lam=1.0)
        assert value == pytest.approx(0.0, abs=TOL)

    def test_equivariance_one_point(self):
        assert L.equivariance_value(np.array([2.0, 1.0]), np.array([2.0, 0.0]),
                                    lam=1.0) == pytest.approx(1.0, abs=TOL)

    def test_supervised_exact(self):
        z = np.array([[0.1, -0.2, 0.0, 0.0]])
        labels = np.array([[0.1, -0.2, 9.9, 9.9]])
        assert L.supervised_state_loss(z, labels, (0, 1)) == pytest.approx(
            0.0, abs=TOL)

    def test_supervised_none_level(self):
        z = np.ones((3, 4))
        assert L.supervised_state_loss(z, np.zeros((3, 4)), ()) == 0.0

    def test_supervised_unit_error(self):
        assert L.supervised_state_loss(np.array([[1.0]]), np.array([[0.0]]),
                                       (0,)) == pytest.approx(1.0, abs=TOL)

    def test_smoothness_linear(self):
        assert L.smoothness_loss(np.array([0.0, 1.0, 2.0, 3.0])) == pytest.approx(
            0.0, abs=TOL)

    def test_smoothness_examples(self):
        assert L.smoothness_loss(np.array([0.0, 1.0, 4.0])) == pytest.approx(
            4.0, abs=TOL)
        assert L.smoothness_loss(np.array([1.0, 1.0, 1.0, 5.0])) == pytest.approx(
            16.0, abs=TOL)

    def test_interval_examples(self):
        assert L.interval_loss(0.5, 0.0, 1.0) == pytest.approx(0.0, abs=TOL)
        assert L.interval_loss(1.5, 0.0, 1.0) == pytest.approx(0.25, abs=TOL)
        assert L.interval_loss(-0.2, 0.0, 1.0) == pytest.approx(0.04, abs=TOL)

    def test_partitioned_perfect(self):
        x = np.random.default_rng(0).uniform(0, 1, (1, 2, 2))
        parts = np.stack([x * 1.0, x * 0.0])
        assert L.partitioned_gen_loss(x, x, parts, parts,
                                      lam=0.2) == pytest.approx(0.0, abs=TOL)

    def test_partitioned_lam_zero(self):
        rng = np.random.default_rng(1)
        x, x_hat = rng.uniform(0, 1, (2, 3, 3)), rng.uniform(0, 1, (2, 3, 3))
        parts = rng.uniform(0, 1, (2, 2, 3, 3))
        targets = rng.uniform(0, 1, (2, 2, 3, 3))
        assert L.partitioned_gen_loss(x, x_hat, parts, targets,
                                      lam=0.0) == pytest.approx(
            L.mse(x_hat, x), abs=TOL)

    def test_partitioned_worked_2x2(self):
        x = np.array([[1.0, 0.0], [0.0, 0.0]])
        target = x.copy()
        part = x.copy()
        part[0, 0] += 0.5
        value = L.partitioned_gen_loss(x, x, part[None], target[None], lam=0.2)
        assert value == pytest.approx(0.0125, abs=TOL)

    def test_prediction_examples(self):
        z = np.zeros((3, 2, 64))
        assert L.prediction_loss(z, z) == pytest.approx(0.0, abs=TOL)
        assert L.prediction_loss(z + 1.0, z) == pytest.approx(1.0, abs=TOL)
        one = np.zeros((1, 1, 64))
        off = one.copy()
        off[0, 0, 0] = 2.0
        assert L.prediction_loss(off, one) == pytest.approx(4.0 / 64.0, abs=TOL)


# ---------------------------------------------------------------------------
# errors

class TestErrors:
    def test_mse_shape_mismatch(self):
        with pytest.raises(ShapeError):
            L.mse(np.zeros(3), np.zeros(4))

    def test_equivariance_empty_pairs(self):
        with pytest.raises(ShapeError):
            L.equivariance_loss(lambda x: x, [], [], lam=1.0)
        with pytest.raises(ShapeError):
            L.equivariance_value(np.zeros((0, 4)), np.zeros((0, 4)))

    def test_smoothness_too_short(self):
        with pytest.raises(ShapeError):
            L.smoothness_loss(np.array([0.0, 1.0]))

    def test_interval_inverted(self):
        with pytest.raises(ValueError):
            L.interval_loss(0.5, 1.0, 0.0)

    def test_partitioned_count_mismatch(self):
        x = np.zeros((2, 2))
        with pytest.raises(ShapeError):
            L.partitioned_gen_loss(x, x, np.zeros((2, 2, 2)), np.zeros((3, 2, 2)))

    def test_registry_duplicate_names(self):
        reg = L.LossRegistry()
        reg.add("a", 1.0, lambda ctx: 0.0)
        with pytest.raises(ValueError):
            L.LossRegistry([L.LossTerm("a", 1.0, None), L.LossTerm("a", 2.0, None)])

    def test_negative_weight(self):
        with pytest.raises(ValueError):
            L.LossTerm("bad", -0.5, None)


# ---------------------------------------------------------------------------
# properties

class TestProperties:
    @given(arrays((4, 6)), arrays((4, 6)))
    def test_mse_nonnegative_symmetric(self, a, b):
        assert L.mse(a, b) >= 0.0
        assert L.mse(a, b) == pytest.approx(L.mse(b, a), rel=1e-12, abs=1e-12)

    @given(arrays((3, 5), -3, 3), arrays((3, 5), -3, 3))
    def test_kl_nonnegative(self, mu, logvar):
        assert L.kl_to_unit(mu, logvar) >= -1e-12

    @given(arrays((2, 3, 8)), arrays((2, 3, 8)))
    def test_equivariance_nonnegative(self, a, b):
        assert L.equivariance_value(a, b, lam=0.7) >= 0.0

    @given(arrays((5,), -2, 2), finite_floats(1e-6, 2.0))
    def test_equivariance_argmin_and_witness(self, z, eps):
        assert L.equivariance_value(z, z) == 0.0
        z2 = z.copy()
        z2[0] += eps
        assert L.equivariance_value(z2, z) > 0.0

    @given(finite_floats(-5, 5), finite_floats(-5, 5), st.integers(3, 9))
    def test_smoothness_null_space_is_affine(self, a, b, n):
        t = np.arange(n, dtype=np.float64)
        assert L.smoothness_loss(a * t + b) == pytest.approx(0.0, abs=1e-9)

    @given(arrays((6,), -4, 4))
    def test_smoothness_positive_off_null_space(self, p):
        d2 = p[:-2] - 2.0 * p[1:-1] + p[2:]
        if np.max(np.abs(d2)) > 1e-6:
            assert L.smoothness_loss(p) > 0.0

    @given(arrays((4,), -2, 2), finite_floats(-1, 0), finite_floats(0, 1))
    def test_interval_zero_inside(self, p, a, b):
        clipped = np.clip(p, a, b)
        assert L.interval_loss(clipped, a, b) == pytest.approx(0.0, abs=1e-12)
        assert L.interval_loss(p, a, b) >= 0.0

    @given(arrays((2, 4, 4), 0, 1), arrays((2, 4, 4), 0, 1),
           arrays((3, 2, 4, 4), 0, 1), arrays((3, 2, 4, 4), 0, 1),
           finite_floats(0.01, 2.0))
    def test_partitioned_lambda_scaling(self, x, x_hat, parts, targets, lam):
        whole = L.mse(x_hat, x)
        v1 = L.partitioned_gen_loss(x, x_hat, parts, targets, lam=lam)
        v2 = L.partitioned_gen_loss(x, x_hat, parts, targets, lam=2.0 * lam)
        part_term = v1 - whole
        assert v2 - whole == pytest.approx(2.0 * part_term, rel=1e-9, abs=1e-9)

    @given(st.lists(st.tuples(finite_floats(0, 3), finite_floats(0, 5)),
                    min_size=1, max_size=6))
    def test_registry_total_is_weighted_sum(self, pairs):
        reg = L.LossRegistry()
        for i, (weight, value) in enumerate(pairs):
            reg.add(f"term{i}", weight, lambda ctx, v=value: v)
        total, values = reg.evaluate({})
        assert total == sum(w * v for (w, v), _ in zip(pairs, values))
        assert len(values) == len(pairs)


# ---------------------------------------------------------------------------
# gradients vs central differences

def _fd_check(fn, grad, x, eps=1e-6, rel=1e-6):
    g = grad(x)
    flat = x.reshape(-1)
    idx = np.linspace(0, flat.size - 1, min(10, flat.size)).astype(int)
    for i in idx:
        orig = flat[i]
        flat[i] = orig + eps
        hi = fn(x)
        flat[i] = orig - eps
        lo = fn(x)
        flat[i] = orig
        num = (hi - lo) / (2.0 * eps)
        ana = g.reshape(-1)[i]
        assert ana == pytest.approx(num, rel=rel, abs=1e-9), f"dim {i}"


class TestGradients:
    def setup_method(self):
        self.rng = np.random.default_rng(42)

    def test_mse_grad(self):
        a, b = self.rng.normal(size=(3, 5)), self.rng.normal(size=(3, 5))
        _fd_check(lambda x: L.mse(x, b), lambda x: L.mse_grad(x, b), a)

    def test_kl_grads(self):
        mu = self.rng.normal(size=(2, 6))
        lv = self.rng.normal(size=(2, 6)) * 0.3
        _fd_check(lambda m: L.kl_to_unit(m, lv),
                  lambda m: L.kl_to_unit_grad(m, lv)[0], mu)
        _fd_check(lambda v: L.kl_to_unit(mu, v),
                  lambda v: L.kl_to_unit_grad(mu, v)[1], lv)

    def test_equivariance_grads(self):
        a = self.rng.normal(size=(3, 2, 5))
        b = self.rng.normal(size=(3, 2, 5))
        _fd_check(lambda x: L.equivariance_value(x, b, lam=0.7),
                  lambda x: L.equivariance_grad(x, b, lam=0.7)[0], a)
        _fd_check(lambda y: L.equivariance_value(a, y, lam=0.7),
                  lambda y: L.equivariance_grad(a, y, lam=0.7)[1], b)

    def test_supervised_grad(self):
        z = self.rng.normal(size=(4, 8))
        labels = self.rng.normal(size=(4, 8))
        _fd_check(lambda x: L.supervised_state_loss(x, labels, (0, 2, 3)),
                  lambda x: L.supervised_state_grad(x, labels, (0, 2, 3)), z)

    def test_smoothness_grad(self):
        p = self.rng.normal(size=(7, 3))
        _fd_check(L.smoothness_loss, L.smoothness_grad, p)

    def test_interval_grad(self):
        p = self.rng.uniform(-2, 2, size=(6,))
        _fd_check(lambda x: L.interval_loss(x, -0.5, 0.5),
                  lambda x: L.interval_grad(x, -0.5, 0.5), p)

    def test_partitioned_grads(self):
        x = self.rng.uniform(0, 1, (2, 4, 4))
        x_hat = self.rng.uniform(0, 1, (2, 4, 4))
        parts = self.rng.uniform(0, 1, (3, 2, 4, 4))
        targets = self.rng.uniform(0, 1, (3, 2, 4, 4))
        _fd_check(
            lambda v: L.partitioned_gen_loss(x, v, parts, targets),
            lambda v: L.partitioned_gen_grad(x, v, parts, targets)[0], x_hat)
        _fd_check(
            lambda v: L.partitioned_gen_loss(x, x_hat, v, targets),
            lambda v: L.partitioned_gen_grad(x, x_hat, v, targets)[1], parts)

    def test_prediction_grad(self):
        pred = self.rng.normal(size=(4, 2, 8))
        target = self.rng.normal(size=(4, 2, 8))
        _fd_check(lambda v: L.prediction_loss(v, target),
                  lambda v: L.prediction_grad(v, target), pred)
