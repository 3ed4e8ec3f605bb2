import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mhlab import MOFunction, luxemburg_indicator_norm, lq_phi_norm, modular_rho, phi_measure, weak_norm
from mhlab.filtration import make_rng
from mhlab.musielak import bisect_decreasing, verify_uniform_type, weak_sup
from mhlab.verify import counterexample_function


def closed_form_weak_lp(f, probs, p):
    """sup_alpha alpha P(|f| > alpha)^(1/p) via the distinct values of |f|."""
    a = np.abs(f)
    best = 0.0
    for v in np.unique(a[a > 0]):
        best = max(best, v * probs[a >= v].sum() ** (1.0 / p))
    return best


def builtin_phis(n, seed=0):
    rng = make_rng(seed)
    return {
        "power": MOFunction.power(0.8),
        "orlicz-mixed": MOFunction.orlicz_fn({"type": "mixed", "p": [0.6, 1.7]}),
        "weighted": MOFunction.weighted(np.exp(rng.standard_normal(n)), {"type": "power", "p": 1.2}),
        "variable": MOFunction.variable(rng.uniform(0.5, 1.8, n)),
    }


class TestMOFunction:
    def test_zero_at_zero(self):
        phi = MOFunction.power(2.0)
        np.testing.assert_array_equal(phi(np.array([0.0, 1.0]), 3)[0], 0.0)

    def test_shape(self):
        phi = MOFunction.variable([1.0, 2.0, 3.0])
        assert phi(np.ones((4, 5)), 3).shape == (4, 5, 3)

    def test_negative_t_rejected(self):
        with pytest.raises(ValueError):
            MOFunction.power(1.0)(-1.0, 2)

    @pytest.mark.parametrize("cfg", [
        {"kind": "power", "p": 0.8},
        {"kind": "weighted", "w": [1.0, 3.0], "orlicz": {"type": "power", "p": 1.0}},
        {"kind": "variable", "p": [0.5, 1.5]},
        {"kind": "orlicz", "orlicz": {"type": "mixed", "p": [0.5, 2.0]}},
    ])
    def test_config_roundtrip(self, cfg):
        phi = MOFunction.from_config(cfg)
        again = MOFunction.from_config(phi.to_config())
        t = np.logspace(-2, 2, 7)
        np.testing.assert_array_equal(phi(t, 2), again(t, 2))

    def test_bad_weight(self):
        with pytest.raises(ValueError):
            MOFunction.weighted([1.0, 0.0])

    def test_indices(self):
        phi = MOFunction.variable([0.7, 1.3, 1.1])
        assert (phi.p_minus, phi.p_plus) == (0.7, 1.3)


class TestPhiMeasure:
    def test_empty(self):
        assert phi_measure(MOFunction.power(1.0), [0.5, 0.5], np.zeros(2, bool), 2.0) == 0.0

    def test_power(self):
        p = 1.7
        val = phi_measure(MOFunction.power(p), [0.2, 0.3, 0.5], [0, 2], 3.0)
        assert val == pytest.approx(3.0**p * 0.7)

    def test_weighted(self):
        phi = MOFunction.weighted([1.0, 3.0])
        assert phi_measure(phi, [0.5, 0.5], [0, 1], 2.0) == pytest.approx(4.0)


class TestUniformType:
    @pytest.mark.parametrize("side", ["lower", "upper"])
    def test_power_exact(self, side):
        rep = verify_uniform_type(MOFunction.power(1.3), 1, 1.3, side)
        assert rep.passed
        assert rep.constant == pytest.approx(1.0)

    def test_variable_exponent(self):
        p = np.array([0.6, 1.0, 1.9])
        phi = MOFunction.variable(p)
        assert verify_uniform_type(phi, 3, 0.6, "lower").passed
        assert verify_uniform_type(phi, 3, 1.9, "upper").passed

    def test_wrong_upper_exponent(self):
        rep = verify_uniform_type(MOFunction.power(2.0), 1, 1.0, "upper")
        assert not rep.passed
        assert rep.constant == pytest.approx(1e4)
        assert rep.growth > 10

    def test_mixed_declared_indices(self):
        phi = MOFunction.orlicz_fn({"type": "mixed", "p": [0.5, 2.5]})
        assert verify_uniform_type(phi, 1, 0.5, "lower").passed
        assert verify_uniform_type(phi, 1, 2.5, "upper").passed


class TestLuxemburg:
    def test_empty(self):
        assert luxemburg_indicator_norm(MOFunction.power(1.0), [0.5, 0.5], [False, False]) == 0.0

    @pytest.mark.parametrize("p", [0.5, 1.0, 2.5])
    def test_power(self, p):
        B = np.array([True, False, True, False])
        val = luxemburg_indicator_norm(MOFunction.power(p), [0.1, 0.2, 0.3, 0.4], B)
        assert val == pytest.approx(0.4 ** (1 / p), rel=1e-10)

    def test_weighted(self):
        w = np.array([2.0, 0.5, 1.0])
        val = luxemburg_indicator_norm(MOFunction.weighted(w), [0.2, 0.3, 0.5], [0, 1])
        assert val == pytest.approx(0.55, rel=1e-10)


class TestWeakNorm:
    def test_zero(self):
        assert weak_norm(MOFunction.power(1.0), np.zeros(4), np.full(4, 0.25)) == 0.0

    @pytest.mark.parametrize("p", [0.5, 2.0])
    def test_constant(self, p):
        assert weak_norm(MOFunction.power(p), np.full(3, 2.5), np.full(3, 1 / 3)) == pytest.approx(2.5, rel=1e-9)

    def test_two_points(self):
        assert weak_norm(MOFunction.power(1.0), [2.0, 1.0], [0.5, 0.5]) == pytest.approx(1.0, rel=1e-9)

    def test_counterexample_norm(self):
        D = 12
        f = counterexample_function(D, 1.0)
        assert weak_norm(MOFunction.power(1.0), f, np.full(2**D, 2.0**-D)) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("seed", range(10))
    @pytest.mark.parametrize("p", [0.5, 1.0, 3.0])
    def test_closed_form(self, seed, p):
        rng = make_rng(seed)
        n = 12
        probs = rng.dirichlet(np.ones(n))
        f = rng.standard_normal(n) * (rng.random(n) < 0.8)
        expected = closed_form_weak_lp(f, probs, p)
        assert weak_norm(MOFunction.power(p), f, probs) == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("kind", ["power", "orlicz-mixed", "weighted", "variable"])
    def test_bisection_certificate(self, kind):
        rng = make_rng(3)
        n = 10
        phi = builtin_phis(n)[kind]
        probs = rng.dirichlet(np.ones(n))
        for _ in range(5):
            f = rng.standard_normal(n) * np.exp(rng.uniform(-3, 3))
            lam = weak_norm(phi, f, probs)
            assert weak_sup(phi, f, probs, lam * (1 + 1e-8)) <= 1.0
            assert weak_sup(phi, f, probs, lam * (1 - 1e-8)) > 1.0

    @pytest.mark.parametrize("kind", ["power", "orlicz-mixed", "weighted", "variable"])
    def test_monotone(self, kind):
        rng = make_rng(4)
        n = 10
        phi = builtin_phis(n)[kind]
        probs = rng.dirichlet(np.ones(n))
        for _ in range(10):
            g = rng.standard_normal(n)
            f = g * rng.random(n)
            assert weak_norm(phi, f, probs) <= weak_norm(phi, g, probs) + 1e-12

    def test_quasi_triangle_constant_finite(self):
        rng = make_rng(5)
        n = 16
        probs = rng.dirichlet(np.ones(n))
        for phi in builtin_phis(n).values():
            worst = 0.0
            for _ in range(50):
                f, g = rng.standard_normal((2, n)) * (rng.random((2, n)) < 0.6)
                den = weak_norm(phi, f, probs) + weak_norm(phi, g, probs)
                if den > 0:
                    worst = max(worst, weak_norm(phi, f + g, probs) / den)
            # the upper-type bound gives 2**(1/p-) up to type constants
            assert 0 < worst <= 2.0 ** (1.0 / phi.p_minus)

    def test_comparability(self):
        # b Phi <= phi <= d Phi pointwise bounds the norm ratio
        rng = make_rng(6)
        n = 12
        probs = rng.dirichlet(np.ones(n))
        b, d, p = 0.5, 4.0, 1.5
        w = rng.uniform(b, d, n)
        phi, Phi = MOFunction.weighted(w, {"type": "power", "p": p}), MOFunction.power(p)
        for _ in range(30):
            f = rng.standard_normal(n)
            r = weak_norm(phi, f, probs) / weak_norm(Phi, f, probs)
            assert b ** (1 / p) - 1e-9 <= r <= d ** (1 / p) + 1e-9

    def test_discontinuous_custom_uses_grid(self):
        # step in t: 2 for t >= 1, else 0; only alpha < 1 with alpha / lam >= 1 binds
        phi = MOFunction.custom(lambda t: 2.0 * (t >= 1.0), 1.0, 1.0, continuous=False)
        lam = weak_norm(phi, [1.0, 3.0], [0.5, 0.5])
        assert lam == pytest.approx(1.0, rel=2e-2)

    @pytest.mark.parametrize("kind", ["power", "orlicz-mixed", "weighted", "variable"])
    def test_normalization(self, kind):
        rng = make_rng(7)
        n = 9
        phi = builtin_phis(n)[kind]
        probs = rng.dirichlet(np.ones(n))
        for _ in range(20):
            f = rng.standard_normal(n) * np.exp(rng.uniform(-4, 4))
            assert weak_sup(phi, f, probs, weak_norm(phi, f, probs)) == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.floats(-1e3, 1e3).filter(lambda c: abs(c) > 1e-3),
       st.sampled_from(["power", "orlicz-mixed", "weighted", "variable"]))
def test_homogeneity(seed, c, kind):
    rng = make_rng(seed)
    n = 8
    phi = builtin_phis(n, 1)[kind]
    probs = rng.dirichlet(np.ones(n))
    f = rng.standard_normal(n)
    assert weak_norm(phi, c * f, probs) == pytest.approx(abs(c) * weak_norm(phi, f, probs), rel=1e-9)


class TestModular:
    def test_zero(self):
        assert modular_rho(MOFunction.power(1.0), np.zeros(3), np.full(3, 1 / 3)) == 0.0

    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0])
    def test_power_relation(self, p):
        rng = make_rng(8)
        probs = rng.dirichlet(np.ones(10))
        f = rng.standard_normal(10)
        phi = MOFunction.power(p)
        assert modular_rho(phi, f, probs) == pytest.approx(weak_norm(phi, f, probs) ** p, rel=1e-9)

    def test_normalized_modular_is_one(self):
        rng = make_rng(9)
        probs = rng.dirichlet(np.ones(10))
        f = rng.standard_normal(10)
        phi = MOFunction.variable(rng.uniform(0.5, 2.0, 10))
        assert modular_rho(phi, f / weak_norm(phi, f, probs), probs) == pytest.approx(1.0, abs=1e-6)


class TestLqPhi:
    def test_constant(self):
        probs = np.full(4, 0.25)
        B = np.array([True, True, False, False])
        for q in (1.5, 4.0, np.inf):
            assert lq_phi_norm(MOFunction.power(0.7), np.full(4, 2.0) * B, B, q, probs) == pytest.approx(2.0)

    def test_sup(self):
        f = np.array([1.0, -5.0, 2.0])
        assert lq_phi_norm(MOFunction.power(1.0), f, [0, 1, 2], np.inf, np.full(3, 1 / 3)) == 5.0

    def test_weighted_mean(self):
        w = np.array([1.0, 2.0, 3.0])
        probs = np.array([0.2, 0.3, 0.5])
        f = np.array([1.0, 2.0, 0.0])
        B = np.array([True, True, False])
        q = 3.0
        expected = (np.sum(np.abs(f) ** q * w * probs) / np.sum(w * probs * B)) ** (1 / q)
        got = lq_phi_norm(MOFunction.weighted(w, {"type": "power", "p": 0.5}), f, B, q, probs)
        assert got == pytest.approx(expected)

    def test_q_below_one(self):
        with pytest.raises(ValueError):
            lq_phi_norm(MOFunction.power(1.0), [1.0], [0], 0.5, [1.0])


def test_bisect_all_feasible():
    assert bisect_decreasing(lambda lam: 0.0, 1.0) == 0.0
