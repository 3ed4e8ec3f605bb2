import math

import numpy as np
import pytest

from mhlab import MOFunction, dyadic_filtration
from mhlab.musielak import modular_rho, weak_norm
from mhlab.operators import SublinearOperator
from mhlab.verify import (
    Ensemble,
    convergence_experiments,
    measure_gates,
    phi_factory,
    verify_atomic_equivalence,
    verify_martingale_inequalities,
    verify_sublinear_boundedness,
)

POWER = {"kind": "power", "p": 0.8}
WEIGHTED = {"kind": "weighted", "w": {"random": {"seed": 5, "spread": 0.7}}, "orlicz": {"type": "power", "p": 0.8}}


class TestEnsemble:
    def test_deterministic(self):
        a = [tr.f.values for tr in Ensemble(seed=3, trials=6)]
        b = [tr.f.values for tr in Ensemble(seed=3, trials=6)]
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)

    def test_depth_cycle(self):
        assert [tr.depth for tr in Ensemble(trials=5, depths=(2, 4))] == [2, 4, 2, 4, 2]

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            Ensemble(family="bogus").filtration(2)

    def test_random_weights_follow_size(self):
        make = phi_factory(WEIGHTED)
        assert make(dyadic_filtration(2)).weight.shape == (4,)
        assert make(dyadic_filtration(3)).weight.shape == (8,)
        np.testing.assert_array_equal(make(dyadic_filtration(3)).weight, make(dyadic_filtration(3)).weight)


class TestAtomicEquivalence:
    def test_zero_ensemble(self):
        rep = verify_atomic_equivalence(POWER, "s", Ensemble(trials=4, zero=True))
        assert rep.passed
        assert all(p[2] == 0 and p[3] == 0 for p in rep.pairs)

    def test_forward_dyadic_depth5(self):
        rep = verify_atomic_equivalence(POWER, "s", Ensemble(seed=1, trials=100, depths=(5,)))
        assert rep.passed
        assert rep.c_high <= 1 + 1e-9
        assert rep.c_low > 0

    @pytest.mark.parametrize("kind", ["P", "Q", "S", "M"])
    def test_kinds_random_family(self, kind):
        family = "random" if kind in "PQ" else "dyadic"
        rep = verify_atomic_equivalence(WEIGHTED, kind, Ensemble(seed=2, trials=12, family=family))
        assert rep.passed, rep.extra
        assert rep.extra["atom_failures"] == 0
        assert math.isfinite(rep.extra["reverse_constant"])


class TestSublinearBoundedness:
    def test_s_from_WHs_is_identity(self):
        rep = verify_sublinear_boundedness("s", POWER, "WHs", Ensemble(seed=4, trials=10))
        assert rep.c_low == pytest.approx(1.0)
        assert rep.c_high == pytest.approx(1.0)

    def test_S_bounded(self):
        rep = verify_sublinear_boundedness("S", POWER, "WHs", Ensemble(seed=4, trials=10, family="random"))
        assert rep.passed
        assert math.isfinite(rep.c_high)

    def test_rejects_non_sublinear(self):
        T = SublinearOperator("fN^2", lambda f: f.values[-1] ** 2)
        with pytest.raises(ValueError):
            verify_sublinear_boundedness(T, POWER, "WP", Ensemble(trials=3))


@pytest.fixture(scope="module")
def dyadic_reports():
    return {r.tag: r for r in verify_martingale_inequalities(POWER, Ensemble(seed=6, trials=20))}


@pytest.fixture(scope="module")
def convergence_report():
    return convergence_experiments(MOFunction.power(1.0), {"depth": 12, "truncations": [1, 10, 100]})


class TestInequalities:
    def test_all_measured(self, dyadic_reports):
        assert all(r.skipped is None for r in dyadic_reports.values())
        assert all(r.passed for r in dyadic_reports.values())

    def test_mi3(self, dyadic_reports):
        assert dyadic_reports["mi3-P"].c_high <= 1 + 1e-9
        assert dyadic_reports["mi3-Q"].c_high <= 1 + 1e-9

    def test_mi6_two_sided(self, dyadic_reports):
        r = dyadic_reports["mi6"]
        assert 0 < r.c_low <= r.c_high < math.inf

    def test_orthogonality(self, dyadic_reports):
        assert dyadic_reports["orthogonality"].extra["max_relative_error"] <= 1e-9

    def test_irregular_skips_coincidence(self):
        reps = verify_martingale_inequalities(POWER, Ensemble(seed=1, trials=4, family="skewed", depths=(6,)))
        coin = [r for r in reps if r.tag.startswith("coincidence")]
        assert coin and all(r.skipped and "R" in r.skipped for r in coin)
        assert next(r for r in reps if r.tag == "mi3-P").skipped is None

    def test_gate_bound_skips(self):
        # a strict S bound turns the S-gated items off for a rough weight
        phi = {"kind": "weighted", "w": {"random": {"seed": 1, "spread": 2.0}}}
        ens = Ensemble(seed=1, trials=3)
        gates = measure_gates(phi, ens, k_max=1.01)
        assert not gates["pass"]["S"]
        reps = {r.tag: r for r in verify_martingale_inequalities(phi, ens, k_max=1.01)}
        assert "S" in reps["mi4-S/WP"].skipped
        assert reps["mi3-P"].skipped is None


class TestConvergence:
    def test_counterexample(self, convergence_report):
        c = convergence_report["counterexample"]
        assert c["norm"] == pytest.approx(1.0, abs=1e-9)
        for v in c["truncated"].values():
            assert v == pytest.approx(1.0, abs=1e-9)

    def test_all_pass(self, convergence_report):
        assert convergence_report["passed"], convergence_report["assertions"]

    def test_weighted_variant(self):
        rep = convergence_experiments(WEIGHTED, {"trials": 5})
        assert rep["passed"], rep["assertions"]

    def test_f_over_n(self):
        F = dyadic_filtration(5)
        phi = MOFunction.variable(np.linspace(0.6, 1.6, F.n_points))
        f = np.linspace(-2, 3, F.n_points)
        norms = [weak_norm(phi, f / n, F.probs) for n in (1, 10, 100, 10**4, 10**8, 10**12)]
        rhos = [modular_rho(phi, f / n, F.probs) for n in (1, 10, 100, 10**4, 10**8, 10**12)]
        assert np.all(np.diff(norms) < 0) and np.all(np.diff(rhos) < 0)
        assert norms[-1] < 1e-6 and rhos[-1] < 1e-6
