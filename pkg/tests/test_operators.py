import numpy as np
import pytest

from mhlab import MOFunction, Martingale, StoppingTime, dyadic_filtration, random_filtration, random_martingale
from mhlab import regularity_constant, stopped_martingale
from mhlab.filtration import make_rng
from mhlab.musielak import weak_norm
from mhlab.operators import (
    BUILTIN_OPERATORS,
    SPACES,
    SublinearOperator,
    all_space_norms,
    apply_operator,
    check_sublinear,
    is_admissible,
    minimal_envelope,
    operator_levels,
    space_norm,
)


@pytest.fixture
def depth_one():
    return Martingale.from_values(dyadic_filtration(1), [[0, 0], [1, -1]])


class TestOperators:
    def test_zero(self):
        f = Martingale.zero(dyadic_filtration(3))
        for k in "MSs":
            np.testing.assert_array_equal(apply_operator(k, f), 0.0)

    def test_depth_one(self, depth_one):
        for k in "MSs":
            np.testing.assert_allclose(apply_operator(k, depth_one), 1.0)

    @pytest.mark.parametrize("seed", range(6))
    def test_random_moments(self, seed):
        f = random_martingale(seed, random_filtration(seed, 5))
        p = f.filtration.probs
        eN = np.dot(f.values[-1] ** 2, p)
        assert np.dot(apply_operator("M", f) ** 2, p) >= eN
        np.testing.assert_allclose(np.dot(apply_operator("S", f) ** 2, p), eN, rtol=1e-9)
        np.testing.assert_allclose(np.dot(apply_operator("s", f) ** 2, p), eN, rtol=1e-9)

    @pytest.mark.parametrize("seed", range(4))
    def test_monotone_in_n(self, seed):
        f = random_martingale(seed, random_filtration(seed, 5))
        for k in "MSs":
            assert np.all(np.diff(operator_levels(k, f), axis=0) >= 0)

    @pytest.mark.parametrize("seed", range(6))
    def test_s_splits_at_stopping_time(self, seed):
        F = random_filtration(seed, 5)
        f = random_martingale(seed, F)
        hit = np.abs(f.values) > make_rng(seed).uniform(0.2, 1.0)
        nu = StoppingTime(F, np.where(hit.any(0), hit.argmax(0), F.infinity))
        g = stopped_martingale(f, nu)
        np.testing.assert_allclose(
            apply_operator("s", g) ** 2 + apply_operator("s", f - g) ** 2, apply_operator("s", f) ** 2,
            atol=1e-12,
        )

    @pytest.mark.parametrize("seed", range(4))
    def test_regular_square_vs_conditional(self, seed):
        F = dyadic_filtration(5)
        f = random_martingale(seed, F)
        d2 = np.diff(f.values, axis=0) ** 2
        r_hat = 1.0
        for n in range(F.depth):
            c = F.cond_exp(d2[n], n)
            nz = d2[n] > 0
            if nz.any():
                r_hat = max(r_hat, (d2[n][nz] / c[nz]).max())
        assert np.isfinite(r_hat)
        S, s = apply_operator("S", f), apply_operator("s", f)
        assert np.all(S <= np.sqrt(r_hat) * s + 1e-12)
        # a binary split has |d_n|^2 = E_{n-1}|d_n|^2 exactly
        assert r_hat == pytest.approx(1.0)
        assert regularity_constant(F) == 2.0


class TestEnvelope:
    def test_zero(self):
        env = minimal_envelope("P", Martingale.zero(dyadic_filtration(2)))
        np.testing.assert_array_equal(env.values, 0.0)

    def test_depth_one(self, depth_one):
        env = minimal_envelope("P", depth_one)
        np.testing.assert_allclose(env.values, 1.0)

    @pytest.mark.parametrize("kind", ["P", "Q"])
    @pytest.mark.parametrize("seed", range(5))
    def test_minimal_and_admissible(self, kind, seed):
        F = random_filtration(seed, 4)
        f = random_martingale(seed, F, sparsity=0.2)
        lam = minimal_envelope(kind, f).values
        assert is_admissible(kind, f, lam)
        g = np.abs(f.values) if kind == "P" else operator_levels("S", f)
        assert np.all(lam[:-1] >= g[1:])
        rng = make_rng(seed)
        # raise one F_n-atom from level n onward: still admissible
        n = int(rng.integers(0, F.depth + 1))
        atom = F.atoms(n)[int(rng.integers(0, F.n_atoms(n)))]
        up = lam.copy()
        up[n:, atom] += 0.5
        assert is_admissible(kind, f, up)
        # lower any atom where the level is positive: admissibility breaks
        pos = [(m, a) for m in range(F.depth) for a in F.atoms(m) if lam[m, a[0]] > 0]
        m, a = pos[int(rng.integers(0, len(pos)))]
        down = lam.copy()
        down[: m + 1, a] = np.minimum(down[: m + 1, a], lam[m, a[0]] * (1 - 1e-6))
        assert not is_admissible(kind, f, down)

    @pytest.mark.parametrize("kind,space", [("P", "WP"), ("Q", "WQ")])
    def test_exactness_against_perturbations(self, kind, space):
        F = random_filtration(11, 4)
        phi = MOFunction.power(0.8)
        rng = make_rng(12)
        for i in range(50):
            f = random_martingale((12, i), F)
            lam = minimal_envelope(kind, f).values.copy()
            # adapted nonnegative increments keep the envelope admissible
            bump = np.stack([F.expand(rng.exponential(0.3, F.n_atoms(n)), n) for n in range(F.depth + 1)])
            lam = lam + np.cumsum(bump, axis=0)
            assert is_admissible(kind, f, lam)
            assert weak_norm(phi, lam[-1], F.probs) >= space_norm(space, phi, f) - 1e-12


class TestSpaceNorms:
    def test_zero(self):
        norms = all_space_norms(MOFunction.power(1.0), Martingale.zero(dyadic_filtration(3)))
        assert all(v == 0.0 for v in norms.values())

    @pytest.mark.parametrize("p", [0.5, 0.8, 2.0])
    def test_depth_one(self, depth_one, p):
        for v in all_space_norms(MOFunction.power(p), depth_one).values():
            assert v == pytest.approx(1.0, rel=1e-9)

    @pytest.mark.parametrize("seed", range(8))
    def test_constant_one_inequalities(self, seed):
        F = random_filtration(seed, 5)
        f = random_martingale(seed, F, sparsity=0.3)
        phi = MOFunction.weighted(np.exp(make_rng(seed).standard_normal(F.n_points)), {"type": "power", "p": 0.8})
        n = all_space_norms(phi, f)
        assert n["WHM"] <= n["WP"] * (1 + 1e-9)
        assert n["WHS"] <= n["WQ"] * (1 + 1e-9)

    def test_unknown_space(self, depth_one):
        with pytest.raises(ValueError):
            space_norm("WX", MOFunction.power(1.0), depth_one)

    def test_spaces(self):
        assert SPACES == ("WHs", "WHS", "WHM", "WP", "WQ")


class TestSublinear:
    @pytest.mark.parametrize("name", ["M", "S", "s"])
    def test_builtin_pass(self, name):
        rep = check_sublinear(BUILTIN_OPERATORS[name], random_filtration(0, 4))
        assert rep.passed

    def test_square_of_terminal_fails(self):
        T = SublinearOperator("fN^2", lambda f: f.values[-1] ** 2)
        rep = check_sublinear(T, dyadic_filtration(3))
        assert not rep.passed
        assert rep.max_homogeneity_violation > 0
