"""Ensemble harness for the equivalence, boundedness, inequality and
convergence statements.

All constants the proofs leave implicit are reported as empirical extrema
over a seeded ensemble.  Only bounds whose constants are explicit in the
constructions are asserted; everything else is asserted to be finite.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterator

import numpy as np

from .atomic import decompose, decomposition_norm, reconstruct, validate_atom
from .filtration import (
    Filtration,
    Martingale,
    dyadic_filtration,
    make_rng,
    random_filtration,
    random_martingale,
    regularity_constant,
    skewed_filtration,
)
from .musielak import (
    DEFAULT_T_GRID,
    MOFunction,
    modular_rho,
    phi_measure,
    verify_uniform_type,
    weak_norm,
    weak_sup,
)
from .operators import (
    BUILTIN_OPERATORS,
    SPACES,
    SublinearOperator,
    apply_operator,
    check_sublinear,
    operator_levels,
    space_norm,
)
from .weights import check_Aq, check_S_condition

__all__ = [
    "Ensemble",
    "Trial",
    "EquivalenceReport",
    "phi_factory",
    "verify_atomic_equivalence",
    "verify_sublinear_boundedness",
    "verify_martingale_inequalities",
    "measure_gates",
    "convergence_experiments",
    "counterexample_function",
]

SPACE_OF_KIND = {"s": "WHs", "P": "WP", "Q": "WQ", "S": "WHS", "M": "WHM"}
KIND_OF_SPACE = {v: k for k, v in SPACE_OF_KIND.items()}
FORWARD_SLACK = 1e-9


# ---------------------------------------------------------------------------
# ensembles and phi specs
# ---------------------------------------------------------------------------


def _random_vector(spec: dict, n: int) -> np.ndarray:
    rng = make_rng((int(spec.get("seed", 0)), n))
    if "low" in spec or "high" in spec:
        return rng.uniform(float(spec.get("low", 0.5)), float(spec.get("high", 1.5)), n)
    return np.exp(float(spec.get("spread", 1.0)) * rng.standard_normal(n))


def phi_factory(cfg) -> Callable[[Filtration], MOFunction]:
    """Turn a phi config (or an ``MOFunction``) into ``filtration -> MOFunction``.

    Point-dependent fields may be ``{"random": {...}}``: weights are drawn as
    ``exp(spread * N(0, 1))``, variable exponents as ``U(low, high)``, both
    seeded by ``(seed, number of points)``.
    """
    if isinstance(cfg, MOFunction):
        return lambda filt: cfg
    if callable(cfg):
        return cfg
    cfg = dict(cfg)
    kind = cfg["kind"]
    key = {"weighted": "w", "variable": "p"}.get(kind)
    if key and isinstance(cfg.get(key), dict):
        spec = cfg[key]["random"]

        def build(filt):
            c = dict(cfg)
            c[key] = _random_vector(spec, filt.n_points).tolist()
            return MOFunction.from_config(c)

        return build
    phi = MOFunction.from_config(cfg)
    return lambda filt: phi


def _phi_desc(phi) -> object:
    if isinstance(phi, dict):
        return phi
    if isinstance(phi, MOFunction):
        try:
            return phi.to_config()
        except ValueError:
            return phi.kind
    return getattr(phi, "__name__", "callable")


@dataclass
class Trial:
    index: int
    depth: int
    filtration: Filtration
    f: Martingale


@dataclass(frozen=True)
class Ensemble:
    """Seeded family of random martingales.

    Trial ``i`` uses depth ``depths[i % len(depths)]`` and seed ``(seed, i)``.
    ``family`` selects the filtrations: uniform dyadic, random trees
    (``random_filtration``) or the increasingly skewed chain whose
    regularity constant grows with depth.
    """

    seed: int = 0
    trials: int = 20
    depths: tuple = (3, 4, 5)
    family: str = "dyadic"
    scale: float = 1.0
    sparsity: float = 0.2
    zero: bool = False
    base: Filtration | None = field(default=None, compare=False, repr=False)

    def filtration(self, depth: int) -> Filtration:
        if self.family == "explicit":
            if self.base is None:
                raise ValueError("the explicit family needs a base filtration")
            return self.base
        if self.family == "dyadic":
            return dyadic_filtration(depth)
        if self.family == "random":
            return random_filtration((self.seed, depth), depth)
        if self.family == "skewed":
            return skewed_filtration(depth)
        raise ValueError(f"unknown filtration family {self.family!r}")

    def filtrations(self):
        return {d: self.filtration(d) for d in sorted(set(self.depths))}

    def __iter__(self) -> Iterator[Trial]:
        filts = self.filtrations()
        for i in range(self.trials):
            depth = self.depths[i % len(self.depths)]
            filt = filts[depth]
            if self.zero:
                f = Martingale.zero(filt)
            else:
                rng = make_rng((self.seed, i, 0))
                scale = self.scale * float(np.exp(rng.uniform(-3.0, 3.0)))
                f = random_martingale((self.seed, i), filt, scale, self.sparsity)
            yield Trial(i, depth, filt, f)

    def describe(self) -> dict:
        d = {k: getattr(self, k) for k in ("seed", "trials", "family", "scale", "sparsity", "zero")}
        d["depths"] = list(self.depths)
        return d


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class EquivalenceReport:
    tag: str
    lhs: str
    rhs: str
    ensemble: dict
    phi: object
    pairs: list = field(default_factory=list)
    c_low: float = math.nan
    c_high: float = math.nan
    asserted_bound: float | None = None
    two_sided: bool = False
    passed: bool = False
    skipped: str | None = None
    gates: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def finalize(self):
        """Set ``c_low``/``c_high`` from ``pairs`` and decide ``passed``."""
        if self.skipped:
            self.passed = True
            return self
        ratios = []
        for _, _, lhs, rhs in self.pairs:
            if lhs == 0 and rhs == 0:
                continue
            ratios.append(math.inf if rhs == 0 else lhs / rhs)
        if ratios:
            self.c_low, self.c_high = min(ratios), max(ratios)
        else:
            self.c_low = self.c_high = 1.0
        ok = math.isfinite(self.c_high)
        if self.two_sided:
            ok = ok and self.c_low > 0
        if self.asserted_bound is not None:
            ok = ok and self.c_high <= self.asserted_bound * (1 + FORWARD_SLACK)
        self.passed = bool(ok and self.extra.get("ok", True))
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pairs"] = [list(p) for p in self.pairs]
        return d


# ---------------------------------------------------------------------------
# atomic equivalence
# ---------------------------------------------------------------------------


def _forward_bound(kind: str, phi: MOFunction, meta: dict) -> float:
    """Explicit constant in ``decomposition_norm <= C * space_norm``.

    s, P, Q: the stopping sets are exactly the level sets, so ``C = 1``.
    S, M: sets are enlarged by at most ``K R`` in phi-measure; lower type
    ``p-`` with constant ``C_lower`` turns that into ``(C_lower K R)**(1/p-)``.
    """
    if kind in ("s", "P", "Q"):
        return 1.0
    kr = phi.c_lower * meta["K"] * meta["R"]
    return max(1.0, kr) ** (1.0 / phi.p_minus)


def verify_atomic_equivalence(phi, kind: str, ensemble: Ensemble, q_list=(np.inf,),
                              t_grid=None) -> EquivalenceReport:
    """Canonical decomposition norm against the space norm, per trial.

    Asserts the forward direction with its explicit constant, exact
    reconstruction (``<= 1e-9``) and validity of every atom for each ``q`` in
    ``q_list``; reports the reverse constant ``max space/decomposition``.
    """
    make_phi = phi_factory(phi)
    space = SPACE_OF_KIND[kind]
    rep = EquivalenceReport(
        f"atomic-{kind}", f"decomposition_norm[{kind}]", space, ensemble.describe(), _phi_desc(phi),
        two_sided=True,
    )
    bound = 1.0
    recon = 0.0
    bad_atoms = 0
    n_atoms = 0
    per_depth = {}
    for tr in ensemble:
        ph = make_phi(tr.filtration)
        d = decompose(kind, ph, tr.f, t_grid=t_grid) if kind in ("S", "M") else decompose(kind, ph, tr.f)
        dn = decomposition_norm(ph, d)
        sn = space_norm(space, ph, tr.f)
        rep.pairs.append((tr.index, tr.depth, dn, sn))
        if kind in ("S", "M"):
            bound = max(bound, _forward_bound(kind, ph, d.meta))
        recon = max(recon, float(np.max(np.abs(reconstruct(d).values - tr.f.values))))
        for e in d.entries:
            for q in q_list:
                n_atoms += 1
                if not validate_atom(ph, e.atom, q=q, t_grid=t_grid).passed:
                    bad_atoms += 1
        if dn > 0:
            per_depth[tr.depth] = max(per_depth.get(tr.depth, 0.0), sn / dn)
    rep.asserted_bound = bound
    rep.extra = {
        "reconstruction_error": recon,
        "atoms_checked": n_atoms,
        "atom_failures": bad_atoms,
        "q_list": [("inf" if q == np.inf else q) for q in q_list],
        "reverse_constant_by_depth": {str(k): v for k, v in sorted(per_depth.items())},
        "ok": bool(recon <= 1e-9 and bad_atoms == 0),
    }
    rep.finalize()
    rep.extra["reverse_constant"] = (1.0 / rep.c_low) if rep.c_low > 0 else math.inf
    return rep


# ---------------------------------------------------------------------------
# sublinear operators
# ---------------------------------------------------------------------------


def verify_sublinear_boundedness(T, phi, source: str, ensemble: Ensemble,
                                 t_grid=None) -> EquivalenceReport:
    """Atom-support constant and ``weak_norm(T f) / space_norm(source, f)``.

    ``T`` must pass ``check_sublinear`` first; otherwise ``ValueError``.
    """
    if isinstance(T, str):
        T = BUILTIN_OPERATORS[T]
    filts = ensemble.filtrations()
    check = check_sublinear(T, filts[min(filts)], seed=ensemble.seed)
    if not check.passed:
        raise ValueError(f"operator {T.name!r} is not sublinear: {check.to_dict()}")
    make_phi = phi_factory(phi)
    kind = KIND_OF_SPACE[source]
    t = DEFAULT_T_GRID if t_grid is None else np.asarray(t_grid, dtype=float)
    rep = EquivalenceReport(
        f"sublinear-{T.name}-from-{source}", f"WL[{T.name}f]", source, ensemble.describe(),
        _phi_desc(phi),
    )
    c_sup = 0.0
    for tr in ensemble:
        ph = make_phi(tr.filtration)
        probs = tr.filtration.probs
        d = decompose(kind, ph, tr.f)
        for e in d.nonzero():
            supp = np.abs(T(e.atom.a)) > 0
            if not supp.any():
                continue
            num = np.atleast_1d(phi_measure(ph, probs, supp, t))
            den = np.atleast_1d(phi_measure(ph, probs, e.nu.support, t))
            c_sup = max(c_sup, float(np.max(num / den)))
        rep.pairs.append((tr.index, tr.depth, weak_norm(ph, T(tr.f), probs), space_norm(source, ph, tr.f)))
    rep.extra = {"support_constant": c_sup, "sublinearity": check.to_dict(), "ok": math.isfinite(c_sup)}
    return rep.finalize()


# ---------------------------------------------------------------------------
# the inequality web
# ---------------------------------------------------------------------------


def measure_gates(phi, ensemble: Ensemble, aq_q: float = 2.0, t_grid=None,
                  k_max: float = math.inf, r_max: float = 16.0) -> dict:
    """Measure every hypothesis used by the inequality web, worst case over the
    ensemble's filtrations.  A gate passes when its constant is finite and
    within the configured bound."""
    make_phi = phi_factory(phi)
    worst = {"A_inf": 1.0, "S": 1.0, "S-": 1.0, "S+": 1.0, "R": 1.0}
    upper_ok = True
    p_plus = 0.0
    w_consts = {"A_inf": 1.0, "S": 1.0, "S-": 1.0, "S+": 1.0}
    for filt in ensemble.filtrations().values():
        ph = make_phi(filt)
        worst["A_inf"] = max(worst["A_inf"], check_Aq(ph, filt, aq_q, t_grid).constant)
        for v in ("S", "S-", "S+"):
            worst[v] = max(worst[v], check_S_condition(ph, filt, v, t_grid).constant)
        worst["R"] = max(worst["R"], regularity_constant(filt))
        p_plus = max(p_plus, ph.p_plus)
        upper_ok &= verify_uniform_type(ph, filt.n_points, ph.p_plus, "upper", t_grid=t_grid).passed
        w = _unit_weight(ph, filt)
        w_consts["A_inf"] = max(w_consts["A_inf"], check_Aq(w, filt, aq_q).constant)
        for v in ("S", "S-", "S+"):
            w_consts[v] = max(w_consts[v], check_S_condition(w, filt, v).constant)
    ok = {k: bool(math.isfinite(c) and c <= (r_max if k == "R" else k_max)) for k, c in worst.items()}
    ok["p_plus<2"] = bool(p_plus < 2 and upper_ok)
    w_ok = {k: bool(math.isfinite(c) and c <= k_max) for k, c in w_consts.items()}
    return {
        "constants": worst,
        "pass": ok,
        "p_plus": p_plus,
        "aq_q": aq_q,
        "bounds": {"k_max": k_max, "r_max": r_max},
        "weight_constants": w_consts,
        "weight_pass": w_ok,
    }


def _unit_weight(ph: MOFunction, filt: Filtration) -> MOFunction:
    """The special weight ``w = phi(., 1)`` as an x-only function."""
    w = ph(np.asarray(1.0), filt.n_points)
    return MOFunction.weighted(w, {"type": "power", "p": 1.0})


def _gate(passes: dict, names) -> str | None:
    failed = [n for n in names if not passes[n]]
    return None if not failed else "failed gate: " + ", ".join(failed)


def _weighted_lp(g, w, probs, p):
    return float(np.sum(np.abs(g) ** p * w * probs) ** (1.0 / p))


def verify_martingale_inequalities(phi, ensemble: Ensemble, aq_q: float = 2.0, t_grid=None,
                                   k_max: float = math.inf, r_max: float = 16.0) -> list:
    """Empirical constants for mi1-mi6, the five-space coincidence on regular
    filtrations, the weighted L_p inequalities bl1-bl4 at p in {1, 2}, and the
    increment-orthogonality identity.  Items whose measured hypotheses fail
    are returned with ``skipped`` set to the failing gate."""
    make_phi = phi_factory(phi)
    gates = measure_gates(phi, ensemble, aq_q, t_grid, k_max, r_max)
    gp = gates["pass"]
    desc = ensemble.describe()
    pd = _phi_desc(phi)
    A_S = ("A_inf", "S")

    # (tag, lhs, rhs, gate names, asserted bound, two-sided)
    items = [
        ("mi1", "WHS", "WHs", ("S+", "p_plus<2"), None, False),
        ("mi2", "WHM", "WHs", A_S + ("p_plus<2",), None, False),
        ("mi3-P", "WHM", "WP", (), 1.0, False),
        ("mi3-Q", "WHS", "WQ", (), 1.0, False),
        ("mi4-S/WP", "WHS", "WP", A_S, None, False),
        ("mi4-s/WP", "WHs", "WP", A_S, None, False),
        ("mi4-M/WQ", "WHM", "WQ", A_S, None, False),
        ("mi5", "WHs", "WQ", ("S-",), None, False),
        ("mi6", "WQ", "WP", A_S + ("p_plus<2",), None, True),
    ]
    reports = []
    for tag, lhs, rhs, gnames, bound, two in items:
        r = EquivalenceReport(tag, lhs, rhs, desc, pd, asserted_bound=bound, two_sided=two,
                              gates={n: gp[n] for n in gnames})
        r.skipped = _gate(gp, gnames)
        reports.append(r)

    coincide = {}
    coin_gate = _gate(gp, ("R", "A_inf"))
    for i, a in enumerate(SPACES):
        for b in SPACES[i + 1:]:
            r = EquivalenceReport(f"coincidence {a}~{b}", a, b, desc, pd, two_sided=True,
                                  gates={"R": gp["R"], "A_inf": gp["A_inf"]})
            r.skipped = coin_gate
            coincide[(a, b)] = r

    wp = gates["weight_pass"]
    bl_items = [
        ("bl1", "M", "S", (1, 2), ("A_inf", "S"), True),
        ("bl2", "s", "S", (2,), ("S-",), False),
        ("bl3", "S", "s", (1, 2), ("S+",), False),
        ("bl4", "M", "s", (1, 2), ("A_inf", "S"), False),
    ]
    bl_reports = {}
    for tag, lo, ro, ps, gnames, two in bl_items:
        for p in ps:
            r = EquivalenceReport(f"{tag} p={p}", f"L{p}(w)[{lo}f]", f"L{p}(w)[{ro}f]", desc, pd,
                                  two_sided=two, gates={n: wp[n] for n in gnames})
            r.skipped = _gate(wp, gnames)
            bl_reports[(tag, p)] = (r, lo, ro, p)

    ortho = EquivalenceReport("orthogonality", "E[S^2], E[s^2]", "E[f_N^2]", desc, pd)
    ortho_err = 0.0
    r_hat = 1.0
    for tr in ensemble:
        ph = make_phi(tr.filtration)
        probs = tr.filtration.probs
        norms = {sp: space_norm(sp, ph, tr.f) for sp in SPACES}
        for r in reports:
            r.pairs.append((tr.index, tr.depth, norms[r.lhs], norms[r.rhs]))
        for (a, b), r in coincide.items():
            r.pairs.append((tr.index, tr.depth, norms[a], norms[b]))
        ops = {k: apply_operator(k, tr.f) for k in ("M", "S", "s")}
        w = _unit_weight(ph, tr.filtration).weight
        for r, lo, ro, p in bl_reports.values():
            r.pairs.append((tr.index, tr.depth, _weighted_lp(ops[lo], w, probs, p),
                            _weighted_lp(ops[ro], w, probs, p)))
        eN = float(np.dot(tr.f.values[-1] ** 2, probs))
        eS = float(np.dot(ops["S"] ** 2, probs))
        es = float(np.dot(ops["s"] ** 2, probs))
        ortho.pairs.append((tr.index, tr.depth, eS, eN))
        ortho_err = max(ortho_err, max(abs(eS - eN), abs(es - eN)) / max(1.0, eN))
        d2 = np.diff(tr.f.values, axis=0) ** 2
        for n in range(tr.filtration.depth):
            cond = tr.filtration.cond_exp(d2[n], n)
            nz = d2[n] > 0
            if nz.any():
                r_hat = max(r_hat, float(np.max(d2[n][nz] / cond[nz])))
    ortho.extra = {"max_relative_error": ortho_err, "ok": ortho_err <= 1e-9}
    ortho.asserted_bound = None
    out = [r.finalize() for r in reports]
    out += [r.finalize() for r in coincide.values()]
    out += [r.finalize() for r, *_ in bl_reports.values()]
    ortho.finalize()
    ortho.extra["square_vs_conditional_constant"] = r_hat
    out.append(ortho)
    for r in out:
        r.extra.setdefault("gate_constants", gates["constants"])
    return out


# ---------------------------------------------------------------------------
# convergence suite
# ---------------------------------------------------------------------------


def counterexample_function(depth: int, p: float) -> np.ndarray:
    """``x**(-1/p)`` at the right endpoints ``i / 2**depth`` of the dyadic cells
    of ``(0, 1]``."""
    x = np.arange(1, 2**depth + 1) / 2.0**depth
    return x ** (-1.0 / p)


def _first_below(values, tol):
    for i, v in enumerate(values):
        if v <= tol:
            return i
    return None


def _sequence_summary(values, tolerances):
    first = {str(t): _first_below(values, t) for t in tolerances}
    reached = all(i is not None for i in first.values())
    stays = True
    for t in tolerances:
        i = first[str(t)]
        if i is not None and any(v > t for v in values[i:]):
            stays = False
    return {"values": list(values), "first_index_below": first, "converged": bool(reached and stays)}


def convergence_experiments(phi, config: dict | None = None) -> dict:
    """Absolute-continuity counterexample, modular/quasi-norm co-convergence,
    bounded and dominated convergence on a fixed finite space, and the
    normalization ``sup_alpha phi({|f| > alpha}, alpha / ||f||) = 1``."""
    cfg = {
        "depth": 12,
        "p": None,
        "truncations": [1, 10, 100],
        "tolerances": [1e-2, 1e-4, 1e-6],
        "space_depth": 6,
        "seed": 0,
        "trials": 20,
    }
    cfg.update(config or {})
    make_phi = phi_factory(phi)
    assertions = {}
    out = {"config": cfg}

    # (a) truncation tails of x**(-1/p) never shrink
    D = int(cfg["depth"])
    fixed = dyadic_filtration(int(cfg["space_depth"]))
    ph_fixed = make_phi(fixed)
    p = cfg["p"] if cfg["p"] is not None else (ph_fixed.p_minus if ph_fixed.kind == "power" else 1.0)
    power = MOFunction.power(p)
    probs = np.full(2**D, 2.0**-D)
    fx = counterexample_function(D, p)
    trunc = {}
    ok_a = abs(weak_norm(power, fx, probs) - 1.0) <= 1e-9
    for n in cfg["truncations"]:
        val = weak_norm(power, fx * (fx > n), probs)
        trunc[str(n)] = val
        if n < 2.0 ** (D / p):
            ok_a &= abs(val - 1.0) <= 1e-9
    out["counterexample"] = {"p": p, "depth": D, "norm": weak_norm(power, fx, probs), "truncated": trunc}
    assertions["counterexample_tail_is_one"] = bool(ok_a)

    # (b) ||h_n|| -> 0 iff rho(h_n) -> 0, with the type sandwich
    fp = fixed.probs
    rng = make_rng((cfg["seed"], 0xB))
    g = np.abs(rng.standard_normal(fixed.n_points)) + 0.1
    seqs = {
        "scaled": [g * 2.0**-n for n in range(0, 41)],
        "shrinking_support": [g * (np.arange(fixed.n_points) < fixed.n_points >> n) for n in range(0, int(cfg["space_depth"]) + 2)],
    }
    modular = {}
    ok_b = True
    for name, seq in seqs.items():
        norms = [weak_norm(ph_fixed, h, fp) for h in seq]
        rhos = [modular_rho(ph_fixed, h, fp) for h in seq]
        sandwich = True
        for nv, rv in zip(norms, rhos):
            if 0 < nv < 1:
                lo = nv ** ph_fixed.p_plus / ph_fixed.c_upper
                hi = ph_fixed.c_lower * nv ** ph_fixed.p_minus
                sandwich &= lo * (1 - 1e-8) <= rv <= hi * (1 + 1e-8)
        co_trend = bool(np.all(np.diff(norms) <= 1e-15) and np.all(np.diff(rhos) <= 1e-15))
        modular[name] = {"norms": norms, "rho": rhos, "sandwich": bool(sandwich), "co_trending": co_trend,
                         "limit_zero": bool(norms[-1] <= min(cfg["tolerances"]) and rhos[-1] <= min(cfg["tolerances"]))}
        ok_b &= sandwich and co_trend and modular[name]["limit_zero"]
    out["modular_equivalence"] = modular
    assertions["modular_equivalence"] = bool(ok_b)

    # (c) bounded / dominated convergence on the fixed space
    tols = cfg["tolerances"]
    u = rng.uniform(-1, 1, fixed.n_points)
    h = rng.uniform(-1, 1, fixed.n_points)
    dom = counterexample_function(int(cfg["space_depth"]), p)
    steps = [2**j for j in range(0, 31)]
    conv = {
        "bounded_h+u/n": [weak_norm(ph_fixed, (h + u / n) - h, fp) for n in steps],
        "dominated_min(g,n)": [weak_norm(ph_fixed, dom - np.minimum(dom, n), fp) for n in steps],
        "dominated_g/n": [weak_norm(ph_fixed, dom / n, fp) for n in steps],
        "dominated_g*1{x<=1/n}": [
            weak_norm(ph_fixed, dom * (np.arange(1, fixed.n_points + 1) / fixed.n_points <= 1.0 / n), fp)
            for n in steps
        ],
    }
    out["dominated_convergence"] = {k: _sequence_summary(v, tols) for k, v in conv.items()}
    assertions["dominated_convergence"] = all(s["converged"] for s in out["dominated_convergence"].values())

    # (d) normalization of the weak quasi-norm
    worst = 0.0
    filt = dyadic_filtration(int(cfg["space_depth"]))
    ph = make_phi(filt)
    for i in range(int(cfg["trials"])):
        r = make_rng((cfg["seed"], i, 0xD))
        f = r.standard_normal(filt.n_points) * np.exp(r.uniform(-3, 3)) * (r.random(filt.n_points) < 0.7)
        if not np.any(f):
            f[0] = 1.0
        nrm = weak_norm(ph, f, filt.probs)
        worst = max(worst, abs(weak_sup(ph, f, filt.probs, nrm) - 1.0))
    out["normalization"] = {"max_deviation": worst, "trials": int(cfg["trials"])}
    assertions["normalization"] = bool(worst <= 1e-6)

    out["assertions"] = assertions
    out["passed"] = all(assertions.values())
    return out
