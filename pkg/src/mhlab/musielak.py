"""Musielak-Orlicz functions and the quasi-norms built from them.

Everything here works on a finite probability space given by its vector of
point masses ``probs``; sets are boolean masks (or index arrays) over the
points.  ``phi(x, t)`` is evaluated for all points at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "MOFunction",
    "TypeReport",
    "DEFAULT_T_GRID",
    "default_t_grid",
    "phi_measure",
    "verify_uniform_type",
    "luxemburg_indicator_norm",
    "weak_norm",
    "weak_sup",
    "modular_rho",
    "lq_phi_norm",
    "bisect_decreasing",
]


def default_t_grid(tmin: float = 1e-4, tmax: float = 1e4, num: int = 64) -> np.ndarray:
    if not (0 < tmin < tmax) or num < 2:
        raise ValueError("t-grid needs 0 < tmin < tmax and at least two points")
    return np.logspace(np.log10(tmin), np.log10(tmax), num)


DEFAULT_T_GRID = default_t_grid()


def _power(p):
    return lambda t: np.power(t, p)


def _mixed(a, b):
    return lambda t: np.power(t, a) + np.power(t, b)


_ORLICZ = {
    # name -> (factory, indices(params) -> (p_minus, p_plus))
    "power": (lambda c: _power(float(c["p"])), lambda c: (float(c["p"]), float(c["p"]))),
    "mixed": (
        lambda c: _mixed(*map(float, c["p"])),
        lambda c: (min(map(float, c["p"])), max(map(float, c["p"]))),
    ),
}


@dataclass
class MOFunction:
    """A Musielak-Orlicz function ``phi(x, t)`` on a finite sample space.

    ``evaluator(t)`` receives an array of ``t`` values with a trailing axis of
    length one and returns values broadcastable against the points on the
    last axis.  Separable functions ``w(x) * Phi(t)`` keep ``weight`` and
    ``orlicz`` so that ``t`` can be cancelled analytically.
    """

    kind: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    p_minus: float
    p_plus: float
    c_lower: float = 1.0
    c_upper: float = 1.0
    weight: np.ndarray | None = None
    orlicz: Callable[[np.ndarray], np.ndarray] | None = None
    continuous: bool = True
    config: dict = field(default_factory=dict)

    # -- constructors --------------------------------------------------------
    @classmethod
    def power(cls, p: float):
        p = float(p)
        if p <= 0:
            raise ValueError("power exponent must be > 0")
        Phi = _power(p)
        return cls("power", Phi, p, p, orlicz=Phi, config={"kind": "power", "p": p})

    @classmethod
    def orlicz_fn(cls, spec: dict):
        factory, indices = _ORLICZ[spec["type"]]
        Phi = factory(spec)
        pm, pp = indices(spec)
        return cls("orlicz", Phi, pm, pp, orlicz=Phi, config={"kind": "orlicz", "orlicz": dict(spec)})

    @classmethod
    def weighted(cls, w, orlicz: dict | None = None):
        w = np.array(w, dtype=float)
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and strictly positive")
        w.setflags(write=False)
        spec = dict(orlicz or {"type": "power", "p": 1.0})
        factory, indices = _ORLICZ[spec["type"]]
        Phi = factory(spec)
        pm, pp = indices(spec)
        return cls(
            "weighted",
            lambda t: w * Phi(t),
            pm,
            pp,
            weight=w,
            orlicz=Phi,
            config={"kind": "weighted", "w": w.tolist(), "orlicz": spec},
        )

    @classmethod
    def variable(cls, p):
        p = np.array(p, dtype=float)
        if np.any(p <= 0):
            raise ValueError("variable exponent must be > 0")
        p.setflags(write=False)
        return cls(
            "variable",
            lambda t: np.power(t, p),
            float(p.min()),
            float(p.max()),
            config={"kind": "variable", "p": p.tolist()},
        )

    @classmethod
    def custom(cls, evaluator, p_minus, p_plus, c_lower=1.0, c_upper=1.0, continuous=False):
        return cls("custom", evaluator, p_minus, p_plus, c_lower, c_upper, continuous=continuous)

    @classmethod
    def from_config(cls, cfg: dict) -> "MOFunction":
        kind = cfg["kind"]
        if kind == "power":
            return cls.power(cfg["p"])
        if kind == "orlicz":
            return cls.orlicz_fn(cfg["orlicz"])
        if kind == "weighted":
            return cls.weighted(cfg["w"], cfg.get("orlicz"))
        if kind == "variable":
            return cls.variable(cfg["p"])
        raise ValueError(f"unknown Musielak-Orlicz kind {kind!r}")

    def to_config(self) -> dict:
        if not self.config:
            raise ValueError("custom evaluators have no config form")
        return dict(self.config)

    # -- evaluation ------------------------------------------------------------
    @property
    def separable(self) -> bool:
        return self.orlicz is not None

    def __call__(self, t, n_points: int) -> np.ndarray:
        """``phi(x_i, t)``; output shape ``shape(t) + (n_points,)``."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("phi is defined for t >= 0 only")
        safe = np.where(t > 0, t, 1.0)
        out = np.asarray(self.evaluator(safe[..., None]), dtype=float)
        out = np.broadcast_to(out, t.shape + (n_points,)).copy()
        out[t == 0] = 0.0
        return out

    def weight_mass(self, probs, mask=None) -> float:
        """``w(E) = sum_{i in E} w_i p_i`` for separable functions."""
        p = np.asarray(probs, dtype=float)
        w = np.ones_like(p) if self.weight is None else self.weight
        if mask is not None:
            p = p * _mask(mask, p.size)
        return float(np.dot(w, p))


@dataclass
class TypeReport:
    p: float
    side: str
    constant: float
    declared: float
    growth: float
    passed: bool

    def to_dict(self):
        return dict(vars(self))


def _mask(E, n: int) -> np.ndarray:
    E = np.asarray(E)
    if E.dtype == bool:
        if E.shape != (n,):
            raise ValueError("set mask has the wrong length")
        return E.astype(float)
    m = np.zeros(n)
    m[E.astype(np.int64)] = 1.0
    return m


def phi_measure(phi: MOFunction, probs, E, t) -> float | np.ndarray:
    """``phi(E, t) = sum_{i in E} phi(x_i, t) p_i``.  ``t`` may be an array."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("phi(E, t) needs t > 0")
    p = np.asarray(probs, dtype=float)
    weights = p * _mask(E, p.size)
    vals = phi(t, p.size) @ weights
    return float(vals) if vals.ndim == 0 else vals


def verify_uniform_type(
    phi: MOFunction,
    n_points: int,
    p: float,
    side: str,
    s_grid=None,
    t_grid=None,
    declared: float | None = None,
) -> TypeReport:
    """Grid check of ``phi(x, s t) <= C s**p phi(x, t)``.

    ``side="lower"`` samples ``s`` in ``(0, 1)``, ``"upper"`` in ``[1, inf)``.
    The report carries the best constant on the grid, the declared constant
    it is compared with, and ``growth``: the ratio of the best constant on the
    whole ``s``-grid to the one on its half closest to 1.  An exponent that is
    wrong shows up as a constant growing with the grid range.
    """
    if p <= 0:
        raise ValueError("type exponent must be > 0")
    if side not in ("lower", "upper"):
        raise ValueError("side must be 'lower' or 'upper'")
    if s_grid is None:
        s_grid = np.logspace(-4, -1e-9, 48) if side == "lower" else np.logspace(0, 4, 48)
    if t_grid is None:
        t_grid = DEFAULT_T_GRID
    s = np.asarray(s_grid, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    if s.size < 2 or t.size < 1:
        raise ValueError("degenerate grid")
    if side == "lower" and (np.any(s <= 0) or np.any(s >= 1)):
        raise ValueError("lower type needs s in (0, 1)")
    if side == "upper" and np.any(s < 1):
        raise ValueError("upper type needs s >= 1")
    base = phi(t, n_points)  # (T, n)
    scaled = phi(s[:, None] * t[None, :], n_points)  # (S, T, n)
    ratio = scaled / (s[:, None, None] ** p * base[None, :, :])
    per_s = ratio.max(axis=(1, 2))
    order = np.argsort(np.abs(np.log(s)))
    near = per_s[order[: max(1, s.size // 2)]].max()
    best = float(per_s.max())
    if declared is None:
        declared = phi.c_lower if side == "lower" else phi.c_upper
    passed = bool(np.isfinite(best) and best <= declared * (1 + 1e-9))
    return TypeReport(float(p), side, best, float(declared), float(best / near), passed)


def bisect_decreasing(g, guess: float, rtol: float = 1e-10, maxiter: int = 200) -> float:
    """Smallest ``lam > 0`` with ``g(lam) <= 1`` for nonincreasing ``g``.

    Brackets by doubling/halving from ``guess`` then bisects until the bracket
    is within ``rtol`` (relative).  Returns the feasible end of the bracket.
    Returns 0.0 if every ``lam`` down to the float range is feasible.
    """
    hi = float(guess) if guess > 0 and np.isfinite(guess) else 1.0
    for _ in range(2200):
        if g(hi) <= 1.0:
            break
        hi *= 2.0
    else:
        raise ArithmeticError("could not bracket from above")
    lo = hi / 2.0
    for _ in range(2200):
        if g(lo) > 1.0:
            break
        hi = lo
        lo /= 2.0
        if lo == 0.0:
            return 0.0
    else:
        return 0.0
    for _ in range(maxiter):
        if hi - lo <= rtol * hi:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def luxemburg_indicator_norm(phi: MOFunction, probs, B, rtol: float = 1e-12) -> float:
    """``inf{lam > 0 : phi(B, 1/lam) <= 1}``; 0 for the empty set."""
    p = np.asarray(probs, dtype=float)
    m = _mask(B, p.size)
    if not m.any():
        return 0.0
    w = p * m
    if phi.separable:
        mass = phi.weight_mass(p, m.astype(bool))
        return bisect_decreasing(lambda lam: mass * float(phi.orlicz(np.array(1.0 / lam))), 1.0, rtol)
    return bisect_decreasing(lambda lam: float(phi(np.array(1.0 / lam), p.size) @ w), 1.0, rtol)


class _LevelSets:
    """Distinct nonzero values ``v`` of ``|f|`` with the sets ``{|f| >= v}``."""

    def __init__(self, f, probs):
        a = np.abs(np.asarray(f, dtype=float))
        if not np.all(np.isfinite(a)):
            raise ValueError("f must be finite")
        self.absf = a
        self.probs = np.asarray(probs, dtype=float)
        self.values = np.unique(a[a > 0])

    def __bool__(self):
        return self.values.size > 0

    def masses(self, phi: MOFunction) -> np.ndarray:
        """``w({|f| >= v})`` per candidate ``v`` (separable case)."""
        w = self.probs if phi.weight is None else phi.weight * self.probs
        order = np.argsort(self.absf)
        sorted_vals = self.absf[order]
        tail = np.cumsum(w[order][::-1])[::-1]
        first = np.searchsorted(sorted_vals, self.values, side="left")
        return tail[first]

    def sup_fn(self, phi: MOFunction, scale: float = 1.0):
        """Return ``lam -> sup_alpha phi({|f| > alpha}, alpha * scale / lam)``."""
        v = self.values
        if not phi.continuous:
            return self._grid_sup_fn(phi, scale)
        if phi.separable:
            W = self.masses(phi)
            Phi = phi.orlicz
            return lambda lam: float(np.max(W * Phi(v * scale / lam)))
        mask = self.absf[None, :] >= v[:, None]
        wp = mask * self.probs[None, :]
        n = self.probs.size

        def g(lam):
            vals = phi(v * scale / lam, n)  # (V, n)
            return float(np.max(np.sum(vals * wp, axis=1)))

        return g

    def _grid_sup_fn(self, phi, scale, per_gap: int = 64):
        # no continuity: sample alpha densely inside every gap between values
        lower = np.concatenate([[self.values[0] * 1e-6], self.values[:-1]])
        fr = np.linspace(0.0, 1.0, per_gap, endpoint=False)
        alphas = (lower[:, None] + fr[None, :] * (self.values - lower)[:, None]).ravel()
        alphas = alphas[alphas > 0]
        mask = self.absf[None, :] > alphas[:, None]
        wp = mask * self.probs[None, :]
        n = self.probs.size

        def g(lam):
            with np.errstate(over="ignore"):
                vals = phi(alphas * scale / lam, n)
            return float(np.max(np.sum(vals * wp, axis=1)))

        return g


def weak_sup(phi: MOFunction, f, probs, lam: float) -> float:
    """``sup_{alpha > 0} phi({|f| > alpha}, alpha / lam)``."""
    ls = _LevelSets(f, probs)
    if not ls:
        return 0.0
    return ls.sup_fn(phi)(lam)


def weak_norm(phi: MOFunction, f, probs, rtol: float = 1e-10) -> float:
    """Weak Musielak-Orlicz quasi-norm
    ``inf{lam > 0 : sup_alpha phi({|f| > alpha}, alpha / lam) <= 1}``.

    For ``alpha`` in ``[v_k, v_{k+1})`` the level set equals ``{|f| >= v_{k+1}}``,
    so with ``phi(x, .)`` continuous the sup over ``alpha`` is the maximum over
    the distinct nonzero values ``v`` of ``phi({|f| >= v}, v / lam)``.
    """
    ls = _LevelSets(f, probs)
    if not ls:
        return 0.0
    return bisect_decreasing(ls.sup_fn(phi), float(ls.values[-1]), rtol)


def modular_rho(phi: MOFunction, f, probs) -> float:
    """``rho(f) = sup_alpha phi({|f| > alpha}, alpha)``."""
    return weak_sup(phi, f, probs, 1.0)


def lq_phi_norm(phi: MOFunction, f, B, q, probs, t_grid=None) -> float:
    """``sup_t [phi(B, t)^-1 sum_i |f_i|^q phi(x_i, t) p_i]^(1/q)``, or ``max|f|``
    for ``q = inf``.  Separable ``phi`` cancels ``t`` and is computed exactly;
    otherwise the sup runs over ``t_grid``."""
    a = np.abs(np.asarray(f, dtype=float))
    if q == np.inf or q == "inf":
        return float(a.max()) if a.size else 0.0
    q = float(q)
    if q < 1:
        raise ValueError("q must be in [1, inf]")
    p = np.asarray(probs, dtype=float)
    m = _mask(B, p.size)
    if not m.any():
        raise ValueError("empty set B with finite q")
    if phi.separable:
        w = np.ones_like(p) if phi.weight is None else phi.weight
        num = float(np.sum(a**q * w * p))
        den = float(np.sum(w * p * m))
        return (num / den) ** (1.0 / q)
    t = DEFAULT_T_GRID if t_grid is None else np.asarray(t_grid, dtype=float)
    vals = phi(t, p.size)  # (T, n)
    num = vals @ (a**q * p)
    den = vals @ (p * m)
    return float(np.max(num / den) ** (1.0 / q))
