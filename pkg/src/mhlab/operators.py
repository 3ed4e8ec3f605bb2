"""Martingale operators M, S, s, the minimal envelopes for WP/WQ, and the five
weak Hardy-space quasi-norms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .filtration import Martingale, make_rng, random_martingale
from .musielak import MOFunction, weak_norm

__all__ = [
    "OPERATOR_KINDS",
    "SPACES",
    "operator_levels",
    "apply_operator",
    "Envelope",
    "minimal_envelope",
    "is_admissible",
    "space_norm",
    "all_space_norms",
    "SublinearOperator",
    "MAXIMAL",
    "SQUARE",
    "COND_SQUARE",
    "BUILTIN_OPERATORS",
    "SublinearReport",
    "check_sublinear",
]

OPERATOR_KINDS = ("M", "S", "s")
SPACES = ("WHs", "WHS", "WHM", "WP", "WQ")


def operator_levels(kind: str, f: Martingale) -> np.ndarray:
    """Per-level values ``T_n(f)`` for ``n = 0..N`` as an ``(N+1, points)`` array."""
    v = f.values
    if kind == "M":
        return np.maximum.accumulate(np.abs(v), axis=0)
    d2 = np.diff(v, axis=0) ** 2
    if kind == "S":
        terms = d2
    elif kind == "s":
        filt = f.filtration
        terms = np.stack([filt.cond_exp(d2[i], i) for i in range(filt.depth)])
    else:
        raise ValueError(f"unknown operator {kind!r}")
    out = np.zeros_like(v)
    out[1:] = np.sqrt(np.cumsum(terms, axis=0))
    return out


def apply_operator(kind: str, f: Martingale, n: int | None = None) -> np.ndarray:
    """``M_n(f)``, ``S_n(f)`` or ``s_n(f)``; ``n=None`` gives the level-N total."""
    levels = operator_levels(kind, f)
    return levels[-1] if n is None else levels[n]


@dataclass(frozen=True)
class Envelope:
    """Adapted nondecreasing sequence ``lam_0..lam_N``; ``lam_inf = lam_N``."""

    kind: str
    values: np.ndarray

    @property
    def terminal(self) -> np.ndarray:
        return self.values[-1]


def _controlled(kind: str, f: Martingale) -> np.ndarray:
    if kind == "P":
        return np.abs(f.values)
    if kind == "Q":
        return operator_levels("S", f)
    raise ValueError(f"envelope kind must be 'P' or 'Q', got {kind!r}")


def minimal_envelope(kind: str, f: Martingale) -> Envelope:
    """Pointwise least element of ``Lambda[WP](f)`` (``kind="P"``) or
    ``Lambda[WQ](f)`` (``kind="Q"``).

    ``lam_n = max(lam_{n-1}, atom-max over F_n of g_{n+1})`` with ``g = |f|``
    or ``S(f)`` and ``lam_{-1} = 0``.  The atom-wise maximum is the least
    ``F_n``-measurable majorant, so any admissible envelope dominates this
    one at every level by induction.  Because ``weak_norm`` is monotone under
    pointwise domination, ``weak_norm(lam_N)`` is the exact infimum.
    """
    g = _controlled(kind, f)
    filt = f.filtration
    N = filt.depth
    lam = np.zeros_like(g)
    prev = np.zeros(filt.n_points)
    for n in range(N):
        prev = np.maximum(prev, filt.atom_max(g[n + 1], n))
        lam[n] = prev
    lam[N] = prev
    lam.setflags(write=False)
    return Envelope(kind, lam)


def is_admissible(kind: str, f: Martingale, lam, atol: float = 0.0) -> bool:
    """Membership of an ``(N+1, points)`` sequence in ``Lambda[WP](f)`` / ``Lambda[WQ](f)``."""
    lam = np.asarray(lam, dtype=float)
    g = _controlled(kind, f)
    filt = f.filtration
    if np.any(lam < -atol):
        return False
    if np.any(np.diff(lam, axis=0) < -atol):
        return False
    if not all(filt.is_measurable(lam[n], n, atol) for n in range(filt.depth + 1)):
        return False
    return bool(np.all(g[1:] <= lam[:-1] + atol))


def space_norm(space: str, phi: MOFunction, f: Martingale, rtol: float = 1e-10) -> float:
    """Quasi-norm of ``f`` in WHs, WHS, WHM, WP or WQ."""
    probs = f.filtration.probs
    if space == "WHs":
        g = apply_operator("s", f)
    elif space == "WHS":
        g = apply_operator("S", f)
    elif space == "WHM":
        g = apply_operator("M", f)
    elif space == "WP":
        g = minimal_envelope("P", f).terminal
    elif space == "WQ":
        g = minimal_envelope("Q", f).terminal
    else:
        raise ValueError(f"unknown space {space!r}")
    return weak_norm(phi, g, probs, rtol)


def all_space_norms(phi: MOFunction, f: Martingale) -> dict:
    return {sp: space_norm(sp, phi, f) for sp in SPACES}


@dataclass(frozen=True)
class SublinearOperator:
    name: str
    apply: Callable[[Martingale], np.ndarray]
    domain: str = "martingales"
    codomain: str = "point functions"

    def __call__(self, f):
        return np.asarray(self.apply(f), dtype=float)


MAXIMAL = SublinearOperator("M", lambda f: apply_operator("M", f))
SQUARE = SublinearOperator("S", lambda f: apply_operator("S", f))
COND_SQUARE = SublinearOperator("s", lambda f: apply_operator("s", f))
BUILTIN_OPERATORS = {"M": MAXIMAL, "S": SQUARE, "s": COND_SQUARE}


@dataclass
class SublinearReport:
    name: str
    trials: int
    max_subadditivity_violation: float
    max_homogeneity_violation: float
    passed: bool

    def to_dict(self):
        return dict(vars(self))


def check_sublinear(T: SublinearOperator, filtration, seed: int = 0, trials: int = 20,
                    tol: float = 1e-9) -> SublinearReport:
    """Sample ``|T(f+g)| <= |T f| + |T g|`` and ``|T(c f)| <= |c| |T f|``.

    Violations are measured relative to ``1 + max |T f|``.  Scalars are drawn
    on both sides of 1 in absolute value.
    """
    rng = make_rng((seed, 0x5B1))
    sub = hom = 0.0
    for k in range(trials):
        f = random_martingale((seed, k, 1), filtration, scale=float(np.exp(rng.normal())))
        g = random_martingale((seed, k, 2), filtration, scale=float(np.exp(rng.normal())))
        c = float(rng.choice([-1, 1]) * np.exp(rng.uniform(-2, 2)))
        Tf, Tg = np.abs(T(f)), np.abs(T(g))
        scale = 1.0 + max(Tf.max(), Tg.max())
        sub = max(sub, float(np.max(np.abs(T(f + g)) - Tf - Tg)) / scale)
        hom = max(hom, float(np.max(np.abs(T(c * f)) - abs(c) * Tf)) / (scale * max(1.0, abs(c))))
    return SublinearReport(T.name, trials, sub, hom, bool(sub <= tol and hom <= tol))
