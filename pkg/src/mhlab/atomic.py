"""Atoms, atomic decompositions and their quasi-norm.

Every canonical decomposition here has the telescoping form

    a^k = (f^{nu^{k+1}} - f^{nu^k}) / mu^k,   mu^k = C * 2**k * ||1_{B_{nu^k}}||

for a nondecreasing family of stopping times ``nu^k``.  The families differ
only in how ``nu^k`` is chosen (threshold on ``s_{n+1}(f)``, on the minimal
envelope, or through the regular stopping-time construction for S and M).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .filtration import (
    AdaptedProcess,
    Filtration,
    FiltrationError,
    Martingale,
    StoppingTime,
    regularity_constant,
    stopped_values,
)
from .musielak import (
    DEFAULT_T_GRID,
    MOFunction,
    bisect_decreasing,
    lq_phi_norm,
    luxemburg_indicator_norm,
    phi_measure,
)
from .operators import minimal_envelope, operator_levels
from .weights import check_S_condition

__all__ = [
    "Atom",
    "DecompEntry",
    "Decomposition",
    "AtomCheck",
    "decompose",
    "decompose_s",
    "decompose_PQ",
    "decompose_SM",
    "stopping_time_regular",
    "check_stopping_bounds",
    "validate_atom",
    "reconstruct",
    "decomposition_norm",
    "decomposition_to_json",
    "decomposition_from_json",
]

ATOM_OPERATOR = {"s": "s", "S": "S", "M": "M"}
# decomposition kind -> (operator bounded by the atoms, C tilde)
DECOMPOSITION_KINDS = {"s": ("s", 2.0), "P": ("M", 3.0), "Q": ("S", 3.0), "S": ("S", 2.0), "M": ("M", 3.0)}


@dataclass
class Atom:
    a: Martingale
    nu: StoppingTime
    kind: str
    q: float = np.inf


@dataclass
class DecompEntry:
    k: int
    mu: float
    atom: Atom

    @property
    def nu(self) -> StoppingTime:
        return self.atom.nu


@dataclass
class Decomposition:
    kind: str
    c_tilde: float
    k_range: tuple
    entries: list
    filtration: Filtration
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    @property
    def atoms(self):
        return [e.atom for e in self.entries]

    def nonzero(self):
        return [e for e in self.entries if e.mu != 0]


@dataclass
class AtomCheck:
    passed: bool
    condition: str | None = None
    witness: tuple | None = None
    lhs: float | None = None
    rhs: float | None = None

    def __bool__(self):
        return self.passed


# ---------------------------------------------------------------------------
# stopping times
# ---------------------------------------------------------------------------


def _first_true(mask: np.ndarray, inf: int) -> np.ndarray:
    """Row index of the first True per column; ``inf`` where none."""
    hit = mask.any(axis=0)
    return np.where(hit, mask.argmax(axis=0), inf)


def _gamma_array(filtration: Filtration, gamma) -> np.ndarray:
    if isinstance(gamma, AdaptedProcess):
        return gamma.values
    g = np.asarray(gamma, dtype=float)
    if g.shape != (filtration.depth + 1, filtration.n_points):
        raise ValueError("gamma must have shape (N+1, points)")
    for n in range(filtration.depth + 1):
        if not filtration.is_measurable(g[n], n):
            raise FiltrationError(f"gamma_{n} is not F_{n}-measurable")
    return g


def stopping_time_regular(filtration: Filtration, gamma, lam: float) -> StoppingTime:
    """Stop at the first level whose current atom meets ``{gamma_{n+1} > lam}``.

    ``tau(x) = inf{n >= 0 : max over the F_n-atom of x of gamma_{n+1} > lam}``.
    On a regular filtration this satisfies: ``gamma_n <= lam`` for
    ``n <= tau``; ``{M gamma > lam}`` is inside ``{tau < inf}``; the weighted
    mass of ``{tau < inf}`` is at most ``K R`` times that of
    ``{M gamma > lam}``; and ``tau`` is monotone in ``lam``.
    """
    g = _gamma_array(filtration, gamma)
    if np.any(g < 0):
        raise ValueError("gamma must be nonnegative")
    if not lam > float(g[0].max()):
        raise ValueError(f"lam={lam!r} must exceed max gamma_0={float(g[0].max())!r}")
    N = filtration.depth
    exceed = np.stack([filtration.atom_max(g[n + 1], n) > lam for n in range(N)])
    return StoppingTime(filtration, _first_true(exceed, filtration.infinity), check=False)


def check_stopping_bounds(phi: MOFunction, filtration: Filtration, gamma, lam: float,
                         lam2: float | None = None, K: float | None = None,
                         R: float | None = None, t_grid=None) -> dict:
    """Check the four conclusions of the regular stopping-time construction.

    Returns a dict with boolean ``a``, ``b``, ``c`` (and ``d`` when ``lam2`` is
    given) plus the worst observed ratio for (c).
    """
    g = _gamma_array(filtration, gamma)
    tau = stopping_time_regular(filtration, g, lam)
    N = filtration.depth
    levels = np.arange(N + 1)[:, None]
    upto = levels <= np.minimum(tau.tau, N)[None, :]
    res = {"a": bool(np.all(g[upto] <= lam))}
    big = g.max(axis=0) > lam
    res["b"] = bool(np.all(tau.support[big]))
    if K is None:
        K = check_S_condition(phi, filtration, "S-", t_grid).constant
    if R is None:
        R = regularity_constant(filtration)
    t = DEFAULT_T_GRID if t_grid is None else np.asarray(t_grid, dtype=float)
    lhs = np.atleast_1d(phi_measure(phi, filtration.probs, tau.support, t))
    rhs = np.atleast_1d(phi_measure(phi, filtration.probs, big, t))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lhs > 0, lhs / np.where(rhs > 0, rhs, 0.0), 0.0)
    worst = float(np.max(ratio)) if ratio.size else 0.0
    res["c_ratio"] = worst
    res["KR"] = float(K * R)
    res["c"] = bool(np.all(lhs <= K * R * rhs * (1 + 1e-12) + 1e-300))
    if lam2 is not None:
        lo, hi = sorted((lam, lam2))
        t_lo = stopping_time_regular(filtration, g, lo)
        t_hi = stopping_time_regular(filtration, g, hi)
        res["d"] = bool(t_lo <= t_hi)
    return res


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------


def _k_range(first_positive: np.ndarray, top: np.ndarray):
    """Dyadic range outside of which every telescoping term vanishes.

    ``first_positive`` collects every positive value of the stopping process
    over all levels: below ``min`` of those, ``nu^k`` stops each point before
    ``f`` has moved, so ``f^{nu^k} = 0``.  Above ``ceil(log2 max)`` the set
    ``B_{nu^k}`` is empty.
    """
    pos = first_positive[first_positive > 0]
    if pos.size == 0:
        return None
    kmin = math.floor(math.log2(float(pos.min()))) - 1
    kmax = math.ceil(math.log2(float(top.max())))
    return kmin, max(kmin, kmax)


def _telescope(f: Martingale, phi: MOFunction, kind: str, taus, k_range, meta=None) -> Decomposition:
    atom_kind, c_tilde = DECOMPOSITION_KINDS[kind]
    filt = f.filtration
    probs = filt.probs
    entries = []
    if k_range is not None:
        kmin, kmax = k_range
        stopped = {k: stopped_values(f.values, taus(k).tau) for k in range(kmin, kmax + 2)}
        for k in range(kmin, kmax + 1):
            nu = taus(k)
            lux = luxemburg_indicator_norm(phi, probs, nu.support)
            mu = c_tilde * 2.0**k * lux
            if mu != 0:
                vals = (stopped[k + 1] - stopped[k]) / mu
            else:
                vals = np.zeros_like(f.values)
            a = Martingale.from_values(filt, vals, atol=0.0, check=False)
            entries.append(DecompEntry(k, mu, Atom(a, nu, atom_kind)))
    return Decomposition(kind, c_tilde, k_range, entries, filt, dict(meta or {}))


def decompose_s(phi: MOFunction, f: Martingale) -> Decomposition:
    """Canonical (phi, q)_s-atomic decomposition.

    ``nu^k = inf{n : s_{n+1}(f) > 2**k}``, ``mu^k = 2**(k+1) ||1_{B_{nu^k}}||``.
    ``s_{n+1}(f)`` is ``F_n``-measurable, so these are stopping times and
    ``B_{nu^k} = {s(f) > 2**k}``.
    """
    filt = f.filtration
    s_lv = operator_levels("s", f)
    cache = {}

    def taus(k):
        if k not in cache:
            cache[k] = StoppingTime(filt, _first_true(s_lv[1:] > 2.0**k, filt.infinity), check=False)
        return cache[k]

    return _telescope(f, phi, "s", taus, _k_range(s_lv[1:].ravel(), s_lv[-1]))


def decompose_PQ(kind: str, phi: MOFunction, f: Martingale) -> Decomposition:
    """Decomposition driven by the minimal envelope ``lam`` of ``f``.

    ``nu^k`` is the first entry time of ``lam_n`` into ``(2**k, inf)`` and
    ``mu^k = 3 * 2**k ||1_{B_{nu^k}}||``.  Atoms are M-atoms for ``kind="P"``
    and S-atoms for ``kind="Q"``.
    """
    if kind not in ("P", "Q"):
        raise ValueError("kind must be 'P' or 'Q'")
    filt = f.filtration
    lam = minimal_envelope(kind, f).values
    cache = {}

    def taus(k):
        if k not in cache:
            cache[k] = StoppingTime(filt, _first_true(lam > 2.0**k, filt.infinity), check=False)
        return cache[k]

    return _telescope(f, phi, kind, taus, _k_range(lam.ravel(), lam[-1]))


def decompose_SM(kind: str, phi: MOFunction, f: Martingale, t_grid=None,
                 max_regularity: float = np.inf, max_s_constant: float = np.inf) -> Decomposition:
    """Decomposition on a regular filtration through ``stopping_time_regular``
    applied to ``gamma = S_n(f)`` (``kind="S"``) or ``M_n(f)`` (``kind="M"``).

    S-atoms use ``mu^k = 2**(k+1) ||1_B||``.  For M-atoms the stopped values
    at ``nu^{k+1}`` and ``nu^k`` are bounded by ``2**(k+1)`` and ``2**k``, so
    ``mu^k = 3 * 2**k ||1_B||`` is what keeps ``M(a^k) <= ||1_B||^-1``.
    """
    if kind not in ("S", "M"):
        raise ValueError("kind must be 'S' or 'M'")
    filt = f.filtration
    R = regularity_constant(filt)
    if not R <= max_regularity:
        raise ValueError(f"filtration is not regular enough: R={R} > {max_regularity}")
    K = check_S_condition(phi, filt, "S-", t_grid).constant
    if not (np.isfinite(K) and K <= max_s_constant):
        raise ValueError(f"phi fails the S- condition: K={K}")
    gamma = operator_levels(kind, f)
    cache = {}

    def taus(k):
        if k not in cache:
            cache[k] = stopping_time_regular(filt, gamma, 2.0**k)
        return cache[k]

    return _telescope(f, phi, kind, taus, _k_range(gamma.ravel(), gamma[-1]), {"K": K, "R": R})


def decompose(kind: str, phi: MOFunction, f: Martingale, **kw) -> Decomposition:
    if kind == "s":
        return decompose_s(phi, f)
    if kind in ("P", "Q"):
        return decompose_PQ(kind, phi, f)
    if kind in ("S", "M"):
        return decompose_SM(kind, phi, f, **kw)
    raise ValueError(f"unknown decomposition kind {kind!r}")


# ---------------------------------------------------------------------------
# checks and norms
# ---------------------------------------------------------------------------


def validate_atom(phi: MOFunction, atom: Atom, q=None, t_grid=None, rtol: float = 1e-9) -> AtomCheck:
    """Check both atom conditions, returning the first violation as witness.

    (i) ``a_n = 0`` on ``{nu >= n}``, exactly.  (ii) the ``L^q_phi(B_nu)`` size
    of ``op(a)`` is at most ``||1_{B_nu}||^-1`` (relative slack ``rtol``).
    """
    q = atom.q if q is None else q
    a = atom.a.values
    filt = atom.a.filtration
    tau = atom.nu.tau
    for n in range(filt.depth + 1):
        bad = (tau >= n) & (a[n] != 0)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            return AtomCheck(False, "i", (n, i), float(a[n, i]), 0.0)
    op = operator_levels(ATOM_OPERATOR[atom.kind], atom.a)[-1]
    B = atom.nu.support
    if not B.any():
        if np.any(op != 0):
            i = int(np.flatnonzero(op)[0])
            return AtomCheck(False, "ii", ("empty B", i), float(op[i]), 0.0)
        return AtomCheck(True)
    lux = luxemburg_indicator_norm(phi, filt.probs, B)
    bound = 1.0 / lux
    if q == np.inf or q == "inf":
        size = float(op.max())
        witness = ("inf", int(op.argmax()))
    elif phi.separable:
        size = lq_phi_norm(phi, op, B, q, filt.probs)
        witness = ("q", float(q))
    else:
        t = DEFAULT_T_GRID if t_grid is None else np.asarray(t_grid, dtype=float)
        vals = phi(t, filt.n_points)
        ratios = (vals @ (op ** float(q) * filt.probs)) / (vals @ (filt.probs * B))
        j = int(np.argmax(ratios))
        size = float(ratios[j] ** (1.0 / float(q)))
        witness = ("t", float(t[j]))
    if size > bound * (1 + rtol):
        return AtomCheck(False, "ii", witness, size, bound)
    return AtomCheck(True, lhs=size, rhs=bound)


def reconstruct(d: Decomposition, k_from: int | None = None, k_to: int | None = None) -> Martingale:
    """Partial sum ``sum_{k=k_from}^{k_to} mu^k a^k``; the whole range by default."""
    filt = d.filtration
    total = np.zeros((filt.depth + 1, filt.n_points))
    for e in d.entries:
        if k_from is not None and e.k < k_from:
            continue
        if k_to is not None and e.k > k_to:
            continue
        if e.mu != 0:
            total += e.mu * e.atom.a.values
    return Martingale.from_values(filt, total, atol=0.0, check=False)


def decomposition_norm(phi: MOFunction, d: Decomposition, rtol: float = 1e-10) -> float:
    """``inf{lam > 0 : sup_k phi(B_{nu^k}, 2**k / lam) <= 1}`` for this decomposition."""
    probs = d.filtration.probs
    ks, sets = [], []
    for e in d.entries:
        if e.nu.support.any():
            ks.append(e.k)
            sets.append(e.nu.support)
    if not ks:
        return 0.0
    scales = 2.0 ** np.array(ks, dtype=float)
    masks = np.array(sets, dtype=float) * probs[None, :]
    if phi.separable:
        W = np.array([phi.weight_mass(probs, s) for s in sets])
        g = lambda lam: float(np.max(W * phi.orlicz(scales / lam)))
    else:
        n = probs.size
        g = lambda lam: float(np.max(np.sum(phi(scales / lam, n) * masks, axis=1)))
    return bisect_decreasing(g, float(scales.max()), rtol)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def decomposition_to_json(d: Decomposition) -> str:
    from .exchange import filtration_to_dict

    doc = {
        "kind": d.kind,
        "c_tilde": d.c_tilde,
        "k_range": None if d.k_range is None else list(d.k_range),
        "meta": d.meta,
        "filtration": filtration_to_dict(d.filtration),
        "entries": [
            {
                "k": e.k,
                "mu": e.mu,
                "atom_kind": e.atom.kind,
                "nu": e.nu.tau.tolist(),
                "atom": e.atom.a.values.tolist(),
            }
            for e in d.entries
        ],
    }
    return json.dumps(doc, sort_keys=True)


def decomposition_from_json(text: str) -> Decomposition:
    from .exchange import filtration_from_dict

    doc = json.loads(text)
    filt = filtration_from_dict(doc["filtration"])
    entries = []
    for e in doc["entries"]:
        nu = StoppingTime(filt, e["nu"])
        a = Martingale.from_values(filt, e["atom"], atol=0.0, check=False)
        entries.append(DecompEntry(int(e["k"]), float(e["mu"]), Atom(a, nu, e["atom_kind"])))
    k_range = None if doc["k_range"] is None else tuple(doc["k_range"])
    return Decomposition(doc["kind"], float(doc["c_tilde"]), k_range, entries, filt, doc.get("meta", {}))
