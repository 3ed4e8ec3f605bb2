"""Finite filtered probability spaces.

A filtration is stored as a chain of partitions ``P_0, ..., P_N`` of a finite
sample space.  Level ``n`` is encoded by an integer label per sample point
(the index of the ``P_n``-atom containing it), so conditional expectations
reduce to weighted bincounts.

Adapted processes keep one value per atom and per level; point values are
expanded on demand.  This makes ``F_n``-measurability structural instead of
something that is re-checked after the fact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "ProbSpace",
    "Filtration",
    "AdaptedProcess",
    "Martingale",
    "StoppingTime",
    "build_filtration",
    "dyadic_filtration",
    "random_filtration",
    "skewed_filtration",
    "conditional_expectation",
    "martingale_from_terminal",
    "stopped_martingale",
    "regularity_constant",
    "random_martingale",
    "make_rng",
]

PROB_TOL = 1e-12


class FiltrationError(ValueError):
    pass


@dataclass(frozen=True)
class ProbSpace:
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise FiltrationError("probabilities must be a non-empty vector")
        if np.any(~np.isfinite(p)) or np.any(p <= 0):
            raise FiltrationError("every probability must be finite and > 0")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise FiltrationError(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def size(self) -> int:
        return self.probs.size


class Filtration:
    """Refining chain of partitions of a finite probability space.

    ``levels[n]`` is a list of atoms, each a list of point indices.  ``P_0``
    must be the trivial partition ``{Omega}`` and ``N = len(levels) - 1 >= 1``.
    """

    def __init__(self, probs, levels: Sequence[Sequence[Sequence[int]]]):
        self.space = ProbSpace(probs)
        npts = self.space.size
        if len(levels) < 2:
            raise FiltrationError("need at least two levels (N >= 1)")
        labels = []
        atoms = []
        for n, partition in enumerate(levels):
            lab = np.full(npts, -1, dtype=np.int64)
            level_atoms = []
            for a, atom in enumerate(partition):
                idx = np.asarray(list(atom), dtype=np.int64)
                if idx.size == 0:
                    raise FiltrationError(f"empty atom at level {n}")
                if np.any(idx < 0) or np.any(idx >= npts):
                    raise FiltrationError(f"point index out of range at level {n}")
                if np.any(lab[idx] != -1) or np.unique(idx).size != idx.size:
                    raise FiltrationError(f"atoms overlap at level {n}")
                lab[idx] = a
                level_atoms.append(np.sort(idx))
            if np.any(lab == -1):
                raise FiltrationError(f"level {n} does not cover the sample space")
            labels.append(lab)
            atoms.append(level_atoms)
        if len(atoms[0]) != 1:
            raise FiltrationError("P_0 must be the trivial partition {Omega}")

        parents = []
        for n in range(1, len(levels)):
            par = np.empty(len(atoms[n]), dtype=np.int64)
            for a, idx in enumerate(atoms[n]):
                up = np.unique(labels[n - 1][idx])
                if up.size != 1:
                    raise FiltrationError(
                        f"atom {a} of level {n} straddles {up.size} atoms of level {n - 1}"
                    )
                par[a] = up[0]
            parents.append(par)

        p = self.space.probs
        self._labels = tuple(lab for lab in labels)
        self._atoms = tuple(tuple(a) for a in atoms)
        self._parents = (None,) + tuple(parents)
        self._atom_probs = tuple(
            np.bincount(lab, weights=p, minlength=len(at)) for lab, at in zip(labels, atoms)
        )
        for arr in self._labels + self._atom_probs:
            arr.setflags(write=False)

    # -- basic accessors ---------------------------------------------------
    @property
    def probs(self) -> np.ndarray:
        return self.space.probs

    @property
    def n_points(self) -> int:
        return self.space.size

    @property
    def depth(self) -> int:
        """Horizon ``N``."""
        return len(self._labels) - 1

    @property
    def infinity(self) -> int:
        """Sentinel used for ``tau = infinity``."""
        return self.depth + 1

    def labels(self, n: int) -> np.ndarray:
        return self._labels[n]

    def atoms(self, n: int):
        return self._atoms[n]

    def n_atoms(self, n: int) -> int:
        return len(self._atoms[n])

    def atom_probs(self, n: int) -> np.ndarray:
        return self._atom_probs[n]

    def parents(self, n: int) -> np.ndarray:
        """Parent index in ``P_{n-1}`` of every atom of ``P_n`` (``n >= 1``)."""
        return self._parents[n]

    def levels_as_lists(self):
        return [[idx.tolist() for idx in level] for level in self._atoms]

    def __eq__(self, other):
        if not isinstance(other, Filtration):
            return NotImplemented
        if self is other:
            return True
        return (
            self.depth == other.depth
            and np.array_equal(self.probs, other.probs)
            and all(np.array_equal(a, b) for a, b in zip(self._labels, other._labels))
        )

    def __hash__(self):
        return id(self)

    def __repr__(self):
        sizes = [self.n_atoms(n) for n in range(self.depth + 1)]
        return f"Filtration(points={self.n_points}, atoms per level={sizes})"

    # -- atom-wise reductions ----------------------------------------------
    def _atom_reduce_sum(self, f: np.ndarray, n: int) -> np.ndarray:
        lab = self._labels[n]
        k = self.n_atoms(n)
        f = np.asarray(f, dtype=float)
        flat = f.reshape(-1, self.n_points)
        rows = flat.shape[0]
        keys = (lab[None, :] + k * np.arange(rows)[:, None]).ravel()
        out = np.bincount(keys, weights=flat.ravel(), minlength=rows * k)
        return out.reshape(f.shape[:-1] + (k,))

    def expand(self, atom_values: np.ndarray, n: int) -> np.ndarray:
        """Point values from one value per ``P_n``-atom (last axis)."""
        return np.asarray(atom_values)[..., self._labels[n]]

    def cond_exp(self, f, n: int) -> np.ndarray:
        """``E_n f`` for point functions stacked along leading axes."""
        if not 0 <= n <= self.depth:
            raise IndexError(f"level {n} outside 0..{self.depth}")
        f = np.asarray(f, dtype=float)
        sums = self._atom_reduce_sum(f * self.probs, n)
        return self.expand(sums / self._atom_probs[n], n)

    def atom_max(self, f, n: int) -> np.ndarray:
        """Least ``F_n``-measurable majorant of ``f`` (atom-wise maximum)."""
        f = np.asarray(f, dtype=float)
        out = np.full(self.n_atoms(n), -np.inf)
        np.maximum.at(out, self._labels[n], f)
        return out[self._labels[n]]

    def is_measurable(self, f, n: int, atol: float = 0.0) -> bool:
        f = np.asarray(f, dtype=float)
        hi = self.atom_max(f, n)
        lo = -self.atom_max(-f, n)
        return bool(np.all(hi - lo <= atol))

    def expectation(self, f) -> float:
        return float(np.dot(np.asarray(f, dtype=float), self.probs))


def _as_filtration(obj) -> Filtration:
    if isinstance(obj, Filtration):
        return obj
    if isinstance(obj, (int, np.integer)):
        return dyadic_filtration(int(obj))
    raise TypeError(f"expected a Filtration or a dyadic depth, got {type(obj).__name__}")


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def dyadic_filtration(depth: int) -> Filtration:
    """Uniform dyadic chain on ``2**depth`` equiprobable points."""
    if depth < 1:
        raise FiltrationError("dyadic depth must be >= 1")
    npts = 2**depth
    probs = np.full(npts, 1.0 / npts)
    levels = []
    for n in range(depth + 1):
        width = npts >> n
        levels.append([list(range(a * width, (a + 1) * width)) for a in range(2**n)])
    return Filtration(probs, levels)


def build_filtration(spec) -> Filtration:
    """Build a filtration from a dyadic depth or an explicit partition chain.

    ``spec`` may be an int (dyadic depth), a mapping with ``kind`` in
    ``{"dyadic", "explicit", "random", "skewed"}``, or a ``(probs, levels)``
    pair.
    """
    if isinstance(spec, Filtration):
        return spec
    if isinstance(spec, (int, np.integer)):
        return dyadic_filtration(int(spec))
    if isinstance(spec, dict):
        kind = spec.get("kind", "explicit")
        if kind == "dyadic":
            return dyadic_filtration(int(spec["depth"]))
        if kind == "explicit":
            return Filtration(spec["probs"], spec["levels"])
        if kind == "random":
            return random_filtration(
                int(spec.get("seed", 0)), int(spec["depth"]), int(spec.get("max_children", 3))
            )
        if kind == "skewed":
            return skewed_filtration(int(spec["depth"]), float(spec.get("base", 4.0)))
        raise FiltrationError(f"unknown filtration kind {kind!r}")
    probs, levels = spec
    return Filtration(probs, levels)


def _tree_filtration(children_probs_per_level) -> Filtration:
    """Filtration from a tree given as, per level, a list of child-probability
    vectors (one vector per atom of the previous level)."""
    node_probs = [np.array([1.0])]
    parent_of = []
    for split in children_probs_per_level:
        probs, par = [], []
        for a, rel in enumerate(split):
            rel = np.asarray(rel, dtype=float)
            probs.extend(node_probs[-1][a] * rel / rel.sum())
            par.extend([a] * rel.size)
        node_probs.append(np.array(probs))
        parent_of.append(np.array(par, dtype=np.int64))
    depth = len(parent_of)
    leaves = node_probs[-1]
    anc = [np.arange(leaves.size)]
    for par in reversed(parent_of):
        anc.append(par[anc[-1]])
    anc.reverse()
    levels = []
    for n in range(depth + 1):
        k = node_probs[n].size
        levels.append([np.flatnonzero(anc[n] == a).tolist() for a in range(k)])
    return Filtration(leaves / leaves.sum(), levels)


def random_filtration(seed: int, depth: int, max_children: int = 3) -> Filtration:
    """Random refining chain: each atom splits into 1..max_children children
    with Dirichlet(2,...,2) relative masses."""
    rng = make_rng(seed)
    split_levels = []
    n_atoms = 1
    for _ in range(depth):
        split = []
        for _ in range(n_atoms):
            k = int(rng.integers(1, max_children + 1))
            split.append(rng.dirichlet(np.full(k, 2.0)))
        split_levels.append(split)
        n_atoms = sum(len(s) for s in split)
    return _tree_filtration(split_levels)


def skewed_filtration(depth: int, base: float = 4.0) -> Filtration:
    """Binary chain whose level-``n`` split has masses ``(1 - base**-n, base**-n)``.

    Its regularity constant is ``base**depth``, so a family of these is not
    uniformly regular as the depth grows.
    """
    split_levels = []
    n_atoms = 1
    for n in range(1, depth + 1):
        eps = base ** (-n)
        split_levels.append([np.array([1.0 - eps, eps])] * n_atoms)
        n_atoms *= 2
    return _tree_filtration(split_levels)


# ---------------------------------------------------------------------------
# processes
# ---------------------------------------------------------------------------


class AdaptedProcess:
    """Values ``v[n][i]`` that are ``F_n``-measurable for each level ``n``.

    Internally one value per atom per level is kept.  ``from_values``
    compresses a point matrix and rejects non-measurable input.
    """

    def __init__(self, filtration: Filtration, atom_values: Sequence[np.ndarray]):
        self.filtration = filtration
        if len(atom_values) != filtration.depth + 1:
            raise FiltrationError("one value vector per level is required")
        vals = []
        for n, av in enumerate(atom_values):
            av = np.array(av, dtype=float)
            if av.shape != (filtration.n_atoms(n),):
                raise FiltrationError(f"level {n}: expected {filtration.n_atoms(n)} atom values")
            av.setflags(write=False)
            vals.append(av)
        self.atom_values = tuple(vals)
        self._values = None

    @classmethod
    def from_values(cls, filtration: Filtration, values, atol: float | None = None):
        v = np.asarray(values, dtype=float)
        if v.shape != (filtration.depth + 1, filtration.n_points):
            raise FiltrationError(
                f"value matrix must have shape {(filtration.depth + 1, filtration.n_points)}"
            )
        if atol is None:
            atol = 1e-12 * max(1.0, float(np.max(np.abs(v))) if v.size else 1.0)
        atom_vals = []
        for n in range(filtration.depth + 1):
            if not filtration.is_measurable(v[n], n, atol):
                raise FiltrationError(f"level {n} values are not F_{n}-measurable")
            firsts = np.array([idx[0] for idx in filtration.atoms(n)])
            atom_vals.append(v[n][firsts])
        return cls(filtration, atom_vals)

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            f = self.filtration
            v = np.stack([f.expand(av, n) for n, av in enumerate(self.atom_values)])
            v.setflags(write=False)
            self._values = v
        return self._values

    @property
    def depth(self) -> int:
        return self.filtration.depth

    def __getitem__(self, n):
        return self.values[n]

    def __repr__(self):
        return f"{type(self).__name__}(depth={self.depth}, points={self.filtration.n_points})"


class Martingale(AdaptedProcess):
    """Adapted process with ``f_0 = 0`` and ``E_n f_{n+1} = f_n``."""

    def __init__(self, filtration, atom_values, check: bool = True, tol: float = 1e-12):
        super().__init__(filtration, atom_values)
        if check:
            err = martingale_defect(self)
            scale = max(1.0, float(np.max(np.abs(self.values))))
            if err > tol * scale:
                raise FiltrationError(f"not a martingale (defect {err:.3e})")

    @classmethod
    def from_values(cls, filtration, values, atol=None, check=True, tol=1e-12):
        proc = AdaptedProcess.from_values(filtration, values, atol)
        return cls(filtration, proc.atom_values, check=check, tol=tol)

    @classmethod
    def zero(cls, filtration):
        return cls(filtration, [np.zeros(filtration.n_atoms(n)) for n in range(filtration.depth + 1)])

    def differences(self) -> np.ndarray:
        """``d_n f`` for ``n = 1..N`` as rows ``0..N-1``."""
        return np.diff(self.values, axis=0)

    def __add__(self, other):
        if other.filtration != self.filtration:
            raise FiltrationError("martingales live on different filtrations")
        return Martingale(
            self.filtration,
            [a + b for a, b in zip(self.atom_values, other.atom_values)],
            check=False,
        )

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, c):
        return Martingale(self.filtration, [c * a for a in self.atom_values], check=False)

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self


def martingale_defect(f: AdaptedProcess) -> float:
    """max |f_0| and max_n |E_n f_{n+1} - f_n|."""
    v = f.values
    filt = f.filtration
    err = float(np.max(np.abs(v[0])))
    for n in range(filt.depth):
        err = max(err, float(np.max(np.abs(filt.cond_exp(v[n + 1], n) - v[n]))))
    return err


class StoppingTime:
    """Map ``Omega -> {0..N} U {inf}``; infinity is stored as ``N + 1``."""

    def __init__(self, filtration: Filtration, tau, check: bool = True):
        t = np.array(tau, dtype=np.int64)
        if t.shape != (filtration.n_points,):
            raise FiltrationError("stopping time needs one value per point")
        inf = filtration.infinity
        if np.any(t < 0) or np.any(t > inf):
            raise FiltrationError(f"stopping time values must lie in 0..{inf}")
        if check:
            for n in range(filtration.depth + 1):
                if not filtration.is_measurable((t <= n).astype(float), n):
                    raise FiltrationError(f"{{tau <= {n}}} is not in F_{n}")
        t.setflags(write=False)
        self.filtration = filtration
        self.tau = t

    @classmethod
    def constant(cls, filtration, value):
        v = filtration.infinity if value in (None, np.inf) else int(value)
        return cls(filtration, np.full(filtration.n_points, v))

    @property
    def support(self) -> np.ndarray:
        """Boolean mask of ``B_nu = {nu < inf}``."""
        return self.tau < self.filtration.infinity

    def as_float(self) -> np.ndarray:
        out = self.tau.astype(float)
        out[~self.support] = np.inf
        return out

    def __le__(self, other):
        return bool(np.all(self.tau <= other.tau))

    def __repr__(self):
        return f"StoppingTime({self.as_float().tolist()})"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def conditional_expectation(filtration: Filtration, f, n: int) -> np.ndarray:
    return filtration.cond_exp(f, n)


def martingale_from_terminal(filtration: Filtration, g) -> Martingale:
    """``f_n = E_n(g - E g)``, so that ``f_0 = 0``."""
    g = np.asarray(g, dtype=float)
    centred = g - filtration.expectation(g)
    vals = [filtration.cond_exp(centred, n) for n in range(filtration.depth + 1)]
    vals[0] = np.zeros_like(vals[0])
    return Martingale.from_values(filtration, np.stack(vals))


def stopped_values(values: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """``out[n, i] = values[min(tau_i, n), i]``."""
    depth = values.shape[0] - 1
    rows = np.minimum(tau[None, :], np.arange(depth + 1)[:, None])
    return np.take_along_axis(values, rows, axis=0)


def stopped_martingale(f: Martingale, tau: StoppingTime) -> Martingale:
    """``f^tau_n = f_{min(tau, n)}``."""
    if tau.filtration != f.filtration:
        raise FiltrationError("stopping time and martingale use different filtrations")
    vals = stopped_values(f.values, tau.tau)
    return Martingale.from_values(f.filtration, vals, atol=0.0, check=False)


def regularity_constant(filtration: Filtration) -> float:
    """Least ``R`` with ``f_n <= R f_{n-1}`` for nonnegative martingales:
    the largest parent-to-child probability ratio."""
    best = 1.0
    for n in range(1, filtration.depth + 1):
        ratio = filtration.atom_probs(n - 1)[filtration.parents(n)] / filtration.atom_probs(n)
        best = max(best, float(ratio.max()))
    return best


def make_rng(seed) -> np.random.Generator:
    """The package PRNG: numpy ``Generator`` over ``PCG64`` seeded through
    ``SeedSequence``.  ``seed`` may be an int or a tuple of ints."""
    if isinstance(seed, (tuple, list)):
        ss = np.random.SeedSequence([int(s) & 0xFFFFFFFFFFFFFFFF for s in seed])
    else:
        ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF)
    return np.random.Generator(np.random.PCG64(ss))


def random_martingale(seed, filtration, scale: float = 1.0, sparsity: float = 0.0) -> Martingale:
    """Seeded random martingale.

    Each level draws standard normals per atom, removes their conditional
    mean over the parent atom and multiplies by ``scale``.  With probability
    ``sparsity`` a parent atom gets no increment at that level.  Same seed and
    filtration give a bit-identical result.
    """
    filt = _as_filtration(filtration)
    rng = make_rng(seed)
    atom_vals = [np.zeros(1)]
    for n in range(1, filt.depth + 1):
        par = filt.parents(n)
        z = rng.standard_normal(filt.n_atoms(n))
        ap = filt.atom_probs(n)
        mean = np.bincount(par, weights=z * ap, minlength=filt.n_atoms(n - 1))
        mean /= filt.atom_probs(n - 1)
        d = z - mean[par]
        if sparsity > 0:
            keep = rng.random(filt.n_atoms(n - 1)) >= sparsity
            d = d * keep[par]
        atom_vals.append(atom_vals[-1][par] + scale * d)
    return Martingale(filt, atom_vals)
