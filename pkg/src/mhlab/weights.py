"""Weight conditions for the martingale ``phi_n(., t) = E_n phi(., t)``:
uniform A_q and the two-sided / one-sided S conditions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filtration import Filtration
from .musielak import DEFAULT_T_GRID, MOFunction

__all__ = ["WeightReport", "check_Aq", "check_S_condition", "weight_martingale"]


@dataclass
class WeightReport:
    condition: str
    constant: float
    t_grid: list
    passed: bool
    max_mass: float

    def to_dict(self):
        return dict(vars(self))


def _weight_table(phi: MOFunction, filtration: Filtration, t_grid):
    """``phi(x_i, t)`` on the grid, shape ``(T, points)``.  Separable functions
    only need their ``x``-profile since ``Phi(t)`` cancels in every ratio."""
    n = filtration.n_points
    if phi.separable:
        w = np.ones(n) if phi.weight is None else np.asarray(phi.weight, dtype=float)
        return w[None, :], [1.0]
    t = DEFAULT_T_GRID if t_grid is None else np.asarray(t_grid, dtype=float)
    return phi(t, n), t.tolist()


def _max_mass(phi, filtration, t_grid):
    t = DEFAULT_T_GRID if t_grid is None else np.asarray(t_grid, dtype=float)
    return float(np.max(phi(t, filtration.n_points) @ filtration.probs))


def weight_martingale(phi: MOFunction, filtration: Filtration, t) -> np.ndarray:
    """``phi_n(x, t)`` for ``n = 0..N``; shape ``(N+1, points)``."""
    col = phi(np.asarray(float(t)), filtration.n_points)
    return np.stack([filtration.cond_exp(col, n) for n in range(filtration.depth + 1)])


def check_Aq(phi: MOFunction, filtration: Filtration, q: float, t_grid=None,
             k_max: float = np.inf) -> WeightReport:
    """Best constant in the uniform A_q condition.

    ``q > 1``: ``E_n(phi) [E_n(phi^(-1/(q-1)))]^(q-1)``; ``q = 1``:
    ``E_n(phi) / phi``.  Maximum over every level, point and grid ``t``.
    """
    if q < 1:
        raise ValueError(f"A_q needs q >= 1, got {q}")
    table, grid = _weight_table(phi, filtration, t_grid)
    if np.any(table <= 0):
        raise ValueError("A_q needs a strictly positive phi")
    best = 0.0
    for n in range(filtration.depth + 1):
        mean = filtration.cond_exp(table, n)
        if q == 1:
            expr = mean / table
        else:
            expr = mean * filtration.cond_exp(table ** (-1.0 / (q - 1)), n) ** (q - 1)
        best = max(best, float(expr.max()))
    return WeightReport(
        f"A_{q:g}", best, grid, bool(np.isfinite(best) and best <= k_max),
        _max_mass(phi, filtration, t_grid),
    )


def check_S_condition(phi: MOFunction, filtration: Filtration, variant: str = "S",
                      t_grid=None, k_max: float = np.inf) -> WeightReport:
    """Least ``K`` with ``phi_{n-1}/K <= phi_n <= K phi_{n-1}`` (``variant="S"``),
    only the left inequality (``"S-"``) or only the right one (``"S+"``)."""
    if variant not in ("S", "S-", "S+"):
        raise ValueError("variant must be 'S', 'S-' or 'S+'")
    table, grid = _weight_table(phi, filtration, t_grid)
    best = 1.0
    prev = filtration.cond_exp(table, 0)
    for n in range(1, filtration.depth + 1):
        cur = filtration.cond_exp(table, n)
        ratio = cur / prev
        if variant in ("S", "S+"):
            best = max(best, float(ratio.max()))
        if variant in ("S", "S-"):
            best = max(best, float((1.0 / ratio).max()))
        prev = cur
    return WeightReport(
        variant, best, grid, bool(np.isfinite(best) and best <= k_max),
        _max_mass(phi, filtration, t_grid),
    )
