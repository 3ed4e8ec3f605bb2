"""Stopping-time atomic decompositions of a random martingale.

Run with ``python demos/02_atomic_decomposition.py``.
"""

import numpy as np

from mhlab import MOFunction, random_filtration, random_martingale, dyadic_filtration
from mhlab.atomic import decompose, decomposition_norm, reconstruct, validate_atom
from mhlab.operators import all_space_norms

phi = MOFunction.power(0.8)
F = random_filtration(7, 5)
f = random_martingale(7, F, sparsity=0.2)
print(F)
print("space norms:", {k: round(v, 6) for k, v in all_space_norms(phi, f).items()})

# %% the conditional-square decomposition, level by level
d = decompose("s", phi, f)
print(f"\nkind s, k-range {d.k_range}, C~ = {d.c_tilde}")
for e in d.entries:
    ok = validate_atom(phi, e.atom, q=np.inf).passed and validate_atom(phi, e.atom, q=4).passed
    print(f"  k={e.k:>3}  mu={e.mu:10.6f}  P(B)={F.probs[e.nu.support].sum():.4f}  valid={ok}")
print("reconstruction error:", np.abs(reconstruct(d).values - f.values).max())
print("decomposition norm:", decomposition_norm(phi, d))

# %% every kind; S and M use the regular stopping-time construction
G = dyadic_filtration(5)
g = random_martingale(8, G)
norms = all_space_norms(phi, g)
space = {"s": "WHs", "P": "WP", "Q": "WQ", "S": "WHS", "M": "WHM"}
for kind in "sPQSM":
    d = decompose(kind, phi, g)
    err = np.abs(reconstruct(d).values - g.values).max()
    print(f"{kind}: {len(d.nonzero())} atoms, error {err:.1e}, "
          f"decomposition / space norm = {decomposition_norm(phi, d) / norms[space[kind]]:.4f}")
