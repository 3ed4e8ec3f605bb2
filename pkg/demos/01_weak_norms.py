"""Weak Musielak-Orlicz quasi-norms on a finite space.

Run with ``python demos/01_weak_norms.py``.
"""

import numpy as np

from mhlab import MOFunction, weak_norm, modular_rho
from mhlab.filtration import make_rng
from mhlab.verify import counterexample_function

# %% a two-point space, phi(t) = t
probs = np.array([0.5, 0.5])
f = np.array([2.0, 1.0])
print("weak L1 norm of (2, 1):", weak_norm(MOFunction.power(1.0), f, probs))

# %% the same function under different Musielak-Orlicz functions
rng = make_rng(0)
n = 16
probs = rng.dirichlet(np.ones(n))
f = rng.standard_normal(n)
phis = {
    "t^0.8": MOFunction.power(0.8),
    "t^0.6 + t^1.7": MOFunction.orlicz_fn({"type": "mixed", "p": [0.6, 1.7]}),
    "w(x) t^1.2": MOFunction.weighted(np.exp(rng.standard_normal(n)), {"type": "power", "p": 1.2}),
    "t^p(x)": MOFunction.variable(rng.uniform(0.5, 1.8, n)),
}
for name, phi in phis.items():
    lam = weak_norm(phi, f, probs)
    print(f"{name:>14}: norm {lam:.6f}  modular {modular_rho(phi, f, probs):.6f}  "
          f"modular of f/norm {modular_rho(phi, f / lam, probs):.9f}")

# %% x^(-1/p) on (0, 1]: truncation tails keep norm one
D, p = 12, 1.0
fx = counterexample_function(D, p)
probs = np.full(2**D, 2.0**-D)
phi = MOFunction.power(p)
print("\nnorm of 1/x on 4096 cells:", weak_norm(phi, fx, probs))
for cut in (1, 10, 100, 1000):
    print(f"  norm of the part above {cut:>4}:", weak_norm(phi, fx * (fx > cut), probs))
