"""Convergence on a fixed finite space versus the continuum counterexample.

Run with ``python demos/04_convergence.py``.
"""

from mhlab import MOFunction
from mhlab.verify import convergence_experiments

rep = convergence_experiments(MOFunction.power(1.0), {"depth": 12, "truncations": [1, 10, 100, 1000]})
print("norm of x^-1:", rep["counterexample"]["norm"])
print("truncated tails:", rep["counterexample"]["truncated"])
for name, seq in rep["dominated_convergence"].items():
    print(f"{name:>22}: first index below each tolerance {seq['first_index_below']}")
for name, seq in rep["modular_equivalence"].items():
    print(f"{name:>22}: sandwich {seq['sandwich']}, co-trending {seq['co_trending']}")
print("normalization max deviation:", rep["normalization"]["max_deviation"])
print("all assertions:", rep["assertions"])
