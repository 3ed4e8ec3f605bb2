"""Empirical constants between the five weak Hardy-space norms.

Run with ``python demos/03_inequality_web.py``.
"""

from mhlab.verify import Ensemble, measure_gates, verify_martingale_inequalities

phi = {"kind": "weighted", "w": {"random": {"seed": 3, "spread": 0.6}}, "orlicz": {"type": "power", "p": 0.8}}

for family, depths in (("random", (3, 4, 5)), ("skewed", (6,))):
    ens = Ensemble(seed=1, trials=20, family=family, depths=depths)
    gates = measure_gates(phi, ens)
    print(f"\n{family} filtrations, depths {depths}")
    print("  gate constants:", {k: round(v, 3) for k, v in gates["constants"].items()})
    for r in verify_martingale_inequalities(phi, ens):
        if r.skipped:
            print(f"  {r.tag:<22} skipped ({r.skipped})")
        else:
            print(f"  {r.tag:<22} {r.lhs:>10} / {r.rhs:<10} in [{r.c_low:.4f}, {r.c_high:.4f}]")
