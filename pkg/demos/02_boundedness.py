"""Power and Cesaro boundedness across the generator regimes.

For one operator per regime we print the sampled norms ||T^n|| and
||A_n|| = ||n^-1 sum_{i<n} T^i||, next to the closed-form verdicts.  The
unimodular regime is where the strict criterion and the sampled sequence
can disagree; those cases come back as discrepancy records.  The
"nilpotent" regime only forces E(uw) = 0 on some blocks, so the other
blocks may still expand.

    python3 demos/02_boundedness.py
"""

import numpy as np

from wceop import cesaro_bounded_analysis, generate_instance, power_bounded_analysis
from wceop.structure import cesaro_norms, power_norms

SEED = 42
SAMPLE = (1, 2, 4, 16, 64)

for regime in ("nilpotent", "contractive", "unimodular", "expanding"):
    T = generate_instance(SEED, 0, regime, max_points=6)
    pb = power_bounded_analysis(T)
    cb = cesaro_bounded_analysis(T)
    pn = power_norms(T, 64)
    cn = cesaro_norms(T, 64)
    print(f"\n{regime}: N = {T.n}, max |E(uw)| = {T.spectral_radius():.4f}")
    print("  ||T^n||  ", "  ".join(f"n={n}: {pn[n - 1]:.3g}" for n in SAMPLE))
    print("  ||A_n||  ", "  ".join(f"n={n}: {cn[n - 1]:.3g}" for n in SAMPLE))
    print(f"  power bounded: criterion {pb.power_bounded_paper}, sampled {pb.power_bounded_empirical}")
    print(f"  Cesaro bounded: criterion {cb.cesaro_bounded}, sampled {cb.cesaro_bounded_empirical}")
    for d in pb.discrepancies + cb.discrepancies:
        print(f"  DISCREPANCY {d.check}: {d.note}")

# A pure rotation on one block: |E(uw)| = 1, so no strict decay, yet every
# power has the same norm.
T = generate_instance(SEED, 0, "unimodular", max_points=6)
phase = np.exp(0.7j)
R = T.replace(w=T.w * phase)
print("\nrotated unimodular operator, ||T^n|| for n = 1..6:", np.round(power_norms(R, 6), 6))
