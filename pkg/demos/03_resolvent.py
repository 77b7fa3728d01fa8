"""Inverting I - T without elimination, and how slowly B_n gets there.

When max |E(uw)| < 1 the inverse of I - T is f + T f / (1 - E(uw)).  The
weighted means B_n = n^-1 sum_{i<=n-2} (n-1-i) T^i approach the same
inverse, but the error is -(I - T)^-1 A_n f, which shrinks like 1/n.

    python3 demos/03_resolvent.py
"""

import numpy as np

from wceop import generate_instance, i_minus_t_analysis, invert, realize

T = generate_instance(5, 0, "contractive", max_points=8)
rng = np.random.default_rng(0)
f = rng.normal(size=T.n) + 1j * rng.normal(size=T.n)

g = T.neumann_inverse_apply(f)
K = np.eye(T.n) - realize(T)
print(f"N = {T.n}, spectral radius {T.spectral_radius():.4f}")
print(f"|| (I - T) g - f ||_inf = {np.max(np.abs(K @ g - f)):.2e}")
print(f"|| g - elimination ||_inf = {np.max(np.abs(g - invert(K) @ f)):.2e}")

print("\n      n   ||B_n f - (I-T)^-1 f||   n * error")
for n in (10, 100, 1000, 10000):
    err = np.max(np.abs(T.b_n_apply(n, f) - g))
    print(f"{n:>7}   {err:>22.6e}   {n * err:.6f}")

rep = i_minus_t_analysis(T)
print("\nascent of I - T:", rep.ascent_i_minus_t, " direct sum R + N:", rep.direct_sum)
