"""A four-atom walk through the closed forms.

Masses (1, 1, 2, 1), blocks {0, 1} and {2, 3}, u = (1, 2, 1, 0) and
w = (1, 1, 3, 1).  Every closed form is printed next to the dense matrix
computation it replaces.

    python3 demos/01_running_example.py
"""

import numpy as np

from wceop import (
    FiniteMeasureSpace,
    SigmaSubalgebra,
    WceOperator,
    chain_report,
    polar_aluthge,
    realize,
    two_norm,
)
from wceop.oracle import matrix_power

np.set_printoptions(precision=4, suppress=True)

space = FiniteMeasureSpace(np.array([1.0, 1.0, 2.0, 1.0]))
algebra = SigmaSubalgebra(((0, 1), (2, 3)), 4)
T = WceOperator(space, algebra, np.array([1, 2, 1, 0], dtype=complex),
                np.array([1, 1, 3, 1], dtype=complex), 2.0)
M = realize(T)

print("E(uw) on the atoms:", T.euw.real)
print("T as a matrix (T f = w E(u f)):")
print(M.real)

# Powers collapse to a single multiplication: T^n = M_{E(uw)^(n-1)} T
for n in (2, 3, 5):
    Tn = T.power(n)
    err = np.max(np.abs(realize(Tn) - matrix_power(M, n)))
    print(f"T^{n}: outer weight {Tn.w.real}, max deviation from M^{n} = {err:.1e}")

print("bound functional:", T.bound_functional())
print(f"||T||_2 = {two_norm(M, space.masses):.6f}, Hoelder bound {T.bound_constant():.6f}")
print(f"spectral radius ||E(uw)||_inf = {T.spectral_radius()}")

ch = chain_report(T)
print("dim N(T^k), k = 0..6:", ch.null_dims, " ascent", ch.ascent)
print("dim R(T^k), k = 0..6:", ch.range_dims, " descent", ch.descent)

hat = T.aluthge()
dev = np.max(np.abs(realize(hat) - polar_aluthge(M, space.masses)))
print("Aluthge transform outer weight:", hat.w.real, f"(polar route differs by {dev:.1e})")
print(f"||Aluthge(T)||_2 = {two_norm(realize(hat), space.masses):.6f}")
