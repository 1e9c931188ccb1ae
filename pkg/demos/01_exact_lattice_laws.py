"""Exact lattice laws: build, convolve, standardize, query.

Walks through the basic objects: a one-summand lattice law, its n-fold sum
by exact convolution, the standardized version, and box-mass queries with
inclusivity flags.
"""

import numpy as np

from lltlab import (Box, closed_box, fair_coin, iid_sum_pmf, moments,
                    read_pmf_csv, standardized_iid_sum, write_pmf_csv)

base = fair_coin()       # +/-1 with probability 1/2 each, span 2
print("base law support:", base.support(), "masses:", base.masses)
print("moments:", moments(base))

# Exact law of the sum of 10 coins: binomial on {-10, -8, ..., 10}.
s10 = iid_sum_pmf(base, 10)
print("\nsum of 10 coins:")
for x, p in zip(s10.axis_coords(0), s10.masses):
    print(f"  P(S = {x:+.0f}) = {p:.6f}")

# Standardize: S/sqrt(10); the grid step becomes 2/sqrt(10).
z10 = standardized_iid_sum(base, 10)
print("\nstandardized grid step:", z10.grid.step[0], "= 2/sqrt(10) =",
      2 / np.sqrt(10))

# Box masses respect endpoint inclusivity where endpoints sit on the grid.
b = z10.grid.step[0] * 2          # exactly two steps
print("mass of [0, b]  closed:", z10.box_mass(closed_box([0.0], [b])))
print("mass of (0, b]  half-open:",
      z10.box_mass(Box([0.0], [b], [False], [True])))
print("mass of (0, b)  open:", z10.box_mass(Box([0.0], [b], [False], [False])))

# Round-trip through CSV + JSON sidecar is bit-exact.
write_pmf_csv(z10, "/tmp/z10.csv")
back = read_pmf_csv("/tmp/z10.csv")
print("\nserialization bit-exact:", bool(np.array_equal(back.masses, z10.masses)))
