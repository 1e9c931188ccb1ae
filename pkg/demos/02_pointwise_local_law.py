"""Pointwise local limit behavior of standardized coin sums.

The rescaled point masses mass(x)/w approach the standard normal density
uniformly over the grid; the table shows the supremum deviation shrinking
roughly like 1/n for the symmetric coin (the 1/sqrt(n) Edgeworth term
vanishes by symmetry).  The histogram spread of the same masses converges in
the relative sense on a fixed box, which is the first step toward the
interval-type statement.
"""

import numpy as np

from lltlab import (closed_box, fair_coin, histogram_at, pointwise_llt_stat,
                    standard_normal, standardized_iid_sum, step1_stat)

nd = standard_normal()
box = closed_box([-1.0], [1.0])

print(f"{'n':>6} {'sup |mass/w - phi|':>20} {'sup |h/phi - 1| on box':>24}")
for n in (16, 64, 256, 1024, 4096):
    pmf = standardized_iid_sum(fair_coin(), n)
    pw = pointwise_llt_stat(pmf, nd)
    s1 = step1_stat(pmf, nd, box)
    print(f"{n:>6} {pw.value:>20.3e} {s1.value:>24.3e}")

# The histogram value at a point is the cell's mass spread over its width.
pmf = standardized_iid_sum(fair_coin(), 64)
x = 0.1
print(f"\nh({x}) = {histogram_at(pmf, [x]):.5f}  vs  phi({x}) = "
      f"{nd.density_at([x]):.5f}")
