"""
Counting bounds
===============

Log10 lower bounds on completion counts, evaluated from exact rationals.
"""

import numpy as np

from plexforge import extension_bound, species_floor, step_count_bound

# %%
# Expected number of ways to extend k rows of B_n to a square, as a floor.
n = 8
vals = np.array([extension_bound(n, k).log10_value for k in range(n + 1)])
print(np.round(vals, 4))

# %%
# The five-row value sits well below the true 264 completions.
print(10 ** extension_bound(8, 5).log10_value)

# %%
print(step_count_bound(1, 3).log10_value)

# %%
for n in (8, 12, 24):
    print(n, species_floor(n, "ThreeHalves").log10_value, species_floor(n, "Quadratic").log10_value)
