"""
Transversals of cyclic squares
==============================

The addition table of Z_n has transversals exactly when n is odd. We count
them for small odd n and watch the even cases come back empty.
"""

import numpy as np

from plexforge import build_cyclic, count_transversals, delta_matrix, find_plex

# %%
# The square itself is just (r + c) mod n.
b7 = build_cyclic(7)
print(b7.array)

# %%
# Counting is exact. Odd orders have many transversals.
for n in (3, 5, 7, 9):
    print(n, count_transversals(build_cyclic(n)).count)

# %%
# Even orders have none, and the search proves it by exhausting the tree.
for n in (4, 6, 8, 10, 12):
    out = count_transversals(build_cyclic(n))
    print(n, out.status, out.nodes, "nodes")

# %%
# Duplexes are another story: B_12 has plenty.
dup = find_plex(build_cyclic(12), 2)
print(dup.status, sorted(dup.witness)[:6], "...")

# %%
# The delta statistic vanishes on every cell of a cyclic square, which is
# why no odd plex can sum to the required residue there.
print(np.abs(delta_matrix(build_cyclic(8))).sum())
