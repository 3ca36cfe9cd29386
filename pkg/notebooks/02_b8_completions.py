"""
Completing five rows of B_8
===========================

Fix the first five rows of the cyclic square of order 8 and list every way
to finish it. None of the completions has a transversal. Up to species
there are only nine of them.
"""

from collections import Counter

from plexforge import build_cyclic, classify, count_transversals, delta_signature, enumerate_completions

rect = build_cyclic(8).rectangle(5)
comps = list(enumerate_completions(rect))
print(len(comps), "completions")

# %%
counts = Counter(count_transversals(sq).count for sq in comps)
print(counts)

# %%
# Species classes, by canonical key.
classes = classify(comps)
for cls in classes:
    print(cls.size, cls.key.hex[-24:])

# %%
# The bottom three rows carry all the delta weight. Here is one class
# representative's signature ('.' is zero).
rep = classes[0].representative
print(delta_signature(rep, (5, 6, 7)).to_text())
