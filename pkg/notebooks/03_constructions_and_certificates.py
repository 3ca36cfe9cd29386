"""
Squares with a triplex and no transversal
=========================================

Each family modifies a cyclic square by a few trades, keeps a triplex, and
gets a certificate that no transversal exists.
"""

from plexforge import (
    build_modified_square,
    build_plex,
    find_plex,
    is_plex,
    matching_certificate,
    triplex_variant,
)

# %%
for n in (8, 10, 12, 14, 16, 18, 20, 22):
    variant = triplex_variant(n)
    sq = build_modified_square(variant)
    plex = build_plex(variant)
    cert = matching_certificate(sq, 1, 1)
    print(f"{n:3d} {type(variant).__name__:10s} plex ok={is_plex(sq, plex, 3)} "
          f"sum in [{cert.sum_lo}, {cert.sum_hi}] needs {cert.required_value} mod {cert.required_modulus}: "
          f"{cert.conclusion}")

# %%
# Cross-check one certificate against exhaustive search.
sq = build_modified_square(triplex_variant(12))
print(find_plex(sq, 1).status)

# %%
# Certificates serialize to JSON and can be rechecked later.
print(matching_certificate(sq, 1, 1).to_json())
