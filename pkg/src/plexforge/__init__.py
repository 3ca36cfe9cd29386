"""Latin squares with odd plexes but no transversals.

Constructions, delta-sum nonexistence certificates, exact search and
species classification.
"""

from .analyze import (
    Certificate,
    LogBound,
    botrows_certificate,
    delta,
    delta_matrix,
    extension_bound,
    matching_certificate,
    plex_delta_sum,
    required_residue,
    species_floor,
    step_count_bound,
    step_count_exact,
    step_violations,
    steptype_certificate,
    verify_certificate,
)
from .construct import (
    KK2,
    Mod2of12,
    Mod4,
    Mod10of12,
    SmallOrder,
    StepParams,
    build_cyclic,
    build_J,
    build_modified_square,
    build_plex,
    build_special_square,
    build_special_triplex,
    build_step_type,
    build_trades,
    triplex_variant,
)
from .core import (
    EntrySet,
    LatinError,
    LatinRectangle,
    LatinSquare,
    LatinTrade,
    apply_trade,
    is_plex,
    read_entries,
    read_rectangle,
    read_square,
    write_entries,
    write_square,
)
from .search import (
    SearchBudget,
    SearchOutcome,
    count_transversals,
    enumerate_completions,
    find_order6_example,
    find_plex,
)
from .species import DeltaSignature, SpeciesKey, canonical_key, classify, conjugates, delta_signature

__version__ = "0.1.0"
