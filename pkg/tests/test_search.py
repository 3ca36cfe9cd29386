import itertools
import random

import pytest

from plexforge.analyze import matching_certificate
from plexforge.construct import KK2, Mod4, build_cyclic, build_modified_square, build_special_square
from plexforge.core import LatinRectangle, LatinSquare, is_plex
from plexforge.search import (
    SearchBudget,
    count_transversals,
    count_transversals_exact_cover,
    enumerate_completions,
    enumerate_reduced,
    find_order6_example,
    find_plex,
    iter_transversals,
    random_completion,
    random_latin_square,
)
from plexforge.species import conjugates, relabel


def brute_transversals(sq):
    n = sq.order
    return sum(1 for p in itertools.permutations(range(n)) if len({sq[r, p[r]] for r in range(n)}) == n)


def brute_latin_squares(n):
    rows = list(itertools.permutations(range(n)))
    out = []
    for choice in itertools.product(rows, repeat=n):
        if all(len({row[c] for row in choice}) == n for c in range(n)):
            out.append(choice)
    return out


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(node_limit=0)
    with pytest.raises(ValueError):
        SearchBudget(solution_limit=-1)


def test_b4_has_no_transversal():
    out = find_plex(build_cyclic(4), 1)
    assert out.status == "ExhaustedNone" and out.witness is None


def test_even_cyclic_has_no_odd_plex_but_has_duplex():
    # B_n with n even has no odd plex at all, so only even k can be found
    b = build_cyclic(12)
    out = find_plex(b, 2)
    assert out.found and is_plex(b, out.witness, 2)
    assert find_plex(build_cyclic(6), 3).status == "ExhaustedNone"


def test_mod4_eight_triplex_no_transversal():
    sq = build_modified_square(Mod4(8))
    out = find_plex(sq, 3)
    assert out.found and is_plex(sq, out.witness, 3)
    assert find_plex(sq, 1).status == "ExhaustedNone"


@pytest.mark.parametrize("n,want", [(1, 1), (2, 0), (3, 3), (4, 0), (5, 15), (7, 133), (9, 2025)])
def test_cyclic_counts(n, want):
    sq = build_cyclic(n)
    assert count_transversals(sq).count == want
    if n <= 5:
        assert brute_transversals(sq) == want
    else:
        assert count_transversals_exact_cover(sq) == want


def test_b8_transversal_free():
    out = count_transversals(build_cyclic(8))
    assert out.status == "ExhaustedNone" and out.count == 0


def test_counts_match_brute_force_on_random_squares():
    rng = random.Random(2)
    for _ in range(30):
        n = rng.randint(1, 6)
        sq = random_latin_square(n, rng)
        want = brute_transversals(sq)
        assert count_transversals(sq).count == want
        assert count_transversals_exact_cover(sq) == want
        assert len(set(iter_transversals(sq))) == want


def test_large_order_fallback():
    # n > 64 takes the plain kernel
    sq = build_cyclic(67)
    out = find_plex(sq, 1)
    assert out.found and is_plex(sq, out.witness, 1)


def test_witness_is_valid_and_modes_agree():
    rng = random.Random(4)
    for _ in range(20):
        sq = random_latin_square(rng.choice((5, 6, 7, 8)), rng)
        counted = count_transversals(sq)
        exists = find_plex(sq, 1)
        assert (counted.count > 0) == exists.found
        if exists.found:
            assert is_plex(sq, exists.witness, 1)
            assert is_plex(sq, counted.witness, 1)


def test_node_budget_never_claims_nonexistence():
    out = count_transversals(build_cyclic(10), SearchBudget(node_limit=50))
    assert out.status == "BudgetExceeded" and out.count is None
    out = find_plex(build_cyclic(10), 3, SearchBudget(node_limit=20))
    assert out.status == "BudgetExceeded"


def test_solution_limit():
    out = count_transversals(build_cyclic(7), SearchBudget(solution_limit=5))
    assert out.count == 5 and out.status == "BudgetExceeded"


def test_parallel_matches_serial():
    for sq in (build_cyclic(9), build_cyclic(10), random_latin_square(9, random.Random(8))):
        for seed in (None, 3):
            budget = SearchBudget(deterministic_seed=seed)
            a = count_transversals(sq, budget, jobs=1)
            b = count_transversals(sq, budget, jobs=3)
            assert a.count == b.count and a.witness == b.witness
    sq = build_cyclic(11)
    a = find_plex(sq, 1, SearchBudget(deterministic_seed=5), jobs=1)
    b = find_plex(sq, 1, SearchBudget(deterministic_seed=5), jobs=4)
    assert a.witness == b.witness


def test_seed_changes_order_not_count():
    sq = build_cyclic(9)
    counts = {count_transversals(sq, SearchBudget(deterministic_seed=s)).count for s in range(4)}
    assert counts == {2025}


def test_count_is_species_invariant():
    rng = random.Random(9)
    for n in (5, 6, 7, 8):
        sq = random_latin_square(n, rng)
        want = count_transversals(sq).count
        assert {count_transversals(c).count for c in conjugates(sq)} == {want}
        for _ in range(50):
            moved = relabel(sq, rng.sample(range(n), n), rng.sample(range(n), n), rng.sample(range(n), n))
            assert count_transversals(moved).count == want


def test_delta_pruning_agrees():
    rng = random.Random(12)
    for _ in range(15):
        sq = random_latin_square(rng.choice((6, 8)), rng)
        for k in (1, 3):
            a = find_plex(sq, k)
            b = find_plex(sq, k, prune_delta=True)
            assert a.status == b.status
            if b.found:
                assert is_plex(sq, b.witness, k)


def test_pruned_search_on_transversal_free_family():
    out = find_plex(build_modified_square(KK2(3, 2)), 1, prune_delta=True)
    assert out.status == "ExhaustedNone"


def test_plex_search_all_k_on_small_squares():
    for sq in enumerate_completions(LatinRectangle(4, [[0, 1, 2, 3]])):
        for k in range(1, 5):
            out = find_plex(sq, k)
            if out.found:
                assert is_plex(sq, out.witness, k)
        assert find_plex(sq, 4).found


def test_search_agrees_with_excluded_certificates():
    squares = [build_modified_square(Mod4(8)), build_modified_square(KK2(3, 2)), build_special_square(10)]
    squares += [build_cyclic(n) for n in (4, 6, 8, 10)]
    for sq in squares:
        if matching_certificate(sq, 1, 1).excluded:
            assert count_transversals(sq).status == "ExhaustedNone"


def test_enumerate_order_three():
    got = list(enumerate_completions(LatinRectangle(3, [])))
    assert len(got) == 12
    assert {s.rows for s in got} == set(brute_latin_squares(3))


def test_enumerate_order_four_matches_brute_force():
    got = [s.rows for s in enumerate_completions(LatinRectangle(4, []))]
    assert len(got) == 576 and set(got) == set(brute_latin_squares(4))
    assert got == sorted(got)


@pytest.mark.parametrize("n,count", [(1, 1), (2, 1), (3, 1), (4, 4), (5, 56), (6, 9408)])
def test_reduced_counts(n, count):
    assert sum(1 for _ in enumerate_reduced(n)) == count


def test_reduced_order_four_brute_force():
    want = {s for s in brute_latin_squares(4) if s[0] == (0, 1, 2, 3) and [r[0] for r in s] == [0, 1, 2, 3]}
    assert {s.rows for s in enumerate_reduced(4)} == want


def test_enumerate_last_row_forced():
    rng = random.Random(1)
    for n in (3, 5, 7):
        sq = random_latin_square(n, rng)
        assert list(enumerate_completions(sq.rectangle(n - 1))) == [sq]


def test_enumerate_b8_prefix():
    rect = build_cyclic(8).rectangle(5)
    first = list(enumerate_completions(rect))
    again = list(enumerate_completions(rect))
    assert len(first) == 264 and first == again
    assert len(set(first)) == 264
    assert all(s.rows[:5] == rect.rows for s in first)


def test_random_completion_extends():
    rng = random.Random(0)
    rect = build_cyclic(12).rectangle(9)
    for _ in range(5):
        sq = random_completion(rect, rng)
        assert sq.rows[:9] == rect.rows


def test_order6_example():
    sq = find_order6_example()
    assert isinstance(sq, LatinSquare) and sq.order == 6
    assert count_transversals(sq).count == 0
    assert brute_transversals(sq) == 0
    out = find_plex(sq, 3)
    assert out.found and is_plex(sq, out.witness, 3)
