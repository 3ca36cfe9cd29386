import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plexforge.construct import KK2, Mod4, Mod10of12, Mod2of12, build_cyclic, build_modified_square, build_trades
from plexforge.core import (
    BadDimension,
    ColumnRepeat,
    DuplicateEntry,
    EntrySet,
    InvalidTrade,
    LatinRectangle,
    LatinSquare,
    LatinTrade,
    OrderMismatch,
    ResultNotLatin,
    RowNotPermutation,
    TradeNotContained,
    apply_trade,
    cyclic_entry,
    from_grid,
    is_plex,
    read_entries,
    read_square,
    restrict_delta_nonzero,
    swap_trade,
    write_entries,
    write_square,
)
from plexforge.search import enumerate_completions


def test_from_grid_order_two():
    sq = from_grid(2, [[0, 1], [1, 0]])
    assert sq == build_cyclic(2)


def test_from_grid_rejects_repeated_row_symbol():
    with pytest.raises(RowNotPermutation) as info:
        from_grid(2, [[0, 0], [1, 1]])
    assert info.value.row == 0


def test_from_grid_names_bad_column():
    with pytest.raises(ColumnRepeat) as info:
        from_grid(3, [[0, 1, 2], [0, 2, 1], [2, 0, 1]])
    assert info.value.col == 0


@pytest.mark.parametrize("rows", [[[0, 1]], [[0, 1], [1, 0, 2]], [[0, 1], [1, 5]]])
def test_from_grid_bad_shapes(rows):
    with pytest.raises((BadDimension, RowNotPermutation)):
        from_grid(2, rows)


def test_from_grid_cyclic_twelve():
    b = build_cyclic(12)
    assert from_grid(12, [list(r) for r in b.rows]) == b


def test_whole_square_is_n_plex():
    for sq in enumerate_completions(LatinRectangle(4, [])):
        assert is_plex(sq, sq.entry_set(), 4)


def test_diagonal_of_b5_is_transversal():
    plex = EntrySet(5, [(i, i, 2 * i % 5) for i in range(5)])
    assert is_plex(build_cyclic(5), plex, 1)


def test_is_plex_rejects_foreign_entry_and_order_mismatch():
    b = build_cyclic(5)
    wrong = EntrySet(5, [(0, 0, 1)] + [(i, i, 2 * i % 5) for i in range(1, 5)])
    assert not is_plex(b, wrong, 1)
    with pytest.raises(OrderMismatch):
        is_plex(b, EntrySet(4, []), 1)


def test_is_plex_implies_size():
    b = build_cyclic(3)
    for cells in itertools.combinations(sorted(b.entries()), 3):
        es = EntrySet(3, cells)
        if is_plex(b, es, 1):
            assert len(es) == 3


def test_entry_set_rejects_duplicates():
    with pytest.raises(DuplicateEntry):
        EntrySet(3, [(0, 0, 0), (0, 0, 0)])


def test_cyclic_entry_reduces_mod_n():
    assert cyclic_entry(8, 5, 7) == (5, 7, 4)
    assert cyclic_entry(8, -1, 9) == (7, 1, 0)


def test_apply_trade_order_two():
    b = build_cyclic(2)
    trade = swap_trade(b, 0, 1, [0, 1])
    assert apply_trade(b, trade).rows == ((1, 0), (0, 1))


def test_kk2_trade_on_b12():
    b = build_cyclic(12)
    (trade,) = build_trades(KK2(3, 2))
    out = apply_trade(b, trade)
    assert out[0, 0] == 2 and out[2, 0] == 0


def test_trade_not_contained():
    b = build_cyclic(4)
    trade = LatinTrade(EntrySet(4, [(0, 0, 1), (1, 1, 0)]), EntrySet(4, [(0, 0, 0), (1, 1, 1)]), check=False)
    with pytest.raises(TradeNotContained):
        apply_trade(b, trade)


def test_wrong_mate_symbol():
    b = build_cyclic(12)
    (trade,) = build_trades(KK2(3, 2))
    mate = set(trade.mate)
    bad = next(e for e in sorted(mate) if e[0] == 0)
    mate.remove(bad)
    mate.add((bad[0], bad[1], (bad[2] + 1) % 12))
    with pytest.raises((ResultNotLatin, InvalidTrade)):
        apply_trade(b, LatinTrade(trade.removed, EntrySet(12, mate), check=False))


def test_trade_projection_check():
    with pytest.raises(InvalidTrade):
        LatinTrade(EntrySet(3, [(0, 0, 0)]), EntrySet(3, [(0, 1, 0)]))


def test_restrict_delta_nonzero_cyclic_is_empty():
    for n in (2, 8, 12, 18):
        assert len(restrict_delta_nonzero(build_cyclic(n), 1)) == 0


def test_restrict_delta_nonzero_cyclic_carries():
    # for m > 1 the carry cells of B_n survive: (1, 2, 3) has 1 - 0 - 0 = 1
    es = restrict_delta_nonzero(build_cyclic(12), 3)
    assert (1, 2, 3) in es
    assert all((r % 3) + (c % 3) >= 3 for r, c, _ in es)


def test_restrict_delta_nonzero_first_display():
    from plexforge.suite import B8_DISPLAYS
    from plexforge.species import delta_signature

    comps = list(enumerate_completions(build_cyclic(8).rectangle(5)))
    sq = next(c for c in comps if delta_signature(c, (5, 6, 7)) == B8_DISPLAYS[0])
    es = restrict_delta_nonzero(sq, 1)
    assert len(es) == 8
    assert {e[0] for e in es} == {5, 7}


def test_restrict_delta_nonzero_kk2():
    es = restrict_delta_nonzero(build_modified_square(KK2(3, 2)), 1)
    assert len(es) == 12
    assert {e[0] for e in es} == {0, 2}


TRADE_VARIANTS = [KK2(3, 2), KK2(5, 3), KK2(7, 4), Mod4(8), Mod4(20), Mod4(32), Mod10of12(5), Mod2of12(7)]


@pytest.mark.parametrize("variant", TRADE_VARIANTS, ids=repr)
def test_constructed_trades_are_involutions(variant):
    n = variant.n
    square = build_cyclic(n)
    for t in build_trades(variant):
        assert len(t.removed) == len(t.mate)
        for axes in ((0, 1), (0, 2), (1, 2)):
            assert t.removed.projection(axes) == t.mate.projection(axes)
        if t.removed.entries <= square.entries():
            out = apply_trade(square, t)
            assert apply_trade(out, t.inverse()) == square


def test_square_text_roundtrip(tmp_path):
    sq = build_modified_square(Mod4(12))
    path = tmp_path / "sq.txt"
    write_square(sq, path)
    raw = path.read_bytes()
    assert raw.endswith(b"\n") and b"\r" not in raw and b" \n" not in raw
    assert raw.split(b"\n")[0] == b"12"
    again = read_square(path)
    assert again == sq
    write_square(again, path)
    assert path.read_bytes() == raw


def test_entry_text_roundtrip(tmp_path):
    es = EntrySet(5, [(i, i, 2 * i % 5) for i in range(5)])
    path = tmp_path / "e.txt"
    write_entries(es, path)
    text = path.read_text()
    assert text.splitlines()[0] == "n=5"
    assert read_entries(path) == es


def test_digest_is_sha256_of_text():
    import hashlib

    sq = build_cyclic(6)
    assert sq.digest() == hashlib.sha256(sq.to_text().encode()).hexdigest()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.data())
def test_relabelled_cyclic_stays_latin(n, data):
    rp = data.draw(st.permutations(range(n)))
    cp = data.draw(st.permutations(range(n)))
    sp = data.draw(st.permutations(range(n)))
    rows = [[0] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            rows[rp[r]][cp[c]] = sp[(r + c) % n]
    sq = LatinSquare(n, rows)
    assert LatinSquare.from_text(sq.to_text()) == sq
