from collections import Counter

import pytest

from plexforge.analyze import step_violations
from plexforge.construct import (
    KK2,
    SMALL_ORDERS,
    BadParams,
    BlockNotLatin,
    Mod2of12,
    Mod4,
    Mod10of12,
    SmallOrder,
    StepParams,
    UnsupportedOrder,
    build_cyclic,
    build_J,
    build_modified_square,
    build_plex,
    build_special_square,
    build_special_triplex,
    build_step_type,
    build_trades,
    special_triplex_columns,
    trade_support,
    triplex_variant,
)
from plexforge.core import cyclic_entry, is_plex

B3 = ((0, 1, 2), (1, 2, 0), (2, 0, 1))

KK2_MATRIX = [KK2(k, m) for k in (1, 3, 5, 7) for m in (2, 3, 4)]
MOD4_MATRIX = [Mod4(n) for n in range(8, 33, 4)]
TWELVE_MATRIX = [Mod10of12(5), Mod10of12(6), Mod2of12(6), Mod2of12(7)]
ALL_VARIANTS = KK2_MATRIX + MOD4_MATRIX + TWELVE_MATRIX + [SmallOrder(n) for n in SMALL_ORDERS]


def test_cyclic_small():
    assert build_cyclic(1).rows == ((0,),)
    assert build_cyclic(3).rows == ((0, 1, 2), (1, 2, 0), (2, 0, 1))
    assert build_cyclic(8)[5, 1] == 6


def test_step_type_degenerate_is_cyclic():
    assert build_step_type(StepParams.uniform(2, 1, ((0,),))) == build_cyclic(2)


def test_step_type_order_six():
    sq = build_step_type(StepParams.uniform(2, 3, B3))
    for i in range(6):
        for j in range(6):
            assert (sq[i, j] // 3 - i // 3 - j // 3) % 2 == 0
    assert step_violations(sq, 3, 2) == set()


def test_step_type_rejects_bad_block():
    with pytest.raises(BlockNotLatin):
        build_step_type(StepParams.uniform(2, 3, ((0, 1, 2), (0, 2, 1), (2, 0, 1))))
    with pytest.raises(BadParams):
        StepParams.uniform(3, 3, B3)


def test_kk2_J_contains_displayed_entries():
    J = build_J(KK2(3, 3))
    assert (1, 0, 1) in J and (3, 15, 0) in J


@pytest.mark.parametrize("variant", KK2_MATRIX, ids=repr)
def test_kk2_J_counts(variant):
    k, m, n = variant.k, variant.m, variant.n
    J = build_J(variant)
    assert len(J) == k * n
    assert set(J.cols_count().values()) == {k} and len(J.cols_count()) == n
    assert set(J.syms_count().values()) == {k} and len(J.syms_count()) == n
    rows = J.rows_count()
    assert rows[m] == 2 * k and rows[0] == 0
    assert all(rows[r] == k for r in range(1, n) if r != m)
    assert not is_plex(build_cyclic(n), J, k)


@pytest.mark.parametrize("variant", KK2_MATRIX, ids=repr)
def test_kk2_trade_meets_J(variant):
    k, m, n = variant.k, variant.m, variant.n
    (t,) = build_trades(variant)
    want = {cyclic_entry(n, m, m + 2 * m * j) for j in range(k)}
    assert set(t.removed) & set(build_J(variant)) == want


def test_mod4_J_twelve():
    J = build_J(Mod4(12))
    assert (0, 4, 4) in J and (3, 11, 2) in J and (11, 0, 11) in J
    assert len(J) == 36


@pytest.mark.parametrize("variant", MOD4_MATRIX, ids=repr)
def test_mod4_J_counts(variant):
    n = variant.n
    J = build_J(variant)
    rows = J.rows_count()
    assert rows[n // 4] == 1 and rows[0] == 5
    assert all(rows[r] == 3 for r in range(1, n) if r != n // 4)
    assert set(J.cols_count().values()) == {3} and set(J.syms_count().values()) == {3}


def test_twelve_family_J_counts():
    for v in TWELVE_MATRIX:
        J = build_J(v)
        assert len(J) == 3 * v.n
        assert set(J.cols_count().values()) == {3}
        assert set(J.syms_count().values()) == {3}
    rows = build_J(Mod2of12(6)).rows_count()
    assert rows[2 * 6 + 1] == 4


def test_kk2_trade_size_and_mate():
    (t,) = build_trades(KK2(3, 2))
    assert len(t.removed) == len(t.mate) == 12
    assert (0, 2, 4) in t.mate


def test_mod4_trades_have_eight_entries():
    for n in (8, 12, 24):
        from plexforge.construct import _trades_mod4

        assert [len(t) for t in _trades_mod4(Mod4(n), (0, 1))] == [8, 8]


@pytest.mark.parametrize("variant", TWELVE_MATRIX, ids=repr)
def test_twelve_family_trades_disjoint(variant):
    ts = build_trades(variant)
    assert len(ts) == 3
    for a in range(3):
        for b in range(a + 1, 3):
            assert not set(ts[a].removed) & set(ts[b].removed)


def test_kk2_modified_support():
    sq = build_modified_square(KK2(3, 2))
    assert trade_support(build_cyclic(12), sq) == {(r, c) for r in (0, 2) for c in range(0, 12, 2)}


def test_mod4_eight_support():
    sq = build_modified_square(Mod4(8))
    assert trade_support(build_cyclic(8), sq) == {(r, c) for r in (0, 2) for c in range(1, 8, 2)}


def test_mod10_support_is_trade_cells():
    v = Mod10of12(5)
    cells = {(r, c) for t in build_trades(v) for r, c, _ in t.removed}
    assert trade_support(build_cyclic(v.n), build_modified_square(v)) == cells


@pytest.mark.parametrize("variant", ALL_VARIANTS, ids=repr)
def test_every_variant_yields_plex(variant):
    if isinstance(variant, SmallOrder):
        sq, plex = build_special_square(variant.n), build_special_triplex(variant.n)
    else:
        sq, plex = build_modified_square(variant), build_plex(variant)
    assert is_plex(sq, plex, variant.plex_size)


def test_kk2_plex_relocations():
    plex = build_plex(KK2(3, 2))
    assert {(0, 2, 4), (0, 6, 8), (0, 10, 0)} <= set(plex)
    assert not any(r == 2 and c in (2, 6, 10) for r, c, _ in plex)


def test_mod4_twelve_rows():
    rows = build_plex(Mod4(12)).rows_count()
    assert set(rows.values()) == {3} and rows[0] == rows[3] == 3


def test_special_square_cells():
    sq = build_special_square(10)
    assert sq[7, 0] == 9  # i = n-1-m, j = 0: shifted by +m
    assert sq[9, 2] == 9  # i = n-1, j = m: shifted by -m
    assert sq[7, 2] == 0  # n-1-m <= i <= n-2, j = m: shifted by +1
    assert sq[3, 4] == 7  # untouched


def test_special_square_rejects_orders():
    for n in (8, 12, 6):
        with pytest.raises(UnsupportedOrder):
            build_special_square(n)
    with pytest.raises(UnsupportedOrder):
        SmallOrder(30)


def test_special_triplex_columns():
    cols = special_triplex_columns(10)
    assert sorted(cols[0]) == [0, 4, 5]
    assert sorted(cols[6]) == [6, 7, 9]
    plex = build_special_triplex(14)
    assert len(plex) == 42 and set(Counter(c for _, c, _ in plex).values()) == {3}


def test_variant_parameter_guards():
    for bad in (lambda: KK2(2, 3), lambda: KK2(3, 1), lambda: Mod4(10), lambda: Mod10of12(4), lambda: Mod2of12(5)):
        with pytest.raises(BadParams):
            bad()


def test_triplex_variant_dispatch():
    assert triplex_variant(8) == Mod4(8)
    assert triplex_variant(10) == SmallOrder(10)
    assert triplex_variant(30) == KK2(3, 5)
    assert triplex_variant(58) == Mod10of12(5)
    assert triplex_variant(74) == Mod2of12(6)
    with pytest.raises(UnsupportedOrder):
        triplex_variant(6)
