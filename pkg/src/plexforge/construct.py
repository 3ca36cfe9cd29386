"""Explicit squares, near-plexes, trades and plexes.

All constructions start from the cyclic square B_n. Index arithmetic is
reduced mod n, and ``(x;y)`` below denotes the cyclic entry
``(x, y, x + y mod n)``.

Families:

* ``KK2(k, m)``: order 2km, has a k-plex and no smaller odd plex.
* ``Mod4(n)``: 4 | n, triplex but no transversal.
* ``Mod10of12(m)``: n = 12m - 2, m >= 5.
* ``Mod2of12(m)``: n = 12m + 2, m >= 6.
* ``SmallOrder(n)``: the special square L_n for ten small orders.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    BadParams,
    EntrySet,
    LatinError,
    LatinSquare,
    LatinTrade,
    apply_trade,
    cyclic_entry,
    is_plex,
    swap_trade,
)


class BlockNotLatin(LatinError):
    pass


class MateMismatch(LatinError):
    pass


class PlexAssertionFailed(LatinError):
    pass


class UnsupportedOrder(LatinError):
    pass


SMALL_ORDERS = (10, 14, 18, 22, 26, 34, 38, 46, 50, 62)


def build_cyclic(n: int) -> LatinSquare:
    return LatinSquare(n, [[(i + j) % n for j in range(n)] for i in range(n)])


# ------------------------------------------------------------ step type


@dataclass(frozen=True)
class StepParams:
    b: int
    m: int
    blocks: tuple = field(repr=False)

    def __post_init__(self):
        if self.b < 2 or self.b % 2 or self.m < 1 or self.m % 2 == 0:
            raise BadParams(f"step type needs even b and odd m, got b={self.b}, m={self.m}")
        if len(self.blocks) != self.b or any(len(row) != self.b for row in self.blocks):
            raise BadParams(f"need a {self.b} x {self.b} grid of blocks")

    @classmethod
    def uniform(cls, b: int, m: int, block: Sequence[Sequence[int]]) -> "StepParams":
        return cls(b, m, tuple(tuple(block for _ in range(b)) for _ in range(b)))


def build_step_type(params: StepParams) -> LatinSquare:
    """Patch b^2 order-m latin squares into a step-type square of order bm."""
    b, m = params.b, params.m
    for a in range(b):
        for g in range(b):
            try:
                LatinSquare(m, params.blocks[a][g])
            except LatinError as exc:
                raise BlockNotLatin(f"block ({a}, {g}): {exc}") from None
    n = b * m
    grid = [[0] * n for _ in range(n)]
    for i in range(n):
        a, x = divmod(i, m)
        for j in range(n):
            g, y = divmod(j, m)
            grid[i][j] = ((a + g) % b) * m + params.blocks[a][g][x][y]
    return LatinSquare(n, grid)


# ------------------------------------------------------------- variants


@dataclass(frozen=True)
class KK2:
    k: int
    m: int

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0 or self.m < 2:
            raise BadParams(f"KK2 needs odd k >= 1 and m >= 2, got k={self.k}, m={self.m}")

    @property
    def n(self) -> int:
        return 2 * self.k * self.m

    plex_size = property(lambda self: self.k)


@dataclass(frozen=True)
class Mod4:
    n: int

    def __post_init__(self):
        if self.n < 8 or self.n % 4:
            raise BadParams(f"Mod4 needs 4 | n and n >= 8, got n={self.n}")

    plex_size = 3


@dataclass(frozen=True)
class Mod10of12:
    m: int

    def __post_init__(self):
        if self.m < 5:
            raise BadParams(f"Mod10of12 needs m >= 5, got m={self.m}")

    @property
    def n(self) -> int:
        return 12 * self.m - 2

    plex_size = 3


@dataclass(frozen=True)
class Mod2of12:
    m: int

    def __post_init__(self):
        if self.m < 6:
            raise BadParams(f"Mod2of12 needs m >= 6, got m={self.m}")

    @property
    def n(self) -> int:
        return 12 * self.m + 2

    plex_size = 3


@dataclass(frozen=True)
class SmallOrder:
    n: int

    def __post_init__(self):
        if self.n not in SMALL_ORDERS:
            raise UnsupportedOrder(f"no special square of order {self.n}; choose from {SMALL_ORDERS}")

    plex_size = 3


def triplex_variant(n: int):
    """Pick the family that supplies a triplex-but-no-transversal square of order n.

    The n = 6 case comes from search (``search.find_order6_example``), and
    n = 6m with odd m >= 5 from ``KK2(3, m)``.
    """
    if n % 2 or n <= 4:
        raise BadParams(f"need even n > 4, got {n}")
    if n % 4 == 0:
        return Mod4(n)
    if n in SMALL_ORDERS:
        return SmallOrder(n)
    if n % 12 == 6:
        if n == 6:
            raise UnsupportedOrder("order 6 is found by search, not construction")
        return KK2(3, n // 6)
    if n % 12 == 10:
        return Mod10of12((n + 2) // 12)
    return Mod2of12((n - 2) // 12)


def _set(n: int, cells) -> EntrySet:
    return EntrySet(n, [cyclic_entry(n, x, y) for x, y in cells])


# ------------------------------------------------------------------ J sets


def _j_kk2(v: KK2) -> EntrySet:
    k, m, n = v.k, v.m, v.n
    cells = []
    cells += [(i, 2 * j * m + i - 1) for i in range(1, m + 1) for j in range(k)]
    cells += [(i, 2 * j * m + i) for i in range(m, 2 * m) for j in range(k)]
    for ell in range(1, (k - 1) // 2 + 1):
        for i in range(2 * m):
            for j in range(k):
                cells.append((2 * m * (2 * ell - 1) + i, 2 * j * m + i))
                cells.append((4 * m * ell + i, 2 * j * m + i + 1))
    return _set(n, cells)


def _j_mod4(v: Mod4) -> EntrySet:
    n = v.n
    q = n // 4
    cells = [(0, c) for c in range(5)]
    cells += [(i, 3 * i + d) for i in range(1, q) for d in (2, 3, 4)]
    cells.append((q, 3 * q + 2))
    cells += [(i, 3 * i + d) for i in range(q + 1, n // 2) for d in (0, 1, 2)]
    cells += [(i, y) for i in range(n // 2, n) for y in (i - n // 2 + 1, i, i + 1)]
    return _set(n, cells)


def _j_mod10(v: Mod10of12) -> EntrySet:
    m, n = v.m, v.n
    cells = [(i, 3 * i + d) for i in range(1, 2 * m) for d in (-2, -1, 0)]
    cells += [(2 * m - 1, 6 * m + 1), (2 * m, 6 * m - 2), (2 * m, 6 * m - 1)]
    cells += [(i, 3 * i + d) for i in range(2 * m, n // 2) for d in (2, 3, 4)]
    cells += [(i, y) for i in range(n // 2, n) for y in (i - n // 2, i, i + 1)]
    return _set(n, cells)


def _j_mod2(v: Mod2of12) -> EntrySet:
    m, n = v.m, v.n
    cells = [(i, 3 * i + d) for i in range(1, 2 * m + 1) for d in (-2, -1, 0)]
    cells += [(2 * m, 6 * m + 3), (2 * m, 6 * m + 4), (2 * m + 1, 6 * m + 1)]
    cells += [(i, 3 * i + d) for i in range(2 * m + 1, n // 2) for d in (2, 3, 4)]
    cells += [(i, y) for i in range(n // 2, n) for y in (i - n // 2, i, i + 1)]
    return _set(n, cells)


def build_J(variant) -> EntrySet:
    """The near-plex J inside B_n for a KK2, Mod4, Mod10of12 or Mod2of12 variant."""
    if isinstance(variant, KK2):
        return _j_kk2(variant)
    if isinstance(variant, Mod4):
        return _j_mod4(variant)
    if isinstance(variant, Mod10of12):
        return _j_mod10(variant)
    if isinstance(variant, Mod2of12):
        return _j_mod2(variant)
    raise BadParams(f"no J set for {variant!r}")


# ------------------------------------------------------------------ trades


def _trade(n: int, removed_cells, mate_triples) -> LatinTrade:
    removed = _set(n, removed_cells)
    mate = EntrySet(n, [(r % n, c % n, s % n) for r, c, s in mate_triples])
    try:
        return LatinTrade(removed, mate)
    except LatinError as exc:
        raise MateMismatch(str(exc)) from None


def _trades_kk2(v: KK2) -> list[LatinTrade]:
    n, m = v.n, v.m
    return [swap_trade(build_cyclic(n), 0, m, [j * m for j in range(2 * v.k)])]


def _trades_mod4(v: Mod4, which: Sequence[int]) -> list[LatinTrade]:
    n = v.n
    q = n // 4
    b = build_cyclic(n)
    return [swap_trade(b, 0, q, [c for c in range(n) if c % q == i]) for i in which]


def _mod4_choice(n: int) -> tuple[int, ...]:
    if n == 8:
        return (1,)
    if n in (12, 16):
        return (0,)
    return (0, 1)


def _trades_mod10(v: Mod10of12) -> list[LatinTrade]:
    m, n = v.m, v.n
    t0 = [(i, 2 * j * m + d) for j in range(1, 5) for i in range(2 * m) for d in (0, 1)]
    t0 += [(0, 1), (2 * m - 1, 1), (0, 10 * m), (2 * m - 1, 10 * m)]
    t0m = []
    for j in range(1, 5):
        for i in range(1, 2 * m - 1):
            t0m += [(i, 2 * j * m, i + 2 * j * m + 1), (i, 2 * j * m + 1, i + 2 * j * m)]
        t0m += [
            (0, 2 * j * m, 2 * j * m + 1),
            (0, 2 * j * m + 1, 2 * (j + 1) * m),
            (2 * m - 1, 2 * j * m, 2 * j * m),
            (2 * m - 1, 2 * j * m + 1, 2 * (j + 1) * m - 1),
        ]
    t0m += [(0, 1, 2 * m), (2 * m - 1, 1, 1), (0, 10 * m, 1), (2 * m - 1, 10 * m, 10 * m)]

    t1 = []
    for j in range(1, 5):
        t1 += [(0, 2 * j * m - 2), (2 * m, 2 * j * m - 2)]
    t1 += [(0, 10 * m - 2), (2 * m, 12 * m - 4)]
    for i in range(m):
        t1 += [(2 * i, 12 * m - 4 - 2 * i), (2 * i + 2, 12 * m - 4 - 2 * i)]
    t1m = []
    for j in range(1, 5):
        t1m += [(0, 2 * j * m - 2, 2 * (j + 1) * m - 2), (2 * m, 2 * j * m - 2, 2 * j * m - 2)]
    t1m += [(0, 10 * m - 2, 12 * m - 4), (0, 12 * m - 4, 2 * m - 2)]
    t1m += [(2 * m, 10 * m - 2, 10 * m - 2), (2 * m, 12 * m - 4, 0)]
    for i in range(1, m):
        t1m += [(2 * i, 12 * m - 4 - 2 * i, 0), (2 * i, 12 * m - 2 - 2 * i, 12 * m - 4)]

    T0 = _trade(n, t0, t0m)
    T1 = _trade(n, t1, t1m)
    return [T0, T1, T1.shifted(5, 5)]


def _trades_mod2(v: Mod2of12) -> list[LatinTrade]:
    m, n = v.m, v.n
    t0 = []
    for j in range(3, 7):
        t0 += [(0, 2 * j * m - 2), (2 * m, 2 * j * m - 2)]
    t0 += [(i, y) for i in range(2 * m + 1) for y in (2 * m - 4, 2 * m - 3, 4 * m - 3, 4 * m - 2)]
    t0m = []
    for j in range(3, 7):
        t0m += [(0, 2 * j * m - 2, 2 * (j + 1) * m - 2), (2 * m, 2 * j * m - 2, 2 * j * m - 2)]
    t0m += [(0, 2 * m - 4, 2 * m - 3), (0, 2 * m - 3, 4 * m - 3), (2 * m, 2 * m - 4, 2 * m - 4)]
    t0m += [(2 * m, 2 * m - 3, 4 * m - 4), (0, 4 * m - 3, 4 * m - 2), (0, 4 * m - 2, 6 * m - 2)]
    t0m += [(2 * m, 4 * m - 3, 4 * m - 3), (2 * m, 4 * m - 2, 6 * m - 3)]
    for i in range(1, 2 * m):
        t0m += [
            (i, 2 * m - 4, 2 * m + i - 3),
            (i, 2 * m - 3, 2 * m + i - 4),
            (i, 4 * m - 3, 4 * m + i - 2),
            (i, 4 * m - 2, 4 * m + i - 3),
        ]

    w = 2 * m + 1
    t1 = []
    for j in range(5):
        t1 += [(0, w * j - 2), (w, w * j - 2)]
    t1 += [(0, 10 * m + 1), (1, 10 * m), (1, 10 * m + 1), (2, 10 * m), (2, 10 * m + 1)]
    t1 += [(w, 10 * m + 1), (1, 12 * m - 1), (1, 12 * m), (2, 12 * m - 1), (2, 12 * m)]
    for i in range(m - 1):
        r = 2 * i + 3
        t1 += [(r, 10 * m - 2 * i - 2), (r, 10 * m - 2 * i), (r, 12 * m - 2 * i - 3), (r, 12 * m - 2 * i - 1)]
    t1m = []
    for j in range(1, 4):
        t1m += [(0, w * j - 2, w * (j + 1) - 2), (w, w * j - 2, w * j - 2)]
    t1m += [(0, 12 * m, 2 * m - 1), (w, 12 * m, 0), (0, 8 * m + 2, 10 * m + 1)]
    t1m += [(w, 8 * m + 2, 8 * m + 2), (0, 10 * m + 1, 12 * m), (1, 10 * m, 10 * m + 2)]
    t1m += [(1, 10 * m + 1, 10 * m + 1), (2, 10 * m, 10 * m + 3), (2, 10 * m + 1, 10 * m + 2)]
    t1m += [(w, 10 * m + 1, 10 * m + 3), (1, 12 * m - 1, 12 * m + 1), (1, 12 * m, 12 * m)]
    t1m += [(2, 12 * m - 1, 0), (2, 12 * m, 12 * m + 1)]
    for i in range(m - 1):
        r = 2 * i + 3
        t1m += [
            (r, 10 * m - 2 * i - 2, 10 * m + 3),
            (r, 10 * m - 2 * i, 10 * m + 1),
            (r, 12 * m - 2 * i - 3, 0),
            (r, 12 * m - 2 * i - 1, 12 * m),
        ]

    T0 = _trade(n, t0, t0m)
    T1 = _trade(n, t1, t1m)
    return [T0, T1, T0.shifted(6, 6)]


def build_trades(variant) -> list[LatinTrade]:
    """Pairwise disjoint trades in B_n used by ``variant``."""
    if isinstance(variant, KK2):
        trades = _trades_kk2(variant)
    elif isinstance(variant, Mod4):
        trades = _trades_mod4(variant, _mod4_choice(variant.n))
    elif isinstance(variant, Mod10of12):
        trades = _trades_mod10(variant)
    elif isinstance(variant, Mod2of12):
        trades = _trades_mod2(variant)
    else:
        raise BadParams(f"no trades for {variant!r}")
    for a in range(len(trades)):
        for b in range(a + 1, len(trades)):
            if trades[a].removed.entries & trades[b].removed.entries:
                raise MateMismatch(f"trades {a} and {b} overlap")
    return trades


def mod4_square(n: int, which: Sequence[int]) -> LatinSquare:
    """L_1 (which=(0,)), L_2 (which=(1,)) or L_3 (which=(0, 1)) of the Mod4 family."""
    sq = build_cyclic(n)
    for t in _trades_mod4(Mod4(n), which):
        sq = apply_trade(sq, t)
    return sq


# -------------------------------------------------------- special squares


def build_special_square(n: int) -> LatinSquare:
    """The order n = 4m + 2 square L_n: B_n with a few cells shifted."""
    if n < 10 or n % 4 != 2:
        raise UnsupportedOrder(f"special square needs n = 2 (mod 4), n >= 10; got {n}")
    m = (n - 2) // 4
    grid = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if n - 1 - m <= i <= n - 2 and j in (m, 3 * m + 1):
                d = 1
            elif n - m <= i < n and j in (m + 1, 3 * m + 2):
                d = -1
            elif i == n - 1 - m and j in (0, m + 1, 2 * m + 1, 3 * m + 2):
                d = m
            elif i == n - 1 and j in (0, m, 2 * m + 1, 3 * m + 1):
                d = -m
            else:
                d = 0
            grid[i][j] = (i + j + d) % n
    return LatinSquare(n, grid)


# Column triples for the final rows of the special triplex, one per row.
E_TABLES = {
    10: [[6, 7, 9], [0, 5, 8], [1, 2, 3], [3, 4, 9]],
    14: [[6, 10, 11], [0, 4, 13], [7, 8, 13], [3, 5, 9], [1, 2, 12]],
    18: [[1, 13, 14], [0, 5, 10], [11, 15, 16], [6, 9, 12], [4, 7, 17], [2, 3, 17]],
    22: [[17, 18, 21], [14, 15, 16], [12, 20, 21], [0, 8, 9], [1, 7, 9], [4, 6, 10], [2, 3, 13], [5, 11, 19]],
    26: [
        [19, 20, 25], [13, 16, 21], [14, 18, 22], [9, 15, 23], [2, 11, 17], [8, 24, 25],
        [1, 10, 12], [3, 4, 5], [0, 6, 7],
    ],
    34: [
        [2, 25, 26], [27, 28, 32], [23, 29, 33], [20, 21, 24], [13, 17, 19], [12, 14, 15],
        [10, 15, 16], [3, 6, 11], [1, 7, 33], [18, 30, 31], [4, 5, 22], [0, 8, 9],
    ],
    38: [
        [18, 19, 20], [21, 23, 25], [26, 28, 29], [0, 10, 27], [30, 31, 32], [33, 34, 35],
        [2, 36, 37], [3, 22, 37], [1, 6, 24], [4, 7, 14], [8, 9, 11], [15, 16, 17], [5, 12, 13],
    ],
    46: [
        [1, 34, 35], [36, 37, 38], [31, 33, 39], [29, 40, 42], [26, 27, 45], [19, 20, 28],
        [21, 23, 25], [16, 18, 21], [13, 14, 43], [2, 3, 4], [17, 44, 45], [5, 6, 8], [9, 30, 41],
        [7, 10, 24], [15, 22, 32], [0, 11, 12],
    ],
    50: [
        [2, 37, 38], [39, 40, 49], [32, 36, 44], [33, 41, 42], [30, 31, 35], [25, 27, 43],
        [23, 24, 47], [20, 21, 29], [16, 17, 48], [3, 22, 49], [1, 4, 5], [7, 15, 46], [8, 10, 14],
        [6, 11, 19], [9, 26, 28], [18, 34, 45], [0, 12, 13],
    ],
    62: [
        [30, 31, 32], [1, 46, 47], [48, 49, 50], [39, 40, 42], [51, 52, 54], [41, 45, 55], [43, 53, 56],
        [35, 37, 59], [33, 38, 60], [3, 5, 61], [6, 34, 61], [7, 27, 28], [24, 25, 26], [4, 9, 21],
        [10, 12, 58], [17, 18, 19], [13, 14, 20], [8, 11, 23], [22, 36, 57], [2, 29, 44], [0, 15, 16],
    ],
}


def special_triplex_columns(n: int) -> list[list[int]]:
    """Column indices chosen in each row of the special square's triplex."""
    if n not in SMALL_ORDERS:
        raise UnsupportedOrder(f"no special triplex of order {n}; choose from {SMALL_ORDERS}")
    h = n // 2
    cols = [[i, (i + h - 1) % n, (i + h) % n] for i in range(h)]
    cols += [[3 * (i - h), 3 * (i - h) + 1, 3 * (i - h) + 2] for i in range(h, h + n // 6)]
    cols += E_TABLES[n]
    assert len(cols) == n
    return cols


def build_special_triplex(n: int) -> EntrySet:
    sq = build_special_square(n)
    cols = special_triplex_columns(n)
    plex = EntrySet(n, [(i, c, sq[i, c]) for i, row in enumerate(cols) for c in row])
    if not is_plex(sq, plex, 3):
        raise PlexAssertionFailed(f"special triplex of order {n} is not a 3-plex")
    return plex


# --------------------------------------------------------- modified squares


def build_modified_square(variant) -> LatinSquare:
    if isinstance(variant, SmallOrder):
        return build_special_square(variant.n)
    sq = build_cyclic(variant.n)
    for t in build_trades(variant):
        sq = apply_trade(sq, t)
    return sq


def _relocate_rows(plex: set, trades: list[LatinTrade], n: int) -> set:
    """Swap every J entry lying in a trade for the mate entry with the same (col, sym)."""
    by_cs = {}
    for t in trades:
        for r, c, s in t.mate.entries:
            by_cs[(c, s)] = (r, c, s)
    removed = set().union(*(t.removed.entries for t in trades))
    out = set()
    for e in plex:
        if e in removed:
            out.add(by_cs[(e[1], e[2])])
        else:
            out.add(e)
    return out


def _adjust_listed(plex: set, square: LatinSquare, rowshift, cellswap) -> set:
    """Apply the explicit replacement lists of the 2 (mod 4) families.

    ``rowshift`` lists (row, col) cells of J moved to row 0 with the same
    (col, sym); ``cellswap`` lists (x, col) pairs: the J entry ``(ceil(x/3); x)``
    is replaced by the square's entry at cell ``(ceil(x/3), col)``.
    """
    n = square.order
    out = set(plex)
    for r, c in rowshift:
        e = cyclic_entry(n, r, c)
        out.remove(e)
        out.add((0, e[1], e[2]))
    olds = []
    news = []
    for x, col in cellswap:
        row = -(-x // 3)
        olds.append(cyclic_entry(n, row, x))
        news.append((row, col % n, square[row, col % n]))
    for e in olds:
        out.remove(e)
    out.update(news)
    return out


def build_plex(variant) -> EntrySet:
    """A plex of ``build_modified_square(variant)`` of size ``variant.plex_size``."""
    if isinstance(variant, SmallOrder):
        return build_special_triplex(variant.n)
    n = variant.n
    square = build_modified_square(variant)
    J = set(build_J(variant).entries)
    if isinstance(variant, (KK2, Mod4)):
        plex = _relocate_rows(J, build_trades(variant), n)
    elif isinstance(variant, Mod10of12):
        m = variant.m
        plex = _adjust_listed(
            J,
            square,
            rowshift=[(2 * m, 6 * m - 2), (2 * m, 6 * m + 3), (2 * m - 1, 6 * m + 1)],
            cellswap=[(2 * m, 2 * m + 1), (2 * m + 1, 2 * m), (4 * m, 4 * m + 1), (4 * m + 1, 4 * m)],
        )
    elif isinstance(variant, Mod2of12):
        m = variant.m
        pairs = [(2 * m - 4, 2 * m - 3), (2 * m + 2, 2 * m + 3), (4 * m - 3, 4 * m - 2), (4 * m + 3, 4 * m + 4)]
        swaps = [(a, b) for a, b in pairs] + [(b, a) for a, b in pairs]
        plex = _adjust_listed(
            J,
            square,
            rowshift=[(2 * m, 6 * m - 2), (2 * m, 6 * m + 4), (2 * m + 1, 6 * m + 1)],
            cellswap=swaps,
        )
    else:
        raise BadParams(f"no plex for {variant!r}")
    result = EntrySet(n, plex)
    if not is_plex(square, result, variant.plex_size):
        raise PlexAssertionFailed(f"adjusted J is not a {variant.plex_size}-plex for {variant!r}")
    return result


def trade_support(square: LatinSquare, other: LatinSquare) -> set[tuple[int, int]]:
    """Cells where two squares of the same order differ."""
    return {
        (i, j)
        for i in range(square.order)
        for j in range(square.order)
        if square[i, j] != other[i, j]
    }
