"""Latin squares, rectangles, entry sets and latin trades.

Squares are immutable once validated. Every modification goes through
:func:`apply_trade`, which re-validates the result.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_ORDER = 256

Entry = tuple[int, int, int]


class LatinError(ValueError):
    """Base class for every data-model error raised by plexforge."""


class BadDimension(LatinError):
    pass


class RowNotPermutation(LatinError):
    def __init__(self, row: int, detail: str = ""):
        self.row = row
        super().__init__(f"row {row} is not a permutation of N_n{detail}")


class ColumnRepeat(LatinError):
    def __init__(self, col: int, symbol: int | None = None):
        self.col = col
        self.symbol = symbol
        extra = f" (symbol {symbol})" if symbol is not None else ""
        super().__init__(f"column {col} repeats a symbol{extra}")


class OrderMismatch(LatinError):
    pass


class DuplicateEntry(LatinError):
    pass


class InvalidTrade(LatinError):
    pass


class TradeNotContained(LatinError):
    pass


class ResultNotLatin(LatinError):
    pass


class BadDivisor(LatinError):
    pass


class BadParams(LatinError):
    pass


def _check_order(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1 or n > MAX_ORDER:
        raise BadDimension(f"order must be an integer in [1, {MAX_ORDER}], got {n!r}")


def _validate_rows(n: int, rows: Sequence[Sequence[int]], full: bool) -> tuple[tuple[int, ...], ...]:
    _check_order(n)
    if full and len(rows) != n:
        raise BadDimension(f"expected {n} rows, got {len(rows)}")
    if len(rows) > n:
        raise BadDimension(f"a rectangle of order {n} has at most {n} rows, got {len(rows)}")
    target = set(range(n))
    out = []
    for i, row in enumerate(rows):
        row = tuple(int(x) for x in row)
        if len(row) != n:
            raise BadDimension(f"row {i} has length {len(row)}, expected {n}")
        if set(row) != target:
            raise RowNotPermutation(i)
        out.append(row)
    for j in range(n):
        seen = set()
        for row in out:
            s = row[j]
            if s in seen:
                raise ColumnRepeat(j, s)
            seen.add(s)
    return tuple(out)


class LatinRectangle:
    """A k x n latin rectangle over the symbols 0..n-1."""

    __slots__ = ("order", "rows")

    def __init__(self, order: int, rows: Sequence[Sequence[int]]):
        self.order = int(order)
        self.rows = _validate_rows(self.order, rows, full=False)

    @property
    def height(self) -> int:
        return len(self.rows)

    def __eq__(self, other):
        return isinstance(other, LatinRectangle) and (self.order, self.rows) == (other.order, other.rows)

    def __hash__(self):
        return hash((self.order, self.rows))

    def __repr__(self):
        return f"LatinRectangle(order={self.order}, height={self.height})"

    def to_text(self) -> str:
        return _grid_text(self.order, self.rows)

    @classmethod
    def from_text(cls, text: str) -> "LatinRectangle":
        n, rows = _parse_grid_text(text)
        return cls(n, rows)


class LatinSquare:
    """An order-n latin square, stored row-major as a tuple of tuples.

    ``square[r, c]`` gives the symbol in cell (r, c); ``square.entries()``
    gives the square as a set of (row, col, symbol) triples.
    """

    __slots__ = ("order", "rows", "_entries", "_array")

    def __init__(self, order: int, rows: Sequence[Sequence[int]]):
        self.order = int(order)
        self.rows = _validate_rows(self.order, rows, full=True)
        self._entries = None
        self._array = None

    @classmethod
    def from_entries(cls, order: int, entries: Iterable[Entry]) -> "LatinSquare":
        grid = [[-1] * order for _ in range(order)]
        count = 0
        for r, c, s in entries:
            if grid[r][c] != -1:
                raise ResultNotLatin(f"cell ({r}, {c}) is filled twice")
            grid[r][c] = s
            count += 1
        if count != order * order:
            raise ResultNotLatin(f"{count} entries given, a square of order {order} needs {order * order}")
        return cls(order, grid)

    def __getitem__(self, cell: tuple[int, int]) -> int:
        r, c = cell
        return self.rows[r][c]

    def __eq__(self, other):
        return isinstance(other, LatinSquare) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"LatinSquare(order={self.order}, digest={self.digest()[:12]})"

    @property
    def array(self) -> np.ndarray:
        """Read-only ``uint8``/``uint16`` numpy view of the grid."""
        if self._array is None:
            dtype = np.uint8 if self.order <= 256 else np.uint16
            arr = np.array(self.rows, dtype=dtype)
            arr.setflags(write=False)
            self._array = arr
        return self._array

    def entries(self) -> frozenset[Entry]:
        if self._entries is None:
            self._entries = frozenset(
                (r, c, s) for r, row in enumerate(self.rows) for c, s in enumerate(row)
            )
        return self._entries

    def entry_set(self) -> "EntrySet":
        return EntrySet(self.order, self.entries())

    def column_of(self, row: int, symbol: int) -> int:
        return self.rows[row].index(symbol)

    def rectangle(self, k: int) -> LatinRectangle:
        """The first ``k`` rows as a latin rectangle."""
        return LatinRectangle(self.order, self.rows[:k])

    def to_text(self) -> str:
        return _grid_text(self.order, self.rows)

    @classmethod
    def from_text(cls, text: str) -> "LatinSquare":
        n, rows = _parse_grid_text(text)
        return cls(n, rows)

    def digest(self) -> str:
        """SHA-256 hex digest of the canonical text form."""
        return hashlib.sha256(self.to_text().encode("ascii")).hexdigest()


def from_grid(order: int, rows: Sequence[Sequence[int]]) -> LatinSquare:
    return LatinSquare(order, rows)


def _grid_text(n: int, rows) -> str:
    lines = [str(n)]
    lines.extend(" ".join(str(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def _parse_grid_text(text: str) -> tuple[int, list[list[int]]]:
    lines = [ln for ln in text.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise BadDimension("empty square text")
    try:
        n = int(lines[0].strip())
        rows = [[int(tok) for tok in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise BadDimension(f"malformed square text: {exc}") from None
    return n, rows


def cyclic_entry(n: int, x: int, y: int) -> Entry:
    """The entry written ``(x;y)``: row x, column y, symbol x+y, all mod n."""
    return (x % n, y % n, (x + y) % n)


class EntrySet:
    """A set of (row, col, symbol) triples inside an order-n square.

    Construction rejects duplicates rather than silently merging them.
    """

    __slots__ = ("order", "entries")

    def __init__(self, order: int, entries: Iterable[Entry]):
        _check_order(order)
        self.order = int(order)
        items = [tuple(int(v) for v in e) for e in entries]
        for e in items:
            if len(e) != 3 or not all(0 <= v < order for v in e):
                raise BadDimension(f"entry {e} is not in N_{order}^3")
        uniq = frozenset(items)
        if len(uniq) != len(items):
            dup = [e for e, k in Counter(items).items() if k > 1]
            raise DuplicateEntry(f"duplicate entries: {sorted(dup)[:5]}")
        self.entries = uniq

    def __len__(self):
        return len(self.entries)

    def __iter__(self) -> Iterator[Entry]:
        return iter(sorted(self.entries))

    def __contains__(self, e):
        return tuple(e) in self.entries

    def __eq__(self, other):
        return isinstance(other, EntrySet) and self.order == other.order and self.entries == other.entries

    def __hash__(self):
        return hash((self.order, self.entries))

    def __repr__(self):
        return f"EntrySet(order={self.order}, size={len(self)})"

    def union(self, other: "EntrySet") -> "EntrySet":
        if other.order != self.order:
            raise OrderMismatch(f"orders {self.order} and {other.order} differ")
        return EntrySet(self.order, list(self.entries) + list(other.entries))

    def rows_count(self) -> Counter:
        return Counter(e[0] for e in self.entries)

    def cols_count(self) -> Counter:
        return Counter(e[1] for e in self.entries)

    def syms_count(self) -> Counter:
        return Counter(e[2] for e in self.entries)

    def projection(self, axes: tuple[int, int]) -> frozenset[tuple[int, int]]:
        a, b = axes
        return frozenset((e[a], e[b]) for e in self.entries)

    def to_text(self) -> str:
        lines = [f"n={self.order}"]
        lines.extend(f"{r} {c} {s}" for r, c, s in self)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "EntrySet":
        lines = text.split("\n")
        while lines and lines[-1] == "":
            lines.pop()
        if not lines or not lines[0].startswith("n="):
            raise BadDimension("entry-set text must start with 'n=<order>'")
        try:
            n = int(lines[0][2:])
            entries = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
        except ValueError as exc:
            raise BadDimension(f"malformed entry-set text: {exc}") from None
        return cls(n, entries)


PROJECTIONS = ((0, 1), (0, 2), (1, 2))


class LatinTrade:
    """A latin trade: ``removed`` (T) may be swapped for its disjoint mate (T')."""

    __slots__ = ("removed", "mate")

    def __init__(self, removed: EntrySet, mate: EntrySet, check: bool = True):
        if removed.order != mate.order:
            raise OrderMismatch("trade halves have different orders")
        self.removed = removed
        self.mate = mate
        if check:
            self.validate()

    def validate(self) -> None:
        common = self.removed.entries & self.mate.entries
        if common:
            raise InvalidTrade(f"trade halves share entries: {sorted(common)[:5]}")
        if len(self.removed) != len(self.mate):
            raise InvalidTrade(f"|T| = {len(self.removed)} but |T'| = {len(self.mate)}")
        for axes in PROJECTIONS:
            if self.removed.projection(axes) != self.mate.projection(axes):
                raise InvalidTrade(f"projection onto coordinates {axes} differs")
            if len(self.removed.projection(axes)) != len(self.removed):
                raise InvalidTrade(f"projection onto coordinates {axes} is not injective")

    @property
    def order(self) -> int:
        return self.removed.order

    def __len__(self):
        return len(self.removed)

    def __repr__(self):
        return f"LatinTrade(order={self.order}, size={len(self)})"

    def inverse(self) -> "LatinTrade":
        return LatinTrade(self.mate, self.removed, check=False)

    def shifted(self, dc: int, ds: int) -> "LatinTrade":
        """Translate columns by ``dc`` and symbols by ``ds`` (mod n)."""
        n = self.order

        def move(es):
            return EntrySet(n, [(r, (c + dc) % n, (s + ds) % n) for r, c, s in es.entries])

        return LatinTrade(move(self.removed), move(self.mate))


def swap_trade(square: LatinSquare, r0: int, r1: int, cols: Iterable[int]) -> LatinTrade:
    """Trade on rows r0, r1 over ``cols`` whose mate swaps the two symbols in each column."""
    cols = sorted(set(cols))
    removed = []
    mate = []
    for c in cols:
        a, b = square[r0, c], square[r1, c]
        removed += [(r0, c, a), (r1, c, b)]
        mate += [(r0, c, b), (r1, c, a)]
    n = square.order
    return LatinTrade(EntrySet(n, removed), EntrySet(n, mate))


def is_plex(square: LatinSquare, entries: EntrySet, k: int) -> bool:
    """True iff ``entries`` is a k-plex of ``square``."""
    if entries.order != square.order:
        raise OrderMismatch(f"entry set has order {entries.order}, square has order {square.order}")
    n = square.order
    if k < 1 or len(entries) != k * n:
        return False
    if not entries.entries <= square.entries():
        return False
    for counts in (entries.rows_count(), entries.cols_count(), entries.syms_count()):
        if len(counts) != n or any(v != k for v in counts.values()):
            return False
    return True


def apply_trade(square: LatinSquare, trade: LatinTrade) -> LatinSquare:
    """Return ``(square \\ T) ∪ T'``, re-validated."""
    if trade.order != square.order:
        raise OrderMismatch("trade and square orders differ")
    missing = trade.removed.entries - square.entries()
    if missing:
        raise TradeNotContained(f"{len(missing)} trade entries absent from square, e.g. {sorted(missing)[0]}")
    grid = [list(row) for row in square.rows]
    for r, c, _ in trade.removed.entries:
        grid[r][c] = -1
    for r, c, s in trade.mate.entries:
        if grid[r][c] != -1:
            raise ResultNotLatin(f"mate entry {(r, c, s)} lands on a cell outside the trade")
        grid[r][c] = s
    try:
        return LatinSquare(square.order, grid)
    except (RowNotPermutation, ColumnRepeat) as exc:
        raise ResultNotLatin(str(exc)) from None


def restrict_delta_nonzero(square: LatinSquare, m: int) -> EntrySet:
    """Entries of ``square`` on which the m-block delta is nonzero."""
    from .analyze import delta, check_divisor

    n = square.order
    check_divisor(n, m)
    return EntrySet(n, [e for e in square.entries() if delta(e, n, m) != 0])


def read_square(path) -> LatinSquare:
    with open(path, "r", newline="") as fh:
        return LatinSquare.from_text(fh.read())


def write_square(square: LatinSquare, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(square.to_text())


def read_rectangle(path) -> LatinRectangle:
    with open(path, "r", newline="") as fh:
        return LatinRectangle.from_text(fh.read())


def read_entries(path) -> EntrySet:
    with open(path, "r", newline="") as fh:
        return EntrySet.from_text(fh.read())


def write_entries(entries: EntrySet, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(entries.to_text())
