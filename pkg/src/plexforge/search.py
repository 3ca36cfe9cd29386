"""Exact search: plexes, transversal counts and latin rectangle completions.

Nonexistence is only ever reported by a search that ran to completion;
a run stopped by its budget says ``BudgetExceeded`` and nothing more.
"""

from __future__ import annotations

import itertools
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import EntrySet, LatinError, LatinRectangle, LatinSquare, is_plex

FOUND = "Found"
EXHAUSTED = "ExhaustedNone"
BUDGET = "BudgetExceeded"


class NotFound(LatinError):
    pass


@dataclass(frozen=True)
class SearchBudget:
    node_limit: int | None = None
    solution_limit: int | None = None
    deterministic_seed: int | None = None

    def __post_init__(self):
        for name in ("node_limit", "solution_limit"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive, got {v}")


UNLIMITED = SearchBudget()


@dataclass
class SearchOutcome:
    status: str
    witness: EntrySet | None = None
    count: int | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "count": self.count,
            "nodes": self.nodes,
            "witness": None if self.witness is None else [list(e) for e in self.witness],
        }


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("PLEXFORGE_JOBS", "1")))
    except ValueError:
        return 1


# ------------------------------------------------------------ transversals


def _column_order(n: int, seed: int | None) -> np.ndarray:
    if seed is None:
        return np.arange(n)
    return np.random.default_rng(seed).permutation(n)


def _subtrees(grid: np.ndarray) -> list[tuple[int, ...]]:
    """Column choices for rows 0 and 1; each prefix roots an independent subtree."""
    n = grid.shape[0]
    if n < 3:
        return [()]
    out = []
    for c0 in range(n):
        for c1 in range(n):
            if c1 != c0 and grid[1, c1] != grid[0, c0]:
                out.append((c0, c1))
    return out


def _run_subtree(grid, colof, prefix, limit, node_limit):
    from ._kernels import transversal_dfs, transversal_mrv

    n = grid.shape[0]
    witness = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    col_used = np.zeros(n, dtype=np.bool_)
    sym_used = np.zeros(n, dtype=np.bool_)
    for r, c in enumerate(prefix):
        done[r] = True
        witness[r] = c
        col_used[c] = True
        sym_used[grid[r, c]] = True
    lim = 0 if limit is None else limit
    nlim = 0 if node_limit is None else node_limit
    if n <= 64:
        ok = np.zeros(n, dtype=np.uint64)
        sk = np.zeros(n, dtype=np.uint64)
        for r in range(n):
            if done[r]:
                continue
            for c in range(n):
                s = grid[r, c]
                if not col_used[c] and not sym_used[s]:
                    ok[r] |= np.uint64(1) << np.uint64(c)
                    sk[r] |= np.uint64(1) << np.uint64(s)
        count, nodes, hit = transversal_mrv(grid, colof, ok, sk, done, lim, nlim, witness)
    else:
        pre = np.array(prefix + (0,) * (n - len(prefix)), dtype=np.int64)
        count, nodes, hit = transversal_dfs(grid, len(prefix), col_used, sym_used, pre, lim, nlim, witness)
    return int(count), int(nodes), bool(hit), witness


def _transversal_search(square: LatinSquare, limit, budget: SearchBudget, jobs: int):
    n = square.order
    perm = _column_order(n, budget.deterministic_seed)
    grid = np.ascontiguousarray(square.array.astype(np.int64)[:, perm])
    colof = np.argsort(grid, axis=1).astype(np.int64)
    tasks = _subtrees(grid)
    node_limit = budget.node_limit

    results = []
    if jobs <= 1:
        nodes = 0
        total = 0
        for t in tasks:
            remaining = None if node_limit is None else node_limit - nodes
            if remaining is not None and remaining <= 0:
                results.append((0, 0, True, None))
                break
            left = None if limit is None else limit - total
            res = _run_subtree(grid, colof, t, left, remaining)
            results.append(res)
            nodes += res[1]
            total += res[0]
            if res[2] or (limit is not None and total >= limit):
                break
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda t: _run_subtree(grid, colof, t, limit, node_limit), tasks))

    count = 0
    nodes = 0
    hit = False
    witness_cols = None
    for c, nd, h, w in results:
        nodes += nd
        hit = hit or h
        if c and witness_cols is None:
            witness_cols = w
        count += c
    if node_limit is not None and nodes > node_limit:
        hit = True
    if limit is not None:
        count = min(count, limit)
    witness = None
    if witness_cols is not None:
        witness = EntrySet(n, [(r, int(perm[c]), square[r, int(perm[c])]) for r, c in enumerate(witness_cols)])
    return count, nodes, hit, witness


def count_transversals(square: LatinSquare, budget: SearchBudget = UNLIMITED, jobs: int | None = None) -> SearchOutcome:
    """Exact number of transversals by complete backtracking."""
    jobs = default_jobs() if jobs is None else jobs
    count, nodes, hit, witness = _transversal_search(square, budget.solution_limit, budget, jobs)
    if hit:
        return SearchOutcome(BUDGET, witness, None, nodes)
    if budget.solution_limit is not None and count >= budget.solution_limit:
        return SearchOutcome(BUDGET if count else EXHAUSTED, witness, count, nodes)
    status = FOUND if count else EXHAUSTED
    return SearchOutcome(status, witness, count, nodes)


def iter_transversals(square: LatinSquare) -> Iterator[EntrySet]:
    """Every transversal, via an exact cover formulation (Algorithm X).

    Independent of the bitmask engine behind :func:`count_transversals`.
    """
    n = square.order
    items = {("r", i): set() for i in range(n)}
    items.update({("c", i): set() for i in range(n)})
    items.update({("s", i): set() for i in range(n)})
    options = {}
    for r, c, s in square.entries():
        opt = (r, c, s)
        options[opt] = (("r", r), ("c", c), ("s", s))
        for it in options[opt]:
            items[it].add(opt)

    def select(opt):
        removed = []
        for it in options[opt]:
            for other in items[it]:
                for it2 in options[other]:
                    if it2 != it:
                        items[it2].remove(other)
            removed.append(items.pop(it))
        return removed

    def deselect(opt, removed):
        for it in reversed(options[opt]):
            items[it] = removed.pop()
            for other in items[it]:
                for it2 in options[other]:
                    if it2 != it:
                        items[it2].add(other)

    partial = []

    def solve():
        if not items:
            yield EntrySet(n, partial)
            return
        it = min(items, key=lambda key: len(items[key]))
        for opt in sorted(items[it]):
            partial.append(opt)
            removed = select(opt)
            yield from solve()
            deselect(opt, removed)
            partial.pop()

    yield from solve()


def count_transversals_exact_cover(square: LatinSquare) -> int:
    return sum(1 for _ in iter_transversals(square))


# ------------------------------------------------------------------ plexes


class _Budget(Exception):
    pass


class _PlexSearch:
    """k-plex search by include/exclude branching on the tightest line.

    Lines are rows, columns and symbols, each needing k chosen cells. At a
    node the line with least slack (usable cells minus cells still needed)
    is picked, and its first usable cell is either taken or discarded.
    """

    def __init__(self, square: LatinSquare, k: int, node_limit: int | None, prune_delta: bool, seed):
        n = square.order
        self.n = n
        self.k = k
        self.square = square
        perm = list(range(n * n))
        if seed is not None:
            random.Random(seed).shuffle(perm)
        self.rank = perm
        self.cell_of_rank = [0] * (n * n)
        for cell, rk in enumerate(perm):
            self.cell_of_rank[rk] = cell
        masks = [0] * (3 * n)
        self.lines_of = []
        for r in range(n):
            for c in range(n):
                s = square[r, c]
                bit = 1 << perm[r * n + c]
                lines = (r, n + c, 2 * n + s)
                for ln in lines:
                    masks[ln] |= bit
                self.lines_of.append(lines)
        self.masks = masks
        self.need = [k] * (3 * n)
        self.node_limit = node_limit
        self.nodes = 0
        self.chosen: list[int] = []
        self.prune = prune_delta and k % 2 == 1 and n % 2 == 0
        if self.prune:
            from .analyze import delta_matrix

            dm = delta_matrix(square, 1)
            self.dval = [int(dm[r, c]) for r in range(n) for c in range(n)]
            self.rows_desc = [sorted(range(r * n, r * n + n), key=lambda x: -self.dval[x]) for r in range(n)]

    def _delta_feasible(self, avail: int) -> bool:
        n = self.n
        partial = sum(self.dval[x] for x in self.chosen)
        lo = hi = partial
        for r in range(n):
            need = self.need[r]
            if not need:
                continue
            usable = [self.dval[x] for x in self.rows_desc[r] if avail >> self.rank[x] & 1]
            hi += sum(usable[:need])
            lo += sum(usable[-need:])
        half = n // 2
        first = lo + (half - lo) % n
        return first <= hi

    def run(self, avail: int) -> bool:
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise _Budget
        best = -1
        best_slack = None
        for ln in range(3 * self.n):
            need = self.need[ln]
            if not need:
                continue
            have = (self.masks[ln] & avail).bit_count()
            if have < need:
                return False
            slack = have - need
            if best_slack is None or slack < best_slack:
                best, best_slack = ln, slack
        if best < 0:
            return True
        if self.prune and not self._delta_feasible(avail):
            return False
        pool = self.masks[best] & avail
        low = pool & -pool
        cell = self.cell_of_rank[low.bit_length() - 1]
        # take the cell
        lines = self.lines_of[cell]
        rest = avail & ~low
        for ln in lines:
            self.need[ln] -= 1
            if not self.need[ln]:
                rest &= ~self.masks[ln]
        self.chosen.append(cell)
        if self.run(rest):
            return True
        self.chosen.pop()
        for ln in lines:
            self.need[ln] += 1
        # discard it
        if best_slack == 0:
            return False
        return self.run(avail & ~low)

    def witness(self) -> EntrySet:
        n = self.n
        return EntrySet(n, [(x // n, x % n, self.square[x // n, x % n]) for x in self.chosen])


def find_plex(
    square: LatinSquare,
    k: int,
    budget: SearchBudget = UNLIMITED,
    prune_delta: bool = False,
    jobs: int | None = None,
) -> SearchOutcome:
    """Find a k-plex, or prove none exists by exhausting the search.

    ``prune_delta`` cuts branches whose delta sum can no longer reach the
    residue every odd plex of an even-order square must hit.
    """
    n = square.order
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if k == n:
        return SearchOutcome(FOUND, square.entry_set(), None, 0)
    if k == 1 and not prune_delta:
        one = SearchBudget(budget.node_limit, 1, budget.deterministic_seed)
        count, nodes, hit, witness = _transversal_search(square, 1, one, default_jobs() if jobs is None else jobs)
        if count:
            return SearchOutcome(FOUND, witness, None, nodes)
        return SearchOutcome(BUDGET if hit else EXHAUSTED, None, None, nodes)
    engine = _PlexSearch(square, k, budget.node_limit, prune_delta, budget.deterministic_seed)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * n * n + 1000))
    try:
        ok = engine.run((1 << (n * n)) - 1)
    except _Budget:
        return SearchOutcome(BUDGET, None, None, engine.nodes)
    finally:
        sys.setrecursionlimit(old)
    if not ok:
        return SearchOutcome(EXHAUSTED, None, None, engine.nodes)
    witness = engine.witness()
    assert is_plex(square, witness, k)
    return SearchOutcome(FOUND, witness, None, engine.nodes)


# ------------------------------------------------------------- completions


def _row_extensions(n: int, colsyms: list[set], rng: random.Random | None = None, first: int | None = None) -> Iterator[list[int]]:
    """Rows compatible with the used symbols of each column, lexicographically."""
    row = [0] * n
    used = set()

    def rec(j):
        if j == n:
            yield list(row)
            return
        choices = [s for s in range(n) if s not in used and s not in colsyms[j]]
        if j == 0 and first is not None:
            choices = [s for s in choices if s == first]
        if rng is not None:
            rng.shuffle(choices)
        for s in choices:
            row[j] = s
            used.add(s)
            yield from rec(j + 1)
            used.discard(s)

    yield from rec(0)


def enumerate_completions(rect: LatinRectangle) -> Iterator[LatinSquare]:
    """Every completion of ``rect``, once each, in lexicographic order of the new rows."""
    n = rect.order
    rows = [list(r) for r in rect.rows]
    colsyms = [{r[j] for r in rows} for j in range(n)]

    def rec():
        if len(rows) == n:
            yield LatinSquare(n, rows)
            return
        for row in _row_extensions(n, colsyms):
            rows.append(row)
            for j, s in enumerate(row):
                colsyms[j].add(s)
            yield from rec()
            for j, s in enumerate(row):
                colsyms[j].discard(s)
            rows.pop()

    yield from rec()


def enumerate_reduced(n: int) -> Iterator[LatinSquare]:
    """Squares whose first row and first column are 0, 1, ..., n-1, in lexicographic order."""
    rows = [list(range(n))]
    colsyms = [{j} for j in range(n)]

    def rec():
        if len(rows) == n:
            yield LatinSquare(n, rows)
            return
        for row in _row_extensions(n, colsyms, first=len(rows)):
            rows.append(row)
            for j, s in enumerate(row):
                colsyms[j].add(s)
            yield from rec()
            for j, s in enumerate(row):
                colsyms[j].discard(s)
            rows.pop()

    yield from rec()


def random_completion(rect: LatinRectangle, rng: random.Random) -> LatinSquare:
    """A completion of ``rect`` found by randomised backtracking (not uniform)."""
    n = rect.order
    rows = [list(r) for r in rect.rows]
    colsyms = [{r[j] for r in rows} for j in range(n)]

    def rec():
        if len(rows) == n:
            return True
        for row in _row_extensions(n, colsyms, rng):
            rows.append(row)
            for j, s in enumerate(row):
                colsyms[j].add(s)
            if rec():
                return True
            for j, s in enumerate(row):
                colsyms[j].discard(s)
            rows.pop()
        return False

    if not rec():
        raise NotFound("rectangle has no completion")
    return LatinSquare(n, rows)


def random_latin_square(n: int, rng: random.Random) -> LatinSquare:
    """A random square: randomised completion, then a random isotopism and conjugate."""
    from .species import conjugates, relabel

    base = random_completion(LatinRectangle(n, []), rng)
    conj = conjugates(base)[rng.randrange(6)]
    perms = [rng.sample(range(n), n) for _ in range(3)]
    return relabel(conj, *perms)


def find_order6_example() -> LatinSquare:
    """First reduced order-6 square with a triplex and no transversal."""
    n = 6
    first = list(range(n))
    for second in itertools.permutations(range(n)):
        if second[0] != 1 or any(a == b for a, b in zip(first, second)):
            continue
        rect = LatinRectangle(n, [first, list(second)])
        for sq in enumerate_completions(rect):
            if [sq[i, 0] for i in range(n)] != first:
                continue
            if count_transversals(sq, jobs=1).count:
                continue
            if find_plex(sq, 3).found:
                return sq
    raise NotFound("no order-6 square with a triplex but no transversal")
