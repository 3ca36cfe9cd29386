"""Compiled inner loops for transversal search."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def transversal_dfs(grid, start, col_used, sym_used, prefix, limit, node_limit, witness):
    """Depth-first search over rows ``start..n-1`` for partial-transversal extensions.

    ``prefix`` holds the columns already chosen for rows ``0..start-1``;
    ``col_used``/``sym_used`` must match it. Stops after ``limit`` solutions
    (``limit <= 0`` means count all) or ``node_limit`` nodes (``<= 0``: no cap).
    The first solution found is written into ``witness``.

    Returns (count, nodes, budget_hit).
    """
    n = grid.shape[0]
    cols = np.empty(n, dtype=np.int64)
    for i in range(start):
        cols[i] = prefix[i]
    pos = np.zeros(n + 1, dtype=np.int64)
    count = 0
    nodes = 0
    if start == n:
        for i in range(n):
            witness[i] = cols[i]
        return 1, 0, False
    depth = start
    pos[depth] = 0
    while depth >= start:
        if depth == n:
            count += 1
            if count == 1:
                for i in range(n):
                    witness[i] = cols[i]
            if limit > 0 and count >= limit:
                return count, nodes, False
            depth -= 1
            c = cols[depth]
            col_used[c] = False
            sym_used[grid[depth, c]] = False
            continue
        c = pos[depth]
        found = -1
        while c < n:
            if not col_used[c] and not sym_used[grid[depth, c]]:
                found = c
                break
            c += 1
        if found < 0:
            depth -= 1
            if depth >= start:
                c = cols[depth]
                col_used[c] = False
                sym_used[grid[depth, c]] = False
            continue
        nodes += 1
        if node_limit > 0 and nodes > node_limit:
            return count, nodes, True
        pos[depth] = found + 1
        cols[depth] = found
        col_used[found] = True
        sym_used[grid[depth, found]] = True
        depth += 1
        if depth <= n:
            pos[depth] = 0
    return count, nodes, False


@njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True, inline="always")
def _lowest_bit(x):
    i = 0
    while (x >> np.uint64(i)) & np.uint64(1) == np.uint64(0):
        i += 1
    return i


@njit(cache=True, nogil=True)
def transversal_mrv(grid, colof, ok0, symok0, done0, limit, node_limit, witness):
    """Transversal search for n <= 64 with forward checking.

    ``ok0[r]`` is the bitmask of columns still usable in row r (column free
    and that row's symbol there unused) and ``symok0[r]`` the same set read
    as symbols. Rows flagged in ``done0`` are already assigned and
    ``witness`` must hold their columns. At each level the unassigned row
    with fewest usable columns is branched on. A node is pruned when some
    row has no usable cell, or some free column or unused symbol is no
    longer reachable from any unassigned row.

    Returns (count, nodes, budget_hit). The first solution is left in
    ``witness`` (indexed by row).
    """
    n = grid.shape[0]
    one = np.uint64(1)
    done = done0.copy()
    left = 0
    for r in range(n):
        if not done[r]:
            left += 1
    ok = np.zeros((left + 1, n), dtype=np.uint64)
    sk = np.zeros((left + 1, n), dtype=np.uint64)
    for r in range(n):
        ok[0, r] = ok0[r]
        sk[0, r] = symok0[r]
    colfree = np.zeros(left + 1, dtype=np.uint64)
    symfree = np.zeros(left + 1, dtype=np.uint64)
    for c in range(n):
        used = False
        for r in range(n):
            if done[r] and witness[r] == c:
                used = True
        if not used:
            colfree[0] |= one << np.uint64(c)
    for s in range(n):
        used = False
        for r in range(n):
            if done[r] and grid[r, witness[r]] == s:
                used = True
        if not used:
            symfree[0] |= one << np.uint64(s)
    rowsel = np.zeros(left + 1, dtype=np.int64)
    cand = np.zeros(left + 1, dtype=np.uint64)
    assign = witness.copy()
    count = 0
    nodes = 0
    level = 0
    enter = True
    while True:
        if enter:
            if level == left:
                count += 1
                if count == 1:
                    for i in range(n):
                        witness[i] = assign[i]
                if limit > 0 and count >= limit:
                    return count, nodes, False
                level -= 1
                enter = False
                if level < 0:
                    break
                continue
            best = -1
            bestc = n + 1
            cover = np.uint64(0)
            scover = np.uint64(0)
            for r in range(n):
                if not done[r]:
                    cover |= ok[level, r]
                    scover |= sk[level, r]
                    pc = _popcount(ok[level, r])
                    if pc < bestc:
                        bestc = pc
                        best = r
                        if pc == 0:
                            break
            if bestc == 0 or cover != colfree[level] or scover != symfree[level]:
                level -= 1
                enter = False
                if level < 0:
                    break
                continue
            rowsel[level] = best
            cand[level] = ok[level, best]
            done[best] = True
        r = rowsel[level]
        if cand[level] == np.uint64(0):
            done[r] = False
            level -= 1
            enter = False
            if level < 0:
                break
            continue
        c = _lowest_bit(cand[level])
        cand[level] &= cand[level] - one
        nodes += 1
        if node_limit > 0 and nodes > node_limit:
            return count, nodes, True
        assign[r] = c
        s = grid[r, c]
        colfree[level + 1] = colfree[level] & ~(one << np.uint64(c))
        symfree[level + 1] = symfree[level] & ~(one << np.uint64(s))
        for q in range(n):
            if not done[q]:
                ok[level + 1, q] = ok[level, q] & ~(one << np.uint64(c)) & ~(one << np.uint64(colof[q, s]))
                sk[level + 1, q] = sk[level, q] & ~(one << np.uint64(s)) & ~(one << np.uint64(grid[q, c]))
        level += 1
        enter = True
    return count, nodes, False
