"""Conjugates, species-canonical keys and classification.

The canonical form of a square is the lexicographically least row-major
symbol string over its whole species orbit. Any square is isotopic to one
whose first row is the identity, and then the second row is a conjugate of
the permutation carrying one original row onto another. So the search only
needs ordered row pairs whose permutation has the least conjugate, and for
each such pair the relabelings that realise it. Those relabelings form a
coset of a centraliser and are evaluated together with numpy.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from functools import lru_cache
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import LatinError, LatinSquare

MAX_ORDER = 10

CONJUGATE_ORDER = tuple(itertools.permutations(range(3)))


class OrderTooLarge(LatinError):
    pass


def conjugate(square: LatinSquare, perm: Sequence[int]) -> LatinSquare:
    """The square whose entries are ``(t[perm[0]], t[perm[1]], t[perm[2]])``."""
    n = square.order
    rows = [[0] * n for _ in range(n)]
    for t in square.entries():
        a, b, c = t[perm[0]], t[perm[1]], t[perm[2]]
        rows[a][b] = c
    return LatinSquare(n, rows)


def conjugates(square: LatinSquare) -> list[LatinSquare]:
    """All six conjugates, identity first, in lexicographic order of coordinate permutations."""
    return [conjugate(square, p) for p in CONJUGATE_ORDER]


def relabel(square: LatinSquare, rowperm, colperm, symperm) -> LatinSquare:
    """Move entry (r, c, s) to (rowperm[r], colperm[c], symperm[s])."""
    n = square.order
    rows = [[0] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            rows[rowperm[r]][colperm[c]] = symperm[square[r, c]]
    return LatinSquare(n, rows)


def random_species_element(square: LatinSquare, rng) -> LatinSquare:
    n = square.order
    conj = conjugate(square, CONJUGATE_ORDER[rng.randrange(6)])
    return relabel(conj, *(rng.sample(range(n), n) for _ in range(3)))


@dataclass(frozen=True, order=True)
class SpeciesKey:
    key: bytes

    @property
    def hex(self) -> str:
        return self.key.hex()

    def square(self) -> LatinSquare:
        n = self.key[0]
        body = self.key[1:]
        return LatinSquare(n, [list(body[i * n:(i + 1) * n]) for i in range(n)])


def _cycles(perm: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = perm[x]
        out.append(cyc)
    return out


@lru_cache(maxsize=None)
def _coset_template(ctype: tuple[int, ...]) -> np.ndarray:
    """Targets of a conjugating relabeling, by position in the source cycle list.

    Source cycles are listed shortest first, each from a fixed start. Row k
    gives, for every listed position, its image under the k-th relabeling
    onto the least permutation of this cycle type: one per way of pairing
    equal-length cycles, times one rotation per cycle.
    """
    groups = []
    pos = 0
    for length in sorted(set(ctype)):
        count = ctype.count(length)
        groups.append((length, count, pos))
        pos += length * count
    per_group = []
    for length, count, base in groups:
        options = []
        for order in itertools.permutations(range(count)):
            for rots in itertools.product(range(length), repeat=count):
                row = [0] * (length * count)
                for dst, (src, t) in enumerate(zip(order, rots)):
                    for j in range(length):
                        row[src * length + j] = base + dst * length + (j - t) % length
                options.append(row)
        per_group.append(options)
    rows = [sum(combo, []) for combo in itertools.product(*per_group)]
    return np.array(rows, dtype=np.int64)


def _relabelings(alpha: Sequence[int]) -> np.ndarray:
    """Every sigma with sigma * alpha * sigma^-1 least in its conjugacy class, one per row."""
    cycles = sorted(_cycles(alpha), key=len)
    listed = np.array([x for cyc in cycles for x in cyc], dtype=np.int64)
    template = _coset_template(tuple(len(c) for c in cycles))
    sigmas = np.empty_like(template)
    sigmas[:, listed] = template
    return sigmas


def _conjugate_grids(grid: np.ndarray) -> np.ndarray:
    """The six conjugates of ``grid`` as a (6, n, n) array, in ``CONJUGATE_ORDER``."""
    n = grid.shape[0]
    r, c = np.indices((n, n))
    coords = (r.ravel(), c.ravel(), grid.ravel())
    out = np.empty((6, n, n), dtype=np.int64)
    for i, p in enumerate(CONJUGATE_ORDER):
        out[i, coords[p[0]], coords[p[1]]] = coords[p[2]]
    return out


def _cycle_profiles(perms: np.ndarray) -> np.ndarray:
    """Per permutation, the cycle length of each point, sorted ascending.

    Sorted this way, the lexicographic order of profiles is the order of the
    least conjugates of the permutations.
    """
    p, n = perms.shape
    ident = np.arange(n)
    lens = np.zeros((p, n), dtype=np.int64)
    cur = perms.copy()
    for j in range(1, n + 1):
        lens[(cur == ident) & (lens == 0)] = j
        cur = np.take_along_axis(perms, cur, axis=1)
    lens.sort(axis=1)
    return lens


def _forms(grids: np.ndarray, r0: np.ndarray, sigmas: np.ndarray) -> np.ndarray:
    """Relabeled squares, flattened, one per row of ``sigmas``.

    Row k relabels symbols of ``grids[k]`` by ``sigmas[k]``, renames columns
    so row ``r0[k]`` reads as the identity and orders rows by their entry in
    the new first column.
    """
    k, n = sigmas.shape
    kk = np.arange(k)
    sym = sigmas[kk[:, None, None], grids]  # relabeled symbols in original positions
    colp = sym[kk, r0, :]  # new index of each original column
    c_star = np.argmin(colp, axis=1)  # original column that becomes column 0
    rowp = sym[kk, :, c_star]  # new index of each original row
    out = np.empty((k, n, n), dtype=np.int64)
    out[kk[:, None, None], rowp[:, :, None], colp[:, None, :]] = sym
    return out.reshape(k, n * n)


def _lexmin(forms: np.ndarray) -> bytes:
    packed = np.ascontiguousarray(forms.astype(np.uint8))
    keys = packed.view(f"S{packed.shape[1]}").ravel()
    return packed[int(np.argmin(keys))].tobytes()


_CHUNK = 1 << 14


def canonical_key(square: LatinSquare) -> SpeciesKey:
    """Exact species invariant: equal keys iff same species."""
    n = square.order
    if n > MAX_ORDER:
        raise OrderTooLarge(f"canonical keys are limited to n <= {MAX_ORDER}, got {n}")
    if n == 1:
        return SpeciesKey(bytes([1, 0]))
    conj = _conjugate_grids(square.array.astype(np.int64))
    inv = np.argsort(conj, axis=2)  # inv[i, r, s] = column of s in row r
    ci, r0, r1 = (a.ravel() for a in np.indices((6, n, n)))
    keep = r0 != r1
    ci, r0, r1 = ci[keep], r0[keep], r1[keep]
    # alpha sends the symbol in row r0 of a column to the symbol in row r1
    alphas = conj[ci[:, None], r1[:, None], inv[ci, r0]]
    prof = _cycle_profiles(alphas)
    order = np.lexsort(prof.T[::-1])
    first = prof[order[0]]
    chosen = order[(prof[order] == first).all(axis=1)]

    best = None
    batch_sig, batch_conj, batch_r0 = [], [], []
    pending = 0

    def flush():
        nonlocal best, pending
        if not batch_sig:
            return
        sig = np.concatenate(batch_sig)
        cand = _lexmin(_forms(conj[np.concatenate(batch_conj)], np.concatenate(batch_r0), sig))
        if best is None or cand < best:
            best = cand
        batch_sig.clear()
        batch_conj.clear()
        batch_r0.clear()
        pending = 0

    for idx in sorted(chosen.tolist()):
        sig = _relabelings(alphas[idx].tolist())
        batch_sig.append(sig)
        batch_conj.append(np.full(len(sig), ci[idx]))
        batch_r0.append(np.full(len(sig), r0[idx]))
        pending += len(sig)
        if pending >= _CHUNK:
            flush()
    flush()
    return SpeciesKey(bytes([n]) + best)


@dataclass
class SpeciesClass:
    key: SpeciesKey
    representative: LatinSquare
    members: list[int]

    @property
    def size(self) -> int:
        return len(self.members)


def _row_key(sq: LatinSquare):
    return sq.rows


def classify(squares: Iterable[LatinSquare]) -> list[SpeciesClass]:
    """Group squares by species, classes ordered by key.

    The representative of a class is its lexicographically least member, so
    the output does not depend on the input order beyond member indices.
    """
    squares = list(squares)
    if squares:
        n = squares[0].order
        if any(s.order != n for s in squares):
            raise ValueError("classify needs squares of one order")
        if n > MAX_ORDER:
            raise OrderTooLarge(f"canonical keys are limited to n <= {MAX_ORDER}, got {n}")
    groups: dict[SpeciesKey, list[int]] = defaultdict(list)
    for i, sq in enumerate(squares):
        groups[canonical_key(sq)].append(i)
    out = []
    for key in sorted(groups):
        members = groups[key]
        rep = min((squares[i] for i in members), key=_row_key)
        out.append(SpeciesClass(key, rep, members))
    return out


@dataclass(frozen=True)
class DeltaSignature:
    rows: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.matrix) != len(self.rows):
            raise ValueError("one matrix row per selected row")
        if len({len(r) for r in self.matrix}) > 1:
            raise ValueError("ragged signature")

    def to_text(self) -> str:
        return "\n".join(" ".join("." if v == 0 else str(v) for v in row) for row in self.matrix)

    @classmethod
    def from_text(cls, rows: Sequence[int], text: str) -> "DeltaSignature":
        matrix = []
        for line in text.strip().splitlines():
            matrix.append(tuple(0 if tok == "." else int(tok) for tok in line.split()))
        return cls(tuple(rows), tuple(matrix))


def delta_signature(square: LatinSquare, rows: Sequence[int]) -> DeltaSignature:
    from .analyze import delta_matrix

    dm = delta_matrix(square, 1)
    return DeltaSignature(tuple(rows), tuple(tuple(int(v) for v in dm[r]) for r in rows))


def species_report(classes: list[SpeciesClass], counts: Sequence[int] | None = None) -> list[dict]:
    out = []
    for i, cls in enumerate(classes):
        out.append({
            "key_hex": cls.key.hex,
            "class_size": cls.size,
            "representative": cls.representative.to_text(),
            "transversal_count": None if counts is None else counts[i],
        })
    return out
