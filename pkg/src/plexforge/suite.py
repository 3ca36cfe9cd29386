"""The reproduction matrix: one checker per claim, each with a time budget.

Each checker returns a :class:`CriterionResult`; a checker passes only if
every assertion holds and it finishes inside its budget.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .analyze import (
    botrows_certificate,
    extension_bound,
    matching_certificate,
    odd_divisors,
    plex_delta_sum,
    required_residue,
    step_violations,
    steptype_certificate,
)
from .construct import (
    KK2,
    SMALL_ORDERS,
    Mod2of12,
    Mod4,
    Mod10of12,
    StepParams,
    build_cyclic,
    build_modified_square,
    build_plex,
    build_special_square,
    build_special_triplex,
    build_step_type,
    build_trades,
)
from .core import LatinRectangle, LatinSquare, is_plex
from .search import (
    SearchBudget,
    count_transversals,
    count_transversals_exact_cover,
    enumerate_completions,
    find_order6_example,
    find_plex,
    iter_transversals,
    random_completion,
    random_latin_square,
)
from .species import DeltaSignature, canonical_key, classify, delta_signature

B8_TAIL_ROWS = (5, 6, 7)

# Non-zero delta_1 values in rows 5-7 of the eight non-cyclic species
# representatives among completions of the first five rows of B_8.
B8_DISPLAYS = tuple(
    DeltaSignature.from_text(B8_TAIL_ROWS, text)
    for text in (
        ". 2 . 2 . 2 . 2\n. . . . . . . .\n. -2 . -2 . -2 . -2",
        ". 2 . 2 . 2 . 2\n. . . . . . 1 -1\n. -2 . -2 . -2 -1 -1",
        ". 2 . 2 . 2 . 2\n. . 1 -1 . . 1 -1\n. -2 -1 -1 . -2 -1 -1",
        ". 2 . 1 2 . 1 2\n. . . 1 -1 . 1 -1\n. -2 . -2 -1 . -2 -1",
        ". 2 . 1 2 . 1 2\n. . . 1 -1 1 -1 .\n. -2 . -2 -1 -1 . -2",
        ". 2 . 1 2 . 1 2\n. . 1 -1 . . 1 -1\n. -2 -1 . -2 . -2 -1",
        ". 2 . 1 1 1 1 2\n. . . 1 -1 1 -1 .\n. -2 . -2 . -2 . -2",
        ". 2 . 1 1 2 . 2\n. . . 1 -1 . 1 -1\n. -2 . -2 . -2 -1 -1",
    )
)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    budget_s: float
    elapsed_s: float = 0.0
    failures: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        msg = f"[{tag}] {self.number:2d}. {self.title} ({self.elapsed_s:.1f}s / {self.budget_s:.0f}s)"
        if self.failures:
            msg += " :: " + "; ".join(self.failures[:3])
        return msg

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "elapsed_s": round(self.elapsed_s, 3),
            "budget_s": self.budget_s,
            "failures": self.failures,
            "details": self.details,
        }


class _Check:
    def __init__(self):
        self.failures: list[str] = []
        self.details: dict = {}

    def expect(self, ok: bool, msg: str) -> None:
        if not ok:
            self.failures.append(msg)


def _brute_force_transversals(square: LatinSquare) -> int:
    n = square.order
    return sum(
        1
        for perm in itertools.permutations(range(n))
        if len({square[r, perm[r]] for r in range(n)}) == n
    )


def c01_cyclic_even(chk: _Check, jobs: int) -> None:
    for n in (4, 6, 8, 10, 12, 14):
        out = count_transversals(build_cyclic(n), jobs=jobs)
        chk.details[f"B_{n}"] = out.count
        chk.expect(out.status == "ExhaustedNone" and out.count == 0, f"B_{n}: {out.status} {out.count}")


def c02_cyclic_odd(chk: _Check, jobs: int) -> None:
    expected = {3: 3, 5: 15, 7: 133, 9: 2025}
    for n, want in expected.items():
        sq = build_cyclic(n)
        fast = count_transversals(sq, jobs=jobs).count
        if n <= 5:
            other = _brute_force_transversals(sq)
        else:
            other = count_transversals_exact_cover(sq)
        chk.details[f"B_{n}"] = [fast, other]
        chk.expect(fast == other == want, f"B_{n}: {fast} vs {other}, want {want}")


def _b8_completions():
    return list(enumerate_completions(build_cyclic(8).rectangle(5)))


def _perfect_matching(options: list[set[int]], size: int) -> dict[int, int] | None:
    """Assign each class a distinct display; simple augmenting paths."""
    owner: dict[int, int] = {}

    def augment(i, seen):
        for d in sorted(options[i]):
            if d in seen:
                continue
            seen.add(d)
            if d not in owner or augment(owner[d], seen):
                owner[d] = i
                return True
        return False

    for i in range(len(options)):
        if not augment(i, set()):
            return None
    if len(owner) != size:
        return None
    return {i: d for d, i in owner.items()}


def c03_b8_species(chk: _Check, jobs: int) -> None:
    comps = _b8_completions()
    chk.details["completions"] = len(comps)
    chk.expect(len(comps) == 264, f"{len(comps)} completions")
    chk.expect(len(set(comps)) == len(comps), "duplicate completions")
    counts = [count_transversals(sq, jobs=jobs).count for sq in comps]
    chk.expect(all(c == 0 for c in counts), "a completion has a transversal")
    classes = classify(comps)
    chk.details["classes"] = len(classes)
    chk.expect(len(classes) == 9, f"{len(classes)} species")
    kb = canonical_key(build_cyclic(8))
    others = [c for c in classes if c.key != kb]
    chk.expect(len(others) == len(classes) - 1, "no class contains B_8")
    options = []
    for cls in others:
        sigs = {delta_signature(comps[i], B8_TAIL_ROWS) for i in cls.members}
        options.append({j for j, d in enumerate(B8_DISPLAYS) if d in sigs})
    match = _perfect_matching(options, len(B8_DISPLAYS))
    chk.details["display_options"] = [sorted(o) for o in options]
    chk.expect(len(others) == 8 and match is not None, "signatures do not match the displays one-to-one")


def _excludes_odd_below(chk: _Check, square: LatinSquare, k: int, label: str) -> None:
    for kk in range(1, k, 2):
        cert = matching_certificate(square, kk, 1)
        chk.details[f"{label} k'={kk}"] = [cert.sum_lo, cert.sum_hi]
        chk.expect(cert.excluded, f"{label}: k'={kk} not excluded")


def c04_kk2(chk: _Check, jobs: int) -> None:
    for k, m in ((3, 2), (3, 3), (5, 2)):
        v = KK2(k, m)
        sq = build_modified_square(v)
        plex = build_plex(v)
        label = f"KK2({k},{m}) n={v.n}"
        chk.expect(is_plex(sq, plex, k), f"{label}: plex check failed")
        _excludes_odd_below(chk, sq, k, label)
        if v.n == 12:
            out = count_transversals(sq, jobs=jobs)
            chk.expect(out.status == "ExhaustedNone", f"{label}: search says {out.status}")


def c05_mod4(chk: _Check, jobs: int) -> None:
    for n in (8, 12, 16, 20, 24):
        v = Mod4(n)
        sq = build_modified_square(v)
        plex = build_plex(v)
        chk.expect(is_plex(sq, plex, 3), f"Mod4 n={n}: triplex check failed")
        _excludes_odd_below(chk, sq, 3, f"Mod4 n={n}")
        if n <= 12:
            out = count_transversals(sq, jobs=jobs)
            chk.expect(out.status == "ExhaustedNone", f"Mod4 n={n}: search says {out.status}")


def c06_small_orders(chk: _Check, jobs: int) -> None:
    for n in SMALL_ORDERS:
        sq = build_special_square(n)  # validated on construction
        plex = build_special_triplex(n)
        chk.expect(is_plex(sq, plex, 3), f"L_{n}: triplex check failed")
        _excludes_odd_below(chk, sq, 3, f"L_{n}")
        if n in (10, 14):
            out = count_transversals(sq, jobs=jobs)
            chk.expect(out.status == "ExhaustedNone", f"L_{n}: search says {out.status}")


def c07_large_twelve(chk: _Check, jobs: int) -> None:
    for v, hand in ((Mod10of12(5), 4 * 5 + 7), (Mod2of12(6), 4 * 6 + 11)):
        label = f"{type(v).__name__}(m={v.m}) n={v.n}"
        trades = build_trades(v)  # raises unless pairwise disjoint
        chk.details[f"{label} trades"] = len(trades)
        sq = build_modified_square(v)
        plex = build_plex(v)
        chk.expect(is_plex(sq, plex, 3), f"{label}: triplex check failed")
        cert = matching_certificate(sq, 1, 1)
        chk.details[f"{label} bounds"] = [cert.sum_lo, cert.sum_hi, hand]
        chk.expect(cert.excluded, f"{label}: not excluded")
        chk.expect(max(-cert.sum_lo, cert.sum_hi) <= hand, f"{label}: bounds exceed {hand}")


def c08_botrows(chk: _Check, jobs: int, samples: int = 100) -> None:
    for sq in _b8_completions():
        if not botrows_certificate(sq, 1, 1, 3).excluded:
            chk.expect(False, "a B_8 completion is not excluded")
            break
    rng = random.Random(20240508)
    top = build_cyclic(12).rectangle(9)
    distinct = set()
    for _ in range(50 * samples):
        if len(distinct) == samples:
            break
        sq = random_completion(top, rng)
        if sq in distinct:
            continue
        distinct.add(sq)
        cert = botrows_certificate(sq, 1, 1, 3)
        out = count_transversals(sq, jobs=jobs)
        chk.expect(cert.excluded, "random B_12 tail not excluded")
        chk.expect(out.status == "ExhaustedNone", "search found a transversal")
    chk.details["distinct_B12_tails"] = len(distinct)
    chk.expect(len(distinct) == samples, f"only {len(distinct)} distinct tails")


def c09_sum_law(chk: _Check, jobs: int, samples: int = 200) -> None:
    rng = random.Random(7)
    checked = 0
    violations = 0
    for i in range(samples):
        n = 6 if i % 2 == 0 else 8
        sq = random_latin_square(n, rng)
        plexes = list(iter_transversals(sq))
        out = find_plex(sq, 3, SearchBudget(deterministic_seed=i))
        if out.found:
            plexes.append(out.witness)
        for plex in plexes:
            for m in odd_divisors(n):
                checked += 1
                if plex_delta_sum(plex, n, m) != required_residue(n, m):
                    violations += 1
    chk.details["plex_divisor_checks"] = checked
    chk.details["violations"] = violations
    chk.expect(checked > 0, "no plexes found")
    chk.expect(violations == 0, f"{violations} violations")


def c10_bounds(chk: _Check, jobs: int) -> None:
    f = math.factorial
    b = extension_bound(8, 5)
    want = Fraction(f(8) ** 3 * 6**8, 8**24)
    chk.expect(b.exact == want, "extension_bound(8,5) exact value differs")
    ref = 3 * math.log10(f(8)) + 8 * math.log10(6) - 24 * math.log10(8)
    chk.details["extension_log10"] = b.log10_value
    chk.expect(abs(b.log10_value - ref) < 1e-9, "extension_bound(8,5) log10 differs")

    blocks3 = [sq.rows for sq in enumerate_completions(LatinRectangle(3, []))]
    squares = set()
    bad = 0
    for choice in itertools.product(blocks3, repeat=4):
        grid = ((choice[0], choice[1]), (choice[2], choice[3]))
        sq = build_step_type(StepParams(2, 3, grid))
        squares.add(sq)
        if step_violations(sq, 3, 2):
            bad += 1
    chk.details["step_squares"] = len(squares)
    chk.expect(len(squares) == 20736, f"{len(squares)} distinct step-type squares")
    chk.expect(bad == 0, f"{bad} squares with step violations")
    rng = random.Random(3)
    ordered = sorted(squares, key=lambda s: s.rows)
    for sq in rng.sample(ordered, 50):
        chk.expect(steptype_certificate(sq, 1, 3).excluded, "step certificate inconclusive")
        out = count_transversals(sq, jobs=jobs)
        chk.expect(out.status == "ExhaustedNone", "step-type sample has a transversal")


def c11_order6(chk: _Check, jobs: int) -> None:
    sq = find_order6_example()
    chk.details["square"] = sq.to_text()
    chk.expect(sq.order == 6, "wrong order")
    chk.expect(count_transversals(sq, jobs=jobs).count == 0, "has a transversal")
    out = find_plex(sq, 3)
    chk.expect(out.found and is_plex(sq, out.witness, 3), "no verified triplex")


CRITERIA: tuple[tuple[int, str, float, Callable], ...] = (
    (1, "B_n transversal-free, n = 4..14 even", 10, c01_cyclic_even),
    (2, "odd cyclic transversal counts 3, 15, 133, 2025", 5, c02_cyclic_odd),
    (3, "264 completions of B_8 rows 0-4, 9 species, displays matched", 60, c03_b8_species),
    (4, "KK2 instances (3,2), (3,3), (5,2)", 120, c04_kk2),
    (5, "Mod4 triplex squares n = 8..24", 120, c05_mod4),
    (6, "special squares L_n for the ten small orders", 180, c06_small_orders),
    (7, "Mod10of12 m=5 and Mod2of12 m=6 within hand bounds", 120, c07_large_twelve),
    (8, "bottom-rows certificates on B_8 and random B_12 tails", 120, c08_botrows),
    (9, "delta-sum law on plexes of 200 random squares", 120, c09_sum_law),
    (10, "extension bound and 20736 step-type squares", 120, c10_bounds),
    (11, "order-6 square with a triplex and no transversal", 60, c11_order6),
)


def warm_up() -> None:
    """Compile the search kernels so their one-off cost is not billed to a criterion."""
    count_transversals(build_cyclic(5), jobs=1)
    count_transversals(build_cyclic(70), SearchBudget(node_limit=10), jobs=1)


def run_criterion(number: int, jobs: int = 1) -> CriterionResult:
    for num, title, budget, fn in CRITERIA:
        if num == number:
            break
    else:
        raise KeyError(f"no criterion {number}")
    chk = _Check()
    start = time.perf_counter()
    try:
        fn(chk, jobs)
    except Exception as exc:  # a crash is a failure, reported like one
        chk.failures.append(f"{type(exc).__name__}: {exc}")
    elapsed = time.perf_counter() - start
    if elapsed > budget:
        chk.failures.append(f"over budget: {elapsed:.1f}s > {budget}s")
    return CriterionResult(number, title, not chk.failures, budget, elapsed, chk.failures, chk.details)


def run_all(jobs: int = 1, numbers=None) -> list[CriterionResult]:
    warm_up()
    wanted = [c[0] for c in CRITERIA] if numbers is None else list(numbers)
    return [run_criterion(n, jobs) for n in wanted]
