"""Delta-function machinery, step-type checks, nonexistence certificates and
counting lower bounds.

For an odd divisor m of n, ``delta(entry, n, m)`` is the least-absolute-value
representative of ``s//m - r//m - c//m`` modulo ``n/m``. Over any odd plex
of an even-order square those values sum to ``n/(2m)`` modulo ``n/m``; every
certificate below is a bound on that sum which misses the required residue.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .core import BadDivisor, BadParams, EntrySet, LatinError, LatinSquare

METHODS = ("StepType", "BotRows", "MatchingBound")
EXCLUDED = "Excluded"
INCONCLUSIVE = "Inconclusive"


class BadFactorization(LatinError):
    pass


def check_divisor(n: int, m: int) -> None:
    if m < 1 or m % 2 == 0 or n % m != 0:
        raise BadDivisor(f"m={m} is not an odd divisor of n={n}")


def odd_divisors(n: int) -> list[int]:
    return [m for m in range(1, n + 1, 2) if n % m == 0]


def delta(entry, n: int, m: int = 1) -> int:
    check_divisor(n, m)
    r, c, s = entry
    q = n // m
    v = (s // m - r // m - c // m) % q
    # tie at q/2 resolves to the positive representative
    return v - q if 2 * v > q else v


def delta_matrix(square: LatinSquare, m: int = 1) -> np.ndarray:
    """n x n integer array of delta values, one per cell."""
    n = square.order
    check_divisor(n, m)
    q = n // m
    idx = np.arange(n) // m
    v = (square.array.astype(np.int64) // m - idx[:, None] - idx[None, :]) % q
    return np.where(2 * v > q, v - q, v)


@dataclass(frozen=True)
class ResidueClass:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1 or not 0 <= self.value < self.modulus:
            raise ValueError(f"bad residue {self.value} mod {self.modulus}")

    def __contains__(self, t: int) -> bool:
        return (t - self.value) % self.modulus == 0

    def first_at_least(self, lo: int) -> int:
        return lo + (self.value - lo) % self.modulus

    def meets(self, lo: int, hi: int) -> bool:
        """Is some integer in [lo, hi] in this class?"""
        return lo <= hi and self.first_at_least(lo) <= hi


def required_residue(n: int, m: int) -> ResidueClass:
    """Residue forced on the delta sum of any odd plex (n even)."""
    check_divisor(n, m)
    q = n // m
    return ResidueClass((n // (2 * m)) % q, q)


def plex_delta_sum(entries: EntrySet | Iterable, n: int, m: int = 1) -> ResidueClass:
    check_divisor(n, m)
    total = sum(delta(e, n, m) for e in entries)
    q = n // m
    return ResidueClass(total % q, q)


def step_violations(square: LatinSquare, m: int, b: int) -> set[tuple[int, int]]:
    """Cells where floor(L_ij/m) = floor(i/m) + floor(j/m) (mod b) fails."""
    n = square.order
    if b * m != n or b % 2 or m % 2 == 0:
        raise BadFactorization(f"need n = b*m with b even and m odd; got n={n}, b={b}, m={m}")
    idx = np.arange(n) // m
    bad = (square.array.astype(np.int64) // m - idx[:, None] - idx[None, :]) % b != 0
    return {(int(i), int(j)) for i, j in zip(*np.nonzero(bad))}


@dataclass(frozen=True)
class Certificate:
    """A re-checkable record that ``square`` has no k-plex.

    ``sum_lo``/``sum_hi`` bound the delta_m sum of any k-plex; the square is
    excluded when that range misses ``required_value`` mod ``required_modulus``.
    """

    method: str
    square_digest: str
    k: int
    m: int
    sum_lo: int
    sum_hi: int
    required_value: int
    required_modulus: int
    conclusion: str

    @property
    def required(self) -> ResidueClass:
        return ResidueClass(self.required_value, self.required_modulus)

    @property
    def excluded(self) -> bool:
        return self.conclusion == EXCLUDED

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        data = json.loads(text)
        fields = set(cls.__dataclass_fields__)
        if set(data) != fields:
            raise ValueError(f"certificate fields {sorted(data)} != {sorted(fields)}")
        return cls(**data)


def verify_certificate(cert: Certificate, square: LatinSquare | None = None) -> bool:
    """Independent consistency check; trusts only the recorded bounds."""
    if cert.method not in METHODS or cert.conclusion not in (EXCLUDED, INCONCLUSIVE):
        return False
    if cert.k < 1 or cert.k % 2 == 0 or cert.m < 1 or cert.m % 2 == 0:
        return False
    if square is not None:
        n = square.order
        if square.digest() != cert.square_digest or n % cert.m or (n // cert.m) % 2:
            return False
        if (cert.required_modulus, cert.required_value) != (n // cert.m, n // (2 * cert.m)):
            return False
    if cert.excluded:
        return not cert.required.meets(cert.sum_lo, cert.sum_hi)
    return True


def _plex_prereqs(square: LatinSquare, k: int, m: int) -> int:
    n = square.order
    check_divisor(n, m)
    if (n // m) % 2:
        raise BadDivisor(f"n/m = {n // m} must be even")
    if k < 1 or k % 2 == 0:
        raise BadParams(f"certificates cover odd k only, got k={k}")
    return n


def _make(method, square, k, m, lo, hi, force_inconclusive=False) -> Certificate:
    req = required_residue(square.order, m)
    excluded = not force_inconclusive and not req.meets(lo, hi)
    return Certificate(
        method=method,
        square_digest=square.digest(),
        k=k,
        m=m,
        sum_lo=int(lo),
        sum_hi=int(hi),
        required_value=req.value,
        required_modulus=req.modulus,
        conclusion=EXCLUDED if excluded else INCONCLUSIVE,
    )


def _trivial_bound(n: int, k: int, m: int) -> int:
    return k * n * (n // (2 * m))


def steptype_certificate(square: LatinSquare, k: int, m: int) -> Certificate:
    """Exclusion for squares of step type with block size m (all deltas vanish)."""
    n = _plex_prereqs(square, k, m)
    if step_violations(square, m, n // m):
        t = _trivial_bound(n, k, m)
        return _make("StepType", square, k, m, -t, t, force_inconclusive=True)
    return _make("StepType", square, k, m, 0, 0)


def botrows_certificate(square: LatinSquare, k: int, m: int, r: int) -> Certificate:
    """Exclusion for squares of step type outside their last m*r rows.

    Needs k*m^2*r*(r-1) < n; any k-plex then has |delta sum| <= k*m*r*(r-1)/2.
    """
    n = _plex_prereqs(square, k, m)
    if r < 0 or m * r > n:
        raise BadParams(f"r={r} out of range for n={n}, m={m}")
    top = n - m * r
    bad = [cell for cell in step_violations(square, m, n // m) if cell[0] < top]
    if bad:
        t = _trivial_bound(n, k, m)
        return _make("BotRows", square, k, m, -t, t, force_inconclusive=True)
    bound = k * m * r * (r - 1) // 2
    inequality = k * m * m * r * (r - 1) < n
    cert = _make("BotRows", square, k, m, -bound, bound, force_inconclusive=not inequality)
    return cert


def _assignment_optimum(weights: np.ndarray, k: int, maximize: bool) -> int:
    """Best total weight of a 0/1 matrix with every row and column sum equal to k."""
    n = weights.shape[0]
    w = weights if maximize else -weights
    if k == 1:
        from scipy.optimize import linear_sum_assignment

        rows, cols = linear_sum_assignment(w, maximize=True)
        best = int(w[rows, cols].sum())
    else:
        import networkx as nx

        g = nx.DiGraph()
        for i in range(n):
            g.add_node(("r", i), demand=-k)
            g.add_node(("c", i), demand=k)
        for i in range(n):
            for j in range(n):
                g.add_edge(("r", i), ("c", j), capacity=1, weight=-int(w[i, j]))
        cost, _ = nx.network_simplex(g)
        best = -int(cost)
    return best if maximize else -best


def relaxation_bounds(weights: np.ndarray, k: int) -> tuple[int, int]:
    """(min, max) over k-regular row/column selections of the summed weights."""
    return (
        _assignment_optimum(weights, k, maximize=False),
        _assignment_optimum(weights, k, maximize=True),
    )


def _symbol_multipliers(square: LatinSquare, dm: np.ndarray, k: int, maximize: bool) -> np.ndarray:
    """Symbol-constraint duals of the plex LP, used as Lagrange multipliers.

    Only a heuristic choice of multipliers: the bound they give is evaluated
    exactly afterwards, so float error here cannot make a certificate wrong.
    """
    import scipy.sparse as sp
    from scipy.optimize import linprog

    n = square.order
    idx = np.arange(n * n)
    ones = np.ones(n * n)
    lines = (idx // n, idx % n, square.array.astype(np.intp).ravel())
    a_eq = sp.vstack([sp.csr_matrix((ones, (ln, idx)), shape=(n, n * n)) for ln in lines])
    cost = dm.ravel().astype(float)
    res = linprog(-cost if maximize else cost, A_eq=a_eq, b_eq=np.full(3 * n, float(k)),
                  bounds=(0, 1), method="highs")
    if res.status != 0:
        return np.zeros(n)
    duals = res.eqlin.marginals[2 * n:]
    return -duals if maximize else duals


def _lagrangian_bound(square: LatinSquare, dm: np.ndarray, k: int, maximize: bool, scale: int = 4) -> int:
    """Exact bound on the delta sum of a k-plex with symbol lines dualised.

    For integer multipliers mu (in units of 1/scale), any k-plex P satisfies
    scale * sum_P delta = sum_P (scale*delta - mu[sym]) + k * sum(mu), and the
    first term is at most the row/column k-factor optimum.
    """
    lam = _symbol_multipliers(square, dm, k, maximize)
    mu = np.rint(lam * scale).astype(np.int64)
    if not maximize:
        mu = -mu
    sign = 1 if maximize else -1
    w = scale * sign * dm.astype(np.int64) - mu[square.array.astype(np.intp)]
    best = _assignment_optimum(w, k, maximize=True) + k * int(mu.sum())
    # best / scale bounds sign * (delta sum), which is an integer
    return sign * (best // scale)


def matching_certificate(square: LatinSquare, k: int, m: int = 1) -> Certificate:
    """Exclusion from an exact k-regular bipartite optimum of the delta sum.

    A k-plex picks k cells in every row, column and symbol. Dropping the
    symbol lines leaves a bipartite k-factor problem whose exact optimum
    bounds the plex's delta sum. When that range still meets the required
    residue, the symbol lines are put back as Lagrange multipliers and the
    tighter bound is evaluated exactly.
    """
    _plex_prereqs(square, k, m)
    dm = delta_matrix(square, m)
    lo, hi = relaxation_bounds(dm, k)
    if required_residue(square.order, m).meets(lo, hi):
        lo = max(lo, _lagrangian_bound(square, dm, k, maximize=False))
        hi = min(hi, _lagrangian_bound(square, dm, k, maximize=True))
    return _make("MatchingBound", square, k, m, lo, hi)


# ---------------------------------------------------------------- bounds


@dataclass(frozen=True)
class LogBound:
    log10_value: float
    exact_form: str
    exact: Fraction | None = None

    def to_dict(self) -> dict:
        out = {"log10_value": self.log10_value, "exact_form": self.exact_form}
        if self.exact is not None:
            out["exact_numerator"] = str(self.exact.numerator)
            out["exact_denominator"] = str(self.exact.denominator)
        return out


def log10_fraction(x: Fraction) -> float:
    if x <= 0:
        raise ValueError("log10 of a non-positive number")
    return math.log10(x.numerator) - math.log10(x.denominator)


def extension_bound(n: int, k: int) -> LogBound:
    """Lower bound on completions of a k x n latin rectangle."""
    if not 0 <= k <= n:
        raise BadParams(f"need 0 <= k <= n, got n={n}, k={k}")
    f = math.factorial
    value = Fraction(f(n) ** (n - k) * f(n - k) ** n, n ** (n * (n - k)))
    form = f"{n}!^{n - k} * {n - k}!^{n} / {n}^{n * (n - k)}"
    return LogBound(log10_fraction(value), form, value)


def step_count_bound(a: int, m: int) -> LogBound:
    """log10 of (m/e^2)^(n^2), n = 2^a m: squares of order n without odd plexes."""
    if a < 1 or m < 1 or m % 2 == 0:
        raise BadParams(f"need a >= 1 and odd m >= 1, got a={a}, m={m}")
    n = 2**a * m
    log10 = n * n * (math.log10(m) - 2 * math.log10(math.e))
    return LogBound(log10, f"({m}/e^2)^{n * n}")


def step_count_exact(a: int, m: int) -> LogBound:
    """Exact rational count floor before Stirling: (m!^(2m) / m^(m^2))^(4^a)."""
    if a < 1 or m < 1 or m % 2 == 0:
        raise BadParams(f"need a >= 1 and odd m >= 1, got a={a}, m={m}")
    blocks = 4**a
    value = Fraction(math.factorial(m) ** (2 * m), m ** (m * m)) ** blocks
    return LogBound(log10_fraction(value), f"({m}!^{2 * m} / {m}^{m * m})^{blocks}", value)


def species_floor(n: int, mode: str) -> LogBound:
    """Finite lower bound on transversal-free species of even order n.

    ``mode="ThreeHalves"`` completes the first n - floor(sqrt n) rows of the
    cyclic square; ``mode="Quadratic"`` counts step-type squares with odd
    block size the odd part of n. Both are divided by 6 (n!)^3, the largest
    possible species size.
    """
    if n < 2 or n % 2:
        raise BadParams(f"species floor needs even n >= 2, got {n}")
    f = math.factorial
    species_size = 6 * f(n) ** 3
    if mode == "ThreeHalves":
        s = math.isqrt(n)
        value = Fraction(f(s) ** n * f(n) ** s, n ** (s * n) * species_size)
        form = f"({s}!)^{n} * ({n}!)^{s} / {n}^{s * n} / (6 * ({n}!)^3)"
    elif mode == "Quadratic":
        m = n
        while m % 2 == 0:
            m //= 2
        a = (n // m).bit_length() - 1
        base = step_count_exact(a, m)
        value = base.exact / species_size
        form = f"{base.exact_form} / (6 * ({n}!)^3)"
    else:
        raise BadParams(f"unknown mode {mode!r}; use 'Quadratic' or 'ThreeHalves'")
    return LogBound(log10_fraction(value), form, value)
