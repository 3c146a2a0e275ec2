"""Exact counts, rigorous bounds, and a brute-force oracle for the number of
arithmetic-progression k-orderings of each set family.

A progression k-ordering is a sequence (a, a+r, ..., a+(k-1)r) of k distinct
members of the set with step r != 0.  It is determined by the pair (a, r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

from . import groups
from .errors import CapExceeded
from .groups import (
    CYCLIC,
    ELEMENTARY,
    INTERVAL,
    AdditiveSetSpec,
    divisors,
    factorize,
    totient,
)

CLOSED_FORM = "ClosedForm"
BRUTE_FORCE = "BruteForce"
BOUNDS_ONLY = "BoundsOnly"

DEFAULT_GROUP_BRUTE_CAP = 10**4
DEFAULT_INTERVAL_BRUTE_N = 50
DEFAULT_INTERVAL_BRUTE_D = 3
DEFAULT_ENUM_CAP = 10**7

# Element-order iteration is exact but linear in |Z|; above this size the
# divisor-counting route is used instead.
ORDER_ITERATION_CAP = 10**5


@dataclass(frozen=True)
class CountResult:
    """Exact count or (lower, upper) bounds, with provenance."""

    lower: int
    upper: int
    method: str
    exact: Optional[int] = None

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} > upper {self.upper}")
        if self.exact is not None and not (self.lower <= self.exact <= self.upper):
            raise ValueError(f"exact {self.exact} outside [{self.lower}, {self.upper}]")


@dataclass(frozen=True)
class APSpec:
    """A progression: base point, step, and length."""

    base: tuple
    step: tuple
    length: int


def progression_terms(spec: AdditiveSetSpec, ap: APSpec) -> tuple:
    """Generate and validate the terms of a progression; raises if invalid."""
    if ap.length < 1:
        raise ValueError("progression length must be >= 1")
    if ap.step == groups.identity(spec):
        raise ValueError("trivial step")
    terms = [ap.base]
    cur = ap.base
    for _ in range(ap.length - 1):
        if spec.family == INTERVAL:
            cur = tuple(a + b for a, b in zip(cur, ap.step))
        else:
            cur = tuple((a + b) % m for a, b, m in zip(cur, ap.step, spec.moduli))
        terms.append(cur)
    if len(set(terms)) != len(terms):
        raise ValueError("progression terms repeat")
    for t in terms:
        if not groups.is_valid_element(spec, t):
            raise ValueError(f"progression leaves the set at {t}")
    return tuple(terms)


def _exact(value: int, method: str = CLOSED_FORM) -> CountResult:
    return CountResult(value, value, method, value)


def count_interval(n: int, k: int) -> CountResult:
    """Exact number of progression k-orderings of [1,n].

    Summing 2(n-(k-1)r) over steps r = 1..m with m = floor((n-1)/(k-1)) gives
    2nm - (k-1)(m^2 + m); the factor 2 covers the two step signs.
    """
    if n < 2:
        raise ValueError("count_interval requires n >= 2")
    if k < 2 or k > n:
        raise ValueError(f"k must be in [2, {n}], got {k}")
    m = (n - 1) // (k - 1)
    return _exact(2 * n * m - (k - 1) * (m * m + m))


def bounds_interval(n: int, k: int) -> CountResult:
    """Closed-form bracket around count_interval(n, k).

    For k >= 3 the exact count lies within (n-k+2)(n-1)/(k-1) - k + 1 and
    (n-k+2)(n-1)/(k-1) + k - 3, rounded outward.  At k = 2 the fractional
    correction vanishes and both bounds equal the exact n(n-1).
    """
    if n < 2:
        raise ValueError("bounds_interval requires n >= 2")
    if k < 2 or k > n:
        raise ValueError(f"k must be in [2, {n}], got {k}")
    if k == 2:
        v = n * (n - 1)
        return CountResult(v, v, BOUNDS_ONLY)
    num = (n - k + 2) * (n - 1)
    den = k - 1
    lower = num // den - k + 1
    upper = -((-num) // den) + k - 3
    return CountResult(lower, upper, BOUNDS_ONLY)


def count_lattice(n: int, k: int, d: int) -> CountResult:
    """Exact count for the box [1,n]^d: (P + n)^d - n^d with P the 1-dim count."""
    if d < 1:
        raise ValueError("d must be >= 1")
    p1 = count_interval(n, k).exact
    return _exact((p1 + n) ** d - n**d)


def count_cyclic(n: int, k: int) -> CountResult:
    """Exact count for Z/nZ: n for k = 1, 0 for k > n, and otherwise
    n * (n - sum of totient(j) over divisors j of n with j < k)."""
    if n < 1:
        raise ValueError("count_cyclic requires n >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return _exact(n)
    if k > n:
        return _exact(0)
    short = sum(totient(j) for j in divisors(n) if j < k)
    return _exact(n * (n - short))


def _count_orders_below(spec: AdditiveSetSpec, k: int) -> int:
    """Number of elements of order < k, via Moebius counting over divisors."""
    moduli = spec.moduli
    expo = spec.exponent

    def order_dividing(t: int) -> int:
        return math.prod(math.gcd(t, m) for m in moduli)

    def moebius(m: int) -> int:
        fac = factorize(m)
        if any(e > 1 for e in fac.values()):
            return 0
        return -1 if len(fac) % 2 else 1

    total = 0
    for t in divisors(expo):
        if t >= k:
            continue
        total += sum(moebius(t // s) * order_dividing(s) for s in divisors(t))
    return total


def count_abelian_exact(spec: AdditiveSetSpec, k: int) -> CountResult:
    """Exact count for a finite abelian group: |Z| * #{r : order(r) >= k}.

    A progression k-ordering in a group is injective precisely when its step
    has order at least k, and every base point works.
    """
    if not spec.is_group:
        raise ValueError("count_abelian_exact requires a group family")
    if k < 2:
        raise ValueError("k must be >= 2")
    n = spec.cardinality
    if n <= ORDER_ITERATION_CAP:
        steps = sum(1 for x in groups.elements(spec) if groups.element_order(spec, x) >= k)
    else:
        steps = n - _count_orders_below(spec, k)
    return _exact(n * steps)


def bounds_abelian(spec: AdditiveSetSpec, k: int) -> CountResult:
    """Bracket for the abelian count from the invariant-factor chain.

    With j the first index where k <= n_j: upper is n * prod(n_j..n_d) - n;
    lower is the product of the early factors with the exact per-factor cyclic
    counts, an explicit undercount with no hidden constants.
    """
    if not spec.is_group:
        raise ValueError("bounds_abelian requires a group family")
    chain = spec.invariant_factors()
    if not chain:
        raise ValueError("trivial group has no valid k")
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > chain[-1]:
        raise ValueError(f"k={k} exceeds the largest invariant factor {chain[-1]}")
    j = next(i for i, f in enumerate(chain) if k <= f)
    n = spec.cardinality
    upper = n * math.prod(chain[j:]) - n
    lower = math.prod(chain[:j]) * math.prod(
        count_cyclic(f, k).exact for f in chain[j:]
    )
    return CountResult(lower, upper, BOUNDS_ONLY)


def count_for_set(spec: AdditiveSetSpec, k: int) -> CountResult:
    """Closed-form count dispatched on the family."""
    if spec.family == INTERVAL:
        if spec.d == 1:
            return count_interval(spec.n, k)
        return count_lattice(spec.n, k, spec.d)
    if spec.family == CYCLIC:
        return count_cyclic(spec.n, k)
    if spec.family == ELEMENTARY:
        if k < 2:
            raise ValueError("k must be >= 2")
        if k > spec.p:
            return _exact(0)
        return _exact(spec.p ** (2 * spec.d) - spec.p**spec.d)
    return count_abelian_exact(spec, k)


def _check_brute_caps(spec: AdditiveSetSpec, group_cap: int) -> None:
    if spec.family == INTERVAL:
        if spec.n > DEFAULT_INTERVAL_BRUTE_N or spec.d > DEFAULT_INTERVAL_BRUTE_D:
            raise CapExceeded(
                f"brute force capped at n <= {DEFAULT_INTERVAL_BRUTE_N}, "
                f"d <= {DEFAULT_INTERVAL_BRUTE_D} for interval boxes"
            )
    elif spec.cardinality > group_cap:
        raise CapExceeded(f"brute force capped at |A| <= {group_cap}")


def _interval_steps(spec: AdditiveSetSpec):
    """All candidate lattice steps with coordinates in [-(n-1), n-1], minus 0."""
    span = range(-(spec.n - 1), spec.n)
    zero = groups.identity(spec)

    def rec(prefix):
        if len(prefix) == spec.d:
            if prefix != zero:
                yield prefix
            return
        for c in span:
            yield from rec(prefix + (c,))

    yield from rec(())


def _succ_table(spec: AdditiveSetSpec, r: tuple) -> list[int]:
    """Canonical-index successor table for x -> x + r in a group family.

    Built per coordinate: entry i is the mixed-radix index of element_i + r,
    folded together as sums of per-coordinate stride contributions.
    """
    moduli = spec.moduli
    d = len(moduli)
    strides = [1] * d
    for i in range(d - 2, -1, -1):
        strides[i] = strides[i + 1] * moduli[i + 1]
    table = [0]
    for c in range(d):
        m, rc, s = moduli[c], r[c], strides[c]
        contrib = [((v + rc) % m) * s for v in range(m)]
        table = [base + off for base in table for off in contrib]
    return table


def brute_force_profile(
    spec: AdditiveSetSpec, k_max: int, *, group_cap: int = DEFAULT_GROUP_BRUTE_CAP
) -> list[int]:
    """Oracle counts for every k at once: entry [k] is the number of
    progression k-orderings, for 1 <= k <= k_max.

    Walks the progression from every candidate (base, step) pair, extending
    until a term repeats or leaves the set, and tallies the reach.  Knows
    nothing about element orders or closed forms.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    _check_brute_caps(spec, group_cap)
    card = spec.cardinality
    reach = [0] * (k_max + 2)
    if spec.family == INTERVAL:
        boxes = list(groups.elements(spec))
        n = spec.n
        for r in _interval_steps(spec):
            for a in boxes:
                cur = a
                length = 1
                while length < k_max:
                    cur = tuple(x + y for x, y in zip(cur, r))
                    if any(c < 1 or c > n for c in cur):
                        break
                    length += 1
                reach[length] += 1
    else:
        elems = list(groups.elements(spec))
        ident = groups.identity(spec)
        visited = [-1] * card
        stamp = 0
        for r in elems:
            if r == ident:
                continue
            succ = _succ_table(spec, r)
            for a_idx in range(card):
                stamp += 1
                visited[a_idx] = stamp
                cur = a_idx
                length = 1
                while length < k_max:
                    cur = succ[cur]
                    if visited[cur] == stamp:
                        break
                    visited[cur] = stamp
                    length += 1
                reach[length] += 1
    counts = [0] * (k_max + 1)
    running = 0
    for k in range(k_max, 1, -1):
        running += reach[k]
        counts[k] = running
    counts[1] = card
    return counts


def cycle_profile(spec: AdditiveSetSpec, k_max: int) -> list[int]:
    """Faster oracle for group families: same contract as brute_force_profile.

    Decomposes each step's successor table into cycles by explicit walking;
    a base reaches exactly min(cycle length, k_max) terms.  Uses only the
    successor structure, no order or totient formulas, so it remains an
    independent check of the closed forms.  Cross-validated against
    brute_force_profile in the test suite.
    """
    if not spec.is_group:
        raise ValueError("cycle_profile requires a group family")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    card = spec.cardinality
    reach = [0] * (k_max + 2)
    elems = list(groups.elements(spec))
    ident = groups.identity(spec)
    for r in elems:
        if r == ident:
            continue
        succ = _succ_table(spec, r)
        seen = bytearray(card)
        for start in range(card):
            if seen[start]:
                continue
            length = 0
            cur = start
            while not seen[cur]:
                seen[cur] = 1
                cur = succ[cur]
                length += 1
            reach[min(length, k_max)] += length
    counts = [0] * (k_max + 1)
    running = 0
    for k in range(k_max, 1, -1):
        running += reach[k]
        counts[k] = running
    counts[1] = card
    return counts


def brute_force_count(
    spec: AdditiveSetSpec, k: int, *, group_cap: int = DEFAULT_GROUP_BRUTE_CAP
) -> CountResult:
    """Ground-truth count of progression k-orderings by exhaustive enumeration.

    k = 1 counts the singletons (one per member of the set).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        _check_brute_caps(spec, group_cap)
        return CountResult(spec.cardinality, spec.cardinality, BRUTE_FORCE, spec.cardinality)
    counts = brute_force_profile(spec, k, group_cap=group_cap)
    return CountResult(counts[k], counts[k], BRUTE_FORCE, counts[k])


def iter_progressions(
    spec: AdditiveSetSpec, k: int, *, enum_cap: int = DEFAULT_ENUM_CAP
) -> Iterator[tuple[APSpec, tuple]]:
    """Yield every progression k-ordering of the set as (APSpec, terms).

    Each valid progression corresponds to exactly one (base, step) pair.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    card = spec.cardinality
    if spec.family == INTERVAL:
        n_pairs = card * ((2 * spec.n - 1) ** spec.d)
    else:
        n_pairs = card * card
    if n_pairs > enum_cap:
        raise CapExceeded(f"progression enumeration capped at {enum_cap} pairs")
    if spec.family == INTERVAL:
        for r in _interval_steps(spec):
            for a in groups.elements(spec):
                terms = [a]
                cur = a
                ok = True
                for _ in range(k - 1):
                    cur = tuple(x + y for x, y in zip(cur, r))
                    if not groups.is_valid_element(spec, cur):
                        ok = False
                        break
                    terms.append(cur)
                if ok:
                    yield APSpec(a, r, k), tuple(terms)
    else:
        ident = groups.identity(spec)
        moduli = spec.moduli
        for r in groups.elements(spec):
            if r == ident or groups.element_order(spec, r) < k:
                continue
            for a in groups.elements(spec):
                terms = [a]
                cur = a
                for _ in range(k - 1):
                    cur = tuple((x + y) % m for x, y, m in zip(cur, r, moduli))
                    terms.append(cur)
                yield APSpec(a, r, k), tuple(terms)


def totient_sum_margin(n: int, k: int) -> float:
    """Slack of the totient-sum lower bound for the cyclic count.

    Compares the exact cyclic count plus n*k*log(k+2)^2 against
    n^2 - (3/pi^2) n (k-1)^2; the log term stands in for the bound's
    unquantified asymptotic error.  Negative margins are diagnostic
    warnings, not errors.
    """
    q = count_cyclic(n, k).exact
    slack = n * k * math.log(k + 2) ** 2
    return q + slack - (n * n - (3 / math.pi**2) * n * (k - 1) ** 2)
