"""Finite additive sets: interval boxes in the integer lattice and finite abelian groups.

Elements are plain tuples of ints (coordinate vectors).  Group families reduce
coordinates modulo per-coordinate moduli; the interval family lives in the
ambient lattice Z^d, so its addition is unreduced and may leave the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CapExceeded

# Specs whose cardinality exceeds this are rejected at construction so that
# index arithmetic stays comfortably inside machine-word range.
MAX_CARDINALITY = 10**7

INTERVAL = "interval"
CYCLIC = "cyclic"
ABELIAN = "abelian"
ELEMENTARY = "elementary"

GROUP_FAMILIES = (CYCLIC, ABELIAN, ELEMENTARY)

Element = tuple


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


def factorize(m: int) -> dict[int, int]:
    """Prime factorization by trial division, as {prime: exponent}."""
    if m < 1:
        raise ValueError(f"cannot factor {m}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    f = 5
    while f * f <= m:
        for p in (f, f + 2):
            while m % p == 0:
                out[p] = out.get(p, 0) + 1
                m //= p
        f += 6
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def totient(m: int) -> int:
    """Number of integers in [1, m] coprime to m."""
    if m < 1:
        raise ValueError("totient requires m >= 1")
    result = m
    for p in factorize(m):
        result -= result // p
    return result


def divisors(m: int) -> list[int]:
    """Sorted list of the positive divisors of m."""
    divs = [1]
    for p, e in factorize(m).items():
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def normalize_invariant_factors(factors) -> tuple[int, ...]:
    """Rewrite a product of cyclic factors as a divisibility chain n_1 | n_2 | ... | n_d.

    Each prime's powers are redistributed greedily, largest powers into the
    last factor, so the output chain presents the same group.
    """
    facs = list(factors)
    if not facs:
        raise ValueError("at least one factor required")
    if any(f < 2 for f in facs):
        raise ValueError("factors must be >= 2")
    by_prime: dict[int, list[int]] = {}
    for f in facs:
        for p, e in factorize(f).items():
            by_prime.setdefault(p, []).append(e)
    depth = max(len(v) for v in by_prime.values())
    chain = [1] * depth
    for p, exps in by_prime.items():
        padded = [0] * (depth - len(exps)) + sorted(exps)
        for i, e in enumerate(padded):
            chain[i] *= p**e
    assert all(c >= 2 for c in chain)
    return tuple(chain)


@dataclass(frozen=True)
class AdditiveSetSpec:
    """Description of the finite additive set under study.

    family: one of INTERVAL ([1,n]^d in Z^d), CYCLIC (Z/nZ), ABELIAN
    (Z/n_1 x ... x Z/n_d with n_1 | n_2 | ... | n_d), ELEMENTARY ((Z/pZ)^d).
    """

    family: str
    n: int = 0
    d: int = 1
    p: int = 0
    factors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.family == INTERVAL:
            if self.n < 1 or self.d < 1:
                raise ValueError("interval box requires n >= 1 and d >= 1")
        elif self.family == CYCLIC:
            if self.n < 1:
                raise ValueError("cyclic group requires n >= 1")
        elif self.family == ABELIAN:
            object.__setattr__(self, "factors", tuple(self.factors))
            if not self.factors:
                raise ValueError("abelian group requires at least one factor")
            if any(f < 2 for f in self.factors):
                raise ValueError("invariant factors must be >= 2")
            for a, b in zip(self.factors, self.factors[1:]):
                if b % a != 0:
                    raise ValueError(
                        "factors must form a divisibility chain; "
                        "use normalize_invariant_factors first"
                    )
        elif self.family == ELEMENTARY:
            if not is_prime(self.p):
                raise ValueError(f"{self.p} is not prime")
            if self.d < 1:
                raise ValueError("elementary p-group requires d >= 1")
        else:
            raise ValueError(f"unknown family {self.family!r}")
        if self.cardinality > MAX_CARDINALITY:
            raise CapExceeded(
                f"cardinality {self.cardinality} exceeds cap {MAX_CARDINALITY}"
            )

    @property
    def cardinality(self) -> int:
        if self.family == INTERVAL:
            return self.n**self.d
        if self.family == CYCLIC:
            return self.n
        if self.family == ABELIAN:
            return math.prod(self.factors)
        return self.p**self.d

    @property
    def dimension(self) -> int:
        if self.family == CYCLIC:
            return 1
        if self.family == ABELIAN:
            return len(self.factors)
        return self.d

    @property
    def moduli(self) -> tuple[int, ...]:
        """Per-coordinate modulus for group families."""
        if self.family == CYCLIC:
            return (self.n,)
        if self.family == ABELIAN:
            return self.factors
        if self.family == ELEMENTARY:
            return (self.p,) * self.d
        raise ValueError("interval boxes have no modulus")

    @property
    def is_group(self) -> bool:
        return self.family in GROUP_FAMILIES

    def invariant_factors(self) -> tuple[int, ...]:
        """Invariant-factor chain of a group family; () for the trivial group."""
        if self.family == CYCLIC:
            return (self.n,) if self.n >= 2 else ()
        if self.family == ABELIAN:
            return self.factors
        if self.family == ELEMENTARY:
            return (self.p,) * self.d
        raise ValueError("interval boxes have no invariant factors")

    @property
    def exponent(self) -> int:
        """Largest element order (last invariant factor); 1 for the trivial group."""
        chain = self.invariant_factors()
        return chain[-1] if chain else 1

    def __str__(self) -> str:
        if self.family == INTERVAL:
            return f"interval:{self.n}" if self.d == 1 else f"interval:{self.n},{self.d}"
        if self.family == CYCLIC:
            return f"cyclic:{self.n}"
        if self.family == ABELIAN:
            return "abelian:" + "x".join(str(f) for f in self.factors)
        return f"elementary:{self.p}^{self.d}"


def interval_box(n: int, d: int = 1) -> AdditiveSetSpec:
    return AdditiveSetSpec(INTERVAL, n=n, d=d)


def cyclic(n: int) -> AdditiveSetSpec:
    return AdditiveSetSpec(CYCLIC, n=n)


def abelian(*factors: int) -> AdditiveSetSpec:
    return AdditiveSetSpec(ABELIAN, factors=tuple(factors))


def elementary(p: int, d: int = 1) -> AdditiveSetSpec:
    return AdditiveSetSpec(ELEMENTARY, p=p, d=d)


def parse_set_spec(text: str) -> AdditiveSetSpec:
    """Parse compact CLI spec strings.

    Grammar: interval:n[,d] | cyclic:n | abelian:n1xn2x... | elementary:p^d
    """
    head, sep, tail = text.strip().partition(":")
    if not sep or not tail:
        raise ValueError(f"malformed set spec {text!r}")
    try:
        if head == INTERVAL:
            parts = [int(s) for s in tail.split(",")]
            if len(parts) == 1:
                return interval_box(parts[0])
            if len(parts) == 2:
                return interval_box(parts[0], parts[1])
            raise ValueError
        if head == CYCLIC:
            return cyclic(int(tail))
        if head == ABELIAN:
            return abelian(*[int(s) for s in tail.split("x")])
        if head == ELEMENTARY:
            p_str, sep2, d_str = tail.partition("^")
            return elementary(int(p_str), int(d_str) if sep2 else 1)
    except ValueError as exc:
        raise ValueError(f"malformed set spec {text!r}: {exc}") from None
    raise ValueError(f"unknown set family in {text!r}")


def identity(spec: AdditiveSetSpec) -> Element:
    """Identity of the ambient group (the lattice origin for interval boxes)."""
    return (0,) * spec.dimension


def in_box(spec: AdditiveSetSpec, x: Element) -> bool:
    """Membership of a lattice point in the interval box [1,n]^d."""
    if spec.family != INTERVAL:
        raise ValueError("in_box applies to interval boxes only")
    return len(x) == spec.d and all(1 <= c <= spec.n for c in x)


def is_valid_element(spec: AdditiveSetSpec, x) -> bool:
    if len(x) != spec.dimension:
        return False
    if spec.family == INTERVAL:
        return all(1 <= c <= spec.n for c in x)
    return all(0 <= c < m for c, m in zip(x, spec.moduli))


def check_element(spec: AdditiveSetSpec, x) -> None:
    if len(x) != spec.dimension:
        raise ValueError(
            f"dimension mismatch: element {x} vs dimension {spec.dimension}"
        )
    if not is_valid_element(spec, x):
        raise ValueError(f"element {x} out of range for {spec}")


def add(spec: AdditiveSetSpec, x: Element, y: Element) -> Element:
    """Coordinatewise sum; reduced for group families, ambient for intervals."""
    check_element(spec, x)
    check_element(spec, y)
    if spec.family == INTERVAL:
        return tuple(a + b for a, b in zip(x, y))
    return tuple((a + b) % m for a, b, m in zip(x, y, spec.moduli))


def scalar_mul(spec: AdditiveSetSpec, m: int, x: Element) -> Element:
    """Iterated sum m*x under the set's ambient group; m may be negative."""
    check_element(spec, x)
    if spec.family == INTERVAL:
        return tuple(m * a for a in x)
    return tuple((m * a) % mod for a, mod in zip(x, spec.moduli))


def element_order(spec: AdditiveSetSpec, x: Element) -> int:
    """Least positive m with m*x = 0; rejected for interval boxes."""
    if spec.family == INTERVAL:
        raise ValueError("order is infinite for nonzero lattice vectors")
    check_element(spec, x)
    order = 1
    for a, m in zip(x, spec.moduli):
        order = math.lcm(order, m // math.gcd(a, m))
    return order


def canonical_index(spec: AdditiveSetSpec, x: Element) -> int:
    """Row-major mixed-radix index of an element, in [0, |A|-1]."""
    check_element(spec, x)
    idx = 0
    if spec.family == INTERVAL:
        for c in x:
            idx = idx * spec.n + (c - 1)
    else:
        for c, m in zip(x, spec.moduli):
            idx = idx * m + c
    return idx


def element_at(spec: AdditiveSetSpec, i: int) -> Element:
    """Inverse of canonical_index."""
    if not 0 <= i < spec.cardinality:
        raise ValueError(f"index {i} out of range for {spec}")
    if spec.family == INTERVAL:
        radixes = (spec.n,) * spec.d
        offset = 1
    else:
        radixes = spec.moduli
        offset = 0
    coords = []
    for m in reversed(radixes):
        i, c = divmod(i, m)
        coords.append(c + offset)
    return tuple(reversed(coords))


def elements(spec: AdditiveSetSpec):
    """Iterate all elements in canonical-index order."""
    for i in range(spec.cardinality):
        yield element_at(spec, i)
