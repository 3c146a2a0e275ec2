"""Exhaustive enumeration of orderings: exact distributions of the longest
embedded progression length for small sets, and the parity-block structure
of orderings of Z/2^m Z with no 3-term progression subsequence.
"""

from __future__ import annotations

import functools
import hashlib
import itertools
import json
import math
import multiprocessing
import os
from dataclasses import dataclass

from . import __version__, groups, las
from .errors import CapExceeded, InternalInvariantError
from .groups import CYCLIC, INTERVAL, AdditiveSetSpec, totient

SERIAL_BUDGET = 10
PARALLEL_BUDGET = 12


@dataclass(frozen=True)
class DistributionTable:
    """counts[k] = number of orderings whose longest embedded progression
    has length k; the counts sum to |A|!."""

    spec: AdditiveSetSpec
    counts: tuple[int, ...]  # entry [k] for k = 0..|A|; [0] unused
    total: int

    def as_dict(self) -> dict[int, int]:
        return {k: c for k, c in enumerate(self.counts) if k >= 1}

    def row(self) -> list[int]:
        return list(self.counts[1:])


def _tally_serial(spec: AdditiveSetSpec, perms) -> list[int]:
    card = spec.cardinality
    engine = las.length_engine(spec)
    counts = [0] * (card + 1)
    if spec.is_group:
        pos = [0] * card
        length_of = engine.length_of_positions
        for perm in perms:
            for where, idx in enumerate(perm):
                pos[idx] = where
            counts[length_of(pos)] += 1
    else:
        length_of = engine.length_of_indices
        for perm in perms:
            counts[length_of(perm)] += 1
    return counts


def _perms_with_prefix(card: int, prefix: tuple[int, ...]):
    rest = [i for i in range(card) if i not in prefix]
    for tail in itertools.permutations(rest):
        yield prefix + tail


def _prefix_worker(args) -> list[int]:
    spec, prefix = args
    return _tally_serial(spec, _perms_with_prefix(spec.cardinality, prefix))


def _reflection_canonical(perm, n: int) -> bool:
    # Accept the representative of each orbit under value reflection
    # v -> n-1-v (0-based); the first non-self-paired entry decides.
    for v in perm:
        mirrored = n - 1 - v
        if v < mirrored:
            return True
        if v > mirrored:
            return False
    return True


def _tally_interval_reduced(spec: AdditiveSetSpec) -> list[int]:
    n = spec.cardinality
    engine = las.length_engine(spec)
    counts = [0] * (n + 1)
    length_of = engine.length_of_indices
    for perm in itertools.permutations(range(n)):
        if not _reflection_canonical(perm, n):
            continue
        counts[length_of(perm)] += 1
    return [2 * c for c in counts]


def _unit_canonical(perm, unit_rows) -> bool:
    # perm starts with 0; accept iff perm is lexicographically minimal among
    # its images under multiplication by units.
    for row in unit_rows:
        for v in perm:
            image = row[v]
            if image < v:
                return False
            if image > v:
                break
    return True


def _tally_cyclic_reduced(spec: AdditiveSetSpec) -> list[int]:
    n = spec.cardinality
    engine = las.length_engine(spec)
    counts = [0] * (n + 1)
    units = [u for u in range(2, n) if math.gcd(u, n) == 1]
    unit_rows = [[(u * v) % n for v in range(n)] for u in units]
    orbit = n * totient(n)
    pos = [0] * n
    length_of = engine.length_of_positions
    for tail in itertools.permutations(range(1, n)):
        perm = (0,) + tail
        if not _unit_canonical(perm, unit_rows):
            continue
        for where, idx in enumerate(perm):
            pos[idx] = where
        counts[length_of(pos)] += 1
    return [orbit * c for c in counts]


def distribution(
    spec: AdditiveSetSpec,
    *,
    symmetry_reduction: bool = False,
    parallel: int | None = None,
    budget: int | None = None,
    cache_dir: str | None = None,
) -> DistributionTable:
    """Tally the longest-progression length over all |A|! orderings.

    Enumeration is lexicographic on canonical indices.  Symmetry reduction
    (interval and cyclic families only) enumerates orbit representatives
    under the value-affine symmetries and multiplies; it is opt-in and is
    validated against unreduced enumeration in the test suite.
    """
    card = spec.cardinality
    limit = budget if budget is not None else (
        PARALLEL_BUDGET if parallel else SERIAL_BUDGET
    )
    if card > limit:
        raise CapExceeded(f"enumeration budget is |A| <= {limit}, got {card}")

    if cache_dir:
        cached = load_distribution(spec, cache_dir)
        if cached is not None:
            return cached

    if symmetry_reduction and card >= 2:
        if spec.family == INTERVAL and spec.d == 1:
            counts = _tally_interval_reduced(spec)
        elif spec.family == CYCLIC:
            counts = _tally_cyclic_reduced(spec)
        else:
            raise ValueError(
                "symmetry reduction supports the interval (d=1) and cyclic families"
            )
    elif parallel and parallel > 1 and card > 2:
        prefixes = [
            (i, j) for i in range(card) for j in range(card) if i != j
        ]
        with multiprocessing.Pool(parallel) as pool:
            partials = pool.map(
                _prefix_worker, [(spec, prefix) for prefix in prefixes]
            )
        counts = [sum(col) for col in zip(*partials)]
    else:
        counts = _tally_serial(spec, itertools.permutations(range(card)))

    total = math.factorial(card)
    if sum(counts) != total:
        raise InternalInvariantError(
            f"tally sums to {sum(counts)}, expected {total}"
        )
    table = DistributionTable(spec, tuple(counts), total)
    if cache_dir:
        save_distribution(table, cache_dir)
    return table


def three_free_count(n: int) -> int:
    """Number of orderings of Z/nZ with no 3-term progression subsequence:
    2^(n-1) when n is a power of two, else 0."""
    if n < 2:
        raise ValueError("three_free_count requires n >= 2")
    if n & (n - 1) == 0:
        return 2 ** (n - 1)
    return 0


@functools.lru_cache(maxsize=64)
def _three_term_index_triples(spec: AdditiveSetSpec) -> tuple[tuple[int, int, int], ...]:
    from . import counting

    return tuple(
        tuple(groups.canonical_index(spec, t) for t in terms)
        for _ap, terms in counting.iter_progressions(spec, 3)
    )


def is_three_free(ordering: las.Ordering) -> bool:
    """No 3-term progression subsequence appears in the ordering."""
    if len(ordering) < 3:
        return True
    pos = ordering.positions()
    for a, b, c in _three_term_index_triples(ordering.spec):
        if pos[a] < pos[b] < pos[c]:
            return False
    return True


def _assemble_three_free(
    m: int, s: las.Ordering, t: las.Ordering, evens_first: bool
) -> las.Ordering:
    evens = [2 * x[0] for x in s.seq]
    odds = [2 * x[0] + 1 for x in t.seq]
    block = evens + odds if evens_first else odds + evens
    return las.Ordering.from_indices(groups.cyclic(2**m), block)


def construct_three_free(
    m: int, s: las.Ordering, t: las.Ordering, evens_first: bool = True
) -> las.Ordering:
    """Build a 3-free ordering of Z/2^m Z from two 3-free orderings of
    Z/2^(m-1) Z: one block doubled, the other doubled plus one."""
    if m < 1:
        raise ValueError("m must be >= 1")
    half = groups.cyclic(2 ** (m - 1))
    for name, ordering in (("s", s), ("t", t)):
        if ordering.spec != half:
            raise ValueError(f"{name} must be an ordering of {half}")
        if not is_three_free(ordering):
            raise ValueError(f"{name} is not 3-free")
    return _assemble_three_free(m, s, t, evens_first)


def three_free_orderings(m: int) -> list[las.Ordering]:
    """All 3-free orderings of Z/2^m Z, generated by the block construction.

    The two halves are 3-free by induction, so the bulk generator skips the
    per-call re-verification of construct_three_free.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > 4:
        raise CapExceeded("three_free_orderings is capped at m <= 4 (2^15 orderings)")
    if m == 1:
        trivial = las.Ordering.from_indices(groups.cyclic(1), [0])
        return [
            _assemble_three_free(1, trivial, trivial, evens_first)
            for evens_first in (True, False)
        ]
    halves = three_free_orderings(m - 1)
    out = []
    for s in halves:
        for t in halves:
            for evens_first in (True, False):
                out.append(_assemble_three_free(m, s, t, evens_first))
    return out


def three_free_structure_check(ordering: las.Ordering) -> bool:
    """Parity-block test: one parity fills the first half, the other the
    second, and both halves contract recursively to 3-free orderings."""
    spec = ordering.spec
    if spec.family != CYCLIC or spec.n & (spec.n - 1) != 0:
        raise ValueError("structure check applies to Z/nZ with n a power of two")
    values = [x[0] for x in ordering.seq]
    return _structure_check_values(values)


def _structure_check_values(values: list[int]) -> bool:
    n = len(values)
    if n == 1:
        return True
    half = n // 2
    first, second = values[:half], values[half:]
    par = first[0] % 2
    if any(v % 2 != par for v in first) or any(v % 2 == par for v in second):
        return False
    return _structure_check_values([v // 2 for v in first]) and _structure_check_values(
        [v // 2 for v in second]
    )


# --- result cache ---------------------------------------------------------


def _counts_checksum(counts: tuple[int, ...]) -> str:
    payload = json.dumps(list(counts), separators=(",", ":")).encode()
    return hashlib.sha256(payload).hexdigest()


def _cache_path(spec: AdditiveSetSpec, cache_dir: str) -> str:
    name = str(spec).replace(":", "-").replace(",", "_").replace("^", "e")
    return os.path.join(cache_dir, f"{name}__v{__version__}.json")


def save_distribution(table: DistributionTable, cache_dir: str) -> str:
    os.makedirs(cache_dir, exist_ok=True)
    path = _cache_path(table.spec, cache_dir)
    doc = {
        "spec": str(table.spec),
        "tool_version": __version__,
        "counts": list(table.counts),
        "total": table.total,
        "checksum": _counts_checksum(table.counts),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
    return path


def load_distribution(spec: AdditiveSetSpec, cache_dir: str) -> DistributionTable | None:
    path = _cache_path(spec, cache_dir)
    if not os.path.exists(path):
        return None
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("spec") != str(spec) or doc.get("tool_version") != __version__:
        return None
    counts = tuple(doc["counts"])
    if doc.get("checksum") != _counts_checksum(counts):
        return None
    return DistributionTable(spec, counts, doc["total"])
