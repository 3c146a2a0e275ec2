"""Longest arithmetic subsequence of an ordering, by two independent
algorithms, plus exact counting of k-term progression subsequences.

The orbit walk scans, for every nonidentity step, the cycles of x -> x + step
and finds the longest stretch of consecutive cycle nodes whose positions in
the ordering strictly increase.  The pair DP keys chains of index pairs by
their common difference.  Each algorithm is the other's oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import counting, groups
from .errors import CapExceeded, InternalInvariantError
from .groups import INTERVAL, AdditiveSetSpec

PAIR_DP_CAP = 5000


class Ordering:
    """A sequence listing every element of the set exactly once."""

    __slots__ = ("spec", "seq", "indices")

    def __init__(self, spec: AdditiveSetSpec, seq):
        seq = tuple(tuple(x) for x in seq)
        if len(seq) != spec.cardinality:
            raise ValueError(
                f"ordering must list all {spec.cardinality} elements, got {len(seq)}"
            )
        indices = tuple(groups.canonical_index(spec, x) for x in seq)
        if len(set(indices)) != len(indices):
            raise ValueError("ordering repeats an element")
        self.spec = spec
        self.seq = seq
        self.indices = indices

    @classmethod
    def from_indices(cls, spec: AdditiveSetSpec, indices) -> "Ordering":
        return cls(spec, [groups.element_at(spec, i) for i in indices])

    def positions(self) -> list[int]:
        """positions()[canonical index] = position of that element in seq."""
        pos = [0] * len(self.indices)
        for where, idx in enumerate(self.indices):
            pos[idx] = where
        return pos

    def __len__(self) -> int:
        return len(self.seq)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Ordering)
            and self.spec == other.spec
            and self.seq == other.seq
        )

    def __hash__(self) -> int:
        return hash((self.spec, self.seq))

    def __repr__(self) -> str:
        return f"Ordering({self.spec}, {list(self.indices)})"


@dataclass(frozen=True)
class LasResult:
    """Length of the longest progression subsequence, with a witness.

    The witness is None only for singleton sets; otherwise base and step
    describe the progression and indices are the positions realizing it.
    """

    length: int
    base: Optional[tuple]
    step: Optional[tuple]
    indices: tuple[int, ...]


def _singleton_result() -> LasResult:
    return LasResult(1, None, None, (0,))


def step_cycles(spec: AdditiveSetSpec, step_idx: int) -> list[list[int]]:
    """Cycles of x -> x + step over canonical indices, for a group family."""
    r = groups.element_at(spec, step_idx)
    succ = counting._succ_table(spec, r)
    card = spec.cardinality
    seen = bytearray(card)
    cycles = []
    for start in range(card):
        if seen[start]:
            continue
        cyc = []
        cur = start
        while not seen[cur]:
            seen[cur] = 1
            cyc.append(cur)
            cur = succ[cur]
        cycles.append(cyc)
    return cycles


def longest_ap_orbitwalk(ordering: Ordering) -> LasResult:
    """Longest progression subsequence via per-step orbit walks.

    Group families only; runs in time |A| * (number of steps).  Among
    equal-length witnesses, the smallest (base index, step index) wins.
    """
    spec = ordering.spec
    if not spec.is_group:
        raise ValueError("orbit walk requires a group family; use the pair DP")
    card = spec.cardinality
    if card == 1:
        return _singleton_result()
    pos = ordering.positions()
    best_len = 1
    best_key = None  # (base_idx, step_idx)
    for step_idx in range(1, card):
        for cyc in step_cycles(spec, step_idx):
            m = len(cyc)
            if m < 2:
                continue
            walk = cyc + cyc[:-1]
            run = 1
            prev = pos[walk[0]]
            for t in range(1, len(walk)):
                cur = pos[walk[t]]
                if cur > prev:
                    run += 1
                else:
                    run = 1
                prev = cur
                if run >= best_len and run >= 2:
                    base_idx = cyc[(t - run + 1) % m]
                    key = (base_idx, step_idx)
                    if run > best_len or best_key is None or key < best_key:
                        best_len = run
                        best_key = key
    if best_key is None:
        raise InternalInvariantError("no progression pair found in a set of size >= 2")
    base_idx, step_idx = best_key
    base = groups.element_at(spec, base_idx)
    step = groups.element_at(spec, step_idx)
    terms = counting.progression_terms(spec, counting.APSpec(base, step, best_len))
    indices = tuple(pos[groups.canonical_index(spec, t)] for t in terms)
    return LasResult(best_len, base, step, indices)


def _interval_diff_key(diff: tuple, n: int) -> int:
    """Injective code for a lattice difference vector with entries in
    [-(n-1), n-1]."""
    key = 0
    radix = 2 * n - 1
    for c in diff:
        if not -(n - 1) <= c <= n - 1:
            raise InternalInvariantError(f"difference {diff} out of signed range")
        key = key * radix + (c + n - 1)
    return key


def longest_ap_pairdp(ordering: Ordering, *, cap: int = PAIR_DP_CAP) -> LasResult:
    """Longest progression subsequence via the pair dynamic program.

    Works for every family; differences for the interval family live in the
    ambient lattice.  Quadratic time and memory in |A|.
    """
    spec = ordering.spec
    card = spec.cardinality
    if card > cap:
        raise CapExceeded(f"pair DP capped at |A| <= {cap}")
    if card == 1:
        return _singleton_result()

    seq = ordering.seq
    n_pos = len(seq)
    is_interval = spec.family == INTERVAL
    moduli = None if is_interval else spec.moduli

    if is_interval:
        def diff_key(j: int, i: int) -> int:
            return _interval_diff_key(
                tuple(a - b for a, b in zip(seq[j], seq[i])), spec.n
            )
    else:
        def diff_key(j: int, i: int) -> int:
            key = 0
            for a, b, m in zip(seq[j], seq[i], moduli):
                key = key * m + (a - b) % m
            return key

    dp: list[dict[int, int]] = [dict() for _ in range(n_pos)]
    best_len = 2
    for j in range(1, n_pos):
        dpj = dp[j]
        for i in range(j):
            key = diff_key(j, i)
            prev = dp[i].get(key)
            length = 2 if prev is None else prev + 1
            dpj[key] = length
            if length > best_len:
                best_len = length

    # Reconstruct the lexicographically smallest (base index, step key)
    # witness among the chains of maximal length.
    pos_of = {elem: where for where, elem in enumerate(seq)}
    best_key = None
    best_chain = None
    for j in range(n_pos):
        for key, length in dp[j].items():
            if length != best_len:
                continue
            chain = [j]
            cur = j
            cur_key = key
            while True:
                prev_len = dp[cur].get(cur_key, 0)
                if prev_len <= 2:
                    break
                step = _decode_step(spec, cur_key)
                prev_elem = _subtract(spec, seq[cur], step)
                cur = pos_of[prev_elem]
                chain.append(cur)
            step = _decode_step(spec, key)
            first = _subtract(spec, seq[chain[-1]], step)
            chain.append(pos_of[first])
            chain.reverse()
            base_idx = groups.canonical_index(spec, seq[chain[0]])
            cand = (base_idx, key)
            if best_key is None or cand < best_key:
                best_key = cand
                best_chain = chain
    if best_chain is None:
        raise InternalInvariantError("pair DP found no chain in a set of size >= 2")
    indices = tuple(best_chain)
    base = seq[indices[0]]
    step = _decode_step(spec, best_key[1])
    return LasResult(best_len, base, step, indices)


def _decode_step(spec: AdditiveSetSpec, key: int):
    if spec.family == INTERVAL:
        radix = 2 * spec.n - 1
        coords = []
        for _ in range(spec.d):
            key, c = divmod(key, radix)
            coords.append(c - (spec.n - 1))
        return tuple(reversed(coords))
    return groups.element_at(spec, key)


def _subtract(spec: AdditiveSetSpec, x: tuple, y: tuple) -> tuple:
    if spec.family == INTERVAL:
        return tuple(a - b for a, b in zip(x, y))
    return tuple((a - b) % m for a, b, m in zip(x, y, spec.moduli))


def count_k_subsequences(
    ordering: Ordering, k: int, *, enum_cap: int = counting.DEFAULT_ENUM_CAP
) -> int:
    """Exact number of k-term progression subsequences of the ordering."""
    card = ordering.spec.cardinality
    if k < 2 or k > card:
        raise ValueError(f"k must be in [2, {card}], got {k}")
    pos_of = {elem: where for where, elem in enumerate(ordering.seq)}
    count = 0
    for _ap, terms in counting.iter_progressions(ordering.spec, k, enum_cap=enum_cap):
        p = pos_of[terms[0]]
        in_order = True
        for t in terms[1:]:
            q = pos_of[t]
            if q <= p:
                in_order = False
                break
            p = q
        if in_order:
            count += 1
    return count


class GroupLengthEngine:
    """Length-only orbit walk with precomputed walks, reusable across many
    orderings of one group spec."""

    def __init__(self, spec: AdditiveSetSpec):
        if not spec.is_group:
            raise ValueError("length engine requires a group family")
        self.spec = spec
        self.card = spec.cardinality
        walks = []
        for step_idx in range(1, self.card):
            for cyc in step_cycles(spec, step_idx):
                m = len(cyc)
                if m >= 2:
                    walks.append((m, cyc + cyc[:-1]))
        # longer cycles first so the m <= best skip fires often
        walks.sort(key=lambda mw: -mw[0])
        self.walks = walks

    def length_of_positions(self, pos: Sequence[int]) -> int:
        if self.card == 1:
            return 1
        best = 2
        for m, walk in self.walks:
            if m <= best:
                break
            run = 1
            prev = pos[walk[0]]
            for v in walk[1:]:
                cur = pos[v]
                if cur > prev:
                    run += 1
                    if run > best:
                        best = run
                else:
                    run = 1
                prev = cur
        return best

    def length_of_indices(self, idx_seq: Sequence[int]) -> int:
        pos = [0] * self.card
        for where, idx in enumerate(idx_seq):
            pos[idx] = where
        return self.length_of_positions(pos)


class IntervalLengthEngine:
    """Length-only pair DP for interval boxes, on canonical index sequences."""

    def __init__(self, spec: AdditiveSetSpec, *, cap: int = PAIR_DP_CAP):
        if spec.family != INTERVAL:
            raise ValueError("interval engine requires the interval family")
        if spec.cardinality > cap:
            raise CapExceeded(f"pair DP capped at |A| <= {cap}")
        self.spec = spec
        self.card = spec.cardinality
        if spec.d == 1:
            self.diffs = None
        else:
            # diffs[i][j] = injective key of element_i - element_j
            coords = [groups.element_at(spec, i) for i in range(self.card)]
            n = spec.n
            self.diffs = [
                [
                    _interval_diff_key(tuple(a - b for a, b in zip(x, y)), n)
                    for y in coords
                ]
                for x in coords
            ]

    def length_of_indices(self, idx_seq: Sequence[int]) -> int:
        n_pos = self.card
        if n_pos == 1:
            return 1
        best = 2
        diffs = self.diffs
        dp: list[dict[int, int]] = [dict() for _ in range(n_pos)]
        if diffs is None:
            for j in range(1, n_pos):
                vj = idx_seq[j]
                dpj = dp[j]
                for i in range(j):
                    key = vj - idx_seq[i]
                    prev = dp[i].get(key)
                    if prev is None:
                        dpj[key] = 2
                    else:
                        length = prev + 1
                        dpj[key] = length
                        if length > best:
                            best = length
        else:
            for j in range(1, n_pos):
                row = diffs[idx_seq[j]]
                dpj = dp[j]
                for i in range(j):
                    key = row[idx_seq[i]]
                    prev = dp[i].get(key)
                    if prev is None:
                        dpj[key] = 2
                    else:
                        length = prev + 1
                        dpj[key] = length
                        if length > best:
                            best = length
        return best


def length_engine(spec: AdditiveSetSpec, *, cap: int = PAIR_DP_CAP):
    """Engine with length_of_indices(), picking the family's algorithm."""
    if spec.family == INTERVAL:
        return IntervalLengthEngine(spec, cap=cap)
    return GroupLengthEngine(spec)
