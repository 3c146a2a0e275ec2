"""Seeded uniform sampling of orderings and empirical checks of the
progression-count expectation law, the distribution of the longest
embedded progression, and the two-point concentration window.

All randomness comes from a fixed, portable 64-bit generator (splitmix64).
Each sample draws from its own substream derived from (seed, sample index),
so results are bit-identical no matter how samples are distributed across
workers.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass

from . import asymptotics, counting, groups, las
from .groups import AdditiveSetSpec

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _fmix64(z: int) -> int:
    """murmur3 64-bit finalizer; bijective avalanche mix."""
    z &= _M64
    z ^= z >> 33
    z = (z * 0xFF51AFD7ED558CCD) & _M64
    z ^= z >> 33
    z = (z * 0xC4CEB9FE1A85EC53) & _M64
    z ^= z >> 33
    return z


class SplitMix64:
    """splitmix64: state advances by a fixed odd constant, output is the
    finalizer of the state.  Documented, portable, and tiny."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & _M64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _M64
        z = self.state
        z ^= z >> 30
        z = (z * 0xBF58476D1CE4E5B9) & _M64
        z ^= z >> 27
        z = (z * 0x94D049BB133111EB) & _M64
        z ^= z >> 31
        return z

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by top-bits rejection; unbiased."""
        if n <= 0:
            raise ValueError("randbelow requires n >= 1")
        if n == 1:
            return 0
        bits = (n - 1).bit_length()
        shift = 64 - bits
        while True:
            v = self.next_u64() >> shift
            if v < n:
                return v


def substream(seed: int, index: int) -> SplitMix64:
    """Generator for sample `index` of an experiment with the given seed.

    The starting state is remixed so neighbouring substreams do not overlap
    as shifted copies of one splitmix sequence.
    """
    return SplitMix64(_fmix64((_fmix64(seed) + (index & _M64) * _GOLDEN) & _M64))


def _shuffled_indices(card: int, rng: SplitMix64) -> list[int]:
    """Unbiased swap shuffle of the canonical indices 0..card-1."""
    out = list(range(card))
    for i in range(card - 1, 0, -1):
        j = rng.randbelow(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def sample_ordering(spec: AdditiveSetSpec, rng: SplitMix64) -> las.Ordering:
    """Uniform random ordering of the set; advances the generator."""
    return las.Ordering.from_indices(spec, _shuffled_indices(spec.cardinality, rng))


@dataclass(frozen=True)
class ExperimentConfig:
    """A reproducible experiment: identical configs give identical results."""

    spec: AdditiveSetSpec
    samples: int
    seed: int
    k: int | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")


@dataclass(frozen=True)
class SubseqCountStats:
    """Sample statistics of the k-progression subsequence count."""

    mean: float
    stderr: float
    expected: float
    z: float
    samples: int


def _progression_index_tuples(spec: AdditiveSetSpec, k: int) -> list[tuple[int, ...]]:
    """All progression k-orderings as tuples of canonical indices."""
    return [
        tuple(groups.canonical_index(spec, t) for t in terms)
        for _ap, terms in counting.iter_progressions(spec, k)
    ]


def _nk_of_positions(progs: list[tuple[int, ...]], pos: list[int]) -> int:
    count = 0
    for terms in progs:
        p = pos[terms[0]]
        ok = True
        for t in terms[1:]:
            q = pos[t]
            if q <= p:
                ok = False
                break
            p = q
        if ok:
            count += 1
    return count


def _positions_of(perm: list[int], pos: list[int]) -> list[int]:
    for where, idx in enumerate(perm):
        pos[idx] = where
    return pos


def _nk_chunk(args) -> list[int]:
    spec, seed, start, stop, k = args
    progs = _progression_index_tuples(spec, k)
    card = spec.cardinality
    pos = [0] * card
    out = []
    for i in range(start, stop):
        perm = _shuffled_indices(card, substream(seed, i))
        out.append(_nk_of_positions(progs, _positions_of(perm, pos)))
    return out


def _chunks(samples: int, workers: int) -> list[tuple[int, int]]:
    size = (samples + workers - 1) // workers
    return [(s, min(s + size, samples)) for s in range(0, samples, size)]


def estimate_Nk_mean(
    config: ExperimentConfig, *, parallel: int | None = None
) -> SubseqCountStats:
    """Mean number of k-progression subsequences over sampled orderings,
    with its standard error and z-score against the exact expectation."""
    if config.k is None:
        raise ValueError("config.k is required")
    spec, m, seed, k = config.spec, config.samples, config.seed, config.k
    if parallel and parallel > 1:
        jobs = [(spec, seed, a, b, k) for a, b in _chunks(m, parallel)]
        with multiprocessing.Pool(parallel) as pool:
            values: list[int] = []
            for part in pool.map(_nk_chunk, jobs):
                values.extend(part)
    else:
        values = _nk_chunk((spec, seed, 0, m, k))

    # integer sums keep the statistics independent of chunking
    total = sum(values)
    total_sq = sum(v * v for v in values)
    mean = total / m
    expected = counting.count_for_set(spec, k).exact / math.factorial(k)
    if m > 1:
        var = (total_sq - total * total / m) / (m - 1)
        stderr = math.sqrt(max(var, 0.0) / m)
    else:
        stderr = 0.0
    if stderr == 0.0:
        z = 0.0 if mean == expected else math.copysign(math.inf, mean - expected)
    else:
        z = (mean - expected) / stderr
    return SubseqCountStats(mean, stderr, expected, z, m)


def _length_chunk(args) -> dict[int, int]:
    spec, seed, start, stop = args
    engine = las.length_engine(spec)
    card = spec.cardinality
    tally: dict[int, int] = {}
    if spec.is_group:
        pos = [0] * card
        for i in range(start, stop):
            perm = _shuffled_indices(card, substream(seed, i))
            L = engine.length_of_positions(_positions_of(perm, pos))
            tally[L] = tally.get(L, 0) + 1
    else:
        for i in range(start, stop):
            perm = _shuffled_indices(card, substream(seed, i))
            L = engine.length_of_indices(perm)
            tally[L] = tally.get(L, 0) + 1
    return tally


def _sample_length_counts(
    config: ExperimentConfig, parallel: int | None
) -> dict[int, int]:
    spec, m, seed = config.spec, config.samples, config.seed
    if parallel and parallel > 1:
        jobs = [(spec, seed, a, b) for a, b in _chunks(m, parallel)]
        with multiprocessing.Pool(parallel) as pool:
            parts = pool.map(_length_chunk, jobs)
        tally: dict[int, int] = {}
        for part in parts:
            for key, cnt in part.items():
                tally[key] = tally.get(key, 0) + cnt
        return tally
    return _length_chunk((spec, seed, 0, m))


def empirical_L_distribution(
    config: ExperimentConfig, *, parallel: int | None = None
) -> dict[int, float]:
    """Fraction of sampled orderings attaining each longest-progression
    length; keys are the observed lengths, sorted."""
    tally = _sample_length_counts(config, parallel)
    m = config.samples
    return {k: tally[k] / m for k in sorted(tally)}


def coverage_experiment(
    config: ExperimentConfig, *, parallel: int | None = None
) -> float:
    """Fraction of sampled orderings whose longest-progression length lands
    in the solved threshold window."""
    lo, hi = asymptotics.solve_threshold(config.spec).window
    tally = _sample_length_counts(config, parallel)
    inside = sum(cnt for k, cnt in tally.items() if lo <= k <= hi)
    return inside / config.samples
