import math

import pytest

from apseq import groups, las
from apseq.enumeration import (
    construct_three_free,
    distribution,
    is_three_free,
    load_distribution,
    save_distribution,
    three_free_count,
    three_free_orderings,
    three_free_structure_check,
)
from apseq.errors import CapExceeded
from apseq.groups import cyclic, interval_box, totient

INTERVAL_ROWS = {
    1: [1],
    2: [0, 2],
    3: [0, 4, 2],
    4: [0, 10, 12, 2],
    5: [0, 20, 82, 16, 2],
    6: [0, 48, 516, 134, 20, 2],
    7: [0, 104, 3232, 1480, 198, 24, 2],
}

CYCLIC_ROWS = {
    1: [1],
    2: [0, 2],
    3: [0, 0, 6],
    4: [0, 8, 8, 8],
    5: [0, 0, 40, 60, 20],
    6: [0, 0, 468, 192, 48, 12],
    7: [0, 0, 462, 3150, 1176, 210, 42],
}


def test_interval_rows_small():
    for n, row in INTERVAL_ROWS.items():
        assert distribution(interval_box(n)).row() == row


def test_cyclic_rows_small():
    for n, row in CYCLIC_ROWS.items():
        assert distribution(cyclic(n)).row() == row


def test_row_sums():
    for n in range(1, 8):
        assert sum(distribution(interval_box(n)).row()) == math.factorial(n)
        assert sum(distribution(cyclic(n)).row()) == math.factorial(n)


def test_full_length_columns():
    for n in range(2, 8):
        assert distribution(interval_box(n)).row()[-1] == 2
        assert distribution(cyclic(n)).row()[-1] == n * totient(n)


def test_divisibility_of_rows():
    for n in range(2, 8):
        orbit = n * totient(n)
        for c in distribution(cyclic(n)).row():
            assert c % orbit == 0
        for c in distribution(interval_box(n)).row():
            assert c % 2 == 0


def test_budget_cap():
    with pytest.raises(CapExceeded):
        distribution(interval_box(11))
    with pytest.raises(CapExceeded):
        distribution(cyclic(13), parallel=2)


def test_symmetry_reduction_matches_unreduced():
    for n in range(2, 8):
        assert (
            distribution(interval_box(n), symmetry_reduction=True).row()
            == distribution(interval_box(n)).row()
        )
        assert (
            distribution(cyclic(n), symmetry_reduction=True).row()
            == distribution(cyclic(n)).row()
        )


def test_symmetry_reduction_unsupported_family():
    with pytest.raises(ValueError):
        distribution(groups.abelian(2, 2), symmetry_reduction=True)


def test_parallel_matches_serial():
    for spec in [interval_box(6), cyclic(6)]:
        assert distribution(spec, parallel=2).row() == distribution(spec).row()


def test_abelian_distribution_row_sum():
    table = distribution(groups.abelian(2, 4))
    assert sum(table.row()) == math.factorial(8)


def test_three_free_count_values():
    assert three_free_count(2) == 2
    assert three_free_count(4) == 8
    assert three_free_count(6) == 0
    assert three_free_count(8) == 128
    assert three_free_count(16) == 32768
    with pytest.raises(ValueError):
        three_free_count(1)


def test_three_free_count_matches_enumeration():
    for n in (2, 4, 6):
        row = distribution(cyclic(n)).row()
        assert row[1] == three_free_count(n)


def test_construct_base_case():
    built = set()
    trivial = las.Ordering.from_indices(cyclic(1), [0])
    for evens_first in (True, False):
        o = construct_three_free(1, trivial, trivial, evens_first)
        built.add(o.indices)
    assert built == {(0, 1), (1, 0)}


def test_construct_rejects_bad_input():
    not_free = las.Ordering.from_indices(cyclic(4), [0, 1, 2, 3])
    other = las.Ordering.from_indices(cyclic(4), [0, 2, 1, 3])
    with pytest.raises(ValueError):
        construct_three_free(3, not_free, other)
    with pytest.raises(ValueError):
        construct_three_free(2, other, other)


def test_construction_image_matches_enumeration_m3():
    image = {o.indices for o in three_free_orderings(3)}
    assert len(image) == 128
    spec = cyclic(8)
    import itertools

    direct = {
        perm
        for perm in itertools.permutations(range(8))
        if is_three_free(las.Ordering.from_indices(spec, perm))
    }
    assert image == direct


def test_construction_output_passes_checks():
    for o in three_free_orderings(3):
        assert three_free_structure_check(o)
        assert is_three_free(o)


def test_structure_check_examples():
    assert three_free_structure_check(las.Ordering.from_indices(cyclic(4), [0, 2, 1, 3]))
    assert not three_free_structure_check(
        las.Ordering.from_indices(cyclic(4), [0, 1, 2, 3])
    )
    with pytest.raises(ValueError):
        three_free_structure_check(las.Ordering.from_indices(cyclic(6), range(6)))


def test_structure_check_equals_three_freeness():
    import itertools

    for n in (4, 8):
        spec = cyclic(n)
        for perm in itertools.permutations(range(n)):
            o = las.Ordering.from_indices(spec, perm)
            assert three_free_structure_check(o) == is_three_free(o)
            if n == 8:
                break  # full n=8 equivalence runs in the m=3 image test
        if n == 8:
            # spot-check a deterministic slice of the 8! orderings
            perms = list(itertools.permutations(range(8)))[:2000]
            for perm in perms:
                o = las.Ordering.from_indices(spec, perm)
                assert three_free_structure_check(o) == is_three_free(o)


def test_cache_roundtrip(tmp_path):
    spec = cyclic(5)
    table = distribution(spec, cache_dir=str(tmp_path))
    loaded = load_distribution(spec, str(tmp_path))
    assert loaded is not None
    assert loaded.counts == table.counts
    # corrupted checksum is ignored
    path = save_distribution(table, str(tmp_path))
    import json

    doc = json.loads(open(path).read())
    doc["counts"][3] += 1
    open(path, "w").write(json.dumps(doc))
    assert load_distribution(spec, str(tmp_path)) is None


def test_cache_used_by_distribution(tmp_path):
    spec = cyclic(6)
    first = distribution(spec, cache_dir=str(tmp_path))
    again = distribution(spec, cache_dir=str(tmp_path))
    assert first.counts == again.counts
