import itertools
import random

import pytest

from apseq import counting, groups
from apseq.errors import CapExceeded
from apseq.nonabelian import (
    DihedralElement,
    FreeWord,
    dihedral_elements,
    dihedral_identity,
    invert_sequence,
    is_left_ap,
    is_right_ap,
    left_ap_count,
    right_ap_count,
)


def test_dihedral_relation():
    # flip * rotation = rotation^-1 * flip
    n = 5
    r = DihedralElement(n, 1, 0)
    s = DihedralElement(n, 0, 1)
    assert s * r == r.inverse() * s


def test_dihedral_group_axioms():
    n = 4
    elems = dihedral_elements(n)
    assert len(elems) == 2 * n
    e = dihedral_identity(n)
    for a in elems:
        assert a * e == a and e * a == a
        assert (a * a.inverse()).is_identity()
        for b in elems:
            for c in elems:
                assert (a * b) * c == a * (b * c)


def test_dihedral_mixed_groups_rejected():
    with pytest.raises(ValueError):
        DihedralElement(4, 1, 0) * DihedralElement(5, 1, 0)


def test_free_word_reduction():
    a = FreeWord.generator(1)
    b = FreeWord.generator(2)
    w = a * a.inverse()
    assert w.is_identity()
    assert (b * a * a.inverse() * b.inverse()).is_identity()
    assert (a * b).inverse().letters == ((2, -1), (1, -1))


def test_free_word_reduction_random_words():
    rnd = random.Random(2)
    for _ in range(100):
        letters = [
            (rnd.choice((1, 2)), rnd.choice((1, -1)))
            for _ in range(rnd.randrange(0, 21))
        ]
        w = FreeWord(tuple(letters))
        assert (w * w.inverse()).is_identity()
        assert (w.inverse() * w).is_identity()
        assert w.inverse().inverse() == w


def test_left_and_right_predicates_basic():
    a = FreeWord.generator(1)
    b = FreeWord.generator(2)
    seq = [a, b * a, b * b * a]
    assert is_left_ap(seq)
    # a left progression is also a right progression, with the step
    # conjugated by the base point: s_i = r^i s_0 gives
    # s_i^-1 s_{i+1} = s_0^-1 r s_0 for every i
    assert is_right_ap(seq)
    conj = a.inverse() * b * a
    assert seq[0].inverse() * seq[1] == conj
    assert seq[1].inverse() * seq[2] == conj


def test_left_iff_right_in_any_group():
    # consequence of the conjugation identity, checked exhaustively on D_4
    elems = dihedral_elements(4)
    for length in (2, 3):
        for seq in itertools.product(elems, repeat=length):
            assert is_left_ap(list(seq)) == is_right_ap(list(seq))


def test_constant_sequence_not_ap():
    a = FreeWord.generator(1)
    assert not is_left_ap([a, a, a])
    assert not is_right_ap([a, a])


def test_predicates_need_two_terms():
    with pytest.raises(ValueError):
        is_left_ap([FreeWord.generator(1)])


def test_mixed_types_rejected():
    with pytest.raises(TypeError):
        is_left_ap([FreeWord.generator(1), DihedralElement(4, 1, 0)])


def test_invert_sequence_involution():
    elems = dihedral_elements(5)
    rnd = random.Random(4)
    seq = [rnd.choice(elems) for _ in range(6)]
    assert invert_sequence(invert_sequence(seq)) == seq


def test_inverted_free_example_is_right_ap():
    a = FreeWord.generator(1)
    b = FreeWord.generator(2)
    seq = [a, b * a, b * b * a]
    inv = invert_sequence(seq)
    assert inv[0] == a.inverse()
    assert inv[1] == a.inverse() * b.inverse()
    assert inv[2] == a.inverse() * b.inverse() * b.inverse()
    assert is_right_ap(inv)
    # step of the inverted sequence
    assert inv[0].inverse() * inv[1] == b.inverse()


def test_inversion_bijection_exhaustive_d4():
    elems = dihedral_elements(4)
    for length in (2, 3, 4):
        for seq in itertools.product(elems, repeat=length):
            seq = list(seq)
            assert is_left_ap(seq) == is_right_ap(invert_sequence(seq))


def test_inversion_bijection_randomized_d8():
    elems = dihedral_elements(8)
    rnd = random.Random(6)
    for _ in range(2000):
        length = rnd.randrange(2, 7)
        seq = [rnd.choice(elems) for _ in range(length)]
        assert is_left_ap(seq) == is_right_ap(invert_sequence(seq))


def test_left_right_counts_equal():
    for n in range(2, 9):
        for k in range(2, min(6, 2 * n) + 1):
            assert left_ap_count(n, k) == right_ap_count(n, k), (n, k)


def test_counts_k2():
    for n in (2, 4, 5):
        order = 2 * n
        assert left_ap_count(n, 2) == order * (order - 1)


def test_counts_d5_k5():
    assert left_ap_count(5, 5) == 10 * 4
    assert right_ap_count(5, 5) == 10 * 4


def test_counts_cap_and_domain():
    with pytest.raises(CapExceeded):
        left_ap_count(101, 2)
    with pytest.raises(ValueError):
        left_ap_count(4, 1)
    with pytest.raises(ValueError):
        left_ap_count(4, 9)


def test_rotations_match_additive_predicate():
    # rotation subgroup of D_n is Z/n in multiplicative clothing
    n = 12
    spec = groups.cyclic(n)
    rnd = random.Random(8)
    for _ in range(200):
        length = rnd.randrange(2, 6)
        vals = rnd.sample(range(n), length)
        seq = [DihedralElement(n, v, 0) for v in vals]
        try:
            terms = counting.progression_terms(
                spec,
                counting.APSpec(
                    (vals[0],), ((vals[1] - vals[0]) % n,), length
                ),
            )
            additive = all((v,) == t for v, t in zip(vals, terms))
        except ValueError:
            additive = False
        assert is_left_ap(seq) == additive
        assert is_right_ap(seq) == additive
