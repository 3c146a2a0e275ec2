"""Left and right arithmetic progressions in non-abelian groups, at desk
scale: dihedral groups and reduced words in the rank-2 free group.

A left progression is (a, ra, r^2 a, ...), a right progression (a, ar,
ar^2, ...); elementwise inversion exchanges the two notions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceeded

DIHEDRAL_ORDER_CAP = 200


@dataclass(frozen=True)
class DihedralElement:
    """rotation^rot * flip^f in the dihedral group of order 2n, where the
    flip conjugates rotations to their inverses."""

    n: int
    rot: int
    flip: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dihedral index n must be >= 1")
        object.__setattr__(self, "rot", self.rot % self.n)
        object.__setattr__(self, "flip", self.flip % 2)

    def __mul__(self, other: "DihedralElement") -> "DihedralElement":
        if not isinstance(other, DihedralElement):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("elements of different dihedral groups")
        rot = self.rot - other.rot if self.flip else self.rot + other.rot
        return DihedralElement(self.n, rot, self.flip ^ other.flip)

    def inverse(self) -> "DihedralElement":
        if self.flip:
            return self
        return DihedralElement(self.n, -self.rot, 0)

    def is_identity(self) -> bool:
        return self.rot == 0 and self.flip == 0


def dihedral_identity(n: int) -> DihedralElement:
    return DihedralElement(n, 0, 0)


def dihedral_elements(n: int) -> list[DihedralElement]:
    return [DihedralElement(n, r, f) for f in (0, 1) for r in range(n)]


def _free_reduce(letters) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for gen, exp in letters:
        if gen not in (1, 2) or exp not in (1, -1):
            raise ValueError(f"bad letter ({gen}, {exp})")
        if out and out[-1][0] == gen and out[-1][1] == -exp:
            out.pop()
        else:
            out.append((gen, exp))
    return tuple(out)


@dataclass(frozen=True)
class FreeWord:
    """Reduced word over two generators; letters are (generator, +-1)."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _free_reduce(self.letters))

    @classmethod
    def generator(cls, gen: int, exp: int = 1) -> "FreeWord":
        return cls(((gen, 1),) * exp if exp >= 0 else ((gen, -1),) * (-exp))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        if not isinstance(other, FreeWord):
            return NotImplemented
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def is_identity(self) -> bool:
        return not self.letters


def _inverse_of(x):
    if isinstance(x, (DihedralElement, FreeWord)):
        return x.inverse()
    raise TypeError(f"unsupported element type {type(x).__name__}")


def _is_identity(x) -> bool:
    return x.is_identity()


def _check_same_group(seq) -> None:
    if len(seq) < 2:
        raise ValueError("sequence must have length >= 2")
    first = seq[0]
    for x in seq[1:]:
        if type(x) is not type(first):
            raise TypeError("mixed element types in sequence")
        if isinstance(x, DihedralElement) and x.n != first.n:
            raise ValueError("elements of different dihedral groups")


def is_left_ap(seq) -> bool:
    """True iff seq[i+1] * seq[i]^-1 is constant and not the identity."""
    _check_same_group(seq)
    ratio = seq[1] * _inverse_of(seq[0])
    if _is_identity(ratio):
        return False
    for i in range(1, len(seq) - 1):
        if seq[i + 1] * _inverse_of(seq[i]) != ratio:
            return False
    return True


def is_right_ap(seq) -> bool:
    """True iff seq[i]^-1 * seq[i+1] is constant and not the identity."""
    _check_same_group(seq)
    ratio = _inverse_of(seq[0]) * seq[1]
    if _is_identity(ratio):
        return False
    for i in range(1, len(seq) - 1):
        if _inverse_of(seq[i]) * seq[i + 1] != ratio:
            return False
    return True


def invert_sequence(seq) -> list:
    """Elementwise inverse, order preserved; an involution."""
    return [_inverse_of(x) for x in seq]


def _dihedral_ap_count(n: int, k: int, left: bool) -> int:
    order = 2 * n
    if order > DIHEDRAL_ORDER_CAP:
        raise CapExceeded(f"dihedral counts capped at group order {DIHEDRAL_ORDER_CAP}")
    if not 2 <= k <= order:
        raise ValueError(f"k must be in [2, {order}], got {k}")
    elems = dihedral_elements(n)
    count = 0
    for r in elems:
        if r.is_identity():
            continue
        for a in elems:
            terms = [a]
            cur = a
            ok = True
            for _ in range(k - 1):
                cur = (r * cur) if left else (cur * r)
                if cur in terms:
                    ok = False
                    break
                terms.append(cur)
            if ok:
                count += 1
    return count


def left_ap_count(n: int, k: int) -> int:
    """Number of injective k-term left progressions in the dihedral group
    of order 2n, by brute force."""
    return _dihedral_ap_count(n, k, left=True)


def right_ap_count(n: int, k: int) -> int:
    """Number of injective k-term right progressions in the dihedral group
    of order 2n, by brute force."""
    return _dihedral_ap_count(n, k, left=False)
