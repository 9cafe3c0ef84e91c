"""
Subsets of the coordinate set [s] = {1, ..., s} as integer bitmasks.

Coordinate j (1-based, as in all user-facing text and files) lives in bit
j - 1. The empty set is 0 and |u| is the popcount of u.
"""
from itertools import combinations
from typing import Iterable, Iterator, List, Sequence

from .config import MAX_ENUM_DIM
from .errors import CapacityError, DomainError, InputError

SubsetMask = int


# -------------------------------
# Mask helpers
# -------------------------------
def cardinality(u: SubsetMask) -> int:
    return u.bit_count()


def full_mask(s: int) -> SubsetMask:
    return (1 << s) - 1


def check_mask(u: SubsetMask, s: int) -> SubsetMask:
    if u < 0 or u >> s:
        raise InputError(f"subset mask {u:#x} has bits outside [1, {s}]")
    return u


def mask_from_coordinates(coords: Iterable[int], s: int | None = None) -> SubsetMask:
    u = 0
    for j in coords:
        if j < 1 or (s is not None and j > s):
            raise InputError(f"coordinate {j} outside [1, {s if s is not None else 'inf'}]")
        u |= 1 << (j - 1)
    return u


def coordinates(u: SubsetMask) -> List[int]:
    out = []
    j = 1
    while u:
        if u & 1:
            out.append(j)
        u >>= 1
        j += 1
    return out


def format_mask(u: SubsetMask) -> str:
    if u == 0:
        return "empty"
    return ",".join(str(j) for j in coordinates(u))


# -------------------------------
# Enumeration
# -------------------------------
def enumerate_subsets(s: int) -> range:
    """All 2^s subsets of [s] in increasing bits order."""
    if s < 1:
        raise InputError(f"dimension must be positive, got {s}")
    if s > MAX_ENUM_DIM:
        raise CapacityError(
            f"full enumeration of [{s}] needs 2^{s} subsets; cap is s <= {MAX_ENUM_DIM}"
        )
    return range(1 << s)


def submasks(u: SubsetMask) -> Iterator[SubsetMask]:
    """Every v with v ⊆ u, by submask descent (u first, empty set last)."""
    v = u
    while True:
        yield v
        if v == 0:
            return
        v = (v - 1) & u


def supersets(v: SubsetMask, s: int) -> Iterator[SubsetMask]:
    """Every u with v ⊆ u ⊆ [s]."""
    rest = full_mask(s) & ~v
    for w in submasks(rest):
        yield v | w


def sets_of_cardinality(s: int, k: int) -> Iterator[SubsetMask]:
    for combo in combinations(range(s), k):
        u = 0
        for b in combo:
            u |= 1 << b
        yield u


def sets_with_diameter(s: int, ell: int) -> Iterator[SubsetMask]:
    """
    Subsets of [s] with diameter exactly ell. For ell = 0 these are the
    empty set and the singletons; otherwise each set is fixed by its lowest
    coordinate (the anchor) and a free pattern on the ell - 1 interior
    positions.
    """
    if ell == 0:
        yield 0
        for b in range(s):
            yield 1 << b
        return
    if ell < 0 or ell > s - 1:
        return
    ends = 1 | (1 << ell)
    for pattern in range(1 << (ell - 1)):
        inner = pattern << 1
        for anchor in range(s - ell):
            yield (ends | inner) << anchor


# -------------------------------
# Diameter statistics
# -------------------------------
def diameter(u: SubsetMask) -> int:
    if u == 0:
        return 0
    lowest = (u & -u).bit_length() - 1
    return u.bit_length() - 1 - lowest


def weighted_diameter_sum(s: int, ell: int, x: float) -> float:
    """
    Sum of x^|u| over u ⊆ [s] with diam(u) = ell, as (s - ell) x^2 (1 + x)^(ell - 1).

    Valid for 1 <= ell <= s - 1. Diameter 0 (empty set plus singletons) is
    left to the caller.
    """
    if ell < 1 or ell > s - 1:
        raise DomainError(f"diameter {ell} outside [1, {s - 1}] for s={s}")
    return (s - ell) * x * x * (1.0 + x) ** (ell - 1)


def count_by_diameter(s: int, ell: int) -> int:
    if ell == 0:
        return s + 1
    if ell < 0 or ell > s - 1:
        return 0
    return (s - ell) * 2 ** (ell - 1)


def is_downward_closed(active: Iterable[SubsetMask]) -> bool:
    """
    True iff every subset of every member is a member. Checking that each
    member stays in the family after dropping any single element suffices.
    """
    family = active if isinstance(active, (set, frozenset)) else set(active)
    for u in family:
        rest = u
        while rest:
            bit = rest & -rest
            if u & ~bit not in family:
                return False
            rest ^= bit
    return True


def brute_force_diameter_counts(s: int) -> Sequence[int]:
    counts = [0] * s
    for u in enumerate_subsets(s):
        counts[diameter(u)] += 1
    return counts
