import itertools

import pytest

from embednorm.errors import CapacityError, DomainError, InputError
from embednorm.subset_lattice import (
    brute_force_diameter_counts,
    cardinality,
    check_mask,
    coordinates,
    count_by_diameter,
    diameter,
    enumerate_subsets,
    format_mask,
    is_downward_closed,
    mask_from_coordinates,
    sets_of_cardinality,
    sets_with_diameter,
    submasks,
    supersets,
    weighted_diameter_sum,
)


class TestEnumeration:
    def test_singleton(self):
        assert list(enumerate_subsets(1)) == [0, 1]

    def test_cardinalities_s2(self):
        assert [cardinality(u) for u in enumerate_subsets(2)] == [0, 1, 1, 2]

    def test_powerset_size(self):
        assert len(enumerate_subsets(20)) == 2 ** 20

    def test_capacity(self):
        with pytest.raises(CapacityError):
            enumerate_subsets(31)

    def test_nonpositive_dimension(self):
        with pytest.raises(InputError):
            enumerate_subsets(0)

    def test_submasks(self):
        assert list(submasks(0b101)) == [0b101, 0b100, 0b001, 0]

    def test_supersets(self):
        assert sorted(supersets(0b01, 2)) == [0b01, 0b11]

    def test_sets_of_cardinality(self):
        got = sorted(sets_of_cardinality(5, 2))
        expected = sorted(u for u in range(32) if cardinality(u) == 2)
        assert got == expected

    @pytest.mark.parametrize("s", [1, 2, 5, 8])
    def test_sets_with_diameter_partition(self, s):
        for ell in range(s):
            got = sorted(sets_with_diameter(s, ell))
            expected = sorted(u for u in range(1 << s) if diameter(u) == ell)
            assert got == expected


class TestMasks:
    def test_coordinates_roundtrip(self):
        u = mask_from_coordinates([1, 3, 6])
        assert u == 0b100101
        assert coordinates(u) == [1, 3, 6]

    def test_format(self):
        assert format_mask(0) == "empty"
        assert format_mask(mask_from_coordinates([1, 3])) == "1,3"

    def test_coordinate_out_of_range(self):
        with pytest.raises(InputError):
            mask_from_coordinates([0])
        with pytest.raises(InputError):
            mask_from_coordinates([4], s=3)

    def test_check_mask(self):
        assert check_mask(3, 2) == 3
        with pytest.raises(InputError):
            check_mask(4, 2)


class TestDiameter:
    def test_empty(self):
        assert diameter(0) == 0

    def test_singleton(self):
        assert diameter(mask_from_coordinates([3])) == 0

    def test_spread(self):
        assert diameter(mask_from_coordinates([1, 4], s=5)) == 3


class TestWeightedDiameterSum:
    def test_unit_weight(self):
        assert weighted_diameter_sum(5, 2, 1.0) == 6

    def test_zero_weight(self):
        for s in range(2, 8):
            for ell in range(1, s):
                assert weighted_diameter_sum(s, ell, 0.0) == 0.0

    def test_adjacent_pairs(self):
        assert weighted_diameter_sum(5, 1, 0.5) == pytest.approx(1.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            weighted_diameter_sum(5, 0, 1.0)
        with pytest.raises(DomainError):
            weighted_diameter_sum(5, 5, 1.0)

    @pytest.mark.parametrize("x", [0.25, 1.0, 2.0])
    def test_against_enumeration(self, x):
        for s in range(2, 11):
            sums = [0.0] * s
            for u in range(1 << s):
                sums[diameter(u)] += x ** cardinality(u)
            for ell in range(1, s):
                assert weighted_diameter_sum(s, ell, x) == pytest.approx(sums[ell], rel=1e-12)


class TestCountByDiameter:
    def test_examples(self):
        assert count_by_diameter(5, 0) == 6
        assert count_by_diameter(5, 2) == 6
        assert count_by_diameter(5, 4) == 8

    def test_out_of_range(self):
        assert count_by_diameter(5, 5) == 0
        assert count_by_diameter(5, -1) == 0

    def test_against_enumeration(self):
        for s in range(1, 13):
            counts = brute_force_diameter_counts(s)
            assert list(counts) == [count_by_diameter(s, ell) for ell in range(s)]
            assert sum(counts) == 2 ** s


class TestDownwardClosed:
    def test_full_powerset(self):
        assert is_downward_closed({0, 1, 2, 3})

    def test_missing_singleton(self):
        assert not is_downward_closed({0, 3})

    def test_empty_only(self):
        assert is_downward_closed({0})

    def test_closure_of_generators(self):
        family = set()
        for u in (0b1011, 0b0110):
            family.update(submasks(u))
        assert is_downward_closed(family)
        assert not is_downward_closed(family - {0b0010})

    def test_accepts_iterables(self):
        assert is_downward_closed(itertools.chain([0], [1]))
