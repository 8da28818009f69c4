import math

import pytest

from scatterlen_cli.core.symbolic import (
    Necklace, adjacency_matrix, canonical_rotation, count_periodic_points, cycle_count_check,
    enumerate_necklaces, format_word, is_admissible, map_entropy, parse_word, perron_eigenvalue,
    prime_cycle_count, primitive_root,
)
from scatterlen_cli.utils.errors import ConfigurationError


def words(kappa, m):
    return [n.representative for n in enumerate_necklaces(kappa, m)]


def test_short_necklaces():
    assert words(3, 2) == [(1, 2), (1, 3), (2, 3)]
    assert words(3, 3) == [(1, 2, 3), (1, 3, 2)]
    assert words(3, 4) == [(1, 2, 1, 3), (1, 2, 3, 2), (1, 3, 2, 3)]


@pytest.mark.parametrize("m, expected", [(2, 3), (3, 2), (4, 3), (5, 6), (6, 9), (7, 18), (8, 30), (12, 335)])
def test_three_disk_cycle_counts(m, expected):
    assert sum(1 for _ in enumerate_necklaces(3, m)) == expected
    assert prime_cycle_count(3, m) == expected


def test_census_to_twelve():
    assert sum(prime_cycle_count(3, m) for m in range(2, 13)) == 747


@pytest.mark.parametrize("kappa", [3, 4, 5])
def test_enumeration_output_is_canonical(kappa):
    for m in range(2, 7):
        found = words(kappa, m)
        assert found == sorted(found)
        assert len(set(found)) == len(found)
        for w in found:
            assert is_admissible(w, cyclic=True)
            assert canonical_rotation(w) == w
            assert primitive_root(w)[1] == 1
        assert len(found) == prime_cycle_count(kappa, m)


def test_cycle_count_identity_to_fourteen():
    rows = cycle_count_check(3, 14)
    assert all(row.identity_holds for row in rows)
    assert [row.cycles for row in rows[:4]] == [0, 3, 2, 3]


def test_cycle_count_identity_by_moebius_for_four_disks():
    rows = cycle_count_check(4, 10, enumerate_cycles=False)
    assert all(row.identity_holds for row in rows)


def test_traces():
    for n in range(1, 15):
        assert count_periodic_points(3, n) == 2 ** n + 2 * (-1) ** n


def test_entropy():
    assert map_entropy(3) == pytest.approx(math.log(2), abs=1e-12)
    assert perron_eigenvalue(adjacency_matrix(3)) == pytest.approx(2.0, abs=1e-10)
    assert perron_eigenvalue(adjacency_matrix(5)) == pytest.approx(4.0, abs=1e-10)


def test_kappa_validation():
    with pytest.raises(ConfigurationError):
        adjacency_matrix(2)


def test_necklace_validation():
    with pytest.raises(ValueError, match="admissible"):
        Necklace((1, 1))
    with pytest.raises(ValueError, match="primitive"):
        Necklace((1, 2, 1, 2))
    with pytest.raises(ValueError, match="minimal rotation"):
        Necklace((2, 1))
    assert Necklace.from_word((2, 3, 1)) == Necklace((1, 2, 3))
    assert str(Necklace((1, 3, 2))) == "132"


def test_word_text_form():
    assert format_word((1, 2, 3)) == "123"
    assert format_word((1, 10, 2)) == "1.10.2"
    assert parse_word("1.10.2") == (1, 10, 2)
    assert parse_word("132") == (1, 3, 2)
    with pytest.raises(ValueError):
        parse_word("1x")


def test_primitive_root():
    assert primitive_root((1, 2, 1, 2, 1, 2)) == ((1, 2), 3)
    assert primitive_root((1, 2, 3)) == ((1, 2, 3), 1)
