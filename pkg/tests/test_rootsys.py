from __future__ import annotations

import pytest

import qslab
from qslab.report import load_appendix_map, load_fixture_rows
from qslab.rootsys import (
    a_series_cartan,
    build_root_system,
    delta,
    fundamental_weight,
    height_symmetry_check,
    lee_witness,
)


def reflection_orbit_positive_roots(cartan):
    """Independent oracle: close the simple roots under all simple reflections.

    Walks the full Weyl orbit (positive and negative roots) instead of the
    additive closure, then keeps the vectors with nonnegative coordinates.
    """
    rank = len(cartan)
    simple = [tuple(1 if j == i else 0 for j in range(rank)) for i in range(rank)]
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        fresh = []
        for b in frontier:
            for j in range(rank):
                pair = sum(cartan[j][i] * b[i] for i in range(rank))
                image = tuple(
                    b[i] - (pair if i == j else 0) for i in range(rank)
                )
                if image not in seen:
                    seen.add(image)
                    fresh.append(image)
        frontier = fresh
    return {b for b in seen if all(c >= 0 for c in b)}


@pytest.mark.parametrize("label,count", [("E6", 36), ("E7", 63), ("E8", 120)])
def test_closure_matches_reflection_orbit(rs_map, label, count):
    rs = rs_map[label]
    oracle = reflection_orbit_positive_roots(rs.cartan)
    assert set(rs.positive_roots) == oracle
    assert len(rs.positive_roots) == count


@pytest.mark.parametrize(
    "label,h,total",
    [("E6", 12, 11), ("E7", 18, 17), ("E8", 30, 29)],
)
def test_coxeter_number_and_marks(rs_map, label, h, total):
    rs = rs_map[label]
    assert rs.coxeter_number == h
    assert sum(rs.marks) == total
    top = rs.positive_roots[rs.highest_root_index]
    assert top == rs.marks
    assert sum(top) == h - 1
    # strictly maximal height, and dominating every root coordinatewise
    others = [b for i, b in enumerate(rs.positive_roots) if i != rs.highest_root_index]
    assert all(sum(b) < h - 1 for b in others)
    assert all(all(bi <= ti for bi, ti in zip(b, top)) for b in others)


def test_roots_are_distinct_and_nonnegative(rs_map):
    for rs in rs_map.values():
        assert len(set(rs.positive_roots)) == len(rs.positive_roots)
        assert all(all(c >= 0 for c in b) for b in rs.positive_roots)
        assert all(1 <= ht <= rs.coxeter_number - 1 for ht in rs.heights)


def test_canonical_order_is_height_then_lex(rs_map):
    for rs in rs_map.values():
        keys = [(sum(b), b) for b in rs.positive_roots]
        assert keys == sorted(keys)


@pytest.mark.parametrize("label", ["E7", "E8"])
def test_appendix_fixtures_bit_exact(rs_map, label):
    rs = rs_map[label]
    rows = load_fixture_rows(label)
    amap = load_appendix_map(label)
    assert len(rows) == len(rs.positive_roots)
    assert sorted(amap) == list(range(1, len(rows) + 1))
    assert sorted(amap.values()) == list(range(1, len(rows) + 1))
    for no, height, coeffs in rows:
        root = rs.positive_roots[amap[no] - 1]
        assert root == coeffs, f"appendix row {no}"
        assert sum(root) == height, f"appendix row {no}"


def test_theta_is_adjoint_fundamental_weight(rs_map):
    assert rs_map["E6"].theta_weight == fundamental_weight(6, 2)
    assert rs_map["E7"].theta_weight == fundamental_weight(7, 1)
    assert rs_map["E8"].theta_weight == fundamental_weight(8, 8)


def test_pairing_appendix_root_97(e8):
    amap = load_appendix_map("E8")
    idx = amap[97] - 1
    assert e8.positive_roots[idx] == (2, 2, 3, 4, 3, 2, 1, 0)
    assert e8.pairing(fundamental_weight(8, 1), idx) == 2
    assert e8.pairing(fundamental_weight(8, 8), idx) == 0
    assert e8.pairing(e8.rho, idx) == 17
    # beta_97 equals w1 - w8 as a weight
    assert e8.root_as_weight(idx) == (1, 0, 0, 0, 0, 0, 0, -1)


def test_pairing_basis_duality(rs_map):
    for rs in rs_map.values():
        for i in range(1, rs.rank + 1):
            for j in range(1, rs.rank + 1):
                idx = rs.find_root(fundamental_weight(rs.rank, j))
                assert rs.pairing(fundamental_weight(rs.rank, i), idx) == (i == j)


def test_pairing_rho_is_height(rs_map):
    for rs in rs_map.values():
        for idx in range(len(rs.positive_roots)):
            assert rs.pairing(rs.rho, idx) == rs.heights[idx]


def test_e7_unit_pairing_multiset(e7):
    values = sorted(
        e7.pairing(fundamental_weight(7, 2), i) + e7.heights[i]
        for i in range(63)
        if e7.pairing(fundamental_weight(7, 7), i) == 1
    )
    expected = sorted(
        [19, 18, 17, 16, 15, 14, 14, 13, 12, 12, 11, 11, 10, 10, 10, 9, 9, 8, 8,
         7, 6, 6, 5, 4, 3, 2, 1]
    )
    assert values == expected


def test_delta_parities(rs_map):
    e7 = rs_map["E7"]
    assert delta(e7, 7) == 27
    assert all(delta(e7, i) % 2 == 1 for i in (2, 5, 7))
    assert all(delta(e7, i) % 2 == 0 for i in (1, 3, 4, 6))
    for label in ("E6", "E8"):
        rs = rs_map[label]
        assert all(delta(rs, i) % 2 == 0 for i in range(1, rs.rank + 1))


def test_lee_witness_simple_root(e7):
    idx = lee_witness(e7, 7, 1)
    assert e7.positive_roots[idx] == (0, 0, 0, 0, 0, 0, 1)


def test_lee_witness_properties(rs_map):
    for rs in rs_map.values():
        for i in range(1, rs.rank + 1):
            for r in range(1, rs.coxeter_number):
                try:
                    idx = lee_witness(rs, i, r)
                except LookupError:
                    continue
                assert rs.heights[idx] == r
                assert rs.positive_roots[idx][i - 1] == 1


def test_lee_witness_full_coverage_at_mark_one_nodes(rs_map):
    for rs in rs_map.values():
        for i in range(1, rs.rank + 1):
            if rs.marks[i - 1] == 1:
                for r in range(1, rs.coxeter_number):
                    lee_witness(rs, i, r)


def test_lee_witness_absence_at_top_height(e7):
    # the only height-17 root is the highest root, whose node-2 coefficient is 2
    with pytest.raises(LookupError):
        lee_witness(e7, 2, 17)


def test_lee_witness_range_validation(e6):
    with pytest.raises(ValueError):
        lee_witness(e6, 1, 0)
    with pytest.raises(ValueError):
        lee_witness(e6, 1, 12)


def test_height_symmetry_at_mark_one_nodes(rs_map):
    assert height_symmetry_check(rs_map["E6"], 1)
    assert height_symmetry_check(rs_map["E6"], 6)
    assert height_symmetry_check(rs_map["E7"], 7)


def test_height_symmetry_fails_at_higher_marks(e8):
    # E8 has no mark-1 node; at node 8 the unit-pairing counts pair heights
    # r with h-1-r rather than h-r, so the h-r count check is genuinely false.
    assert not height_symmetry_check(e8, 8)
    h = e8.coxeter_number
    counts = {}
    for b, ht in zip(e8.positive_roots, e8.heights):
        if b[7] == 1:
            counts[ht] = counts.get(ht, 0) + 1
    assert all(counts.get(r, 0) == counts.get(h - 1 - r, 0) for r in range(0, h))


def test_custom_type_a(a1):
    assert a1.positive_roots == ((1,),)
    assert a1.coxeter_number == 2
    a3 = build_root_system(a_series_cartan(3))
    assert len(a3.positive_roots) == 6
    assert a3.coxeter_number == 4
    oracle = reflection_orbit_positive_roots(a3.cartan)
    assert set(a3.positive_roots) == oracle


def test_invalid_cartan_matrices():
    with pytest.raises(ValueError):
        build_root_system([[2, -1], [0, 2]])  # not symmetric
    with pytest.raises(ValueError):
        build_root_system([[2, -2], [-2, 2]])  # entries outside {0, -1}
    with pytest.raises(ValueError):
        # affine 3-cycle: simply-laced entries but infinite type
        build_root_system([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
    with pytest.raises(ValueError):
        build_root_system([[2, 0], [0, 2]])  # reducible
    with pytest.raises(ValueError):
        build_root_system([[1]])  # bad diagonal
    with pytest.raises(ValueError):
        build_root_system("F4")


def test_to_root_basis_roundtrip(e6):
    w = (1, 0, 2, 0, 0, 1)
    coords = e6.to_root_basis(w)
    back = tuple(
        sum(e6.cartan[j][i] * coords[i] for i in range(6)) for j in range(6)
    )
    assert all(b == wi for b, wi in zip(back, w))
