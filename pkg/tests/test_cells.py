from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import diagrams
from oracles import induced_connected, raster_cells
from openbook_forge.cells import (
    DisconnectedComplex,
    check_order,
    cells_inside,
    enumerate_cells,
    normalize,
    order_cells,
)
from openbook_forge.diagram import parse_diagram
from openbook_forge.generate import comb_square, diagram_from_cycles, random_diagram


def test_fixture_cell_counts(unknot, hopf, loose):
    assert enumerate_cells(normalize(unknot)).m == 1
    assert enumerate_cells(normalize(hopf)).m == 7
    assert enumerate_cells(normalize(loose)).m == 4


def test_hopf_supports_overlap_in_one_cell(hopf):
    cc = enumerate_cells(normalize(hopf))
    a, b = (set(v) for _, v in sorted(cc.per_component.items()))
    assert len(a) == len(b) == 4
    assert a & b == {4}


def test_loose_cells_form_a_path(loose):
    cc = enumerate_cells(normalize(loose))
    assert sorted(cc.adjacency) == [(1, 2), (2, 3), (3, 4)]
    assert cc.order == [1, 2, 3, 4]


def test_ids_sorted_by_height(hopf):
    cc = enumerate_cells(normalize(hopf))
    keys = [(c.u0 + c.w0, c.u0, c.w0) for c in cc.cells]
    assert keys == sorted(keys)
    assert [c.id for c in cc.cells] == list(range(1, cc.m + 1))


def test_normalize_maps_to_consecutive_integers():
    d = parse_diagram("h 1: -7/3 v1 v2\nh 2: 11/2 v1 v2\nv 1: 1/5\nv 2: 9\n")
    nd = normalize(d)
    assert sorted(nd.h_intercepts.values()) == [0, 1]
    assert sorted(nd.v_intercepts.values()) == [0, 1]
    assert enumerate_cells(nd).m == 1


def test_disconnected_complex_raises():
    d = diagram_from_cycles([[(0, 0), (1, 0), (1, 1), (0, 1)], [(3, 3), (4, 3), (4, 4), (3, 4)]])
    with pytest.raises(DisconnectedComplex) as ei:
        enumerate_cells(normalize(d))
    assert ei.value.pieces == 2


def test_disconnected_complex_without_check():
    d = diagram_from_cycles([[(0, 0), (1, 0), (1, 1), (0, 1)], [(3, 3), (4, 3), (4, 4), (3, 4)]])
    cc = enumerate_cells(normalize(d), check_connected=False)
    assert cc.m == 2 and cc.adjacency == []


def test_check_order_rejects_gaps(loose):
    cc = enumerate_cells(normalize(loose))
    assert check_order(cc, [3, 2, 4, 1]) == [3, 2, 4, 1]
    with pytest.raises(ValueError):
        check_order(cc, [1, 3, 2, 4])
    with pytest.raises(ValueError):
        check_order(cc, [1, 2, 3])


def test_order_from_other_root(hopf):
    cc = enumerate_cells(normalize(hopf))
    order = order_cells(cc, 7)
    assert order[0] == 7 and sorted(order) == list(range(1, 8))
    with pytest.raises(ValueError):
        order_cells(cc, 99)


def test_cells_inside(hopf):
    nd = normalize(hopf)
    assert cells_inside(nd, 1) | cells_inside(nd, 2) == set(range(1, 8))


def test_comb_square_counts():
    nd = normalize(comb_square(100))
    cc = enumerate_cells(nd)
    assert cc.m == 9901
    assert len(nd.h_intercepts) == len(nd.v_intercepts) == 199


def test_perf_fixture_is_the_comb():
    from openbook_forge import load_fixture

    assert load_fixture("perf100") == comb_square(100)


def _uw_cycles(nd):
    return [list(c.points) for c in nd.components]


@given(diagrams(max_cells=14))
def test_cells_match_ray_casting(d):
    nd = normalize(d)
    cc = enumerate_cells(nd)
    union, per = raster_cells(_uw_cycles(nd))
    assert {(c.u0, c.w0) for c in cc.cells} == union
    for k, ids in cc.per_component.items():
        assert {(cc.cell(i).u0, cc.cell(i).w0) for i in ids} == per[k]


@given(diagrams(max_cells=14))
def test_adjacency_is_shared_edges(d):
    cc = enumerate_cells(normalize(d))
    pos = {c.id: (c.u0, c.w0) for c in cc.cells}
    brute = set()
    for i in pos:
        for j in pos:
            (a, b), (c, e) = pos[i], pos[j]
            if i < j and abs(a - c) + abs(b - e) == 1:
                brute.add((i, j))
    assert set(cc.adjacency) == brute
    for i, j in cc.adjacency:
        assert cc.shared_edge(i, j) is not None


@given(diagrams(max_cells=14), st.data())
def test_every_order_prefix_connected(d, data):
    cc = enumerate_cells(normalize(d))
    root = data.draw(st.integers(1, cc.m))
    for order in (cc.order, order_cells(cc, root)):
        pos = {c.id: (c.u0, c.w0) for c in cc.cells}
        for k in range(1, cc.m + 1):
            assert induced_connected(pos[i] for i in order[:k])


@given(diagrams(max_cells=12), st.integers(0, 2**32 - 1))
def test_cells_invariant_under_warping(d, seed):
    # any strictly increasing respacing of the intercepts gives the same complex
    rng = random.Random(seed)

    def warp(table):
        values = sorted(set(table.values()))
        out, x = {}, Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        for v in values:
            out[v] = x
            x += Fraction(rng.randint(1, 9), rng.randint(1, 7))
        return {k: out[v] for k, v in table.items()}

    w = d.__class__(warp(d.h_intercepts), warp(d.v_intercepts), d.corners, d.orientations, d.hints)
    ca, cb = enumerate_cells(normalize(d)), enumerate_cells(normalize(w))
    assert [(c.u0, c.w0) for c in ca.cells] == [(c.u0, c.w0) for c in cb.cells]
    assert ca.adjacency == cb.adjacency and ca.order == cb.order


def test_normalized_intercepts_are_integers(fuzz_diagrams):
    for d in fuzz_diagrams:
        nd = normalize(d)
        for x in list(nd.h_intercepts.values()) + list(nd.v_intercepts.values()):
            assert isinstance(x, Fraction) and x.denominator == 1
