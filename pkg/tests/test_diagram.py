from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given

from conftest import diagrams
from helpers import library_fronts, oracle_fronts, same_cycle
from oracles import brute_crossings, gauss_linking, legendrian_lift, tb_pushoff
from openbook_forge.diagram import (
    DiagramError,
    DiagramParseError,
    crossings,
    format_diagram,
    invariants_report,
    linking_matrix,
    parse_diagram,
    require_admissible,
    thurston_bennequin,
    validate,
)
from openbook_forge import load_fixture


def test_fixture_tb_values(unknot, hopf, loose):
    assert [thurston_bennequin(c) for c in unknot.components] == [-1]
    assert [thurston_bennequin(c) for c in hopf.components] == [-1, -1]
    assert [thurston_bennequin(c) for c in loose.components] == [-3]


def test_fixture_cusps_and_writhe(unknot, hopf, loose):
    assert [(c.writhe, c.cusp_count) for c in unknot.components] == [(0, 2)]
    assert [(c.writhe, c.cusp_count) for c in hopf.components] == [(0, 2), (0, 2)]
    # the staircase has six cusps and no self crossings
    assert [(c.writhe, c.cusp_count) for c in loose.components] == [(0, 6)]


def test_hopf_linking(hopf):
    assert linking_matrix(hopf) == [[0, 1], [1, 0]]
    cs = crossings(hopf)
    assert len(cs) == 2
    assert all(c.sign == 1 and not c.is_self for c in cs)


def test_fixture_orientations_follow_the_default_rule(fixtures3):
    for d in fixtures3.values():
        for a, b in zip(oracle_fronts(d), library_fronts(d)):
            assert same_cycle(a, b)


def test_tb_matches_reeb_pushoff_on_fixtures(fixtures3):
    for d in fixtures3.values():
        for f, c in zip(library_fronts(d), d.components):
            assert tb_pushoff(f) == thurston_bennequin(c)


def test_selfcross_is_rejected():
    d = load_fixture("selfcross")
    rep = validate(d)
    assert rep.valid and not rep.admissible
    assert rep.self_crossings and "crosses itself" in rep.errors[0]
    with pytest.raises(DiagramError):
        require_admissible(d)


def test_invariants_report_keys(hopf):
    rep = invariants_report(hopf)
    assert set(rep) >= {"p", "q", "admissible", "components", "crossings", "writhe", "cusps", "tb", "linking_matrix"}
    assert rep["tb"] == [-1, -1]


def test_collinear_segments_with_disjoint_extents():
    # the loose staircase has v2 and v3 on the same line
    d = load_fixture("loose")
    assert d.v_intercepts[2] == d.v_intercepts[3]
    assert validate(d).admissible


def test_overlapping_collinear_segments_rejected():
    src = "h 1: 0\nh 2: 2\nv 1: 0\nv 2: 0\ncorner 1 1\ncorner 2 1\ncorner 1 2\ncorner 2 2\n"
    # v1 and v2 share the line w = 0 and the same extent
    assert not validate(parse_diagram(src)).valid


@pytest.mark.parametrize(
    "src, line, col, needle",
    [
        ("h 1: 0\nh 1: 2\n", 2, 3, "duplicate"),
        ("h 1: 0 v1 v2 v3\n", 1, 14, "arity"),
        ("h 1: 0\nfoo 2\n", 2, 1, "unknown"),
        ("h x: 0\n", 1, 3, "positive"),
        ("corner 1\n", 1, 1, "two indices"),
        ("orient 1 *\n", 1, 1, "orient"),
        ("cycle h1 h2 v1 v2\n", 1, 7, "alternate"),
    ],
)
def test_parse_errors_carry_positions(src, line, col, needle):
    with pytest.raises(DiagramParseError) as ei:
        parse_diagram(src)
    assert (ei.value.line, ei.value.column) == (line, col)
    assert needle in ei.value.message


def test_parse_rational_intercepts_and_comments():
    src = "# comment\nh 1: 1/2 v1 v2\nh 2: 7/3 v1 v2  # trailing\nv 1: -1\nv 2: 3/4\n"
    d = parse_diagram(src)
    assert d.h_intercepts == {1: Fraction(1, 2), 2: Fraction(7, 3)}
    assert d.v_intercepts == {1: Fraction(-1), 2: Fraction(3, 4)}
    assert len(d.corners) == 4 and validate(d).admissible


def test_cycle_declaration_sets_orientation():
    src = "h 1: 0\nh 2: 1\nv 1: 0\nv 2: 1\ncycle h1 v1 h2 v2\n"
    fwd = parse_diagram(src).components[0]
    rev = parse_diagram(src.replace("cycle h1 v1 h2 v2", "cycle h1 v2 h2 v1")).components[0]
    assert list(fwd.points) != list(rev.points)
    assert fwd.counterclockwise != rev.counterclockwise


def test_format_roundtrip_fixtures(fixtures3):
    for d in fixtures3.values():
        assert parse_diagram(format_diagram(d)) == d


@given(diagrams())
def test_format_roundtrip_random(d):
    back = parse_diagram(format_diagram(d))
    assert back == d
    assert [list(c.points) for c in back.components] == [list(c.points) for c in d.components]


@given(diagrams())
def test_tb_equals_pushoff_linking(d):
    for f, c in zip(library_fronts(d), d.components):
        assert tb_pushoff(f) == thurston_bennequin(c)


@given(diagrams())
def test_tb_does_not_depend_on_orientation(d):
    cls = d.__class__
    plain = cls(d.h_intercepts, d.v_intercepts, d.corners)
    flipped = cls(d.h_intercepts, d.v_intercepts, d.corners, {c.index: -1 for c in plain.components})
    for a, b in zip(plain.components, flipped.components):
        assert same_cycle(list(a.points), list(b.points)[::-1])
        assert thurston_bennequin(a) == thurston_bennequin(b)
    # reversing one component of a link flips the sign of its linking numbers
    if len(plain.components) == 2:
        one = cls(d.h_intercepts, d.v_intercepts, d.corners, {1: -1})
        assert linking_matrix(one)[0][1] == -linking_matrix(plain)[0][1]


@given(diagrams(components=2))
def test_linking_matches_gauss_integral(d):
    fr = library_fronts(d)
    # the oracle trace finds the same unoriented cycles
    for f in oracle_fronts(d):
        assert any(same_cycle(f, g) or same_cycle(f[::-1], g) for g in fr)
    lk = linking_matrix(d)
    assert lk[0][1] == lk[1][0] == gauss_linking(legendrian_lift(fr[0]), legendrian_lift(fr[1]))


@given(diagrams())
def test_crossings_match_brute_force(d):
    lib = sorted(c.position for c in crossings(d))
    assert lib == brute_crossings(library_fronts(d))


@given(diagrams())
def test_tb_is_writhe_minus_half_cusps(d):
    for c in d.components:
        assert c.cusp_count % 2 == 0
        assert thurston_bennequin(c) == c.writhe - c.cusp_count // 2


@given(diagrams())
def test_random_diagrams_are_admissible(d):
    assert validate(d).admissible
