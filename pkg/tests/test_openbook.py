from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import diagrams
from oracles import front_point, gauss_linking, group_of, legendrian_lift, push_reeb
from openbook_forge.cells import enumerate_cells, normalize
from openbook_forge.generate import comb_square
from openbook_forge.homology import AbelianGroup
from openbook_forge.openbook import (
    DENSE_FOLD_LIMIT,
    EmptyAttachingRegion,
    Letter,
    MonodromyWord,
    NotASphereClass,
    build_relative_open_book,
    h1_coker_id_minus_h,
    h1_of_open_book_3,
    letter_preserves_form,
    monodromy_action,
    preserves_form,
    reduced_presentation,
    stabilization_trace,
    twist_matrix_dim2,
    twist_matrix_dim4,
    unitriangular_certificate,
    variation_matrix,
)

# Seifert form of the Hopf page, frozen from linking numbers of the core
# curves with their Reeb push-offs (see test_seifert_form_is_pushoff_linking)
HOPF_V = [
    [-1, 0, 0, 0, 0, 0, 0],
    [1, -1, 0, 0, 0, 0, 0],
    [1, 0, -1, 0, 0, 0, 0],
    [-1, 1, 1, -1, 0, 0, 0],
    [0, -1, 0, 1, -1, 0, 0],
    [0, 0, -1, 1, 0, -1, 0],
    [0, 0, 0, -1, 1, 1, -1],
]


def ob_of(d):
    return build_relative_open_book(enumerate_cells(normalize(d)))


def dense_V(ob):
    V = np.zeros((ob.m, ob.m), dtype=int)
    for (i, j), x in ob.registry.V.items():
        V[i][j] = x
    return V


def core_curve_3d(cell):
    sq = [(cell.u0, cell.w0), (cell.u0 + 1, cell.w0), (cell.u0 + 1, cell.w0 + 1), (cell.u0, cell.w0 + 1)]
    return legendrian_lift([front_point(*p) for p in sq])


def test_fixture_counts(unknot, hopf, loose):
    for d, m in ((unknot, 1), (hopf, 7), (loose, 4)):
        ob = ob_of(d)
        assert ob.m == m and len(ob.word5) == m and len(ob.word3) == m
        assert ob.page2.chi == 1 - m and ob.page4.chi == 1 + m


def test_hopf_seifert_form(hopf):
    assert dense_V(ob_of(hopf)).tolist() == HOPF_V


def test_seifert_form_is_pushoff_linking(hopf, loose):
    for d in (hopf, loose):
        ob = ob_of(d)
        cells = ob.complex.cells
        G = [[gauss_linking(core_curve_3d(a), push_reeb(core_curve_3d(b))) for b in cells] for a in cells]
        assert G == dense_V(ob).tolist()


@settings(max_examples=15)
@given(diagrams(max_cells=8))
def test_seifert_form_is_pushoff_linking_random(d):
    ob = ob_of(d)
    cells = ob.complex.cells
    G = [[gauss_linking(core_curve_3d(a), push_reeb(core_curve_3d(b))) for b in cells] for a in cells]
    assert G == dense_V(ob).tolist()


def test_forms_from_V(hopf):
    ob = ob_of(hopf)
    V = dense_V(ob)
    assert (ob.registry.dense("Q3") == V - V.T).all()
    assert (ob.registry.dense("Q5") == V + V.T).all()


def test_trace_shape(hopf):
    ob = ob_of(hopf)
    assert [s.cell for s in ob.trace] == ob.complex.order
    assert ob.trace[0].attaching_edges == ()
    assert all(s.attaching_edges for s in ob.trace[1:])
    assert [x.id for x in ob.word5.letters] == list(range(1, 8))


def test_trace_rejects_bad_order(loose):
    cc = enumerate_cells(normalize(loose))
    with pytest.raises(EmptyAttachingRegion):
        stabilization_trace(cc, [1, 3, 2, 4])


@given(diagrams())
def test_chi_and_trace(d):
    ob = ob_of(d)
    m = ob.m
    assert ob.page2.chi == 1 - m and ob.page4.chi == 1 + m
    placed = set()
    for s in ob.trace:
        if s.k >= 2:
            assert s.attaching_edges
            nb = {j for j in ob.complex.neighbors[s.cell] if j in placed}
            assert len(s.attaching_edges) == len(nb)
        placed.add(s.cell)


@given(diagrams())
def test_monodromy_preserves_forms(d):
    ob = ob_of(d)
    for dim, name in ((2, "Q3"), (4, "Q5")):
        M = monodromy_action(ob, dim)
        Q = ob.registry.dense(name)
        assert (M.T.dot(Q).dot(M) == Q).all()
        assert preserves_form(M, Q)


@given(diagrams())
def test_dim4_letters_are_involutions(d):
    ob = ob_of(d)
    Q5 = ob.registry.dense("Q5")
    eye = np.identity(ob.m, dtype=object)
    for k in range(ob.m):
        s = np.zeros(ob.m, dtype=object)
        s[:] = 0
        s[k] = 1
        T = twist_matrix_dim4(s, Q5)
        assert (T.dot(T) == eye).all()


def test_twist_powers(hopf):
    ob = ob_of(hopf)
    Q3 = ob.registry.dense("Q3")
    c = np.zeros(ob.m, dtype=object)
    c[:] = 0
    c[3] = 1
    c[4] = 1
    T = twist_matrix_dim2(c, Q3)
    assert (twist_matrix_dim2(c, Q3, 3) == T.dot(T).dot(T)).all()
    assert (twist_matrix_dim2(c, Q3, -1).dot(T) == np.identity(ob.m, dtype=object)).all()


def test_dim4_twist_needs_sphere_class(hopf):
    ob = ob_of(hopf)
    Q5 = ob.registry.dense("Q5")
    s = np.zeros(ob.m, dtype=object)
    s[:] = 0
    s[0] = s[1] = 1  # -2 - 2 + 2 Q5(1, 2) = -2
    twist_matrix_dim4(s, Q5)
    s[1] = 0
    s[3] = 1  # -2 - 2 + 2 Q5(1, 4) = -6
    with pytest.raises(NotASphereClass):
        twist_matrix_dim4(s, Q5)


@given(diagrams())
def test_monodromy_minus_identity_is_variation(d):
    ob = ob_of(d)
    M = monodromy_action(ob, 2)
    var = variation_matrix(ob, ob.word3)
    J = ob.registry.dense("Q3").T
    assert (M - np.identity(ob.m, dtype=object) == var.dot(J)).all()


@given(diagrams())
def test_unsurgered_page_gives_s3(d):
    ob = ob_of(d)
    assert unitriangular_certificate(ob, ob.word3)
    assert h1_of_open_book_3(ob).trivial
    assert h1_of_open_book_3(ob, method="dense").trivial
    # Var is unimodular: every invariant factor is 1
    assert group_of(variation_matrix(ob, ob.word3).tolist(), ob.m) == (0, ())


@given(diagrams(max_cells=10))
def test_reduced_matches_dense_fold(d):
    ob = ob_of(d)
    link = [
        Letter("sphere", k, p)
        for k, p in ((1, 1), (ob.m, -1))
    ]
    word = ob.word3.append(link)
    red = reduced_presentation(ob, word)
    assert red is not None
    dense = variation_matrix(ob, word)
    assert group_of(red, len(red)) == group_of(dense.tolist(), ob.m)
    assert h1_of_open_book_3(ob, word, "reduced") == h1_of_open_book_3(ob, word, "dense")


def test_coker_id_minus_h_differs_from_variation(unknot):
    # the mapping torus of the unknot page has H1 = Z, the open book has H1 = 0
    ob = ob_of(unknot)
    assert h1_coker_id_minus_h(ob) == AbelianGroup(1)
    assert h1_of_open_book_3(ob).trivial


def test_dense_fallback_refused_for_large_pages():
    ob = ob_of(comb_square(8))
    assert ob.m > DENSE_FOLD_LIMIT
    # a word that is not a block plus tail needs the dense fold
    word = MonodromyWord(ob.word3.letters[::-1], 2)
    with pytest.raises(ValueError):
        h1_of_open_book_3(ob, word)


def test_sparse_letter_checks(hopf):
    ob = ob_of(hopf)
    assert all(letter_preserves_form(ob, x, 2) for x in ob.word3.letters)
    assert all(letter_preserves_form(ob, x, 4) for x in ob.word5.letters)


def test_json_dense_and_sparse():
    small = ob_of(comb_square(4)).to_json()
    assert isinstance(small["Q3"], list)
    big = ob_of(comb_square(18)).to_json()
    assert big["m"] > 256
    assert big["Q3"]["shape"] == [big["m"], big["m"]]
    assert json.dumps(big, sort_keys=True) == json.dumps(ob_of(comb_square(18)).to_json(), sort_keys=True)


def test_json_keys(loose):
    js = ob_of(loose).to_json()
    assert set(js) >= {"m", "chi2", "chi4", "Q3", "Q5", "word5", "word3", "trace"}
    assert js["m"] == 4 and js["chi2"] == -3 and js["chi4"] == 5
