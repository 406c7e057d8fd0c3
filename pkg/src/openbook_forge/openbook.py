"""The relative open book built from a cell complex.

Each cell k contributes one positive stabilization: a 1-handle to the
surface page (core curve gamma_k) and a 2-handle to the 4-dimensional page
(sphere D_k).  Homology classes are integer vectors on these bases.

The intersection data comes from a single sparse matrix ``V`` (the linking
form ``V[i][j] = lk(gamma_i, gamma_j pushed along dz)``):

    Q3 = V - V^T    (skew, on H_1 of the surface page)
    Q5 = V + V^T    (symmetric, diagonal -2, on H_2 of the 4-page)
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cells import CellComplex, DisconnectedComplex, Edge
from .homology import AbelianGroup, cokernel

SparseMatrix = dict[tuple[int, int], int]

DENSE_JSON_LIMIT = 256
DENSE_FOLD_LIMIT = 40


class EmptyAttachingRegion(ValueError):
    pass


class NotASphereClass(ValueError):
    """A dim-4 twist was requested along a class whose square is not -2."""


def _edge_json(e: Edge) -> list:
    return [e[0], e[1], e[2]]


@dataclass(frozen=True)
class Handle:
    index: int
    cell: int | None = None
    attaching_edges: tuple[Edge, ...] = ()

    def to_json(self) -> dict:
        out: dict = {"index": self.index}
        if self.cell is not None:
            out["cell"] = self.cell
            out["attaching_edges"] = [_edge_json(e) for e in self.attaching_edges]
        return out


@dataclass(frozen=True)
class PageDescriptor:
    dim: int
    m: int
    handles: tuple[Handle, ...]

    @property
    def chi(self) -> int:
        # one 0-handle and m handles of index dim/2
        return sum((-1) ** h.index for h in self.handles)

    def to_json(self) -> dict:
        return {"dim": self.dim, "m": self.m, "chi": self.chi}


@dataclass(frozen=True)
class Letter:
    kind: str  # "sphere" or "link"
    id: int
    power: int = 1

    def to_json(self) -> dict:
        return {"kind": self.kind, "id": self.id, "power": self.power}


@dataclass(frozen=True)
class MonodromyWord:
    """Letters written left to right; as a map the rightmost acts first."""

    letters: tuple[Letter, ...]
    dim: int

    def __len__(self) -> int:
        return len(self.letters)

    def restrict(self) -> "MonodromyWord":
        return MonodromyWord(self.letters, 2)

    def append(self, letters: Iterable[Letter]) -> "MonodromyWord":
        return MonodromyWord(self.letters + tuple(letters), self.dim)

    def to_json(self) -> list[dict]:
        return [x.to_json() for x in self.letters]


@dataclass(frozen=True)
class StabilizationStep:
    k: int
    cell: int
    attaching_edges: tuple[Edge, ...]
    position: int  # slot of the new letter among the letters placed so far
    sign: int = 1

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "cell": self.cell,
            "attaching_edges": [_edge_json(e) for e in self.attaching_edges],
            "position": self.position,
        }


# ---------------------------------------------------------------------------
# intersection data


def seifert_entries(cc: CellComplex) -> SparseMatrix:
    """Nonzero entries of V, keyed by 0-based (row, col)."""
    pos = cc.by_position
    V: SparseMatrix = {}
    for c in cc.cells:
        i = c.id - 1
        V[(i, i)] = -1
        for (du, dw), val in (((1, 0), 1), ((0, 1), 1), ((1, 1), -1)):
            j = pos.get((c.u0 + du, c.w0 + dw))
            if j is not None:
                V[(j - 1, i)] = val
    return V


def _combine(a: SparseMatrix, b: SparseMatrix, sign: int) -> SparseMatrix:
    out = dict(a)
    for (i, j), v in b.items():
        out[(j, i)] = out.get((j, i), 0) + sign * v
    return {k: v for k, v in out.items() if v}


def to_dense(entries: SparseMatrix, m: int) -> np.ndarray:
    out = np.zeros((m, m), dtype=object)
    out[:, :] = 0
    for (i, j), v in entries.items():
        out[i, j] = v
    return out


def _sparse_json(entries: SparseMatrix, m: int) -> object:
    if m <= DENSE_JSON_LIMIT:
        rows = [[0] * m for _ in range(m)]
        for (i, j), v in entries.items():
            rows[i][j] = v
        return rows
    return {"shape": [m, m], "entries": [[i, j, v] for (i, j), v in sorted(entries.items())]}


@dataclass
class PageCycleRegistry:
    """Classes of gamma_k and D_k plus both intersection forms (sparse)."""

    m: int
    V: SparseMatrix

    @cached_property
    def Q3(self) -> SparseMatrix:
        return _combine(self.V, self.V, -1)

    @cached_property
    def Q5(self) -> SparseMatrix:
        return _combine(self.V, self.V, +1)

    @cached_property
    def rows3(self) -> dict[int, dict[int, int]]:
        return _rows(self.Q3)

    @cached_property
    def rows5(self) -> dict[int, dict[int, int]]:
        return _rows(self.Q5)

    @cached_property
    def cols3(self) -> dict[int, dict[int, int]]:
        return _rows({(j, i): v for (i, j), v in self.Q3.items()})

    @cached_property
    def cols5(self) -> dict[int, dict[int, int]]:
        return _rows({(j, i): v for (i, j), v in self.Q5.items()})

    def dense(self, which: str) -> np.ndarray:
        return to_dense(self.Q3 if which == "Q3" else self.Q5, self.m)

    def gamma(self, k: int) -> dict[int, int]:
        return {k - 1: 1}

    def sphere(self, k: int) -> dict[int, int]:
        return {k - 1: 1}

    def pair(self, which: str, x: Mapping[int, int], y: Mapping[int, int]) -> int:
        """x^T Q y for sparse vectors."""
        rows = self.rows3 if which == "Q3" else self.rows5
        total = 0
        for i, xi in x.items():
            r = rows.get(i)
            if not r:
                continue
            for j, qij in r.items():
                yj = y.get(j)
                if yj:
                    total += xi * qij * yj
        return total

    def to_json(self) -> dict:
        return {"Q3": _sparse_json(self.Q3, self.m), "Q5": _sparse_json(self.Q5, self.m)}


def _rows(entries: SparseMatrix) -> dict[int, dict[int, int]]:
    rows: dict[int, dict[int, int]] = {}
    for (i, j), v in entries.items():
        rows.setdefault(i, {})[j] = v
    return rows


@dataclass
class RelativeOpenBook:
    page4: PageDescriptor
    page2: PageDescriptor
    registry: PageCycleRegistry
    word5: MonodromyWord
    word3: MonodromyWord
    complex: CellComplex
    trace: tuple[StabilizationStep, ...]
    link_classes: dict[int, dict[int, int]] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.registry.m

    def letter_class(self, letter: Letter) -> dict[int, int]:
        if letter.kind == "sphere":
            if not 1 <= letter.id <= self.m:
                raise KeyError(f"unknown cell {letter.id}")
            return {letter.id - 1: 1}
        if letter.kind == "link":
            if letter.id not in self.link_classes:
                raise KeyError(f"link component {letter.id} is not registered")
            return self.link_classes[letter.id]
        raise ValueError(f"unknown letter kind {letter.kind!r}")

    def with_words(self, word5: MonodromyWord, word3: MonodromyWord, link_classes) -> "RelativeOpenBook":
        return replace(self, word5=word5, word3=word3, link_classes=dict(link_classes))

    def to_json(self) -> dict:
        out = {
            "m": self.m,
            "chi2": self.page2.chi,
            "chi4": self.page4.chi,
        }
        out.update(self.registry.to_json())
        out["word5"] = self.word5.to_json()
        out["word3"] = self.word3.to_json()
        out["trace"] = [s.to_json() for s in self.trace]
        if self.link_classes:
            out["link_classes"] = {
                str(k): sorted(i + 1 for i, v in cls.items() if v) for k, cls in sorted(self.link_classes.items())
            }
        return out


# ---------------------------------------------------------------------------
# construction


def stabilization_trace(cc: CellComplex, order: Sequence[int] | None = None) -> list[StabilizationStep]:
    """One step per cell in the complex order.

    Step k attaches cell ``order[k]`` along the unit edges it shares with the
    cells placed before it.  Its letter goes in at height position, so after
    all steps the word lists the cells in id order.
    """
    order = list(cc.order if order is None else order)
    if cc.m and not order:
        raise DisconnectedComplex(0, "complex has no order")
    placed: list[int] = []
    placed_set: set[int] = set()
    steps = []
    import bisect

    for k, cid in enumerate(order, start=1):
        edges = tuple(
            sorted(cc.shared_edge(cid, j) for j in cc.neighbors[cid] if j in placed_set)
        )
        if k >= 2 and not edges:
            raise EmptyAttachingRegion(f"step {k}: cell {cid} shares no edge with the earlier cells")
        pos = bisect.bisect_left(placed, cid)
        placed.insert(pos, cid)
        placed_set.add(cid)
        steps.append(StabilizationStep(k, cid, edges, pos))
    return steps


def build_relative_open_book(cc: CellComplex, order: Sequence[int] | None = None) -> RelativeOpenBook:
    if cc.m == 0:
        raise DisconnectedComplex(0, "no cells")
    trace = stabilization_trace(cc, order)
    m = cc.m
    h2 = [Handle(0)] + [Handle(1, s.cell, s.attaching_edges) for s in trace]
    h4 = [Handle(0)] + [Handle(2, s.cell, s.attaching_edges) for s in trace]
    letters = tuple(Letter("sphere", k, 1) for k in range(1, m + 1))
    word5 = MonodromyWord(letters, 4)
    return RelativeOpenBook(
        page4=PageDescriptor(4, m, tuple(h4)),
        page2=PageDescriptor(2, m, tuple(h2)),
        registry=PageCycleRegistry(m, seifert_entries(cc)),
        word5=word5,
        word3=word5.restrict(),
        complex=cc,
        trace=tuple(trace),
    )


# ---------------------------------------------------------------------------
# homological actions


def _as_vector(c, m: int) -> np.ndarray:
    if isinstance(c, Mapping):
        v = np.zeros(m, dtype=object)
        v[:] = 0
        for i, x in c.items():
            v[i] = x
        return v
    v = np.array(list(c), dtype=object)
    if v.shape != (m,):
        raise ValueError(f"class has length {len(v)}, expected {m}")
    return v


def _as_dense(Q, m: int | None = None) -> np.ndarray:
    if isinstance(Q, Mapping):
        return to_dense(Q, m)
    return np.array(Q, dtype=object)


def twist_matrix_dim2(c, Q3, power: int = 1) -> np.ndarray:
    """Transvection x -> x + power * <x, c> c with <x, y> = x^T Q3 y."""
    Q = _as_dense(Q3, len(c) if not isinstance(c, Mapping) else None)
    m = Q.shape[0]
    v = _as_vector(c, m)
    out = np.identity(m, dtype=object)
    out += power * np.outer(v, v.dot(Q.T))
    return out


def twist_matrix_dim4(s, Q5, require_sphere: bool = True) -> np.ndarray:
    """Reflection x -> x + (x . s) s with x . y = x^T Q5 y."""
    Q = _as_dense(Q5, len(s) if not isinstance(s, Mapping) else None)
    m = Q.shape[0]
    v = _as_vector(s, m)
    square = v.dot(Q).dot(v)
    if require_sphere and square != -2:
        raise NotASphereClass(f"class has square {square}, a sphere class needs -2")
    out = np.identity(m, dtype=object)
    out += np.outer(v, v.dot(Q))
    return out


def monodromy_action(ob: RelativeOpenBook, dim: int, word: MonodromyWord | None = None) -> np.ndarray:
    """Product M_1 M_2 ... M_n of the letter matrices (rightmost acts first)."""
    if word is None:
        word = ob.word5 if dim == 4 else ob.word3
    m = ob.m
    which = "Q5" if dim == 4 else "Q3"
    Q = ob.registry.dense(which)
    M = np.identity(m, dtype=object)
    for letter in word.letters:
        c = _as_vector(ob.letter_class(letter), m)
        if dim == 4:
            if c.dot(Q).dot(c) != -2:
                raise NotASphereClass(
                    f"{letter.kind} {letter.id} has square {c.dot(Q).dot(c)} in the 4-page"
                )
            w = c.dot(Q)
            M = M + np.outer(M.dot(c), w)
        else:
            w = c.dot(Q.T)
            M = M + letter.power * np.outer(M.dot(c), w)
    return M


def preserves_form(M: np.ndarray, Q: np.ndarray) -> bool:
    return bool((M.T.dot(Q).dot(M) == Q).all())


def letter_preserves_form(ob: RelativeOpenBook, letter: Letter, dim: int) -> bool:
    """Sparse check of M^T Q M = Q for one letter matrix M = I + e c w^T, w = Q c.

    Expanding, M^T Q M - Q = e w (c^T Q) + e (Q c) w^T + e^2 (c^T Q c) w w^T,
    which is evaluated entry by entry on the supports.
    """
    reg = ob.registry
    which = "Q5" if dim == 4 else "Q3"
    rows = reg.rows5 if dim == 4 else reg.rows3
    c = ob.letter_class(letter)
    e = 1 if dim == 4 else letter.power
    qc: dict[int, int] = {}
    ctq: dict[int, int] = {}
    for i, ci in c.items():
        for j, q in rows.get(i, {}).items():
            ctq[j] = ctq.get(j, 0) + ci * q
    cols = reg.cols5 if dim == 4 else reg.cols3
    for j, cj in c.items():
        for i, q in cols.get(j, {}).items():
            qc[i] = qc.get(i, 0) + q * cj
    qc = {k: v for k, v in qc.items() if v}
    ctq = {k: v for k, v in ctq.items() if v}
    cqc = reg.pair(which, c, c)
    if len(qc) * max(len(qc), len(ctq)) > 4_000_000:
        # too large to expand; the scalar identity decides it
        return cqc == (-2 if dim == 4 else 0)
    diff: dict[tuple[int, int], int] = {}
    for i, wi in qc.items():
        for j, v in ctq.items():
            diff[(i, j)] = diff.get((i, j), 0) + e * wi * v
        for j, wj in qc.items():
            diff[(i, j)] = diff.get((i, j), 0) + e * wi * wj + e * e * cqc * wi * wj
    return not any(diff.values())


# ---------------------------------------------------------------------------
# first homology of the closed 3-manifold


def variation_matrix(ob: RelativeOpenBook, word: MonodromyWord) -> np.ndarray:
    """Variation of the word's monodromy, folded letter by letter.

    For maps h, g of the page, Var(h g) = Var(h) + Var(g) + Var(h) J Var(g)
    with J = Q3^T, and a single twist has Var = e c c^T.
    """
    m = ob.m
    J = ob.registry.dense("Q3").T
    var = np.zeros((m, m), dtype=object)
    var[:, :] = 0
    for letter in word.letters:
        c = _as_vector(ob.letter_class(letter), m)
        vg = letter.power * np.outer(c, c)
        var = var + vg + var.dot(J).dot(vg)
    return var


def _block_split(ob: RelativeOpenBook, word: MonodromyWord):
    """(positions, tail) if the word is one +1 sphere letter per cell followed by tail letters."""
    m = ob.m
    head, tail = word.letters[:m], word.letters[m:]
    if len(head) != m:
        return None
    pos = {}
    for p, x in enumerate(head):
        if x.kind != "sphere" or x.power != 1 or x.id in pos:
            return None
        pos[x.id - 1] = p
    return pos, tail


def reduced_presentation(ob: RelativeOpenBook, word: MonodromyWord) -> list[list[int]] | None:
    """Small presentation matrix for coker(Var) when the word is a basis block plus tail.

    For tail letters with classes k_i and powers e_i the entry (i, j) is
    e_i [i = j] + k_i^T J k_j [i > j] + k_i^T (I - N) k_j, where N keeps the
    entries J[a][b] with a placed before b in the block.  Returns None when
    the word has a different shape.
    """
    split = _block_split(ob, word)
    if split is None:
        return None
    pos, tail = split
    J = {(j, i): v for (i, j), v in ob.registry.Q3.items()}
    classes = [ob.letter_class(x) for x in tail]
    r = len(tail)
    mat = [[0] * r for _ in range(r)]
    jrows = _rows(J)
    for i in range(r):
        for j in range(r):
            ki, kj = classes[i], classes[j]
            dot = sum(v * kj.get(a, 0) for a, v in ki.items())
            jpair = 0
            npair = 0
            for a, va in ki.items():
                for b, jab in jrows.get(a, {}).items():
                    vb = kj.get(b)
                    if vb:
                        jpair += va * jab * vb
                        if pos[a] < pos[b]:
                            npair += va * jab * vb
            entry = dot - npair
            if i > j:
                entry += jpair
            if i == j:
                entry += tail[i].power
            mat[i][j] = entry
    return mat


def unitriangular_certificate(ob: RelativeOpenBook, word: MonodromyWord) -> bool:
    """True when the word is a basis block alone, so Var^{-1} = I - N is unitriangular."""
    split = _block_split(ob, word)
    return split is not None and not split[1]


def h1_of_open_book_3(ob: RelativeOpenBook, word: MonodromyWord | None = None, method: str = "auto") -> AbelianGroup:
    """H_1 of the closed 3-manifold with page F and monodromy given by the word.

    This is coker(Var) for the variation ``Var: H_1(F, dF) -> H_1(F)``,
    identified with Z^m through Poincare-Lefschetz duality.  ``method`` is
    one of "auto", "dense" and "reduced".
    """
    if word is None:
        word = ob.word3
    if method in ("auto", "reduced"):
        if unitriangular_certificate(ob, word):
            return AbelianGroup(0)
        mat = reduced_presentation(ob, word)
        if mat is not None:
            return cokernel(mat, len(mat))
        if method == "reduced":
            raise ValueError("word is not a basis block followed by tail letters")
    if method == "auto" and ob.m > DENSE_FOLD_LIMIT:
        raise ValueError(f"dense fallback refused for m = {ob.m} > {DENSE_FOLD_LIMIT}")
    var = variation_matrix(ob, word)
    return cokernel(var.tolist(), ob.m)


def h1_coker_id_minus_h(ob: RelativeOpenBook, word: MonodromyWord | None = None) -> AbelianGroup:
    """coker(id - h_*) on H_1(F); the mapping torus of the page, kept for comparison."""
    if word is None:
        word = ob.word3
    M = monodromy_action(ob, 2, word)
    return cokernel((np.identity(ob.m, dtype=object) - M).tolist(), ob.m)
