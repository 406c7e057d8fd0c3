"""Piecewise-linear Legendrian geometry in R^5.

Points are 5-tuples of Fractions in the order (x1, y1, z, x2, y2).  The
contact form is alpha = dz + x1 dy1 + x2 dy2.

Every cell ``[a1, a2] x [b1, b2]`` of a normalized diagram (u = z + y1,
w = z - y1, a2 = a1 + 1, b2 = b1 + 1) carries

* an octahedron: the four front corners ``C_ij`` plus two poles N and S
  over the cell centre at ``y2 = +-1/2``, all at ``x = 0``;
* a Legendrian diamond: the middle part M (in ``y2 = 0``), an upper disk
  D' through N and a lower disk D'' through S.

A vertex of a diamond is a front point together with an ``(x1, x2)`` level.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .cells import Cell, CellComplex

Point = tuple[Fraction, Fraction, Fraction, Fraction, Fraction]
Vector = tuple[Fraction, ...]

X1, Y1, Z, X2, Y2 = range(5)
HALF = Fraction(1, 2)


def point(x1, y1, z, x2, y2) -> Point:
    return (Fraction(x1), Fraction(y1), Fraction(z), Fraction(x2), Fraction(y2))


def sub(p: Sequence, q: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(p, q))


def add(p: Sequence, q: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(p, q))


def scale(c, p: Sequence) -> Vector:
    return tuple(c * a for a in p)


# ---------------------------------------------------------------------------
# contact form


@dataclass(frozen=True)
class ContactForm:
    """alpha = dz + x1 dy1 (+ x2 dy2 when dim = 5)."""

    dim: int = 5

    def __call__(self, p: Sequence, v: Sequence) -> Fraction:
        if self.dim == 3:
            # coordinates (x1, y1, z)
            return v[2] + p[0] * v[1]
        return v[Z] + p[X1] * v[Y1] + p[X2] * v[Y2]

    def d(self, v: Sequence, w: Sequence) -> Fraction:
        """The constant 2-form d(alpha)."""
        if self.dim == 3:
            return v[0] * w[1] - v[1] * w[0]
        return v[X1] * w[Y1] - v[Y1] * w[X1] + v[X2] * w[Y2] - v[Y2] * w[X2]

    def restrict_to_3(self) -> "ContactForm":
        return ContactForm(3)


ALPHA = ContactForm(5)
ALPHA3 = ContactForm(3)


def legendrian_plane_test(m, n, k, l) -> bool:
    """Whether {x1 = m, x2 = n, z = k y1 + l y2 + c} is Legendrian.

    Evaluates alpha on the spanning vectors dy1 + k dz and dy2 + l dz at a
    point of the plane; the values are k + m and l + n.
    """
    p = point(m, 0, 0, n, 0)
    v1 = point(0, 1, k, 0, 0)
    v2 = point(0, 0, l, 0, 1)
    return ALPHA(p, v1) == 0 and ALPHA(p, v2) == 0


# ---------------------------------------------------------------------------
# exact linear algebra


def rank(vectors: Iterable[Sequence[Fraction]]) -> int:
    rows = [list(map(Fraction, v)) for v in vectors]
    r = 0
    if not rows:
        return 0
    ncol = len(rows[0])
    for col in range(ncol):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col] / rows[r][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def det(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    a = [list(map(Fraction, r)) for r in matrix]
    n = len(a)
    out = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            out = -out
        out *= a[col][col]
        for i in range(col + 1, n):
            f = a[i][col] / a[col][col]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return out


def spanning_pair(vertices: Sequence[Point]) -> tuple[Vector, Vector] | None:
    base = vertices[0]
    diffs = [sub(v, base) for v in vertices[1:]]
    for a, b in itertools.combinations(diffs, 2):
        if rank([a, b]) == 2:
            return a, b
    return None


# ---------------------------------------------------------------------------
# plates


@dataclass(frozen=True)
class Plate:
    """A planar Legendrian polygon (dim 2) or a core segment chain (dim 1)."""

    kind: str
    vertices: tuple[Point, ...]
    cell: int
    part: str  # "M", "upper", "lower" or "core"
    label: str = ""
    levels: tuple[Fraction, Fraction] | None = None  # (x1, x2) for T plates
    slopes: tuple[Fraction, Fraction] | None = None  # (k, l) with z = k y1 + l y2 + c
    intercept: Fraction | None = None
    dim: int = 2

    @property
    def edges(self) -> list[tuple[Point, Point]]:
        vs = self.vertices
        if self.dim == 1:
            return list(zip(vs, vs[1:]))
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    @property
    def centroid(self) -> Vector:
        n = len(self.vertices)
        return tuple(sum(v[i] for v in self.vertices) / n for i in range(5))

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "cell": self.cell,
            "part": self.part,
            "label": self.label,
            "vertices": [[str(c) for c in v] for v in self.vertices],
        }
        if self.levels is not None:
            out["levels"] = [str(x) for x in self.levels]
            out["slopes"] = [str(x) for x in self.slopes]
            out["intercept"] = str(self.intercept)
        return out


def is_legendrian(plate: Plate) -> bool:
    """Exact check that alpha vanishes on every vertex difference at every vertex.

    alpha_p(t) is affine in p, so vanishing at the vertices gives vanishing on
    the whole plate.
    """
    vs = plate.vertices
    diffs = [sub(v, vs[0]) for v in vs[1:]]
    return all(ALPHA(p, t) == 0 for p in vs for t in diffs)


def is_planar(plate: Plate) -> bool:
    vs = plate.vertices
    return rank(sub(v, vs[0]) for v in vs[1:]) <= plate.dim


class CellFrame:
    """Front points of one cell."""

    def __init__(self, cell: Cell):
        self.cell = cell
        a1, b1 = Fraction(cell.u0), Fraction(cell.w0)
        self.a = (a1, a1 + 1)
        self.b = (b1, b1 + 1)

    def corner(self, i: int, j: int) -> tuple[Fraction, Fraction, Fraction]:
        a, b = self.a[i - 1], self.b[j - 1]
        return ((a - b) / 2, (a + b) / 2, Fraction(0))

    def pole(self, sign: int) -> tuple[Fraction, Fraction, Fraction]:
        a1, b1 = self.a[0], self.b[0]
        b2 = self.b[1]
        return ((a1 - b1) / 2, (a1 + b2) / 2, sign * (b2 - b1) / 2)

    def front(self, name: str):
        if name == "N":
            return self.pole(1)
        if name == "S":
            return self.pole(-1)
        return self.corner(int(name[1]), int(name[2]))

    def vertex(self, name: str, x1, x2) -> Point:
        y1, z, y2 = self.front(name)
        return point(x1, y1, z, x2, y2)


# (front point, x1, x2) chains for each plate of a diamond
_T_UPPER = {
    "a1": (("C11", "C12", "N"), (1, -1)),
    "a2": (("C21", "C22", "N"), (1, 1)),
    "b1": (("C11", "C21", "N"), (-1, -1)),
    "b2": (("C12", "C22", "N"), (-1, 1)),
}
_T_LOWER = {
    "a1": (("C11", "C12", "S"), (1, 1)),
    "a2": (("C21", "C22", "S"), (1, -1)),
    "b1": (("C11", "C21", "S"), (-1, 1)),
    "b2": (("C12", "C22", "S"), (-1, -1)),
}

_RIDGES_UPPER = [
    ("C11", "P_+1", [("C11", 1, -1), ("N", 1, -1), ("N", 0, -1), ("N", -1, -1), ("C11", -1, -1)]),
    ("C22", "P_-1", [("C22", 1, 1), ("N", 1, 1), ("N", 0, 1), ("N", -1, 1), ("C22", -1, 1)]),
    ("C12", "P'_+1", [("C12", 1, -1), ("N", 1, -1), ("N", 0, 0), ("N", -1, 1), ("C12", -1, 1), ("C12", 0, 0)]),
    ("C21", "P'_-1", [("C21", 1, 1), ("N", 1, 1), ("N", 0, 0), ("N", -1, -1), ("C21", -1, -1), ("C21", 0, 0)]),
]
_RIDGES_LOWER = [
    ("C11", "P_-1", [("C11", 1, 1), ("S", 1, 1), ("S", 0, 1), ("S", -1, 1), ("C11", -1, 1)]),
    ("C22", "P_+1", [("C22", 1, -1), ("S", 1, -1), ("S", 0, -1), ("S", -1, -1), ("C22", -1, -1)]),
    ("C12", "P'_-1", [("C12", 1, 1), ("S", 1, 1), ("S", 0, 0), ("S", -1, -1), ("C12", -1, -1), ("C12", 0, 0)]),
    ("C21", "P'_+1", [("C21", 1, -1), ("S", 1, -1), ("S", 0, 0), ("S", -1, 1), ("C21", -1, 1), ("C21", 0, 0)]),
]

# four triangles in the x-fibre over a pole
_POLE_FAN = [
    [(1, -1), (0, -1), (0, 0)],
    [(0, -1), (-1, -1), (0, 0)],
    [(1, 1), (0, 1), (0, 0)],
    [(0, 1), (-1, 1), (0, 0)],
]

_RECTANGLES = [
    ("S_H", "a1", [("C11", 1, -1), ("C12", 1, -1), ("C12", 1, 0), ("C12", 1, 1), ("C11", 1, 1), ("C11", 1, 0)]),
    ("S_H", "a2", [("C21", 1, 1), ("C22", 1, 1), ("C22", 1, 0), ("C22", 1, -1), ("C21", 1, -1), ("C21", 1, 0)]),
    ("S_V", "b1", [("C11", -1, -1), ("C21", -1, -1), ("C21", -1, 0), ("C21", -1, 1), ("C11", -1, 1), ("C11", -1, 0)]),
    ("S_V", "b2", [("C12", -1, 1), ("C22", -1, 1), ("C22", -1, 0), ("C22", -1, -1), ("C12", -1, -1), ("C12", -1, 0)]),
]

# x-fibre triangles at a corner; cusp corners fold through x = 0
_FILL_PLAIN = [
    [(1, 0), (1, 1), (-1, 1)],
    [(1, 0), (-1, 1), (-1, 0)],
    [(1, 0), (-1, 0), (-1, -1)],
    [(1, 0), (-1, -1), (1, -1)],
]
_FILL_CUSP = [
    [(1, -1), (1, 0), (0, 0)],
    [(1, 0), (1, 1), (0, 0)],
    [(-1, -1), (-1, 0), (0, 0)],
    [(-1, 0), (-1, 1), (0, 0)],
]
_CUSP_CORNERS = ("C12", "C21")


def _t_plate(f: CellFrame, label: str, spec, part: str) -> Plate:
    names, (m, n) = spec
    verts = tuple(f.vertex(nm, m, n) for nm in names)
    k, l = Fraction(-m), Fraction(-n)
    p = verts[0]
    c = p[Z] - k * p[Y1] - l * p[Y2]
    sa = "a" if label[0] == "a" else "b"
    kind = f"T_{sa}^{{{m},{n}}}"
    return Plate(kind, verts, f.cell.id, part, label, (Fraction(m), Fraction(n)), (k, l), c)


def build_middle_part(cell: Cell) -> list[Plate]:
    """The 20 plates of M ( 4 rectangles, 16 triangles) and the 8 pieces of the core.

    Core pieces have ``dim == 1``: the H and V segments at ``x1 = 1`` and
    ``x1 = -1`` and the four I-arcs through ``x1 = x2 = 0``.
    """
    f = CellFrame(cell)
    out = []
    for kind, label, chain in _RECTANGLES:
        out.append(Plate(kind, tuple(f.vertex(*v) for v in chain), cell.id, "M", label))
    for name in ("C11", "C12", "C21", "C22"):
        fill = _FILL_CUSP if name in _CUSP_CORNERS else _FILL_PLAIN
        for t, tri in enumerate(fill):
            out.append(Plate("S_I", tuple(f.vertex(name, *x) for x in tri), cell.id, "M", f"{name}.{t}"))
    out.extend(core_curve(cell))
    return out


def core_curve(cell: Cell) -> list[Plate]:
    """gamma_k as 8 pieces in counterclockwise order (in the u, w plane)."""
    f = CellFrame(cell)

    def seg(kind, label, a, b, x1):
        return Plate(kind, (f.vertex(a, x1, 0), f.vertex(b, x1, 0)), cell.id, "core", label, dim=1)

    def arc(name, reverse):
        xs = (1, 0, -1) if not reverse else (-1, 0, 1)
        return Plate("I-arc", tuple(f.vertex(name, x, 0) for x in xs), cell.id, "core", name, dim=1)

    return [
        seg("V_b", "b1", "C11", "C21", -1),
        arc("C21", True),
        seg("H_a", "a2", "C21", "C22", 1),
        arc("C22", False),
        seg("V_b", "b2", "C22", "C12", -1),
        arc("C12", True),
        seg("H_a", "a1", "C12", "C11", 1),
        arc("C11", False),
    ]


def core_cycle(cell: Cell) -> list[Point]:
    """Vertex cycle of gamma_k (12 points, the closing point not repeated)."""
    out: list[Point] = []
    for piece in core_curve(cell):
        vs = list(piece.vertices)
        if out and out[-1] == vs[0]:
            vs = vs[1:]
        out.extend(vs)
    if out[0] == out[-1]:
        out.pop()
    return out


def build_upper_disk(cell: Cell) -> list[Plate]:
    f = CellFrame(cell)
    out = [_t_plate(f, lb, spec, "upper") for lb, spec in _T_UPPER.items()]
    for name, kind, chain in _RIDGES_UPPER:
        out.append(Plate(kind, tuple(f.vertex(*v) for v in chain), cell.id, "upper", name))
    for t, tri in enumerate(_POLE_FAN):
        out.append(Plate("P_t", tuple(f.vertex("N", *x) for x in tri), cell.id, "upper", f"N.{t}"))
    return out


def build_lower_disk(cell: Cell) -> list[Plate]:
    f = CellFrame(cell)
    out = [_t_plate(f, lb, spec, "lower") for lb, spec in _T_LOWER.items()]
    for name, kind, chain in _RIDGES_LOWER:
        out.append(Plate(kind, tuple(f.vertex(*v) for v in chain), cell.id, "lower", name))
    for t, tri in enumerate(_POLE_FAN):
        out.append(Plate("P_b", tuple(f.vertex("S", *x) for x in tri), cell.id, "lower", f"S.{t}"))
    return out


def build_diamond(cell: Cell) -> list[Plate]:
    """M plus the upper and lower disks: 44 surface plates and 8 core pieces."""
    return build_middle_part(cell) + build_upper_disk(cell) + build_lower_disk(cell)


def surfaces(plates: Iterable[Plate]) -> list[Plate]:
    return [p for p in plates if p.dim == 2]


def curves(plates: Iterable[Plate]) -> list[Plate]:
    return [p for p in plates if p.dim == 1]


# ---------------------------------------------------------------------------
# octahedra


@dataclass(frozen=True)
class Octahedron:
    cell: int
    vertices: dict  # name -> Point
    faces: tuple[tuple[str, tuple[str, str, str]], ...]  # (kind, vertex names)

    @property
    def N(self) -> Point:
        return self.vertices["N"]

    @property
    def S(self) -> Point:
        return self.vertices["S"]

    def face_points(self) -> list[tuple[Point, ...]]:
        return [tuple(self.vertices[n] for n in names) for _, names in self.faces]

    def equator(self) -> list[tuple[Point, Point]]:
        """Edges of the y2 = 0 slice."""
        v = self.vertices
        return [(v["C11"], v["C21"]), (v["C21"], v["C22"]), (v["C22"], v["C12"]), (v["C12"], v["C11"])]


def build_octahedron(cell: Cell) -> Octahedron:
    f = CellFrame(cell)
    names = ("C11", "C12", "C21", "C22", "N", "S")
    verts = {n: f.vertex(n, 0, 0) for n in names}
    faces = []
    for lb, (tri, (m, n)) in _T_UPPER.items():
        faces.append((f"t_{lb[0]}{lb[1]}^{{{m},{n}}}", tri))
    for lb, (tri, (m, n)) in _T_LOWER.items():
        faces.append((f"t_{lb[0]}{lb[1]}^{{{m},{n}}}", tri))
    return Octahedron(cell.id, verts, tuple(faces))


def build_delta_complex(nd, cc: CellComplex) -> list[Octahedron]:
    """One octahedron per cell, in id order."""
    return [build_octahedron(c) for c in cc.cells]


def cell_boundary(cell: Cell) -> set[frozenset]:
    """The four unit edges of the cell in (y1, z), as frozensets of endpoints."""
    f = CellFrame(cell)
    c = {n: f.corner(int(n[1]), int(n[2]))[:2] for n in ("C11", "C12", "C21", "C22")}
    return {
        frozenset((c["C11"], c["C12"])),
        frozenset((c["C21"], c["C22"])),
        frozenset((c["C11"], c["C21"])),
        frozenset((c["C12"], c["C22"])),
    }


# ---------------------------------------------------------------------------
# closure and equator checks


def closure_report(plates: Sequence[Plate]) -> dict:
    """Edge incidences, Euler characteristic, connectivity and vertex links."""
    polys = surfaces(plates)
    edge_count: dict[frozenset, int] = {}
    vertices: set = set()
    for p in polys:
        if len(set(p.vertices)) != len(p.vertices):
            return {"closed": False, "reason": f"{p.kind} {p.label} repeats a vertex"}
        vertices.update(p.vertices)
        for a, b in p.edges:
            e = frozenset((a, b))
            edge_count[e] = edge_count.get(e, 0) + 1
    bad = [e for e, n in edge_count.items() if n != 2]
    chi = len(vertices) - len(edge_count) + len(polys)
    # connectivity through shared edges
    owner: dict[frozenset, list[int]] = {}
    for k, p in enumerate(polys):
        for a, b in p.edges:
            owner.setdefault(frozenset((a, b)), []).append(k)
    seen = {0} if polys else set()
    stack = [0] if polys else []
    while stack:
        k = stack.pop()
        for a, b in polys[k].edges:
            for j in owner[frozenset((a, b))]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
    connected = len(seen) == len(polys)
    # vertex links must be single cycles
    links_ok = True
    for v in vertices:
        link_edges = []
        for p in polys:
            vs = p.vertices
            if v in vs:
                i = vs.index(v)
                link_edges.append((vs[i - 1], vs[(i + 1) % len(vs)]))
        if not _is_single_cycle(link_edges):
            links_ok = False
            break
    closed = not bad and chi == 2 and connected and links_ok
    return {
        "closed": closed,
        "plates": len(polys),
        "vertices": len(vertices),
        "edges": len(edge_count),
        "chi": chi,
        "bad_edges": len(bad),
        "connected": connected,
        "vertex_links_ok": links_ok,
    }


def _is_single_cycle(edges) -> bool:
    if not edges:
        return False
    adj: dict = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    if any(len(v) != 2 for v in adj.values()):
        return False
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(adj) == len(edges)


def _cut(points: list[Vector], fn: Callable[[Vector], Fraction]) -> list[Vector]:
    """Points of a convex set (given by its vertices) where the affine fn vanishes."""
    vals = [fn(p) for p in points]
    if all(v == 0 for v in vals):
        return points
    out = [p for p, v in zip(points, vals) if v == 0]
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            vi, vj = vals[i], vals[j]
            if vi * vj < 0:
                t = vi / (vi - vj)
                out.append(add(points[i], scale(t, sub(points[j], points[i]))))
    return list(dict.fromkeys(out))


def _extreme_pair(points: list[Vector]) -> tuple[Vector, Vector] | None:
    if len(points) < 2:
        return None
    best = None
    for a, b in itertools.combinations(points, 2):
        d = sum(abs(x) for x in sub(a, b))
        if best is None or d > best[0]:
            best = (d, a, b)
    return best[1], best[2]


def triangulate(plate: Plate) -> list[tuple[Point, Point, Point]]:
    """Ear-clipping in the plate's own plane (plates are simple polygons)."""
    vs = list(plate.vertices)
    pair = spanning_pair(vs)
    if pair is None:
        return []
    e1, e2 = pair
    base = vs[0]
    # coordinates with respect to (e1, e2) via a 2x2 solve on two independent columns
    cols = next(
        (i, j) for i, j in itertools.combinations(range(5), 2) if e1[i] * e2[j] - e1[j] * e2[i] != 0
    )
    i, j = cols
    dd = e1[i] * e2[j] - e1[j] * e2[i]

    def coords(p):
        d = sub(p, base)
        s = (d[i] * e2[j] - d[j] * e2[i]) / dd
        t = (e1[i] * d[j] - e1[j] * d[i]) / dd
        return (s, t)

    pts = [coords(v) for v in vs]
    # drop vertices that are collinear with their neighbours so ears are proper
    idx = list(range(len(vs)))
    area = sum(pts[k][0] * pts[(k + 1) % len(pts)][1] - pts[(k + 1) % len(pts)][0] * pts[k][1] for k in idx)
    orient = 1 if area > 0 else -1

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def inside(p, a, b, c):
        return cross(a, b, p) * orient >= 0 and cross(b, c, p) * orient >= 0 and cross(c, a, p) * orient >= 0

    tris = []
    guard = 0
    while len(idx) > 3 and guard < 1000:
        guard += 1
        for k in range(len(idx)):
            ia, ib, ic = idx[k - 1], idx[k], idx[(k + 1) % len(idx)]
            a, b, c = pts[ia], pts[ib], pts[ic]
            cr = cross(a, b, c) * orient
            if cr < 0:
                continue
            if cr == 0:
                # degenerate ear: drop the middle vertex without emitting a triangle
                idx.pop(k)
                break
            if any(inside(pts[q], a, b, c) for q in idx if q not in (ia, ib, ic)):
                continue
            tris.append((vs[ia], vs[ib], vs[ic]))
            idx.pop(k)
            break
    if len(idx) == 3:
        a, b, c = (pts[q] for q in idx)
        if cross(a, b, c) != 0:
            tris.append(tuple(vs[q] for q in idx))
    return tris


def slice_segments(plates: Iterable[Plate], fns: Sequence[Callable[[Vector], Fraction]]) -> list[tuple[Vector, Vector]]:
    """Nondegenerate segments in which the plates meet {fn = 0 for all fns}."""
    segs = []
    for p in plates:
        pieces = triangulate(p) if p.dim == 2 else list(zip(p.vertices, p.vertices[1:]))
        for piece in pieces:
            pts = list(piece)
            for fn in fns:
                pts = _cut(pts, fn)
                if not pts:
                    break
            pair = _extreme_pair(pts) if pts else None
            if pair is not None:
                segs.append(pair)
    return merge_segments(segs)


def merge_segments(segs: Iterable[tuple[Vector, Vector]]) -> list[tuple[Vector, Vector]]:
    """Union of collinear overlapping segments, as sorted endpoint pairs."""
    groups: dict = {}
    for a, b in segs:
        a, b = tuple(a), tuple(b)
        d = sub(b, a)
        lead = next(x for x in d if x != 0)
        d = scale(1 / lead, d)
        # parametrize the line by the first coordinate where d is nonzero
        k = next(i for i, x in enumerate(d) if x != 0)
        origin = sub(a, scale(a[k] / d[k], d))
        ta, tb = a[k] / d[k], b[k] / d[k]
        groups.setdefault((d, origin), []).append(tuple(sorted((ta, tb))))
    out = []
    for (d, origin), spans in groups.items():
        spans.sort()
        cur = list(spans[0])
        merged = []
        for lo, hi in spans[1:]:
            if lo <= cur[1]:
                cur[1] = max(cur[1], hi)
            else:
                merged.append(tuple(cur))
                cur = [lo, hi]
        merged.append(tuple(cur))
        for lo, hi in merged:
            out.append(tuple(sorted((add(origin, scale(lo, d)), add(origin, scale(hi, d))))))
    return sorted(out)


def equator_report(cell: Cell, plates: Sequence[Plate] | None = None) -> dict:
    """Compare the {y2 = 0, x2 = 0} slice of the diamond with gamma_k."""
    if plates is None:
        plates = build_diamond(cell)
    sliced = slice_segments(surfaces(plates), [lambda p: p[Y2], lambda p: p[X2]])
    gamma = merge_segments(e for piece in core_curve(cell) for e in piece.edges)
    return {"match": sliced == gamma, "slice_segments": len(sliced), "gamma_segments": len(gamma)}


# ---------------------------------------------------------------------------
# ribbons


class RibbonParamError(ValueError):
    pass


@dataclass(frozen=True)
class RibbonParams:
    epsilon: Fraction = Fraction(1, 10)
    delta: Fraction = Fraction(1, 10)

    def __post_init__(self):
        for name in ("epsilon", "delta"):
            v = Fraction(getattr(self, name))
            object.__setattr__(self, name, v)
            if v <= 0:
                raise RibbonParamError(f"{name} must be positive, got {v}")
            if v >= HALF:
                raise RibbonParamError(f"{name} must be below 1/2, got {v}")


Field = Callable[[Sequence[Fraction]], Vector]


def _e(i: int) -> Vector:
    v = [Fraction(0)] * 5
    v[i] = Fraction(1)
    return tuple(v)


def _const(v: Vector) -> Field:
    return lambda p: v


def _dy1(p):
    return (Fraction(0), Fraction(1), -p[X1], Fraction(0), Fraction(0))


def _dy2(p):
    return (Fraction(0), Fraction(0), -p[X2], Fraction(0), Fraction(1))


def _pprime(sign: int) -> tuple[Field, Field]:
    n1 = _const(add(_e(X1), scale(sign, _e(X2))))

    def n2(p):
        return (Fraction(0), Fraction(1), -(p[X1] - sign * p[X2]), Fraction(0), Fraction(-sign))

    return n1, n2


def thickening_fields(kind: str) -> tuple[Field, ...]:
    """Contact vector fields along which a plate of this kind is thickened."""
    if kind.startswith("T_"):
        return (_const(_e(X1)), _const(_e(X2)))
    if kind in ("S_H", "S_V"):
        return (_const(_e(X1)), _dy2)
    if kind in ("S_I", "P_t", "P_b"):
        return (_dy1, _dy2)
    if kind in ("P_+1", "P_-1"):
        return (_const(_e(X2)), _dy1)
    if kind == "P'_+1":
        return _pprime(1)
    if kind == "P'_-1":
        return _pprime(-1)
    # core pieces of gamma_k inside the 3-dimensional slice
    if kind in ("H_a", "V_b"):
        return (_const(_e(X1)),)
    if kind == "I-arc":
        return (_dy1,)
    raise KeyError(kind)


def sample_points(plate: Plate) -> list[Vector]:
    """Deterministic interior points: the centroid and three per polygon edge."""
    if plate.dim == 1:
        out = []
        for a, b in plate.edges:
            for k in range(1, 10):
                out.append(add(a, scale(Fraction(k, 10), sub(b, a))))
        return out
    g = plate.centroid
    out = [g]
    vs = plate.vertices
    for i in range(len(vs)):
        da, db = sub(vs[i], g), sub(vs[(i + 1) % len(vs)], g)
        for wa, wb in ((Fraction(1, 4), Fraction(1, 4)), (HALF, Fraction(1, 4)), (Fraction(1, 4), HALF)):
            out.append(add(g, add(scale(wa, da), scale(wb, db))))
    return out


@dataclass
class CheckReport:
    checks: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def add(self, name: str, ok: bool, **detail) -> None:
        self.checks.append({"name": name, "ok": bool(ok), **detail})

    def failures(self) -> list[dict]:
        return [c for c in self.checks if not c["ok"]]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": self.checks}


def _gram_det(form: ContactForm, frame: Sequence[Vector]) -> Fraction:
    return det([[form.d(a, b) for b in frame] for a in frame])


def _to3(v: Sequence) -> Vector:
    return (v[X1], v[Y1], v[Z])


def ribbon_frame(plate: Plate, p: Vector, s, t, tangents: Sequence[Vector]) -> tuple[Vector, list[Vector]]:
    """Ribbon point Phi(p, s, t) = p + s n1(p) + t n2(p) and its tangent frame."""
    fields_ = thickening_fields(plate.kind)
    shifts = (s, t)[: len(fields_)]
    q = p
    for c, n in zip(shifts, fields_):
        q = add(q, scale(c, n(p)))
    frame = []
    for v in tangents:
        w = v
        for c, n in zip(shifts, fields_):
            # the fields are affine in x, so D n(v) = n(p + v) - n(p)
            w = add(w, scale(c, sub(n(add(p, v)), n(p))))
        frame.append(w)
    frame.extend(n(p) for n in fields_)
    return q, frame


def plate_tangents(plate: Plate) -> list[Vector]:
    vs = plate.vertices
    if plate.dim == 1:
        return [sub(vs[1], vs[0])]
    pair = spanning_pair(vs)
    return list(pair) if pair else []


def ribbon_checks(plates: Sequence[Plate], params: RibbonParams | None = None) -> CheckReport:
    """Tangency along the core, transversality and symplecticity off it, separation.

    Surface plates get a 4-dimensional ribbon in R^5 and are tested with
    d(alpha); core pieces of gamma_k get a 2-dimensional ribbon in the slice
    {x2 = y2 = 0} and are tested with the 3-dimensional form.
    """
    if params is None:
        params = RibbonParams()
    eps, dl = params.epsilon, params.delta
    rep = CheckReport()
    for plate in plates:
        tang = plate_tangents(plate)
        form = ALPHA if plate.dim == 2 else ALPHA3
        full = 2 * plate.dim
        proj = (lambda v: v) if plate.dim == 2 else _to3
        problems = []
        for p in sample_points(plate):
            _, frame = ribbon_frame(plate, p, 0, 0, tang)
            fr = [proj(v) for v in frame]
            pp = proj(p)
            if any(form(pp, v) != 0 for v in fr):
                problems.append("core frame not isotropic")
            if rank(fr) != full:
                problems.append("core frame degenerate")
            if _gram_det(form, fr) == 0:
                problems.append("d(alpha) degenerate on core frame")
            offsets = [(eps, 0), (0, dl), (eps, dl)] if plate.dim == 2 else [(eps, 0)]
            for s, t in offsets:
                q, frame = ribbon_frame(plate, p, s, t, tang)
                fr = [proj(v) for v in frame]
                qq = proj(q)
                if all(form(qq, v) == 0 for v in fr):
                    problems.append(f"tangent to the contact planes at offset ({s}, {t})")
                if rank(fr) != full or _gram_det(form, fr) == 0:
                    problems.append(f"d(alpha) degenerate at offset ({s}, {t})")
            if problems:
                break
        rep.add(f"ribbon {plate.kind} {plate.part} {plate.label} cell {plate.cell}", not problems,
                problems=sorted(set(problems)))
    sep = separation_report(surfaces(plates), params)
    ok = sep.pop("ok")
    rep.add("non-neighbour ribbons separated", ok, **sep)
    return rep


_DIRECTIONS = None


def _directions() -> np.ndarray:
    global _DIRECTIONS
    if _DIRECTIONS is None:
        ds = []
        for d in itertools.product((-1, 0, 1), repeat=5):
            if any(d) and next(x for x in d if x) > 0:
                ds.append(d)
        _DIRECTIONS = np.array(ds, dtype=np.int64)
    return _DIRECTIONS


def separation_report(plates: Sequence[Plate], params: RibbonParams) -> dict:
    """Every two plates without a common vertex are split by some direction.

    Along a direction d the ribbon of a plate lies in the slab of the plate's
    vertices widened by rho(d) = max_v eps |d . n1(v)| + delta |d . n2(v)|.
    Coordinates are scaled to integers so the test is exact.
    """
    plates = list(plates)
    if len(plates) < 2:
        return {"ok": True, "pairs": 0, "unseparated": []}
    D = _directions()
    eps, dl = params.epsilon, params.delta
    den = 2 * eps.denominator * dl.denominator
    for p in plates:
        for v in p.vertices:
            for c in v:
                den = den * c.denominator // math.gcd(den, c.denominator)
    # fall back to Python integers when int64 could overflow
    bound = den * (1 + max(abs(c) for p in plates for v in p.vertices for c in v)) * 40
    itype = np.int64 if bound < 2**62 else object
    lo, hi, rho = [], [], []
    for p in plates:
        verts = np.array([[int(c * den) for c in v] for v in p.vertices], dtype=itype)
        proj = verts @ D.T
        lo.append(proj.min(axis=0))
        hi.append(proj.max(axis=0))
        fields_ = thickening_fields(p.kind)
        r = np.zeros(len(D), dtype=itype)
        for v in p.vertices:
            acc = np.zeros(len(D), dtype=itype)
            for w, n in zip((eps, dl), fields_):
                nv = np.array([int(c * w * den) for c in n(v)], dtype=itype)
                acc += np.abs(D @ nv)
            r = np.maximum(r, acc)
        rho.append(r)
    lo, hi, rho = np.array(lo), np.array(hi), np.array(rho)
    vsets = [set(p.vertices) for p in plates]
    bad, meeting, stray = [], [], []
    corners = cell_corner_fronts(plates)
    pairs = lp = 0
    n = len(plates)
    for i in range(n - 1):
        gap = np.maximum(lo[i + 1:] - hi[i], lo[i] - hi[i + 1:])
        split = (gap > rho[i] + rho[i + 1:]).any(axis=1)
        for off in np.flatnonzero(~split):
            j = i + 1 + int(off)
            if vsets[i] & vsets[j]:
                continue
            lp += 1
            if _hulls_separated(ribbon_hull(plates[i], params), ribbon_hull(plates[j], params)):
                continue
            names = [_plate_name(plates[i]), _plate_name(plates[j])]
            # plates that already meet at zero width are intersections of two
            # diamonds; they are allowed over a grid corner the two cells share
            if not _hulls_separated(plates[i].vertices, plates[j].vertices):
                meeting.append(names)
                if not _over_shared_corner(plates[i], plates[j], corners):
                    stray.append(names)
            else:
                bad.append(names)
    pairs = sum(1 for i in range(n) for j in range(i + 1, n) if not vsets[i] & vsets[j]) if n <= 600 else None
    return {
        "ok": not bad and not stray,
        "pairs": pairs,
        "lp_pairs": lp,
        "unseparated": bad[:10],
        "unseparated_count": len(bad),
        "meeting_count": len(meeting),
        "meeting_off_corner": stray[:10],
    }


def cell_corner_fronts(plates: Sequence[Plate]) -> dict[int, set]:
    """Cell id -> front positions (y1, z) of its four grid corners.

    The cell is a square with sides of slope +-1 in the front, so its corners
    are the extreme points in y1 and in z of the slice y2 = 0.
    """
    pts: dict[int, set] = {}
    for p in plates:
        pts.setdefault(p.cell, set()).update((v[Y1], v[Z]) for v in p.vertices if v[Y2] == 0)
    out = {}
    for cid, ps in pts.items():
        out[cid] = {
            min(ps, key=lambda q: q[1]),
            max(ps, key=lambda q: q[1]),
            min(ps, key=lambda q: q[0]),
            max(ps, key=lambda q: q[0]),
        }
    return out


def _over_shared_corner(p: Plate, q: Plate, corners: dict) -> bool:
    if p.cell == q.cell:
        return False
    common = corners.get(p.cell, set()) & corners.get(q.cell, set())
    fibre = lambda pl: {(v[Y1], v[Z]) for v in pl.vertices if v[Y2] == 0}
    return bool(common & fibre(p) & fibre(q))


def ribbon_hull(plate: Plate, params: RibbonParams) -> list[Vector]:
    """Points whose convex hull contains the ribbon of ``plate``.

    The thickening fields are affine in the base point, so the ribbon map is
    affine in each argument and the images of vertex/corner pairs suffice.
    """
    fields_ = thickening_fields(plate.kind)
    widths = (params.epsilon, params.delta)[: len(fields_)]
    out = []
    for v in plate.vertices:
        for signs in itertools.product((1, -1), repeat=len(fields_)):
            q = v
            for s, w, n in zip(signs, widths, fields_):
                q = add(q, scale(s * w, n(v)))
            out.append(q)
    return out


def _hulls_separated(A: Sequence[Vector], B: Sequence[Vector]) -> bool:
    """Exact certificate that conv(A) and conv(B) are disjoint.

    A separating direction is found by LP in floats, rounded to rationals and
    then rechecked exactly.
    """
    from scipy.optimize import linprog

    a = np.array([[float(c) for c in p] for p in A])
    b = np.array([[float(c) for c in p] for p in B])
    # w.a - c <= -1 and c - w.b <= -1, variables (w, c)
    A_ub = np.vstack([np.hstack([a, -np.ones((len(a), 1))]), np.hstack([-b, np.ones((len(b), 1))])])
    b_ub = -np.ones(len(a) + len(b))
    res = linprog(np.zeros(6), A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * 6, method="highs")
    if res.status != 0:
        return False
    w = [Fraction(x).limit_denominator(10**6) for x in res.x[:5]]
    dot = lambda p: sum(wi * pi for wi, pi in zip(w, p))
    return max(dot(p) for p in A) < min(dot(p) for p in B)


def _plate_name(p: Plate) -> str:
    return f"{p.kind}:{p.part}:{p.label}:{p.cell}"


# ---------------------------------------------------------------------------
# meshes


def _fmt(x: Fraction) -> str:
    return format(float(x), ".10g")


def _mesh_items(objects: Iterable, projection: str):
    """Yield (face point tuples, is_curve) in front coordinates."""
    if projection not in ("pi5", "pi3"):
        raise ValueError(f"unknown projection {projection!r}")
    for obj in objects:
        if isinstance(obj, Octahedron):
            polys = [(pts, 2) for pts in obj.face_points()]
        elif isinstance(obj, Plate):
            polys = [(obj.vertices, obj.dim)]
        else:
            raise TypeError(f"cannot mesh {type(obj).__name__}")
        for pts, dim in polys:
            if projection == "pi5":
                front = [(p[Y1], p[Z], p[Y2]) for p in pts]
                if dim == 1:
                    for a, b in zip(front, front[1:]):
                        yield (a, b), True
                else:
                    yield tuple(front), False
            else:
                if dim == 1:
                    chain = [p for p in pts if p[Y2] == 0]
                    for a, b in zip(chain, chain[1:]):
                        yield ((a[Y1], a[Z], Fraction(0)), (b[Y1], b[Z], Fraction(0))), True
                    continue
                if all(p[Y2] == 0 for p in pts):
                    yield tuple((p[Y1], p[Z], Fraction(0)) for p in pts), False
                    continue
                plate = Plate("slice", tuple(pts), 0, "", dim=2)
                for a, b in slice_segments([plate], [lambda q: q[Y2]]):
                    yield ((a[Y1], a[Z], Fraction(0)), (b[Y1], b[Z], Fraction(0))), True


def _collinear(pts) -> bool:
    return rank(sub(p, pts[0]) for p in pts[1:]) < 2


@dataclass
class Mesh:
    vertices: list[tuple[Fraction, Fraction, Fraction]]
    faces: list[tuple[int, ...]]  # 0-based, triangles
    lines: list[tuple[int, int]]


def build_mesh(objects: Iterable, projection: str = "pi5") -> Mesh:
    index: dict = {}
    verts: list = []
    faces: list = []
    lines: list = []
    seen_faces: set = set()
    seen_lines: set = set()

    def vid(p):
        if p not in index:
            index[p] = len(verts)
            verts.append(p)
        return index[p]

    for pts, is_curve in _mesh_items(objects, projection):
        if is_curve:
            a, b = pts
            if a == b:
                continue
            key = frozenset((a, b))
            if key in seen_lines:
                continue
            seen_lines.add(key)
            lines.append((vid(a), vid(b)))
            continue
        pts = list(dict.fromkeys(pts))
        if len(pts) < 3 or _collinear(pts):
            if projection == "pi3" and len(pts) >= 2:
                pair = _extreme_pair(pts)
                key = frozenset(pair)
                if key not in seen_lines:
                    seen_lines.add(key)
                    lines.append((vid(pair[0]), vid(pair[1])))
            continue
        for k in range(1, len(pts) - 1):
            tri = (pts[0], pts[k], pts[k + 1])
            if _collinear(list(tri)):
                continue
            key = frozenset(tri)
            if key in seen_faces:
                continue
            seen_faces.add(key)
            faces.append(tuple(vid(p) for p in tri))
    return Mesh(verts, faces, lines)


def export_mesh(objects: Iterable, projection: str = "pi5", format: str = "off", path=None) -> str:
    """Write an OFF or OBJ mesh; returns the text and writes it when ``path`` is given.

    Vertices are printed in decimal with the exact rationals in a trailing
    ``# p/q p/q p/q`` comment.  Curves become 2-vertex faces in OFF and
    ``l`` records in OBJ.
    """
    mesh = build_mesh(objects, projection)
    lines = []
    exact = lambda v: " ".join(str(c) for c in v)
    if format == "off":
        lines.append("OFF")
        lines.append(f"{len(mesh.vertices)} {len(mesh.faces) + len(mesh.lines)} 0")
        for v in mesh.vertices:
            lines.append(" ".join(_fmt(c) for c in v) + f" # {exact(v)}")
        for f in mesh.faces:
            lines.append(f"{len(f)} " + " ".join(map(str, f)))
        for a, b in mesh.lines:
            lines.append(f"2 {a} {b}")
    elif format == "obj":
        lines.append(f"# projection {projection}")
        for v in mesh.vertices:
            lines.append("v " + " ".join(_fmt(c) for c in v) + f" # {exact(v)}")
        for f in mesh.faces:
            lines.append("f " + " ".join(str(i + 1) for i in f))
        for a, b in mesh.lines:
            lines.append(f"l {a + 1} {b + 1}")
    else:
        raise ValueError(f"unknown mesh format {format!r}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    return text


def read_mesh(text: str) -> Mesh:
    """Parse OFF or OBJ text written by :func:`export_mesh` (exact vertices)."""
    rows = text.splitlines()
    verts, faces, lines = [], [], []

    def exact(line):
        if "#" not in line:
            return tuple(Fraction(x) for x in line.split()[-3:])
        return tuple(Fraction(x) for x in line.split("#", 1)[1].split())

    if rows and rows[0].strip() == "OFF":
        nv, _nf, _ = map(int, rows[1].split())
        for line in rows[2 : 2 + nv]:
            verts.append(exact(line))
        for line in rows[2 + nv :]:
            if not line.strip():
                continue
            parts = list(map(int, line.split()))
            if parts[0] == 2:
                lines.append((parts[1], parts[2]))
            else:
                faces.append(tuple(parts[1:]))
        return Mesh(verts, faces, lines)
    for line in rows:
        if line.startswith("v "):
            verts.append(exact(line[2:]))
        elif line.startswith("f "):
            faces.append(tuple(int(x) - 1 for x in line.split()[1:]))
        elif line.startswith("l "):
            a, b = (int(x) - 1 for x in line.split()[1:])
            lines.append((a, b))
    return Mesh(verts, faces, lines)
