"""Unit-grid cells of a normalized diagram.

After normalization every intercept is an integer, so in the rotated
coordinates each component is a rectilinear cycle on the integer lattice and
the region it bounds is a union of unit squares.  Cell ``(u0, w0)`` is the
square ``[u0, u0 + 1] x [w0, w0 + 1]``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .diagram import Component, DiagramError, SquareBridgeDiagram, require_admissible

# ("h", u, w): unit piece of the line u = const between w and w + 1
# ("v", w, u): unit piece of the line w = const between u and u + 1
Edge = tuple[str, int, int]


class DisconnectedComplex(ValueError):
    """The cells do not form one edge-connected region."""

    def __init__(self, pieces: int, detail: str = ""):
        msg = f"cell complex has {pieces} edge-connected pieces"
        if detail:
            msg += f": {detail}"
        msg += "; isotope the diagram so that the regions share edges"
        super().__init__(msg)
        self.pieces = pieces


@dataclass(frozen=True, eq=False)
class NormalizedDiagram(SquareBridgeDiagram):
    """A diagram whose intercepts are consecutive integers starting at 0."""

    @cached_property
    def complex(self) -> "CellComplex":
        return enumerate_cells(self)


def normalize(d: SquareBridgeDiagram) -> NormalizedDiagram:
    """Order-preserving relabeling of intercepts to 0, 1, 2, ...

    Equal intercepts (collinear segments) stay equal.
    """
    def rank(values):
        distinct = sorted(set(values.values()))
        pos = {x: k for k, x in enumerate(distinct)}
        return {idx: Fraction(pos[x]) for idx, x in values.items()}

    return NormalizedDiagram(
        rank(d.h_intercepts),
        rank(d.v_intercepts),
        d.corners,
        dict(d.orientations),
        d.hints,
    )


@dataclass(frozen=True)
class Cell:
    id: int
    u0: int
    w0: int

    @property
    def center(self) -> tuple[Fraction, Fraction]:
        return (Fraction(2 * self.u0 + 1, 2), Fraction(2 * self.w0 + 1, 2))

    @property
    def edges(self) -> tuple[Edge, Edge, Edge, Edge]:
        """Boundary edges in the order left, right, bottom, top (in u, w)."""
        u, w = self.u0, self.w0
        return (("h", u, w), ("h", u + 1, w), ("v", w, u), ("v", w + 1, u))

    def to_json(self) -> dict:
        return {"id": self.id, "u0": self.u0, "w0": self.w0}


@dataclass
class CellComplex:
    """Cells with shared-edge adjacency and a connectivity-respecting order.

    Ids are 1-based and sorted by height ``u0 + w0`` (then ``u0``), i.e. by
    the z-coordinate of the cell's lowest corner.
    """

    cells: list[Cell]
    adjacency: list[tuple[int, int]]
    order: list[int]
    per_component: dict[int, list[int]] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.cells)

    @cached_property
    def by_position(self) -> dict[tuple[int, int], int]:
        return {(c.u0, c.w0): c.id for c in self.cells}

    @cached_property
    def neighbors(self) -> dict[int, list[int]]:
        nb: dict[int, list[int]] = {c.id: [] for c in self.cells}
        for i, j in self.adjacency:
            nb[i].append(j)
            nb[j].append(i)
        for v in nb.values():
            v.sort()
        return nb

    def cell(self, k: int) -> Cell:
        return self.cells[k - 1]

    def shared_edge(self, i: int, j: int) -> Edge | None:
        a, b = self.cell(i), self.cell(j)
        common = set(a.edges) & set(b.edges)
        return next(iter(common)) if common else None

    def with_order(self, order: list[int]) -> "CellComplex":
        return CellComplex(self.cells, self.adjacency, list(order), self.per_component)

    def to_json(self) -> dict:
        return {
            "cells": [c.to_json() for c in self.cells],
            "adjacency": [list(e) for e in self.adjacency],
            "order": list(self.order),
            "per_component": {str(k): v for k, v in sorted(self.per_component.items())},
        }


def _require_integral(nd: SquareBridgeDiagram) -> None:
    for x in list(nd.h_intercepts.values()) + list(nd.v_intercepts.values()):
        if x.denominator != 1:
            raise DiagramError("diagram must be normalized to integer intercepts")


def component_fill(nd: SquareBridgeDiagram, c: Component) -> list[tuple[int, int]]:
    """Unit cells whose centers lie inside the cycle of ``c`` (scanline parity)."""
    crossings_by_row: dict[int, list[int]] = {}
    n = len(c.points)
    for k, (kind, _) in enumerate(c.segments):
        if kind != "h":
            continue
        (u, w0), (_, w1) = c.points[k], c.points[(k + 1) % n]
        lo, hi = sorted((int(w0), int(w1)))
        for row in range(lo, hi):
            crossings_by_row.setdefault(row, []).append(int(u))
    out = []
    for row in sorted(crossings_by_row):
        us = sorted(crossings_by_row[row])
        for left, right in zip(us[::2], us[1::2]):
            out.extend((u, row) for u in range(left, right))
    return out


def enumerate_cells(nd: SquareBridgeDiagram, check_connected: bool = True) -> CellComplex:
    """Cells inside at least one component, their adjacency and BFS order."""
    require_admissible(nd)
    _require_integral(nd)
    fills = {c.index: component_fill(nd, c) for c in nd.components}
    positions = sorted(
        {p for cells in fills.values() for p in cells}, key=lambda p: (p[0] + p[1], p[0], p[1])
    )
    cells = [Cell(k + 1, u, w) for k, (u, w) in enumerate(positions)]
    pos_id = {(c.u0, c.w0): c.id for c in cells}
    adjacency = []
    for c in cells:
        for du, dw in ((1, 0), (0, 1)):
            j = pos_id.get((c.u0 + du, c.w0 + dw))
            if j is not None:
                adjacency.append(tuple(sorted((c.id, j))))
    adjacency.sort()
    per_component = {k: sorted(pos_id[p] for p in v) for k, v in fills.items()}
    cc = CellComplex(cells, adjacency, [], per_component)
    if cells:
        root = min(cells, key=lambda c: (c.u0, c.w0)).id
        order = _bfs(cc, root)
        if len(order) != len(cells):
            if check_connected:
                raise DisconnectedComplex(_count_pieces(cc))
        cc.order = order
    return cc


def _bfs(cc: CellComplex, root: int) -> list[int]:
    nb = cc.neighbors
    seen = {root}
    order = [root]
    queue = deque([root])
    while queue:
        k = queue.popleft()
        for j in nb[k]:
            if j not in seen:
                seen.add(j)
                order.append(j)
                queue.append(j)
    return order


def _count_pieces(cc: CellComplex) -> int:
    left = {c.id for c in cc.cells}
    pieces = 0
    while left:
        pieces += 1
        for k in _bfs(cc, min(left)):
            left.discard(k)
    return pieces


def order_cells(cc: CellComplex, root: int | None = None) -> list[int]:
    """BFS order from ``root`` (default: the lexicographically least cell)."""
    if not cc.cells:
        return []
    if root is None:
        root = min(cc.cells, key=lambda c: (c.u0, c.w0)).id
    if root not in cc.neighbors:
        raise ValueError(f"unknown root cell {root}")
    order = _bfs(cc, root)
    if len(order) != cc.m:
        raise DisconnectedComplex(_count_pieces(cc))
    return order


def check_order(cc: CellComplex, order: Iterable[int]) -> list[int]:
    """Validate an explicit order: a permutation whose prefixes are connected."""
    order = list(order)
    if sorted(order) != [c.id for c in cc.cells]:
        raise ValueError("order must be a permutation of the cell ids")
    nb = cc.neighbors
    placed = set()
    for k, cid in enumerate(order):
        if k and not any(j in placed for j in nb[cid]):
            raise ValueError(f"cell {cid} at position {k + 1} does not touch the earlier cells")
        placed.add(cid)
    return order


def cells_inside(nd: NormalizedDiagram, c: Component | int) -> set[int]:
    """Ids of the cells inside the cycle of one component."""
    index = c if isinstance(c, int) else c.index
    cc = nd.complex if isinstance(nd, NormalizedDiagram) else enumerate_cells(nd)
    if index not in cc.per_component:
        raise KeyError(f"unknown component {index}")
    return set(cc.per_component[index])


__all__ = [
    "Cell",
    "CellComplex",
    "DisconnectedComplex",
    "NormalizedDiagram",
    "cells_inside",
    "check_order",
    "component_fill",
    "enumerate_cells",
    "normalize",
    "order_cells",
]
