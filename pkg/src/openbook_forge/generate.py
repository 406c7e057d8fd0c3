"""Diagram generators: random admissible diagrams and large test shapes."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable

from .diagram import SquareBridgeDiagram, from_cycles

Cellpos = tuple[int, int]


def _nbrs(c: Cellpos) -> list[Cellpos]:
    u, w = c
    return [(u + 1, w), (u - 1, w), (u, w + 1), (u, w - 1)]


def boundary_cycle(cells: Iterable[Cellpos]) -> list[tuple[int, int]] | None:
    """Turning points of the boundary of a union of unit cells, counterclockwise.

    Returns None unless the boundary is one simple closed curve (no holes,
    no pinch points).
    """
    cells = set(cells)
    # directed unit edges with the region on the left
    succ: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for u, w in cells:
        for a, b, nb in (
            ((u, w), (u + 1, w), (u, w - 1)),
            ((u + 1, w), (u + 1, w + 1), (u + 1, w)),
            ((u + 1, w + 1), (u, w + 1), (u, w + 1)),
            ((u, w + 1), (u, w), (u - 1, w)),
        ):
            if nb not in cells:
                succ.setdefault(a, []).append(b)
    if not succ or any(len(v) != 1 for v in succ.values()):
        return None
    start = min(succ)
    path = [start]
    cur = succ[start][0]
    while cur != start:
        path.append(cur)
        cur = succ[cur][0]
        if len(path) > len(succ):
            return None
    if len(path) != len(succ):
        return None
    # keep only turning points
    n = len(path)
    turns = []
    for k in range(n):
        p, q, r = path[k - 1], path[k], path[(k + 1) % n]
        if (q[0] - p[0], q[1] - p[1]) != (r[0] - q[0], r[1] - q[1]):
            turns.append(q)
    return turns


def random_polyomino(n: int, rng: random.Random) -> set[Cellpos]:
    """Grow a simply connected polyomino with a simple boundary."""
    shape = {(0, 0)}
    attempts = 0
    while len(shape) < n and attempts < 50 * n:
        attempts += 1
        c = rng.choice(sorted(shape))
        nb = rng.choice(_nbrs(c))
        if nb in shape:
            continue
        trial = shape | {nb}
        if boundary_cycle(trial) is None:
            continue
        shape = trial
    return shape


def _warp(values: set[int], rng: random.Random) -> dict[int, Fraction]:
    """A random strictly increasing map to rationals with uneven gaps."""
    out = {}
    x = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    for v in sorted(values):
        out[v] = x
        x += Fraction(rng.randint(1, 7), rng.randint(1, 4))
    return out


def diagram_from_cycles(cycles, reverse: Iterable[bool] | None = None) -> SquareBridgeDiagram:
    cycles = [list(c) for c in cycles]
    if reverse is not None:
        cycles = [c[::-1] if r else c for c, r in zip(cycles, reverse)]
    return from_cycles(cycles)


def random_diagram(rng: random.Random, max_cells: int = 12, components: int | None = None,
                   warp: bool = True) -> SquareBridgeDiagram:
    """A random admissible diagram with one or two components and a connected complex."""
    if components is None:
        components = rng.choice((1, 1, 2))
    while True:
        if components == 1:
            cyc = [boundary_cycle(random_polyomino(rng.randint(1, max_cells), rng))]
        else:
            a = boundary_cycle(random_polyomino(rng.randint(1, max(1, max_cells // 3)), rng))
            b = boundary_cycle(random_polyomino(rng.randint(1, max(1, max_cells // 3)), rng))
            du, dw = rng.randint(-2, 2), rng.randint(-2, 2)
            cyc = [[(2 * u, 2 * w) for u, w in a], [(2 * (u + du) + 1, 2 * (w + dw) + 1) for u, w in b]]
        if warp:
            us = {p[0] for c in cyc for p in c}
            ws = {p[1] for c in cyc for p in c}
            fu, fw = _warp(us, rng), _warp(ws, rng)
            cyc = [[(fu[u], fw[w]) for u, w in c] for c in cyc]
        d = diagram_from_cycles(cyc, [rng.random() < 0.5 for _ in cyc])
        if components == 1 or _connected(d):
            return d


def _connected(d: SquareBridgeDiagram) -> bool:
    from .cells import DisconnectedComplex, enumerate_cells, normalize

    try:
        enumerate_cells(normalize(d))
    except DisconnectedComplex:
        return False
    return True


def comb_square(n: int) -> SquareBridgeDiagram:
    """One component filling an n x n cell block with notches along two sides.

    Cells (u, n - 1) with u odd and (n - 1, w) with w odd are removed, so
    every grid line 0..n carries a segment and normalization keeps the whole
    grid.  For n = 100 this gives 9901 cells.
    """
    cells = {(u, w) for u in range(n) for w in range(n)}
    cells -= {(u, n - 1) for u in range(1, n, 2)}
    cells -= {(n - 1, w) for w in range(1, n, 2)}
    cyc = boundary_cycle(cells)
    if cyc is None:
        raise ValueError(f"comb square of size {n} has no simple boundary")
    return from_cycles([cyc], oriented=False)
