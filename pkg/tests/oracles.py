"""Reference computations written independently of the package internals.

Everything here works from raw coordinates: intercepts, corners, cell
positions or explicit point lists.  Nothing calls into the combinatorial
code paths that the tests are meant to check.
"""
from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from itertools import combinations

import numpy as np


# ---------------------------------------------------------------- fronts


def front_point(a, b):
    """(y1, z) of the corner where u = z + y1 = a meets w = z - y1 = b."""
    a, b = Fraction(a), Fraction(b)
    return ((a - b) / 2, (a + b) / 2)


def legendrian_lift(front: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction, Fraction]]:
    """PL Legendrian lift of a closed front with slopes +-1, as (x1, y1, z).

    On each segment x1 = -dz/dy1.  At every corner the curve runs straight
    in the x1 direction between the two slopes.
    """
    n = len(front)
    slopes = []
    for k in range(n):
        (y0, z0), (y1, z1) = front[k], front[(k + 1) % n]
        slopes.append(-(z1 - z0) / (y1 - y0))
    pts = []
    for k in range(n):
        y, z = front[k]
        pts.append((slopes[k - 1], y, z))
        pts.append((slopes[k], y, z))
    return pts


def _to_standard(p):
    # (x1, y1, z) -> (y1, -x1, z): dz + x1 dy1 becomes dz - y dx
    x1, y1, z = (float(c) for c in p)
    return np.array([y1, -x1, z])


def _seg_solid_angle(p1, p2, p3, p4) -> float:
    r13, r14, r23, r24 = p3 - p1, p4 - p1, p3 - p2, p4 - p2
    faces = [np.cross(r13, r14), np.cross(r14, r24), np.cross(r24, r23), np.cross(r23, r13)]
    norms = [np.linalg.norm(f) for f in faces]
    if min(norms) < 1e-14:
        return 0.0
    n = [f / l for f, l in zip(faces, norms)]
    omega = sum(math.asin(max(-1.0, min(1.0, float(n[k].dot(n[(k + 1) % 4]))))) for k in range(4))
    s = float(np.cross(p4 - p3, p2 - p1).dot(r13))
    return omega * (1 if s > 0 else -1 if s < 0 else 0)


def gauss_linking(a: list, b: list, standard: bool = True) -> int:
    """Linking number of two disjoint closed polygons via exact solid angles."""
    conv = _to_standard if standard else (lambda p: np.array([float(c) for c in p]))
    A = [conv(p) for p in a]
    B = [conv(p) for p in b]
    total = 0.0
    for i in range(len(A)):
        p1, p2 = A[i], A[(i + 1) % len(A)]
        if np.allclose(p1, p2):
            continue
        for j in range(len(B)):
            p3, p4 = B[j], B[(j + 1) % len(B)]
            if np.allclose(p3, p4):
                continue
            total += _seg_solid_angle(p1, p2, p3, p4)
    lk = total / (4 * math.pi)
    r = round(lk)
    assert abs(lk - r) < 1e-6, lk
    return int(r)


def gauss_linking_riemann(a, b, steps: int = 40) -> float:
    """Plain double-sum Gauss integral in standard coordinates (for calibrating the sign)."""

    def sample(poly):
        P = [np.array([float(c) for c in p]) for p in poly]
        mids, tans = [], []
        for i in range(len(P)):
            p, q = P[i], P[(i + 1) % len(P)]
            for s in range(steps):
                t0, t1 = s / steps, (s + 1) / steps
                mids.append(p + (q - p) * (t0 + t1) / 2)
                tans.append((q - p) / steps)
        return np.array(mids), np.array(tans)

    ma, ta = sample(a)
    mb, tb = sample(b)
    total = 0.0
    for x, dx in zip(ma, ta):
        r = x - mb
        total += float((r * np.cross(dx, tb)).sum(axis=1).dot(1 / np.linalg.norm(r, axis=1) ** 3))
    return total / (4 * math.pi)


def push_reeb(curve, eps=Fraction(1, 1000)):
    return [(x, y, z + eps) for x, y, z in curve]


def tb_pushoff(front) -> int:
    """Thurston-Bennequin number as lk(K, K pushed along the Reeb field)."""
    K = legendrian_lift(front)
    return gauss_linking(K, push_reeb(K))


# ------------------------------------------------------- tracing corners


def trace_fronts(h: dict, v: dict, corners, flips=()) -> list[list[tuple[Fraction, Fraction]]]:
    """Closed fronts of a diagram from raw data.

    Each component starts at its least corner by (u, w) and leaves along the
    v line first; components listed in ``flips`` (1-based, in start order)
    are reversed.
    """
    corners = set(corners)
    by_h: dict[int, list] = {}
    by_v: dict[int, list] = {}
    for i, j in corners:
        by_h.setdefault(i, []).append((i, j))
        by_v.setdefault(j, []).append((i, j))
    left = set(corners)
    comps = []
    while left:
        start = min(left, key=lambda c: (h[c[0]], v[c[1]], c))
        cyc = [start]
        cur, along_v = start, True
        while True:
            line = by_v[cur[1]] if along_v else by_h[cur[0]]
            nxt = next(c for c in line if c != cur)
            along_v = not along_v
            if nxt == start:
                break
            cyc.append(nxt)
            cur = nxt
        left -= set(cyc)
        comps.append(cyc)
    fronts = [[front_point(h[i], v[j]) for i, j in cyc] for cyc in comps]
    for k in flips:
        fronts[k - 1] = fronts[k - 1][::-1]
    return fronts


def brute_crossings(fronts) -> list[tuple[Fraction, Fraction]]:
    """All transverse intersection points of segments of different slope."""
    segs = []
    for f in fronts:
        for k in range(len(f)):
            segs.append((f[k], f[(k + 1) % len(f)]))
    out = []
    for (p, q), (r, s) in combinations(segs, 2):
        d1 = (q[0] - p[0], q[1] - p[1])
        d2 = (s[0] - r[0], s[1] - r[1])
        den = d1[0] * d2[1] - d1[1] * d2[0]
        if den == 0:
            continue
        t = ((r[0] - p[0]) * d2[1] - (r[1] - p[1]) * d2[0]) / den
        u = ((r[0] - p[0]) * d1[1] - (r[1] - p[1]) * d1[0]) / den
        if 0 < t < 1 and 0 < u < 1:
            out.append((p[0] + t * d1[0], p[1] + t * d1[1]))
    return sorted(out)


# ----------------------------------------------------------------- cells


def raster_cells(uw_cycles) -> tuple[set, dict]:
    """Unit cells of the (u, w) grid whose centres lie inside some cycle (ray casting)."""
    per = {}
    for k, cyc in enumerate(uw_cycles, start=1):
        us = [p[0] for p in cyc]
        ws = [p[1] for p in cyc]
        inside = set()
        for u in range(int(min(us)), int(max(us))):
            for w in range(int(min(ws)), int(max(ws))):
                cu, cw = u + Fraction(1, 2), w + Fraction(1, 2)
                hits = 0
                for a in range(len(cyc)):
                    (u1, w1), (u2, w2) = cyc[a], cyc[(a + 1) % len(cyc)]
                    if u1 == u2 and u1 > cu and min(w1, w2) < cw < max(w1, w2):
                        hits += 1
                if hits % 2:
                    inside.add((u, w))
        per[k] = inside
    return set().union(*per.values()) if per else set(), per


def induced_connected(positions) -> bool:
    positions = set(positions)
    if not positions:
        return True
    start = next(iter(positions))
    seen = {start}
    todo = deque([start])
    while todo:
        u, w = todo.popleft()
        for nb in ((u + 1, w), (u - 1, w), (u, w + 1), (u, w - 1)):
            if nb in positions and nb not in seen:
                seen.add(nb)
                todo.append(nb)
    return len(seen) == len(positions)


# -------------------------------------------------------------- contact


def alpha(p, v) -> Fraction:
    """dz + x1 dy1 + x2 dy2 at p applied to v, coordinates (x1, y1, z, x2, y2)."""
    return v[2] + p[0] * v[1] + p[3] * v[4]


def dalpha(v, w) -> Fraction:
    return (v[0] * w[1] - v[1] * w[0]) + (v[3] * w[4] - v[4] * w[3])


def plate_is_legendrian_brute(vertices) -> bool:
    """alpha kills every edge direction at every vertex, and d(alpha) kills all pairs."""
    dirs = [tuple(b[i] - a[i] for i in range(5)) for a, b in combinations(vertices, 2)]
    if any(alpha(p, d) != 0 for p in vertices for d in dirs):
        return False
    return all(dalpha(a, b) == 0 for a, b in combinations(dirs, 2))


# -------------------------------------------------------------- algebra


def smith_invariants(rows) -> list[int]:
    """Invariant factors (with 0 for free summands) by naive integer elimination."""
    A = [list(map(int, r)) for r in rows]
    if not A or not A[0]:
        return []
    nr, nc = len(A), len(A[0])
    diag = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        while True:
            piv = [(abs(A[i][j]), i, j) for i in range(r, nr) for j in range(c, nc) if A[i][j]]
            if not piv:
                return sorted(abs(x) for x in diag) + [0] * (min(nr, nc) - len(diag))
            _, pi, pj = min(piv)
            A[r], A[pi] = A[pi], A[r]
            for row in A:
                row[c], row[pj] = row[pj], row[c]
            p = A[r][c]
            done = True
            for i in range(r + 1, nr):
                q = A[i][c] // p
                A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                done = done and A[i][c] == 0
            for j in range(c + 1, nc):
                q = A[r][j] // p
                for i in range(nr):
                    A[i][j] -= q * A[i][c]
                done = done and A[r][j] == 0
            if done:
                bad = [(i, j) for i in range(r + 1, nr) for j in range(c + 1, nc) if A[i][j] % p]
                if bad:
                    i, _ = bad[0]
                    A[r] = [x + y for x, y in zip(A[r], A[i])]
                    continue
                diag.append(p)
                r += 1
                break
    diag = sorted(abs(x) for x in diag)
    return diag + [0] * (min(nr, nc) - len(diag))


def group_of(rows, n) -> tuple[int, tuple[int, ...]]:
    """(free rank, torsion) of Z^n / row span."""
    inv = smith_invariants(rows) if rows else []
    nonzero = [x for x in inv if x != 0]
    rank = n - len(nonzero)
    return rank, tuple(x for x in nonzero if x != 1)
