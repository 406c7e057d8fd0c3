from __future__ import annotations

from oracles import front_point, trace_fronts


def oracle_fronts(d):
    flips = [k for k, s in sorted(d.orientations.items()) if s < 0]
    return trace_fronts(d.h_intercepts, d.v_intercepts, d.corners, flips)


def library_fronts(d):
    return [[front_point(*p) for p in c.points] for c in d.components]


def same_cycle(a, b) -> bool:
    if len(a) != len(b) or set(a) != set(b):
        return False
    k = b.index(a[0])
    return a == b[k:] + b[:k]
