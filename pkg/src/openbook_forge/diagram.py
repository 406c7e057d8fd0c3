"""Square bridge diagrams of Legendrian links in the standard contact 3-space.

A diagram is made of slope -1 segments ``h_a`` (the lines ``z = -y1 + a``)
and slope +1 segments ``v_b`` (the lines ``z = y1 + b``).  Corner ``(i, j)``
is an endpoint shared by ``h_i`` and ``v_j``.

Most of the combinatorics is easier in the rotated coordinates
``u = z + y1`` and ``w = z - y1``: there ``h_a`` is the vertical line
``u = a`` and ``v_b`` is the horizontal line ``w = b``, so corner ``(i, j)``
sits at ``(u, w) = (a_i, b_j)`` and every component is a rectilinear cycle.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

Corner = tuple[int, int]
SegmentRef = tuple[str, int]


class DiagramParseError(ValueError):
    """Malformed diagram source.  Carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class DiagramError(ValueError):
    """Raised when an operation needs a valid (or admissible) diagram."""


def _sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Crossing:
    """Interior intersection of ``h_i`` (over) with ``v_j`` (under)."""

    i: int
    j: int
    position: tuple[Fraction, Fraction]  # (y1, z)
    sign: int
    components: tuple[int, int]  # (component of h_i, component of v_j)
    over: str = "h"

    @property
    def is_self(self) -> bool:
        return self.components[0] == self.components[1]


@dataclass(frozen=True)
class Component:
    """One traversed link component.

    ``segments[k]`` runs from ``corners[k]`` to ``corners[k + 1]`` (cyclically).
    ``points`` holds the corner positions in ``(u, w)``.
    """

    index: int
    corners: tuple[Corner, ...]
    segments: tuple[SegmentRef, ...]
    points: tuple[tuple[Fraction, Fraction], ...]
    writhe: int
    cusp_count: int

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def counterclockwise(self) -> bool:
        """True when the traversal is counterclockwise in the (u, w) plane."""
        return polygon_area2(self.points) > 0

    def y1_directions(self) -> tuple[int, ...]:
        """Sign of the y1-velocity along each segment."""
        out = []
        n = len(self.points)
        for k in range(n):
            (u0, w0), (u1, w1) = self.points[k], self.points[(k + 1) % n]
            out.append(_sign((u1 - u0) - (w1 - w0)))
        return tuple(out)

    def cusps(self) -> tuple[Corner, ...]:
        """Corners where the y1-direction reverses."""
        dirs = self.y1_directions()
        n = len(dirs)
        return tuple(self.corners[(k + 1) % n] for k in range(n) if dirs[k] != dirs[(k + 1) % n])


def polygon_area2(points: Sequence[tuple[Fraction, Fraction]]) -> Fraction:
    """Twice the signed area (shoelace)."""
    s = Fraction(0)
    n = len(points)
    for k in range(n):
        (x0, y0), (x1, y1) = points[k], points[(k + 1) % n]
        s += x0 * y1 - x1 * y0
    return s


@dataclass
class ValidationReport:
    valid: bool
    admissible: bool
    errors: list[str] = field(default_factory=list)
    self_crossings: list[Crossing] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "admissible": self.admissible,
            "errors": list(self.errors),
            "self_crossings": [[c.i, c.j] for c in self.self_crossings],
        }


@dataclass(frozen=True, eq=False)
class SquareBridgeDiagram:
    """Intercepts, corner incidences and orientation choices.

    ``orientations`` maps a component number to +1 (default direction) or -1
    (reversed).  ``hints`` are directed corner pairs coming from ``cycle``
    declarations; they orient components not named in ``orientations``.
    """

    h_intercepts: Mapping[int, Fraction]
    v_intercepts: Mapping[int, Fraction]
    corners: frozenset
    orientations: Mapping[int, int] = field(default_factory=dict)
    hints: tuple[tuple[Corner, Corner], ...] = ()

    def __eq__(self, other) -> bool:
        if not isinstance(other, SquareBridgeDiagram):
            return NotImplemented
        return (
            dict(self.h_intercepts) == dict(other.h_intercepts)
            and dict(self.v_intercepts) == dict(other.v_intercepts)
            and self.corners == other.corners
            and [c.corners for c in self.components] == [c.corners for c in other.components]
        )

    __hash__ = None

    @property
    def p(self) -> int:
        return len(self.h_intercepts)

    @property
    def q(self) -> int:
        return len(self.v_intercepts)

    def position(self, corner: Corner) -> tuple[Fraction, Fraction]:
        """(u, w) position of a corner."""
        i, j = corner
        return (self.h_intercepts[i], self.v_intercepts[j])

    def front_position(self, corner: Corner) -> tuple[Fraction, Fraction]:
        """(y1, z) position of a corner."""
        a, b = self.position(corner)
        return ((a - b) / 2, (a + b) / 2)

    @cached_property
    def _incidence(self) -> tuple[dict[int, list[int]], dict[int, list[int]]]:
        h_c: dict[int, list[int]] = {i: [] for i in self.h_intercepts}
        v_c: dict[int, list[int]] = {j: [] for j in self.v_intercepts}
        for i, j in sorted(self.corners):
            h_c.setdefault(i, []).append(j)
            v_c.setdefault(j, []).append(i)
        return h_c, v_c

    def structural_errors(self) -> list[str]:
        errors = []
        h_c, v_c = self._incidence
        for i, js in sorted(h_c.items()):
            if i not in self.h_intercepts:
                errors.append(f"corner refers to undeclared h{i}")
            elif len(js) != 2:
                errors.append(f"h{i} has {len(js)} corners, expected 2")
        for j, is_ in sorted(v_c.items()):
            if j not in self.v_intercepts:
                errors.append(f"corner refers to undeclared v{j}")
            elif len(is_) != 2:
                errors.append(f"v{j} has {len(is_)} corners, expected 2")
        if errors:
            return errors
        for i, (j1, j2) in sorted(h_c.items()):
            if self.v_intercepts[j1] == self.v_intercepts[j2]:
                errors.append(f"h{i} has zero length")
        for j, (i1, i2) in sorted(v_c.items()):
            if self.h_intercepts[i1] == self.h_intercepts[i2]:
                errors.append(f"v{j} has zero length")
        if errors:
            return errors
        errors += _collinear_errors("h", self.h_intercepts, self.h_extents())
        errors += _collinear_errors("v", self.v_intercepts, self.v_extents())
        return errors

    def h_extents(self) -> dict[int, tuple[Fraction, Fraction]]:
        """w-range of each h segment."""
        h_c, _ = self._incidence
        out = {}
        for i, js in h_c.items():
            ws = sorted(self.v_intercepts[j] for j in js)
            out[i] = (ws[0], ws[-1])
        return out

    def v_extents(self) -> dict[int, tuple[Fraction, Fraction]]:
        """u-range of each v segment."""
        _, v_c = self._incidence
        out = {}
        for j, is_ in v_c.items():
            us = sorted(self.h_intercepts[i] for i in is_)
            out[j] = (us[0], us[-1])
        return out

    @cached_property
    def components(self) -> tuple[Component, ...]:
        errors = self.structural_errors()
        if errors:
            raise DiagramError("; ".join(errors))
        return _trace_components(self)

    @cached_property
    def segment_component(self) -> dict[SegmentRef, int]:
        out = {}
        for c in self.components:
            for s in c.segments:
                out[s] = c.index
        return out

    @cached_property
    def _directions(self) -> dict[SegmentRef, int]:
        """Traversal sign of each segment: dw for h segments, du for v segments."""
        out = {}
        for c in self.components:
            n = len(c.points)
            for k, (kind, idx) in enumerate(c.segments):
                (u0, w0), (u1, w1) = c.points[k], c.points[(k + 1) % n]
                out[(kind, idx)] = _sign(w1 - w0) if kind == "h" else _sign(u1 - u0)
        return out


def _collinear_errors(kind, values, extents) -> list[str]:
    errors = []
    by_value: dict[Fraction, list[int]] = {}
    for idx, val in values.items():
        by_value.setdefault(val, []).append(idx)
    for val, idxs in by_value.items():
        if len(idxs) < 2:
            continue
        spans = sorted((extents[k], k) for k in idxs)
        for (s0, k0), (s1, k1) in zip(spans, spans[1:]):
            if s1[0] <= s0[1]:
                errors.append(f"collinear segments {kind}{k0} and {kind}{k1} touch or overlap")
    return errors


def _trace_components(d: SquareBridgeDiagram) -> tuple[Component, ...]:
    h_c, v_c = d._incidence
    pos = d.position

    def key(c):
        return (*pos(c), c)

    seen: set[Corner] = set()
    raw = []
    for start in sorted(d.corners, key=key):
        if start in seen:
            continue
        corners = [start]
        segs: list[SegmentRef] = []
        cur, along = start, "v"
        while True:
            i, j = cur
            if along == "v":
                other = [k for k in v_c[j] if k != i][0]
                nxt = (other, j)
                segs.append(("v", j))
            else:
                other = [k for k in h_c[i] if k != j][0]
                nxt = (i, other)
                segs.append(("h", i))
            along = "h" if along == "v" else "v"
            if nxt == start:
                break
            corners.append(nxt)
            cur = nxt
        seen.update(corners)
        raw.append((corners, segs))

    hint_set = set(d.hints)
    out = []
    for number, (corners, segs) in enumerate(raw, start=1):
        flip = False
        if number in d.orientations:
            flip = d.orientations[number] < 0
        else:
            n = len(corners)
            forward = {(corners[k], corners[(k + 1) % n]) for k in range(n)}
            backward = {(b, a) for a, b in forward}
            if hint_set & backward and not hint_set & forward:
                flip = True
        if flip:
            corners = [corners[0]] + corners[:0:-1]
            segs = segs[::-1]
        points = tuple(pos(c) for c in corners)
        out.append([number, tuple(corners), tuple(segs), points])

    # cusps need only the geometry; writhe needs every component's directions
    comps = []
    for number, corners, segs, points in out:
        tmp = Component(number, corners, segs, points, 0, 0)
        comps.append(tmp)
    seg_dir = {}
    seg_comp = {}
    for c in comps:
        n = len(c.points)
        for k, (kind, idx) in enumerate(c.segments):
            (u0, w0), (u1, w1) = c.points[k], c.points[(k + 1) % n]
            seg_dir[(kind, idx)] = _sign(w1 - w0) if kind == "h" else _sign(u1 - u0)
            seg_comp[(kind, idx)] = c.index
    writhe = {c.index: 0 for c in comps}
    for i, j, _ in _interior_pairs(d):
        ci, cj = seg_comp[("h", i)], seg_comp[("v", j)]
        if ci == cj:
            writhe[ci] += -seg_dir[("h", i)] * seg_dir[("v", j)]
    result = []
    for c in comps:
        cusp = len(c.cusps())
        result.append(Component(c.index, c.corners, c.segments, c.points, writhe[c.index], cusp))
    return tuple(result)


def _interior_pairs(d: SquareBridgeDiagram):
    """All (i, j, (u, w)) with h_i and v_j meeting in both interiors."""
    hx = d.h_extents()
    vx = d.v_extents()
    vs = sorted(vx.items(), key=lambda kv: d.v_intercepts[kv[0]])
    for i in sorted(hx):
        a = d.h_intercepts[i]
        w_lo, w_hi = hx[i]
        for j, (u_lo, u_hi) in vs:
            b = d.v_intercepts[j]
            if b <= w_lo:
                continue
            if b >= w_hi:
                break
            if u_lo < a < u_hi:
                yield i, j, (a, b)


def crossings(d: SquareBridgeDiagram) -> list[Crossing]:
    """Every interior h/v intersection, sorted by (i, j).

    The over-strand is always h.  The sign is +1 when the over direction,
    turned counterclockwise by 90 degrees in the (y1, z) plane, agrees with
    the under direction; this works out to ``-(dw of h) * (du of v)``.
    """
    comp = d.segment_component
    dirs = d._directions
    out = []
    for i, j, (a, b) in _interior_pairs(d):
        sign = -dirs[("h", i)] * dirs[("v", j)]
        out.append(Crossing(i, j, ((a - b) / 2, (a + b) / 2), sign, (comp[("h", i)], comp[("v", j)])))
    out.sort(key=lambda c: (c.i, c.j))
    return out


def validate(d: SquareBridgeDiagram) -> ValidationReport:
    errors = d.structural_errors()
    for k, sign in d.orientations.items():
        if sign not in (1, -1):
            errors.append(f"orientation of component {k} must be + or -")
    if errors:
        return ValidationReport(False, False, errors)
    comps = d.components
    for k in d.orientations:
        if not 1 <= k <= len(comps):
            errors.append(f"orientation names unknown component {k}")
    for c in comps:
        if len(c) < 4 or len(c) % 2:
            errors.append(f"component {c.index} has length {len(c)}")
    selfx = [c for c in crossings(d) if c.is_self]
    for c in selfx:
        errors.append(f"component {c.components[0]} crosses itself at h{c.i}/v{c.j}")
    valid = not any("orientation" in e or "length" in e for e in errors)
    return ValidationReport(valid, valid and not selfx, errors, selfx)


def require_admissible(d: SquareBridgeDiagram) -> None:
    rep = validate(d)
    if not rep.admissible:
        raise DiagramError("diagram is not admissible: " + "; ".join(rep.errors))


def thurston_bennequin(c: Component) -> int:
    """tb = writhe - cusps/2."""
    if c.cusp_count % 2:
        raise DiagramError(f"odd cusp count {c.cusp_count} on component {c.index}")
    return c.writhe - c.cusp_count // 2


def linking_matrix(d: SquareBridgeDiagram) -> list[list[int]]:
    r = len(d.components)
    twice = [[0] * r for _ in range(r)]
    for x in crossings(d):
        a, b = x.components
        if a != b:
            twice[a - 1][b - 1] += x.sign
            twice[b - 1][a - 1] += x.sign
    for row in twice:
        for v in row:
            if v % 2:
                raise DiagramError("odd inter-component crossing sum")
    return [[v // 2 for v in row] for row in twice]


def invariants_report(d: SquareBridgeDiagram) -> dict:
    rep = validate(d)
    out = {
        "p": d.p,
        "q": d.q,
        "admissible": rep.admissible,
        "errors": rep.errors,
    }
    if not rep.valid:
        return out
    comps = d.components
    out.update(
        {
            "components": len(comps),
            "crossings": [{"i": x.i, "j": x.j, "sign": x.sign} for x in crossings(d)],
            "writhe": [c.writhe for c in comps],
            "cusps": [c.cusp_count for c in comps],
            "tb": [thurston_bennequin(c) for c in comps],
            "linking_matrix": linking_matrix(d),
        }
    )
    return out


# ---------------------------------------------------------------------------
# construction helpers


def from_cycles(cycles: Iterable[Sequence[tuple]], oriented: bool = True) -> SquareBridgeDiagram:
    """Build a diagram from rectilinear cycles of (u, w) turning points.

    Consecutive points must alternately share u and w.  Each maximal edge
    becomes one segment; indices are assigned in order of intercept then
    extent.  With ``oriented`` the cycles' traversal direction is kept.
    """
    h_raw, v_raw, corner_of = [], [], {}
    cyc_pts = []
    for cyc in cycles:
        pts = [(Fraction(u), Fraction(w)) for u, w in cyc]
        n = len(pts)
        if n < 4 or n % 2:
            raise DiagramError("cycle needs an even number >= 4 of turning points")
        cyc_pts.append(pts)
        for k in range(n):
            p0, p1 = pts[k], pts[(k + 1) % n]
            if p0[0] == p1[0] and p0[1] != p1[1]:
                h_raw.append((p0[0], tuple(sorted((p0[1], p1[1]))), p0, p1))
            elif p0[1] == p1[1] and p0[0] != p1[0]:
                v_raw.append((p0[1], tuple(sorted((p0[0], p1[0]))), p0, p1))
            else:
                raise DiagramError(f"edge {p0}->{p1} is not axis-parallel")
    h_raw.sort(key=lambda t: (t[0], t[1]))
    v_raw.sort(key=lambda t: (t[0], t[1]))
    h_int = {k + 1: t[0] for k, t in enumerate(h_raw)}
    v_int = {k + 1: t[0] for k, t in enumerate(v_raw)}
    h_at: dict[tuple, list[int]] = {}
    v_at: dict[tuple, list[int]] = {}
    for k, (_, _, p0, p1) in enumerate(h_raw):
        h_at.setdefault(p0, []).append(k + 1)
        h_at.setdefault(p1, []).append(k + 1)
    for k, (_, _, p0, p1) in enumerate(v_raw):
        v_at.setdefault(p0, []).append(k + 1)
        v_at.setdefault(p1, []).append(k + 1)
    corners = set()
    for pt, hs in h_at.items():
        vs = v_at.get(pt, [])
        if len(hs) != 1 or len(vs) != 1:
            raise DiagramError(f"turning point {pt} is shared by several cycles")
        corner_of[pt] = (hs[0], vs[0])
        corners.add((hs[0], vs[0]))
    hints = []
    if oriented:
        for pts in cyc_pts:
            c0, c1 = corner_of[pts[0]], corner_of[pts[1]]
            hints.append((c0, c1))
    return SquareBridgeDiagram(h_int, v_int, frozenset(corners), {}, tuple(hints))


def format_diagram(d: SquareBridgeDiagram) -> str:
    """Source text that parses back to ``d``."""
    lines = []
    for i in sorted(d.h_intercepts):
        lines.append(f"h {i}: {d.h_intercepts[i]}")
    for j in sorted(d.v_intercepts):
        lines.append(f"v {j}: {d.v_intercepts[j]}")
    for i, j in sorted(d.corners):
        lines.append(f"corner {i} {j}")
    default = d.__class__(d.h_intercepts, d.v_intercepts, d.corners)
    try:
        base = {c.index: c.corners for c in default.components}
        for c in d.components:
            if c.corners != base[c.index]:
                lines.append(f"orient {c.index} -")
    except DiagramError:
        pass
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing

_RATIONAL = re.compile(r"[+-]?(\d+(/\d+)?|\d*\.\d+)$")
_REF = re.compile(r"([hv])(\d+)$")


def _tokens(line: str):
    """(text, 1-based column) for each whitespace-separated token before '#'."""
    body = line.split("#", 1)[0]
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"[^\s:]+|:", body)]


def parse_diagram(text: str) -> SquareBridgeDiagram:
    """Parse diagram source.

    Grammar, one declaration per line::

        h <i>: [<rational>] [v<j> ...]
        v <j>: [<rational>] [h<i> ...]
        corner <i> <j>
        orient <component> <+|->
        cycle h<i> v<j> h<k> ...
        # comment

    An omitted intercept defaults to the index.
    """
    h_int: dict[int, Fraction] = {}
    v_int: dict[int, Fraction] = {}
    decl_at: dict[SegmentRef, tuple[int, int]] = {}
    ref_at: dict[SegmentRef, tuple[int, int]] = {}
    corners: dict[Corner, tuple[int, int]] = {}
    per_h: dict[int, list[int]] = {}
    per_v: dict[int, list[int]] = {}
    orient: dict[int, int] = {}
    hints: list[tuple[Corner, Corner]] = []

    def add_corner(i, j, where):
        if (i, j) in corners:
            return
        for idx, other, table, kind in ((i, j, per_h, "h"), (j, i, per_v, "v")):
            lst = table.setdefault(idx, [])
            if len(lst) >= 2:
                raise DiagramParseError(
                    f"corner arity violation: {kind}{idx} already has 2 corners", *where
                )
            lst.append(other)
        corners[(i, j)] = where
        ref_at.setdefault(("h", i), where)
        ref_at.setdefault(("v", j), where)

    def parse_int(tok, col, ln, what):
        if not tok.isdigit() or int(tok) < 1:
            raise DiagramParseError(f"expected positive {what}, got {tok!r}", ln, col)
        return int(tok)

    for ln, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if not toks:
            continue
        head, hcol = toks[0]
        if head in ("h", "v"):
            if len(toks) < 3 or toks[2][0] != ":":
                col = toks[2][1] if len(toks) > 2 else len(line) + 1
                raise DiagramParseError("expected '<index>:' after segment kind", ln, col)
            idx = parse_int(toks[1][0], toks[1][1], ln, "index")
            table = h_int if head == "h" else v_int
            if idx in table:
                raise DiagramParseError(f"duplicate declaration of {head}{idx}", ln, toks[1][1])
            rest = toks[3:]
            value = Fraction(idx)
            if rest and _RATIONAL.match(rest[0][0]):
                value = Fraction(rest[0][0])
                rest = rest[1:]
            table[idx] = value
            decl_at[(head, idx)] = (ln, hcol)
            other_kind = "v" if head == "h" else "h"
            for tok, col in rest:
                m = _REF.match(tok)
                if not m or m.group(1) != other_kind:
                    raise DiagramParseError(f"expected {other_kind}<index>, got {tok!r}", ln, col)
                k = int(m.group(2))
                pair = (idx, k) if head == "h" else (k, idx)
                add_corner(*pair, (ln, col))
        elif head == "corner":
            if len(toks) != 3:
                raise DiagramParseError("corner takes exactly two indices", ln, hcol)
            i = parse_int(toks[1][0], toks[1][1], ln, "h index")
            j = parse_int(toks[2][0], toks[2][1], ln, "v index")
            add_corner(i, j, (ln, toks[1][1]))
        elif head == "orient":
            if len(toks) != 3 or toks[2][0] not in ("+", "-"):
                raise DiagramParseError("orient takes a component number and + or -", ln, hcol)
            k = parse_int(toks[1][0], toks[1][1], ln, "component number")
            if k in orient:
                raise DiagramParseError(f"duplicate orientation for component {k}", ln, toks[1][1])
            orient[k] = 1 if toks[2][0] == "+" else -1
        elif head == "cycle":
            refs = []
            for tok, col in toks[1:]:
                m = _REF.match(tok)
                if not m:
                    raise DiagramParseError(f"expected h<i> or v<j>, got {tok!r}", ln, col)
                refs.append((m.group(1), int(m.group(2)), col))
            if len(refs) < 4 or len(refs) % 2:
                raise DiagramParseError("cycle needs an even number >= 4 of segments", ln, hcol)
            for k in range(len(refs)):
                if refs[k][0] == refs[(k + 1) % len(refs)][0]:
                    raise DiagramParseError("cycle must alternate h and v", ln, refs[k][2])
            cyc = []
            n = len(refs)
            for k in range(n):
                s0, s1 = refs[k], refs[(k + 1) % n]
                pair = (s0[1], s1[1]) if s0[0] == "h" else (s1[1], s0[1])
                add_corner(*pair, (ln, s1[2]))
                cyc.append(pair)
            # segment k+1 runs from corner k to corner k+1
            hints.append((cyc[0], cyc[1]))
        else:
            raise DiagramParseError(f"unknown declaration {head!r}", ln, hcol)

    for kind, table, per in (("h", h_int, per_h), ("v", v_int, per_v)):
        for idx in per:
            if idx not in table:
                table[idx] = Fraction(idx)
        for idx in sorted(table):
            n = len(per.get(idx, []))
            if n != 2:
                ln, col = decl_at.get((kind, idx)) or ref_at.get((kind, idx), (1, 1))
                raise DiagramParseError(
                    f"corner arity violation: {kind}{idx} has {n} corners, expected 2", ln, col
                )
    return SquareBridgeDiagram(dict(h_int), dict(v_int), frozenset(corners), orient, tuple(hints))
