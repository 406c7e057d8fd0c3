"""The invariant suite behind ``openbook-forge check``."""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .cells import Cell, CellComplex, NormalizedDiagram, enumerate_cells, normalize
from .diagram import SquareBridgeDiagram, validate
from .generate import random_diagram
from .openbook import (
    RelativeOpenBook,
    build_relative_open_book,
    h1_of_open_book_3,
    letter_preserves_form,
    monodromy_action,
    preserves_form,
    twist_matrix_dim4,
    unitriangular_certificate,
)
from .surgery import SurgerySpec, apply_surgery, reconstruct_link, surgery_presentation, verify_surgery

DENSE_CHECK_LIMIT = 64
GEOMETRY_PER_CELL_LIMIT = 64
UNION_SEPARATION_LIMIT = 16
SURGERY_COMPONENT_LIMIT = 3


@dataclass
class SuiteReport:
    checks: list[dict] = field(default_factory=list)

    def add(self, name: str, ok: bool, **detail) -> bool:
        self.checks.append({"name": name, "ok": bool(ok), **detail})
        return bool(ok)

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def failures(self) -> list[dict]:
        return [c for c in self.checks if not c["ok"]]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": self.checks}


def prefixes_connected(cc: CellComplex, order) -> bool:
    nb = cc.neighbors
    placed: set[int] = set()
    for k, cid in enumerate(order):
        if k and not any(j in placed for j in nb[cid]):
            return False
        placed.add(cid)
    return True


def check_open_book(ob: RelativeOpenBook, rep: SuiteReport, prefix: str = "") -> None:
    m = ob.m
    cc = ob.complex
    rep.add(f"{prefix}chi(F3) = 1 - m", ob.page2.chi == 1 - m, chi=ob.page2.chi, m=m)
    rep.add(f"{prefix}chi(F5) = 1 + m", ob.page4.chi == 1 + m, chi=ob.page4.chi, m=m)
    steps_ok = True
    chi2 = chi4 = 0
    for k, (h2, h4) in enumerate(zip(ob.page2.handles, ob.page4.handles)):
        chi2 += (-1) ** h2.index
        chi4 += (-1) ** h4.index
        steps_ok = steps_ok and chi2 == 1 - k and chi4 == 1 + k
    rep.add(f"{prefix}chi after each stabilization", steps_ok)
    regions = [len(s.attaching_edges) for s in ob.trace]
    rep.add(
        f"{prefix}trace attaching regions",
        len(ob.trace) == m and regions[0] == 0 and all(r > 0 for r in regions[1:]),
        steps=len(ob.trace),
    )
    rep.add(f"{prefix}order prefixes connected", prefixes_connected(cc, [s.cell for s in ob.trace]))
    rep.add(f"{prefix}word3 restricts word5", ob.word3.letters == ob.word5.letters and ob.word3.dim == 2)
    Q3, Q5 = ob.registry.Q3, ob.registry.Q5
    skew = all(Q3.get((j, i), 0) == -v for (i, j), v in Q3.items())
    sym = all(Q5.get((j, i), 0) == v for (i, j), v in Q5.items())
    diag = all(Q5.get((k, k), 0) == -2 for k in range(m))
    rep.add(f"{prefix}Q3 skew, Q5 symmetric with diagonal -2", skew and sym and diag)
    adj = {(i - 1, j - 1) for i, j in cc.adjacency}
    rep.add(
        f"{prefix}edge-adjacent cells pair to +-1",
        all(abs(Q3.get(e, 0)) == 1 and abs(Q5.get(e, 0)) == 1 for e in adj),
    )
    h1 = h1_of_open_book_3(ob)
    detail = {"h1": h1.to_json(), "certificate": unitriangular_certificate(ob, ob.word3)}
    ok = h1.trivial
    if m <= 30:
        dense = h1_of_open_book_3(ob, method="dense")
        detail["dense"] = dense.to_json()
        ok = ok and dense.trivial
    rep.add(f"{prefix}S3 oracle (H1 trivial)", ok, **detail)
    if m <= DENSE_CHECK_LIMIT:
        M3 = monodromy_action(ob, 2)
        M5 = monodromy_action(ob, 4)
        rep.add(f"{prefix}M3^T Q3 M3 = Q3", preserves_form(M3, ob.registry.dense("Q3")))
        rep.add(f"{prefix}M5^T Q5 M5 = Q5", preserves_form(M5, ob.registry.dense("Q5")))
        Q5d = ob.registry.dense("Q5")
        eye = np.identity(m, dtype=object)
        inv = all(
            (lambda T: bool((T.dot(T) == eye).all()))(twist_matrix_dim4(_vec(ob, x), Q5d))
            for x in ob.word5.letters
        )
        rep.add(f"{prefix}dim-4 letters are involutions", inv)
    else:
        rep.add(
            f"{prefix}letters preserve Q3 (sparse)",
            all(letter_preserves_form(ob, x, 2) for x in ob.word3.letters),
        )
        rep.add(
            f"{prefix}letters preserve Q5 (sparse)",
            all(letter_preserves_form(ob, x, 4) for x in ob.word5.letters),
        )
        # a reflection squares to I exactly when the class has square -2
        rep.add(
            f"{prefix}dim-4 letters are involutions (class square -2)",
            all(ob.registry.pair("Q5", ob.letter_class(x), ob.letter_class(x)) == -2 for x in ob.word5.letters),
        )


def _vec(ob: RelativeOpenBook, letter) -> np.ndarray:
    v = np.zeros(ob.m, dtype=object)
    v[:] = 0
    for i, x in ob.letter_class(letter).items():
        v[i] = x
    return v


def check_surgery(nd: NormalizedDiagram, ob: RelativeOpenBook, rep: SuiteReport, prefix: str = "") -> None:
    link = reconstruct_link(nd)
    r = len(link)
    if r > SURGERY_COMPONENT_LIMIT:
        rep.add(f"{prefix}surgery oracle", True, skipped=f"{r} components")
        return
    results = []
    for signs in itertools.product((1, -1), repeat=r):
        spec = SurgerySpec(dict(enumerate(signs, start=1)))
        after = apply_surgery(ob, link, spec)
        v = verify_surgery(after, surgery_presentation(nd, spec))
        results.append({"spec": spec.to_json(), **v.to_json()})
    rep.add(
        f"{prefix}surgery oracles agree for every +-1 spec",
        all(x["match"] for x in results),
        specs=len(results),
        mismatches=[x for x in results if not x["match"]],
    )


def check_geometry(nd: NormalizedDiagram, cc: CellComplex, rep: SuiteReport,
                   params: geo.RibbonParams | None = None) -> None:
    params = params or geo.RibbonParams()
    brute = all(
        geo.legendrian_plane_test(m, n, k, l) == (k + m == 0 and l + n == 0)
        for m, n, k, l in itertools.product(range(-2, 3), repeat=4)
    )
    rep.add("plane test matches alpha on {-2..2}^4", brute, tuples=625)
    template = Cell(0, 0, 0)
    tplates = geo.build_diamond(template)
    rib = geo.ribbon_checks(tplates, params)
    rep.add("template ribbons", rib.ok, failures=rib.failures()[:5],
            epsilon=str(params.epsilon), delta=str(params.delta))
    per_cell = cc.m <= GEOMETRY_PER_CELL_LIMIT
    cells = cc.cells if per_cell else [template]
    leg = closed = eq = True
    bad = []
    for c in cells:
        plates = geo.build_diamond(c)
        if not all(geo.is_legendrian(p) and geo.is_planar(p) for p in plates):
            leg = False
            bad.append(c.id)
        rpt = geo.closure_report(plates)
        if not rpt["closed"] or rpt["chi"] != 2:
            closed = False
            bad.append(c.id)
        if not geo.equator_report(c, plates)["match"]:
            eq = False
            bad.append(c.id)
    if cc.m <= UNION_SEPARATION_LIMIT:
        plates = [p for c in cc.cells for p in geo.build_diamond(c)]
        sep = geo.separation_report(plates, params)
        rep.add("ribbons separated across diamonds", sep.pop("ok"), **sep)
    scope = "every cell" if per_cell else "template cell"
    rep.add(f"plates Legendrian and planar ({scope})", leg)
    rep.add(f"diamonds closed with chi 2 ({scope})", closed)
    rep.add(f"diamond equator equals gamma ({scope})", eq, bad_cells=sorted(set(bad))[:10])
    # every octahedron sits on its cell: corners at (u, w) = (a_i, b_j), poles over the centre
    octs = geo.build_delta_complex(nd, cc)
    placed = all(_octahedron_placed(o, c) for o, c in zip(octs, cc.cells))
    shared = True
    if per_cell:
        shared = all(
            len({frozenset(e) for e in octs[i - 1].equator()} & {frozenset(e) for e in octs[j - 1].equator()}) == 1
            for i, j in cc.adjacency
        )
    rep.add("octahedron equators are the cell boundaries", placed and shared)


def _octahedron_placed(o: geo.Octahedron, c: Cell) -> bool:
    half = geo.HALF
    for i in (1, 2):
        for j in (1, 2):
            v = o.vertices[f"C{i}{j}"]
            if (v[geo.Z] + v[geo.Y1], v[geo.Z] - v[geo.Y1]) != (c.u0 + i - 1, c.w0 + j - 1) or v[geo.Y2] != 0:
                return False
    for name, sign in (("N", 1), ("S", -1)):
        v = o.vertices[name]
        if (v[geo.Z] + v[geo.Y1], v[geo.Z] - v[geo.Y1], v[geo.Y2]) != (c.u0 + half, c.w0 + half, sign * half):
            return False
    return all(x == 0 for v in o.vertices.values() for x in (v[geo.X1], v[geo.X2]))


def run_diagram_checks(d: SquareBridgeDiagram, rep: SuiteReport | None = None,
                       params: geo.RibbonParams | None = None, geometry: bool = True) -> SuiteReport:
    rep = rep or SuiteReport()
    v = validate(d)
    if not rep.add("diagram admissible", v.admissible, errors=v.errors):
        return rep
    nd = normalize(d)
    cc = enumerate_cells(nd)
    union = sorted({k for ids in cc.per_component.values() for k in ids})
    rep.add("cells are the union of component interiors", union == [c.id for c in cc.cells], m=cc.m)
    ob = build_relative_open_book(cc)
    check_open_book(ob, rep)
    check_surgery(nd, ob, rep)
    if geometry:
        check_geometry(nd, cc, rep, params)
    return rep


def run_fuzz(n: int, seed: int = 0, max_cells: int = 14) -> dict:
    """n random admissible diagrams; each gets the homological checks and one random spec."""
    rng = random.Random(seed)
    start = time.perf_counter()
    failures = []
    for trial in range(n):
        d = random_diagram(rng, max_cells=max_cells)
        rep = SuiteReport()
        nd = normalize(d)
        cc = enumerate_cells(nd)
        ob = build_relative_open_book(cc)
        check_open_book(ob, rep)
        link = reconstruct_link(nd)
        spec = SurgerySpec({k: rng.choice((1, -1)) for k in range(1, len(link) + 1)})
        v = verify_surgery(apply_surgery(ob, link, spec), surgery_presentation(nd, spec))
        rep.add("surgery oracles agree", v.match, spec=spec.to_json(), **v.to_json())
        if not rep.ok:
            failures.append({"trial": trial, "failures": rep.failures()})
    return {
        "trials": n,
        "seed": seed,
        "passed": n - len(failures),
        "failures": failures[:10],
        "seconds": round(time.perf_counter() - start, 3),
    }


def run_checks(d: SquareBridgeDiagram | None, fuzz: int = 0, seed: int = 0,
               params: geo.RibbonParams | None = None) -> dict:
    out: dict = {}
    ok = True
    if d is not None:
        rep = run_diagram_checks(d, params=params)
        out.update(rep.to_json())
        ok = rep.ok
    if fuzz:
        fz = run_fuzz(fuzz, seed)
        out["fuzz"] = fz
        ok = ok and fz["passed"] == fz["trials"]
    out["ok"] = ok
    return out

