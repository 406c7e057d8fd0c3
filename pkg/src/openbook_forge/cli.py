"""Command-line front end: ``openbook-forge <subcommand>``."""
from __future__ import annotations

import functools
import json
import os
import sys
from fractions import Fraction
from importlib import resources

import click

from . import geometry as geo
from .cells import DisconnectedComplex, check_order, enumerate_cells, normalize, order_cells
from .checks import run_checks
from .diagram import DiagramError, DiagramParseError, invariants_report, parse_diagram, require_admissible
from .openbook import build_relative_open_book
from .surgery import (
    SurgerySpec,
    SurgerySpecError,
    apply_surgery,
    reconstruct_link,
    surgery_presentation,
    verify_surgery,
)

SCHEMA = "openbook-forge/1"

EXIT_OK, EXIT_MISMATCH, EXIT_INVALID, EXIT_DISCONNECTED, EXIT_IO = 0, 1, 2, 3, 4


class CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def fixture_names() -> list[str]:
    root = resources.files("openbook_forge") / "fixtures"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".sbd"))


def fixture_text(name: str) -> str:
    path = resources.files("openbook_forge") / "fixtures" / f"{name}.sbd"
    if not path.is_file():
        raise CliFailure(EXIT_IO, f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    return path.read_text()


def emit(ctx: click.Context, payload: dict, summary: list[str]) -> None:
    if ctx.obj["json"]:
        body = {"schema": SCHEMA, **payload}
        click.echo(json.dumps(body, indent=2, sort_keys=True))
    else:
        for line in summary:
            click.echo(line)


def _merge_opts(ctx: click.Context, input_path, source, fixture, as_json, seed) -> None:
    obj = ctx.ensure_object(dict)
    for key, val in (("input", input_path), ("source", source), ("fixture", fixture), ("seed", seed)):
        if val is not None:
            obj[key] = val
    if as_json:
        obj["json"] = True


def common_options(fn):
    @click.option("--input", "input_path", type=str, default=None, help="Diagram file ('-' for stdin).")
    @click.option("--source", type=str, default=None, help="Inline diagram source.")
    @click.option("--fixture", type=str, default=None, help="Bundled fixture name.")
    @click.option("--json", "as_json", is_flag=True, default=False, help="Emit JSON.")
    @click.option("--seed", type=int, default=None, help="Random seed.")
    @click.pass_context
    @functools.wraps(fn)
    def wrapper(ctx, input_path, source, fixture, as_json, seed, **kw):
        _merge_opts(ctx, input_path, source, fixture, as_json, seed)
        try:
            return fn(ctx, **kw)
        except CliFailure as e:
            if ctx.obj.get("json"):
                click.echo(json.dumps({"schema": SCHEMA, "error": e.message, "exit_code": e.code}, sort_keys=True))
            click.echo(f"error: {e.message}", err=True)
            ctx.exit(e.code)

    return wrapper


def load_source(ctx: click.Context, required: bool = True) -> str | None:
    obj = ctx.obj
    given = [k for k in ("input", "source", "fixture") if obj.get(k) is not None]
    if len(given) > 1:
        raise CliFailure(EXIT_INVALID, "give only one of --input, --source and --fixture")
    if not given:
        if required:
            raise CliFailure(EXIT_INVALID, "no diagram given (use --input, --source or --fixture)")
        return None
    if obj.get("source") is not None:
        return obj["source"].replace("\\n", "\n").replace(";", "\n")
    if obj.get("fixture") is not None:
        return fixture_text(obj["fixture"])
    path = obj["input"]
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise CliFailure(EXIT_IO, f"cannot read {path}: {e.strerror or e}") from e


def load_diagram(ctx: click.Context, required: bool = True):
    text = load_source(ctx, required)
    if text is None:
        return None
    try:
        return parse_diagram(text)
    except DiagramParseError as e:
        raise CliFailure(EXIT_INVALID, f"parse error at line {e.line}, column {e.column}: {e.message}") from e


def load_complex(ctx: click.Context, order: str | None = None, root: int | None = None):
    d = load_diagram(ctx)
    try:
        require_admissible(d)
    except DiagramError as e:
        raise CliFailure(EXIT_INVALID, str(e)) from e
    nd = normalize(d)
    try:
        cc = enumerate_cells(nd)
        if order:
            try:
                cc = cc.with_order(check_order(cc, [int(x) for x in order.split(",")]))
            except ValueError as e:
                raise CliFailure(EXIT_INVALID, f"bad --order: {e}") from e
        elif root is not None:
            try:
                cc = cc.with_order(order_cells(cc, root))
            except ValueError as e:
                if isinstance(e, DisconnectedComplex):
                    raise
                raise CliFailure(EXIT_INVALID, f"bad --root: {e}") from e
    except DisconnectedComplex as e:
        raise CliFailure(EXIT_DISCONNECTED, str(e)) from e
    return d, nd, cc


def order_options(fn):
    fn = click.option("--order", type=str, default=None, help="Explicit cell order, e.g. '1,2,3'.")(fn)
    fn = click.option("--root", type=int, default=None, help="Root cell of the BFS order.")(fn)
    return fn


def ribbon_params(epsilon: str, delta: str) -> geo.RibbonParams:
    try:
        return geo.RibbonParams(Fraction(epsilon), Fraction(delta))
    except (ValueError, ZeroDivisionError) as e:
        raise CliFailure(EXIT_INVALID, str(e)) from e


@click.group()
@click.option("--input", "input_path", type=str, default=None, help="Diagram file ('-' for stdin).")
@click.option("--source", type=str, default=None, help="Inline diagram source.")
@click.option("--fixture", type=str, default=None, help="Bundled fixture name.")
@click.option("--json", "as_json", is_flag=True, default=False, help="Emit JSON.")
@click.option("--seed", type=int, default=None, help="Random seed.")
@click.version_option(package_name="artifact", prog_name="openbook-forge")
@click.pass_context
def main(ctx, input_path, source, fixture, as_json, seed):
    """Relative open books and contact surgery from square bridge diagrams."""
    ctx.ensure_object(dict)
    ctx.obj.setdefault("json", False)
    ctx.obj.setdefault("seed", 0)
    _merge_opts(ctx, input_path, source, fixture, as_json, seed)


@main.command()
@common_options
def invariants(ctx):
    """Components, crossings, writhe, cusps, tb and linking matrix."""
    d = load_diagram(ctx)
    rep = invariants_report(d)
    summary = [f"p = {rep['p']}, q = {rep['q']}, admissible = {rep['admissible']}"]
    for err in rep["errors"]:
        summary.append(f"  {err}")
    if "tb" in rep:
        summary.append(f"components: {rep['components']}")
        summary.append(f"tb: {rep['tb']}")
        summary.append(f"linking matrix: {rep['linking_matrix']}")
    emit(ctx, rep, summary)
    if not rep["admissible"]:
        ctx.exit(EXIT_INVALID)


@main.command()
@order_options
@common_options
def cells(ctx, order, root):
    """Unit cells, adjacency, order and per-component supports."""
    _, _, cc = load_complex(ctx, order, root)
    payload = cc.to_json()
    emit(ctx, payload, [f"cells: {cc.m}", f"adjacency edges: {len(cc.adjacency)}", f"order: {cc.order}"])


@main.command()
@order_options
@common_options
def openbook(ctx, order, root):
    """The relative open book and its stabilization trace."""
    _, _, cc = load_complex(ctx, order, root)
    ob = build_relative_open_book(cc)
    emit(
        ctx,
        ob.to_json(),
        [
            f"m = {ob.m}",
            f"chi(F3) = {ob.page2.chi}, chi(F5) = {ob.page4.chi}",
            f"word5: {' '.join(f'D{x.id}' for x in ob.word5.letters)}",
        ],
    )


@main.command()
@click.option("--surgery", "spec_text", type=str, required=True, help="Coefficients, e.g. 'K1=+1,K2=-1'.")
@order_options
@common_options
def surgery(ctx, spec_text, order, root):
    """Contact (+-1)-surgery with the two homology oracles."""
    _, nd, cc = load_complex(ctx, order, root)
    try:
        spec = SurgerySpec.parse(spec_text)
        ob = build_relative_open_book(cc)
        link = reconstruct_link(nd, cc)
        after = apply_surgery(ob, link, spec)
        pres = surgery_presentation(nd, spec)
    except SurgerySpecError as e:
        raise CliFailure(EXIT_INVALID, str(e)) from e
    rep = verify_surgery(after, pres)
    payload = after.to_json()
    payload["surgery"] = spec.to_json()
    payload["presentation"] = pres.to_json()
    payload.update(rep.to_json())
    emit(
        ctx,
        payload,
        [
            f"H1 from the open book:     {rep.h1_openbook}",
            f"H1 from the presentation:  {rep.h1_presentation}",
            f"match: {rep.match}",
        ],
    )
    if not rep.match:
        ctx.exit(EXIT_MISMATCH)


@main.command()
@click.option("--projection", type=click.Choice(["pi5", "pi3"]), default="pi5")
@click.option("--format", "fmt", type=click.Choice(["off", "obj"]), default="off")
@click.option("--epsilon", type=str, default="1/10")
@click.option("--delta", type=str, default="1/10")
@click.option("--output", "outdir", type=str, default=".", help="Output directory.")
@click.option("--per-cell/--no-per-cell", default=True, help="Also write one diamond mesh per cell.")
@common_options
def mesh(ctx, projection, fmt, epsilon, delta, outdir, per_cell):
    """Write the octahedra, the diamonds and the gamma spine as meshes."""
    params = ribbon_params(epsilon, delta)
    _, nd, cc = load_complex(ctx)
    if not os.path.isdir(outdir):
        raise CliFailure(EXIT_IO, f"output directory {outdir} does not exist")
    written = []

    def write(name, objects):
        path = os.path.join(outdir, f"{name}.{fmt}")
        try:
            geo.export_mesh(objects, projection, fmt, path)
        except OSError as e:
            raise CliFailure(EXIT_IO, f"cannot write {path}: {e.strerror or e}") from e
        written.append(path)

    write("delta", geo.build_delta_complex(nd, cc))
    spine = [p for c in cc.cells for p in geo.core_curve(c)]
    write("spine", spine)
    if per_cell:
        for c in cc.cells:
            write(f"diamond_{c.id}", geo.build_diamond(c))
    rib = geo.ribbon_checks(geo.build_diamond(cc.cells[0]), params)
    emit(
        ctx,
        {"files": written, "projection": projection, "format": fmt, "ribbons_ok": rib.ok,
         "epsilon": str(params.epsilon), "delta": str(params.delta)},
        [f"wrote {len(written)} files to {outdir}", f"ribbon checks: {'ok' if rib.ok else 'FAILED'}"],
    )
    if not rib.ok:
        ctx.exit(EXIT_MISMATCH)


@main.command()
@click.option("--fuzz", type=int, default=0, help="Number of random diagrams to test.")
@click.option("--epsilon", type=str, default="1/10")
@click.option("--delta", type=str, default="1/10")
@common_options
def check(ctx, fuzz, epsilon, delta):
    """Run the invariant suite; nonzero exit on any failure."""
    params = ribbon_params(epsilon, delta)
    d = load_diagram(ctx, required=fuzz == 0)
    if d is not None:
        try:
            require_admissible(d)
            enumerate_cells(normalize(d))
        except DiagramError as e:
            raise CliFailure(EXIT_INVALID, str(e)) from e
        except DisconnectedComplex as e:
            raise CliFailure(EXIT_DISCONNECTED, str(e)) from e
    result = run_checks(d, fuzz=fuzz, seed=ctx.obj.get("seed", 0), params=params)
    summary = []
    for c in result.get("checks", []):
        summary.append(f"[{'pass' if c['ok'] else 'FAIL'}] {c['name']}")
    if "fuzz" in result:
        fz = result["fuzz"]
        summary.append(f"fuzz: {fz['passed']}/{fz['trials']} passed (seed {fz['seed']}, {fz['seconds']} s)")
    summary.append("all checks passed" if result["ok"] else "SOME CHECKS FAILED")
    emit(ctx, result, summary)
    if not result["ok"]:
        ctx.exit(EXIT_MISMATCH)


if __name__ == "__main__":  # pragma: no cover
    main()
