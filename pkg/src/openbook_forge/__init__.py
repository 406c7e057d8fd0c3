"""Relative open books and contact surgery from square bridge diagrams."""
from __future__ import annotations

from importlib import resources

from .cells import CellComplex, DisconnectedComplex, enumerate_cells, normalize, order_cells
from .diagram import (
    DiagramError,
    DiagramParseError,
    SquareBridgeDiagram,
    crossings,
    linking_matrix,
    parse_diagram,
    thurston_bennequin,
    validate,
)
from .homology import AbelianGroup
from .openbook import (
    NotASphereClass,
    RelativeOpenBook,
    build_relative_open_book,
    h1_of_open_book_3,
    monodromy_action,
)
from .surgery import (
    SurgerySpec,
    SurgerySpecError,
    apply_surgery,
    reconstruct_link,
    surgery_presentation,
    verify_surgery,
)

__version__ = "0.1.0"


def fixture_path(name: str):
    """Path-like handle of a bundled ``.sbd`` fixture."""
    return resources.files(__name__) / "fixtures" / f"{name}.sbd"


def load_fixture(name: str) -> SquareBridgeDiagram:
    return parse_diagram(fixture_path(name).read_text())


__all__ = [
    "AbelianGroup",
    "CellComplex",
    "DiagramError",
    "DiagramParseError",
    "DisconnectedComplex",
    "NotASphereClass",
    "RelativeOpenBook",
    "SquareBridgeDiagram",
    "SurgerySpec",
    "SurgerySpecError",
    "apply_surgery",
    "build_relative_open_book",
    "crossings",
    "enumerate_cells",
    "fixture_path",
    "h1_of_open_book_3",
    "linking_matrix",
    "load_fixture",
    "monodromy_action",
    "normalize",
    "order_cells",
    "parse_diagram",
    "reconstruct_link",
    "surgery_presentation",
    "thurston_bennequin",
    "validate",
    "verify_surgery",
]
