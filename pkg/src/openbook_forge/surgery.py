"""Contact (+1)/(-1)-surgery on the reconstructed link and its smooth check."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .cells import CellComplex, NormalizedDiagram
from .diagram import SquareBridgeDiagram, linking_matrix, require_admissible, thurston_bennequin
from .homology import AbelianGroup, cokernel
from .openbook import Letter, RelativeOpenBook, h1_of_open_book_3


class SurgerySpecError(ValueError):
    pass


@dataclass(frozen=True)
class LinkComponentOnPage:
    index: int
    cells: tuple[int, ...]
    tb: int

    def class_vector(self) -> dict[int, int]:
        """Sum of gamma_k (or D_k) over the component's cells, 0-based keys."""
        return {k - 1: 1 for k in self.cells}


@dataclass(frozen=True)
class LinkOnPage:
    components: tuple[LinkComponentOnPage, ...]

    def __len__(self) -> int:
        return len(self.components)

    def component(self, i: int) -> LinkComponentOnPage:
        return self.components[i - 1]


@dataclass(frozen=True)
class SurgerySpec:
    coefficients: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        for k, r in self.coefficients.items():
            if r not in (1, -1):
                raise SurgerySpecError(f"coefficient of K{k} must be +1 or -1, got {r}")

    @classmethod
    def parse(cls, text: str) -> "SurgerySpec":
        """Parse ``"K1=+1,K2=-1"``."""
        coeffs: dict[int, int] = {}
        text = text.strip()
        if not text:
            return cls({})
        for part in text.split(","):
            m = re.fullmatch(r"\s*K(\d+)\s*=\s*([+-]?1)\s*", part)
            if not m:
                raise SurgerySpecError(f"cannot parse surgery term {part.strip()!r}")
            k = int(m.group(1))
            if k in coeffs:
                raise SurgerySpecError(f"K{k} given twice")
            coeffs[k] = int(m.group(2))
        return cls(coeffs)

    def to_json(self) -> dict:
        return {f"K{k}": r for k, r in sorted(self.coefficients.items())}


@dataclass(frozen=True)
class SurgeryPresentation:
    matrix: tuple[tuple[int, ...], ...]

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.matrix]


@dataclass
class VerificationReport:
    h1_openbook: AbelianGroup
    h1_presentation: AbelianGroup

    @property
    def match(self) -> bool:
        return self.h1_openbook == self.h1_presentation

    def to_json(self) -> dict:
        return {
            "h1_openbook": self.h1_openbook.to_json(),
            "h1_presentation": self.h1_presentation.to_json(),
            "h1_openbook_str": str(self.h1_openbook),
            "h1_presentation_str": str(self.h1_presentation),
            "match": self.match,
        }


def reconstruct_link(nd: NormalizedDiagram, cc: CellComplex | None = None) -> LinkOnPage:
    if cc is None:
        cc = nd.complex
    comps = []
    for c in nd.components:
        cells = tuple(cc.per_component[c.index])
        comps.append(LinkComponentOnPage(c.index, cells, thurston_bennequin(c)))
    return LinkOnPage(tuple(comps))


def _check_spec(n: int, spec: SurgerySpec) -> None:
    unknown = sorted(k for k in spec.coefficients if not 1 <= k <= n)
    if unknown:
        raise SurgerySpecError(f"unknown component(s): {', '.join(f'K{k}' for k in unknown)}")
    missing = [k for k in range(1, n + 1) if k not in spec.coefficients]
    if missing and spec.coefficients:
        raise SurgerySpecError(f"missing coefficient(s): {', '.join(f'K{k}' for k in missing)}")


def apply_surgery(ob: RelativeOpenBook, link: LinkOnPage, spec: SurgerySpec) -> RelativeOpenBook:
    """Append the twist of each surgered component, power -r, in index order.

    An empty spec leaves the open book unchanged.
    """
    _check_spec(len(link), spec)
    classes = dict(ob.link_classes)
    new = []
    for i in sorted(spec.coefficients):
        comp = link.component(i)
        classes[i] = comp.class_vector()
        new.append(Letter("link", i, -spec.coefficients[i]))
    return ob.with_words(ob.word5.append(new), ob.word3.append(new), classes)


def surgery_presentation(d: SquareBridgeDiagram, spec: SurgerySpec) -> SurgeryPresentation:
    """Smooth framings tb + r on the diagonal, linking numbers elsewhere.

    Only the surgered components appear.
    """
    require_admissible(d)
    _check_spec(len(d.components), spec)
    lk = linking_matrix(d)
    idx = sorted(spec.coefficients)
    comps = d.components
    rows = []
    for a in idx:
        row = []
        for b in idx:
            if a == b:
                row.append(thurston_bennequin(comps[a - 1]) + spec.coefficients[a])
            else:
                row.append(lk[a - 1][b - 1])
        rows.append(tuple(row))
    return SurgeryPresentation(tuple(rows))


def h1_from_presentation(p: SurgeryPresentation) -> AbelianGroup:
    n = len(p.matrix)
    if n == 0:
        return AbelianGroup(0)
    return cokernel([list(r) for r in p.matrix], n)


def verify_surgery(ob_after: RelativeOpenBook, p: SurgeryPresentation, method: str = "auto") -> VerificationReport:
    return VerificationReport(h1_of_open_book_3(ob_after, ob_after.word3, method), h1_from_presentation(p))
