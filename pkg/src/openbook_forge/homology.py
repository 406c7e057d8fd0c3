"""Finitely generated abelian groups presented as integer cokernels."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import sympy
from sympy.matrices.normalforms import smith_normal_form


@dataclass(frozen=True)
class AbelianGroup:
    """Z^rank plus the torsion Z/t_1 + ... + Z/t_k with t_1 | t_2 | ... (all t_i > 1)."""

    rank: int
    torsion: tuple[int, ...] = ()

    @property
    def trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def factors(self) -> list[int]:
        """Invariant factors with 0 standing for a free summand."""
        return list(self.torsion) + [0] * self.rank

    def __str__(self) -> str:
        parts = [f"Z/{t}" for t in self.torsion] + ["Z"] * self.rank
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> list[int]:
        return self.factors


def smith_diagonal(rows: Sequence[Sequence[int]]) -> list[int]:
    """Absolute diagonal of the Smith normal form (length min(shape))."""
    mat = sympy.Matrix(rows)
    if 0 in mat.shape:
        return []
    s = smith_normal_form(mat, domain=sympy.ZZ)
    return [abs(int(s[k, k])) for k in range(min(s.shape))]


def cokernel(rows: Sequence[Sequence[int]], n: int | None = None) -> AbelianGroup:
    """coker of the map Z^cols -> Z^n given by an n x cols matrix."""
    rows = [list(map(int, r)) for r in rows]
    if n is None:
        n = len(rows)
    if not rows or not rows[0]:
        return AbelianGroup(n)
    diag = smith_diagonal(rows)
    nonzero = [d for d in diag if d]
    torsion = tuple(sorted(d for d in nonzero if d > 1))
    return AbelianGroup(n - len(nonzero), torsion)
