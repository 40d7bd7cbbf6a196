from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ChargeError(ValueError):
    pass


def _ro(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).ravel()
    arr.setflags(write=False)
    return arr


def ordered_sum(values) -> float:
    """Soma em ordem crescente de índice (não usa a redução em pares do numpy)."""
    total = 0.0
    for v in values:
        total += float(v)
    return total


@dataclass(frozen=True, eq=False)
class ChargeTable:
    """Cargas por átomo (q) e por subgrupo (Q) do buraco e da partícula.

    `unit` é "raw" (integral em unidades do campo) ou "percent".
    """

    per_atom_hole: np.ndarray
    per_atom_particle: np.ndarray
    per_subgroup_hole: np.ndarray
    per_subgroup_particle: np.ndarray
    names: tuple[str, ...]
    groups: tuple[tuple[int, ...], ...]
    unit: str = "raw"
    total_hole: float | None = None
    total_particle: float | None = None

    def __post_init__(self) -> None:
        for name in (
            "per_atom_hole",
            "per_atom_particle",
            "per_subgroup_hole",
            "per_subgroup_particle",
        ):
            object.__setattr__(self, name, _ro(getattr(self, name)))
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "groups", tuple(tuple(g) for g in self.groups))
        if self.per_atom_hole.size != self.per_atom_particle.size:
            raise ChargeError("buraco e partícula com números de átomos diferentes")
        if not (
            self.per_subgroup_hole.size
            == self.per_subgroup_particle.size
            == len(self.names)
            == len(self.groups)
        ):
            raise ChargeError("tabela de subgrupos inconsistente")
        if self.unit not in ("raw", "percent"):
            raise ChargeError(f"unidade desconhecida: {self.unit!r}")
        # Tabelas lidas de JSON podem não ter cargas por átomo
        atoms_known = self.per_atom_hole.size > 0
        if self.total_hole is None:
            src = self.per_atom_hole if atoms_known else self.per_subgroup_hole
            object.__setattr__(self, "total_hole", ordered_sum(src))
        if self.total_particle is None:
            src = self.per_atom_particle if atoms_known else self.per_subgroup_particle
            object.__setattr__(self, "total_particle", ordered_sum(src))

    @property
    def per_atom_diff(self) -> np.ndarray:
        return self.per_atom_particle - self.per_atom_hole

    @property
    def per_subgroup_diff(self) -> np.ndarray:
        return self.per_subgroup_particle - self.per_subgroup_hole

    @property
    def totals(self) -> tuple[float, float]:
        return float(self.total_hole), float(self.total_particle)

    @property
    def n_atoms(self) -> int:
        return int(self.per_atom_hole.size)

    @property
    def n_subgroups(self) -> int:
        return len(self.names)
