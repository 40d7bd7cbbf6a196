from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class MoleculeError(ValueError):
    pass


@dataclass(frozen=True)
class Atom:
    index: int
    element: int
    position: tuple[float, float, float]
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise MoleculeError(f"átomo {self.index}: raio deve ser positivo ({self.radius})")


@dataclass(frozen=True)
class Subgroup:
    name: str
    members: tuple[int, ...]
    color: str | None = None


@dataclass(frozen=True)
class MoleculeSpec:
    """Átomos (conjunto A) e partição em subgrupos (conjunto S)."""

    atoms: tuple[Atom, ...]
    subgroups: tuple[Subgroup, ...]

    def __post_init__(self) -> None:
        atoms = tuple(self.atoms)
        groups = tuple(
            Subgroup(name=g.name, members=tuple(sorted(g.members)), color=g.color)
            for g in self.subgroups
        )
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "subgroups", groups)
        if not atoms:
            raise MoleculeError("molécula sem átomos")
        if not groups:
            raise MoleculeError("molécula sem subgrupos")
        if [a.index for a in atoms] != list(range(len(atoms))):
            raise MoleculeError("índices de átomos devem ser 0..N-1 na ordem do cube")
        names = [g.name for g in groups]
        if any(not n or not n.strip() for n in names):
            raise MoleculeError("nome de subgrupo vazio")
        if len(set(names)) != len(names):
            raise MoleculeError("nomes de subgrupo repetidos")
        seen: dict[int, str] = {}
        for g in groups:
            for i in g.members:
                if not 0 <= i < len(atoms):
                    raise MoleculeError(
                        f"{g.name}: átomo {i} fora do intervalo 0..{len(atoms) - 1}"
                    )
                if i in seen:
                    raise MoleculeError(f"átomo {i} em dois subgrupos ({seen[i]}, {g.name})")
                seen[i] = g.name
        missing = sorted(set(range(len(atoms))) - set(seen))
        if missing:
            raise MoleculeError(f"átomos sem subgrupo: {missing}")

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_subgroups(self) -> int:
        return len(self.subgroups)

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.subgroups]

    @property
    def colors(self) -> list[str | None]:
        return [g.color for g in self.subgroups]

    @cached_property
    def positions(self) -> np.ndarray:
        arr = np.array([a.position for a in self.atoms], dtype=np.float64).reshape(-1, 3)
        arr.setflags(write=False)
        return arr

    @cached_property
    def radii(self) -> np.ndarray:
        arr = np.array([a.radius for a in self.atoms], dtype=np.float64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def atom_subgroups(self) -> np.ndarray:
        """Vetor N -> índice do subgrupo de cada átomo."""
        out = np.empty(len(self.atoms), dtype=np.int64)
        for j, g in enumerate(self.subgroups):
            out[list(g.members)] = j
        out.setflags(write=False)
        return out
