from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

BOHR_IN_ANGSTROM = 0.529177210903


class CubeFormatError(ValueError):
    """Erro de leitura de cube com contexto de arquivo e linha."""

    def __init__(self, message: str, *, source: str = "<cube>", line: int | None = None):
        self.source = source
        self.line = line
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


def _frozen_array(values, dtype, shape=None) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if shape is not None:
        arr = arr.reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridField:
    """Campo escalar (NTO) amostrado numa grade regular 3D.

    Geometria sempre em Bohr. `values` segue a ordem do cube: x externo,
    z variando mais rápido (índice linear i*ny*nz + j*nz + k).
    """

    origin: np.ndarray
    counts: tuple[int, int, int]
    axes: np.ndarray
    values: np.ndarray
    comments: tuple[str, str] = ("", "")
    orbital_id: int | None = None

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != 3 or any(c < 1 for c in counts):
            raise ValueError(f"contagens por eixo inválidas: {self.counts}")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "origin", _frozen_array(self.origin, np.float64, (3,)))
        object.__setattr__(self, "axes", _frozen_array(self.axes, np.float64, (3, 3)))
        values = _frozen_array(self.values, np.float64)
        if values.ndim != 1:
            values = _frozen_array(values.ravel(), np.float64)
        if values.size != self.n_voxels:
            raise ValueError(
                f"{values.size} valores para grade {counts} ({self.n_voxels} voxels)"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "comments", tuple(self.comments))
        if self.voxel_volume <= 0:
            raise ValueError("vetores de eixo degenerados (volume do voxel nulo)")

    @property
    def n_voxels(self) -> int:
        nx, ny, nz = self.counts
        return nx * ny * nz

    @property
    def voxel_volume(self) -> float:
        a, b, c = self.axes
        return float(abs(np.dot(a, np.cross(b, c))))

    def values_3d(self) -> np.ndarray:
        return self.values.reshape(self.counts)

    def linear_index(self, i: int, j: int, k: int) -> int:
        _, ny, nz = self.counts
        return i * ny * nz + j * nz + k

    def same_grid(self, other: "GridField | GridMeta") -> bool:
        return (
            tuple(self.counts) == tuple(other.counts)
            and np.array_equal(self.origin, other.origin)
            and np.array_equal(self.axes, other.axes)
        )

    def with_values(self, values: Sequence[float] | np.ndarray) -> "GridField":
        return GridField(
            origin=self.origin,
            counts=self.counts,
            axes=self.axes,
            values=values,
            comments=self.comments,
            orbital_id=self.orbital_id,
        )


# Apenas metadados da grade (sem valores), usado por LabelVolume
@dataclass(frozen=True, eq=False)
class GridMeta:
    origin: np.ndarray
    counts: tuple[int, int, int]
    axes: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        object.__setattr__(self, "origin", _frozen_array(self.origin, np.float64, (3,)))
        object.__setattr__(self, "axes", _frozen_array(self.axes, np.float64, (3, 3)))

    @classmethod
    def of(cls, grid: "GridField | GridMeta") -> "GridMeta":
        return cls(origin=grid.origin, counts=tuple(grid.counts), axes=grid.axes)

    @property
    def n_voxels(self) -> int:
        nx, ny, nz = self.counts
        return nx * ny * nz


@dataclass(frozen=True)
class CubeAtomRecord:
    atomic_number: int
    nuclear_charge: float
    position: tuple[float, float, float]

    def __post_init__(self) -> None:
        if int(self.atomic_number) < 1:
            raise ValueError(f"número atômico inválido: {self.atomic_number}")
        object.__setattr__(self, "atomic_number", int(self.atomic_number))
        object.__setattr__(self, "nuclear_charge", float(self.nuclear_charge))
        object.__setattr__(self, "position", tuple(float(x) for x in self.position))
