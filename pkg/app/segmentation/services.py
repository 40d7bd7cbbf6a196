"""Segmentação do volume em regiões por átomo (diagrama de potência).

Cada voxel recebe o índice do átomo de menor distância de potência
pd(x, p) = ||x - p||² - r². Empates ficam com o menor índice de átomo.
O resultado não depende dos valores do campo, só da grade e da molécula.
"""

from __future__ import annotations

import logging

import numpy as np

from ..cube_io.models import GridField, GridMeta
from ..molecule.models import MoleculeSpec
from ..utils_parallel import CHUNK_VOXELS, map_ordered, voxel_chunks
from .models import LabelVolume, SegmentationError

logger = logging.getLogger("ntx.segmentation")

# Diferenças de pd abaixo de TIE_RTOL·escala são empates (erro de arredondamento)
TIE_RTOL = 1e-12


def power_distance(x, p, r: float) -> float:
    dx = float(x[0]) - float(p[0])
    dy = float(x[1]) - float(p[1])
    dz = float(x[2]) - float(p[2])
    return dx * dx + dy * dy + dz * dz - float(r) * float(r)


def voxel_coordinates(
    grid: GridField | GridMeta, start: int = 0, stop: int | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coordenadas (Bohr) dos voxels de índice linear [start, stop).

    Ponto amostral = origin + i·a_x + j·a_y + k·a_z (origem é o primeiro ponto).
    """
    stop = grid.n_voxels if stop is None else stop
    return coordinates_at(grid, np.arange(start, stop, dtype=np.int64))


def coordinates_at(
    grid: GridField | GridMeta, idx: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    _, ny, nz = grid.counts
    idx = np.asarray(idx, dtype=np.int64)
    i = idx // (ny * nz)
    j = (idx // nz) % ny
    k = idx % nz
    o, ax = grid.origin, grid.axes
    x, y, z = (o[c] + i * ax[0, c] + j * ax[1, c] + k * ax[2, c] for c in range(3))
    return x, y, z


def _running_argmin(x, y, z, positions: np.ndarray, radii_sq: np.ndarray, tol: float):
    """Menor pd por ponto; diferenças até `tol` contam como empate (fica o menor índice)."""
    best = np.full(x.shape, np.inf)
    label = np.zeros(x.shape, dtype=np.int64)
    # Ordem crescente de átomo + comparação estrita => empate fica com o menor índice
    for a in range(positions.shape[0]):
        dx = x - positions[a, 0]
        dy = y - positions[a, 1]
        dz = z - positions[a, 2]
        d = dx * dx + dy * dy + dz * dz - radii_sq[a]
        closer = d < best - tol
        best[closer] = d[closer]
        label[closer] = a
    return label


def _tie_tolerance(grid: GridMeta, positions: np.ndarray, radii_sq: np.ndarray) -> float:
    # Arredondamento de p - origin é relativo a |p| e |origin|; o de pd, ao alcance local
    corner = np.abs(np.asarray(grid.counts, dtype=np.float64) - 1) @ np.abs(grid.axes)
    reach = float(np.linalg.norm(corner))
    absolute = float(np.linalg.norm(grid.origin))
    if positions.size:
        reach += float(np.max(np.linalg.norm(positions - grid.origin, axis=1)))
        absolute += float(np.max(np.linalg.norm(positions, axis=1)))
    scale = reach * (reach + absolute) + float(np.max(radii_sq, initial=0.0))
    return TIE_RTOL * max(1.0, scale)


def _power_chunk(grid: GridMeta, positions: np.ndarray, radii_sq: np.ndarray):
    # Coordenadas relativas à origem: transladar átomos e grade juntos não muda os rótulos
    local = GridMeta(origin=np.zeros(3), counts=grid.counts, axes=grid.axes)
    shifted = positions - grid.origin
    tol = _tie_tolerance(grid, positions, radii_sq)

    def run(bounds: tuple[int, int]) -> np.ndarray:
        x, y, z = voxel_coordinates(local, *bounds)
        return _running_argmin(x, y, z, shifted, radii_sq, tol)

    return run


def segment_power_diagram(
    field_meta: GridField | GridMeta,
    m: MoleculeSpec,
    *,
    workers: int | None = None,
    chunk: int = CHUNK_VOXELS,
) -> LabelVolume:
    grid = GridMeta.of(field_meta)
    radii = m.radii
    radii_sq = radii * radii
    parts = map_ordered(
        _power_chunk(grid, m.positions, radii_sq), voxel_chunks(grid.n_voxels, chunk), workers
    )
    labels = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "Power diagram: %s voxels, %s atoms, %s chunks", grid.n_voxels, m.n_atoms, len(parts)
        )
    return LabelVolume(grid=grid, labels=labels, n_labels=m.n_atoms, kind="atom")


def subgroup_labels(lv: LabelVolume, m: MoleculeSpec) -> LabelVolume:
    if lv.kind != "atom" or lv.n_labels != m.n_atoms:
        raise SegmentationError(
            f"rótulos de {lv.n_labels} {lv.kind}s não correspondem a {m.n_atoms} átomos"
        )
    merged = m.atom_subgroups[lv.labels]
    return LabelVolume(grid=lv.grid, labels=merged, n_labels=m.n_subgroups, kind="subgroup")


def nearest_atom(
    points: np.ndarray,
    m: MoleculeSpec,
    *,
    workers: int | None = None,
    chunk: int = CHUNK_VOXELS,
) -> np.ndarray:
    """Átomo mais próximo (Euclidiano) de cada ponto; empate => menor índice.

    Processa os pontos em blocos, um átomo por vez: a memória fica em O(bloco),
    mesmo quando cada voxel de um platô de densidade zero é um máximo.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    radii_sq = np.zeros(m.n_atoms)

    def run(bounds: tuple[int, int]) -> np.ndarray:
        block = pts[bounds[0] : bounds[1]]
        return _running_argmin(block[:, 0], block[:, 1], block[:, 2], m.positions, radii_sq, 0.0)

    parts = map_ordered(run, voxel_chunks(len(pts), chunk), workers)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def segment_stats(lv: LabelVolume, m: MoleculeSpec) -> dict:
    atom_counts = lv.counts_per_label()
    group_counts = subgroup_labels(lv, m).counts_per_label()
    return {
        "n_voxels": lv.n_voxels,
        "atoms": [int(c) for c in atom_counts],
        "subgroups": {name: int(c) for name, c in zip(m.names, group_counts)},
    }
