"""Segmentação por subida de gradiente discreta (referência topológica).

Cada voxel aponta para o vizinho (26-conectividade) de maior valor, desde que
estritamente maior que o próprio; empates entre vizinhos ficam com o menor
índice linear. Seguindo os ponteiros chega-se a um máximo local, que é
atribuído ao átomo mais próximo. Não é um complexo de Morse-Smale completo,
apenas a comparação com o diagrama de potência.
"""

from __future__ import annotations

import itertools
import logging

import numpy as np

from ..cube_io.models import GridField, GridMeta
from ..molecule.models import MoleculeSpec
from .models import LabelVolume
from .services import coordinates_at, nearest_atom

logger = logging.getLogger("ntx.segmentation")

# Ordem lexicográfica de (di, dj, dk) == ordem crescente do deslocamento linear
_OFFSETS = [o for o in itertools.product((-1, 0, 1), repeat=3) if o != (0, 0, 0)]


def ascent_pointers(density: GridField) -> np.ndarray:
    """Índice linear do vizinho de subida de cada voxel (ele mesmo se for máximo)."""
    nx, ny, nz = density.counts
    rho = density.values_3d()
    padded = np.pad(rho, 1, mode="constant", constant_values=-np.inf)
    own = np.arange(density.n_voxels, dtype=np.int64).reshape(nx, ny, nz)
    best_val = rho.copy()
    best_idx = own.copy()
    for di, dj, dk in _OFFSETS:
        neighbour = padded[1 + di : 1 + di + nx, 1 + dj : 1 + dj + ny, 1 + dk : 1 + dk + nz]
        higher = neighbour > best_val
        if not higher.any():
            continue
        best_val = np.where(higher, neighbour, best_val)
        best_idx = np.where(higher, own + (di * ny * nz + dj * nz + dk), best_idx)
    return best_idx.ravel()


def _resolve_roots(parent: np.ndarray) -> np.ndarray:
    steps = 0
    while True:
        nxt = parent[parent]
        steps += 1
        if np.array_equal(nxt, parent):
            break
        parent = nxt
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("Gradient ascent converged after %s pointer jumps", steps)
    return parent


def segment_gradient_ascent(density: GridField, m: MoleculeSpec) -> LabelVolume:
    """Rotula cada voxel pelo átomo mais próximo do máximo que o atrai.

    Espera densidade (ρ = Φ², valores >= 0), não a amplitude Φ.
    """
    roots = _resolve_roots(ascent_pointers(density))
    maxima, inverse = np.unique(roots, return_inverse=True)
    grid = GridMeta.of(density)
    owner = nearest_atom(np.column_stack(coordinates_at(grid, maxima)), m)
    logger.info("Gradient segmentation: %s maxima over %s voxels", maxima.size, grid.n_voxels)
    return LabelVolume(grid=grid, labels=owner[inverse.ravel()], n_labels=m.n_atoms, kind="atom")
