"""Campos analíticos (somas de Gaussianas) para fixtures e testes.

Nenhum dado de DFT é necessário: cada conjunto gera um par de cubes
(buraco/partícula) e o JSON de subgrupos correspondente.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .cube_io.models import CubeAtomRecord, GridField, GridMeta
from .cube_io.services import save_cube
from .segmentation.services import voxel_coordinates

logger = logging.getLogger("ntx.synthetic")


@dataclass(frozen=True)
class SyntheticPair:
    name: str
    hole: GridField
    particle: GridField
    atoms: list[CubeAtomRecord]
    groups: dict


def box_grid(counts: Sequence[int], lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Origem e eixos de uma grade cúbica que amostra [lo, hi] inclusive."""
    counts = tuple(int(c) for c in counts)
    origin = np.full(3, float(lo))
    axes = np.diag([(hi - lo) / (c - 1) if c > 1 else 1.0 for c in counts])
    return origin, axes


def gaussian_field(
    counts: Sequence[int],
    origin: Sequence[float],
    axes: np.ndarray,
    centers: Sequence[Sequence[float]],
    weights: Sequence[float] | None = None,
    exponent: float = 1.0,
    *,
    normalize: bool = False,
    comment: str = "",
) -> GridField:
    """Φ(x) = Σ w_k · exp(-exponent · ||x - c_k||²)."""
    meta = GridMeta(origin=origin, counts=tuple(counts), axes=axes)
    x, y, z = voxel_coordinates(meta)
    values = np.zeros(meta.n_voxels)
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 3)
    weights = np.ones(len(centers)) if weights is None else np.asarray(weights, dtype=np.float64)
    for (cx, cy, cz), w in zip(centers, weights):
        values += w * np.exp(-exponent * ((x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2))
    if normalize:
        vol = float(abs(np.linalg.det(meta.axes)))
        norm = float(np.sum(values * values)) * vol
        if norm > 0:
            values = values / np.sqrt(norm)
    return GridField(
        origin=meta.origin,
        counts=meta.counts,
        axes=meta.axes,
        values=values,
        comments=("ntx synthetic", comment),
    )


def _atoms(positions: Sequence[Sequence[float]], z: int = 6) -> list[CubeAtomRecord]:
    return [CubeAtomRecord(atomic_number=z, nuclear_charge=float(z), position=p) for p in positions]


def single_gaussian(counts: int = 64, half_width: float = 6.0) -> SyntheticPair:
    """Φ = exp(-||x||²) num átomo na origem: ∫Φ² = (π/2)^{3/2}."""
    origin, axes = box_grid((counts,) * 3, -half_width, half_width)
    field = gaussian_field((counts,) * 3, origin, axes, [(0.0, 0.0, 0.0)], comment="single")
    return SyntheticPair(
        name="single",
        hole=field,
        particle=field,
        atoms=_atoms([(0.0, 0.0, 0.0)]),
        groups={"subgroups": [{"name": "ALL", "atoms": [0]}]},
    )


def two_gaussian_pair(
    separation: float = 4.0,
    counts: int = 33,
    half_width: float = 6.0,
    exponent: float = 1.0,
    leak: float = 0.15,
) -> SyntheticPair:
    """Dois átomos iguais em ±separation/2 no eixo x.

    Buraco concentrado no átomo 0 e partícula no átomo 1; `leak` é o peso da
    Gaussiana no outro átomo.
    """
    d = separation / 2.0
    positions = [(-d, 0.0, 0.0), (d, 0.0, 0.0)]
    shape = (counts,) * 3
    origin, axes = box_grid(shape, -half_width, half_width)
    hole = gaussian_field(
        shape, origin, axes, positions, [1.0, leak], exponent, normalize=True, comment="hole"
    )
    particle = gaussian_field(
        shape, origin, axes, positions, [leak, 1.0], exponent, normalize=True, comment="particle"
    )
    return SyntheticPair(
        name="two_gaussian",
        hole=hole,
        particle=particle,
        atoms=_atoms(positions),
        groups={
            "subgroups": [
                {"name": "LEFT", "atoms": [0], "color": "#1f77b4"},
                {"name": "RIGHT", "atoms": [1], "color": "#ff7f0e"},
            ]
        },
    )


def large_pair(n_atoms: int = 97, counts: int = 80, half_width: float = 12.0) -> SyntheticPair:
    """Molécula sintética com ~meio milhão de voxels (80³ = 512000).

    Átomos numa espiral dentro da caixa; buraco nos primeiros 2/3 dos átomos,
    partícula no último terço, quatro subgrupos contíguos.
    """
    k = np.arange(n_atoms, dtype=np.float64)
    radius = 0.6 * half_width
    angle = k * 2.399963229728653  # ângulo áureo
    height = (k / max(1, n_atoms - 1) - 0.5) * 1.2 * half_width
    positions = np.column_stack(
        [radius * np.cos(angle), radius * np.sin(angle), height]
    ).round(6)
    shape = (counts,) * 3
    origin, axes = box_grid(shape, -half_width, half_width)
    split = (2 * n_atoms) // 3
    hole_w = np.where(k < split, 1.0, 0.05)
    part_w = np.where(k < split, 0.05, 1.0)
    hole = gaussian_field(
        shape, origin, axes, positions, hole_w, 1.2, normalize=True, comment="hole"
    )
    particle = gaussian_field(
        shape, origin, axes, positions, part_w, 1.2, normalize=True, comment="particle"
    )
    bounds = np.linspace(0, n_atoms, 5).astype(int)
    groups = {
        "subgroups": [
            {"name": f"FRAG{g + 1}", "atoms": [f"{bounds[g]}-{bounds[g + 1] - 1}"]}
            for g in range(4)
        ]
    }
    return SyntheticPair(
        name="large",
        hole=hole,
        particle=particle,
        atoms=_atoms(positions.tolist()),
        groups=groups,
    )


def write_pair(pair: SyntheticPair, dest: str | Path) -> list[Path]:
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    files = [
        save_cube(dest / f"{pair.name}_hole.cube", pair.hole, pair.atoms),
        save_cube(dest / f"{pair.name}_particle.cube", pair.particle, pair.atoms),
    ]
    groups = dest / f"{pair.name}_groups.json"
    groups.write_text(json.dumps(pair.groups, indent=2) + "\n", encoding="utf-8")
    files.append(groups)
    return files


def write_fixture_set(dest: str | Path, *, include_large: bool = True) -> list[Path]:
    files: list[Path] = []
    pairs = [single_gaussian(counts=33), two_gaussian_pair()]
    if include_large:
        pairs.append(large_pair())
    for pair in pairs:
        files.extend(write_pair(pair, dest))
        logger.info("Wrote synthetic pair %s (%s voxels)", pair.name, pair.hole.n_voxels)
    return files
