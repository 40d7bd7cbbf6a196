"""Serviços de carga: densidade, cargas por átomo e por subgrupo.

q_i = vol · Σ_{v ∈ V_i} Φ(v)² e Q_j = Σ_{a_i ∈ s_j} q_i. Todas as somas têm
ordem fixa (voxels em ordem crescente dentro de cada bloco, blocos em ordem),
então o resultado não depende do número de workers.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from ..cube_io.models import GridField
from ..molecule.models import MoleculeSpec
from ..segmentation.models import LabelVolume
from ..utils_parallel import CHUNK_VOXELS, map_ordered, voxel_chunks
from .models import ChargeError, ChargeTable, ordered_sum

logger = logging.getLogger("ntx.charge")


def density(field: GridField) -> GridField:
    values = field.values
    return field.with_values(values * values)


def atom_charges(
    field: GridField,
    lv: LabelVolume,
    *,
    workers: int | None = None,
    chunk: int = CHUNK_VOXELS,
) -> np.ndarray:
    """Carga por átomo a partir do campo Φ (eleva ao quadrado internamente)."""
    if not lv.matches(field):
        raise ChargeError(
            f"grade do campo {field.counts} não corresponde aos rótulos {lv.counts}"
        )
    values = field.values
    labels = lv.labels
    n = lv.n_labels

    def partial(bounds: tuple[int, int]) -> np.ndarray:
        start, stop = bounds
        phi = values[start:stop]
        return np.bincount(labels[start:stop], weights=phi * phi, minlength=n)

    acc = np.zeros(n, dtype=np.float64)
    for part in map_ordered(partial, voxel_chunks(field.n_voxels, chunk), workers):
        acc += part
    return acc * field.voxel_volume


def subgroup_charges(per_atom: Sequence[float] | np.ndarray, m: MoleculeSpec) -> np.ndarray:
    q = np.asarray(per_atom, dtype=np.float64)
    if q.size != m.n_atoms:
        raise ChargeError(f"{q.size} cargas para {m.n_atoms} átomos")
    return np.array([ordered_sum(q[list(g.members)]) for g in m.subgroups], dtype=np.float64)


def charge_table(
    hole: GridField,
    particle: GridField,
    lv: LabelVolume,
    m: MoleculeSpec,
    particle_lv: LabelVolume | None = None,
    *,
    tolerance: float = 0.05,
    workers: int | None = None,
) -> ChargeTable:
    """Tabela completa de cargas.

    `particle_lv` permite uma segmentação própria para a partícula (caso da
    segmentação por gradiente, que depende do campo); por padrão usa `lv`.
    """
    if not hole.same_grid(particle):
        raise ChargeError(
            f"grades de buraco {hole.counts} e partícula {particle.counts} não coincidem"
        )
    for labels in (lv, particle_lv):
        if labels is not None and labels.n_labels != m.n_atoms:
            raise ChargeError(f"rótulos com {labels.n_labels} átomos, molécula tem {m.n_atoms}")
    q_h = atom_charges(hole, lv, workers=workers)
    q_p = atom_charges(particle, particle_lv or lv, workers=workers)
    table = ChargeTable(
        per_atom_hole=q_h,
        per_atom_particle=q_p,
        per_subgroup_hole=subgroup_charges(q_h, m),
        per_subgroup_particle=subgroup_charges(q_p, m),
        names=m.names,
        groups=[g.members for g in m.subgroups],
    )
    for label, total in (("hole", table.total_hole), ("particle", table.total_particle)):
        if abs(total - 1.0) > tolerance:
            logger.warning(
                "Total %s charge %.6f deviates from 1 by more than %s", label, total, tolerance
            )
    return table


def normalize_percent(t: ChargeTable) -> ChargeTable:
    total_h, total_p = t.totals
    if t.unit == "percent" and abs(total_h - 100.0) <= 1e-9 and abs(total_p - 100.0) <= 1e-9:
        return t
    if not total_h > 0 or not total_p > 0:
        raise ChargeError(
            f"normalização exige totais positivos (buraco={total_h}, partícula={total_p})"
        )
    return ChargeTable(
        per_atom_hole=t.per_atom_hole / total_h * 100.0,
        per_atom_particle=t.per_atom_particle / total_p * 100.0,
        per_subgroup_hole=t.per_subgroup_hole / total_h * 100.0,
        per_subgroup_particle=t.per_subgroup_particle / total_p * 100.0,
        names=t.names,
        groups=t.groups,
        unit="percent",
    )


def table_from_subgroups(
    names: Sequence[str],
    hole: Sequence[float],
    particle: Sequence[float],
    *,
    unit: str = "percent",
) -> ChargeTable:
    """Tabela só com cargas de subgrupo (ex.: valores publicados, charges.json)."""
    if not (len(names) == len(hole) == len(particle)) or not names:
        raise ChargeError("nomes, buraco e partícula devem ter o mesmo tamanho (>= 1)")
    if any(v < 0 for v in list(hole) + list(particle)):
        raise ChargeError("cargas de subgrupo não podem ser negativas")
    return ChargeTable(
        per_atom_hole=[],
        per_atom_particle=[],
        per_subgroup_hole=hole,
        per_subgroup_particle=particle,
        names=names,
        groups=[() for _ in names],
        unit=unit,
    )
