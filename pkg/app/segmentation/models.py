from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..cube_io.models import GridField, GridMeta


class SegmentationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LabelVolume:
    """Rótulo inteiro por voxel, mesma ordem de GridField.values.

    `n_labels` é N (átomos) ou M (subgrupos), conforme `kind`.
    """

    grid: GridMeta
    labels: np.ndarray
    n_labels: int
    kind: str = "atom"

    def __post_init__(self) -> None:
        labels = np.array(self.labels, dtype=np.int64, copy=True).ravel()
        if labels.size != self.grid.n_voxels:
            raise SegmentationError(
                f"{labels.size} rótulos para grade {self.grid.counts} "
                f"({self.grid.n_voxels} voxels)"
            )
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_labels):
            raise SegmentationError(f"rótulo fora de 0..{self.n_labels - 1}")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def counts(self) -> tuple[int, int, int]:
        return self.grid.counts

    @property
    def n_voxels(self) -> int:
        return self.grid.n_voxels

    def matches(self, field: GridField) -> bool:
        return field.same_grid(self.grid)

    def counts_per_label(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_labels)

    def to_field(self, comment: str = "") -> GridField:
        """Rótulos como valores reais, para exportar em cube."""
        return GridField(
            origin=self.grid.origin,
            counts=self.grid.counts,
            axes=self.grid.axes,
            values=self.labels.astype(np.float64),
            comments=(f"ntx {self.kind} labels", comment),
        )

    def equals(self, other: "LabelVolume") -> bool:
        return (
            self.n_labels == other.n_labels
            and self.grid.counts == other.grid.counts
            and np.array_equal(self.labels, other.labels)
        )
