from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np


class TransferError(ValueError):
    pass


class QPConvergenceError(TransferError):
    """Active-set não convergiu; carrega os resíduos do último iterado."""

    def __init__(self, message: str, residuals: Mapping[str, float] | None = None):
        self.residuals = dict(residuals or {})
        detail = ", ".join(f"{k}={v:.3e}" for k, v in self.residuals.items())
        super().__init__(f"{message} ({detail})" if detail else message)


def _ro(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DonorAcceptorPartition:
    """Subgrupos doadores (Q^h > Q^p) e aceitadores (Q^h <= Q^p)."""

    hole: np.ndarray
    particle: np.ndarray
    donors: tuple[int, ...]
    acceptors: tuple[int, ...]
    deficits: np.ndarray
    surpluses: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for name in ("hole", "particle", "deficits", "surpluses"):
            object.__setattr__(self, name, _ro(getattr(self, name)).ravel())
        object.__setattr__(self, "donors", tuple(int(i) for i in self.donors))
        object.__setattr__(self, "acceptors", tuple(int(i) for i in self.acceptors))
        if not self.names:
            object.__setattr__(self, "names", tuple(f"S{j}" for j in range(self.n_subgroups)))
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def n_subgroups(self) -> int:
        return int(self.hole.size)

    @property
    def n(self) -> int:
        return len(self.donors)

    @property
    def m(self) -> int:
        return len(self.acceptors)

    @property
    def total(self) -> float:
        """Q̃: carga total transferida (soma dos déficits, ordem fixa)."""
        acc = 0.0
        for v in self.deficits:
            acc += float(v)
        return acc

    @property
    def surplus_total(self) -> float:
        acc = 0.0
        for v in self.surpluses:
            acc += float(v)
        return acc

    @property
    def mismatch(self) -> float:
        return abs(self.total - self.surplus_total)

    @property
    def donor_names(self) -> list[str]:
        return [self.names[i] for i in self.donors]

    @property
    def acceptor_names(self) -> list[str]:
        return [self.names[j] for j in self.acceptors]


@dataclass(frozen=True, eq=False)
class TransferResult:
    partition: DonorAcceptorPartition
    T: np.ndarray
    full_matrix: np.ndarray
    method: str
    preference: np.ndarray | None = None
    residuals: dict[str, float] = field(default_factory=dict)
    local_excitation_only: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "T", _ro(self.T).reshape(self.partition.n, self.partition.m)
        )
        object.__setattr__(self, "full_matrix", _ro(self.full_matrix))
        if self.preference is not None:
            object.__setattr__(self, "preference", _ro(self.preference).ravel())

    @property
    def names(self) -> tuple[str, ...]:
        return self.partition.names

    @property
    def local_excitation(self) -> float:
        """Parcela local (traço de Q̃)."""
        return float(np.trace(self.full_matrix))

    @property
    def charge_transfer(self) -> float:
        return float(self.full_matrix.sum() - np.trace(self.full_matrix))

    def summary_percent(self) -> dict[str, float]:
        total = float(self.full_matrix.sum())
        if total <= 0:
            return {"local_excitation": 0.0, "charge_transfer": 0.0}
        return {
            "local_excitation": self.local_excitation / total * 100.0,
            "charge_transfer": self.charge_transfer / total * 100.0,
        }
