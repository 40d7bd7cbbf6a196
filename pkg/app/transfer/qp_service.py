"""Active-set primal para  min ½||t - t_p||²  s.a.  B t = b,  t >= 0.

Hessiana identidade, então cada subproblema com igualdades é uma projeção
no núcleo de B restrita às variáveis livres, resolvida por mínimos quadrados
densos (scipy.linalg.lstsq). O ponto inicial precisa ser viável; os
iterados permanecem viáveis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .models import QPConvergenceError

logger = logging.getLogger("ntx.transfer")


@dataclass(frozen=True)
class QPSolution:
    t: np.ndarray
    active: tuple[int, ...]
    changes: int
    residuals: dict[str, float]


def _multipliers(B: np.ndarray, g: np.ndarray, free: np.ndarray) -> np.ndarray:
    if not free.any():
        return np.zeros(B.shape[0])
    lam, *_ = linalg.lstsq(B[:, free].T, g[free])
    return lam


def kkt_residuals(
    B: np.ndarray, b: np.ndarray, target: np.ndarray, t: np.ndarray, active: np.ndarray
) -> dict[str, float]:
    """Resíduos KKT: viabilidade primal, estacionariedade e sinal dos multiplicadores."""
    g = t - target
    free = ~active
    lam = _multipliers(B, g, free)
    reduced = g - B.T @ lam
    return {
        "equality": float(np.max(np.abs(B @ t - b), initial=0.0)),
        "bounds": float(max(0.0, -np.min(t, initial=0.0))),
        "stationarity": float(np.max(np.abs(reduced[free]), initial=0.0)),
        "dual": float(max(0.0, -np.min(reduced[active], initial=0.0))),
    }


def solve_active_set(
    B: np.ndarray,
    b: np.ndarray,
    target: np.ndarray,
    start: np.ndarray,
    *,
    tol: float = 1e-10,
    max_changes: int | None = None,
) -> QPSolution:
    B = np.asarray(B, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    t = np.array(start, dtype=np.float64, copy=True)
    size = t.size
    if max_changes is None:
        max_changes = 10 * size
    scale = max(
        1.0,
        float(np.max(np.abs(target), initial=0.0)),
        float(np.max(np.abs(b), initial=0.0)),
    )
    step_tol = tol * scale

    active = t <= 0.0
    t[active] = 0.0
    changes = 0
    while True:
        free = ~active
        r = np.where(free, target - t, 0.0)
        if free.any():
            # projeção de r no núcleo de B_F
            lam, *_ = linalg.lstsq(B[:, free].T, r[free])
            p = np.zeros(size)
            p[free] = r[free] - B[:, free].T @ lam
        else:
            p = np.zeros(size)

        if np.max(np.abs(p), initial=0.0) <= step_tol:
            g = t - target
            lam = _multipliers(B, g, free)
            mu = g - B.T @ lam
            candidates = np.flatnonzero(active & (mu < -step_tol))
            if candidates.size == 0:
                break
            drop = int(candidates[np.argmin(mu[candidates])])
            active[drop] = False
            changes += 1
            if logger.isEnabledFor(logging.DEBUG):
                logger.debug("QP: release t[%s] (mu=%.3e)", drop, mu[drop])
        else:
            alpha = 1.0
            blocking = -1
            for i in np.flatnonzero(free & (p < 0.0)):
                ratio = -t[i] / p[i]
                if ratio < alpha:
                    alpha, blocking = ratio, int(i)
            t = t + alpha * p
            if blocking >= 0:
                t[blocking] = 0.0
                active[blocking] = True
                changes += 1
                if logger.isEnabledFor(logging.DEBUG):
                    logger.debug("QP: fix t[%s] at 0 (alpha=%.3e)", blocking, alpha)
        if changes > max_changes:
            residuals = kkt_residuals(B, b, target, t, active)
            raise QPConvergenceError(
                f"active-set excedeu {max_changes} mudanças sem convergir", residuals
            )

    # ruído de arredondamento abaixo de zero
    t[(t < 0.0) & (t > -step_tol)] = 0.0
    residuals = kkt_residuals(B, b, target, t, active)
    active_idx = tuple(int(i) for i in np.flatnonzero(active))
    return QPSolution(t=t, active=active_idx, changes=changes, residuals=residuals)
