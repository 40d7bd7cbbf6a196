"""Reconstrução da transferência de carga entre subgrupos.

Doadores perdem carga (Q^h > Q^p), aceitadores ganham (Q^h <= Q^p). A matriz
T (n doadores x m aceitadores) satisfaz somas de linha = déficits, somas de
coluna = superávits e T >= 0. Dois métodos:

- proporcional: t_ij = déficit_i · superávit_j / Q̃ (forma fechada);
- quadrático: T mais próxima (mínimos quadrados) de uma preferência t_p.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from ..charge.models import ChargeTable
from .models import DonorAcceptorPartition, TransferError, TransferResult
from .qp_service import solve_active_set

logger = logging.getLogger("ntx.transfer")

FEASIBILITY_TOL = 1e-9


def partition_donors_acceptors(
    hole: Sequence[float] | np.ndarray,
    particle: Sequence[float] | np.ndarray,
    names: Sequence[str] = (),
) -> DonorAcceptorPartition:
    q_h = np.asarray(hole, dtype=np.float64).ravel()
    q_p = np.asarray(particle, dtype=np.float64).ravel()
    if q_h.size != q_p.size:
        raise TransferError(
            f"buraco ({q_h.size}) e partícula ({q_p.size}) com tamanhos diferentes"
        )
    # desigualdade estrita: Q^h == Q^p é aceitador com superávit 0
    donors = [j for j in range(q_h.size) if q_h[j] > q_p[j]]
    acceptors = [j for j in range(q_h.size) if not q_h[j] > q_p[j]]
    return DonorAcceptorPartition(
        hole=q_h,
        particle=q_p,
        donors=tuple(donors),
        acceptors=tuple(acceptors),
        deficits=[q_h[i] - q_p[i] for i in donors],
        surpluses=[q_p[j] - q_h[j] for j in acceptors],
        names=tuple(names),
    )


def partition_from_table(table: ChargeTable) -> DonorAcceptorPartition:
    return partition_donors_acceptors(
        table.per_subgroup_hole, table.per_subgroup_particle, table.names
    )


def _check_totals(p: DonorAcceptorPartition, mismatch_tol: float) -> None:
    limit = mismatch_tol * max(1.0, p.total)
    if p.mismatch > limit:
        raise TransferError(
            f"soma dos déficits ({p.total:.9g}) difere da soma dos superávits "
            f"({p.surplus_total:.9g}); normalize as cargas em percentual"
        )


def _le_only(p: DonorAcceptorPartition, method: str) -> TransferResult:
    logger.info("No donors: pure local excitation")
    return TransferResult(
        partition=p,
        T=np.zeros((p.n, p.m)),
        full_matrix=assemble_full_matrix(p, np.zeros((p.n, p.m))),
        method=method,
        residuals={"row": 0.0, "column": 0.0},
        local_excitation_only=True,
    )


def constraint_residuals(p: DonorAcceptorPartition, T: np.ndarray) -> dict[str, float]:
    T = np.asarray(T, dtype=np.float64).reshape(p.n, p.m)
    row = np.abs(T.sum(axis=1) - p.deficits) if p.n else np.zeros(0)
    col = np.abs(T.sum(axis=0) - p.surpluses) if p.m else np.zeros(0)
    return {
        "row": float(np.max(row, initial=0.0)),
        "column": float(np.max(col, initial=0.0)),
        "negative": float(max(0.0, -np.min(T, initial=0.0))),
    }


def _tolerance(p: DonorAcceptorPartition) -> float:
    return FEASIBILITY_TOL * max(1.0, p.total) + p.mismatch


def solve_proportional(
    p: DonorAcceptorPartition, *, mismatch_tol: float = 1e-6
) -> TransferResult:
    if p.n == 0 or not p.total > 0:
        return _le_only(p, "proportional")
    _check_totals(p, mismatch_tol)
    T = np.outer(p.deficits, p.surpluses) / p.total
    return TransferResult(
        partition=p,
        T=T,
        full_matrix=assemble_full_matrix(p, T),
        method="proportional",
        residuals=constraint_residuals(p, T),
    )


def build_qp(
    p: DonorAcceptorPartition, t_p: Sequence[float] | np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Matriz B ((n+m-1) x n·m) e vetor b das restrições de igualdade.

    Linhas: n somas de linha, depois m-1 somas de coluna (a última é
    linearmente dependente e fica de fora). t está em ordem row-major.
    """
    n, m = p.n, p.m
    if n == 0 or m == 0:
        raise TransferError(f"problema sem doadores ou aceitadores (n={n}, m={m})")
    if t_p is not None and np.asarray(t_p).size != n * m:
        raise TransferError(f"t_p com {np.asarray(t_p).size} valores, esperados n·m = {n * m}")
    B = np.zeros((n + m - 1, n * m))
    for i in range(n):
        B[i, i * m : (i + 1) * m] = 1.0
    for j in range(m - 1):
        B[n + j, j::m] = 1.0
    b = np.concatenate([p.deficits, p.surpluses[: m - 1]])
    return B, b


def default_preference(p: DonorAcceptorPartition) -> np.ndarray:
    """Transferência uniforme Q̃/(n·m)."""
    return np.full(p.n * p.m, p.total / (p.n * p.m))


def solve_quadratic(
    p: DonorAcceptorPartition,
    t_p: Sequence[float] | np.ndarray | None = None,
    *,
    kkt_tol: float = 1e-10,
    mismatch_tol: float = 1e-6,
) -> TransferResult:
    if p.n == 0 or not p.total > 0:
        return _le_only(p, "quadratic")
    _check_totals(p, mismatch_tol)
    preference = default_preference(p) if t_p is None else np.asarray(t_p, dtype=np.float64)
    build_qp(p, preference)  # valida dimensões

    start = np.outer(p.deficits, p.surpluses) / p.total
    # aceitadores com superávit 0 têm a coluna fixada em zero
    keep = [j for j in range(p.m) if p.surpluses[j] > 0]
    if p.n == 1 or len(keep) <= 1:
        # ponto viável único: coincide com a solução proporcional
        T = start
        residuals = constraint_residuals(p, T)
        residuals.update({"stationarity": 0.0, "dual": 0.0})
    else:
        reduced = DonorAcceptorPartition(
            hole=p.hole,
            particle=p.particle,
            donors=p.donors,
            acceptors=tuple(p.acceptors[j] for j in keep),
            deficits=p.deficits,
            surpluses=p.surpluses[keep],
            names=p.names,
        )
        B, b = build_qp(reduced)
        target = preference.reshape(p.n, p.m)[:, keep].ravel()
        sol = solve_active_set(B, b, target, start[:, keep].ravel(), tol=kkt_tol)
        T = np.zeros((p.n, p.m))
        T[:, keep] = sol.t.reshape(p.n, len(keep))
        residuals = constraint_residuals(p, T)
        residuals["stationarity"] = sol.residuals["stationarity"]
        residuals["dual"] = sol.residuals["dual"]
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("QP solved with %s active-set changes", sol.changes)
    return TransferResult(
        partition=p,
        T=T,
        full_matrix=assemble_full_matrix(p, T),
        method="quadratic",
        preference=preference,
        residuals=residuals,
    )


def assemble_full_matrix(p: DonorAcceptorPartition, T: np.ndarray) -> np.ndarray:
    """Matriz M x M: diagonal Q^p (doadores) / Q^h (aceitadores), T nas posições
    doador -> aceitador e zero no resto. Confere somas de linha (Q^h) e de
    coluna (Q^p).
    """
    T = np.asarray(T, dtype=np.float64)
    if T.shape != (p.n, p.m):
        raise TransferError(f"T com forma {T.shape}, esperado {(p.n, p.m)}")
    tol = _tolerance(p)
    res = constraint_residuals(p, T)
    if res["negative"] > tol or res["row"] > tol or res["column"] > tol:
        raise TransferError(f"T viola as restrições: {res}")
    size = p.n_subgroups
    full = np.zeros((size, size))
    for d in p.donors:
        full[d, d] = p.particle[d]
    for a in p.acceptors:
        full[a, a] = p.hole[a]
    for i, d in enumerate(p.donors):
        for j, a in enumerate(p.acceptors):
            full[d, a] = T[i, j]
    rows = np.max(np.abs(full.sum(axis=1) - p.hole), initial=0.0)
    cols = np.max(np.abs(full.sum(axis=0) - p.particle), initial=0.0)
    if rows > tol or cols > tol:
        raise TransferError(
            f"matriz completa não reproduz Q^h/Q^p (linhas {rows:.3e}, colunas {cols:.3e})"
        )
    return full


def solve(
    p: DonorAcceptorPartition,
    method: str,
    t_p: Sequence[float] | np.ndarray | None = None,
    **kwargs,
) -> list[TransferResult]:
    """Resolve pelo(s) método(s) pedido(s): proportional, quadratic ou both."""
    if method not in ("proportional", "quadratic", "both"):
        raise TransferError(f"método desconhecido: {method!r}")
    mismatch_tol = kwargs.get("mismatch_tol", 1e-6)
    out: list[TransferResult] = []
    if method in ("proportional", "both"):
        out.append(solve_proportional(p, mismatch_tol=mismatch_tol))
    if method in ("quadratic", "both"):
        out.append(solve_quadratic(p, t_p, **kwargs))
    return out
