import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

from flask import current_app, has_app_context

T = TypeVar("T")

# Tamanho fixo dos blocos de voxels. Nunca depende do número de workers: a
# redução é feita na ordem dos blocos, então o resultado é idêntico para
# qualquer NTX_THREADS.
CHUNK_VOXELS = 1 << 16


def resolve_workers(workers: int | None = None) -> int:
    """Número efetivo de workers.

    Ordem: argumento explícito > app.config["THREADS"] (com app context) >
    variável NTX_THREADS > os.cpu_count().
    """
    if workers is None or workers <= 0:
        configured = 0
        if has_app_context():
            configured = int(current_app.config.get("THREADS") or 0)
        else:
            raw = os.environ.get("NTX_THREADS", "").strip()
            configured = int(raw) if raw.isdigit() else 0
        workers = configured or (os.cpu_count() or 1)
    return max(1, int(workers))


def voxel_chunks(n_voxels: int, chunk: int = CHUNK_VOXELS) -> list[tuple[int, int]]:
    return [(start, min(start + chunk, n_voxels)) for start in range(0, n_voxels, chunk)]


def map_ordered(
    func: Callable[[tuple[int, int]], T],
    chunks: Sequence[tuple[int, int]],
    workers: int | None = None,
) -> list[T]:
    """Aplica func a cada bloco e devolve os resultados na ordem dos blocos."""
    n = resolve_workers(workers)
    if n == 1 or len(chunks) <= 1:
        return [func(c) for c in chunks]
    logger = logging.getLogger("ntx.parallel")
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("Mapping %s chunks over %s workers", len(chunks), n)
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, chunks))
