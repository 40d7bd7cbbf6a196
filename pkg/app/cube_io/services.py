"""Leitura e escrita de arquivos cube (Gaussian).

Formato: 2 linhas de comentário; linha 3 = número de átomos e origem; linhas
4-6 = contagem e vetor de cada eixo; uma linha por átomo; linha DSET opcional
(quando o número de átomos é negativo); dados com z variando mais rápido.
Contagem negativa num eixo indica vetor em Angstrom (convertido para Bohr).
"""

from __future__ import annotations

import io
import logging
from os import PathLike
from pathlib import Path
from typing import Sequence

import numpy as np

from .models import BOHR_IN_ANGSTROM, CubeAtomRecord, CubeFormatError, GridField

logger = logging.getLogger("ntx.cube")

# 17 algarismos significativos: parse(write(f)) reproduz cada float64 exatamente
_FLOAT = "{: .16E}"
_VALUES_PER_LINE = 6


def _tokens(lines: list[str], idx: int, source: str, minimum: int) -> list[str]:
    if idx >= len(lines):
        raise CubeFormatError("arquivo truncado no cabeçalho", source=source, line=idx + 1)
    toks = lines[idx].split()
    if len(toks) < minimum:
        raise CubeFormatError(
            f"esperados {minimum} campos, encontrados {len(toks)}", source=source, line=idx + 1
        )
    return toks


def _as_int(tok: str, source: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise CubeFormatError(f"inteiro inválido: {tok!r}", source=source, line=line) from None


def _as_floats(toks: Sequence[str], source: str, line: int) -> list[float]:
    try:
        return [float(t) for t in toks]
    except ValueError:
        bad = next(t for t in toks if not _is_float(t))
        raise CubeFormatError(f"valor não numérico: {bad!r}", source=source, line=line) from None


def _is_float(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def _read_data(lines: list[str], start: int, expected: int, source: str) -> np.ndarray:
    tokens = " ".join(lines[start:]).split()
    try:
        values = np.array(tokens, dtype=np.float64)
    except ValueError:
        # Caminho lento apenas para localizar o token inválido
        for offset, line in enumerate(lines[start:]):
            for tok in line.split():
                if not _is_float(tok):
                    raise CubeFormatError(
                        f"valor não numérico: {tok!r}", source=source, line=start + offset + 1
                    ) from None
        raise
    if values.size < expected:
        raise CubeFormatError(
            f"arquivo truncado: {values.size} de {expected} valores",
            source=source,
            line=len(lines),
        )
    if values.size > expected:
        raise CubeFormatError(
            f"{values.size} valores na seção de dados, esperados {expected}",
            source=source,
            line=len(lines),
        )
    return values


def parse_cube(
    text: bytes | str, source: str = "<cube>"
) -> tuple[GridField, list[CubeAtomRecord]]:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CubeFormatError(f"codificação inválida: {exc}", source=source) from None
    lines = text.splitlines()
    if len(lines) < 6:
        raise CubeFormatError("arquivo truncado no cabeçalho", source=source, line=len(lines))
    comments = (lines[0], lines[1])

    toks = _tokens(lines, 2, source, 4)
    natoms_raw = _as_int(toks[0], source, 3)
    origin = _as_floats(toks[1:4], source, 3)
    if len(toks) >= 5 and _as_int(toks[4], source, 3) != 1:
        raise CubeFormatError(
            "mais de um valor por voxel; cubes NTO carregam um único campo", source=source, line=3
        )
    natoms = abs(natoms_raw)
    if natoms == 0:
        raise CubeFormatError("cube sem átomos", source=source, line=3)

    counts: list[int] = []
    axes: list[list[float]] = []
    for axis in range(3):
        lineno = 4 + axis
        toks = _tokens(lines, 3 + axis, source, 4)
        n = _as_int(toks[0], source, lineno)
        vec = _as_floats(toks[1:4], source, lineno)
        if n == 0:
            raise CubeFormatError("contagem de voxels nula", source=source, line=lineno)
        if n < 0:
            # Convenção: contagem negativa => vetor do eixo em Angstrom
            vec = [v / BOHR_IN_ANGSTROM for v in vec]
        counts.append(abs(n))
        axes.append(vec)

    atoms: list[CubeAtomRecord] = []
    for a in range(natoms):
        idx = 6 + a
        toks = _tokens(lines, idx, source, 5)
        z = _as_int(toks[0], source, idx + 1)
        if z < 1:
            raise CubeFormatError(f"número atômico inválido: {z}", source=source, line=idx + 1)
        charge, x, y, zc = _as_floats(toks[1:5], source, idx + 1)
        atoms.append(CubeAtomRecord(atomic_number=z, nuclear_charge=charge, position=(x, y, zc)))

    data_start = 6 + natoms
    orbital_id: int | None = None
    if natoms_raw < 0:
        toks = _tokens(lines, data_start, source, 2)
        n_ids = _as_int(toks[0], source, data_start + 1)
        ids = [_as_int(t, source, data_start + 1) for t in toks[1:]]
        if n_ids != 1 or len(ids) != 1:
            raise CubeFormatError(
                f"linha DSET com {len(ids)} orbitais; cubes NTO carregam um único campo",
                source=source,
                line=data_start + 1,
            )
        orbital_id = ids[0]
        data_start += 1

    nx, ny, nz = counts
    values = _read_data(lines, data_start, nx * ny * nz, source)
    grid = GridField(
        origin=origin,
        counts=(nx, ny, nz),
        axes=axes,
        values=values,
        comments=comments,
        orbital_id=orbital_id,
    )
    logger.debug("Parsed %s: %s atoms, grid %s", source, natoms, grid.counts)
    return grid, atoms


def read_cube(path: str | PathLike[str]) -> tuple[GridField, list[CubeAtomRecord]]:
    p = Path(path)
    return parse_cube(p.read_bytes(), source=str(p))


def _fmt_row(values: Sequence[float]) -> str:
    return " ".join(_FLOAT.format(v) for v in values)


def write_cube(grid: GridField, atoms: Sequence[CubeAtomRecord]) -> bytes:
    if not atoms:
        raise ValueError("cube exige ao menos um átomo")
    out = io.StringIO()
    out.write(f"{grid.comments[0]}\n{grid.comments[1]}\n")
    natoms = -len(atoms) if grid.orbital_id is not None else len(atoms)
    out.write(f"{natoms:5d} {_fmt_row(grid.origin)}\n")
    for n, vec in zip(grid.counts, grid.axes):
        out.write(f"{n:5d} {_fmt_row(vec)}\n")
    for atom in atoms:
        out.write(
            f"{atom.atomic_number:5d} {_FLOAT.format(atom.nuclear_charge)} "
            f"{_fmt_row(atom.position)}\n"
        )
    if grid.orbital_id is not None:
        out.write(f"{1:5d}{grid.orbital_id:5d}\n")
    nz = grid.counts[2]
    rows = grid.values.reshape(-1, nz)
    # Uma coluna z por bloco, no máximo 6 valores por linha
    for row in rows:
        for start in range(0, nz, _VALUES_PER_LINE):
            out.write(_fmt_row(row[start : start + _VALUES_PER_LINE]))
            out.write("\n")
    return out.getvalue().encode("utf-8")


def save_cube(
    path: str | PathLike[str], grid: GridField, atoms: Sequence[CubeAtomRecord]
) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_bytes(write_cube(grid, atoms))
    return p
