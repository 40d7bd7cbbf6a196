"""Serviços do módulo molecule: montagem de MoleculeSpec a partir dos átomos do
cube e do arquivo de subgrupos (JSON).

Formato aceito (ver docs/formats.md):

    {"subgroups": [{"name": "THIO", "atoms": [0, "1-4"], "color": "#1f77b4"}],
     "radii": {"elements": {"C": 1.7}, "atoms": {"3": 2.0}},
     "radius_unit": "angstrom"}

A forma curta {"G1": [0], "G2": [1]} também é aceita. O grupo "REST" (se
presente, pode ter lista vazia) absorve os átomos não listados.
"""

from __future__ import annotations

import json
import logging
import re
from os import PathLike
from pathlib import Path
from typing import Any, Mapping, Sequence

from ..cube_io.models import BOHR_IN_ANGSTROM, CubeAtomRecord
from .models import Atom, MoleculeError, MoleculeSpec, Subgroup
from .radii import bondi_radius, element_number, symbol

logger = logging.getLogger("ntx.molecule")

REST_GROUP = "REST"
_RANGE = re.compile(r"^\s*(\d+)\s*-\s*(\d+)\s*$")
_HEX_COLOR = re.compile(r"^#[0-9a-fA-F]{6}$")


def _expand_members(name: str, items: Sequence[Any]) -> list[int]:
    out: list[int] = []
    for item in items:
        if isinstance(item, bool):
            raise MoleculeError(f"{name}: índice inválido {item!r}")
        if isinstance(item, int):
            out.append(item)
            continue
        if isinstance(item, str):
            text = item.strip()
            if text.isdigit():
                out.append(int(text))
                continue
            match = _RANGE.match(text)
            if match:
                lo, hi = int(match.group(1)), int(match.group(2))
                if hi < lo:
                    raise MoleculeError(f"{name}: intervalo invertido {item!r}")
                out.extend(range(lo, hi + 1))
                continue
        raise MoleculeError(f"{name}: índice inválido {item!r}")
    if len(set(out)) != len(out):
        raise MoleculeError(f"{name}: átomo repetido no mesmo grupo")
    return out


def _normalize_config(config: Mapping[str, Any]) -> list[dict[str, Any]]:
    if "subgroups" in config:
        groups = config["subgroups"]
        if not isinstance(groups, list):
            raise MoleculeError("'subgroups' deve ser uma lista")
        out = []
        for g in groups:
            if not isinstance(g, Mapping) or "name" not in g:
                raise MoleculeError(f"subgrupo sem nome: {g!r}")
            out.append(dict(g))
        return out
    # forma curta: {"G1": [0], "G2": [1]}
    reserved = {"radii", "radius_unit"}
    return [{"name": k, "atoms": v} for k, v in config.items() if k not in reserved]


def parse_subgroup_config(text: str | bytes | Mapping[str, Any]) -> dict[str, Any]:
    if isinstance(text, Mapping):
        return dict(text)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MoleculeError(
            f"config de subgrupos inválida (linha {exc.lineno}): {exc.msg}"
        ) from None
    if not isinstance(data, dict):
        raise MoleculeError("config de subgrupos deve ser um objeto JSON")
    return data


def load_subgroup_config(path: str | PathLike[str]) -> dict[str, Any]:
    p = Path(path)
    try:
        return parse_subgroup_config(p.read_bytes())
    except MoleculeError as exc:
        raise MoleculeError(f"{p}: {exc}") from None


def _radius_scale(config: Mapping[str, Any]) -> float:
    unit = str(config.get("radius_unit", "angstrom")).lower()
    if unit in ("angstrom", "a", "å"):
        return 1.0 / BOHR_IN_ANGSTROM
    if unit == "bohr":
        return 1.0
    raise MoleculeError(f"radius_unit desconhecida: {unit!r}")


def _radius_value(value: Any, where: str, scale: float) -> float:
    try:
        radius = float(value)
    except (TypeError, ValueError):
        raise MoleculeError(f"raio inválido em {where}: {value!r}") from None
    if not radius > 0 or radius == float("inf"):
        raise MoleculeError(f"raio inválido em {where}: {value!r}")
    return radius * scale


def _radius_overrides(config: Mapping[str, Any]) -> tuple[dict[int, float], dict[int, float]]:
    radii = config.get("radii") or {}
    if not isinstance(radii, Mapping):
        raise MoleculeError("'radii' deve ser um objeto")
    scale = _radius_scale(config)
    by_element: dict[int, float] = {}
    for key, value in (radii.get("elements") or {}).items():
        z = element_number(key)
        if z is None:
            raise MoleculeError(f"elemento desconhecido em radii.elements: {key!r}")
        by_element[z] = _radius_value(value, f"radii.elements.{key}", scale)
    by_atom: dict[int, float] = {}
    for key, value in (radii.get("atoms") or {}).items():
        try:
            index = int(key)
        except (TypeError, ValueError):
            raise MoleculeError(f"índice inválido em radii.atoms: {key!r}") from None
        by_atom[index] = _radius_value(value, f"radii.atoms.{key}", scale)
    return by_element, by_atom


def build_molecule(
    atoms: Sequence[CubeAtomRecord], subgroup_config: str | bytes | Mapping[str, Any]
) -> MoleculeSpec:
    config = parse_subgroup_config(subgroup_config)
    by_element, by_atom = _radius_overrides(config)
    n = len(atoms)
    for idx in by_atom:
        if not 0 <= idx < n:
            raise MoleculeError(f"radii.atoms: átomo {idx} fora do intervalo 0..{n - 1}")

    mol_atoms: list[Atom] = []
    for i, rec in enumerate(atoms):
        z = rec.atomic_number
        radius = by_atom.get(i, by_element.get(z, bondi_radius(z)))
        if radius is None:
            raise MoleculeError(
                f"átomo {i}: elemento {symbol(z)} sem raio tabelado; informe radii.elements"
            )
        mol_atoms.append(Atom(index=i, element=z, position=rec.position, radius=radius))

    groups: list[Subgroup] = []
    rest: dict[str, Any] | None = None
    covered: set[int] = set()
    for raw in _normalize_config(config):
        name = str(raw["name"]).strip()
        color = raw.get("color")
        if color is not None and not _HEX_COLOR.match(str(color)):
            raise MoleculeError(f"{name}: cor inválida {color!r} (use #rrggbb)")
        if name == REST_GROUP:
            rest = {"name": name, "color": color, "atoms": raw.get("atoms") or []}
            continue
        members = _expand_members(name, raw.get("atoms") or [])
        overlap = covered.intersection(members)
        if overlap:
            raise MoleculeError(f"{name}: átomos já atribuídos a outro grupo: {sorted(overlap)}")
        covered.update(members)
        groups.append(Subgroup(name=name, members=tuple(members), color=color))

    if rest is not None:
        explicit = _expand_members(REST_GROUP, rest["atoms"])
        overlap = covered.intersection(explicit)
        if overlap:
            raise MoleculeError(f"REST: átomos já atribuídos a outro grupo: {sorted(overlap)}")
        absorbed = sorted(set(range(n)) - covered - set(explicit))
        members = sorted(set(explicit) | set(absorbed))
        if absorbed:
            logger.warning("Group REST absorbs %s unlisted atoms", len(absorbed))
        if members:
            groups.append(Subgroup(name=REST_GROUP, members=tuple(members), color=rest["color"]))

    spec = MoleculeSpec(atoms=tuple(mol_atoms), subgroups=tuple(groups))
    logger.debug("Built molecule: %s atoms, %s subgroups", spec.n_atoms, spec.n_subgroups)
    return spec


def subgroup_of(m: MoleculeSpec, atom_index: int) -> int:
    if not 0 <= atom_index < m.n_atoms:
        raise MoleculeError(f"átomo {atom_index} fora do intervalo 0..{m.n_atoms - 1}")
    return int(m.atom_subgroups[atom_index])
