from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

METHODS = ("proportional", "quadratic", "both")
SEGMENTATIONS = ("power", "gradient", "both")
FORMATS = ("csv", "json", "svg")


@dataclass
class RunConfig:
    """Parâmetros de uma execução (um par de cubes ou uma tabela de cargas)."""

    hole: Path | None = None
    particle: Path | None = None
    groups: Path | None = None
    method: str = "both"
    tp: tuple[float, ...] | None = None
    out: Path = Path("out")
    formats: tuple[str, ...] = FORMATS
    seg: str = "power"
    charges: Path | None = None
    name: str = ""
    colors: dict[str, str] = field(default_factory=dict)
    # diagrama; None => valores de app.config
    width: float | None = None
    height: float | None = None
    epsilon: float | None = None

    def __post_init__(self) -> None:
        for attr in ("hole", "particle", "groups", "charges"):
            value = getattr(self, attr)
            if value is not None and not isinstance(value, Path):
                setattr(self, attr, Path(value))
        self.out = Path(self.out)
        self.formats = tuple(self.formats)
        if not self.name:
            stem = self.charges or self.hole
            self.name = stem.stem if stem is not None else "run"

    @property
    def from_charges(self) -> bool:
        return self.charges is not None

    def validate(self, *, need_cubes: bool = True) -> list[str]:
        """Lista de problemas (vazia se válido). Não lê o conteúdo dos arquivos."""
        errors: list[str] = []
        if self.method not in METHODS:
            errors.append(f"--method inválido: {self.method!r} (use {', '.join(METHODS)})")
        if self.seg not in SEGMENTATIONS:
            errors.append(f"--seg inválido: {self.seg!r} (use {', '.join(SEGMENTATIONS)})")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad or not self.formats:
            errors.append(f"--format inválido: {','.join(bad) or '(vazio)'}")
        if self.from_charges:
            if not self.charges.is_file():
                errors.append(f"arquivo de cargas não encontrado: {self.charges}")
        elif need_cubes:
            for label, path in (
                ("--hole", self.hole),
                ("--particle", self.particle),
                ("--groups", self.groups),
            ):
                if path is None:
                    errors.append(f"{label} é obrigatório")
                elif not path.is_file():
                    errors.append(f"{label}: arquivo não encontrado: {path}")
        if self.tp is not None and any(v != v for v in self.tp):
            errors.append("--tp contém NaN")
        for label, value in (("--width", self.width), ("--height", self.height)):
            if value is not None and value <= 0:
                errors.append(f"{label} deve ser positivo")
        if self.epsilon is not None and self.epsilon < 0:
            errors.append("--epsilon não pode ser negativo")
        return errors

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], base: Path | None = None, **defaults):
        """Item de lote (JSON). Caminhos relativos são resolvidos contra `base`."""

        def path(key: str) -> Path | None:
            raw = data.get(key)
            if raw is None:
                return None
            p = Path(raw)
            return p if p.is_absolute() or base is None else base / p

        values = dict(defaults)
        for key in ("hole", "particle", "groups", "charges"):
            if key in data:
                values[key] = path(key)
        for key in ("method", "seg", "name"):
            if key in data:
                values[key] = str(data[key])
        for key in ("width", "height", "epsilon"):
            if key in data:
                values[key] = float(data[key])
        if "tp" in data:
            values["tp"] = parse_tp(data["tp"])
        if "formats" in data:
            values["formats"] = tuple(data["formats"])
        if "colors" in data:
            values["colors"] = dict(data["colors"])
        return cls(**values)


def parse_tp(raw: Any) -> tuple[float, ...] | None:
    """t_p como lista, texto "a,b,c" ou caminho para um JSON com a lista."""
    if raw is None or raw == "":
        return None
    if isinstance(raw, (list, tuple)):
        return tuple(float(v) for v in raw)
    text = str(raw).strip()
    candidate = Path(text)
    if candidate.suffix == ".json" or candidate.is_file():
        data = json.loads(candidate.read_text(encoding="utf-8"))
        if isinstance(data, dict):
            data = data.get("tp", data.get("preference"))
        return tuple(float(v) for v in data)
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())
