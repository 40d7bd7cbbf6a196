from __future__ import annotations

from dataclasses import dataclass, field

# tab10
DEFAULT_PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class DiagramOptions:
    width: float = 640
    height: float = 420
    gap: float = 12
    margin: float = 24
    bar_height: float = 18
    # percentual do total abaixo do qual a fita não é desenhada
    epsilon: float = 0.1
    title: str = ""

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise DiagramError("dimensões do canvas devem ser positivas")
        if self.gap < 0 or self.margin < 0 or self.epsilon < 0:
            raise DiagramError("gap, margem e epsilon não podem ser negativos")
        if self.height <= 2 * self.margin + 2 * self.bar_height + 40:
            raise DiagramError(f"altura {self.height} insuficiente para as barras")


@dataclass(frozen=True)
class Bar:
    index: int
    name: str
    color: str
    x: float
    y: float
    width: float
    height: float
    value: float
    percent: float

    @property
    def x1(self) -> float:
        return self.x + self.width


@dataclass(frozen=True)
class Ribbon:
    source: int
    target: int
    value: float
    percent: float
    bottom: tuple[float, float]
    top: tuple[float, float]
    y_bottom: float
    y_top: float
    color: str
    drawn: bool = True

    @property
    def local(self) -> bool:
        return self.source == self.target

    @property
    def width(self) -> float:
        return self.bottom[1] - self.bottom[0]

    def path(self) -> str:
        (b0, b1), (t0, t1) = self.bottom, self.top
        yb, yt = self.y_bottom, self.y_top
        ym = (yb + yt) / 2.0
        f = "{:.2f}".format
        return (
            f"M{f(b0)},{f(yb)} C{f(b0)},{f(ym)} {f(t0)},{f(ym)} {f(t0)},{f(yt)} "
            f"L{f(t1)},{f(yt)} C{f(t1)},{f(ym)} {f(b1)},{f(ym)} {f(b1)},{f(yb)} Z"
        )


@dataclass(frozen=True)
class DiagramSpec:
    """Diagrama de transição: buraco embaixo, partícula em cima, fitas ∝ Q̃_ij."""

    options: DiagramOptions
    names: tuple[str, ...]
    colors: tuple[str, ...]
    bottom: tuple[Bar, ...]
    top: tuple[Bar, ...]
    connectors: tuple[Ribbon, ...]
    total: float
    caption: str = ""

    @property
    def drawn(self) -> list[Ribbon]:
        return [r for r in self.connectors if r.drawn]

    @property
    def suppressed(self) -> list[Ribbon]:
        return [r for r in self.connectors if not r.drawn]


@dataclass(frozen=True)
class BarChartSpec:
    options: DiagramOptions
    names: tuple[str, ...]
    colors: tuple[str, ...]
    hole: tuple[Bar, ...]
    particle: tuple[Bar, ...]
    baseline: float
    ticks: tuple[tuple[float, str], ...] = field(default_factory=tuple)
