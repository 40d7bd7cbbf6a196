"""Raios de van der Waals (Bondi) e símbolos de elementos.

Fonte: A. Bondi, "van der Waals Volumes and Radii", J. Phys. Chem. 68 (1964)
441-451, Tabela I (valores em Angstrom, transcritos abaixo). A tabela
armazenada é convertida para Bohr na carga do módulo.
"""

from __future__ import annotations

from ..cube_io.models import BOHR_IN_ANGSTROM

SYMBOLS: dict[int, str] = {
    1: "H", 2: "He", 3: "Li", 4: "Be", 5: "B", 6: "C", 7: "N", 8: "O", 9: "F", 10: "Ne",
    11: "Na", 12: "Mg", 13: "Al", 14: "Si", 15: "P", 16: "S", 17: "Cl", 18: "Ar",
    19: "K", 20: "Ca", 21: "Sc", 22: "Ti", 23: "V", 24: "Cr", 25: "Mn", 26: "Fe",
    27: "Co", 28: "Ni", 29: "Cu", 30: "Zn", 31: "Ga", 32: "Ge", 33: "As", 34: "Se",
    35: "Br", 36: "Kr", 37: "Rb", 38: "Sr", 39: "Y", 40: "Zr", 41: "Nb", 42: "Mo",
    43: "Tc", 44: "Ru", 45: "Rh", 46: "Pd", 47: "Ag", 48: "Cd", 49: "In", 50: "Sn",
    51: "Sb", 52: "Te", 53: "I", 54: "Xe", 55: "Cs", 56: "Ba", 57: "La", 72: "Hf",
    73: "Ta", 74: "W", 75: "Re", 76: "Os", 77: "Ir", 78: "Pt", 79: "Au", 80: "Hg",
    81: "Tl", 82: "Pb", 83: "Bi", 92: "U",
}  # fmt: skip

ATOMIC_NUMBERS: dict[str, int] = {sym.lower(): z for z, sym in SYMBOLS.items()}

# Bondi (1964), Angstrom
_BONDI_ANGSTROM: dict[int, float] = {
    1: 1.20, 2: 1.40, 3: 1.82, 6: 1.70, 7: 1.55, 8: 1.52, 9: 1.47, 10: 1.54,
    11: 2.27, 12: 1.73, 14: 2.10, 15: 1.80, 16: 1.80, 17: 1.75, 18: 1.88,
    19: 2.75, 28: 1.63, 29: 1.40, 30: 1.39, 31: 1.87, 33: 1.85, 34: 1.90,
    35: 1.85, 36: 2.02, 46: 1.63, 47: 1.72, 48: 1.58, 49: 1.93, 50: 2.17,
    52: 2.06, 53: 1.98, 54: 2.16, 78: 1.72, 79: 1.66, 80: 1.55, 81: 1.96,
    82: 2.02, 92: 1.86,
}  # fmt: skip

BONDI_RADII_BOHR: dict[int, float] = {
    z: r / BOHR_IN_ANGSTROM for z, r in _BONDI_ANGSTROM.items()
}


def symbol(atomic_number: int) -> str:
    return SYMBOLS.get(atomic_number, str(atomic_number))


def element_number(key: str | int) -> int | None:
    """Aceita símbolo ("C", "cu") ou número atômico ("6", 6)."""
    if isinstance(key, int):
        return key
    text = key.strip()
    if text.isdigit():
        return int(text)
    return ATOMIC_NUMBERS.get(text.lower())


def bondi_radius(atomic_number: int) -> float | None:
    return BONDI_RADII_BOHR.get(atomic_number)
