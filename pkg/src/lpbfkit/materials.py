"""Composition parsing, normalization, and the bundled known-alloy database.

Compositions are maps of element symbol to mass fraction. Parsing
normalizes arbitrary positive weights (percentages, grams, ratios) so that
fractions sum to one; everything downstream works in mass fractions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import (
    AlloyNotFound,
    EmptyComposition,
    NonPositiveFraction,
    UnknownElement,
)

# All 118 IUPAC element symbols, H through Og.
ELEMENT_SYMBOLS = frozenset((
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne",
    "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar", "K", "Ca",
    "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr",
    "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn",
    "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb",
    "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg",
    "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th",
    "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm",
    "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds",
    "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
))

# Sum-to-one tolerance for an already-normalized composition.
NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class Composition:
    """Normalized element -> mass fraction map.

    Invariants: every key is a valid element symbol, every fraction lies in
    (0, 1], and the fractions sum to one within ``NORMALIZATION_TOL``.
    """

    elements: dict[str, float]

    def __post_init__(self):
        if not self.elements:
            raise EmptyComposition("composition has no elements")
        for symbol, fraction in self.elements.items():
            if symbol not in ELEMENT_SYMBOLS:
                raise UnknownElement(symbol)
            if not (0.0 < fraction <= 1.0):
                raise NonPositiveFraction(symbol, fraction)
        total = sum(self.elements.values())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NonPositiveFraction("*", total)
        # Deterministic key order for serialization and iteration.
        object.__setattr__(self, "elements", dict(sorted(self.elements.items())))

    def dominant_element(self) -> str:
        """Element with the largest mass fraction (alphabetical tie-break)."""
        return max(sorted(self.elements), key=lambda s: self.elements[s])

    def to_dict(self) -> dict[str, float]:
        return dict(self.elements)


def parse_composition(spec: dict[str, float]) -> Composition:
    """Normalize a map of element symbol -> positive weight into mass fractions.

    Accepts fractions, percentages, or any positive weights; values are
    divided by their sum. Raises ``EmptyComposition``, ``UnknownElement``,
    or ``NonPositiveFraction``.
    """
    if not spec:
        raise EmptyComposition("composition has no elements")
    for symbol, value in spec.items():
        if symbol not in ELEMENT_SYMBOLS:
            raise UnknownElement(symbol)
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise NonPositiveFraction(symbol, value) from None
        if not math.isfinite(value) or value <= 0.0:
            raise NonPositiveFraction(symbol, value)
    total = sum(float(v) for v in spec.values())
    return Composition({symbol: float(value) / total for symbol, value in spec.items()})


@dataclass(frozen=True)
class AlloyRecord:
    """One bundled alloy: canonical name, informal aliases, composition, and
    reference property values used by the alloy-table provider."""

    name: str
    aliases: tuple[str, ...]
    composition: Composition
    properties: dict[str, float] | None = None
    source_tag: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "aliases": list(self.aliases),
            "composition": self.composition.to_dict(),
            "properties": dict(self.properties) if self.properties else None,
            "source_tag": self.source_tag,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AlloyRecord":
        return cls(
            name=data["name"],
            aliases=tuple(data.get("aliases", ())),
            composition=Composition(dict(data["composition"])),
            properties=dict(data["properties"]) if data.get("properties") else None,
            source_tag=data.get("source_tag", ""),
        )


def _fold(name: str) -> str:
    """Case-insensitive match key with whitespace, hyphens, and underscores folded out."""
    return "".join(c for c in name.lower() if c not in " \t-_")


@lru_cache(maxsize=1)
def _alloy_database() -> dict[str, AlloyRecord]:
    raw = json.loads(resources.files("lpbfkit.data").joinpath("alloys.json").read_text())
    records = [AlloyRecord.from_dict(entry) for entry in raw["alloys"]]
    return {record.name: record for record in records}


@lru_cache(maxsize=1)
def _match_table() -> dict[str, str]:
    table: dict[str, str] = {}
    for record in _alloy_database().values():
        table[_fold(record.name)] = record.name
        for alias in record.aliases:
            table[_fold(alias)] = record.name
    return table


def _edit_distance(a: str, b: str) -> int:
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


def lookup_alloy(name: str) -> AlloyRecord:
    """Find a bundled alloy by canonical name or alias, case-insensitively.

    Raises ``AlloyNotFound`` carrying the three closest names by edit distance.
    """
    key = _fold(name)
    match = _match_table().get(key)
    if match is not None:
        return _alloy_database()[match]
    distances: dict[str, int] = {}
    for folded, canonical in _match_table().items():
        d = _edit_distance(key, folded)
        if canonical not in distances or d < distances[canonical]:
            distances[canonical] = d
    ranked = sorted(distances, key=lambda n: (distances[n], n))
    raise AlloyNotFound(name, ranked[:3])


def list_known_alloys() -> list[str]:
    """Sorted canonical names of every bundled alloy."""
    return sorted(_alloy_database())


def find_record_for_composition(composition: Composition, tol: float = 1e-6) -> AlloyRecord | None:
    """Bundled record whose composition matches element-for-element, or None."""
    for record in _alloy_database().values():
        ref = record.composition.elements
        if ref.keys() != composition.elements.keys():
            continue
        if all(abs(ref[s] - composition.elements[s]) <= tol for s in ref):
            return record
    return None
