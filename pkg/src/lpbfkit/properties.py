"""Thermophysical property estimation behind a pluggable provider interface.

Two providers stand in for a commercial CALPHAD engine: ``alloy-table``
returns reference values stored with the bundled alloy records, and
``mixture-rule`` builds crude mass-fraction-weighted estimates from bundled
elemental data. Laser absorptivity comes from a truncated emissivity series
driven by electrical resistivity (emissivity is used directly as
absorptivity at the laser wavelength, per Kirchhoff's law).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import (
    AlloyNotFound,
    ElementDataMissing,
    NonPositiveInput,
    ResultOutOfUnitInterval,
    TransitionsOutOfRange,
)
from .materials import Composition, find_record_for_composition, lookup_alloy

PROVIDER_KINDS = ("alloy-table", "mixture-rule")

# CALPHAD database tags kept as metadata only; no solver behavior depends on them.
DATABASE_TAGS = {"Fe": "TCFE14", "Ni": "TCNI12", "Al": "TCAL9", "Ti": "TCTI6"}
PURE_TAG = "PURE5"
HEA_TAG = "TCHEA7"


class SeriesValidityWarning(UserWarning):
    """The resistivity/wavelength ratio left the emissivity series' comfort zone."""


@dataclass(frozen=True)
class ProviderConfig:
    """Property-provider settings; defaults match the stock sweep window and
    a 1070 nm near-infrared fiber laser."""

    provider_kind: str = "alloy-table"
    t_min: float = 500.0                     # K, sweep floor
    t_max: float = 3500.0                    # K, sweep ceiling
    evaluation_temperature: float = 298.15   # K
    laser_wavelength: float = 1.070e-6       # m
    solidus_threshold: float = 0.01          # liquid fraction marking first melt
    liquidus_threshold: float = 0.99         # liquid fraction marking full melt

    def __post_init__(self):
        if self.provider_kind not in PROVIDER_KINDS:
            raise NonPositiveInput(f"unknown provider kind '{self.provider_kind}'")
        if not self.t_min < self.t_max:
            raise NonPositiveInput("t_min must be below t_max")
        if self.laser_wavelength <= 0:
            raise NonPositiveInput("laser wavelength must be positive")
        if not 0.0 < self.solidus_threshold < self.liquidus_threshold < 1.0:
            raise NonPositiveInput("liquid-fraction thresholds must satisfy 0 < sol < liq < 1")


@dataclass(frozen=True)
class PhaseTransitions:
    t_solidus: float   # K
    t_liquidus: float  # K
    t_melting: float   # K, midpoint of solidus and liquidus

    def __post_init__(self):
        if self.t_solidus > self.t_liquidus:
            raise NonPositiveInput("solidus above liquidus")
        if self.t_melting != (self.t_solidus + self.t_liquidus) / 2.0:
            raise NonPositiveInput("melting temperature must be the solidus/liquidus midpoint")

    @classmethod
    def from_bounds(cls, t_solidus: float, t_liquidus: float) -> "PhaseTransitions":
        return cls(t_solidus, t_liquidus, (t_solidus + t_liquidus) / 2.0)


@dataclass(frozen=True)
class Material:
    """Compiled thermophysical record consumed by the melt-pool solver."""

    name: str
    composition: Composition
    thermal_conductivity: float      # W/(m K)
    density: float                   # kg/m^3
    specific_heat: float             # J/(kg K)
    electrical_resistivity: float    # Ohm m
    absorptivity: float              # dimensionless, (0, 1)
    transitions: PhaseTransitions
    evaluation_temperature: float    # K

    def __post_init__(self):
        for label, value in (
            ("thermal_conductivity", self.thermal_conductivity),
            ("density", self.density),
            ("specific_heat", self.specific_heat),
            ("electrical_resistivity", self.electrical_resistivity),
        ):
            if value <= 0:
                raise NonPositiveInput(f"{label} must be positive, got {value}")
        if not 0.0 < self.absorptivity < 1.0:
            raise ResultOutOfUnitInterval(f"absorptivity {self.absorptivity} outside (0, 1)")

    def to_document(self, provider_kind: str, database_tag: str) -> dict:
        return {
            "schema_version": 1,
            "kind": "material",
            "name": self.name,
            "composition": self.composition.to_dict(),
            "thermal_conductivity_w_mk": self.thermal_conductivity,
            "density_kg_m3": self.density,
            "specific_heat_j_kgk": self.specific_heat,
            "electrical_resistivity_ohm_m": self.electrical_resistivity,
            "absorptivity": self.absorptivity,
            "transitions": {
                "solidus_k": self.transitions.t_solidus,
                "liquidus_k": self.transitions.t_liquidus,
                "melting_k": self.transitions.t_melting,
            },
            "evaluation_temperature_k": self.evaluation_temperature,
            "provider_kind": provider_kind,
            "database_tag": database_tag,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "Material":
        tr = doc["transitions"]
        return cls(
            name=doc["name"],
            composition=Composition(dict(doc["composition"])),
            thermal_conductivity=doc["thermal_conductivity_w_mk"],
            density=doc["density_kg_m3"],
            specific_heat=doc["specific_heat_j_kgk"],
            electrical_resistivity=doc["electrical_resistivity_ohm_m"],
            absorptivity=doc["absorptivity"],
            transitions=PhaseTransitions(tr["solidus_k"], tr["liquidus_k"], tr["melting_k"]),
            evaluation_temperature=doc["evaluation_temperature_k"],
        )


@lru_cache(maxsize=1)
def element_table() -> dict[str, dict]:
    raw = json.loads(resources.files("lpbfkit.data").joinpath("elements.json").read_text())
    return {entry["symbol"]: entry for entry in raw["elements"]}


def select_database_tag(composition: Composition) -> str:
    """Metadata tag of the CALPHAD database a commercial solver would pick.

    Informational only. Nickel-rich compositions map to the nickel database;
    otherwise the dominant element decides, pure elements and near-equiatomic
    multi-component mixes get their own tags.
    """
    fractions = composition.elements
    if fractions.get("Ni", 0.0) >= 0.30:
        return DATABASE_TAGS["Ni"]
    dominant = composition.dominant_element()
    if dominant in ("Fe", "Al", "Ti"):
        return DATABASE_TAGS[dominant]
    if len(fractions) == 1:
        return PURE_TAG
    if len(fractions) >= 4 and all(f >= 0.05 for f in fractions.values()) \
            and max(fractions.values()) <= 0.5:
        return HEA_TAG
    return DATABASE_TAGS.get(dominant, PURE_TAG)


def _element_data(composition: Composition) -> dict[str, dict]:
    table = element_table()
    data = {}
    for symbol in composition.elements:
        if symbol not in table:
            raise ElementDataMissing(symbol)
        data[symbol] = table[symbol]
    return data


def _stored_properties(composition: Composition):
    record = find_record_for_composition(composition)
    if record is None:
        raise AlloyNotFound("<composition not in bundled table>", [])
    if not record.properties:
        raise AlloyNotFound(record.name, [])
    return record.properties


def estimate_phase_transitions(composition: Composition, config: ProviderConfig) -> PhaseTransitions:
    """Solidus/liquidus/melting temperatures for a composition.

    The alloy-table provider returns the stored bounds. The mixture-rule
    provider sweeps temperature in 1 K steps and tracks a surrogate liquid
    fraction: each element counts as molten at or above its elemental
    melting point, weighted by mass fraction. Solidus is the first sweep
    temperature where the fraction exceeds the solidus threshold, liquidus
    the first above the liquidus threshold.
    """
    if config.provider_kind == "alloy-table":
        stored = _stored_properties(composition)
        return PhaseTransitions.from_bounds(stored["solidus_k"], stored["liquidus_k"])

    data = _element_data(composition)
    melting_points = {s: data[s]["melting_point_k"] for s in composition.elements}
    t_solidus = None
    t_liquidus = None
    t = config.t_min
    while t <= config.t_max:
        liquid_fraction = sum(
            f for s, f in composition.elements.items() if t >= melting_points[s]
        )
        if t_solidus is None and liquid_fraction > config.solidus_threshold:
            t_solidus = t
        if liquid_fraction > config.liquidus_threshold:
            t_liquidus = t
            break
        t += 1.0
    if t_solidus is None or t_liquidus is None:
        raise TransitionsOutOfRange(
            f"liquid fraction does not cross thresholds within [{config.t_min}, {config.t_max}] K"
        )
    return PhaseTransitions.from_bounds(t_solidus, t_liquidus)


def estimate_transport_properties(
    composition: Composition, config: ProviderConfig
) -> tuple[float, float, float, float]:
    """(density, specific heat, thermal conductivity, electrical resistivity).

    The mixture-rule provider takes mass-fraction-weighted linear
    combinations of bundled elemental values. That is a documented crudeness:
    real alloy conductivity and resistivity are not linear in composition.
    """
    if config.provider_kind == "alloy-table":
        stored = _stored_properties(composition)
        return (
            stored["density_kg_m3"],
            stored["specific_heat_j_kgk"],
            stored["thermal_conductivity_w_mk"],
            stored["electrical_resistivity_ohm_m"],
        )

    data = _element_data(composition)
    def mix(key: str) -> float:
        return sum(f * data[s][key] for s, f in composition.elements.items())

    return (
        mix("density_kg_m3"),
        mix("specific_heat_j_kgk"),
        mix("thermal_conductivity_w_mk"),
        mix("resistivity_ohm_m"),
    )


# The series loses accuracy once the resistivity/wavelength ratio grows large.
SERIES_VALIDITY_LIMIT = 5.0


def absorptivity_bramson(electrical_resistivity: float, wavelength: float) -> float:
    """Laser absorptivity from the three-term normal-emissivity series.

    Inputs are SI (Ohm m and m); internally both convert to centimeter-based
    units, the convention the series coefficients assume. Raises
    ``ResultOutOfUnitInterval`` if the truncated series leaves (0, 1), and
    warns once the ratio exceeds the series validity limit.
    """
    if electrical_resistivity <= 0 or wavelength <= 0:
        raise NonPositiveInput("resistivity and wavelength must be positive")
    resistivity_ohm_cm = electrical_resistivity * 100.0
    wavelength_cm = wavelength * 100.0
    x = resistivity_ohm_cm / wavelength_cm
    if x > SERIES_VALIDITY_LIMIT:
        warnings.warn(
            f"resistivity/wavelength ratio {x:.3g} exceeds {SERIES_VALIDITY_LIMIT}; "
            "series truncation error grows",
            SeriesValidityWarning,
            stacklevel=2,
        )
    value = 0.365 * math.sqrt(x) - 0.0667 * x + 0.006 * x ** 1.5
    if not 0.0 < value < 1.0:
        raise ResultOutOfUnitInterval(
            f"absorptivity {value:.4g} outside (0, 1) for resistivity "
            f"{electrical_resistivity:.3g} Ohm m at {wavelength:.3g} m"
        )
    return value


def build_material(
    composition: Composition, config: ProviderConfig, name: str | None = None
) -> Material:
    """Run the full estimation chain and assemble a Material record."""
    transitions = estimate_phase_transitions(composition, config)
    density, specific_heat, conductivity, resistivity = estimate_transport_properties(
        composition, config
    )
    absorptivity = absorptivity_bramson(resistivity, config.laser_wavelength)
    if name is None:
        record = find_record_for_composition(composition)
        name = record.name if record else "custom alloy"
    return Material(
        name=name,
        composition=composition,
        thermal_conductivity=conductivity,
        density=density,
        specific_heat=specific_heat,
        electrical_resistivity=resistivity,
        absorptivity=absorptivity,
        transitions=transitions,
        evaluation_temperature=config.evaluation_temperature,
    )


def material_for_alloy(name: str, config: ProviderConfig | None = None) -> Material:
    """Convenience: look up a bundled alloy and compile its material record."""
    record = lookup_alloy(name)
    config = config or ProviderConfig()
    return build_material(record.composition, config, name=record.name)


def compile_material(composition_ref, config: ProviderConfig | None = None):
    """Compile a material document from a stored composition document.

    Loads the composition from the workspace, reuses a stored phase-transition
    document with the same filename when one exists (computing transitions
    inline otherwise), runs the estimators, writes the material document into
    the ``materials`` subfolder, and returns its reference.
    """
    from . import workspace as ws
    from .errors import DocumentNotFound

    config = config or ProviderConfig()
    comp_doc = ws.load_document(composition_ref)
    composition = Composition(dict(comp_doc["elements"]))
    name = comp_doc.get("name")
    if name is None:
        record = find_record_for_composition(composition)
        name = record.name if record else "custom alloy"

    transitions_ref = ws.DocumentRef(
        composition_ref.workspace, "phase_transition_temperatures", composition_ref.filename
    )
    try:
        tr_doc = ws.load_document(transitions_ref)
        transitions = PhaseTransitions(
            tr_doc["solidus_k"], tr_doc["liquidus_k"], tr_doc["melting_k"]
        )
    except DocumentNotFound:
        transitions = estimate_phase_transitions(composition, config)

    density, specific_heat, conductivity, resistivity = estimate_transport_properties(
        composition, config
    )
    material = Material(
        name=name,
        composition=composition,
        thermal_conductivity=conductivity,
        density=density,
        specific_heat=specific_heat,
        electrical_resistivity=resistivity,
        absorptivity=absorptivity_bramson(resistivity, config.laser_wavelength),
        transitions=transitions,
        evaluation_temperature=config.evaluation_temperature,
    )
    doc = material.to_document(config.provider_kind, select_database_tag(composition))
    material_ref = ws.DocumentRef(composition_ref.workspace, "materials", composition_ref.filename)
    ws.save_document(material_ref, doc)
    return material_ref
