from __future__ import annotations

import math
import random

import numpy as np
import pytest

import oracles
from lpbfkit.errors import (
    DocumentNotFound,
    ElementDataMissing,
    NonPositiveInput,
    ResultOutOfUnitInterval,
    TransitionsOutOfRange,
)
from lpbfkit.materials import lookup_alloy, parse_composition
from lpbfkit.properties import (
    Material,
    PhaseTransitions,
    ProviderConfig,
    SeriesValidityWarning,
    absorptivity_bramson,
    build_material,
    compile_material,
    element_table,
    estimate_phase_transitions,
    estimate_transport_properties,
    material_for_alloy,
    select_database_tag,
)
from lpbfkit import workspace as ws

MIXTURE = ProviderConfig(provider_kind="mixture-rule")
TABLE = ProviderConfig(provider_kind="alloy-table")


class TestDatabaseTag:
    def test_nickel_rule_wins(self):
        composition = parse_composition({"Ni": 0.35, "Cr": 0.30, "Fe": 0.35})
        assert select_database_tag(composition) == "TCNI12"

    def test_pure_element(self):
        assert select_database_tag(parse_composition({"W": 1.0})) == "PURE5"

    def test_dominant_iron(self):
        composition = parse_composition({"Fe": 0.70, "Cr": 0.18, "Ni": 0.12})
        assert select_database_tag(composition) == "TCFE14"

    def test_dominant_aluminum_and_titanium(self):
        assert select_database_tag(parse_composition({"Al": 0.9, "Si": 0.1})) == "TCAL9"
        assert select_database_tag(parse_composition({"Ti": 0.9, "V": 0.1})) == "TCTI6"

    def test_high_entropy_mix(self):
        composition = parse_composition({"Co": 0.25, "Cr": 0.25, "Fe": 0.25, "Mn": 0.25})
        assert select_database_tag(composition) == "TCHEA7"

    def test_fallback_without_dominant_tag(self):
        assert select_database_tag(parse_composition({"Cu": 0.9, "Sn": 0.1})) == "PURE5"


class TestPhaseTransitions:
    def test_single_element_mixture_collapses(self):
        transitions = estimate_phase_transitions(parse_composition({"Fe": 1.0}), MIXTURE)
        melting_point = element_table()["Fe"]["melting_point_k"]
        assert transitions.t_solidus == transitions.t_liquidus == melting_point
        assert transitions.t_melting == melting_point

    def test_alloy_table_stored_bounds(self):
        record = lookup_alloy("ss316l")
        transitions = estimate_phase_transitions(record.composition, TABLE)
        assert transitions.t_solidus == record.properties["solidus_k"]
        assert transitions.t_liquidus == record.properties["liquidus_k"]
        assert transitions.t_melting == (transitions.t_solidus + transitions.t_liquidus) / 2

    def test_tungsten_exceeds_lowered_ceiling(self):
        config = ProviderConfig(provider_kind="mixture-rule", t_max=3000.0)
        with pytest.raises(TransitionsOutOfRange):
            estimate_phase_transitions(parse_composition({"W": 1.0}), config)

    def test_tungsten_exceeds_default_ceiling_too(self):
        with pytest.raises(TransitionsOutOfRange):
            estimate_phase_transitions(parse_composition({"W": 1.0}), MIXTURE)

    def test_two_element_mixture_straddles_melting_points(self):
        transitions = estimate_phase_transitions(
            parse_composition({"Al": 0.5, "Ni": 0.5}), MIXTURE)
        assert transitions.t_solidus == pytest.approx(
            element_table()["Al"]["melting_point_k"], abs=1.0)
        assert transitions.t_liquidus == pytest.approx(
            element_table()["Ni"]["melting_point_k"], abs=1.0)

    def test_surrogate_curve_never_reaches_liquidus_for_refractory_tail(self):
        # 10% graphite keeps the surrogate liquid fraction at 0.9 until far
        # beyond the sweep ceiling.
        with pytest.raises(TransitionsOutOfRange):
            estimate_phase_transitions(parse_composition({"Fe": 0.9, "C": 0.1}), MIXTURE)

    def test_midpoint_identity_exact(self):
        transitions = PhaseTransitions.from_bounds(1500.0, 1653.0)
        assert transitions.t_melting == (1500.0 + 1653.0) / 2.0

    def test_element_data_missing(self):
        with pytest.raises(ElementDataMissing):
            estimate_phase_transitions(parse_composition({"U": 1.0}), MIXTURE)


class TestTransportProperties:
    def test_pure_copper_is_the_bundled_row(self):
        row = element_table()["Cu"]
        density, cp, k, resistivity = estimate_transport_properties(
            parse_composition({"Cu": 1.0}), MIXTURE)
        assert density == row["density_kg_m3"]
        assert cp == row["specific_heat_j_kgk"]
        assert k == row["thermal_conductivity_w_mk"]
        assert resistivity == row["resistivity_ohm_m"]

    def test_equal_mix_is_arithmetic_mean(self):
        cu, ni = element_table()["Cu"], element_table()["Ni"]
        density, cp, k, resistivity = estimate_transport_properties(
            parse_composition({"Cu": 0.5, "Ni": 0.5}), MIXTURE)
        assert density == pytest.approx((cu["density_kg_m3"] + ni["density_kg_m3"]) / 2)
        assert cp == pytest.approx((cu["specific_heat_j_kgk"] + ni["specific_heat_j_kgk"]) / 2)
        assert k == pytest.approx(
            (cu["thermal_conductivity_w_mk"] + ni["thermal_conductivity_w_mk"]) / 2)
        assert resistivity == pytest.approx(
            (cu["resistivity_ohm_m"] + ni["resistivity_ohm_m"]) / 2)

    def test_alloy_table_returns_stored_values(self):
        record = lookup_alloy("Stainless Steel 316L")
        density, cp, k, resistivity = estimate_transport_properties(
            record.composition, TABLE)
        assert density == record.properties["density_kg_m3"]
        assert cp == record.properties["specific_heat_j_kgk"]
        assert k == record.properties["thermal_conductivity_w_mk"]
        assert resistivity == record.properties["electrical_resistivity_ohm_m"]

    def test_mixture_is_linear_in_endpoints(self):
        rng = random.Random(3)
        fe, ni = element_table()["Fe"], element_table()["Ni"]
        for _ in range(25):
            alpha = rng.uniform(0.01, 0.99)
            density, cp, k, resistivity = estimate_transport_properties(
                parse_composition({"Fe": alpha, "Ni": 1.0 - alpha}), MIXTURE)
            assert density == pytest.approx(
                alpha * fe["density_kg_m3"] + (1 - alpha) * ni["density_kg_m3"], abs=1e-9)
            assert cp == pytest.approx(
                alpha * fe["specific_heat_j_kgk"] + (1 - alpha) * ni["specific_heat_j_kgk"],
                abs=1e-9)
            assert k == pytest.approx(
                alpha * fe["thermal_conductivity_w_mk"]
                + (1 - alpha) * ni["thermal_conductivity_w_mk"], abs=1e-9)
            assert resistivity == pytest.approx(
                alpha * fe["resistivity_ohm_m"] + (1 - alpha) * ni["resistivity_ohm_m"],
                abs=1e-9)


class TestAbsorptivity:
    def test_vanishes_with_resistivity(self):
        assert absorptivity_bramson(1e-12, 1.070e-6) < 1e-2

    def test_derived_reference_value(self):
        # Frozen from a separate term-by-term evaluation of the series.
        assert absorptivity_bramson(8.0e-7, 1.070e-6) == pytest.approx(0.2696, abs=1e-3)
        assert absorptivity_bramson(8.0e-7, 1.070e-6) == pytest.approx(
            oracles.emissivity_series(8.0e-7, 1.070e-6), rel=1e-12)

    def test_decreases_when_wavelength_doubles(self):
        assert absorptivity_bramson(8.0e-7, 2.14e-6) < absorptivity_bramson(8.0e-7, 1.07e-6)

    def test_matches_termwise_oracle_on_log_grid(self):
        import warnings

        # The top of the grid deliberately crosses the validity limit; the
        # warning is expected there and tested separately.
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SeriesValidityWarning)
            for resistivity in np.logspace(-9, -5, 60):
                expected = oracles.emissivity_series(float(resistivity), 1.070e-6)
                assert absorptivity_bramson(float(resistivity), 1.070e-6) == pytest.approx(
                    expected, rel=1e-12)

    def test_strictly_increasing_in_resistivity_below_unity_ratio(self):
        wavelength = 1.070e-6
        resistivities = np.linspace(1e-9, wavelength * 1.0, 200)
        values = [absorptivity_bramson(float(r), wavelength) for r in resistivities]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_unit_conversion_is_internal(self):
        # The cm-based ratio equals the SI ratio, so doubling both inputs
        # leaves the result unchanged.
        assert absorptivity_bramson(2e-7, 1.07e-6) == pytest.approx(
            absorptivity_bramson(4e-7, 2.14e-6), rel=1e-12)

    def test_warns_past_validity_limit(self):
        with pytest.warns(SeriesValidityWarning):
            absorptivity_bramson(1e-5, 1.070e-6)

    def test_non_positive_inputs(self):
        with pytest.raises(NonPositiveInput):
            absorptivity_bramson(0.0, 1.070e-6)
        with pytest.raises(NonPositiveInput):
            absorptivity_bramson(1e-6, -1.0)

    def test_out_of_unit_interval(self):
        with pytest.warns(SeriesValidityWarning):
            with pytest.raises(ResultOutOfUnitInterval):
                absorptivity_bramson(1e-3, 1.070e-6)


class TestBuildMaterial:
    def test_bundled_materials_satisfy_invariants(self):
        for name in ("ss316l", "inconel", "titanium", "copper", "tungsten"):
            material = material_for_alloy(name)
            assert material.thermal_conductivity > 0
            assert material.density > 0
            assert material.specific_heat > 0
            assert 0 < material.absorptivity < 1
            tr = material.transitions
            assert tr.t_solidus <= tr.t_liquidus
            assert tr.t_melting == (tr.t_solidus + tr.t_liquidus) / 2

    def test_random_mixture_materials_satisfy_invariants(self):
        # W and C melt above the default sweep ceiling; any other bundled
        # elements combine into a compilable material.
        rng = random.Random(19)
        symbols = [s for s in element_table() if s not in ("W", "C")]
        for _ in range(30):
            picked = rng.sample(symbols, rng.randint(1, 5))
            composition = parse_composition({s: rng.uniform(0.05, 1.0) for s in picked})
            material = build_material(composition, MIXTURE)
            assert 0 < material.absorptivity < 1
            assert material.transitions.t_solidus <= material.transitions.t_liquidus
            assert material.transitions.t_melting == (
                material.transitions.t_solidus + material.transitions.t_liquidus) / 2

    def test_material_document_round_trip(self):
        material = material_for_alloy("ss316l")
        doc = material.to_document("alloy-table", "TCFE14")
        assert Material.from_document(doc) == material


class TestCompileMaterial:
    def test_golden_ss316l_document(self, demo_workspace):
        comp_ref = ws.DocumentRef(demo_workspace, "compositions", "ss.json")
        record = lookup_alloy("ss316l")
        ws.save_document(comp_ref, {
            "kind": "composition",
            "name": record.name,
            "elements": record.composition.to_dict(),
        })
        material_ref = compile_material(comp_ref, TABLE)
        document = ws.load_document(material_ref)
        assert document == {
            "absorptivity": 0.32416360268591327,
            "composition": {"Cr": 0.17, "Fe": 0.675, "Mn": 0.01, "Mo": 0.025, "Ni": 0.12},
            "database_tag": "TCFE14",
            "density_kg_m3": 6950.0,
            "electrical_resistivity_ohm_m": 1.25e-06,
            "evaluation_temperature_k": 298.15,
            "kind": "material",
            "name": "Stainless Steel 316L",
            "provider_kind": "alloy-table",
            "schema_version": 1,
            "specific_heat_j_kgk": 790.0,
            "thermal_conductivity_w_mk": 28.5,
            "transitions": {"liquidus_k": 1723.0, "melting_k": 1690.5, "solidus_k": 1658.0},
        }

    def test_pure_iron_collapsed_transitions(self, demo_workspace):
        comp_ref = ws.DocumentRef(demo_workspace, "compositions", "fe.json")
        ws.save_document(comp_ref, {"kind": "composition", "elements": {"Fe": 1.0}})
        material_ref = compile_material(comp_ref, MIXTURE)
        document = ws.load_document(material_ref)
        tr = document["transitions"]
        assert tr["solidus_k"] == tr["liquidus_k"] == tr["melting_k"]

    def test_missing_composition_document(self, demo_workspace):
        missing = ws.DocumentRef(demo_workspace, "compositions", "nope.json")
        with pytest.raises(DocumentNotFound):
            compile_material(missing, TABLE)

    def test_reuses_stored_phase_transitions(self, demo_workspace):
        comp_ref = ws.DocumentRef(demo_workspace, "compositions", "fe.json")
        ws.save_document(comp_ref, {"kind": "composition", "elements": {"Fe": 1.0}})
        ws.save_document(
            ws.DocumentRef(demo_workspace, "phase_transition_temperatures", "fe.json"),
            {"kind": "phase_transitions", "solidus_k": 1700.0, "liquidus_k": 1800.0,
             "melting_k": 1750.0},
        )
        document = ws.load_document(compile_material(comp_ref, MIXTURE))
        assert document["transitions"] == {
            "solidus_k": 1700.0, "liquidus_k": 1800.0, "melting_k": 1750.0}
