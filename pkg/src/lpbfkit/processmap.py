"""Lack-of-fusion process maps over a power-velocity grid.

A grid cell is classified by comparing hatch spacing and layer height
against the melt-pool width and depth: the squared ratios must sum to at
most one for neighboring tracks and layers to fuse. Three layer heights are
evaluated per run (prescribed and +/-25 um), and results serialize with
labeled keys only; bare tuples invite misreading by downstream consumers.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from . import workspace as ws
from .errors import (
    DocumentNotFound,
    InvalidRange,
    NonPositiveInput,
    ToolkitError,
    UnwritablePath,
    ZeroMeltPoolDimension,
)
from .meltpool import RosenthalParams, meltpool_dimensions, thermal_diffusivity
from .properties import Material

# Layer-height variants evaluated per run: prescribed and +/-25 um.
LAYER_HEIGHT_OFFSETS = (-25e-6, 0.0, 25e-6)

# Negative offsets never push a variant below this floor.
MIN_LAYER_HEIGHT = 1e-6

DEFAULT_POWERS_W = tuple(float(p) for p in range(100, 1001, 100))
DEFAULT_VELOCITIES_MM_S = tuple(float(v) for v in range(100, 1001, 100))


@dataclass(frozen=True)
class BuildConfig:
    """Process parameters for one build."""

    beam_power: float                  # W
    scan_velocity: float               # m/s
    layer_height: float                # m
    hatch_spacing: float = 50e-6       # m
    plate_temperature: float = 298.15  # K

    def __post_init__(self):
        for label, value in (
            ("beam_power", self.beam_power),
            ("scan_velocity", self.scan_velocity),
            ("layer_height", self.layer_height),
            ("hatch_spacing", self.hatch_spacing),
            ("plate_temperature", self.plate_temperature),
        ):
            if value <= 0 or not math.isfinite(value):
                raise NonPositiveInput(f"{label} must be positive and finite, got {value}")

    def to_document(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "build_config",
            "beam_power_w": self.beam_power,
            "scan_velocity_m_s": self.scan_velocity,
            "hatch_spacing_m": self.hatch_spacing,
            "layer_height_m": self.layer_height,
            "plate_temperature_k": self.plate_temperature,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "BuildConfig":
        return cls(
            beam_power=doc["beam_power_w"],
            scan_velocity=doc["scan_velocity_m_s"],
            layer_height=doc["layer_height_m"],
            hatch_spacing=doc["hatch_spacing_m"],
            plate_temperature=doc["plate_temperature_k"],
        )


def _validate_range(label: str, values) -> tuple[float, ...]:
    values = tuple(float(v) for v in values)
    if not values:
        raise InvalidRange(f"{label} must not be empty")
    if any(v <= 0 or not math.isfinite(v) for v in values):
        raise InvalidRange(f"{label} entries must be positive and finite")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidRange(f"{label} must be strictly increasing")
    return values


@dataclass(frozen=True)
class ProcessMapConfig:
    """Power/velocity ranges swept per run; overrides the scalar build values."""

    power_range: tuple[float, ...] = DEFAULT_POWERS_W            # W
    velocity_range: tuple[float, ...] = field(                   # m/s
        default_factory=lambda: tuple(v / 1000.0 for v in DEFAULT_VELOCITIES_MM_S)
    )
    layer_height_offsets: tuple[float, ...] = LAYER_HEIGHT_OFFSETS  # m

    def __post_init__(self):
        object.__setattr__(self, "power_range", _validate_range("power_range", self.power_range))
        velocities = tuple(float(v) for v in self.velocity_range)
        if not velocities:
            raise InvalidRange("velocity_range must not be empty")
        if any(v <= 0 or not math.isfinite(v) for v in velocities):
            raise InvalidRange("velocity_range entries must be positive and finite")
        if any(b <= a for a, b in zip(velocities, velocities[1:])):
            raise InvalidRange("velocity_range must be strictly increasing")
        object.__setattr__(self, "velocity_range", velocities)
        offsets = tuple(float(v) for v in self.layer_height_offsets)
        if len(offsets) != 3:
            raise InvalidRange("exactly three layer-height variants are evaluated per run")
        object.__setattr__(self, "layer_height_offsets", offsets)


def lof_criterion(hatch: float, width: float, layer: float, depth: float) -> tuple[float, bool]:
    """(metric, lack_of_fusion) for one parameter combination.

    metric = (hatch/width)^2 + (layer/depth)^2; values above one mean the
    melt pools no longer overlap enough and lack-of-fusion porosity is
    expected. The boundary value of exactly one still counts as printable.
    """
    if width <= 0 or depth <= 0:
        raise ZeroMeltPoolDimension(f"melt pool {width} x {depth} m has no extent")
    if hatch < 0 or layer < 0:
        raise NonPositiveInput("hatch spacing and layer height must be non-negative")
    metric = (hatch / width) ** 2 + (layer / depth) ** 2
    return metric, metric > 1.0


_RUN_RE = re.compile(r"^run-(\d{4})$")


def _next_run_name(workspace: str) -> str:
    taken = set()
    for entry in ws.list_contents(workspace, "process_maps"):
        head = entry.split("/", 1)[0]
        match = _RUN_RE.match(head)
        if match:
            taken.add(int(match.group(1)))
    return f"run-{(max(taken) + 1 if taken else 1):04d}"


def init_process_map(
    workspace: str,
    build_ref: ws.DocumentRef,
    material_ref: ws.DocumentRef,
    overrides: ProcessMapConfig | None = None,
    run_name: str | None = None,
) -> ws.DocumentRef:
    """Create a run directory under ``process_maps`` plus its config document.

    The referenced build and material documents must already exist; the
    config merges the default grid with any overrides and is what the
    generation step consumes.
    """
    ws.load_document(build_ref)
    ws.load_document(material_ref)
    config = overrides or ProcessMapConfig()
    run = run_name or _next_run_name(workspace)
    config_ref = ws.DocumentRef(workspace, "process_maps", f"{run}/config.json")
    document = {
        "schema_version": 1,
        "kind": "process_map_config",
        "run": run,
        "material_ref": material_ref.to_dict(),
        "build_ref": build_ref.to_dict(),
        "power_range_w": list(config.power_range),
        "velocity_range_mm_s": [round(v * 1000.0, 9) for v in config.velocity_range],
        "layer_height_offsets_um": [round(o * 1e6, 9) for o in config.layer_height_offsets],
    }
    ws.save_document(config_ref, document)
    return config_ref


def _solve_cell(material: Material, build: BuildConfig, power: float, velocity: float):
    """Melt-pool dimensions for one (power, velocity) cell, or an error note."""
    try:
        params = RosenthalParams(
            absorbed_power=material.absorptivity * power,
            scan_speed=velocity,
            thermal_conductivity=material.thermal_conductivity,
            thermal_diffusivity=thermal_diffusivity(
                material.thermal_conductivity, material.density, material.specific_heat
            ),
            reference_temperature=material.transitions.t_melting,
            plate_temperature=build.plate_temperature,
        )
        return meltpool_dimensions(params), None
    except ToolkitError as exc:
        return None, f"{exc.kind}: {exc}"


def generate_process_map(config_ref: ws.DocumentRef) -> ws.DocumentRef:
    """Classify every grid cell for each layer-height variant and write the
    result document next to the config. Deterministic for a given config."""
    config_doc = ws.load_document(config_ref)
    material_doc = ws.load_document(ws.DocumentRef.from_dict(config_doc["material_ref"]))
    build_doc = ws.load_document(ws.DocumentRef.from_dict(config_doc["build_ref"]))
    material = Material.from_document(material_doc)
    build = BuildConfig.from_document(build_doc)

    powers = [float(p) for p in config_doc["power_range_w"]]
    velocities_mm = [float(v) for v in config_doc["velocity_range_mm_s"]]
    offsets = [float(o) * 1e-6 for o in config_doc["layer_height_offsets_um"]]

    # Melt-pool dimensions depend only on (power, velocity); solve each cell
    # once and share across the three layer-height variants.
    solved = {
        (p, v_mm): _solve_cell(material, build, p, v_mm / 1000.0)
        for p in powers for v_mm in velocities_mm
    }

    variants = []
    for offset in offsets:
        layer = build.layer_height + offset
        clamped = layer < MIN_LAYER_HEIGHT
        if clamped:
            layer = MIN_LAYER_HEIGHT
        cells = []
        for p in powers:
            for v_mm in velocities_mm:
                dims, error = solved[(p, v_mm)]
                if error is None:
                    try:
                        metric, lof = lof_criterion(
                            build.hatch_spacing, dims.width, layer, dims.depth
                        )
                    except ZeroMeltPoolDimension as exc:
                        error = f"{exc.kind}: {exc}"
                if error is not None:
                    cells.append({
                        "power_w": p,
                        "velocity_mm_s": v_mm,
                        "lof_metric": None,
                        "lack_of_fusion": True,
                        "melt_width_um": None,
                        "melt_depth_um": None,
                        "error": error,
                    })
                    continue
                cells.append({
                    "power_w": p,
                    "velocity_mm_s": v_mm,
                    "lof_metric": metric,
                    "lack_of_fusion": lof,
                    "melt_width_um": dims.width * 1e6,
                    "melt_depth_um": dims.depth * 1e6,
                })
        summary = {
            "lack_of_fusion": [
                {"power_w": c["power_w"], "velocity_mm_s": c["velocity_mm_s"]}
                for c in cells if c["lack_of_fusion"]
            ],
            "printable": [
                {"power_w": c["power_w"], "velocity_mm_s": c["velocity_mm_s"]}
                for c in cells if not c["lack_of_fusion"]
            ],
        }
        variants.append({
            "layer_height_um": round(layer * 1e6, 9),
            "offset_um": round(offset * 1e6, 9),
            "clamped": clamped,
            "cells": cells,
            "summary": summary,
        })

    result = {
        "schema_version": 1,
        "kind": "process_map_result",
        "material_ref": config_doc["material_ref"],
        "build_ref": config_doc["build_ref"],
        "material_name": material.name,
        "hatch_spacing_um": round(build.hatch_spacing * 1e6, 9),
        "prescribed_layer_height_um": round(build.layer_height * 1e6, 9),
        "variants": variants,
    }
    run_dir = config_ref.filename.rsplit("/", 1)[0] if "/" in config_ref.filename else ""
    filename = f"{run_dir}/result.json" if run_dir else "result.json"
    result_ref = ws.DocumentRef(config_ref.workspace, "process_maps", filename)
    ws.save_document(result_ref, result)
    return result_ref


def render_process_map(result_ref: ws.DocumentRef, output_path) -> str:
    """Write a vector figure of the classification grid, one panel per
    layer-height variant. Renders byte-identically for identical inputs."""
    from pathlib import Path

    import matplotlib
    from matplotlib.colors import ListedColormap
    from matplotlib.figure import Figure

    result = ws.load_document(result_ref)
    if result.get("kind") != "process_map_result":
        raise DocumentNotFound(f"{result_ref.uri()} is not a process map result")

    variants = result["variants"]
    output = Path(output_path)

    def edges(centers: list[float]) -> list[float]:
        if len(centers) == 1:
            half = max(abs(centers[0]) * 0.1, 0.5)
            return [centers[0] - half, centers[0] + half]
        mids = [(a + b) / 2 for a, b in zip(centers, centers[1:])]
        return [2 * centers[0] - mids[0], *mids, 2 * centers[-1] - mids[-1]]

    with matplotlib.rc_context({"svg.hashsalt": "lpbfkit"}):
        fig = Figure(figsize=(4.2 * len(variants), 3.6), dpi=100)
        axes = fig.subplots(1, len(variants), squeeze=False)[0]
        for ax, variant in zip(axes, variants):
            powers = sorted({c["power_w"] for c in variant["cells"]})
            velocities = sorted({c["velocity_mm_s"] for c in variant["cells"]})
            index = {(c["power_w"], c["velocity_mm_s"]): c["lack_of_fusion"]
                     for c in variant["cells"]}
            grid = [[1.0 if index[(p, v)] else 0.0 for v in velocities] for p in powers]
            ax.pcolormesh(
                edges(velocities), edges(powers), grid,
                cmap=ListedColormap(["#4878cf", "#d1432f"]),
                vmin=0.0, vmax=1.0, shading="flat",
            )
            ax.set_xlabel("scan velocity (mm/s)")
            ax.set_ylabel("power (W)")
            ax.set_title(f"layer {variant['layer_height_um']:g} um")
        fig.suptitle(
            f"{result['material_name']} lack-of-fusion map "
            f"(hatch {result['hatch_spacing_um']:g} um)"
        )
        fig.tight_layout()
        try:
            fig.savefig(output, format=output.suffix.lstrip(".") or "svg",
                        metadata={"Date": None})
        except OSError as exc:
            raise UnwritablePath(f"cannot write figure to {output}: {exc}") from exc
    return str(output)
