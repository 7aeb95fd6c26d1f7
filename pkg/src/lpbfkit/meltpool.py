"""Analytical moving-point-source melt-pool model in conduction mode.

The temperature field of a point heat source moving over a semi-infinite
solid has a closed form; rearranging it at the melting isotherm gives the
melt-pool boundary, whose on-axis trailing extent also has a closed form.
Width and depth come from sweeping the radial coordinate along the boundary
and recording the maximum transverse extent. The half-space point-source
solution is rotationally symmetric about the scan axis, so depth equals
half the width.

Keyhole-mode pools are out of scope; the model is only valid in conduction
mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    MeltPoolVanishes,
    NonPositiveDeltaT,
    NonPositiveInput,
    OriginSingularity,
)


@dataclass(frozen=True)
class RosenthalParams:
    """Inputs to the melt-pool model.

    ``absorbed_power`` is the laser power already scaled by absorptivity.
    ``reference_temperature`` is the isotherm traced as the pool boundary,
    conventionally the melting (solidus/liquidus midpoint) temperature.
    """

    absorbed_power: float            # W
    scan_speed: float                # m/s
    thermal_conductivity: float      # W/(m K)
    thermal_diffusivity: float       # m^2/s
    reference_temperature: float     # K
    plate_temperature: float = 298.15  # K
    sweep_step: float = 1e-6         # m

    def __post_init__(self):
        for label, value in (
            ("absorbed_power", self.absorbed_power),
            ("scan_speed", self.scan_speed),
            ("thermal_conductivity", self.thermal_conductivity),
            ("thermal_diffusivity", self.thermal_diffusivity),
            ("sweep_step", self.sweep_step),
        ):
            if value <= 0 or not math.isfinite(value):
                raise NonPositiveInput(f"{label} must be positive and finite, got {value}")
        if self.reference_temperature <= self.plate_temperature:
            raise NonPositiveDeltaT(
                f"reference temperature {self.reference_temperature} K must exceed "
                f"plate temperature {self.plate_temperature} K"
            )

    @property
    def delta_t(self) -> float:
        return self.reference_temperature - self.plate_temperature


@dataclass(frozen=True)
class MeltPoolDimensions:
    width: float            # m, maximum transverse extent
    depth: float            # m, equals width/2 by rotational symmetry
    length: float           # m, leading-to-trailing extent along the scan axis
    trailing_length: float  # m, heat source to trailing tip, closed form

    def __post_init__(self):
        if self.width != 2.0 * self.depth:
            raise NonPositiveInput("width must equal twice the depth")
        for label, value in (("length", self.length), ("trailing_length", self.trailing_length)):
            if value < 0 or not math.isfinite(value):
                raise NonPositiveInput(f"{label} must be finite and non-negative")


def thermal_diffusivity(conductivity: float, density: float, specific_heat: float) -> float:
    """k / (rho * Cp)."""
    if conductivity <= 0 or density <= 0 or specific_heat <= 0:
        raise NonPositiveInput("conductivity, density, and specific heat must be positive")
    return conductivity / (density * specific_heat)


def rosenthal_temperature(z: float, r: float, params: RosenthalParams) -> float:
    """Temperature at distance z along the travel axis and transverse radius r.

    Exact point-source field, no clamping; diverges at the origin.
    """
    distance = math.hypot(z, r)
    if distance == 0.0:
        raise OriginSingularity("temperature field diverges at the heat source")
    q = params.absorbed_power
    k = params.thermal_conductivity
    exponent = params.scan_speed * (z - distance) / (2.0 * params.thermal_diffusivity)
    return params.plate_temperature + q / (2.0 * math.pi * k * distance) * math.exp(exponent)


def trailing_length(params: RosenthalParams) -> float:
    """Distance from the heat source to the trailing melt-pool tip.

    Closed form Q / (2 pi k dT); the scan speed and diffusivity cancel out
    of the derivation, so the result depends on neither.
    """
    dt = params.delta_t
    if dt <= 0:
        raise NonPositiveDeltaT("reference temperature must exceed plate temperature")
    return params.absorbed_power / (2.0 * math.pi * params.thermal_conductivity * dt)


def boundary_points(params: RosenthalParams) -> tuple[np.ndarray, np.ndarray]:
    """(z, r) melt-pool boundary samples from the radial sweep.

    Sweeps the radial distance R from one step up to the trailing length
    inclusive; each R maps to an axial position on the isotherm, and the
    transverse radius follows from r^2 = R^2 - z^2 where defined.
    """
    r_trailing = trailing_length(params)
    step = params.sweep_step
    if r_trailing < step:
        raise MeltPoolVanishes(
            f"trailing length {r_trailing:.3g} m is below the sweep step {step:.3g} m"
        )
    n = int(r_trailing / step)
    radii = step * np.arange(1, n + 1, dtype=float)
    if r_trailing - radii[-1] > 1e-9 * r_trailing:
        radii = np.append(radii, r_trailing)
    else:
        radii[-1] = r_trailing

    coeff = 2.0 * params.thermal_diffusivity / params.scan_speed
    z = radii + coeff * np.log(radii / r_trailing)
    r_sq = (radii - z) * (radii + z)
    # Tolerate FP noise at the trailing tip where r goes to zero exactly.
    defined = r_sq >= -1e-12 * radii * radii
    if not defined.any():
        raise MeltPoolVanishes("no sweep point lies on the melting isotherm")
    r = np.sqrt(np.clip(r_sq[defined], 0.0, None))
    return z[defined], r


def meltpool_dimensions(params: RosenthalParams) -> MeltPoolDimensions:
    """Width, depth, length, and trailing length of the melt pool."""
    z, r = boundary_points(params)
    depth = float(r.max())
    length = float(z.max() - z.min())
    return MeltPoolDimensions(
        width=2.0 * depth,
        depth=depth,
        length=length,
        trailing_length=trailing_length(params),
    )
