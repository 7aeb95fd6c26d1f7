"""Alloy printability toolkit for laser powder bed fusion.

Turns an alloy composition into estimated thermophysical properties,
analytical melt-pool dimensions, and a lack-of-fusion process map over a
power-velocity grid. Everything is reachable three ways: this library API,
the ``lpbfkit`` CLI, and a JSON-RPC tool server for agent clients, all
backed by a shared on-disk workspace.
"""

from .errors import ToolkitError
from .materials import (
    AlloyRecord,
    Composition,
    list_known_alloys,
    lookup_alloy,
    parse_composition,
)
from .meltpool import (
    MeltPoolDimensions,
    RosenthalParams,
    boundary_points,
    meltpool_dimensions,
    rosenthal_temperature,
    thermal_diffusivity,
    trailing_length,
)
from .processmap import (
    BuildConfig,
    ProcessMapConfig,
    generate_process_map,
    init_process_map,
    lof_criterion,
    render_process_map,
)
from .properties import (
    Material,
    PhaseTransitions,
    ProviderConfig,
    absorptivity_bramson,
    build_material,
    compile_material,
    estimate_phase_transitions,
    estimate_transport_properties,
    material_for_alloy,
    select_database_tag,
)
from .workspace import (
    DocumentRef,
    Workspace,
    init_workspace,
    list_contents,
    list_workspaces,
    load_document,
    parse_resource_uri,
    save_document,
)

__version__ = "0.1.0"

__all__ = [
    "AlloyRecord",
    "BuildConfig",
    "Composition",
    "DocumentRef",
    "Material",
    "MeltPoolDimensions",
    "PhaseTransitions",
    "ProcessMapConfig",
    "ProviderConfig",
    "RosenthalParams",
    "ToolkitError",
    "Workspace",
    "absorptivity_bramson",
    "boundary_points",
    "build_material",
    "compile_material",
    "estimate_phase_transitions",
    "estimate_transport_properties",
    "generate_process_map",
    "init_process_map",
    "init_workspace",
    "list_contents",
    "list_known_alloys",
    "list_workspaces",
    "load_document",
    "lof_criterion",
    "lookup_alloy",
    "material_for_alloy",
    "meltpool_dimensions",
    "parse_composition",
    "parse_resource_uri",
    "render_process_map",
    "rosenthal_temperature",
    "save_document",
    "select_database_tag",
    "thermal_diffusivity",
    "trailing_length",
]
