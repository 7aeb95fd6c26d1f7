"""Tool catalog: named, schema-described operations over the library.

Every tool takes a flat dictionary of JSON primitives (strings, numbers,
filename references) and returns a JSON-serializable value, so the same
catalog backs both the JSON-RPC server and the command line. Tool failures
come back as in-band error envelopes carrying the error kind, never as
transport-level failures.

Boundary units are human-scale and labeled in the argument names: power in
W, velocity in mm/s, hatch spacing and layer height in um, temperatures in
K. Stored documents remain SI except where their schema embeds a unit in
the key name.
"""

from __future__ import annotations

import jsonschema

from . import processmap as pm
from . import workspace as ws
from .errors import ToolkitError
from .materials import list_known_alloys, lookup_alloy, parse_composition
from .meltpool import RosenthalParams, meltpool_dimensions, thermal_diffusivity
from .properties import (
    Material,
    ProviderConfig,
    compile_material,
    estimate_phase_transitions,
    select_database_tag,
)


def success(value) -> dict:
    return {"status": "success", "value": value}


def failure(error_kind: str, message: str) -> dict:
    return {"status": "error", "error_kind": error_kind, "message": message}


def _slug(name: str) -> str:
    folded = "".join(c if c.isalnum() else "-" for c in name.lower())
    return "-".join(part for part in folded.split("-") if part) or "document"


def _provider_config(arguments: dict) -> ProviderConfig:
    kwargs = {}
    if "provider" in arguments:
        kwargs["provider_kind"] = arguments["provider"]
    if "t_min_k" in arguments:
        kwargs["t_min"] = arguments["t_min_k"]
    if "t_max_k" in arguments:
        kwargs["t_max"] = arguments["t_max_k"]
    if "evaluation_temperature_k" in arguments:
        kwargs["evaluation_temperature"] = arguments["evaluation_temperature_k"]
    if "laser_wavelength_m" in arguments:
        kwargs["laser_wavelength"] = arguments["laser_wavelength_m"]
    return ProviderConfig(**kwargs)


# --- handlers ---------------------------------------------------------------

def _workspace_init(args: dict):
    workspace = ws.init_workspace(args["name"])
    return {"workspace": workspace.name, "subfolders": list(workspace.subfolders)}


def _workspace_list(args: dict):
    return {"workspaces": ws.list_workspaces()}


def _workspace_contents(args: dict):
    documents = ws.list_contents(args["workspace"], args["subfolder"])
    return {
        "workspace": args["workspace"],
        "subfolder": args["subfolder"],
        "documents": documents,
    }


def _alloy_list(args: dict):
    return {"alloys": list_known_alloys()}


def _alloy_show(args: dict):
    return lookup_alloy(args["name"]).to_dict()


def _composition_save(args: dict):
    composition = parse_composition(dict(args["elements"]))
    name = args.get("name")
    filename = args.get("filename") or f"{_slug(name or '-'.join(composition.elements))}.json"
    ref = ws.DocumentRef(args["workspace"], "compositions", filename)
    document = {
        "schema_version": 1,
        "kind": "composition",
        "elements": composition.to_dict(),
    }
    if name:
        document["name"] = name
    ws.save_document(ref, document)
    return {"ref": ref.to_dict(), "composition": composition.to_dict()}


def _composition_from_alloy(args: dict):
    record = lookup_alloy(args["name"])
    filename = args.get("filename") or f"{_slug(record.name)}.json"
    ref = ws.DocumentRef(args["workspace"], "compositions", filename)
    ws.save_document(ref, {
        "schema_version": 1,
        "kind": "composition",
        "name": record.name,
        "elements": record.composition.to_dict(),
    })
    return {"ref": ref.to_dict(), "name": record.name,
            "composition": record.composition.to_dict()}


def _database_select(args: dict):
    ref = ws.DocumentRef(args["workspace"], "compositions", args["composition_filename"])
    doc = ws.load_document(ref)
    composition = parse_composition(dict(doc["elements"]))
    return {"database_tag": select_database_tag(composition)}


def _phase_transitions_compute(args: dict):
    comp_ref = ws.DocumentRef(args["workspace"], "compositions", args["composition_filename"])
    doc = ws.load_document(comp_ref)
    composition = parse_composition(dict(doc["elements"]))
    config = _provider_config(args)
    transitions = estimate_phase_transitions(composition, config)
    filename = args.get("filename") or comp_ref.filename
    out_ref = ws.DocumentRef(args["workspace"], "phase_transition_temperatures", filename)
    ws.save_document(out_ref, {
        "schema_version": 1,
        "kind": "phase_transitions",
        "solidus_k": transitions.t_solidus,
        "liquidus_k": transitions.t_liquidus,
        "melting_k": transitions.t_melting,
    })
    return {
        "ref": out_ref.to_dict(),
        "solidus_k": transitions.t_solidus,
        "liquidus_k": transitions.t_liquidus,
        "melting_k": transitions.t_melting,
    }


def _material_compile(args: dict):
    comp_ref = ws.DocumentRef(args["workspace"], "compositions", args["composition_filename"])
    config = _provider_config(args)
    material_ref = compile_material(comp_ref, config)
    return {"ref": material_ref.to_dict(), "material": ws.load_document(material_ref)}


def _build_config_save(args: dict):
    build = pm.BuildConfig(
        beam_power=args["beam_power_w"],
        scan_velocity=args["scan_velocity_mm_s"] / 1000.0,
        layer_height=args["layer_height_um"] * 1e-6,
        hatch_spacing=args.get("hatch_spacing_um", 50.0) * 1e-6,
        plate_temperature=args.get("plate_temperature_k", 298.15),
    )
    filename = args.get("filename", "default.json")
    ref = ws.DocumentRef(args["workspace"], "build_configs", filename)
    ws.save_document(ref, build.to_document())
    return {"ref": ref.to_dict(), "build_config": build.to_document()}


def _meltpool_dims(args: dict):
    material_ref = ws.DocumentRef(args["workspace"], "materials", args["material_filename"])
    material = Material.from_document(ws.load_document(material_ref))
    params = RosenthalParams(
        absorbed_power=material.absorptivity * args["power_w"],
        scan_speed=args["velocity_mm_s"] / 1000.0,
        thermal_conductivity=material.thermal_conductivity,
        thermal_diffusivity=thermal_diffusivity(
            material.thermal_conductivity, material.density, material.specific_heat
        ),
        reference_temperature=material.transitions.t_melting,
        plate_temperature=args.get("plate_temperature_k", 298.15),
    )
    dims = meltpool_dimensions(params)
    return {
        "melt_width_um": dims.width * 1e6,
        "melt_depth_um": dims.depth * 1e6,
        "melt_length_um": dims.length * 1e6,
        "trailing_length_um": dims.trailing_length * 1e6,
    }


def _processmap_init(args: dict):
    overrides = None
    if "power_range_w" in args or "velocity_range_mm_s" in args:
        kwargs = {}
        if "power_range_w" in args:
            kwargs["power_range"] = tuple(args["power_range_w"])
        if "velocity_range_mm_s" in args:
            kwargs["velocity_range"] = tuple(v / 1000.0 for v in args["velocity_range_mm_s"])
        overrides = pm.ProcessMapConfig(**kwargs)
    config_ref = pm.init_process_map(
        args["workspace"],
        build_ref=ws.DocumentRef(args["workspace"], "build_configs", args["build_filename"]),
        material_ref=ws.DocumentRef(args["workspace"], "materials", args["material_filename"]),
        overrides=overrides,
        run_name=args.get("run_name"),
    )
    return {"ref": config_ref.to_dict(), "config": ws.load_document(config_ref)}


def _processmap_generate(args: dict):
    config_ref = ws.DocumentRef(args["workspace"], "process_maps", args["config_filename"])
    result_ref = pm.generate_process_map(config_ref)
    result = ws.load_document(result_ref)
    return {
        "ref": result_ref.to_dict(),
        "material_name": result["material_name"],
        "hatch_spacing_um": result["hatch_spacing_um"],
        "variants": [
            {
                "layer_height_um": v["layer_height_um"],
                "offset_um": v["offset_um"],
                "clamped": v["clamped"],
                "summary": v["summary"],
            }
            for v in result["variants"]
        ],
    }


def _processmap_render(args: dict):
    result_ref = ws.DocumentRef(args["workspace"], "process_maps", args["result_filename"])
    if "output_path" in args:
        output = args["output_path"]
    else:
        run_dir = result_ref.filename.rsplit("/", 1)[0] if "/" in result_ref.filename else ""
        name = f"{run_dir}/map.svg" if run_dir else "map.svg"
        output = str(ws.workspace_root() / result_ref.workspace / "process_maps" / name)
    path = pm.render_process_map(result_ref, output)
    return {"path": path}


# --- catalog -----------------------------------------------------------------

def _schema(properties: dict, required: tuple[str, ...]) -> dict:
    return {
        "type": "object",
        "properties": properties,
        "required": list(required),
        "additionalProperties": False,
    }

_WORKSPACE_ARG = {"type": "string", "description": "Name of an existing workspace."}

TOOLS: list[dict] = [
    {
        "name": "workspace_init",
        "title": "Initialize Workspace",
        "description": "Create a named workspace with its fixed subfolders; "
                       "re-initializing an existing workspace is a no-op.",
        "input_schema": _schema({
            "name": {"type": "string",
                     "description": "Workspace name (letters, digits, - and _)."},
        }, ("name",)),
        "structured_output": True,
        "handler": _workspace_init,
    },
    {
        "name": "workspace_list",
        "title": "List Workspaces",
        "description": "List every workspace under the configured root.",
        "input_schema": _schema({}, ()),
        "structured_output": True,
        "handler": _workspace_list,
    },
    {
        "name": "workspace_contents",
        "title": "List Subfolder Contents",
        "description": "List the JSON documents stored in one workspace subfolder.",
        "input_schema": _schema({
            "workspace": _WORKSPACE_ARG,
            "subfolder": {"type": "string", "enum": list(ws.SUBFOLDERS),
                          "description": "One of the fixed workspace subfolders."},
        }, ("workspace", "subfolder")),
        "structured_output": True,
        "handler": _workspace_contents,
    },
    {
        "name": "alloy_list",
        "title": "List Known Alloys",
        "description": "Canonical names of every alloy in the bundled database.",
        "input_schema": _schema({}, ()),
        "structured_output": True,
        "handler": _alloy_list,
    },
    {
        "name": "alloy_show",
        "title": "Show Known Alloy",
        "description": "Full record for a bundled alloy: composition, reference "
                       "properties, aliases, provenance. Matching is "
                       "case-insensitive and alias-aware.",
        "input_schema": _schema({
            "name": {"type": "string", "description": "Alloy name or alias."},
        }, ("name",)),
        "structured_output": True,
        "handler": _alloy_show,
    },
    {
        "name": "composition_save",
        "title": "Save Composition",
        "description": "Normalize an element-to-weight map into mass fractions and "
                       "store it as a composition document.",
        "input_schema": _schema({
            "workspace": _WORKSPACE_ARG,
            "elements": {"type": "object",
                         "description": "Element symbol to positive weight, "
                                        "e.g. {\"Fe\": 0.9, \"C\": 0.1}.",
                         "additionalProperties": {"type": "number"}},
            "name": {"type": "string", "description": "Optional display name."},
            "filename": {"type": "string",
                         "description": "Target filename (.json); derived from the "
                                        "name or elements when omitted."},
        }, ("workspace", "elements")),
        "structured_output": True,
        "handler": _composition_save,
    },
    {
        "name": "composition_from_alloy",
        "title": "Save Known-Alloy Composition",
        "description": "Look up a bundled alloy and store its composition document.",
        "input_schema": _schema({
            "workspace": _WORKSPACE_ARG,
            "name": {"type": "string", "description": "Alloy name or alias."},
            "filename": {"type": "string",
                         "description": "Target filename (.json); derived from the "
                                        "alloy name when omitted."},
        }, ("workspace", "name")),
        "structured_output": True,
        "handler": _composition_from_alloy,
    },
    {
        "name": "database_select",
        "title": "Select Property Database Tag",
        "description": "Metadata tag of the thermodynamic database a commercial "
                       "CALPHAD solver would pick for a stored composition. "
                       "Informational only.",
        "input_schema": _schema({
            "workspace": _WORKSPACE_ARG,
            "composition_filename": {"type": "string",
                                     "description": "Composition document filename."},
        }, ("workspace", "composition_filename")),
        "structured_output": True,
        "handler": _database_select,
    },
    {
        "name": "phase_transitions_compute",
        "title": "Compute Phase Transitions",
        "description": "Estimate solidus, liquidus, and melting temperatures for a "
                       "stored composition and save them as a phase-transition "
                       "document for reuse by material compilation.",
        "input_schema": _schema({
            "workspace": _WORKSPACE_ARG,
            "composition_filename": {"type": "string",
                                     "description": "Composition document filename."},
            "provider": {"type": "string", "enum": ["alloy-table", "mixture-rule"],
                         "description": "Property provider (default alloy-table)."},
            "t_min_k": {"type": "number", "description": "Sweep floor in K (default 500)."},
            "t_max_k": {"type": "number", "description": "Sweep ceiling in K (default 3500)."},
            "filename": {"type": "string",
                         "description": "Target filename; defaults to the composition's."},
        }, ("workspace", "composition_filename")),
        "structured_output": True,
        "handler": _phase_transitions_compute,
    },
    {
        "name": "material_compile",
        "title": "Compile Material",
        "description": "Compile the full material record (transport properties, "
                       "phase transitions, laser absorptivity) from a stored "
                       "composition and save it into the materials subfolder. "
                       "Reuses a stored phase-transition document with the same "
                       "filename when present.",
        "input_schema": _schema({
            "workspace": _WORKSPACE_ARG,
            "composition_filename": {"type": "string",
                                     "description": "Composition document filename."},
            "provider": {"type": "string", "enum": ["alloy-table", "mixture-rule"],
                         "description": "Property provider (default alloy-table)."},
            "evaluation_temperature_k": {"type": "number",
                                         "description": "Property evaluation temperature "
                                                        "recorded in the document (default 298.15)."},
            "laser_wavelength_m": {"type": "number",
                                   "description": "Laser wavelength in m (default 1.07e-6)."},
        }, ("workspace", "composition_filename")),
        "structured_output": True,
        "handler": _material_compile,
    },
    {
        "name": "build_config_save",
        "title": "Save Build Config",
        "description": "Store the process parameters for one build: beam power, "
                       "scan velocity, layer height, hatch spacing, plate temperature.",
        "input_schema": _schema({
            "workspace": _WORKSPACE_ARG,
            "beam_power_w": {"type": "number", "description": "Beam power in W."},
            "scan_velocity_mm_s": {"type": "number", "description": "Scan velocity in mm/s."},
            "layer_height_um": {"type": "number", "description": "Layer height in um."},
            "hatch_spacing_um": {"type": "number",
                                 "description": "Hatch spacing in um (default 50)."},
            "plate_temperature_k": {"type": "number",
                                    "description": "Plate temperature in K (default 298.15)."},
            "filename": {"type": "string",
                         "description": "Target filename (default default.json)."},
        }, ("workspace", "beam_power_w", "scan_velocity_mm_s", "layer_height_um")),
        "structured_output": True,
        "handler": _build_config_save,
    },
    {
        "name": "meltpool_dims",
        "title": "Melt Pool Dimensions",
        "description": "Width, depth, length, and trailing length of the melt pool "
                       "for a stored material at one power/velocity combination.",
        "input_schema": _schema({
            "workspace": _WORKSPACE_ARG,
            "material_filename": {"type": "string",
                                  "description": "Material document filename."},
            "power_w": {"type": "number", "description": "Beam power in W."},
            "velocity_mm_s": {"type": "number", "description": "Scan velocity in mm/s."},
            "plate_temperature_k": {"type": "number",
                                    "description": "Plate temperature in K (default 298.15)."},
        }, ("workspace", "material_filename", "power_w", "velocity_mm_s")),
        "structured_output": True,
        "handler": _meltpool_dims,
    },
    {
        "name": "processmap_init",
        "title": "Initialize Process Map",
        "description": "Create a process-map run folder and its config document, "
                       "merging the default power/velocity grid (100-1000 in steps "
                       "of 100) with any overrides.",
        "input_schema": _schema({
            "workspace": _WORKSPACE_ARG,
            "build_filename": {"type": "string",
                               "description": "Build config document filename."},
            "material_filename": {"type": "string",
                                  "description": "Material document filename."},
            "power_range_w": {"type": "array", "items": {"type": "number"},
                              "description": "Override power grid in W, strictly increasing."},
            "velocity_range_mm_s": {"type": "array", "items": {"type": "number"},
                                    "description": "Override velocity grid in mm/s, "
                                                   "strictly increasing."},
            "run_name": {"type": "string",
                         "description": "Run folder name; auto-numbered when omitted."},
        }, ("workspace", "build_filename", "material_filename")),
        "structured_output": True,
        "handler": _processmap_init,
    },
    {
        "name": "processmap_generate",
        "title": "Generate Process Map",
        "description": "Classify every power/velocity cell against the lack-of-fusion "
                       "criterion at three layer heights and write the result "
                       "document. The response carries, per layer variant, labeled "
                       "lists of lack-of-fusion and printable combinations.",
        "input_schema": _schema({
            "workspace": _WORKSPACE_ARG,
            "config_filename": {"type": "string",
                                "description": "Process-map config filename, e.g. "
                                               "run-0001/config.json."},
        }, ("workspace", "config_filename")),
        "structured_output": True,
        "handler": _processmap_generate,
    },
    {
        "name": "processmap_render",
        "title": "Render Process Map",
        "description": "Render a generated process map as a vector figure, one "
                       "panel per layer-height variant.",
        "input_schema": _schema({
            "workspace": _WORKSPACE_ARG,
            "result_filename": {"type": "string",
                                "description": "Process-map result filename, e.g. "
                                               "run-0001/result.json."},
            "output_path": {"type": "string",
                            "description": "Figure path (.svg); defaults to map.svg "
                                           "inside the run folder."},
        }, ("workspace", "result_filename")),
        "structured_output": True,
        "handler": _processmap_render,
    },
]

HANDLERS = {tool["name"]: tool["handler"] for tool in TOOLS}


def descriptors() -> list[dict]:
    """Wire-format tool descriptors (handlers stripped)."""
    return [
        {key: value for key, value in tool.items() if key != "handler"}
        for tool in TOOLS
    ]


def call_tool(name: str, arguments: dict | None) -> dict:
    """Run one tool and wrap the outcome in a success/error envelope."""
    arguments = arguments or {}
    if name not in HANDLERS:
        return failure("UnknownTool", f"no tool named '{name}'")
    tool = next(t for t in TOOLS if t["name"] == name)
    validator = jsonschema.Draft202012Validator(tool["input_schema"])
    errors = sorted(validator.iter_errors(arguments), key=lambda e: list(e.path))
    if errors:
        first = errors[0]
        offending = ".".join(str(p) for p in first.path) or "(arguments)"
        return failure("ArgumentValidation", f"{offending}: {first.message}")
    try:
        return success(HANDLERS[name](arguments))
    except ToolkitError as exc:
        return failure(exc.kind, str(exc))
    except Exception as exc:  # pragma: no cover - defensive
        return failure("InternalError", f"{type(exc).__name__}: {exc}")
