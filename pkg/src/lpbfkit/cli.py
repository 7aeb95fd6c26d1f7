"""Command-line surface mirroring the tool catalog.

Human-scale units at the boundary (W, mm/s, um); stored documents stay SI.
Usage errors exit 2; operation failures exit 1 with a machine-readable
error object on stderr. ``--json`` switches output to the document schemas.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import server, tools
from .errors import ToolkitError


def _emit(args, value, human: str | None = None) -> None:
    if getattr(args, "json", False) or human is None:
        print(json.dumps(value, indent=2, sort_keys=True))
    else:
        print(human)


def _call(name: str, arguments: dict):
    """Run a catalog tool, unwrapping the envelope into value-or-raise."""
    envelope = tools.call_tool(name, arguments)
    if envelope["status"] == "error":
        raise ToolkitCliError(envelope["error_kind"], envelope["message"])
    return envelope["value"]


class ToolkitCliError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


# --- command implementations --------------------------------------------------

def _cmd_workspace_init(args):
    value = _call("workspace_init", {"name": args.name})
    _emit(args, value, f"initialized workspace '{value['workspace']}' "
                       f"({len(value['subfolders'])} subfolders)")


def _cmd_workspace_list(args):
    value = _call("workspace_list", {})
    _emit(args, value, "\n".join(value["workspaces"]) or "(no workspaces)")


def _cmd_workspace_contents(args):
    value = _call("workspace_contents",
                  {"workspace": args.workspace, "subfolder": args.subfolder})
    _emit(args, value, "\n".join(value["documents"]) or "(empty)")


def _cmd_alloy_list(args):
    value = _call("alloy_list", {})
    _emit(args, value, "\n".join(value["alloys"]))


def _cmd_alloy_show(args):
    value = _call("alloy_show", {"name": args.name})
    lines = [f"{value['name']}"]
    lines.append("composition: " + ", ".join(
        f"{symbol} {fraction:.4g}" for symbol, fraction in value["composition"].items()))
    if value.get("properties"):
        lines.append("properties:")
        for key, prop in sorted(value["properties"].items()):
            lines.append(f"  {key}: {prop:g}")
    if value.get("aliases"):
        lines.append("aliases: " + ", ".join(value["aliases"]))
    _emit(args, value, "\n".join(lines))


def _cmd_material_compile(args):
    sources = [s for s in (args.alloy, args.composition, args.elements) if s]
    if len(sources) != 1:
        raise ToolkitCliError(
            "UsageError", "provide exactly one of --alloy, --composition, --elements")
    if args.alloy:
        saved = _call("composition_from_alloy",
                      {"workspace": args.workspace, "name": args.alloy})
        composition_filename = saved["ref"]["filename"]
    elif args.elements:
        try:
            elements = json.loads(args.elements)
        except json.JSONDecodeError as exc:
            raise ToolkitCliError("UsageError", f"--elements is not JSON: {exc}") from exc
        saved = _call("composition_save",
                      {"workspace": args.workspace, "elements": elements,
                       **({"name": args.name} if args.name else {})})
        composition_filename = saved["ref"]["filename"]
    else:
        composition_filename = args.composition
    request = {"workspace": args.workspace, "composition_filename": composition_filename}
    if args.provider:
        request["provider"] = args.provider
    value = _call("material_compile", request)
    material = value["material"]
    human = (
        f"compiled '{material['name']}' -> {value['ref']['subfolder']}/{value['ref']['filename']}\n"
        f"  k = {material['thermal_conductivity_w_mk']:g} W/(m K), "
        f"rho = {material['density_kg_m3']:g} kg/m3, "
        f"Cp = {material['specific_heat_j_kgk']:g} J/(kg K)\n"
        f"  resistivity = {material['electrical_resistivity_ohm_m']:g} ohm m, "
        f"absorptivity = {material['absorptivity']:.4f}\n"
        f"  solidus/liquidus/melting = {material['transitions']['solidus_k']:g} / "
        f"{material['transitions']['liquidus_k']:g} / "
        f"{material['transitions']['melting_k']:g} K"
    )
    _emit(args, value, human)


def _cmd_build_create(args):
    request = {
        "workspace": args.workspace,
        "beam_power_w": args.power,
        "scan_velocity_mm_s": args.velocity,
        "layer_height_um": args.layer,
        "hatch_spacing_um": args.hatch,
        "plate_temperature_k": args.plate,
    }
    if args.output:
        request["filename"] = args.output
    value = _call("build_config_save", request)
    _emit(args, value, f"saved build config -> build_configs/{value['ref']['filename']}")


def _cmd_meltpool_dims(args):
    value = _call("meltpool_dims", {
        "workspace": args.workspace,
        "material_filename": args.material,
        "power_w": args.power,
        "velocity_mm_s": args.velocity,
    })
    human = (
        f"width  {value['melt_width_um']:.2f} um\n"
        f"depth  {value['melt_depth_um']:.2f} um\n"
        f"length {value['melt_length_um']:.2f} um\n"
        f"trailing length {value['trailing_length_um']:.2f} um"
    )
    _emit(args, value, human)


def _parse_range(text: str) -> list[float]:
    # "100:1000:100" sweeps inclusively; "150,200,300" enumerates.
    if ":" in text:
        start, stop, step = (float(part) for part in text.split(":"))
        values, v = [], start
        while v <= stop + 1e-9:
            values.append(round(v, 9))
            v += step
        return values
    return [float(part) for part in text.split(",") if part]


def _cmd_processmap_init(args):
    request = {
        "workspace": args.workspace,
        "build_filename": args.build,
        "material_filename": args.material,
    }
    if args.powers:
        request["power_range_w"] = _parse_range(args.powers)
    if args.velocities:
        request["velocity_range_mm_s"] = _parse_range(args.velocities)
    if args.run:
        request["run_name"] = args.run
    value = _call("processmap_init", request)
    _emit(args, value, f"initialized process map -> process_maps/{value['ref']['filename']}")


def _cmd_processmap_generate(args):
    value = _call("processmap_generate",
                  {"workspace": args.workspace, "config_filename": args.config})
    lines = [f"generated process map -> process_maps/{value['ref']['filename']}"]
    for variant in value["variants"]:
        n_lof = len(variant["summary"]["lack_of_fusion"])
        n_ok = len(variant["summary"]["printable"])
        lines.append(
            f"  layer {variant['layer_height_um']:g} um: "
            f"{n_lof} lack-of-fusion / {n_ok} printable cells"
        )
    _emit(args, value, "\n".join(lines))


def _cmd_processmap_render(args):
    request = {"workspace": args.workspace, "result_filename": args.result}
    if args.output:
        request["output_path"] = args.output
    value = _call("processmap_render", request)
    _emit(args, value, f"wrote {value['path']}")


def _cmd_serve(args):
    server.serve()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpbfkit",
        description="Alloy printability toolkit: properties, melt pools, "
                    "lack-of-fusion process maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_json(p):
        p.add_argument("--json", action="store_true", help="emit the document schema as JSON")

    ws_cmd = sub.add_parser("workspace", help="workspace management")
    ws_sub = ws_cmd.add_subparsers(dest="subcommand", required=True)
    p = ws_sub.add_parser("init", help="create a workspace")
    p.add_argument("name")
    add_json(p)
    p.set_defaults(func=_cmd_workspace_init)
    p = ws_sub.add_parser("list", help="list workspaces")
    add_json(p)
    p.set_defaults(func=_cmd_workspace_list)
    p = ws_sub.add_parser("contents", help="list documents in a subfolder")
    p.add_argument("workspace")
    p.add_argument("subfolder")
    add_json(p)
    p.set_defaults(func=_cmd_workspace_contents)

    alloy_cmd = sub.add_parser("alloy", help="bundled alloy database")
    alloy_sub = alloy_cmd.add_subparsers(dest="subcommand", required=True)
    p = alloy_sub.add_parser("list", help="list known alloys")
    add_json(p)
    p.set_defaults(func=_cmd_alloy_list)
    p = alloy_sub.add_parser("show", help="show one alloy record")
    p.add_argument("name")
    add_json(p)
    p.set_defaults(func=_cmd_alloy_show)

    material_cmd = sub.add_parser("material", help="material compilation")
    material_sub = material_cmd.add_subparsers(dest="subcommand", required=True)
    p = material_sub.add_parser("compile", help="compile a material record")
    p.add_argument("--workspace", required=True)
    p.add_argument("--alloy", help="bundled alloy name or alias")
    p.add_argument("--composition", help="existing composition document filename")
    p.add_argument("--elements", help='inline composition JSON, e.g. \'{"Fe":0.9,"C":0.1}\'')
    p.add_argument("--name", help="display name for an inline composition")
    p.add_argument("--provider", choices=["alloy-table", "mixture-rule"])
    add_json(p)
    p.set_defaults(func=_cmd_material_compile)

    build_cmd = sub.add_parser("build", help="build configurations")
    build_sub = build_cmd.add_subparsers(dest="subcommand", required=True)
    p = build_sub.add_parser("create", help="save a build config")
    p.add_argument("--workspace", required=True)
    p.add_argument("--power", type=float, required=True, help="beam power in W")
    p.add_argument("--velocity", type=float, required=True, help="scan velocity in mm/s")
    p.add_argument("--layer", type=float, required=True, help="layer height in um")
    p.add_argument("--hatch", type=float, default=50.0, help="hatch spacing in um (default 50)")
    p.add_argument("--plate", type=float, default=298.15, help="plate temperature in K")
    p.add_argument("--output", help="target filename (default default.json)")
    add_json(p)
    p.set_defaults(func=_cmd_build_create)

    meltpool_cmd = sub.add_parser("meltpool", help="melt pool solver")
    meltpool_sub = meltpool_cmd.add_subparsers(dest="subcommand", required=True)
    p = meltpool_sub.add_parser("dims", help="melt pool dimensions at one setting")
    p.add_argument("--workspace", required=True)
    p.add_argument("--material", required=True, help="material document filename")
    p.add_argument("--power", type=float, required=True, help="beam power in W")
    p.add_argument("--velocity", type=float, required=True, help="scan velocity in mm/s")
    add_json(p)
    p.set_defaults(func=_cmd_meltpool_dims)

    pmap_cmd = sub.add_parser("processmap", help="lack-of-fusion process maps")
    pmap_sub = pmap_cmd.add_subparsers(dest="subcommand", required=True)
    p = pmap_sub.add_parser("init", help="initialize a run")
    p.add_argument("--workspace", required=True)
    p.add_argument("--build", required=True, help="build config filename")
    p.add_argument("--material", required=True, help="material document filename")
    p.add_argument("--powers", help='power grid in W: "100:1000:100" or "150,200,300"')
    p.add_argument("--velocities", help='velocity grid in mm/s, same syntax')
    p.add_argument("--run", help="run folder name (auto-numbered when omitted)")
    add_json(p)
    p.set_defaults(func=_cmd_processmap_init)
    p = pmap_sub.add_parser("generate", help="classify the grid")
    p.add_argument("--workspace", required=True)
    p.add_argument("--config", required=True, help="config filename, e.g. run-0001/config.json")
    add_json(p)
    p.set_defaults(func=_cmd_processmap_generate)
    p = pmap_sub.add_parser("render", help="render a result as a figure")
    p.add_argument("--workspace", required=True)
    p.add_argument("--result", required=True, help="result filename, e.g. run-0001/result.json")
    p.add_argument("--output", help="figure path (.svg)")
    add_json(p)
    p.set_defaults(func=_cmd_processmap_render)

    p = sub.add_parser("serve", help="run the JSON-RPC tool server on stdio")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ToolkitCliError as exc:
        print(json.dumps({"error_kind": exc.kind, "message": str(exc)}), file=sys.stderr)
        return 1
    except ToolkitError as exc:
        print(json.dumps({"error_kind": exc.kind, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
