from __future__ import annotations

import json
import os
import random

import pytest

from lpbfkit import workspace as ws
from lpbfkit.errors import (
    DocumentNotFound,
    InvalidName,
    IoFailure,
    MalformedUri,
    SchemaMismatch,
    UnknownSubfolder,
    WorkspaceBusy,
    WorkspaceNotFound,
)


class TestInitWorkspace:
    def test_creates_all_subfolders(self, workspace_root):
        workspace = ws.init_workspace("demo")
        assert len(workspace.subfolders) == 6
        for subfolder in workspace.subfolders:
            assert (workspace_root / "demo" / subfolder).is_dir()

    def test_idempotent(self, workspace_root):
        ws.init_workspace("demo")
        ref = ws.DocumentRef("demo", "compositions", "a.json")
        ws.save_document(ref, {"kind": "composition", "elements": {"Fe": 1.0}})
        ws.init_workspace("demo")
        assert ws.load_document(ref)["elements"] == {"Fe": 1.0}

    @pytest.mark.parametrize("bad", ["../evil", "a/b", "", "name with spaces", ".hidden"])
    def test_traversal_and_bad_names_rejected(self, workspace_root, bad):
        with pytest.raises(InvalidName):
            ws.init_workspace(bad)


class TestListWorkspaces:
    def test_fresh_root_empty(self, workspace_root):
        assert ws.list_workspaces() == []

    def test_sorted_after_init(self, workspace_root):
        ws.init_workspace("beta")
        ws.init_workspace("alpha")
        assert ws.list_workspaces() == ["alpha", "beta"]

    def test_non_directories_ignored(self, workspace_root):
        ws.init_workspace("demo")
        (workspace_root / "stray.txt").write_text("not a workspace")
        assert ws.list_workspaces() == ["demo"]


class TestListContents:
    def test_empty_subfolder(self, demo_workspace):
        assert ws.list_contents("demo", "materials") == []

    def test_contains_saved_document(self, demo_workspace):
        ws.save_document(
            ws.DocumentRef("demo", "compositions", "x.json"),
            {"kind": "composition", "elements": {"Fe": 1.0}},
        )
        assert ws.list_contents("demo", "compositions") == ["x.json"]

    def test_recurses_into_run_directories(self, demo_workspace):
        ws.save_document(
            ws.DocumentRef("demo", "process_maps", "run-0001/config.json"),
            {"kind": "process_map_config", "material_ref": {}, "build_ref": {},
             "power_range_w": [100], "velocity_range_mm_s": [100],
             "layer_height_offsets_um": [-25, 0, 25]},
        )
        assert ws.list_contents("demo", "process_maps") == ["run-0001/config.json"]

    def test_unknown_subfolder(self, demo_workspace):
        with pytest.raises(UnknownSubfolder):
            ws.list_contents("demo", "secrets")

    def test_missing_workspace(self, workspace_root):
        with pytest.raises(WorkspaceNotFound):
            ws.list_contents("nope", "materials")

    def test_listing_is_read_only(self, demo_workspace, workspace_root):
        ref = ws.DocumentRef("demo", "compositions", "x.json")
        ws.save_document(ref, {"kind": "composition", "elements": {"Fe": 1.0}})
        path = workspace_root / "demo" / "compositions" / "x.json"
        before = (path.stat().st_mtime_ns, path.read_bytes())
        ws.list_contents("demo", "compositions")
        ws.list_workspaces()
        assert (path.stat().st_mtime_ns, path.read_bytes()) == before


class TestSaveLoad:
    def test_round_trip(self, demo_workspace):
        ref = ws.DocumentRef("demo", "compositions", "x.json")
        payload = {"kind": "composition", "elements": {"Fe": 0.9, "C": 0.1}}
        ws.save_document(ref, payload)
        loaded = ws.load_document(ref)
        assert loaded["elements"] == payload["elements"]
        assert loaded["schema_version"] == ws.SCHEMA_VERSION

    def test_schema_gate_on_load(self, demo_workspace):
        # A composition document stored under materials fails the kind check.
        ref = ws.DocumentRef("demo", "materials", "x.json")
        ws.save_document(ref, {"kind": "composition", "elements": {"Fe": 1.0}})
        with pytest.raises(SchemaMismatch) as excinfo:
            ws.load_document(ref)
        assert excinfo.value.expected == "material"
        assert excinfo.value.found == "composition"

    def test_missing_required_keys_rejected(self, demo_workspace):
        ref = ws.DocumentRef("demo", "materials", "x.json")
        ws.save_document(ref, {"kind": "material", "name": "incomplete"})
        with pytest.raises(SchemaMismatch):
            ws.load_document(ref)

    def test_load_missing(self, demo_workspace):
        with pytest.raises(DocumentNotFound):
            ws.load_document(ws.DocumentRef("demo", "materials", "nope.json"))

    def test_overwrite_replaces_content(self, demo_workspace):
        ref = ws.DocumentRef("demo", "compositions", "x.json")
        ws.save_document(ref, {"kind": "composition", "elements": {"Fe": 1.0}})
        ws.save_document(ref, {"kind": "composition", "elements": {"Cu": 1.0}})
        assert ws.load_document(ref)["elements"] == {"Cu": 1.0}

    def test_crash_at_rename_preserves_original(self, demo_workspace):
        from unittest import mock

        ref = ws.DocumentRef("demo", "compositions", "x.json")
        ws.save_document(ref, {"kind": "composition", "elements": {"Fe": 1.0}})
        with mock.patch.object(os, "replace",
                               side_effect=OSError("simulated crash at the rename point")):
            with pytest.raises(IoFailure):
                ws.save_document(ref, {"kind": "composition", "elements": {"Cu": 1.0}})
        assert ws.load_document(ref)["elements"] == {"Fe": 1.0}
        # The leftover temp file never shows up in listings.
        assert ws.list_contents("demo", "compositions") == ["x.json"]

    def test_non_mapping_payload_rejected(self, demo_workspace):
        with pytest.raises(IoFailure):
            ws.save_document(ws.DocumentRef("demo", "compositions", "x.json"), [1, 2])

    def test_workspace_must_exist(self, workspace_root):
        with pytest.raises(WorkspaceNotFound):
            ws.save_document(
                ws.DocumentRef("ghost", "compositions", "x.json"),
                {"kind": "composition", "elements": {"Fe": 1.0}},
            )


class TestWriteLock:
    def test_busy_when_held(self, demo_workspace):
        with ws.write_lock("demo"):
            with pytest.raises(WorkspaceBusy):
                with ws.write_lock("demo"):
                    pass

    def test_released_after_use(self, demo_workspace):
        with ws.write_lock("demo"):
            pass
        with ws.write_lock("demo"):
            pass


class TestParseResourceUri:
    def test_subfolder_listing_uri(self):
        assert ws.parse_resource_uri("workspace://demo/materials/") == (
            "demo", "materials", None)

    def test_document_uri(self):
        assert ws.parse_resource_uri("workspace://demo/materials/ss.json") == (
            "demo", "materials", "ss.json")

    def test_nested_document_uri(self):
        assert ws.parse_resource_uri(
            "workspace://demo/process_maps/run-0001/config.json"
        ) == ("demo", "process_maps", "run-0001/config.json")

    @pytest.mark.parametrize("bad", [
        "http://x", "workspace://demo", "workspace://demo/materials",
        "workspace://demo/secrets/", "workspace://../x/materials/",
        "workspace://demo/materials/../../../etc/passwd",
        "", "workspace:///materials/",
    ])
    def test_malformed(self, bad):
        with pytest.raises((MalformedUri, InvalidName)):
            ws.parse_resource_uri(bad)


TRAVERSAL_TOKENS = [
    "..", ".", "../", "..\\", "/", "\\", "etc", "passwd", "~", "$HOME", "%2e%2e",
    "..%2f", "a", "run-0001", "config", ".hidden", "x.json", "..json", "\x00",
    "con", "-", "_",
]


def _fuzz_filename(rng: random.Random) -> str:
    parts = [rng.choice(TRAVERSAL_TOKENS) for _ in range(rng.randint(1, 4))]
    name = rng.choice(["/", "", "\\"]).join(parts)
    if rng.random() < 0.5:
        name += ".json"
    if rng.random() < 0.2:
        name = "/" + name
    return name


class TestTraversalSafety:
    def test_fuzzed_filenames_never_escape(self, demo_workspace, workspace_root):
        rng = random.Random(1234)
        outside = workspace_root.parent
        before = set(outside.rglob("*"))
        payload = {"kind": "composition", "elements": {"Fe": 1.0}}
        for _ in range(1000):
            name = _fuzz_filename(rng)
            try:
                ref = ws.DocumentRef("demo", "compositions", name)
                ws.save_document(ref, payload)
                path = workspace_root / "demo" / "compositions" / name
                assert path.resolve().is_relative_to((workspace_root / "demo").resolve())
            except (InvalidName, UnknownSubfolder, IoFailure):
                continue
        created = {p for p in outside.rglob("*") if p not in before}
        for path in created:
            assert path.resolve().is_relative_to(workspace_root.resolve())
