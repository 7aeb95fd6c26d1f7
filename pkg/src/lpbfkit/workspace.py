"""Filesystem-backed workspaces: named document stores with typed subfolders.

Each workspace is a directory under a configurable root holding one fixed
subfolder per document family, so the output of one tool can be handed to
another by filename reference alone. Documents are JSON, written atomically,
validated on load against the subfolder's expected kind. Writers take an
advisory per-workspace lock; reads never lock.
"""

from __future__ import annotations

import fcntl
import json
import os
import re
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    DocumentNotFound,
    InvalidName,
    IoFailure,
    MalformedUri,
    SchemaMismatch,
    UnknownSubfolder,
    WorkspaceBusy,
    WorkspaceNotFound,
)

ROOT_ENV_VAR = "LPBFKIT_WORKSPACE_ROOT"
DEFAULT_ROOT = "./workspaces"

SUBFOLDERS = (
    "build_configs",
    "compositions",
    "materials",
    "phase_transition_temperatures",
    "process_maps",
    "property_diagrams",
)

SCHEMA_VERSION = 1

# Document kinds accepted per subfolder, and the keys a valid document of
# each kind must carry.
KINDS_BY_SUBFOLDER: dict[str, frozenset[str]] = {
    "compositions": frozenset({"composition"}),
    "materials": frozenset({"material"}),
    "build_configs": frozenset({"build_config"}),
    "phase_transition_temperatures": frozenset({"phase_transitions"}),
    "process_maps": frozenset({"process_map_config", "process_map_result"}),
    "property_diagrams": frozenset({"property_diagram"}),
}

REQUIRED_KEYS: dict[str, tuple[str, ...]] = {
    "composition": ("elements",),
    "material": (
        "name", "composition", "thermal_conductivity_w_mk", "density_kg_m3",
        "specific_heat_j_kgk", "electrical_resistivity_ohm_m", "absorptivity",
        "transitions", "evaluation_temperature_k",
    ),
    "build_config": (
        "beam_power_w", "scan_velocity_m_s", "hatch_spacing_m",
        "layer_height_m", "plate_temperature_k",
    ),
    "phase_transitions": ("solidus_k", "liquidus_k", "melting_k"),
    "process_map_config": (
        "material_ref", "build_ref", "power_range_w", "velocity_range_mm_s",
        "layer_height_offsets_um",
    ),
    "process_map_result": ("material_ref", "build_ref", "variants"),
    "property_diagram": (),
}

_NAME_RE = re.compile(r"^[A-Za-z0-9_-]+$")
_SEGMENT_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


def workspace_root() -> Path:
    return Path(os.environ.get(ROOT_ENV_VAR, DEFAULT_ROOT))


def _validate_workspace_name(name: str) -> str:
    if not isinstance(name, str) or not _NAME_RE.match(name):
        raise InvalidName(f"workspace name {name!r} must match [A-Za-z0-9_-]+")
    return name


def _validate_filename(filename: str) -> str:
    """Reject anything that could step outside its subfolder.

    A filename is one or more path segments; every segment must start with
    an alphanumeric character (which excludes '.', '..', and hidden files)
    and the final segment must end in .json.
    """
    if not isinstance(filename, str) or not filename or "\\" in filename or "\x00" in filename:
        raise InvalidName(f"bad document filename {filename!r}")
    segments = filename.split("/")
    if any(not _SEGMENT_RE.match(segment) for segment in segments):
        raise InvalidName(f"bad document filename {filename!r}")
    if not segments[-1].endswith(".json"):
        raise InvalidName(f"document filename {filename!r} must end in .json")
    return filename


@dataclass(frozen=True)
class Workspace:
    name: str
    root_path: Path

    @property
    def subfolders(self) -> tuple[str, ...]:
        return SUBFOLDERS


@dataclass(frozen=True)
class DocumentRef:
    """Addresses one JSON document: workspace, subfolder, filename.

    The filename may carry one or more safe path segments (process map runs
    live in per-run subdirectories) but can never resolve outside the
    workspace root.
    """

    workspace: str
    subfolder: str
    filename: str

    def __post_init__(self):
        _validate_workspace_name(self.workspace)
        if self.subfolder not in SUBFOLDERS:
            raise UnknownSubfolder(self.subfolder)
        _validate_filename(self.filename)

    def to_dict(self) -> dict[str, str]:
        return {
            "workspace": self.workspace,
            "subfolder": self.subfolder,
            "filename": self.filename,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DocumentRef":
        return cls(data["workspace"], data["subfolder"], data["filename"])

    def uri(self) -> str:
        return f"workspace://{self.workspace}/{self.subfolder}/{self.filename}"


def _workspace_path(name: str, must_exist: bool = True) -> Path:
    _validate_workspace_name(name)
    path = workspace_root() / name
    if must_exist and not path.is_dir():
        raise WorkspaceNotFound(name)
    return path


def _document_path(ref: DocumentRef, must_exist: bool = False) -> Path:
    ws_path = _workspace_path(ref.workspace)
    path = ws_path / ref.subfolder / ref.filename
    root = ws_path.resolve()
    if not path.resolve().is_relative_to(root):
        raise InvalidName(f"{ref.filename!r} escapes the workspace root")
    if must_exist and not path.is_file():
        raise DocumentNotFound(f"no document at {ref.uri()}")
    return path


def init_workspace(name: str) -> Workspace:
    """Create a workspace and its subfolders; re-initializing is a no-op."""
    _validate_workspace_name(name)
    path = workspace_root() / name
    try:
        for subfolder in SUBFOLDERS:
            (path / subfolder).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create workspace '{name}': {exc}") from exc
    return Workspace(name=name, root_path=path)


def list_workspaces() -> list[str]:
    root = workspace_root()
    if not root.is_dir():
        return []
    try:
        return sorted(
            entry.name for entry in root.iterdir()
            if entry.is_dir() and _NAME_RE.match(entry.name)
        )
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def list_contents(workspace: str, subfolder: str) -> list[str]:
    """Sorted .json filenames in a subfolder (recursing into run directories)."""
    ws_path = _workspace_path(workspace)
    if subfolder not in SUBFOLDERS:
        raise UnknownSubfolder(subfolder)
    folder = ws_path / subfolder
    if not folder.is_dir():
        return []
    return sorted(
        p.relative_to(folder).as_posix()
        for p in folder.rglob("*.json")
        if p.is_file()
    )


@contextmanager
def write_lock(workspace: str):
    """Advisory single-writer lock for a workspace; contention raises
    ``WorkspaceBusy`` (retryable) rather than blocking."""
    ws_path = _workspace_path(workspace)
    lock_path = ws_path / ".lock"
    fd = os.open(lock_path, os.O_RDWR | os.O_CREAT, 0o644)
    try:
        try:
            fcntl.flock(fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except BlockingIOError:
            raise WorkspaceBusy(f"workspace '{workspace}' is locked by another writer") from None
        yield
    finally:
        os.close(fd)


def save_document(ref: DocumentRef, payload: dict) -> DocumentRef:
    """Atomically write a document (temp file then rename) under the lock.

    Injects ``schema_version`` when absent. Last writer wins; readers never
    observe a partial file.
    """
    if not isinstance(payload, dict):
        raise IoFailure(f"document payload must be a mapping, got {type(payload).__name__}")
    path = _document_path(ref)
    document = dict(payload)
    document.setdefault("schema_version", SCHEMA_VERSION)
    try:
        text = json.dumps(document, indent=2, sort_keys=True)
    except (TypeError, ValueError) as exc:
        raise IoFailure(f"document is not JSON-serializable: {exc}") from exc
    with write_lock(ref.workspace):
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp_path = path.with_suffix(".json.tmp")
            tmp_path.write_text(text, encoding="utf-8")
            os.replace(tmp_path, path)
        except OSError as exc:
            raise IoFailure(f"cannot write {ref.uri()}: {exc}") from exc
    return ref


def load_document(ref: DocumentRef) -> dict:
    """Read a document and check it carries a kind the subfolder accepts."""
    path = _document_path(ref, must_exist=True)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailure(f"cannot read {ref.uri()}: {exc}") from exc
    expected = KINDS_BY_SUBFOLDER[ref.subfolder]
    found = document.get("kind") if isinstance(document, dict) else None
    if found not in expected:
        raise SchemaMismatch(" or ".join(sorted(expected)), str(found))
    missing = [key for key in REQUIRED_KEYS.get(found, ()) if key not in document]
    if missing:
        raise SchemaMismatch(found, f"{found} missing keys {missing}")
    return document


_URI_RE = re.compile(r"^workspace://([A-Za-z0-9_-]+)/([A-Za-z0-9_]+)/(.*)$")


def parse_resource_uri(uri: str) -> tuple[str, str, str | None]:
    """Split ``workspace://<ws>/<subfolder>/[<filename>]`` into parts."""
    if not isinstance(uri, str):
        raise MalformedUri(f"resource URI must be a string, got {type(uri).__name__}")
    match = _URI_RE.match(uri)
    if not match:
        raise MalformedUri(f"not a workspace resource URI: {uri!r}")
    workspace, subfolder, rest = match.groups()
    if subfolder not in SUBFOLDERS:
        raise MalformedUri(f"unknown subfolder {subfolder!r} in {uri!r}")
    if not rest:
        return workspace, subfolder, None
    _validate_filename(rest)
    return workspace, subfolder, rest
