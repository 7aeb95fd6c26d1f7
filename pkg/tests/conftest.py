from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lpbfkit import workspace as ws  # noqa: E402


@pytest.fixture()
def workspace_root(tmp_path, monkeypatch) -> Path:
    """Point the workspace root at a per-test temporary directory."""
    root = tmp_path / "workspaces"
    monkeypatch.setenv(ws.ROOT_ENV_VAR, str(root))
    return root


@pytest.fixture()
def demo_workspace(workspace_root) -> str:
    ws.init_workspace("demo")
    return "demo"
