"""Newline-delimited JSON-RPC 2.0 server over stdio exposing the tool catalog.

One JSON message per line, one response per request id, requests handled
strictly in arrival order. Malformed JSON and protocol misuse produce
JSON-RPC errors; tool failures stay in-band as status envelopes so a client
can always distinguish "the call reached the tool and it refused" from "the
call never made sense".

Resources mirror the listing tools read-only under
``workspace://<workspace>/<subfolder>/[<filename>]`` URIs.
"""

from __future__ import annotations

import json
import sys

from . import tools
from . import workspace as ws
from .errors import DocumentNotFound, MalformedUri, ToolkitError

PROTOCOL_VERSION = "2025-03-26"
SERVER_INFO = {"name": "lpbfkit", "version": "0.1.0"}

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
NOT_INITIALIZED = -32002
RESOURCE_ERROR = -32003


def _dumps(message: dict) -> str:
    return json.dumps(message, sort_keys=True, separators=(",", ":"))


def _result(request_id, payload: dict) -> dict:
    return {"jsonrpc": "2.0", "id": request_id, "result": payload}


def _error(request_id, code: int, message: str) -> dict:
    return {"jsonrpc": "2.0", "id": request_id, "error": {"code": code, "message": message}}


def _list_resources() -> list[dict]:
    resources = []
    for workspace in ws.list_workspaces():
        for subfolder in ws.SUBFOLDERS:
            resources.append({
                "uri": f"workspace://{workspace}/{subfolder}/",
                "name": f"{workspace}/{subfolder}",
                "description": f"JSON documents in the {subfolder} subfolder "
                               f"of workspace {workspace}",
            })
    return resources


def _read_resource(uri: str) -> dict:
    workspace, subfolder, filename = ws.parse_resource_uri(uri)
    if filename is None:
        listing = ws.list_contents(workspace, subfolder)
        return {
            "uri": uri,
            "listing": {
                "workspace": workspace,
                "subfolder": subfolder,
                "documents": listing,
            },
        }
    document = ws.load_document(ws.DocumentRef(workspace, subfolder, filename))
    return {"uri": uri, "document": document}


class Server:
    """Dispatches one parsed JSON-RPC message at a time."""

    def __init__(self):
        self.initialized = False
        self.client_protocol_version = None

    def handle_line(self, line: str) -> str | None:
        """Response line for one request line, or None for notifications."""
        line = line.strip()
        if not line:
            return None
        try:
            message = json.loads(line)
        except json.JSONDecodeError:
            return _dumps(_error(None, PARSE_ERROR, "Parse error"))
        response = self.handle_message(message)
        return _dumps(response) if response is not None else None

    def handle_message(self, message) -> dict | None:
        if not isinstance(message, dict) or message.get("jsonrpc") != "2.0":
            return _error(None, INVALID_REQUEST, "Invalid Request")
        request_id = message.get("id")
        method = message.get("method")
        is_notification = "id" not in message
        if not isinstance(method, str):
            return None if is_notification else _error(
                request_id, INVALID_REQUEST, "Invalid Request")

        try:
            payload = self._dispatch(method, message.get("params") or {})
        except _ProtocolError as exc:
            return None if is_notification else _error(request_id, exc.code, exc.message)
        return None if is_notification else _result(request_id, payload)

    def _dispatch(self, method: str, params) -> dict:
        if not isinstance(params, dict):
            raise _ProtocolError(INVALID_PARAMS, "params must be an object")

        if method == "initialize":
            self.initialized = True
            self.client_protocol_version = params.get("protocolVersion")
            return {
                "protocolVersion": PROTOCOL_VERSION,
                "capabilities": {"tools": {}, "resources": {}},
                "serverInfo": SERVER_INFO,
            }
        if method == "notifications/initialized":
            return {}

        if not self.initialized:
            raise _ProtocolError(NOT_INITIALIZED, "server not initialized")

        if method == "tools/list":
            return {"tools": tools.descriptors()}
        if method == "tools/call":
            name = params.get("name")
            if not isinstance(name, str):
                raise _ProtocolError(INVALID_PARAMS, "tools/call requires a tool name")
            arguments = params.get("arguments") or {}
            if not isinstance(arguments, dict):
                raise _ProtocolError(INVALID_PARAMS, "tool arguments must be an object")
            return tools.call_tool(name, arguments)
        if method == "resources/list":
            return {"resources": _list_resources()}
        if method == "resources/read":
            uri = params.get("uri")
            if not isinstance(uri, str):
                raise _ProtocolError(INVALID_PARAMS, "resources/read requires a uri")
            try:
                return _read_resource(uri)
            except MalformedUri as exc:
                raise _ProtocolError(INVALID_PARAMS, str(exc)) from exc
            except ToolkitError as exc:
                raise _ProtocolError(RESOURCE_ERROR, f"{exc.kind}: {exc}") from exc
        raise _ProtocolError(METHOD_NOT_FOUND, f"Method not found: {method}")


class _ProtocolError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def serve(stdin=None, stdout=None) -> None:
    """Run the request loop until the input stream closes."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    server = Server()
    for line in stdin:
        response = server.handle_line(line)
        if response is not None:
            stdout.write(response + "\n")
            stdout.flush()


def main() -> int:
    serve()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
