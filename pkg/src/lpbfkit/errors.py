"""Exception vocabulary shared across the toolkit.

Every error exposes a stable ``kind`` string (its class name) that the CLI
and the tool server use for machine-readable failure reporting.
"""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    @property
    def kind(self) -> str:
        return type(self).__name__


# --- composition parsing and alloy lookup ---------------------------------

class EmptyComposition(ToolkitError):
    pass


class UnknownElement(ToolkitError):
    def __init__(self, symbol: str):
        super().__init__(f"'{symbol}' is not a chemical element symbol")
        self.symbol = symbol


class NonPositiveFraction(ToolkitError):
    def __init__(self, symbol: str, value):
        super().__init__(f"fraction for '{symbol}' must be a positive finite number, got {value!r}")
        self.symbol = symbol


class AlloyNotFound(ToolkitError):
    def __init__(self, name: str, suggestions: list[str]):
        hint = f"; closest matches: {', '.join(suggestions)}" if suggestions else ""
        super().__init__(f"no bundled alloy named '{name}'{hint}")
        self.name = name
        self.suggestions = suggestions


# --- property providers ----------------------------------------------------

class ElementDataMissing(ToolkitError):
    def __init__(self, symbol: str):
        super().__init__(f"no bundled property data for element '{symbol}'")
        self.symbol = symbol


class TransitionsOutOfRange(ToolkitError):
    """Liquid fraction never crosses a threshold inside the sweep window."""


class NonPositiveInput(ToolkitError):
    pass


class ResultOutOfUnitInterval(ToolkitError):
    """Absorptivity left (0, 1); inputs are outside the model's physical domain."""


# --- melt pool solver -------------------------------------------------------

class OriginSingularity(ToolkitError):
    """The point-source temperature field diverges at the origin."""


class NonPositiveDeltaT(ToolkitError):
    pass


class MeltPoolVanishes(ToolkitError):
    """No sweep point yields a melt pool boundary at this resolution."""


# --- process map ------------------------------------------------------------

class ZeroMeltPoolDimension(ToolkitError):
    pass


class InvalidRange(ToolkitError):
    pass


# --- workspace ---------------------------------------------------------------

class InvalidName(ToolkitError):
    pass


class IoFailure(ToolkitError):
    pass


class WorkspaceNotFound(ToolkitError):
    def __init__(self, name: str):
        super().__init__(f"workspace '{name}' does not exist")
        self.name = name


class UnknownSubfolder(ToolkitError):
    def __init__(self, name: str):
        super().__init__(f"'{name}' is not a workspace subfolder")
        self.name = name


class DocumentNotFound(ToolkitError):
    pass


class SchemaMismatch(ToolkitError):
    def __init__(self, expected: str, found: str):
        super().__init__(f"expected a {expected} document, found {found}")
        self.expected = expected
        self.found = found


class MalformedUri(ToolkitError):
    pass


class WorkspaceBusy(ToolkitError):
    """Another writer holds the workspace lock; the operation is retryable."""


class UnwritablePath(ToolkitError):
    pass
