"""Error types that the command line maps to distinct exit codes."""


class ValidationError(ValueError):
    """Input data fails a structural or algebraic validity check."""


class ObstructionError(ValueError):
    """The requested construction does not exist (mathematical obstruction)."""


class ResourceBoundError(RuntimeError):
    """A configured enumeration or retry bound was exceeded."""
