class CapaxError(Exception):
    """Domain error: invalid input or violated precondition."""


class ResourceLimitError(CapaxError):
    """A configured enumeration or memory limit would be exceeded."""
