"""Exceptions shared across the toolkit."""


class CapExceeded(Exception):
    """A configured size or budget cap would be exceeded."""


class InternalInvariantError(Exception):
    """An internal consistency check failed; indicates a bug, not bad input."""
