"""Exception types shared across the toolkit."""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class GroupMismatchError(ToolkitError):
    """Operands belong to different group specs."""


class ResourceLimitError(ToolkitError):
    """An enumeration or statevector would exceed the configured bound."""


class ParameterError(ToolkitError, ValueError):
    """Hash parameters are inconsistent or out of range."""


class NoCollisionError(ToolkitError):
    """A forgery was requested from a hash whose kernel is trivial."""
