"""Shared error taxonomy.

Every module raises from this hierarchy so the HTTP layer can map
failures to status codes in one place and the CLI can surface them
verbatim.
"""

from __future__ import annotations


class GlasspassError(Exception):
    """Base class for all platform errors."""


class InvalidArgument(GlasspassError):
    """A caller-supplied value violates a precondition."""


class NotFound(GlasspassError):
    """The referenced object does not exist."""


class Unauthenticated(GlasspassError):
    """No registered principal matches the presented identity."""


class Unauthorized(GlasspassError):
    """The principal is known but the action is denied."""


class Conflict(GlasspassError):
    """The request collides with existing state (duplicate CHI, ...)."""


class DuplicateEntry(Conflict):
    """An append-once record was submitted twice."""


class Erased(GlasspassError):
    """The referenced mapping was erased; only the tombstone remains."""

    def __init__(self, message: str, erased_at: int | None = None):
        super().__init__(message)
        self.erased_at = erased_at


class IntegrityViolation(GlasspassError):
    """Stored bytes no longer match their digest or hash link."""

    def __init__(self, message: str, *, cid: str | None = None, height: int | None = None):
        super().__init__(message)
        self.cid = cid
        self.height = height


class StorageError(GlasspassError):
    """The block store could not complete an IO operation."""


class ConfigurationError(GlasspassError):
    """Startup configuration is missing or unresolvable."""
