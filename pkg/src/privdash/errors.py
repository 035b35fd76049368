"""Exception hierarchy shared by the engine and the service layer.

Every error carries a machine-readable ``code`` slug; validation errors
additionally carry the dotted path of the offending field so API clients
can point at the exact input that was rejected.
"""

from __future__ import annotations


class PrivdashError(Exception):
    """Base class for all engine and service errors."""

    code = "error"

    def __init__(self, message: str, *, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    @property
    def message(self) -> str:
        return str(self)


class ValidationError(PrivdashError):
    """Input rejected before any state change (maps to HTTP 400)."""

    code = "invalid"

    def __init__(self, message: str, *, field: str | None = None, code: str | None = None):
        super().__init__(message, code=code)
        self.field = field


class AuthError(PrivdashError):
    """Owner authentication failed or is not configured (maps to HTTP 401)."""

    code = "auth-failed"


class ConflictError(PrivdashError):
    """Operation is valid in general but not in the current state (HTTP 409)."""

    code = "conflict"


class NotFoundError(PrivdashError):
    """Referenced entity does not exist (HTTP 404)."""

    code = "not-found"


class DestinationError(PrivdashError):
    """Backup destination unreachable or unwritable (HTTP 502)."""

    code = "destination-unreachable"


class IntegrityError(PrivdashError):
    """Archive or blob failed checksum / schema verification (HTTP 400)."""

    code = "integrity"


class SettingsCorruptError(PrivdashError):
    """Persisted settings cannot be loaded; the service refuses to start."""

    code = "settings-corrupt"
