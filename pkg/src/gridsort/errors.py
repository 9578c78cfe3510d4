"""Exception types shared across the engine."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for errors raised by this package."""


class RootNotFound(EngineError):
    """A scan root does not exist or is not a directory."""

    def __init__(self, path: str):
        super().__init__(f"scan root not found: {path}")
        self.path = path


class PermissionDenied(EngineError):
    """A root or subdirectory could not be read."""

    def __init__(self, path: str):
        super().__init__(f"permission denied: {path}")
        self.path = path


class DecodeError(EngineError):
    """A file could not be decoded into pixels; the record stays listed."""

    def __init__(self, path: str, cause: Exception | None = None):
        super().__init__(f"cannot decode {path}: {cause}")
        self.path = path
        self.cause = cause


class DegenerateData(EngineError):
    """Input rows carry no variance to fit a projection on."""


class DimensionMismatch(EngineError):
    """Vector length does not match the fitted model."""


class InsufficientLabels(EngineError):
    """Retrieval evaluation needs at least 2 labels with 2 members each."""


class UnknownId(EngineError):
    """An image id does not resolve to a descriptor."""

    def __init__(self, image_id: str):
        super().__init__(f"unknown image id: {image_id}")
        self.image_id = image_id


class EmptyQuerySet(EngineError):
    """A query edit would leave no query images."""


class NonFiniteInput(EngineError):
    """Vector contains NaN or infinity."""


class CorruptIndex(EngineError):
    """The on-disk index failed to parse; callers rebuild from scratch."""

    def __init__(self, offset: int, reason: str = ""):
        super().__init__(f"corrupt index at byte {offset}: {reason}")
        self.offset = offset
        self.reason = reason
