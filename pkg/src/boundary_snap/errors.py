"""Exceptions raised by the snapshot tooling (as opposed to MiniLang itself)."""


class BoundarySnapError(Exception):
    pass


class FormatError(BoundarySnapError):
    """A persisted file does not follow its format."""

    def __init__(self, message: str, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class TruncatedSnapshot(FormatError):
    """A snapshot file without footer; ``partial`` holds what was readable."""

    def __init__(self, message: str, partial, path=None):
        self.partial = partial
        super().__init__(message, path)


class SerializeError(BoundarySnapError):
    pass


class FingerprintMismatch(BoundarySnapError):
    pass


class TestIdMismatch(BoundarySnapError):
    __test__ = False


class UnknownTarget(BoundarySnapError):
    pass


class EmptyMatrix(BoundarySnapError):
    pass


class PreconditionError(BoundarySnapError):
    pass
