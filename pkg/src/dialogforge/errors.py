"""Shared exception hierarchy."""


class DialogForgeError(Exception):
    """Base class for all toolkit errors."""

    code = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        doc = {"error": self.code, "detail": self.message}
        if self.details:
            doc.update(self.details)
        return doc
