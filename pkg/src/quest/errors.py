"""Shared exception hierarchy.

Every error raised on purpose by this package derives from QuestError, so
callers (including the CLI) can distinguish "the tool told you no" from a
genuine bug.
"""


class QuestError(Exception):
    """Base class for all package errors."""


class ToolUnavailable(QuestError):
    """An external executable (interpreter, linter, ...) could not be run."""

    def __init__(self, tool: str, detail: str = ""):
        self.tool = tool
        message = f"required tool not available: {tool}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class UnsupportedLanguage(QuestError):
    """The requested operation has no handler for this language tag."""
