"""Exception hierarchy shared across the package."""


class MotifEvalError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(MotifEvalError):
    """A file does not conform to its expected text format."""


class ValidationError(MotifEvalError):
    """Parsed content violates a semantic invariant."""


class PlacementError(ValidationError):
    """A motif segment placement is out of bounds or overlaps another."""


class SetSizeError(ValidationError):
    """A scaffold set does not contain the required number of scaffolds."""


class DimensionError(MotifEvalError):
    """Coordinate lists passed to an alignment do not match in length."""


class UnderDeterminedError(MotifEvalError):
    """Too few points to determine a rigid superposition."""


class BackendError(MotifEvalError):
    """Base class for tool-backend problems."""


class BackendFailure(BackendError):
    """An external tool exited abnormally.

    Carries the captured diagnostics so failures can be reported without
    re-running the tool.
    """

    def __init__(self, message, returncode=None, stderr=None):
        super().__init__(message)
        self.returncode = returncode
        self.stderr = stderr

    def __str__(self):
        base = super().__str__()
        parts = [base]
        if self.returncode is not None:
            parts.append(f"exit code {self.returncode}")
        if self.stderr:
            parts.append(f"stderr: {self.stderr.strip()}")
        return " | ".join(parts)


class BackendTimeout(BackendFailure):
    """An external tool exceeded its configured time budget."""


class ProtocolViolation(BackendError):
    """A backend response violates the harness protocol.

    Raised before any offending value reaches the metrics, e.g. a designed
    sequence that changes a fixed motif position or a prediction with the
    wrong residue count.
    """


class ConfigurationError(MotifEvalError):
    """A run configuration is unusable (missing files, bad descriptors)."""


class IncompleteRunError(MotifEvalError):
    """An evaluation stopped before all scaffolds were scored.

    Partial results live in the run directory; rerunning with the same
    configuration resumes from the cache instead of starting over.
    """
