class ValidationError(ValueError):
    """Bad input. ``field`` names the offending field when one applies."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class CapError(ValueError):
    """A size cap (qubits, bits, table entries) would be exceeded."""
