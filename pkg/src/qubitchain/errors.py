class ConfigError(ValueError):
    """Invalid parameter value; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class NumericalValidityError(RuntimeError):
    """A run produced results that cannot be trusted."""


class EdgeContactError(NumericalValidityError):
    """The wave packet reached the open ends of the lattice."""


class TruncationError(NumericalValidityError):
    """Photon-number truncation discards too much coherent-state weight."""
