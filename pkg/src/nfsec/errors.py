"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class DomainError(ValueError):
    """Input lies outside an operation's mathematical domain."""


class GeometryError(ValueError):
    """Array geometry or receiver placement is physically invalid."""


class NumericalError(RuntimeError):
    """An iterative numerical kernel failed to converge."""


class ConfigError(ValueError):
    """Scenario configuration failed validation.

    Carries the full list of violations so callers can report all of
    them at once instead of fixing one field at a time.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
