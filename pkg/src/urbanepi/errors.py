"""Exception types shared across the package."""


class UrbanEpiError(Exception):
    """Base class for all package errors."""


class ParseError(UrbanEpiError):
    """Input file could not be parsed at all."""


class ValidationError(UrbanEpiError):
    """Parsed input violates the documented schema or invariants."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class ConfigError(UrbanEpiError):
    """Scenario configuration is missing or inconsistent."""


class AssignmentError(UrbanEpiError):
    """No suitable sublocation exists for a required assignment."""


class MissingAnchor(UrbanEpiError):
    """A pattern requires an anchor sublocation the person does not have."""


class SpecError(UrbanEpiError):
    """Synthetic city specification is invalid."""


class InsufficientSusceptibles(UrbanEpiError):
    """More seed infections requested than susceptible persons available."""
