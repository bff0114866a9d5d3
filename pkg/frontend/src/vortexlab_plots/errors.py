"""Error types for the figure pipeline."""


class PlotsError(Exception):
    """Base class for figure-pipeline failures."""


class SchemaMismatch(PlotsError):
    """Input file does not parse against the documented CSV schema."""


class MissingColumn(PlotsError):
    """A column referenced by the figure spec is absent from the header."""
