"""Exception taxonomy shared across the package.

Each class maps to a distinct CLI exit code (see ``markovgap.cli``), so
library code should raise the most specific one that applies.
"""


class MarkovGapError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(MarkovGapError):
    """Malformed or semantically invalid run configuration."""


class GeometryError(MarkovGapError):
    """Regions or smoother supports that do not fit the lattice."""


class NumericError(MarkovGapError):
    """Corrupt numerical input (non-Hermitian covariance, bad spectrum, ...)."""


class ConvergenceError(MarkovGapError):
    """Optimization terminated without meeting its convergence target."""
