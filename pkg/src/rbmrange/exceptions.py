"""Exception types raised across the package.

Grouped loosely by origin: geometry, simulation, estimation, validation,
and input handling.  CLI maps these onto process exit codes (see cli.py).
"""


class RbmRangeError(Exception):
    """Base class for all package errors."""


# geometry

class AmbiguousProjection(RbmRangeError):
    """Boundary projection has two candidates at indistinguishable distance."""


class DegenerateInput(RbmRangeError):
    """Input point set is degenerate (e.g. collinear) for hull construction."""


class EmptySet(RbmRangeError):
    """An operation received an empty point set where one is required."""


# simulation

class StartOutsideDomain(RbmRangeError):
    """Initial position of a simulation is not inside the domain."""


class NonFiniteDrift(RbmRangeError):
    """Drift evaluation produced a non-finite value during simulation."""


# estimation

class EmptyLevelSet(RbmRangeError):
    """No grid node exceeds the requested level."""


class EmptyLevelSample(RbmRangeError):
    """No sample point exceeds the requested level."""


class NoLocalSamples(RbmRangeError):
    """No trajectory point falls in the local ball; enlarge the radius."""


class DensityBelowFloor(RbmRangeError):
    """Density value at the query point is below the division guard."""


class NonDifferentiablePoint(RbmRangeError):
    """Kernel gradient is undefined at the requested offset."""


class NoInteriorNodes(RbmRangeError):
    """No grid node qualifies as interior at the requested margin."""


# validation

class QuadratureNotConverged(RbmRangeError):
    """Richardson doubling check failed for a quadrature value."""


# input handling

class ParseError(RbmRangeError):
    """A data file failed to parse.  Carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonMonotoneTimestamps(RbmRangeError):
    """Ingested timestamps are not strictly increasing."""


class ConfigError(RbmRangeError):
    """Run configuration is malformed or contains unknown keys."""
