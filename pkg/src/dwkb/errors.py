"""Exception hierarchy.

Numerical failures carry the offending cell index (``cell``) when one is
known, so the CLI can report it.
"""


class DwkbError(Exception):
    """Base class for all package errors."""


class NumericalError(DwkbError):
    """A computation hit a degeneracy, pole or singular system."""

    def __init__(self, message, cell=None):
        if cell is not None:
            message = f"{message} (cell {cell})"
        super().__init__(message)
        self.cell = cell


class DegenerateRoots(NumericalError):
    """Characteristic roots coincide (band edge)."""


class GaugeCollision(NumericalError):
    """Gauge sequences coincide, the wave splitting is not unique."""


class NonInvertibleCell(NumericalError):
    """T22 vanishes, the cell has no scattering-matrix form."""


class CascadePole(NumericalError):
    """The star product denominator vanished."""


class ProfileSingular(NumericalError):
    """A cumulative S12 vanished during profile reconstruction."""


class SingularSystem(NumericalError):
    """The boundary-value system could not be solved."""


class BranchCutCrossing(NumericalError):
    """A continued logarithm or root jumped across its branch cut."""


class ZeroAmplitude(NumericalError):
    """A phase was requested for a zero amplitude."""


class WindowMismatch(DwkbError, ValueError):
    """Index windows of the inputs do not line up."""


class WindowTooSmall(DwkbError, ValueError):
    """The index window is too short for the requested operation."""


class LeadMismatch(DwkbError, ValueError):
    """Boundary coefficients do not describe the declared homogeneous leads."""


class BadWindow(DwkbError, ValueError):
    """Invalid profile window parameters."""


class BadGeometry(NumericalError, ValueError):
    """Geometry is unphysical or decouples the chain."""


class MissingBaseline(DwkbError, ValueError):
    """Method comparison requested without the exact baseline."""


class ConfigError(DwkbError, ValueError):
    """Experiment configuration failed validation."""


class FitRangeWarning(UserWarning):
    """Iris radius outside the range the polynomial fit was made for."""
