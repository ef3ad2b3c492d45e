"""
Exception hierarchy for the entanglement toolkit.

Every error carries the process exit code the command line reports for it.
"""

from constants import EXIT_NUMERICAL, EXIT_USAGE


class EntanglementError(Exception):
    """Base class for all toolkit errors."""

    exit_code = EXIT_NUMERICAL


class UsageError(EntanglementError):
    """Bad command-line usage or an empty request (no sweep points, no lattice)."""

    exit_code = EXIT_USAGE


class ConfigError(UsageError):
    """Experiment config that cannot be parsed or fails validation."""


class LatticeError(UsageError, ValueError):
    """Invalid lattice geometry or operator request."""


class IncompatibleModel(UsageError, ValueError):
    """Model kind not available on the requested lattice, or bad parameters."""


class NumericalError(EntanglementError):
    """A numerical invariant was violated."""

    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, deviation: float = None):
        super().__init__(message)
        self.deviation = deviation


class ParityViolation(NumericalError):
    """Operator function produced a non-real matrix."""


class EigensolverResidual(NumericalError):
    """An eigenpair fails the residual contract."""


class DegenerateZeroMode(NumericalError):
    """BdG spectrum has a zero mode; the ground state is not unique."""


class NonAntisymmetricF(NumericalError):
    """Anomalous correlator F is not antisymmetric."""


class SpectrumOutOfRange(NumericalError):
    """Entanglement eigenvalues leave [0, 1/4]."""


class InsufficientSamples(NumericalError):
    """Too few samples inside a fit window."""


class DegenerateWindow(NumericalError):
    """All abscissae inside a fit window coincide."""


class NonConvergence(NumericalError):
    """An iterative fit exhausted its iteration budget."""
