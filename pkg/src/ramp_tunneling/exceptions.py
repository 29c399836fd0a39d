"""
Error types raised by the ramp tunneling toolkit.
"""


class RampTunnelingError(Exception):
    """Base class for all toolkit errors."""


class DomainError(RampTunnelingError, ValueError):
    """A formula was evaluated outside its domain of validity."""


class GridConfigurationError(RampTunnelingError, ValueError):
    """The spatial grid cannot represent the requested problem."""


class PropagationDivergenceError(RampTunnelingError, RuntimeError):
    """The propagated wavefunction lost its normalization."""


class NonConvergenceError(RampTunnelingError, RuntimeError):
    """The restricted probability did not reach a plateau in time."""


class TrajectoryLostError(RampTunnelingError, RuntimeError):
    """A trajectory entered a masked region or left the grid."""


class BoundaryNotFoundError(RampTunnelingError, RuntimeError):
    """The transmitted/reflected boundary could not be bracketed."""


class NoTransmissionError(BoundaryNotFoundError):
    """No trajectory in the scan range reached the transmission region."""
