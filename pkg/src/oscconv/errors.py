"""Exception hierarchy shared by all oscconv modules."""


class OscconvError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(OscconvError):
    """A parameter, size, or configuration value violates an invariant."""


class PolicyError(ConfigurationError):
    """A readout policy cannot be applied to the given trace."""


class InputError(OscconvError):
    """External input (image file, pixel values, config file) is malformed."""


class InsufficientDataError(OscconvError):
    """A trace is too short for the requested analysis."""


class NumericError(OscconvError):
    """Non-finite values or other numeric failures during computation."""


class DivergenceError(NumericError):
    """Integration blew past the divergence guard.

    Attributes:
        step: 1-based index of the integration step that tripped the guard.
    """

    def __init__(self, step: int, norm: float):
        self.step = step
        self.norm = norm
        super().__init__(f"state norm {norm:.3g} exceeded the divergence guard at step {step}")
