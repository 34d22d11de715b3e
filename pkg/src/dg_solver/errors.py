"""Exception types shared by the solver library and the study driver."""
from typing import Optional


class DomainError(ValueError):
    """A state left the domain where the conservation law is defined.

    Raised for non-positive vessel area, loss of hyperbolicity and NaN traces.

    Attributes:
        element: Index of the offending element, if known
        interface: Index of the offending interface node, if known
    """

    def __init__(
        self,
        message: str,
        element: Optional[int] = None,
        interface: Optional[int] = None
    ):
        super().__init__(message)
        self.element = element
        self.interface = interface


class BlowUpError(RuntimeError):
    """The time integration produced non-finite or runaway coefficients.

    Attributes:
        step: Index of the step that produced the bad state
        max_magnitude: Largest coefficient magnitude after that step
    """

    def __init__(self, step: int, max_magnitude: float):
        super().__init__(
            f"Solver blew up at step {step}: max coefficient magnitude {max_magnitude:.6e}"
        )
        self.step = step
        self.max_magnitude = max_magnitude


class IntegratorStateError(RuntimeError):
    """An integrator was handed a state it cannot advance."""


class ConfigError(ValueError):
    """Invalid study configuration, settings file or key=value file."""
