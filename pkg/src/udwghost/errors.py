"""Exception types shared across the simulator.

The CLI maps these onto exit codes: ``ConfigError`` -> 2,
``QuadratureConvergenceError`` -> 3.
"""


class UDWError(Exception):
    """Base class for all simulator errors."""


class ConfigError(UDWError, ValueError):
    """Invalid scenario, configuration value or usage."""


class QuadratureConvergenceError(UDWError, ArithmeticError):
    """Momentum quadrature failed its refinement check."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DegenerateStateError(UDWError, ArithmeticError):
    """Assembled density matrix has (numerically) vanishing trace."""


class ProtocolError(UDWError):
    """Post-selection or image reconstruction is undefined for this state."""
