"""Exception types shared across the package.

Validation problems (bad arguments, unphysical inputs, unsupported regimes)
derive from ValueError; failures of a numerical procedure at runtime derive
from RuntimeError. The CLI maps the former to exit code 1 and the latter to
exit code 2.
"""


class InvalidPhysicsError(ValueError):
    """Input data violates a physical validity requirement (e.g. a mutual
    decay matrix that is not positive semidefinite)."""


class UnsupportedRegimeError(ValueError):
    """Operation requested outside the regime it is defined for."""


class DimensionCapError(ValueError):
    """Requested dense computation exceeds the supported dimension cap."""


class ConfigError(ValueError):
    """Scenario configuration is malformed; message names the offending key."""


class PositivityError(RuntimeError):
    """Integration produced a state with an eigenvalue below the abort
    threshold, indicating an invalid generator or too loose a tolerance."""


class ProtocolRegressionError(RuntimeError):
    """A preparation protocol failed to reach its target state within
    tolerance."""


class NumericalError(RuntimeError):
    """Generic numerical failure (integrator abort, non-convergence)."""
