"""Numerical laboratory for Sato-Tate angle statistics over number fields.

Subpackages cover the orthogonal-polynomial layer (chebyshev), the limiting
and local angle measures (measures), extremal trigonometric interval
approximations (selberg), prime-ideal enumeration (number_field), the
independent-angle Monte Carlo ensemble (ensemble), the exact moment pipeline
(moments_engine), and a command line front end (cli).
"""

from .errors import ConfigError, ContractViolation, SatolabError

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ContractViolation",
    "SatolabError",
    "__version__",
]
