"""Exception types shared across the package.

Two broad failure classes matter to callers (and to the CLI's exit codes):
problems with what the user handed us, and problems discovered while
evaluating.  Everything raised here derives from :class:`NncboundError` so
library users can catch one base type.
"""

from __future__ import annotations


class NncboundError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(NncboundError, ValueError):
    """Invalid input: bad shapes, unnormalized pmf rows, out-of-range
    parameters, malformed config files.  The CLI maps this to exit code 2."""


class EvaluationError(NncboundError, RuntimeError):
    """Numerical or feasibility failure during evaluation: inconsistent
    information quantities, non-positive-definite matrices, empty feasible
    sets.  The CLI maps this to exit code 3."""
