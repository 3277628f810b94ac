"""Error types shared across the package.

All inherit from ValueError so callers that only care about "bad input"
can catch one base class.
"""


class DimensionError(ValueError):
    """An array length does not match the number of atoms of the measure."""


class DomainError(ValueError):
    """A numeric argument lies outside the mathematical domain of the operation."""


class ContractError(ValueError):
    """A structural precondition was violated (degree mismatch, invalid partition,
    non-disjoint supports, wrong basis)."""


class SizeError(ValueError):
    """A combinatorial size cap was exceeded (degree or partition order too large)."""
