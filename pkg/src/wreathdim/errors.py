"""Exception hierarchy; the CLI maps each class to an exit status."""

from __future__ import annotations


class WreathDimError(Exception):
    exit_code = 5


class DomainError(WreathDimError, ValueError):
    """An argument lies outside the operation's domain."""

    exit_code = 2


class ValidationError(WreathDimError, ValueError):
    """Malformed or inconsistent input (specs, cycle notation, config)."""

    exit_code = 2


class CapacityError(WreathDimError):
    """A configured size cap would be exceeded."""

    exit_code = 3


class SelectionInfeasibleError(WreathDimError):
    """No union of exactly ``count`` orbits is invariant.

    ``block_sizes`` is the certificate: the multiset of orbit counts of the
    blocks (orbits of the induced action on orbit labels), none of whose
    sub-multisets sums to ``count``.
    """

    exit_code = 4

    def __init__(self, count: int, block_sizes: list[int], level: int | None = None):
        self.count = count
        self.block_sizes = sorted(block_sizes)
        self.level = level
        where = f" at level {level}" if level is not None else ""
        super().__init__(
            f"no invariant union of {count} orbits{where}; block sizes {self.block_sizes}"
        )


class InconsistencyError(WreathDimError):
    """An internal invariant failed; indicates a bug rather than bad input."""

    exit_code = 5
