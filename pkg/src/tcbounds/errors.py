"""Exception types shared across the toolkit."""

from __future__ import annotations


class InvalidInputError(ValueError):
    """Input violates a documented precondition or schema."""


class ConflictError(Exception):
    """Interval propagation derived an empty interval.

    Carries both derivations so the user can see which pair of facts
    is inconsistent.
    """

    def __init__(self, node: str, invariant: str, lower_derivation, upper_derivation):
        self.node = node
        self.invariant = invariant
        self.lower_derivation = lower_derivation
        self.upper_derivation = upper_derivation
        super().__init__(
            f"conflict on {invariant} at {node}: "
            f"lower bound from {lower_derivation} exceeds upper bound from {upper_derivation}"
        )


class InternalInvariantError(RuntimeError):
    """A self-check of the toolkit's own invariants failed (exit code 2)."""
