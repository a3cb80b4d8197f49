"""Error types shared across the library.

The CLI maps these onto its exit codes: InputError -> 1 (usage),
DomainError -> 2 (mathematically invalid request), CapExceeded -> 3.
"""


class InputError(ValueError):
    """Malformed input: unparseable words, bad JSON shapes, unknown names."""


class DomainError(ValueError):
    """Valid syntax but an invalid request: family mismatches, divisibility
    violations, degenerate forms, and the like."""


class CapExceeded(RuntimeError):
    """An exact enumeration grew past its configured cap."""
