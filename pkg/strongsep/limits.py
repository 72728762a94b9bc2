"""Size guards shared by the enumeration-based procedures.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Limits:
    """Upper bounds for exhaustive enumeration."""

    # Non-nil variable classes after forced equalities are merged
    max_vars: int = 6
    # Nodes of a materialized AMS universe
    max_classes: int = 7
    # Elements of a materialized AMS universe
    max_universe: int = 500_000
    # Pointers evaluated by the brute-force oracle
    max_heap: int = 8
    # Estimated extension heaps enumerated for one septraction
    max_extensions: int = 2_000_000
    force: bool = False

    def override(self, **changes):
        """Return a copy with some bounds replaced."""
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)


DEFAULT_LIMITS = Limits()

# Verification conditions carry primed copies of program variables
VERIFY_LIMITS = Limits(max_vars=10, max_classes=11)
