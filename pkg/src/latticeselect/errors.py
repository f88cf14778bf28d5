"""Exception types shared across the package.

Exit-code mapping for the CLI lives in cli.py: every subclass of UserError
maps to exit 2, SynthesisTimeout to exit 3.
"""


class UserError(Exception):
    """Base for errors caused by bad input rather than bugs."""


class DatasetError(UserError):
    """Schema violation, malformed dataset JSON, or duplicate attribute maps."""


class SpecificationError(UserError):
    """Invalid labeling: positive/negative overlap, empty positives, unknown ids."""


class ProgramParseError(UserError):
    """Syntax error in program text; carries a character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnknownNameError(UserError):
    """Attribute or class name not present in the relevant schema."""


class LatticeDomainError(UserError):
    """Value outside its lattice component (off-grid number, unknown symbol)."""


class ContextTooLargeError(UserError):
    """A materializing code path was asked to enumerate a lattice beyond the cap."""

    def __init__(self, size, cap):
        super().__init__(
            f"lattice has {size} elements, beyond the materialization cap of {cap}; "
            f"raise LATTICE_SELECT_SIZE_CAP or use the symbolic (full) mode"
        )
        self.size = size
        self.cap = cap


class CoverInfeasibleError(UserError):
    """Set-cover instance where some universe element is covered by no candidate."""

    def __init__(self, uncovered):
        super().__init__(f"no candidate covers: {sorted(uncovered)}")
        self.uncovered = frozenset(uncovered)


class SynthesisTimeout(Exception):
    """Cooperative deadline expired between search steps."""


class SynthesisCancelled(Exception):
    """A newer request superseded this synthesis run (service only)."""
