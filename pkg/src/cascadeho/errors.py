"""Exception hierarchy.

Everything raised on purpose by this package derives from CascadehoError so
callers (and the CLI) can distinguish "your input is bad" from genuine bugs.
"""


class CascadehoError(Exception):
    """Base class for all package errors."""


class InputError(CascadehoError):
    """Malformed or inconsistent input data (schema level)."""


class ValidationFailure(CascadehoError):
    """A structural axiom check failed.

    Carries the machine-readable violation list produced by a validator.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(v.code for v in self.violations))


class SquareNonzero(CascadehoError):
    """d o d != 0.  Carries a witness pair of generator ids."""

    def __init__(self, source, target, value):
        self.source = source
        self.target = target
        self.value = value
        super().__init__(
            f"d^2 != 0: <d d {source}, {target}> = {value}"
        )


class NonDistinct(CascadehoError):
    """Cyclic-order predicate invoked on non-distinct circle points."""


class NonRegularValue(CascadehoError):
    """Preimage query at a non-regular value of a PL evaluation map."""


class NonGenericConfiguration(CascadehoError):
    """Cascade enumeration hit a coincidence the genericity axioms forbid."""


class ChainMapFailure(CascadehoError):
    """Induced morphism failed the chain-map identity.  Carries a witness."""

    def __init__(self, source, target, value):
        self.source = source
        self.target = target
        self.value = value
        super().__init__(
            f"chain map identity fails: <(d phi - phi d) {source}, {target}> = {value}"
        )


class UnknownFixture(CascadehoError):
    """Fixture registry lookup with an unknown name."""
