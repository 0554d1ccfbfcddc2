"""Exception types shared across the package."""


class ParityError(ValueError):
    """An even permutation was required."""


class UnsupportedComposition(ValueError):
    """The product of two structured permutations has no closed normal form."""


class NotTruncatable(ValueError):
    """The element has an infinite orbit, so no finite box is invariant."""


class PreconditionError(ValueError):
    pass


class WrongCase(ValueError):
    """A witness generator was called on an element outside its case."""


class ResourceError(RuntimeError):
    """Exhaustive enumeration was asked for a degree above the configured cap."""


class ParseError(ValueError):
    def __init__(self, message, text="", column=0):
        self.message = message
        self.text = text
        self.column = column
        super().__init__(f"{message} (column {column + 1})")
