"""
Named exceptions raised across ibsl_states.

Errors caused by input are ValueErrors so callers that only care about bad
input can catch that; InternalInconsistency marks a bug and is a
RuntimeError. The CLI maps DocumentError subclasses to exit code 2.
"""


class ElementOutOfRange(ValueError):
    """An element bit pattern does not belong to the algebra's carrier"""


class HomMismatch(ValueError):
    """Two homomorphisms can't be composed"""


class NotAHomomorphism(ValueError):
    """An element-level map fails to preserve an operation"""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class IndexOutOfRange(ValueError):
    """Index outside of a semilattice"""


class MalformedElement(ValueError):
    """A Plonka element whose index or inner element is out of range"""


class CapacityExceeded(ValueError):
    """A carrier or enumeration exceeds the configured cap"""


class NotIBSL(ValueError):
    """A raw algebra fails the involutive bisemilattice axioms"""

    def __init__(self, message, failure=None):
        super().__init__(message)
        self.failure = failure


class InternalInconsistency(RuntimeError):
    """Two independent routes to the same result disagree"""


class TrivialComponent(ValueError):
    """A direct system has a one-element component, so it carries no state"""


class HypothesesUnmet(ValueError):
    """A check requires an injective system with a faithful state"""


class BadChooser(ValueError):
    """A section chooser returned an element outside its class"""


class BadRange(ValueError):
    """Counting arguments outside their admissible range"""


class OracleCapExceeded(CapacityExceeded):
    """Brute-force oracle asked for more graphs than it will enumerate"""


class InvalidState(ValueError):
    """A value table or weight assignment is not a state"""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DocumentError(ValueError):
    """Base class for document parse and resolution errors"""


class DocumentSyntaxError(DocumentError):
    """Malformed document, reported with 1-based line and column"""

    def __init__(self, line, column, expected):
        self.line = line
        self.column = column
        self.expected = expected
        super().__init__("{}:{}: expected {}".format(line, column, expected))


class UnresolvedReference(DocumentError):
    """A document refers to an index, atom or element it never declared"""


class DuplicateName(DocumentError):
    """A name is declared twice in the same document"""


class InvalidMeasure(ValueError):
    """Weights that are not a finitely additive probability measure"""

    def __init__(self, message, check=None):
        super().__init__(message)
        self.check = check
