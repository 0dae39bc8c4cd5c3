"""
Finite Boolean algebras with elements encoded as atom bit patterns,
homomorphisms stored by their dual atom maps, and exact probability
measures given by rational atom weights.
"""
from dataclasses import dataclass
from fractions import Fraction
import logging

import numpy as np

from ibsl_states.errors import (
    CapacityExceeded,
    ElementOutOfRange,
    HomMismatch,
    InvalidMeasure,
    NotAHomomorphism,
)
from ibsl_states.utils.config_utils import DEFAULT_CAPS

logger = logging.getLogger(__name__)

OP_ARITY = {'meet': 2, 'join': 2, 'complement': 1, 'symdiff': 2}


def check_atom_count(atom_count, max_atoms=DEFAULT_CAPS['max_atoms']):
    """
    :param int atom_count: Number of atoms requested
    :param int max_atoms: Cap on atoms
    :raise CapacityExceeded: If atom_count > max_atoms
    """
    if atom_count > max_atoms:
        raise CapacityExceeded(
            "Algebra with {} atoms exceeds cap of {}".format(atom_count,
                                                             max_atoms),
        )


def atoms_of(element):
    """
    :param int element: Bit pattern
    :return list atoms: Positions of set bits, ascending
    """
    atoms = []
    t = 0
    while element:
        if element & 1:
            atoms.append(t)
        element >>= 1
        t += 1
    return atoms


@dataclass(frozen=True)
class BooleanAlgebra:
    """
    The Boolean algebra of subsets of {0, ..., atom_count - 1}.
    atom_count = 0 is the trivial algebra where 0 = 1.
    """
    atom_count: int

    def __post_init__(self):
        assert int(self.atom_count) == self.atom_count and \
            self.atom_count >= 0,\
            "Atom count should be a nonnegative integer, not {}".format(
                self.atom_count)
        object.__setattr__(self, 'atom_count', int(self.atom_count))

    @property
    def size(self):
        return 1 << self.atom_count

    @property
    def bottom(self):
        return 0

    @property
    def top(self):
        return self.size - 1

    def is_trivial(self):
        return self.atom_count == 0

    def elements(self):
        return range(self.size)

    def atoms(self):
        return [1 << t for t in range(self.atom_count)]

    def check_element(self, a):
        """
        :param int a: Candidate element
        :raise ElementOutOfRange: If a is not in the carrier
        """
        if not isinstance(a, (int, np.integer)) or not 0 <= a <= self.top:
            raise ElementOutOfRange(
                "{} is not an element of the {}-atom algebra".format(
                    a, self.atom_count),
            )

    def meet(self, a, b):
        return a & b

    def join(self, a, b):
        return a | b

    def complement(self, a):
        return self.top ^ a

    def symdiff(self, a, b):
        """(a ∧ b′) ∨ (a′ ∧ b)"""
        return self.join(self.meet(a, self.complement(b)),
                         self.meet(self.complement(a), b))

    def leq(self, a, b):
        return a & b == a

    def table(self, op):
        """
        Operation table as a numpy array: shape (size, size) for binary
        operations, (size,) for complement.

        :param str op: 'meet', 'join', 'complement' or 'symdiff'
        :return np.array table: Results indexed by arguments
        """
        elements = np.arange(self.size, dtype=np.int64)
        if op == 'complement':
            return self.top ^ elements
        rows = elements[:, None]
        cols = elements[None, :]
        if op == 'meet':
            return rows & cols
        if op == 'join':
            return rows | cols
        if op == 'symdiff':
            return rows ^ cols
        raise ValueError("Unknown Boolean operation {}".format(op))


def bool_eval(algebra, op, *args):
    """
    Evaluate a basic operation.

    :param BooleanAlgebra algebra: Algebra
    :param str op: 'meet', 'join', 'complement' or 'symdiff'
    :param int args: Elements
    :return int element: Result
    :raise ElementOutOfRange: If an argument is not in the carrier
    """
    assert op in OP_ARITY, "Unknown operation {}".format(op)
    assert len(args) == OP_ARITY[op],\
        "{} takes {} arguments, got {}".format(op, OP_ARITY[op], len(args))
    for a in args:
        algebra.check_element(a)
    return int(getattr(algebra, op)(*args))


@dataclass(frozen=True)
class BooleanHom:
    """
    Homomorphism source -> target given by dual_map, which sends each atom
    of the target to an atom of the source. An element a of the source maps
    to the set of target atoms whose dual image lies in a.
    """
    source: BooleanAlgebra
    target: BooleanAlgebra
    dual_map: tuple

    def __post_init__(self):
        dual_map = tuple(int(s) for s in self.dual_map)
        assert len(dual_map) == self.target.atom_count,\
            "Dual map needs {} entries, got {}".format(
                self.target.atom_count, len(dual_map))
        if self.source.is_trivial() and not self.target.is_trivial():
            raise NotAHomomorphism(
                "No homomorphism from the trivial algebra to a nontrivial one",
            )
        for t, s in enumerate(dual_map):
            assert 0 <= s < self.source.atom_count,\
                "Dual image {} of atom {} is not a source atom".format(s, t)
        object.__setattr__(self, 'dual_map', dual_map)

    @classmethod
    def identity(cls, algebra):
        return cls(algebra, algebra, tuple(range(algebra.atom_count)))

    @classmethod
    def from_element_map(cls, source, target, element_map):
        """
        Convert an element-level map to its dual form and cross-validate the
        two on every element.

        :param BooleanAlgebra source: Source algebra
        :param BooleanAlgebra target: Target algebra
        :param sequence/dict element_map: Image of every source element
        :return BooleanHom hom: The homomorphism
        :raise NotAHomomorphism: If element_map isn't a homomorphism
        """
        images = [element_map[a] for a in source.elements()]
        for a, image in enumerate(images):
            try:
                target.check_element(image)
            except ElementOutOfRange:
                raise NotAHomomorphism(
                    "Image {} of {} is outside the target".format(image, a),
                    witness=(a,),
                )
        dual_map = []
        for t in range(target.atom_count):
            preimage_atoms = [s for s in range(source.atom_count)
                              if (images[1 << s] >> t) & 1]
            if len(preimage_atoms) != 1:
                raise NotAHomomorphism(
                    "Target atom {} lies under {} source atom images".format(
                        t, len(preimage_atoms)),
                    witness=(t,),
                )
            dual_map.append(preimage_atoms[0])
        hom = cls(source, target, tuple(dual_map))
        table = hom.apply_table()
        for a, image in enumerate(images):
            if table[a] != image:
                raise NotAHomomorphism(
                    "Map sends {} to {}, a homomorphism would give {}".format(
                        a, image, table[a]),
                    witness=(a,),
                )
        return hom

    def apply(self, a):
        self.source.check_element(a)
        return sum(1 << t for t, s in enumerate(self.dual_map) if (a >> s) & 1)

    def apply_table(self):
        """
        :return np.array images: Image of every source element
        """
        elements = np.arange(self.source.size, dtype=np.int64)
        if self.target.atom_count == 0:
            return np.zeros(self.source.size, dtype=np.int64)
        dual = np.array(self.dual_map, dtype=np.int64)
        bits = (elements[:, None] >> dual[None, :]) & 1
        weights = np.left_shift(1, np.arange(self.target.atom_count,
                                             dtype=np.int64))
        return bits @ weights

    def is_injective(self):
        return set(self.dual_map) == set(range(self.source.atom_count))

    def is_injective_elementwise(self):
        """Injectivity decided on element images, all pairs"""
        return len(np.unique(self.apply_table())) == self.source.size


def hom_apply(h, a):
    return h.apply(a)


def hom_compose(g, h):
    """
    Composite g ∘ h (first h, then g).

    :param BooleanHom g: Outer homomorphism
    :param BooleanHom h: Inner homomorphism
    :return BooleanHom composite: g ∘ h
    :raise HomMismatch: If target(h) != source(g)
    """
    if h.target != g.source:
        raise HomMismatch(
            "Can't compose: inner target has {} atoms, outer source {}".format(
                h.target.atom_count, g.source.atom_count),
        )
    dual_map = tuple(h.dual_map[g.dual_map[t]]
                     for t in range(g.target.atom_count))
    return BooleanHom(h.source, g.target, dual_map)


def hom_is_injective(h):
    return h.is_injective()


@dataclass(frozen=True)
class MeasureCheck:
    valid: bool
    reason: str = None
    witness: tuple = None


def measure_check(algebra, weights):
    """
    Decide whether atom weights define a finitely additive probability
    measure. Exact: weights must sum to 1 with no tolerance.

    :param BooleanAlgebra algebra: Algebra
    :param sequence weights: One rational per atom
    :return MeasureCheck check: valid, or the reason it isn't
    """
    assert len(weights) == algebra.atom_count,\
        "Expected {} weights, got {}".format(algebra.atom_count, len(weights))
    if algebra.is_trivial():
        return MeasureCheck(False, 'NoMeasureOnTrivial')
    weights = [Fraction(w) for w in weights]
    for t, w in enumerate(weights):
        if w < 0:
            return MeasureCheck(False, 'NegativeWeight', (t, w))
    total = sum(weights, Fraction(0))
    if total != 1:
        return MeasureCheck(False, 'BadTotal', (total,))
    return MeasureCheck(True)


@dataclass(frozen=True)
class Measure:
    algebra: BooleanAlgebra
    weights: tuple

    def __post_init__(self):
        weights = tuple(Fraction(w) for w in self.weights)
        check = measure_check(self.algebra, weights)
        if not check.valid:
            raise InvalidMeasure(
                "Not a measure: {} {}".format(check.reason, check.witness),
                check=check,
            )
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def uniform(cls, algebra):
        n = algebra.atom_count
        return cls(algebra, tuple(Fraction(1, n) for _ in range(n)))

    @classmethod
    def dirac(cls, algebra, atom):
        return cls(algebra, tuple(Fraction(int(t == atom))
                                  for t in range(algebra.atom_count)))

    def value(self, e):
        self.algebra.check_element(e)
        return sum((self.weights[t] for t in atoms_of(e)), Fraction(0))

    def is_regular(self):
        return all(w > 0 for w in self.weights)

    def distance(self, a, b):
        return self.value(self.algebra.symdiff(a, b))


def measure_value(m, e):
    return m.value(e)


def measure_is_regular(m):
    return m.is_regular()
