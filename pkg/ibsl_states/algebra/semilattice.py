"""
Finite join-semilattices with least element, given by full join tables.
They index the components of a direct system.
"""
from dataclasses import dataclass
import logging

import numpy as np

from ibsl_states.errors import IndexOutOfRange

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class JoinSemilattice:
    join_table: np.ndarray
    least: int
    top: int
    names: tuple

    def __eq__(self, other):
        if not isinstance(other, JoinSemilattice):
            return NotImplemented
        return np.array_equal(self.join_table, other.join_table)

    __hash__ = object.__hash__

    @property
    def size(self):
        return self.join_table.shape[0]

    def indices(self):
        return range(self.size)

    def check_index(self, i):
        if not isinstance(i, (int, np.integer)) or not 0 <= i < self.size:
            raise IndexOutOfRange(
                "Index {} not in semilattice of size {}".format(i, self.size),
            )

    def join(self, i, j):
        self.check_index(i)
        self.check_index(j)
        return int(self.join_table[i, j])

    def leq(self, i, j):
        return self.join(i, j) == j

    def leq_matrix(self):
        """
        :return np.array leq: leq[i, j] is True iff i <= j
        """
        return self.join_table == np.arange(self.size)[None, :]

    def comparable_pairs(self):
        """
        :return list pairs: All (i, j) with i <= j, including i == j
        """
        return [(int(i), int(j)) for i, j in np.argwhere(self.leq_matrix())]

    def chains(self):
        """
        :return list chains: All (i, j, k) with i <= j <= k
        """
        leq = self.leq_matrix()
        return [(i, j, k)
                for i, j in self.comparable_pairs()
                for k in np.flatnonzero(leq[j]).tolist()]

    def upset(self, i):
        self.check_index(i)
        return np.flatnonzero(self.leq_matrix()[i]).tolist()


@dataclass(frozen=True)
class SemilatticeCheck:
    valid: bool
    semilattice: JoinSemilattice = None
    violation: str = None
    witness: tuple = None


def validate_semilattice(join_table, names=None):
    """
    Check a square join table for idempotence, commutativity,
    associativity and a least element, in that order.

    :param array-like join_table: size x size table over 0..size-1
    :param sequence names: Optional index names, defaults to '0', '1', ...
    :return SemilatticeCheck check: Valid with the semilattice, or the first
        violated law with its least witness
    """
    table = np.asarray(join_table, dtype=np.int64)
    assert table.ndim == 2 and table.shape[0] == table.shape[1] and \
        table.shape[0] > 0, "Join table must be square and non-empty"
    size = table.shape[0]
    assert table.min() >= 0 and table.max() < size,\
        "Join table entries must be indices 0..{}".format(size - 1)
    if names is None:
        names = tuple(str(i) for i in range(size))
    assert len(names) == size, "Expected {} names".format(size)

    indices = np.arange(size)
    diagonal = table[indices, indices]
    bad = np.flatnonzero(diagonal != indices)
    if bad.size:
        return SemilatticeCheck(False, violation='NotIdempotent',
                                witness=(int(bad[0]),))
    bad = np.argwhere(table != table.T)
    if bad.size:
        return SemilatticeCheck(False, violation='NotCommutative',
                                witness=tuple(int(x) for x in bad[0]))
    # (i ∨ j) ∨ k against i ∨ (j ∨ k)
    left = table[table[:, :, None], indices[None, None, :]]
    right = table[indices[:, None, None], table[None, :, :]]
    bad = np.argwhere(left != right)
    if bad.size:
        return SemilatticeCheck(False, violation='NotAssociative',
                                witness=tuple(int(x) for x in bad[0]))
    least = np.flatnonzero((table == indices[None, :]).all(axis=1))
    if not least.size:
        return SemilatticeCheck(False, violation='NoLeastElement')
    top = 0
    for i in range(size):
        top = table[top, i]
    semilattice = JoinSemilattice(table, int(least[0]), int(top), tuple(names))
    return SemilatticeCheck(True, semilattice=semilattice)


def join_table_from_order(leq):
    """
    Build the join table of a finite partial order in which every pair has
    a least upper bound.

    :param array-like leq: Boolean matrix, leq[i, j] iff i <= j
    :return np.array join_table: Least upper bounds
    :raise ValueError: If some pair has no least upper bound
    """
    leq = np.asarray(leq, dtype=bool)
    size = leq.shape[0]
    table = np.zeros((size, size), dtype=np.int64)
    for i in range(size):
        for j in range(size):
            upper = np.flatnonzero(leq[i] & leq[j])
            least = [u for u in upper if leq[u, upper].all()]
            if len(least) != 1:
                raise ValueError(
                    "Indices {} and {} have no least upper bound".format(i, j),
                )
            table[i, j] = least[0]
    return table


def transitive_closure(leq):
    """
    Reflexive-transitive closure of a relation, Warshall style.

    :param array-like leq: Boolean matrix
    :return np.array closure: Boolean matrix
    """
    closure = np.asarray(leq, dtype=bool).copy()
    np.fill_diagonal(closure, True)
    for k in range(closure.shape[0]):
        closure |= closure[:, k][:, None] & closure[k, :][None, :]
    return closure


def leq(semilattice, i, j):
    return semilattice.leq(i, j)


def join(semilattice, i, j):
    return semilattice.join(i, j)


def top(semilattice):
    return semilattice.top
