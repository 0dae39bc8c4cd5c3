import numpy as np
import pytest

import ibsl_states.algebra.semilattice as semilattice
from ibsl_states.errors import IndexOutOfRange

DIAMOND = [[0, 1, 2, 3],
           [1, 1, 3, 3],
           [2, 3, 2, 3],
           [3, 3, 3, 3]]


def test_diamond():
    check = semilattice.validate_semilattice(DIAMOND, ('i0', 'i', 'j', 'k'))
    assert check.valid
    index = check.semilattice
    assert index.least == 0
    assert index.top == 3
    assert semilattice.join(index, 1, 2) == 3
    assert semilattice.leq(index, 0, 2)
    assert not semilattice.leq(index, 1, 2)
    assert semilattice.top(index) == 3
    assert index.upset(1) == [1, 3]


def test_comparable_pairs_and_chains():
    index = semilattice.validate_semilattice(DIAMOND).semilattice
    pairs = index.comparable_pairs()
    assert (1, 2) not in pairs
    assert len(pairs) == 9
    assert (0, 1, 3) in index.chains()
    assert all(index.leq(i, j) and index.leq(j, k)
               for i, j, k in index.chains())


def test_not_idempotent():
    check = semilattice.validate_semilattice([[1, 1], [1, 1]])
    assert not check.valid
    assert check.violation == 'NotIdempotent'
    assert check.witness == (0,)


def test_not_commutative():
    check = semilattice.validate_semilattice([[0, 0], [1, 1]])
    assert check.violation == 'NotCommutative'
    assert check.witness == (0, 1)


def test_not_associative():
    table = [[0, 2, 1],
             [2, 1, 0],
             [1, 0, 2]]
    check = semilattice.validate_semilattice(table)
    assert check.violation == 'NotAssociative'


def test_no_least_element():
    # two maximal-free elements below a top, no bottom
    table = [[0, 2, 2],
             [2, 1, 2],
             [2, 2, 2]]
    check = semilattice.validate_semilattice(table)
    assert check.violation == 'NoLeastElement'


def test_index_out_of_range():
    index = semilattice.validate_semilattice(DIAMOND).semilattice
    with pytest.raises(IndexOutOfRange):
        index.join(0, 4)


def test_join_table_from_order():
    leq = np.array([[1, 1, 1, 1],
                    [0, 1, 0, 1],
                    [0, 0, 1, 1],
                    [0, 0, 0, 1]], dtype=bool)
    np.testing.assert_array_equal(semilattice.join_table_from_order(leq),
                                  DIAMOND)


def test_join_table_from_order_no_lub():
    # 0 below 1, 2, 3 and 4; 1, 2 below both 3 and 4
    leq = np.eye(5, dtype=bool)
    leq[0, :] = True
    leq[1, 3] = leq[1, 4] = leq[2, 3] = leq[2, 4] = True
    with pytest.raises(ValueError):
        semilattice.join_table_from_order(leq)


def test_transitive_closure():
    leq = np.zeros((3, 3), dtype=bool)
    leq[0, 1] = leq[1, 2] = True
    closure = semilattice.transitive_closure(leq)
    assert closure[0, 2]
    assert closure.diagonal().all()
    assert not closure[2, 0]
