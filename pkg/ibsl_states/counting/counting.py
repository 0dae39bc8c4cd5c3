"""
Counting inclusive involutive bisemilattices over a maximal chain of
subalgebras A_1 ⊂ ... ⊂ A_n of a Boolean algebra with n atoms.
"""
from dataclasses import dataclass
import itertools
import logging
import math

import numpy as np
from tqdm import tqdm

from ibsl_states.algebra.booleanisation import booleanise
from ibsl_states.algebra.finbool import BooleanAlgebra, BooleanHom
from ibsl_states.algebra.plonka import (
    is_injective_ibsl,
    plonka_sum,
    systems_isomorphic,
    validate_system,
)
from ibsl_states.algebra.semilattice import (
    join_table_from_order,
    transitive_closure,
    validate_semilattice,
)
from ibsl_states.errors import (
    BadRange,
    CapacityExceeded,
    InternalInconsistency,
    OracleCapExceeded,
)
from ibsl_states.utils.config_utils import DEFAULT_CAPS
import ibsl_states.utils.sweep_utils as sweep_utils
from ibsl_states.utils.union_find import UnionFind

logger = logging.getLogger(__name__)


def cayley(q):
    """Labeled trees on q vertices, q^(q-2), with one tree on one vertex"""
    return 1 if q == 1 else q ** (q - 2)


def forests(m):
    """
    Labeled forests (acyclic simple graphs) on m vertices by splitting off
    the tree that holds the first vertex.

    :param int m: Number of vertices
    :return int count: Number of forests
    """
    if m < 0:
        raise BadRange("Number of vertices must be >= 0, not {}".format(m))
    counts = [1]
    for size in range(1, m + 1):
        counts.append(sum(math.comb(size - 1, q - 1) * cayley(q) *
                          counts[size - q]
                          for q in range(1, size + 1)))
    return counts[m]


def vertex_pairs(m):
    return list(itertools.combinations(range(m), 2))


def is_forest(m, edges):
    """
    :param int m: Number of vertices
    :param iterable edges: Vertex pairs
    :return bool acyclic: False as soon as an edge closes a cycle
    """
    union_find = UnionFind(range(m))
    return all(union_find.union(x, y) for x, y in edges)


def graph_edges(pairs, graph_id):
    return [pair for bit, pair in enumerate(pairs) if (graph_id >> bit) & 1]


def forest_oracle(m, max_m=DEFAULT_CAPS['max_forest_oracle'],
                  nbr_workers=None, progress=False):
    """
    Count acyclic graphs among all 2^(m(m-1)/2) labeled simple graphs.

    :param int m: Number of vertices
    :param int max_m: Largest m the oracle enumerates
    :param int/None nbr_workers: Thread pool size
    :param bool progress: Show a progress bar
    :return int count: Number of forests
    :raise OracleCapExceeded: If m > max_m
    """
    if m < 0:
        raise BadRange("Number of vertices must be >= 0, not {}".format(m))
    if m > max_m:
        raise OracleCapExceeded(
            "Forest oracle enumerates up to {} vertices, not {}".format(
                max_m, m),
        )
    pairs = vertex_pairs(m)

    def acyclic(graph_id):
        return is_forest(m, graph_edges(pairs, graph_id))

    return sweep_utils.count_passing(acyclic,
                                     1 << len(pairs),
                                     nbr_workers=nbr_workers,
                                     progress=progress,
                                     desc='forests on {}'.format(m))


@dataclass(frozen=True)
class ChainFactor:
    n: int
    h: int
    by_subsets: int
    by_binomial: int

    @property
    def value(self):
        return self.by_binomial


def chain_factor(n, h):
    """
    Sum over h-subsets X of {1..n} of min(X), computed by enumeration and
    as C(n+1, h+1).

    :param int n: Chain length
    :param int h: Subset size
    :return ChainFactor factor: Both routes
    :raise BadRange: Unless 1 <= h <= n
    :raise InternalInconsistency: If the routes differ
    """
    if not 1 <= h <= n:
        raise BadRange("Need 1 <= h <= n, got h={}, n={}".format(h, n))
    by_subsets = sum(subset[0] for subset in
                     itertools.combinations(range(1, n + 1), h))
    by_binomial = math.comb(n + 1, h + 1)
    if by_subsets != by_binomial:
        raise InternalInconsistency(
            "Chain factor {} by subsets, {} by binomial".format(by_subsets,
                                                                 by_binomial),
        )
    return ChainFactor(n, h, by_subsets, by_binomial)


@dataclass(frozen=True)
class CountingResult:
    n: int
    k: int
    value: int
    chain_factor: int
    forest_count: int
    formula_only: bool = False


def n_d(n, k):
    """
    Inclusive bisemilattices with k components whose middle components
    are pairwise distinct chain algebras: C(n+1, k-1) * forests(k-2).
    For k = 2 there is no chain subset to enumerate and the value comes
    from the formula alone.

    :param int n: Chain length
    :param int k: Number of components
    :return CountingResult result: Value with its breakdown
    :raise BadRange: Unless k >= 2 and k - 2 <= n
    """
    if k < 2 or k - 2 > n or n < 1:
        raise BadRange("Need n >= 1, k >= 2 and k - 2 <= n, "
                       "got n={}, k={}".format(n, k))
    h = k - 2
    if h == 0:
        factor = math.comb(n + 1, 1)
    else:
        factor = chain_factor(n, h).value
    forest_count = forests(h)
    return CountingResult(n, k, factor * forest_count, factor, forest_count,
                          formula_only=h == 0)


@dataclass(frozen=True)
class InclusiveEnumeration:
    n: int
    k: int
    systems: tuple
    candidates: int
    expected: int

    @property
    def count(self):
        return len(self.systems)

    @property
    def agrees(self):
        return self.count == self.expected


def chain_algebra(t):
    return BooleanAlgebra(t)


def inclusion(s, t):
    """
    A_s ⊂ A_t where A_t splits the last atom of A_{t-1}: atom u of A_t
    lies under atom min(u, s-1) of A_s.
    """
    return BooleanHom(chain_algebra(s), chain_algebra(t),
                      tuple(min(u, s - 1) for u in range(t)))


def _inclusive_system(n, bottom, labels, edges):
    """
    Index: bottom node 0, middle nodes 1..m, top node m+1. Forest edges
    between middle nodes point from the lower to the higher label.

    :return DirectSystem/None system: None if the order has no joins
    """
    m = len(labels)
    size = m + 2
    order = np.zeros((size, size), dtype=bool)
    order[0, :] = True
    order[:, size - 1] = True
    for x, y in edges:
        low, high = (x, y) if labels[x] < labels[y] else (y, x)
        order[low + 1, high + 1] = True
    order = transitive_closure(order)
    try:
        join_table = join_table_from_order(order)
    except ValueError:
        return None
    names = ['bottom'] + ['A{}'.format(t) for t in labels] + ['top']
    check = validate_semilattice(join_table, names)
    if not check.valid:
        return None
    carried = [bottom] + list(labels) + [n]
    components = [chain_algebra(t) for t in carried]
    homs = {(i, j): inclusion(carried[i], carried[j])
            for i, j in check.semilattice.comparable_pairs() if i != j}
    system_check = validate_system(check.semilattice, components, homs)
    if not system_check.valid:
        raise InternalInconsistency(
            "Inclusions break coherence: {} at {}".format(
                system_check.violation, system_check.witness),
        )
    return system_check.system


def _check_inclusive(system, n, max_carrier):
    raw, _ = plonka_sum(system, max_carrier)
    if not is_injective_ibsl(raw, max_carrier):
        raise InternalInconsistency("Inclusive system is not injective")
    quotient = booleanise(system, max_carrier).quotient
    if quotient.atom_count != n:
        raise InternalInconsistency(
            "Booleanisation has {} atoms, expected {}".format(
                quotient.atom_count, n),
        )


def enumerate_inclusive(n, k, max_n=DEFAULT_CAPS['max_inclusive_n'],
                        max_k=DEFAULT_CAPS['max_inclusive_k'],
                        max_carrier=DEFAULT_CAPS['max_carrier'],
                        progress=False):
    """
    Enumerate inclusive direct systems with k components over the chain
    A_1 ⊂ ... ⊂ A_n, up to isomorphism. A candidate is a bottom node, k-2
    middle nodes carrying distinct chain algebras and ordered by a labeled
    forest oriented from lower to higher label, and a top node carrying
    A_n; the bottom carries any A_l with l at most the least middle label.
    Every kept system is validated, checked injective and checked to
    booleanise to A_n, and the count is compared with n_d(n, k).

    :param int n: Chain length
    :param int k: Number of components
    :param int max_n: Largest chain length enumerated
    :param int max_k: Largest number of components enumerated
    :param int max_carrier: Cap on the Plonka sums used for validation
    :param bool progress: Show a progress bar over label sets
    :return InclusiveEnumeration enumeration: Systems and comparison
    :raise CapacityExceeded: If n or k exceed their caps
    """
    expected = n_d(n, k).value
    if n > max_n or k > max_k:
        raise CapacityExceeded(
            "Inclusive enumeration is capped at n <= {}, k <= {}".format(
                max_n, max_k),
        )
    m = k - 2
    pairs = vertex_pairs(m)
    skeletons = [graph_edges(pairs, graph_id)
                 for graph_id in range(1 << len(pairs))]
    skeletons = [edges for edges in skeletons if is_forest(m, edges)]
    label_sets = list(itertools.combinations(range(1, n + 1), m))
    systems = []
    candidates = 0
    for labels in tqdm(label_sets, desc='label sets', disable=not progress):
        least_label = labels[0] if labels else n
        for bottom in range(1, least_label + 1):
            for edges in skeletons:
                system = _inclusive_system(n, bottom, labels, edges)
                if system is None:
                    continue
                candidates += 1
                if any(systems_isomorphic(system, kept) is not None
                       for kept in systems):
                    continue
                _check_inclusive(system, n, max_carrier)
                systems.append(system)
    enumeration = InclusiveEnumeration(n, k, tuple(systems), candidates,
                                       expected)
    if not enumeration.agrees:
        logger.warning("Enumerated %d inclusive systems for n=%d, k=%d, "
                       "formula gives %d", enumeration.count, n, k, expected)
    return enumeration
