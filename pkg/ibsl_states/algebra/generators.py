"""
Seeded random direct systems for property sweeps.

A system is drawn through its dual picture: every component's atoms are
the blocks of a partition of a ground set, and a block of A_j maps to the
block of A_i containing any of its points. Partitions coarsen downwards,
which makes every dual map well defined and the family coherent. Ghost
points living only below some index make room for non-injective
transition maps and for nontrivial components under a trivial top.
"""
import logging

import numpy as np

from ibsl_states.algebra.finbool import BooleanAlgebra, BooleanHom
from ibsl_states.algebra.plonka import plonka_sum, validate_system
from ibsl_states.algebra.semilattice import validate_semilattice
from ibsl_states.utils.union_find import UnionFind

logger = logging.getLogger(__name__)


def random_semilattice(rng, max_size=4):
    """
    Union-closed family of subsets of a 3-element set, containing the
    empty set, with positions shuffled.

    :param np.random.Generator rng: Random generator
    :param int max_size: Maximum number of indices
    :return JoinSemilattice semilattice: Validated index
    :return list subsets: Bit pattern of the subset behind every index
    """
    assert max_size >= 1, "Semilattice needs at least one index"
    while True:
        seeds = rng.integers(1, 8, size=rng.integers(0, 4)).tolist()
        family = {0}
        for subset in seeds:
            family |= {member | subset for member in family}
        if len(family) <= max_size:
            break
    family = sorted(family)
    order = rng.permutation(len(family))
    subsets = [family[k] for k in order]
    position = {subset: p for p, subset in enumerate(subsets)}
    table = [[position[x | y] for y in subsets] for x in subsets]
    check = validate_semilattice(table,
                                 tuple("i{}".format(p)
                                       for p in range(len(subsets))))
    return check.semilattice, subsets


def random_system(rng, max_indices=4, max_atoms=3, trivial_top_rate=0.1,
                  ghost_rate=0.4, merge_rate=0.3):
    """
    Random valid direct system.

    :param np.random.Generator rng: Random generator
    :param int max_indices: Maximum index size
    :param int max_atoms: Maximum atoms per component
    :param float trivial_top_rate: Probability of a trivial top component
    :param float ghost_rate: Probability of each non-top index hosting a
        point outside the image of its map to the top
    :param float merge_rate: Probability of each extra block merge
    :return DirectSystem system: Valid system
    """
    index, subsets = random_semilattice(rng, max_indices)
    top = index.top
    if rng.random() < trivial_top_rate:
        top_points = 0
    else:
        top_points = int(rng.integers(1, max_atoms + 1))
    ghosts = {}
    next_point = top_points
    for i in index.indices():
        if i != top and rng.random() < ghost_rate:
            ghosts[next_point] = i
            next_point += 1
    leq = index.leq_matrix()
    # Supersets first: every j above i is partitioned before i
    order = sorted(index.indices(),
                   key=lambda i: -bin(subsets[i]).count('1'))
    blocks = {}
    for i in order:
        ground = list(range(top_points)) + \
            [g for g, birth in ghosts.items() if leq[i, birth]]
        union_find = UnionFind(ground)
        for j in index.indices():
            if j != i and leq[i, j]:
                for block in blocks[j]:
                    for x, y in zip(block, block[1:]):
                        union_find.union(x, y)
        partition = union_find.classes()
        while len(partition) > 1 and (len(partition) > max_atoms or
                                      rng.random() < merge_rate):
            x, y = rng.choice(len(partition), size=2, replace=False)
            union_find.union(partition[x][0], partition[y][0])
            partition = union_find.classes()
        if i == top:
            partition = [(x,) for x in range(top_points)]
        blocks[i] = partition

    components = [BooleanAlgebra(len(blocks[i])) for i in index.indices()]
    block_of = []
    for i in index.indices():
        block_of.append({x: b for b, block in enumerate(blocks[i])
                         for x in block})
    homs = {}
    for i, j in index.comparable_pairs():
        if i == j:
            continue
        dual_map = tuple(block_of[i][block[0]] for block in blocks[j])
        homs[(i, j)] = BooleanHom(components[i], components[j], dual_map)
    check = validate_system(index, components, homs)
    assert check.valid, "Generated an invalid system: {} {}".format(
        check.violation, check.witness)
    return check.system


def random_raw(rng, **kwargs):
    """
    Plonka sum of a random system, with its carrier shuffled.

    :param np.random.Generator rng: Random generator
    :return RawAlgebra raw: Shuffled tables
    :return DirectSystem system: The system it was built from
    """
    system = random_system(rng, **kwargs)
    raw, _ = plonka_sum(system)
    return raw.permuted(rng.permutation(raw.size)), system


def system_family(seed, nbr_systems, **kwargs):
    """
    :param int seed: Seed for np.random.default_rng
    :param int nbr_systems: Number of systems
    :return list systems: Reproducible list of random systems
    """
    rng = np.random.default_rng(seed)
    return [random_system(rng, **kwargs) for _ in range(nbr_systems)]
