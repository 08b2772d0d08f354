"""Shared test helpers: seeded random weighted trees."""

from bisimkit.wtree import WeightedTree, validate_weight


def random_weighted_tree(rng, max_nodes=200, max_root_weight=10**6):
    """A random rooted tree with a valid (not necessarily tight) weight.

    Weights are assigned top-down: each node's children split a random
    budget no larger than the node's weight, so the weight law holds by
    construction.  Zero weights and slack both occur.
    """
    n = rng.randint(1, max_nodes)
    parent = [0] * n
    for v in range(1, n):
        parent[v] = rng.randrange(v)
    tree = WeightedTree(parent)
    w = [0] * n
    w[0] = rng.randint(0, max_root_weight)
    for v in tree.topo_order():
        ch = tree.children[v]
        if not ch:
            continue
        budget = w[v] if rng.random() < 0.5 else rng.randint(0, w[v])
        for u in ch:
            part = rng.randint(0, budget)
            w[u] = part if rng.random() < 0.8 else rng.randint(0, part)
            budget -= part
    assert validate_weight(tree, w).valid
    return tree, w
