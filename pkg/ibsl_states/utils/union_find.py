class UnionFind:
    """
    Disjoint-set forest with path compression. Keys must be hashable and
    ordered; the least key of a class is its root, so classes come out in a
    deterministic order.
    """

    def __init__(self, keys=()):
        self.parent = {}
        for key in keys:
            self.find(key)

    def find(self, x):
        if x not in self.parent:
            self.parent[x] = x
            return x

        if self.parent[x] != x:
            self.parent[x] = self.find(self.parent[x])

        return self.parent[x]

    def union(self, x, y):
        """
        Merge the classes of x and y.

        :return bool merged: False if x and y already shared a class
        """
        px = self.find(x)
        py = self.find(y)
        if px == py:
            return False
        self.parent[px] = self.parent[py] = min(px, py)
        return True

    def same(self, x, y):
        return self.find(x) == self.find(y)

    def classes(self):
        """
        :return list classes: Sorted tuples of members, ordered by least member
        """
        groups = {}
        for key in sorted(self.parent):
            groups.setdefault(self.find(key), []).append(key)
        return [tuple(members) for members in groups.values()]
