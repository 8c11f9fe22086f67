"""Almost edge-disjoint path families between a pair of items.

For a pair ``(x, y)`` two isomorphic, vertex-disjoint BFS trees are grown
from ``x`` and ``y``; their matched leaves ``(x_i, y_i)`` are then extended
with vertex-disjoint subtrees until an edge links the two sides. Every
linked leaf pair contributes one path ``x -> x_i -> ... -> y_i -> y``.
Paths may share edges inside the root trees but are edge-disjoint below
the leaves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import RecoveryParams
from .kernels import grow_tree_kernel, pair_paths_kernel, seed_state
from .oracle import QueryGraph


@dataclass(frozen=True)
class Tree:
    nodes: np.ndarray
    parent: np.ndarray
    level: np.ndarray

    def __len__(self):
        return int(self.nodes.size)

    @property
    def depth(self):
        return int(self.level.max()) if self.nodes.size else 0

    def leaves(self, depth=None):
        """Vertices at ``depth`` (default: the deepest level)."""
        if not self.nodes.size:
            return np.empty(0, dtype=np.int64)
        d = self.depth if depth is None else depth
        return self.nodes[self.level == d]

    def children(self, idx):
        return self.nodes[self.parent == idx]


def grow_tree(root, graph: QueryGraph, depth, b1, b, forbidden=(), seed=0) -> Tree:
    """Random BFS tree of depth at most ``depth`` avoiding ``forbidden``.

    The root gets up to ``b1`` children, every later node up to ``b``. A root
    without eligible neighbours yields a tree holding only the root.
    """
    if root in set(int(v) for v in forbidden):
        raise ValueError(f"root {root} is forbidden")
    indptr, indices = graph.csr[:2]
    used = np.zeros(graph.n, dtype=np.bool_)
    used[np.asarray(list(forbidden), dtype=np.int64)] = True
    nodes, parent, level, count = grow_tree_kernel(
        indptr, indices, int(root), int(depth), int(b1), int(b), used, seed_state(seed)
    )
    return Tree(nodes[:count].copy(), parent[:count].copy(), level[:count].copy())


def pair_seed(seed, x, y):
    """Per-pair stream: the first word of ``SeedSequence((seed, x, y))``."""
    ss = np.random.SeedSequence([int(seed), int(x), int(y)])
    return int(ss.generate_state(1, np.uint32)[0])


@dataclass
class PathFamily:
    x: int
    y: int
    paths: list
    tree_x: Tree
    tree_y: Tree
    tree_depth: int
    length_bound: float
    n_leaves: int = 0
    path_leaf: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def N(self):
        return len(self.paths)

    @property
    def found(self):
        return self.N > 0

    @property
    def status(self):
        return "ok" if self.found else "no-paths"

    def dump(self, path=None):
        """One path per line as space-separated vertex ids."""
        text = "".join(" ".join(str(int(v)) for v in p) + "\n" for p in self.paths)
        if path is not None:
            Path(path).write_text(text)
        return text


def almost_edge_disjoint_paths(x, y, graph: QueryGraph, params: RecoveryParams, seed=0) -> PathFamily:
    if x == y:
        raise ValueError("x and y must differ")
    indptr, indices = graph.csr[:2]
    out = pair_paths_kernel(
        indptr, indices, int(x), int(y), params.tree_depth, params.reach_depth,
        int(params.b1), int(params.b), pair_seed(seed, x, y),
    )
    path_ptr, path_verts, path_leaf, tx, ty, tparent, tlevel, tcount, n_leaves = out
    paths = [path_verts[path_ptr[i] : path_ptr[i + 1]] for i in range(path_ptr.size - 1)]
    return PathFamily(
        x=int(x),
        y=int(y),
        paths=paths,
        tree_x=Tree(tx, tparent, tlevel),
        tree_y=Tree(ty, tparent.copy(), tlevel.copy()),
        tree_depth=params.tree_depth,
        length_bound=params.length_bound,
        n_leaves=int(n_leaves),
        path_leaf=path_leaf,
    )


@dataclass
class ValidationReport:
    """Per-check failures; an empty list means the check passed."""

    failures: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not any(self.failures.values())

    def failed(self):
        return [name for name, bad in self.failures.items() if bad]

    def __str__(self):
        lines = []
        for name, bad in self.failures.items():
            lines.append(f"{name}: {'ok' if not bad else 'FAIL ' + repr(bad[:3])}")
        return "\n".join(lines)


CHECKS = (
    "endpoints",
    "edges",
    "simple",
    "trees_disjoint",
    "tree_prefix",
    "below_leaf_edge_disjoint",
    "length",
)


def _root_chain(tree: Tree, idx):
    chain = []
    while idx >= 0:
        chain.append(int(tree.nodes[idx]))
        idx = int(tree.parent[idx])
    return chain[::-1]


def validate_family(f: PathFamily, graph: QueryGraph) -> ValidationReport:
    """Check every structural promise of a path family."""
    fail = {name: [] for name in CHECKS}
    d = f.tree_depth

    # root -> leaf chains of the matched trees, keyed by tree-node index
    x_chains = {}
    y_chains = {}
    if len(f.tree_x) == len(f.tree_y):
        for idx in np.flatnonzero(f.tree_x.level == d):
            x_chains[int(idx)] = tuple(_root_chain(f.tree_x, idx))
            y_chains[int(idx)] = tuple(_root_chain(f.tree_y, idx))
    pair_of_prefix = {}
    for idx, cx in x_chains.items():
        pair_of_prefix[cx] = y_chains[idx]

    shared_x = set(int(v) for v in f.tree_x.nodes) & set(int(v) for v in f.tree_y.nodes)
    if shared_x:
        fail["trees_disjoint"].append(sorted(shared_x))

    seen_edges = {}
    for pi, path in enumerate(f.paths):
        p = [int(v) for v in path]
        if not p or p[0] != f.x or p[-1] != f.y:
            fail["endpoints"].append(pi)
        for a, b in zip(p, p[1:]):
            if not graph.has_edge(a, b):
                fail["edges"].append((pi, (a, b)))
        if len(set(p)) != len(p):
            fail["simple"].append(pi)
        if len(p) - 1 > f.length_bound:
            fail["length"].append((pi, len(p) - 1))
        head = tuple(p[: d + 1])
        tail = tuple(p[::-1][: d + 1])
        if len(p) < 2 * d + 2 or pair_of_prefix.get(head) != tail:
            fail["tree_prefix"].append(pi)
            continue
        below = p[d : len(p) - d]
        for a, b in zip(below, below[1:]):
            e = (min(a, b), max(a, b))
            if e in seen_edges and seen_edges[e] != pi:
                fail["below_leaf_edge_disjoint"].append((e, seen_edges[e], pi))
            seen_edges.setdefault(e, pi)
    return ValidationReport(fail)
