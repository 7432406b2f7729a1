"""Mappings of [n] into itself and the decomposition of their functional digraphs.

A mapping ``T`` on ``[n] = {1, ..., n}`` defines a digraph with the edges
``(v, T(v))``.  Each connected component consists of one directed cycle with
a rooted tree hanging from every cyclic vertex (the root belongs to its own
tree).  Vertex ids are 1-indexed everywhere in the public API; the numba
kernels work on 0-indexed arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

__all__ = [
    "Component",
    "Decomposition",
    "Empty",
    "ExtremalStats",
    "Mapping",
    "MappingError",
    "OutOfRange",
    "Tree",
    "decompose",
    "extremal_stats",
    "label_vertices",
    "ranked_sizes",
    "validate_mapping",
]


class MappingError(ValueError):
    """Raised for arrays that do not describe a mapping of [n] into itself."""


class Empty(MappingError):
    def __init__(self):
        super().__init__("a mapping needs at least one vertex")


class OutOfRange(MappingError):
    def __init__(self, index: int, value, n: int):
        self.index = index
        self.value = value
        super().__init__(f"image at position {index} is {value}, outside [1, {n}]")


@dataclass(frozen=True, eq=False)
class Mapping:
    """A function ``T: [n] -> [n]`` stored as its 1-indexed image array."""

    images: np.ndarray

    @property
    def n(self) -> int:
        return int(self.images.shape[0])

    def __call__(self, v: int) -> int:
        return int(self.images[v - 1])

    def __eq__(self, other):
        if not isinstance(other, Mapping):
            return NotImplemented
        return np.array_equal(self.images, other.images)

    def __hash__(self):
        return hash(self.images.tobytes())

    def __repr__(self):
        return f"Mapping(n={self.n}, images={self.images.tolist()})"

    def zero_based(self) -> np.ndarray:
        return self.images - 1

    @classmethod
    def from_zero_based(cls, images0) -> "Mapping":
        arr = np.asarray(images0, dtype=np.int64) + 1
        arr.setflags(write=False)
        return cls(arr)


def validate_mapping(raw) -> Mapping:
    """Check a 1-indexed image array and wrap it as a :class:`Mapping`.

    Raises
    ------
    Empty
        If `raw` has no entries.
    OutOfRange
        For the first (1-indexed) position whose image is not in ``[1, n]``.
    """
    values = list(raw)
    n = len(values)
    if n == 0:
        raise Empty()
    for i, x in enumerate(values, start=1):
        if isinstance(x, bool) or int(x) != x or not 1 <= x <= n:
            raise OutOfRange(i, x, n)
    arr = np.array(values, dtype=np.int64)
    arr.setflags(write=False)
    return Mapping(arr)


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True)
def _label(images0):
    """Return ``(is_cyclic, root, comp, n_comp)`` for a 0-indexed mapping.

    Cyclic vertices survive repeated deletion of in-degree-0 vertices.  The
    deletion order is a topological order of the forest edges, so walking it
    backwards sees ``T(v)`` before ``v`` and roots propagate in one pass.
    Components are numbered by increasing minimum vertex.
    """
    n = images0.shape[0]
    indeg = np.zeros(n, np.int64)
    for v in range(n):
        indeg[images0[v]] += 1
    order = np.empty(n, np.int64)
    head = 0
    tail = 0
    for v in range(n):
        if indeg[v] == 0:
            order[tail] = v
            tail += 1
    while head < tail:
        v = order[head]
        head += 1
        w = images0[v]
        indeg[w] -= 1
        if indeg[w] == 0:
            order[tail] = w
            tail += 1
    n_peeled = tail
    is_cyclic = np.ones(n, np.bool_)
    for i in range(n_peeled):
        is_cyclic[order[i]] = False

    root = np.empty(n, np.int64)
    for v in range(n):
        if is_cyclic[v]:
            root[v] = v
    for i in range(n_peeled - 1, -1, -1):
        v = order[i]
        root[v] = root[images0[v]]

    comp = np.full(n, -1, np.int64)
    n_comp = 0
    for v in range(n):
        r = root[v]
        if comp[r] == -1:
            comp[r] = n_comp
            w = images0[r]
            while w != r:
                comp[w] = n_comp
                w = images0[w]
            n_comp += 1
        comp[v] = comp[r]
    return is_cyclic, root, comp, n_comp


@numba.njit(cache=True)
def _sizes(root, comp, n_comp):
    n = root.shape[0]
    tree_size = np.zeros(n, np.int64)
    tree_min = np.full(n, -1, np.int64)
    comp_size = np.zeros(n_comp, np.int64)
    for v in range(n):
        r = root[v]
        tree_size[r] += 1
        if tree_min[r] == -1:
            tree_min[r] = v
        comp_size[comp[v]] += 1
    return tree_size, tree_min, comp_size


@numba.njit(cache=True)
def _record(images0, s_max, r_max, mu_out, tau_out, flag_out):
    """Ranked sizes of one mapping, written into the three output rows.

    Returns ``(root, comp, largest, tree_rank)`` where ``tree_rank[r]`` is the
    1-based rank of the tree rooted at ``r`` when that rank is at most
    `s_max`, and 0 otherwise.
    """
    n = images0.shape[0]
    is_cyclic, root, comp, n_comp = _label(images0)
    tree_size, tree_min, comp_size = _sizes(root, comp, n_comp)
    stride = n + 1
    ckey = np.empty(n_comp, np.int64)
    for k in range(n_comp):
        ckey[k] = -comp_size[k] * stride + k
    corder = np.argsort(ckey)
    largest = corder[0]
    for r in range(r_max):
        mu_out[r] = comp_size[corder[r]] if r < n_comp else 0
    roots = np.flatnonzero(is_cyclic)
    tkey = np.empty(roots.shape[0], np.int64)
    for i in range(roots.shape[0]):
        tkey[i] = -tree_size[roots[i]] * stride + tree_min[roots[i]]
    torder = np.argsort(tkey)
    tree_rank = np.zeros(n, np.int64)
    for s in range(s_max):
        if s < roots.shape[0]:
            r0 = roots[torder[s]]
            tau_out[s] = tree_size[r0]
            flag_out[s] = 1 if comp[r0] == largest else 0
            tree_rank[r0] = s + 1
        else:
            tau_out[s] = 0
            flag_out[s] = 0
    return root, comp, largest, tree_rank


def label_vertices(images0: np.ndarray):
    """Per-vertex labels of a 0-indexed image array.

    Returns
    -------
    is_cyclic : bool array
    root : int array
        0-indexed root of the tree containing each vertex.
    comp : int array
        Component index; components are numbered by their smallest vertex.
    n_comp : int
    """
    images0 = np.ascontiguousarray(images0, dtype=np.int64)
    return _label(images0)


def ranked_sizes(images0: np.ndarray):
    """Rank trees and components of a 0-indexed mapping.

    Ranking is by size descending, then by smallest member ascending.

    Returns
    -------
    comp_order : int array
        Component indices, largest first.
    comp_size : int array
        Size of each component (indexed by component).
    tree_roots : int array
        0-indexed tree roots, largest tree first.
    tree_size : int array
        Per-vertex array; ``tree_size[r]`` is the size of the tree rooted at ``r``.
    root, comp : int arrays
        Per-vertex labels from :func:`label_vertices`.
    """
    is_cyclic, root, comp, n_comp = label_vertices(images0)
    tree_size, tree_min, comp_size = _sizes(root, comp, n_comp)
    # components are already numbered by smallest vertex, so a stable sort
    # on size alone applies the tie rule
    comp_order = np.argsort(-comp_size, kind="stable")
    roots = np.flatnonzero(is_cyclic)
    tree_roots = roots[np.lexsort((tree_min[roots], -tree_size[roots]))]
    return comp_order, comp_size, tree_roots, tree_size, root, comp


# ---------------------------------------------------------------------------
# object view


@dataclass(frozen=True)
class Tree:
    root: int
    size: int
    members: tuple[int, ...] | None = None


@dataclass(frozen=True)
class Component:
    cycle: tuple[int, ...]
    trees: tuple[Tree, ...]
    size: int


@dataclass(frozen=True)
class Decomposition:
    """Components of a functional digraph, ordered by smallest vertex.

    ``root_of`` and ``component_of`` are per-vertex lookup arrays, indexed by
    ``v - 1``; ``root_of`` holds 1-indexed roots and ``component_of`` indexes
    into ``components``.
    """

    components: tuple[Component, ...]
    cyclic_vertex_count: int
    root_of: np.ndarray = field(repr=False, compare=False)
    component_of: np.ndarray = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return int(self.root_of.shape[0])

    @property
    def trees(self) -> list[Tree]:
        return [t for c in self.components for t in c.trees]


def decompose(mapping: Mapping, members: bool = False) -> Decomposition:
    """Split the functional digraph of `mapping` into cycles of rooted trees.

    Each cycle is listed starting from its smallest vertex and following
    ``T``.  With ``members=True`` every :class:`Tree` also carries its sorted
    vertex list.
    """
    images0 = mapping.zero_based()
    is_cyclic, root, comp, n_comp = label_vertices(images0)
    tree_size, _, comp_size = _sizes(root, comp, n_comp)

    tree_members = None
    if members:
        order = np.argsort(root, kind="stable")
        bounds = np.searchsorted(root[order], np.arange(mapping.n + 1))
        tree_members = {
            int(r): tuple((order[bounds[r]:bounds[r + 1]] + 1).tolist())
            for r in np.flatnonzero(is_cyclic)
        }

    # smallest cyclic vertex of each component starts its cycle listing
    starts = np.full(n_comp, -1, np.int64)
    for v in np.flatnonzero(is_cyclic):
        if starts[comp[v]] == -1:
            starts[comp[v]] = v

    components = []
    for k in range(n_comp):
        start = int(starts[k])
        cycle = [start]
        w = int(images0[start])
        while w != start:
            cycle.append(w)
            w = int(images0[w])
        trees = tuple(
            Tree(
                root=r + 1,
                size=int(tree_size[r]),
                members=None if tree_members is None else tree_members[r],
            )
            for r in cycle
        )
        components.append(
            Component(cycle=tuple(r + 1 for r in cycle), trees=trees, size=int(comp_size[k]))
        )
    root_of = root + 1
    root_of.setflags(write=False)
    comp.setflags(write=False)
    return Decomposition(
        components=tuple(components),
        cyclic_vertex_count=int(is_cyclic.sum()),
        root_of=root_of,
        component_of=comp,
    )


@dataclass(frozen=True)
class ExtremalStats:
    """Ranked sizes and the tree-in-largest-component flags.

    Lists are indexed from 0, so ``tree_sizes_desc[s - 1]`` is the size of the
    s-th largest tree.  Ranks beyond the number of trees (components) report
    size 0, no containing component (-1) and a false flag.
    """

    component_sizes_desc: tuple[int, ...]
    tree_sizes_desc: tuple[int, ...]
    largest_component_index: int
    tree_rank_component: tuple[int, ...]
    s_in_largest: tuple[bool, ...]
    tree_rank_roots: tuple[int, ...] = ()

    @property
    def mu(self) -> int:
        return self.component_sizes_desc[0]

    def mu_r(self, r: int) -> int:
        return self.component_sizes_desc[r - 1] if r <= len(self.component_sizes_desc) else 0

    def tau(self, s: int) -> int:
        return self.tree_sizes_desc[s - 1] if s <= len(self.tree_sizes_desc) else 0

    def in_largest(self, s: int) -> bool:
        return self.s_in_largest[s - 1] if s <= len(self.s_in_largest) else False


def extremal_stats(d: Decomposition, s_max: int | None = None, r_max: int | None = None) -> ExtremalStats:
    """Rank the components and trees of `d`.

    Ties are broken by the smallest vertex label, so the ranking is
    deterministic.  With `s_max` (`r_max`) the tree (component) lists are
    cut or zero-padded to that length.
    """
    # component indices already follow smallest-vertex order
    comps = sorted(range(len(d.components)), key=lambda k: (-d.components[k].size, k))
    tree_keys = []
    tree_min = _tree_minima(d)
    for k, c in enumerate(d.components):
        for t in c.trees:
            tree_keys.append((-t.size, tree_min[t.root], k, t.root))
    tree_keys.sort()

    largest = comps[0]
    comp_sizes = [d.components[k].size for k in comps]
    tree_sizes = [-key[0] for key in tree_keys]
    tree_comp = [key[2] for key in tree_keys]
    tree_roots = [key[3] for key in tree_keys]
    if r_max is not None:
        comp_sizes = (comp_sizes + [0] * r_max)[:r_max]
    if s_max is not None:
        pad = [0] * s_max
        tree_sizes = (tree_sizes + pad)[:s_max]
        tree_comp = (tree_comp + [-1] * s_max)[:s_max]
        tree_roots = (tree_roots + pad)[:s_max]
    return ExtremalStats(
        component_sizes_desc=tuple(comp_sizes),
        tree_sizes_desc=tuple(tree_sizes),
        largest_component_index=largest,
        tree_rank_component=tuple(tree_comp),
        s_in_largest=tuple(k == largest for k in tree_comp),
        tree_rank_roots=tuple(tree_roots),
    )


def _tree_minima(d: Decomposition) -> dict[int, int]:
    minima: dict[int, int] = {}
    for v, r in enumerate(d.root_of.tolist(), start=1):
        minima.setdefault(r, v)
    return minima
