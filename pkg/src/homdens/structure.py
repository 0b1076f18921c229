"""Hanging path systems, doubled rooted trees, and term classification.

A hanging path system is a set of openly disjoint paths whose internal
nodes have degree 2 in the host graph, with at most two paths starting at
any node; its value is the total number of internal nodes.  Paths may be
closed (both endpoints equal, counting as two starts), which is how a
doubled edge or a pendant cycle contributes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .bigraph import (
    ACYCLIC,
    Bigraph,
    BigraphError,
    StructureSummary,
    _idkey,
    bigraph,
    components,
    girth,
    structure_queries,
    subgraph_on,
)

HPS_SEARCH_CAP = 16


class StructureError(ValueError):
    """Invalid path system, tree, or classification input."""


# -- hanging path systems ------------------------------------------------------

@dataclass(frozen=True)
class HangingPathSystem:
    paths: tuple  # tuple of node sequences; seq[0] == seq[-1] marks a closed path
    value: int
    max_length: int

    @property
    def lengths(self) -> tuple:
        return tuple(len(p) - 1 for p in self.paths)


def make_hps(paths: Iterable[Sequence]) -> HangingPathSystem:
    paths = tuple(tuple(p) for p in paths)
    value = sum(len(p) - 2 for p in paths)
    max_length = max((len(p) - 1 for p in paths), default=0)
    return HangingPathSystem(paths, value, max_length)


def validate_hps(f: Bigraph, hps: HangingPathSystem) -> None:
    """Re-check every invariant of a hanging path system; raises on failure."""
    deg = f.degrees()
    mult = f.edge_multiplicities()

    def edge_count(a, b):
        return mult.get((a, b), 0) + mult.get((b, a), 0)

    internal_used: set = set()
    endpoint_counts: dict = {}
    all_nodes_per_path = []
    for p in hps.paths:
        if len(p) < 3:
            raise StructureError(f"path {p!r} has no internal node")
        closed = p[0] == p[-1]
        interior = p[1:-1]
        if len(set(interior)) != len(interior):
            raise StructureError(f"path {p!r} repeats an internal node")
        if p[0] in interior or p[-1] in interior:
            raise StructureError(f"path {p!r} revisits an endpoint")
        usage: dict = {}
        for a, b in zip(p, p[1:]):
            key = tuple(sorted((a, b), key=_idkey))
            usage[key] = usage.get(key, 0) + 1
            if usage[key] > edge_count(a, b):
                raise StructureError(f"path {p!r} overuses edge {key!r}")
        for v in interior:
            if deg[v] != 2:
                raise StructureError(f"internal node {v!r} has degree {deg[v]}, need 2")
        all_nodes_per_path.append(set(p))
        for v in interior:
            internal_used.add(v)
        if closed:
            endpoint_counts[p[0]] = endpoint_counts.get(p[0], 0) + 2
        else:
            for v in (p[0], p[-1]):
                endpoint_counts[v] = endpoint_counts.get(v, 0) + 1
    # openly disjoint: a node interior to one path appears in no other path
    for i, p in enumerate(hps.paths):
        interior = set(p[1:-1])
        for j, q_nodes in enumerate(all_nodes_per_path):
            if i != j and interior & q_nodes:
                raise StructureError(f"paths {i} and {j} share an internal node")
    for v, c in endpoint_counts.items():
        if v in internal_used:
            raise StructureError(f"node {v!r} is both endpoint and internal")
        if c > 2:
            raise StructureError(f"{c} paths start at node {v!r}; at most 2 allowed")
    if hps.value != sum(len(p) - 2 for p in hps.paths):
        raise StructureError("declared value does not match internal-node count")
    if hps.paths and hps.max_length != max(len(p) - 1 for p in hps.paths):
        raise StructureError("declared max_length does not match paths")


def _candidate_paths(f: Bigraph, max_len: int):
    """All paths of length 2..max_len whose internal nodes have degree 2.

    Closed walks back to the start node are admitted as closed paths
    (they consume distinct edge copies in a multigraph).  Each path is
    canonicalized against its reversal.
    """
    deg = f.degrees()
    adj = {v: sorted(set(nbrs), key=_idkey) for v, nbrs in f.adjacency().items()}
    mult = f.edge_multiplicities()

    def edge_count(a, b):
        return mult.get((a, b), 0) + mult.get((b, a), 0)

    found = set()

    def record(path):
        cand = tuple(path)
        found.add(min(cand, tuple(reversed(cand))))

    def extend(path, usage):
        if len(path) - 1 >= max_len:
            return
        tail = path[-1]
        if len(path) >= 2 and deg[tail] != 2:
            return  # the tail would become an internal node of any extension
        for w in adj[tail]:
            key = tuple(sorted((tail, w), key=_idkey))
            if usage.get(key, 0) >= edge_count(tail, w):
                continue
            if w in path[1:-1]:
                continue
            closing = w == path[0]
            usage[key] = usage.get(key, 0) + 1
            path.append(w)
            if len(path) - 1 >= 2:
                record(path)
            if not closing:
                extend(path, usage)
            path.pop()
            usage[key] -= 1

    for v in f.nodes:
        extend([v], {})
    valid = []
    for p in found:
        interior = p[1:-1]
        if all(deg[x] == 2 for x in interior) and len(set(interior)) == len(interior):
            valid.append(p)
    return sorted(valid, key=lambda p: (-(len(p) - 2), p))


def find_hanging_path_system(f: Bigraph, max_len: int, cap: int = HPS_SEARCH_CAP,
                             allow_closed: bool = True) -> HangingPathSystem:
    """Maximum-value hanging path system with path lengths ≤ ``max_len``.

    Exact branch and bound over all candidate paths; deterministic.
    ``allow_closed=False`` restricts to open paths (the form consumed by
    the product-of-cycles bound).
    """
    if f.n_nodes > cap:
        raise StructureError(f"search cap exceeded: {f.n_nodes} nodes > {cap}")
    if max_len < 2:
        return make_hps(())
    cands = _candidate_paths(f, max_len)
    if not allow_closed:
        cands = [p for p in cands if p[0] != p[-1]]
    values = [len(p) - 2 for p in cands]
    suffix = [0] * (len(cands) + 1)
    for i in range(len(cands) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + values[i]

    best: list = [0, ()]

    def compatible(p, internal_used, node_used, endpoint_counts):
        interior = p[1:-1]
        closed = p[0] == p[-1]
        ends = (p[0],) if closed else (p[0], p[-1])
        for v in interior:
            if v in node_used:
                return False
        for v in ends:
            if v in internal_used:
                return False
        need = {}
        for v in ends:
            need[v] = need.get(v, 0) + (2 if closed else 1)
        for v, inc in need.items():
            if endpoint_counts.get(v, 0) + inc > 2:
                return False
        return True

    def dfs(i, value, chosen, internal_used, node_used, endpoint_counts):
        if value > best[0]:
            best[0] = value
            best[1] = tuple(chosen)
        if i >= len(cands) or value + suffix[i] <= best[0]:
            return
        p = cands[i]
        if compatible(p, internal_used, node_used, endpoint_counts):
            interior = p[1:-1]
            closed = p[0] == p[-1]
            ends = (p[0],) if closed else (p[0], p[-1])
            added_nodes = [v for v in set(p) if v not in node_used]
            for v in interior:
                internal_used.add(v)
            for v in added_nodes:
                node_used.add(v)
            for v in ends:
                endpoint_counts[v] = endpoint_counts.get(v, 0) + (2 if closed else 1)
            chosen.append(p)
            dfs(i + 1, value + len(p) - 2, chosen, internal_used, node_used, endpoint_counts)
            chosen.pop()
            for v in ends:
                endpoint_counts[v] -= 2 if closed else 1
            for v in added_nodes:
                node_used.discard(v)
            for v in interior:
                internal_used.discard(v)
        dfs(i + 1, value, chosen, internal_used, node_used, endpoint_counts)

    dfs(0, 0, [], set(), set(), {})
    hps = make_hps(best[1])
    validate_hps(f, hps)
    return hps


# -- rooted trees and the doubled-tree construction -----------------------------

@dataclass(frozen=True)
class RootedTree:
    """Rooted tree on nodes 0..n-1; node 0 is the root.

    ``parents[i]`` is the parent of node i+1 and must be < i+1, so the
    representation is acyclic and connected by construction.
    """

    parents: tuple

    def __post_init__(self):
        for i, p in enumerate(self.parents):
            if not 0 <= p <= i:
                raise StructureError("parents[i] must reference an earlier node")

    @property
    def n_nodes(self) -> int:
        return len(self.parents) + 1

    def children(self) -> dict:
        ch = {v: [] for v in range(self.n_nodes)}
        for i, p in enumerate(self.parents):
            ch[p].append(i + 1)
        return ch

    def depths(self) -> dict:
        d = {0: 0}
        for i, p in enumerate(self.parents):
            d[i + 1] = d[p] + 1
        return d

    def degree(self, v: int) -> int:
        ch = self.children()
        return len(ch[v]) + (0 if v == 0 else 1)

    def to_bigraph(self) -> Bigraph:
        d = self.depths()
        first = tuple(v for v in range(self.n_nodes) if d[v] % 2 == 0)
        second = tuple(v for v in range(self.n_nodes) if d[v] % 2 == 1)
        edges = tuple((i + 1, p) if d[i + 1] % 2 == 0 else (p, i + 1)
                      for i, p in enumerate(self.parents))
        return bigraph(first, second, edges)


def rooted_tree(parents: Sequence[int]) -> RootedTree:
    return RootedTree(tuple(parents))


def tree_stats(t: RootedTree) -> tuple[int, int]:
    """(min-depth, depth): closest and farthest leaf distance from the root."""
    ch = t.children()
    d = t.depths()
    leaves = [v for v in range(t.n_nodes) if v != 0 and not ch[v]]
    if not leaves:
        return 0, 0
    dists = [d[v] for v in leaves]
    return min(dists), max(dists)


def _double_node(t: RootedTree, v: int, copy: str):
    # degree-1 nodes (including a degree-1 root) are glued between copies
    return f"g{v}" if t.degree(v) == 1 else f"{copy}{v}"


def double_tree(t: RootedTree) -> Bigraph:
    """Two copies of the tree with corresponding degree-1 nodes identified.

    A path doubles into a cycle; a single edge doubles into the 2-cycle.
    """
    if t.n_nodes < 2:
        raise StructureError("doubling needs at least two nodes")
    d = t.depths()
    first, second, edges = [], [], []
    seen = set()
    for copy in ("a", "b"):
        for v in range(t.n_nodes):
            name = _double_node(t, v, copy)
            if name in seen:
                continue
            seen.add(name)
            (first if d[v] % 2 == 0 else second).append(name)
        for i, p in enumerate(t.parents):
            c = i + 1
            e = (_double_node(t, c, copy), _double_node(t, p, copy))
            if d[c] % 2 == 1:
                e = (e[1], e[0])
            edges.append(e)
    return bigraph(first, second, edges)


def double_tree_hps(t: RootedTree) -> HangingPathSystem:
    """Constructive hanging path system in the doubled tree.

    Recursive pruning at the root: if the stem to the first branch point
    has length one, combine the systems of two branch subtrees; otherwise
    drop the second branch's root, combine, and add the stem plus its
    mirror as two extra paths.  The result is validated and satisfies
    value >= depth + max(0, min_depth - 3) with path lengths
    <= max(depth, 2).
    """
    if t.n_nodes < 2:
        raise StructureError("doubling needs at least two nodes")
    ch = t.children()
    d = t.depths()

    def subtree_nodes(root):
        out, stack = [], [root]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(ch[v])
        return out

    def subtree_depth(root):
        return max(d[v] for v in subtree_nodes(root)) - d[root]

    def node_name(v, copy):
        return _double_node(t, v, copy)

    def build(root, nodes):
        """Return list of path node-sequences for the doubled subtree."""
        nodes = set(nodes)
        kids = [c for c in ch[root] if c in nodes]
        if not kids:
            return []
        # prune to the deepest branch while the root has several
        if len(kids) > 1:
            deepest = max(kids, key=lambda c: (subtree_depth(c) + 1, -c))
            keep = {root} | set(subtree_nodes(deepest))
            return build(root, keep & nodes)
        # walk the stem to the first branch point or leaf
        stem = [root]
        v = kids[0]
        while True:
            stem.append(v)
            nxt = [c for c in ch[v] if c in nodes]
            if len(nxt) != 1:
                break
            v = nxt[0]
        a = len(stem) - 1
        branch_kids = [c for c in ch[v] if c in nodes]
        if not branch_kids:
            # the subtree is a bare path of length a ending at a glued leaf
            pa = [node_name(x, "a") for x in stem]
            pb = [node_name(x, "b") for x in stem]
            if a == 1:
                # one path of length 2 through the glued leaf (closed if the
                # root is glued too, i.e. the doubled single edge)
                return [pa + pb[-2::-1]]
            # cut the doubled path into its two halves
            return [pa, pb]
        # v is a branch point: pick the deepest subtree and one other
        branch_kids.sort(key=lambda c: (-(subtree_depth(c) + 1), c))
        c1, c2 = branch_kids[0], branch_kids[1]
        f1_nodes = {v} | set(subtree_nodes(c1))
        s1 = build(v, f1_nodes)
        if a == 1:
            f2_nodes = {v} | set(subtree_nodes(c2))
            s2 = build(v, f2_nodes)
            return s1 + s2
        s3 = build(c2, set(subtree_nodes(c2)))
        pa = [node_name(x, "a") for x in stem]
        pb = [node_name(x, "b") for x in stem]
        return s1 + s3 + [pa, pb]

    paths = build(0, range(t.n_nodes))
    hps = make_hps(paths)
    doubled = double_tree(t)
    validate_hps(doubled, hps)
    h, g = tree_stats(t)
    if hps.value < g + max(0, h - 3):
        raise StructureError(
            f"constructed system value {hps.value} below bound {g + max(0, h - 3)}")
    if hps.paths and hps.max_length > max(g, 2):
        raise StructureError(
            f"constructed path length {hps.max_length} above bound {max(g, 2)}")
    return hps


# -- classification of expansion terms -------------------------------------------

# tags, in the order the verifier groups them
TAG_EMPTY = "empty"
TAG_ISOLATED_EDGE = "has_isolated_edge_component"
TAG_STAR = "star"
TAG_TWO_ENDNODES = "two_endnodes_non_star"
TAG_SINGLE_CYCLE = "single_cycle"
TAG_COMPLETE_BIPARTITE = "complete_bipartite_non_star"
TAG_MIN_DEGREE_TWO = "min_degree_two_other"
TAG_ONE_ENDNODE = "one_endnode"
TAG_ALL_CYCLES = "cycle_components"  # disconnected union of single cycles


@dataclass(frozen=True)
class TermClass:
    tag: str
    girth: float | None
    component_tags: tuple
    summary: StructureSummary


def _component_tag(comp: Bigraph) -> str:
    s = structure_queries(comp)
    if comp.n_nodes == 0:
        return TAG_EMPTY
    if comp.n_nodes == 2 and comp.n_edges == 1:
        return TAG_ISOLATED_EDGE
    if s.is_star:
        return TAG_STAR
    if s.endnode_count >= 2:
        return TAG_TWO_ENDNODES
    if s.is_single_cycle:
        return TAG_SINGLE_CYCLE
    if s.is_complete_bipartite and len(comp.first) >= 2 and len(comp.second) >= 2:
        return TAG_COMPLETE_BIPARTITE
    if s.min_degree >= 2:
        return TAG_MIN_DEGREE_TWO
    return TAG_ONE_ENDNODE


def classify_term(f: Bigraph) -> TermClass:
    """Classify a spanning term (no isolated nodes allowed).

    Connected graphs get one tag; for disconnected graphs the whole-graph
    tag aggregates the per-component tags, with single cycles claiming the
    K_{2,2}/4-cycle overlap so that cycle terms feed the nonnegative cycle
    budget.
    """
    if f.n_nodes == 0:
        summary = structure_queries(f)
        return TermClass(TAG_EMPTY, None, (), summary)
    deg = f.degrees()
    if any(d == 0 for d in deg.values()):
        raise StructureError("classification requires no isolated nodes")
    summary = structure_queries(f)
    comp_graphs = [subgraph_on(f, comp) for comp in summary.components]
    ctags = tuple(_component_tag(c) for c in comp_graphs)
    g = summary.girth

    if any(t == TAG_ISOLATED_EDGE for t in ctags):
        return TermClass(TAG_ISOLATED_EDGE, None, ctags, summary)
    if len(ctags) == 1:
        tag = ctags[0]
        girth_for = None if tag in (TAG_STAR,) else (g if g != ACYCLIC else None)
        return TermClass(tag, girth_for, ctags, summary)
    # disconnected, no K_2 component
    if summary.endnode_count >= 2:
        return TermClass(TAG_TWO_ENDNODES, None, ctags, summary)
    if summary.endnode_count == 1:
        return TermClass(TAG_ONE_ENDNODE, g, ctags, summary)
    if all(t == TAG_SINGLE_CYCLE for t in ctags):
        return TermClass(TAG_ALL_CYCLES, g, ctags, summary)
    return TermClass(TAG_MIN_DEGREE_TWO, g, ctags, summary)
