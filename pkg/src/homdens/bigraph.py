"""Bipartite multigraphs with partial labels and their gluing algebra.

A bigraph carries an explicit bipartition: every node belongs to a "first"
or "second" class, and every edge joins the two classes.  Parallel edges are
allowed (edges form a multiset), which is required for doubled edges such as
the 2-cycle.  Up to ``k`` nodes may be labeled ``1..k``; gluing identifies
equally-labeled nodes of two graphs.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

NodeId = object  # any hashable; families use ints, derived graphs may use strings

#: girth of an acyclic graph (explicit sentinel, never 0)
ACYCLIC = math.inf

CANONICAL_CAP = 12
SPANNING_CAP = 20


class BigraphError(ValueError):
    """Malformed bigraph or invalid graph operation."""


def _idkey(v):
    # deterministic ordering across mixed id types
    return (v.__class__.__name__, repr(v))


@dataclass(frozen=True)
class Bigraph:
    """Immutable two-sided multigraph with an optional partial labeling.

    ``edges`` is a tuple of ``(u, v)`` pairs with ``u`` in the first class
    and ``v`` in the second; repeated pairs encode multiplicity.  ``labels``
    is a tuple of ``(index, node)`` pairs with indices ``1..k``.
    """

    first: tuple
    second: tuple
    edges: tuple
    labels: tuple = ()

    def __post_init__(self):
        firsts, seconds = set(self.first), set(self.second)
        if len(firsts) != len(self.first) or len(seconds) != len(self.second):
            raise BigraphError("duplicate node identifiers within a class")
        if firsts & seconds:
            raise BigraphError("node identifiers shared between classes")
        for u, v in self.edges:
            if u not in firsts or v not in seconds:
                raise BigraphError(f"edge ({u!r}, {v!r}) does not join first class to second class")
        idx = [i for i, _ in self.labels]
        if sorted(idx) != list(range(1, len(idx) + 1)):
            raise BigraphError("label indices must be distinct and contiguous 1..k")
        nodes = firsts | seconds
        lab_nodes = [v for _, v in self.labels]
        if len(set(lab_nodes)) != len(lab_nodes) or any(v not in nodes for v in lab_nodes):
            raise BigraphError("labels must injectively map onto existing nodes")

    # -- basic views ------------------------------------------------------

    @property
    def nodes(self) -> tuple:
        return self.first + self.second

    @property
    def n_nodes(self) -> int:
        return len(self.first) + len(self.second)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def k(self) -> int:
        return len(self.labels)

    @property
    def label_map(self) -> dict:
        return dict(self.labels)

    def side(self, v) -> str:
        if v in set(self.first):
            return "first"
        if v in set(self.second):
            return "second"
        raise BigraphError(f"unknown node {v!r}")

    def edge_multiplicities(self) -> Counter:
        return Counter(self.edges)

    def degree(self, v) -> int:
        return sum(1 for u, w in self.edges if u == v or w == v)

    def degrees(self) -> dict:
        deg = {v: 0 for v in self.nodes}
        for u, w in self.edges:
            deg[u] += 1
            deg[w] += 1
        return deg

    def adjacency(self) -> dict:
        """Neighbor multisets: node -> Counter of neighbors."""
        adj = {v: Counter() for v in self.nodes}
        for u, w in self.edges:
            adj[u][w] += 1
            adj[w][u] += 1
        return adj

    def is_simple(self) -> bool:
        return all(c == 1 for c in self.edge_multiplicities().values())

    def __repr__(self):
        return (f"Bigraph(|first|={len(self.first)}, |second|={len(self.second)}, "
                f"edges={self.n_edges}, k={self.k})")


def bigraph(first: Iterable, second: Iterable, edges: Iterable, labels: Mapping | None = None) -> Bigraph:
    """Build a :class:`Bigraph`, accepting edges written in either order."""
    first = tuple(first)
    second = tuple(second)
    fset, sset = set(first), set(second)
    norm = []
    for u, v in edges:
        if u in fset and v in sset:
            norm.append((u, v))
        elif v in fset and u in sset:
            norm.append((v, u))
        else:
            raise BigraphError(f"edge ({u!r}, {v!r}) does not join first class to second class")
    lab = tuple(sorted(((int(i), v) for i, v in (labels or {}).items())))
    return Bigraph(first, second, tuple(norm), lab)


def _renumber(first, second, edges, labels):
    """Relabel nodes with consecutive ints (first class then second)."""
    mapping = {}
    for v in first:
        mapping[v] = len(mapping)
    for v in second:
        mapping[v] = len(mapping)
    return Bigraph(
        tuple(range(len(first))),
        tuple(range(len(first), len(first) + len(second))),
        tuple((mapping[u], mapping[v]) for u, v in edges),
        tuple(sorted((i, mapping[v]) for i, v in labels)),
    )


# -- named families ---------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    """Parameterized family of standard graphs.

    kind: one of ``path``, ``labeled_path``, ``doubly_labeled_path``,
    ``cycle``, ``rooted_cycle``, ``complete_bipartite``,
    ``labeled_complete_bipartite``, ``empty``, ``edge``.
    """

    kind: str
    n: int = 0
    a: int = 0
    b: int = 0


def construct_family(spec: FamilySpec) -> Bigraph:
    kind = spec.kind
    if kind == "empty":
        return Bigraph((), (), ())
    if kind == "edge":
        return path_graph(2)
    if kind in ("path", "labeled_path", "doubly_labeled_path"):
        if spec.n < 1:
            raise BigraphError("path needs at least one node")
        ends = {"path": 0, "labeled_path": 1, "doubly_labeled_path": 2}[kind]
        return path_graph(spec.n, labeled_ends=ends)
    if kind in ("cycle", "rooted_cycle"):
        return cycle_graph(spec.n, labeled=(kind == "rooted_cycle"))
    if kind in ("complete_bipartite", "labeled_complete_bipartite"):
        return complete_bipartite(spec.a, spec.b, labeled=(kind == "labeled_complete_bipartite"))
    raise BigraphError(f"unknown family kind {kind!r}")


def path_graph(n: int, labeled_ends: int = 0) -> Bigraph:
    """Path with ``n`` nodes (n-1 edges); 0, 1 or 2 endpoint labels."""
    if n < 1:
        raise BigraphError("path needs at least one node")
    first = tuple(v for v in range(n) if v % 2 == 0)
    second = tuple(v for v in range(n) if v % 2 == 1)
    edges = tuple((v, v + 1) if v % 2 == 0 else (v + 1, v) for v in range(n - 1))
    labels = {}
    if labeled_ends >= 1:
        labels[1] = 0
    if labeled_ends >= 2:
        if n == 1:
            raise BigraphError("one-node path has a single endpoint")
        labels[2] = n - 1
    return bigraph(first, second, edges, labels)


def cycle_graph(n: int, labeled: bool = False) -> Bigraph:
    """Even cycle with ``n`` nodes; ``n == 2`` is the doubled edge."""
    if n < 2:
        raise BigraphError("cycle needs at least two nodes")
    if n % 2 != 0:
        raise BigraphError(f"odd cycle C_{n} is not bipartite")
    first = tuple(v for v in range(n) if v % 2 == 0)
    second = tuple(v for v in range(n) if v % 2 == 1)
    edges = [(v, (v + 1) % n) for v in range(n)]
    edges = tuple(e if e[0] % 2 == 0 else (e[1], e[0]) for e in edges)
    return bigraph(first, second, edges, {1: 0} if labeled else None)


def complete_bipartite(a: int, b: int, labeled: bool = False) -> Bigraph:
    """K_{a,b} with the a-class first; labels 1..a on the a-class if asked."""
    if a < 1 or b < 1:
        raise BigraphError("complete bipartite classes must be nonempty")
    first = tuple(range(a))
    second = tuple(range(a, a + b))
    edges = tuple((u, v) for u in first for v in second)
    labels = {i + 1: i for i in range(a)} if labeled else None
    return bigraph(first, second, edges, labels)


def empty_graph() -> Bigraph:
    return Bigraph((), (), ())


def bipartite_from_edges(edges: Iterable, anchor=None, labels: Mapping | None = None) -> Bigraph:
    """Two-color a connected edge list by breadth-first search.

    ``anchor`` (default: smallest node) is placed in the first class.
    Raises if the graph is not bipartite or not connected.
    """
    edges = [tuple(e) for e in edges]
    nodes = sorted({v for e in edges for v in e}, key=_idkey)
    if not nodes:
        return empty_graph()
    adj = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    start = anchor if anchor is not None else nodes[0]
    color = {start: 0}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in color:
                color[w] = 1 - color[v]
                queue.append(w)
            elif color[w] == color[v]:
                raise BigraphError("edge list contains an odd cycle")
    if set(color) != set(nodes):
        raise BigraphError("edge list is not connected; build components separately")
    first = tuple(v for v in nodes if color[v] == 0)
    second = tuple(v for v in nodes if color[v] == 1)
    return bigraph(first, second, edges, labels)


# -- gluing algebra ----------------------------------------------------------

def glue_product(f1: Bigraph, f2: Bigraph) -> Bigraph:
    """Disjoint union with equally-labeled nodes identified (labels kept).

    Both graphs must be k-labeled with the same k, and each shared label
    must sit on the same side in both; otherwise the merged graph would not
    be bipartite.
    """
    if f1.k != f2.k:
        raise BigraphError(f"label count mismatch: {f1.k} vs {f2.k}")
    lm1, lm2 = f1.label_map, f2.label_map
    for i in lm1:
        if f1.side(lm1[i]) != f2.side(lm2[i]):
            raise BigraphError(f"label {i} sits on different sides")
    # nodes of f1 keep identity; unlabeled nodes of f2 come in fresh
    lab2_nodes = set(lm2.values())
    remap = {lm2[i]: lm1[i] for i in lm2}
    first = list(f1.first)
    second = list(f1.second)
    for v in f2.first:
        if v not in lab2_nodes:
            remap[v] = ("g2", v)
            first.append(remap[v])
    for v in f2.second:
        if v not in lab2_nodes:
            remap[v] = ("g2", v)
            second.append(remap[v])
    edges = list(f1.edges) + [(remap[u], remap[v]) for u, v in f2.edges]
    labels = tuple((i, lm1[i]) for i in sorted(lm1))
    return _renumber(tuple(first), tuple(second), tuple(edges), labels)


def unlabel(f: Bigraph) -> Bigraph:
    return Bigraph(f.first, f.second, f.edges, ())


def star_product(f1: Bigraph, f2: Bigraph) -> Bigraph:
    """Glue then unlabel (the graph product behind density Cauchy-Schwarz)."""
    return unlabel(glue_product(f1, f2))


def square(f: Bigraph) -> Bigraph:
    """Two copies glued along all labels, then unlabeled."""
    return star_product(f, f)


def subdivide(f: Bigraph) -> Bigraph:
    """One new node on each edge; original nodes form the first class."""
    first = tuple(("o", v) for v in f.nodes)
    second = tuple(("s", j) for j in range(f.n_edges))
    edges = []
    for j, (u, v) in enumerate(f.edges):
        edges.append((("o", u), ("s", j)))
        edges.append((("o", v), ("s", j)))
    labels = tuple((i, ("o", v)) for i, v in f.labels)
    return _renumber(first, second, tuple(edges), labels)


def transpose(f: Bigraph) -> Bigraph:
    """Interchange the two classes; labels follow their nodes."""
    return Bigraph(f.second, f.first, tuple((v, u) for u, v in f.edges), f.labels)


def disjoint_union(f1: Bigraph, f2: Bigraph) -> Bigraph:
    first = tuple(("u1", v) for v in f1.first) + tuple(("u2", v) for v in f2.first)
    second = tuple(("u1", v) for v in f1.second) + tuple(("u2", v) for v in f2.second)
    edges = tuple((("u1", u), ("u1", v)) for u, v in f1.edges) + \
        tuple((("u2", u), ("u2", v)) for u, v in f2.edges)
    return _renumber(first, second, edges, ())


def spanning_terms(f: Bigraph, cap: int = SPANNING_CAP) -> Iterator[tuple[tuple, Bigraph]]:
    """Stream all 2^m spanning subgraphs, isolated nodes deleted.

    Yields ``(edge_indices, subgraph)`` pairs; node identities are
    preserved so terms can be related back to ``f``.  The empty subset
    yields the empty graph.
    """
    m = f.n_edges
    if m > cap:
        raise BigraphError(f"spanning-term cap exceeded: {m} edges > {cap}")
    for mask in range(1 << m):
        idx = tuple(j for j in range(m) if mask >> j & 1)
        chosen = tuple(f.edges[j] for j in idx)
        used = {u for u, _ in chosen} | {v for _, v in chosen}
        sub = Bigraph(
            tuple(v for v in f.first if v in used),
            tuple(v for v in f.second if v in used),
            chosen,
            (),
        )
        yield idx, sub


# -- structural queries -------------------------------------------------------

@dataclass(frozen=True)
class StructureSummary:
    girth: float  # ACYCLIC (= inf) when no cycle exists
    degree_sequence: tuple
    components: tuple  # tuple of node tuples
    endnodes: tuple
    adjacent_endnode_pairs: tuple
    is_star: bool
    is_single_cycle: bool
    is_complete_bipartite: bool
    min_degree: int
    max_degree: int

    @property
    def is_connected(self) -> bool:
        return len(self.components) <= 1

    @property
    def endnode_count(self) -> int:
        return len(self.endnodes)


def components(f: Bigraph) -> tuple:
    adj = f.adjacency()
    seen, comps = set(), []
    for start in f.nodes:
        if start in seen:
            continue
        comp, queue = [], deque([start])
        seen.add(start)
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        comps.append(tuple(comp))
    return tuple(comps)


def girth(f: Bigraph) -> float:
    """Shortest cycle length; parallel edges give girth 2; acyclic -> inf."""
    if any(c >= 2 for c in f.edge_multiplicities().values()):
        return 2
    adj = {v: sorted(nbrs, key=_idkey) for v, nbrs in f.adjacency().items()}
    best = ACYCLIC
    for root in f.nodes:
        dist = {root: 0}
        parent = {root: None}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            if 2 * dist[v] >= best:
                continue
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    queue.append(w)
                elif parent[v] != w:
                    best = min(best, dist[v] + dist[w] + 1)
    return best


def subgraph_on(f: Bigraph, nodes: Iterable) -> Bigraph:
    keep = set(nodes)
    return Bigraph(
        tuple(v for v in f.first if v in keep),
        tuple(v for v in f.second if v in keep),
        tuple((u, v) for u, v in f.edges if u in keep and v in keep),
        (),
    )


def structure_queries(f: Bigraph) -> StructureSummary:
    deg = f.degrees()
    degree_sequence = tuple(sorted(deg.values()))
    comps = components(f)
    endnodes = tuple(v for v in f.nodes if deg[v] == 1)
    eset = set(endnodes)
    adj_pairs = tuple(sorted({tuple(sorted((u, v), key=_idkey))
                              for u, v in f.edges if u in eset and v in eset}, key=repr))
    n = f.n_nodes
    m = f.n_edges
    min_deg = min(deg.values()) if deg else 0
    max_deg = max(deg.values()) if deg else 0
    connected = len(comps) <= 1
    # star: all edges share one node (needs >= 1 edge)
    is_star = False
    if m >= 1 and connected:
        common = set(f.nodes)
        for u, v in f.edges:
            common &= {u, v}
        is_star = bool(common)
    is_single_cycle = connected and n >= 2 and m == n and min_deg == 2 and max_deg == 2
    is_cb = (
        f.is_simple()
        and len(f.first) >= 1
        and len(f.second) >= 1
        and m == len(f.first) * len(f.second)
    )
    return StructureSummary(
        girth=girth(f),
        degree_sequence=degree_sequence,
        components=comps,
        endnodes=endnodes,
        adjacent_endnode_pairs=adj_pairs,
        is_star=is_star,
        is_single_cycle=is_single_cycle,
        is_complete_bipartite=is_cb,
        min_degree=min_deg,
        max_degree=max_deg,
    )


# -- canonical forms ----------------------------------------------------------

def _refine_colors(f: Bigraph, initial: dict) -> dict:
    """Stable 1-dim Weisfeiler-Leman refinement of a node coloring."""
    adj = f.adjacency()
    colors = dict(initial)
    while True:
        sigs = {}
        for v in f.nodes:
            nbr = tuple(sorted((colors[w], c) for w, c in adj[v].items()))
            sigs[v] = (colors[v], nbr)
        ranks = {s: i for i, s in enumerate(sorted(set(sigs.values())))}
        new = {v: ranks[sigs[v]] for v in f.nodes}
        if new == colors:
            return colors
        colors = new


def _canonical_encoding(f: Bigraph) -> tuple:
    """Minimum edge encoding over all admissible node orderings."""
    deg = f.degrees()
    lab = {v: i for i, v in f.labels}
    init = {}
    for v in f.nodes:
        init[v] = (0 if v in set(f.first) else 1, deg[v], lab.get(v, 0))
    ranks = {s: i for i, s in enumerate(sorted(set(init.values())))}
    colors = _refine_colors(f, {v: ranks[init[v]] for v in f.nodes})
    # group nodes by (side, color); orderings permute inside each cell only
    cells = {}
    for v in f.nodes:
        cells.setdefault((f.side(v) == "second", colors[v]), []).append(v)
    cell_keys = sorted(cells)
    for key in cell_keys:
        cells[key].sort(key=_idkey)
    mult = f.edge_multiplicities()

    best = None
    for perms in itertools.product(*(itertools.permutations(cells[k]) for k in cell_keys)):
        pos = {}
        for cell_perm in perms:
            for v in cell_perm:
                pos[v] = len(pos)
        enc = tuple(sorted((pos[u], pos[v], c) for (u, v), c in mult.items()))
        cand = (enc, tuple(sorted((i, pos[v]) for i, v in f.labels)))
        if best is None or cand < best:
            best = cand
    if best is None:
        best = ((), ())
    side_sizes = (len(f.first), len(f.second))
    cell_shape = tuple((k[0], len(cells[k])) for k in cell_keys)
    return (side_sizes, cell_shape) + best


def canonical_form(f: Bigraph, side_preserving: bool = True, cap: int = CANONICAL_CAP) -> tuple:
    """Hashable key equal for isomorphic bigraphs.

    ``side_preserving=False`` also identifies a graph with its transpose.
    Exhaustive search within color-refined cells; guarded by a node cap.
    """
    if f.n_nodes > cap:
        raise BigraphError(f"canonical-form cap exceeded: {f.n_nodes} nodes > {cap}")
    key = ("canon", _canonical_encoding(f))
    if side_preserving:
        return key
    tkey = ("canon", _canonical_encoding(transpose(f)))
    return min(key, tkey)


def is_isomorphic(f: Bigraph, g: Bigraph, side_preserving: bool = True, cap: int = CANONICAL_CAP) -> bool:
    if f.n_nodes != g.n_nodes or f.n_edges != g.n_edges:
        return False
    return canonical_form(f, side_preserving, cap) == canonical_form(g, side_preserving, cap)


# -- plain (one-sided) graphs -------------------------------------------------

@dataclass(frozen=True)
class PlainGraph:
    """Simple undirected graph, used as the target of homomorphism counts."""

    nodes: tuple
    edges: tuple  # tuple of 2-tuples, each stored sorted, no duplicates

    def __post_init__(self):
        nset = set(self.nodes)
        if len(nset) != len(self.nodes):
            raise BigraphError("duplicate node identifiers")
        seen = set()
        for u, v in self.edges:
            if u not in nset or v not in nset:
                raise BigraphError(f"edge ({u!r}, {v!r}) uses unknown node")
            if u == v:
                raise BigraphError("loops not allowed")
            key = tuple(sorted((u, v), key=_idkey))
            if key in seen:
                raise BigraphError("parallel edges not allowed in a plain graph")
            seen.add(key)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency_set(self) -> dict:
        adj = {v: set() for v in self.nodes}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def plain_graph(nodes: Iterable, edges: Iterable) -> PlainGraph:
    nodes = tuple(nodes)
    norm = tuple(tuple(sorted(e, key=_idkey)) for e in edges)
    return PlainGraph(nodes, norm)


def complete_graph(n: int) -> PlainGraph:
    return plain_graph(range(n), itertools.combinations(range(n), 2))


def underlying_plain(f: Bigraph) -> PlainGraph:
    if not f.is_simple():
        raise BigraphError("plain view requires a simple graph")
    return plain_graph(f.nodes, f.edges)


# -- JSON ----------------------------------------------------------------------

def bigraph_to_json(f: Bigraph) -> dict:
    for v in f.nodes:
        if not isinstance(v, (int, str)):
            return bigraph_to_json(_renumber(f.first, f.second, f.edges, f.labels))
    return {
        "first": list(f.first),
        "second": list(f.second),
        "edges": [[u, v] for u, v in f.edges],
        "labels": {str(i): v for i, v in f.labels},
    }


def bigraph_from_json(obj: Mapping) -> Bigraph:
    try:
        first = obj["first"]
        second = obj["second"]
        edges = obj["edges"]
    except (KeyError, TypeError) as exc:
        raise BigraphError(f"graph object must have first/second/edges: {exc}") from exc
    labels = {int(i): v for i, v in obj.get("labels", {}).items()}
    return bigraph(first, second, [tuple(e) for e in edges], labels)


def plain_graph_to_json(g: PlainGraph) -> dict:
    return {"nodes": list(g.nodes), "edges": [[u, v] for u, v in g.edges]}


def plain_graph_from_json(obj: Mapping) -> PlainGraph:
    try:
        return plain_graph(obj["nodes"], [tuple(e) for e in obj["edges"]])
    except (KeyError, TypeError) as exc:
        raise BigraphError(f"plain graph object must have nodes/edges: {exc}") from exc
