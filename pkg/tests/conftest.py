"""Shared oracles: brute-force homomorphism counting and graph enumeration.

These stay deliberately independent of the package's evaluation engine so
that engine results are checked against straight enumeration.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from homdens import Bigraph, PlainGraph, plain_graph


def hom_brute(f: Bigraph, g: PlainGraph) -> int:
    """Count adjacency-preserving maps V(F) -> V(G) by full enumeration."""
    fnodes = list(f.nodes)
    gnodes = list(g.nodes)
    adj = g.adjacency_set()
    edges = [(fnodes.index(u), fnodes.index(v)) for u, v in f.edges]
    count = 0
    for asg in itertools.product(range(len(gnodes)), repeat=len(fnodes)):
        ok = True
        for iu, iv in edges:
            if gnodes[asg[iv]] not in adj[gnodes[asg[iu]]]:
                ok = False
                break
        if ok:
            count += 1
    return count


def density_brute(f: Bigraph, kernel) -> object:
    """Sum the edge-factor product over every block assignment directly."""
    dom = {}
    meas = {}
    for v in f.first:
        dom[v] = kernel.n_rows
        meas[v] = kernel.row_measures
    for v in f.second:
        dom[v] = kernel.n_cols
        meas[v] = kernel.col_measures
    nodes = list(f.nodes)
    total = 0
    for asg in itertools.product(*(range(dom[v]) for v in nodes)):
        env = dict(zip(nodes, asg))
        prod = Fraction(1) if kernel.mode == "rational" else 1.0
        for v in nodes:
            prod *= meas[v][env[v]]
        for u, v in f.edges:
            prod *= kernel.values[env[u]][env[v]]
        total += prod
    return total if nodes else 1


def connected_bigraph_classes(max_nodes: int):
    """Representatives of connected simple bigraphs, up to labeled-side iso."""
    from homdens import canonical_form, structure_queries

    seen = set()
    out = []
    for total in range(1, max_nodes + 1):
        for a in range(total + 1):
            b = total - a
            if total > 1 and (a == 0 or b == 0):
                continue  # no edges can connect them
            first = tuple(range(a))
            second = tuple(range(a, total))
            slots = [(i, j) for i in first for j in second]
            for mask in range(1 << len(slots)):
                edges = tuple(slots[k] for k in range(len(slots)) if mask >> k & 1)
                g = Bigraph(first, second, edges)
                if len(structure_queries(g).components) > 1:
                    continue
                key = canonical_form(g)
                if key in seen:
                    continue
                seen.add(key)
                out.append(g)
    return out


def _plain_canonical(g: PlainGraph):
    nodes = list(g.nodes)
    n = len(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    edges = [(idx[u], idx[v]) for u, v in g.edges]
    best = None
    for perm in itertools.permutations(range(n)):
        enc = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in edges))
        if best is None or enc < best:
            best = enc
    return (n, best)


def plain_graph_classes(max_nodes: int, min_nodes: int = 1):
    """Representatives of all simple graphs up to isomorphism."""
    seen = set()
    out = []
    for n in range(min_nodes, max_nodes + 1):
        slots = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(slots)):
            edges = [slots[k] for k in range(len(slots)) if mask >> k & 1]
            g = plain_graph(range(n), edges)
            key = _plain_canonical(g)
            if key in seen:
                continue
            seen.add(key)
            out.append(g)
    return out
