"""Homomorphism densities of bigraphs in step kernels.

The main evaluator integrates the product of edge factors over the node
variables by factor elimination (dynamic programming over block
assignments), planned by a min-degree/min-fill heuristic.  A naive
summation over all block assignments is kept alongside as the independent
oracle for small instances, and the exact spanning-subgraph expansion of
t(F, 1+U) is built on top of the evaluator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .bigraph import (
    Bigraph,
    BigraphError,
    PlainGraph,
    _idkey,
    canonical_form,
    spanning_terms,
)
from .kernels import KernelError, StepKernel, kernel_from_graph


class DensityError(ValueError):
    """Evaluation failure: bad anchors, cap exceeded, invalid model."""


# -- contraction planning -----------------------------------------------------

@dataclass(frozen=True)
class ContractionPlan:
    order: tuple  # nodes in elimination order (anchored nodes excluded)
    width: int    # max number of live variables in any produced factor
    cost: int     # sum over steps of blocks^(live + 1)


def plan_contraction(f: Bigraph, anchors: frozenset = frozenset(), blocks: int = 2) -> ContractionPlan:
    """Order node eliminations by min-degree with min-fill tie-break.

    Deterministic: ties broken by node id.  Anchored nodes are never
    eliminated; the reported width is the largest factor scope produced.
    """
    neighbors = {v: set() for v in f.nodes}
    for u, v in f.edges:
        if u != v:
            neighbors[u].add(v)
            neighbors[v].add(u)
    live = set(f.nodes)
    order, width, cost = [], 0, 0
    while True:
        cands = [v for v in live if v not in anchors]
        if not cands:
            break

        def fill_in(v):
            nbrs = [w for w in neighbors[v] if w in live and w != v]
            missing = 0
            for a, b in itertools.combinations(nbrs, 2):
                if b not in neighbors[a]:
                    missing += 1
            return missing

        v = min(cands, key=lambda v: (len([w for w in neighbors[v] if w in live]),
                                      fill_in(v), _idkey(v)))
        nbrs = [w for w in neighbors[v] if w in live and w != v]
        width = max(width, len(nbrs))
        cost += blocks ** (len(nbrs) + 1)
        for a, b in itertools.combinations(nbrs, 2):
            neighbors[a].add(b)
            neighbors[b].add(a)
        live.remove(v)
        order.append(v)
    return ContractionPlan(tuple(order), width, cost)


# -- the evaluator -------------------------------------------------------------

def _domains(f: Bigraph, k: StepKernel):
    dom, measure = {}, {}
    for v in f.first:
        dom[v] = k.n_rows
        measure[v] = k.row_measures
    for v in f.second:
        dom[v] = k.n_cols
        measure[v] = k.col_measures
    return dom, measure


def _edge_factors(f: Bigraph, k: StepKernel, fixed: Mapping):
    """One factor per distinct edge, multiplicities folded into powers."""
    factors = []
    for (u, v), mult in f.edge_multiplicities().items():
        table = {}
        fu, fv = u in fixed, v in fixed
        if fu and fv:
            val = k.values[fixed[u]][fixed[v]] ** mult
            factors.append(((), {(): val}))
            continue
        if fu:
            scope = (v,)
            for j in range(k.n_cols):
                table[(j,)] = k.values[fixed[u]][j] ** mult
        elif fv:
            scope = (u,)
            for i in range(k.n_rows):
                table[(i,)] = k.values[i][fixed[v]] ** mult
        else:
            scope = tuple(sorted((u, v), key=_idkey))
            for i in range(k.n_rows):
                for j in range(k.n_cols):
                    key = (i, j) if scope == (u, v) else (j, i)
                    table[key] = k.values[i][j] ** mult
        factors.append((scope, table))
    return factors


def densities_engine(f: Bigraph, k: StepKernel, fixed: Mapping | None = None,
                     plan: ContractionPlan | None = None):
    """Core factor-elimination evaluation; ``fixed`` pins node -> block."""
    fixed = dict(fixed or {})
    dom, measure = _domains(f, k)
    for v, b in fixed.items():
        if v not in dom:
            raise DensityError(f"fixed node {v!r} is not in the graph")
        if not 0 <= b < dom[v]:
            raise DensityError(f"block {b} out of range for node {v!r}")
    one = Fraction(1) if k.mode == "rational" else 1.0
    factors = _edge_factors(f, k, fixed)
    if plan is None:
        plan = plan_contraction(f, frozenset(fixed), max(k.n_rows, k.n_cols))
    scalar = one
    for var in plan.order:
        if var in fixed:
            continue
        touching = [fac for fac in factors if var in fac[0]]
        factors = [fac for fac in factors if var not in fac[0]]
        if not touching:
            scalar *= sum(measure[var])
            continue
        scope = tuple(sorted({u for s, _ in touching for u in s if u != var}, key=_idkey))
        mvec = measure[var]
        table = {}
        for asg in itertools.product(*(range(dom[u]) for u in scope)):
            env = dict(zip(scope, asg))
            total = 0
            for x in range(dom[var]):
                env[var] = x
                prod = mvec[x]
                for s, tab in touching:
                    prod *= tab[tuple(env[u] for u in s)]
                total += prod
            table[asg] = total
        factors.append((scope, table))
    for s, tab in factors:
        if any(u not in fixed for u in s):
            raise DensityError("elimination left unfixed variables (bad plan)")
        scalar *= tab[tuple(fixed[u] for u in s)]
    return scalar


def density(f: Bigraph, k: StepKernel, plan: ContractionPlan | None = None):
    """t(F, K): exact Fraction in rational mode, float otherwise.

    First-class nodes range over row blocks, second-class over columns;
    apply :func:`homdens.bigraph.transpose` to swap orientations.
    Multiplicative over disjoint unions; the empty graph has density 1.
    """
    return densities_engine(f, k, None, plan)


def rooted_density(f: Bigraph, k: StepKernel, anchors: Mapping[int, int]):
    """Density with each labeled node pinned to a block of its side.

    ``anchors`` maps label index -> block index and must cover all labels.
    Anchored variables are conditioned on, not integrated: summing
    rooted densities against the block measures recovers the density of
    the unlabeled graph.
    """
    lab = f.label_map
    missing = set(lab) - set(anchors)
    if missing:
        raise DensityError(f"anchors missing for labels {sorted(missing)}")
    extra = set(anchors) - set(lab)
    if extra:
        raise DensityError(f"anchors given for unknown labels {sorted(extra)}")
    fixed = {lab[i]: anchors[i] for i in lab}
    return densities_engine(f, k, fixed)


def density_naive(f: Bigraph, k: StepKernel, fixed: Mapping | None = None):
    """Direct summation over all block assignments (the small-case oracle)."""
    fixed = dict(fixed or {})
    dom, measure = _domains(f, k)
    free = [v for v in f.nodes if v not in fixed]
    one = Fraction(1) if k.mode == "rational" else 1.0
    total = 0
    for asg in itertools.product(*(range(dom[v]) for v in free)):
        env = dict(fixed)
        env.update(zip(free, asg))
        prod = one
        for v in free:
            prod *= measure[v][env[v]]
        for u, v in f.edges:
            prod *= k.values[env[u]][env[v]]
        total += prod
    return total


def hom_count(f: Bigraph, g: PlainGraph) -> int:
    """Exact homomorphism count from a simple bigraph into a simple graph."""
    if not f.is_simple():
        raise DensityError("homomorphism counting implemented for simple graphs")
    t = density(f, kernel_from_graph(g))
    total = t * Fraction(g.n_nodes) ** f.n_nodes
    if total.denominator != 1:
        raise DensityError("internal error: non-integer homomorphism count")
    return int(total)


# -- spanning-subgraph expansion -------------------------------------------------

@dataclass(frozen=True)
class ExpansionTerm:
    key: tuple          # canonical class key (side-preserving)
    graph: Bigraph      # class representative, nodes renamed from F
    n_nodes: int
    n_edges: int
    multiplicity: int
    value: object       # t(term, U) for one representative


def expansion(f: Bigraph, u: StepKernel, cap: int = 20) -> tuple[ExpansionTerm, ...]:
    """Isomorphism-class ledger of the t(F, 1+U) spanning expansion.

    Groups the 2^m spanning subgraphs (isolated nodes removed) by
    side-preserving isomorphism, evaluates one representative per class,
    and returns terms sorted by (edges, nodes, key).  In rational mode
    the identity  sum(multiplicity * value) == t(F, 1+U)  is exact.
    """
    if f.n_edges > cap:
        raise DensityError(f"expansion cap exceeded: {f.n_edges} edges > {cap}")
    canon_cap = max(12, f.n_nodes)
    groups: dict[tuple, list] = {}
    for _, sub in spanning_terms(f, cap=cap):
        key = canonical_form(sub, side_preserving=True, cap=canon_cap)
        entry = groups.get(key)
        if entry is None:
            groups[key] = [sub, 1]
        else:
            entry[1] += 1
    terms = []
    for key, (rep, mult) in groups.items():
        val = density(rep, u)
        terms.append(ExpansionTerm(key, rep, rep.n_nodes, rep.n_edges, mult, val))
    terms.sort(key=lambda t: (t.n_edges, t.n_nodes, t.key))
    return tuple(terms)


def expansion_total(terms: Iterable[ExpansionTerm]):
    return sum(t.multiplicity * t.value for t in terms)


# -- edge-variable factor models ---------------------------------------------------

@dataclass(frozen=True)
class EdgeFactorModel:
    """Per-node factors over edge variables of a multigraph.

    ``edges`` lists the multigraph's edges as node pairs; variable j is
    edge j.  ``tables[v]`` maps block assignments of v's incident edge
    variables (in increasing edge-index order) to a value; each factor may
    depend only on its node's incident edges.  ``block_measures`` is the
    common distribution of every edge variable.
    """

    nodes: tuple
    edges: tuple
    block_measures: tuple
    tables: tuple  # tuple of (node, incident_edge_indices, table dict)
    mode: str = "float"

    def incident(self, v) -> tuple:
        return tuple(j for j, (a, b) in enumerate(self.edges) if a == v or b == v)


def edge_factor_model(nodes, edges, block_measures, tables, mode="float") -> EdgeFactorModel:
    nodes = tuple(nodes)
    edges = tuple(tuple(e) for e in edges)
    nset = set(nodes)
    for a, b in edges:
        if a not in nset or b not in nset or a == b:
            raise DensityError(f"bad edge ({a!r}, {b!r}) in factor model")
    bm = tuple(block_measures)
    packed = []
    for v in nodes:
        inc = tuple(j for j, (a, b) in enumerate(edges) if a == v or b == v)
        tab = dict(tables[v])
        want = len(bm) ** len(inc)
        if len(tab) != want:
            raise DensityError(f"factor for node {v!r} must have {want} entries, got {len(tab)}")
        packed.append((v, inc, tab))
    return EdgeFactorModel(nodes, edges, bm, tuple(packed), mode)


def edge_factor_value(model: EdgeFactorModel):
    """Integral over all edge variables of the product of node factors."""
    nblocks = len(model.block_measures)
    nvars = len(model.edges)
    if nvars * max(1, nblocks.bit_length()) > 64:
        raise DensityError("edge-factor model too large for exact evaluation")
    factors = [(inc, tab) for _, inc, tab in model.tables]
    order = sorted(range(nvars))
    scalar = Fraction(1) if model.mode == "rational" else 1.0
    mvec = model.block_measures
    for var in order:
        touching = [fac for fac in factors if var in fac[0]]
        factors = [fac for fac in factors if var not in fac[0]]
        if not touching:
            scalar *= sum(mvec)
            continue
        scope = tuple(sorted({u for s, _ in touching for u in s if u != var}))
        table = {}
        for asg in itertools.product(range(nblocks), repeat=len(scope)):
            env = dict(zip(scope, asg))
            total = 0
            for x in range(nblocks):
                env[var] = x
                prod = mvec[x]
                for s, tab in touching:
                    prod *= tab[tuple(env[u] for u in s)]
                total += prod
            table[asg] = total
        factors.append((scope, table))
    for s, tab in factors:
        if s:
            raise DensityError("internal error: unresolved edge variables")
        scalar *= tab[()]
    return scalar


def factor_l2_norm(model: EdgeFactorModel, node) -> float:
    """L2 norm of one node factor (other coordinates integrate to one)."""
    for v, inc, tab in model.tables:
        if v == node:
            total = 0.0
            for asg, val in tab.items():
                w = 1.0
                for x in asg:
                    w *= float(model.block_measures[x])
                total += w * float(val) ** 2
            return total ** 0.5
    raise DensityError(f"unknown node {node!r}")
