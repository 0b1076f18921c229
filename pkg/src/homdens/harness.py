"""Registry of density inequalities and the sampling harness that screens them.

Each entry pairs formal expressions in homomorphism densities (products of
t(F, .)^q with rational exponents, optionally summed with rational
coefficients) and is screened against seeded random kernels plus a fixed
bag of adversarial atoms (checkerboards, the rank-one sign kernel,
graph-derived kernels).  A reported violation is re-validated against the
naive density oracle before it is believed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .bigraph import (
    Bigraph,
    bigraph,
    bipartite_from_edges,
    complete_bipartite,
    cycle_graph,
    path_graph,
    plain_graph,
    square,
    star_product,
    subdivide,
    transpose,
)
from .density import density, density_naive, edge_factor_model, edge_factor_value, factor_l2_norm, rooted_density
from .kernels import (
    StepKernel,
    affine,
    cut_norm,
    kernel_from_graph,
    kernel_to_json,
    sample_kernel,
    step_kernel,
)

NEGATIVE_RADICAND_TOL = 1e-9


class HarnessError(ValueError):
    """Bad expression, entry, or sampler configuration."""


# -- formal density expressions ---------------------------------------------------

@dataclass(frozen=True)
class ExprFactor:
    graph: Bigraph
    power: Fraction = Fraction(1)
    absolute: bool = False


@dataclass(frozen=True)
class ExprTerm:
    coeff: Fraction
    factors: tuple


@dataclass(frozen=True)
class DensityExpr:
    terms: tuple

    def graphs(self):
        return [f.graph for t in self.terms for f in t.factors]


def dfactor(graph: Bigraph, power=1, absolute: bool = False) -> ExprFactor:
    return ExprFactor(graph, Fraction(power), absolute)


def dprod(*factors, coeff=1) -> DensityExpr:
    """Product expression; factors are ExprFactors or bare graphs."""
    fs = tuple(f if isinstance(f, ExprFactor) else dfactor(f) for f in factors)
    return DensityExpr((ExprTerm(Fraction(coeff), fs),))


def dsum(*exprs) -> DensityExpr:
    terms = tuple(t for e in exprs for t in e.terms)
    return DensityExpr(terms)


def zero_expr() -> DensityExpr:
    return DensityExpr(())


def expression_degree(expr: DensityExpr):
    """Common total degree in the kernel, or None if terms disagree."""
    degs = {sum((Fraction(f.graph.n_edges) * f.power for f in t.factors), Fraction(0))
            for t in expr.terms}
    if len(degs) == 1:
        return degs.pop()
    return None


class _DensityCache:
    def __init__(self, kernel: StepKernel, density_fn: Callable):
        self.kernel = kernel
        self.density_fn = density_fn
        self._cache: dict = {}

    def __call__(self, graph: Bigraph):
        val = self._cache.get(graph)
        if val is None:
            val = self.density_fn(graph, self.kernel)
            self._cache[graph] = val
        return val


def evaluate(expr: DensityExpr, u: StepKernel, density_fn: Callable = density):
    """Evaluate a density expression; exact when all exponents are integers.

    Fractional powers require a nonnegative base (asserted at runtime, with
    a small float tolerance) unless the factor carries an absolute value.
    """
    cache = density_fn if isinstance(density_fn, _DensityCache) else _DensityCache(u, density_fn)
    total = Fraction(0)
    for term in expr.terms:
        val = term.coeff
        for f in term.factors:
            t = cache(f.graph)
            if f.absolute:
                t = abs(t)
            if f.power.denominator == 1:
                val = val * t ** int(f.power)
                continue
            tf = float(t)
            if tf < 0:
                if tf < -NEGATIVE_RADICAND_TOL:
                    raise HarnessError(
                        f"negative base {tf} for fractional power {f.power}")
                tf = 0.0
            val = val * tf ** float(f.power)
        total = total + val
    return total


# -- inequality entries --------------------------------------------------------------

@dataclass
class InequalityEntry:
    """One testable inequality: every check asserts lhs <= rhs.

    ``margin_fn``, when set, replaces expression evaluation; it receives
    (kernel, rng, density_fn) and returns (label, lhs, rhs) triples.
    ``symmetric_only`` restricts sampling to symmetric kernels (for
    inequalities stated for symmetric kernels only).
    """

    entry_id: str
    citation: str
    status: str = "paper"  # paper | corrected | erratum-suspect
    domain: str = "w1"     # w1: values in [-1,1]; w: bounded, sampled in [-3,3]
    checks: tuple = ()     # (label, lhs_expr, rhs_expr)
    margin_fn: Callable | None = None
    symmetric_only: bool = False

    def __post_init__(self):
        if not self.citation:
            raise HarnessError("entry citation must be nonempty")
        if self.status not in ("paper", "corrected", "erratum-suspect"):
            raise HarnessError(f"unknown status {self.status!r}")

    def margins(self, u: StepKernel, rng: random.Random | None = None,
                density_fn: Callable = density):
        if self.margin_fn is not None:
            return list(self.margin_fn(u, rng or random.Random(0), density_fn))
        cache = _DensityCache(u, density_fn)
        out = []
        for label, lhs, rhs in self.checks:
            out.append((label, evaluate(lhs, u, cache), evaluate(rhs, u, cache)))
        return out


@dataclass
class EntryReport:
    entry_id: str
    citation: str
    status: str
    trials: int
    n_checks: int
    worst_margin: float
    worst_margin_exact: str | None
    worst_label: str
    passed: bool
    witness: dict | None

    def to_json(self) -> dict:
        return {
            "entry": self.entry_id,
            "citation": self.citation,
            "status": self.status,
            "trials": self.trials,
            "checks": self.n_checks,
            "worst_margin": self.worst_margin,
            "worst_margin_exact": self.worst_margin_exact,
            "worst_label": self.worst_label,
            "passed": self.passed,
            "witness": self.witness,
        }


# -- kernel sampling ---------------------------------------------------------------

def rank_one_sign_kernel() -> StepKernel:
    """Two equal blocks, +1 on the diagonal blocks, -1 off; rank one."""
    return step_kernel([[1, -1], [-1, 1]], mode="rational")


def corner_kernel() -> StepKernel:
    """-1 on the top-right quarter square, +1 elsewhere."""
    return step_kernel([[1, 1], [1, -1]], mode="rational")


def checkerboard_kernel(blocks: int) -> StepKernel:
    vals = [[1 if (i + j) % 2 == 0 else -1 for j in range(blocks)] for i in range(blocks)]
    return step_kernel(vals, mode="rational")


def graph_deviation_kernel(n: int, seed: int) -> StepKernel:
    """U = W_G - p for a random graph G: rational, mean zero, values in [-1,1]."""
    rng = random.Random(seed)
    nodes = list(range(n))
    edges = [(i, j) for i in nodes for j in nodes[i + 1:] if rng.random() < 0.5]
    if not edges:
        edges = [(0, 1)]
    g = plain_graph(nodes, edges)
    w = kernel_from_graph(g)
    p = Fraction(2 * len(edges), n * n)  # mean of W_G including the zero diagonal
    return affine(w, 1, -p)


class KernelSampler:
    """Deterministic stream of test kernels for one inequality domain."""

    def __init__(self, domain: str = "w1", seed: int = 0, symmetric_only: bool = False):
        if domain not in ("w1", "w"):
            raise HarnessError(f"unknown domain {domain!r}")
        self.domain = domain
        self.seed = seed
        self.symmetric_only = symmetric_only

    def kernel(self, trial: int) -> StepKernel:
        seed = self.seed * 1_000_003 + trial
        blocks = 1 + trial % 6
        hi = 1 if self.domain == "w1" else 3
        style = trial % 8
        if not self.symmetric_only and style == 6:
            return sample_kernel(blocks, (-hi, hi), symmetric=False, seed=seed)
        if style == 7:
            atoms = [rank_one_sign_kernel(), corner_kernel(), checkerboard_kernel(2 + trial % 3)]
            if self.domain == "w1":
                atoms.append(graph_deviation_kernel(4 + trial % 3, seed))
            return atoms[(trial // 8) % len(atoms)]
        if style == 2:
            return sample_kernel(blocks, (-hi, hi), symmetric=True, seed=seed, mean_zero=True)
        return sample_kernel(blocks, (-hi, hi), symmetric=True, seed=seed)


def check_entry(entry: InequalityEntry, trials: int, tol: float = 1e-9,
                seed: int = 0, sampler: KernelSampler | None = None) -> EntryReport:
    """Screen one entry; any violation is re-validated on the naive oracle."""
    if trials < 1:
        raise HarnessError("need at least one trial")
    if sampler is None:
        sampler = KernelSampler(entry.domain, seed, entry.symmetric_only)
    worst = None  # (margin_float, margin_exact_or_None, label, kernel)
    n_checks = 0
    for trial in range(trials):
        u = sampler.kernel(trial)
        rng = random.Random(seed * 1_000_003 + trial)
        for label, lhs, rhs in entry.margins(u, rng):
            n_checks += 1
            margin = rhs - lhs
            mf = float(margin)
            if worst is None or mf < worst[0]:
                exact = margin if isinstance(margin, Fraction) else None
                worst = (mf, exact, label, u)
    assert worst is not None
    mf, exact, label, u = worst
    passed = mf >= -tol
    witness = None
    if not passed:
        # no false alarms: the violating kernel is re-checked on the naive engine
        rng = random.Random(seed)
        revalidated = entry.margins(u, rng, density_fn=density_naive)
        if all(float(r - l) >= -tol for _, l, r in revalidated):
            passed = True
            mf = min(float(r - l) for _, l, r in revalidated)
            exact = None
        else:
            witness = kernel_to_json(u)
    return EntryReport(
        entry_id=entry.entry_id,
        citation=entry.citation,
        status=entry.status,
        trials=trials,
        n_checks=n_checks,
        worst_margin=mf,
        worst_margin_exact=(f"{exact.numerator}/{exact.denominator}" if exact is not None else None),
        worst_label=label,
        passed=passed,
        witness=witness,
    )


# -- the builtin registry --------------------------------------------------------------

def _cyc(n: int) -> Bigraph:
    return cycle_graph(n)


def _path(n: int) -> Bigraph:
    return path_graph(n)


def theta_graph(npaths: int, length: int) -> Bigraph:
    """Two hubs joined by ``npaths`` openly disjoint paths of equal length."""
    edges = []
    for p in range(npaths):
        prev = "u"
        for i in range(1, length):
            cur = f"p{p}_{i}"
            edges.append((prev, cur))
            prev = cur
        edges.append((prev, "w"))
    return bipartite_from_edges(edges, anchor="u")


def cube_graph() -> Bigraph:
    edges = []
    for v in range(8):
        for bit in (1, 2, 4):
            w = v ^ bit
            if v < w:
                edges.append((v, w))
    return bipartite_from_edges(edges, anchor=0)


def two_cycles_shared_node(girth: int = 4) -> Bigraph:
    """Two cycles of the given even length sharing exactly one node."""
    edges = []
    for tag in ("x", "y"):
        prev = "s"
        for i in range(1, girth):
            cur = f"{tag}{i}"
            edges.append((prev, cur))
            prev = cur
        edges.append((prev, "s"))
    return bipartite_from_edges(edges, anchor="s")


def spider_graph(*legs: int) -> Bigraph:
    """Star with subdivided legs: leg lengths measured in edges."""
    edges = []
    for li, length in enumerate(legs):
        prev = "c"
        for i in range(1, length + 1):
            cur = f"l{li}_{i}"
            edges.append((prev, cur))
            prev = cur
    return bipartite_from_edges(edges, anchor="c")


def pendant_cycle(girth: int) -> Bigraph:
    """Even cycle with one pendant edge (exactly one degree-1 node)."""
    edges = []
    prev = "s"
    for i in range(1, girth):
        cur = f"c{i}"
        edges.append((prev, cur))
        prev = cur
    edges.append((prev, "s"))
    edges.append(("s", "pend"))
    return bipartite_from_edges(edges, anchor="s")


def _p3_center_second() -> Bigraph:
    return path_graph(3)  # nodes 0(first) 1(second) 2(first); center is second-class


def _p3_center_first() -> Bigraph:
    return transpose(path_graph(3))


def _k2d_at(side: str, d: int) -> Bigraph:
    """K_{2,d} with the 2-class on the given side."""
    g = complete_bipartite(2, d)
    return g if side == "first" else transpose(g)


def _indep_bound_expr(f: Bigraph, nodes: Sequence) -> DensityExpr:
    """Right side of the independent-nodes bound: product of K_{2,d_i}."""
    deg = f.degrees()
    nset = set(nodes)
    adj = f.adjacency()
    for v in nodes:
        if set(adj[v]) & nset:
            raise HarnessError("chosen nodes are not independent")
    for w in f.nodes:
        if w not in nset and len(set(adj[w]) & nset) > 2:
            raise HarnessError("some node is adjacent to more than two chosen nodes")
    factors = [dfactor(_k2d_at(f.side(v), deg[v])) for v in nodes]
    return dprod(*factors)


def _entry_mon() -> InequalityEntry:
    checks = []
    for small, big in ((4, 2), (6, 4), (8, 6)):
        checks.append((f"C{small}<=C{big}", dprod(_cyc(small)), dprod(_cyc(big))))
    checks.append(("0<=C8", zero_expr(), dprod(_cyc(8))))
    for a, b in ((1, 1), (1, 3), (2, 2), (2, 4), (3, 3), (4, 4), (3, 1), (4, 2)):
        if (a + b) % 2 != 0:
            continue
        checks.append((
            f"logconvex a={a} b={b}",
            dprod(dfactor(_cyc(a + b), 2)),
            dprod(_cyc(2 * a), _cyc(2 * b)),
        ))
    return InequalityEntry(
        "mon",
        "even-cycle densities are nonnegative, monotone decreasing, log-convex",
        checks=tuple(checks),
    )


def _entry_gcs() -> InequalityEntry:
    cases = [(1, 3), (2, 2), (1, 1, 2), (2, 2, 2), (1, 2, 3)]
    checks = []
    for rs in cases:
        r = sum(rs)
        if r % 2 != 0:
            continue
        checks.append((
            "Cr^2<=prod r_i=" + ",".join(map(str, rs)),
            dprod(dfactor(_cyc(r), 2)),
            dprod(*(dfactor(_cyc(2 * ri)) for ri in rs)),
        ))
    return InequalityEntry(
        "gcs",
        "iterated Cauchy-Schwarz split of a cycle into arcs",
        domain="w",
        checks=tuple(checks),
    )


def _entry_cycle0() -> InequalityEntry:
    checks = []
    for k in (1, 2, 3):
        checks.append((
            f"C{2 * k + 2}<=C{2 * k}*C4^(1/2)",
            dprod(_cyc(2 * k + 2)),
            dprod(_cyc(2 * k), dfactor(_cyc(4), Fraction(1, 2))),
        ))
    return InequalityEntry(
        "cycle0",
        "cycle growth step: each two extra edges cost at most a root of C4",
        checks=tuple(checks),
    )


def _entry_cycle_pack() -> InequalityEntry:
    # (lengths, r, k) with sum(r_i - 1) == k (r - 1) and r_i <= r
    cases = [((2, 2), 3, 1), ((2, 2, 3), 3, 2), ((3, 3, 2, 2), 3, 3), ((2, 2, 2), 4, 1)]
    checks = []
    for rs, r, k in cases:
        assert sum(ri - 1 for ri in rs) == k * (r - 1) and all(ri <= r for ri in rs)
        checks.append((
            f"prod C_(2r_i) r_i={rs} <= C{2 * r}^{k}",
            dprod(*(dfactor(_cyc(2 * ri)) for ri in rs)),
            dprod(dfactor(_cyc(2 * r), k)),
        ))
    return InequalityEntry(
        "cycle_pack",
        "repacking cycles of equal total value into equal long cycles",
        checks=tuple(checks),
    )


def _entry_four_cycle() -> InequalityEntry:
    checks = []
    for k in (2, 3, 4):
        checks.append((f"C4^{k - 1}<=C{2 * k}",
                       dprod(dfactor(_cyc(4), k - 1)), dprod(_cyc(2 * k))))
        checks.append((f"C{2 * k}<=C4^({k}/2)",
                       dprod(_cyc(2 * k)), dprod(dfactor(_cyc(4), Fraction(k, 2)))))
    return InequalityEntry(
        "four_cycle",
        "two-sided comparison of long even cycles against powers of C4",
        checks=tuple(checks),
    )


def _entry_paths_split() -> InequalityEntry:
    checks = []
    for a, b in ((1, 1), (1, 2), (2, 2), (1, 3)):
        f1 = path_graph(2 * a + 1)
        f2 = path_graph(2 * b + 1)
        if a % 2 != b % 2:
            f2 = transpose(f2)  # align the glue point's side with the split node
        checks.append((
            f"P{a + b + 1}<=P{2 * a + 1}^(1/2)P{2 * b + 1}^(1/2)",
            dprod(_path(a + b + 1)),
            dprod(dfactor(f1, Fraction(1, 2)), dfactor(f2, Fraction(1, 2))),
        ))
    return InequalityEntry(
        "paths_split",
        "path split at an interior node via Cauchy-Schwarz",
        domain="w",
        checks=tuple(checks),
    )


def _entry_paths_cycle() -> InequalityEntry:
    # The split-and-cut derivation centers one odd-path factor on the split
    # node (parity a) and the other on a node at distance b from it, so for
    # odd b the factors carry the two opposite orientations.
    checks = []
    for a, b in ((1, 1), (1, 2), (2, 1)):
        p_split = _path(2 * a + 1)
        p_cut = p_split if b % 2 == 0 else transpose(p_split)
        checks.append((
            f"P{2 * a + b + 1}<=P{2 * a + 1}*C{4 * b}^(1/4) (a={a},b={b})",
            dprod(_path(2 * a + b + 1)),
            dprod(dfactor(p_split, Fraction(1, 2)), dfactor(p_cut, Fraction(1, 2)),
                  dfactor(_cyc(4 * b), Fraction(1, 4))),
        ))
    return InequalityEntry(
        "paths_cycle",
        "odd path against a shorter odd path and a quarter power of a cycle",
        domain="w",
        checks=tuple(checks),
    )


def _entry_mon2() -> InequalityEntry:
    checks = []
    for h in (1, 2, 3):
        for small, big in ((4, 2), (6, 4)):
            checks.append((f"K{h},{small}<=K{h},{big}",
                           dprod(complete_bipartite(h, small)),
                           dprod(complete_bipartite(h, big))))
        checks.append((f"0<=K{h},6", zero_expr(), dprod(complete_bipartite(h, 6))))
        for a, b in ((1, 2), (1, 3), (2, 3)):
            checks.append((
                f"K{h},{a + b}^2<=K{h},{2 * a}*K{h},{2 * b}",
                dprod(dfactor(complete_bipartite(h, a + b), 2)),
                dprod(complete_bipartite(h, 2 * a), complete_bipartite(h, 2 * b)),
            ))
    return InequalityEntry(
        "mon2",
        "complete-bipartite densities with fixed small class: sign, decay,"
        " and the squared split step",
        checks=tuple(checks),
    )


def _entry_knn() -> InequalityEntry:
    checks = []
    for n in (3, 4):
        checks.append((
            f"K{n},{n}<=K2,{n}*C2^(1/2)",
            dprod(complete_bipartite(n, n)),
            dprod(complete_bipartite(2, n), dfactor(_cyc(2), Fraction(1, 2))),
        ))
    return InequalityEntry(
        "knn",
        "balanced complete bipartite graph against an edge-deleted relaxation",
        checks=tuple(checks),
        symmetric_only=True,
    )


def _c4fix_margins(u: StepKernel, rng: random.Random, density_fn: Callable):
    out = []
    for r in (2, 3):
        for g, side in ((cycle_graph(2 * r, labeled=True), "first"),
                        (transpose(cycle_graph(2 * r, labeled=True)), "second")):
            nblocks = u.n_rows if side == "first" else u.n_cols
            bound = evaluate(dprod(dfactor(_cyc(4 * r - 4), Fraction(1, 2))), u,
                             _DensityCache(u, density_fn))
            for x in range(nblocks):
                val = rooted_density(g, u, {1: x}) if density_fn is density else \
                    density_naive(g, u, {g.label_map[1]: x})
                out.append((f"0<=t_x(C{2 * r}') r={r} {side} x={x}", 0, val))
                out.append((f"t_x(C{2 * r}')<=C{4 * r - 4}^(1/2) r={r} {side} x={x}", val, bound))
    return out


def _entry_c4fix() -> InequalityEntry:
    return InequalityEntry(
        "c4fix",
        "rooted even-cycle density: nonnegative and cut down to a shorter cycle",
        margin_fn=_c4fix_margins,
    )


def _p3fix_margins(u: StepKernel, rng: random.Random, density_fn: Callable):
    out = []
    for k in (4, 5):
        g = path_graph(k, labeled_ends=2)
        lab = g.label_map
        n1 = u.n_rows if g.side(lab[1]) == "first" else u.n_cols
        n2 = u.n_rows if g.side(lab[2]) == "first" else u.n_cols
        bound = evaluate(dprod(dfactor(_cyc(4 * k - 12), Fraction(1, 4))), u,
                         _DensityCache(u, density_fn))
        for x in range(n1):
            for y in range(n2):
                if density_fn is density:
                    val = rooted_density(g, u, {1: x, 2: y})
                else:
                    val = density_naive(g, u, {lab[1]: x, lab[2]: y})
                out.append((f"|t_xy(P{k}'')|<=C{4 * k - 12}^(1/4) x={x} y={y}", abs(val), bound))
    return out


def _entry_p3fix() -> InequalityEntry:
    return InequalityEntry(
        "p3fix",
        "doubly rooted path density bounded by a quarter power of a cycle",
        margin_fn=_p3fix_margins,
    )


def _entry_gluing_cs() -> InequalityEntry:
    pairs = [
        ("P'2,P'3", path_graph(2, labeled_ends=1), path_graph(3, labeled_ends=1)),
        ("P'3,P'3", path_graph(3, labeled_ends=1), path_graph(3, labeled_ends=1)),
        ("P''3,P''5", path_graph(3, labeled_ends=2), path_graph(5, labeled_ends=2)),
        ("P'2,C'4", path_graph(2, labeled_ends=1), cycle_graph(4, labeled=True)),
        ("K'13,P'3", transpose(complete_bipartite(1, 3, labeled=True)),
         transpose(path_graph(3, labeled_ends=1))),
    ]
    checks = []
    for name, f1, f2 in pairs:
        prod = star_product(f1, f2)
        checks.append((
            f"(F1*F2)^2<=F1^2*F2^2 {name}",
            dprod(dfactor(prod, 2)),
            dprod(square(f1), square(f2)),
        ))
    return InequalityEntry(
        "gluing_cs",
        "Cauchy-Schwarz for the gluing product of labeled graphs",
        domain="w",
        checks=tuple(checks),
    )


def _entry_square_pos() -> InequalityEntry:
    samples = [
        ("P'2", path_graph(2, labeled_ends=1)),
        ("P'3", path_graph(3, labeled_ends=1)),
        ("P''3", path_graph(3, labeled_ends=2)),
        ("C'4", cycle_graph(4, labeled=True)),
        ("K'23", complete_bipartite(2, 3, labeled=True)),
    ]
    checks = [(f"0<={name}^2", zero_expr(), dprod(square(g))) for name, g in samples]
    return InequalityEntry(
        "square_pos",
        "squares under the gluing product have nonnegative density",
        domain="w",
        checks=tuple(checks),
    )


def _entry_indep1() -> InequalityEntry:
    samples = [
        ("P5", path_graph(5)),
        ("C6", _cyc(6)),
        ("C8", _cyc(8)),
        ("K23", complete_bipartite(2, 3)),
        ("theta333", theta_graph(3, 3)),
    ]
    checks = [(f"{name}<=C4", dprod(g), dprod(_cyc(4))) for name, g in samples]
    return InequalityEntry(
        "indep1",
        "two nonadjacent degree-2 nodes force domination by C4",
        checks=tuple(checks),
    )


def _entry_indep_product() -> InequalityEntry:
    checks = []
    c6 = _cyc(6)
    checks.append((
        "C6^2<=K22^3",
        dprod(dfactor(c6, 2)),
        _indep_bound_expr(c6, [0, 2, 4]),
    ))
    p5 = path_graph(5)
    checks.append((
        "P5^2<=K21*K22*K21",
        dprod(dfactor(p5, 2)),
        _indep_bound_expr(p5, [0, 2, 4]),
    ))
    checks.append((
        "C6^2<=C4^3",
        dprod(dfactor(c6, 2)),
        dprod(dfactor(_cyc(4), 3)),
    ))
    return InequalityEntry(
        "indep_product",
        "independent nodes split a squared graph into complete bipartite factors",
        checks=tuple(checks),
    )


def _entry_hanging() -> InequalityEntry:
    from .structure import find_hanging_path_system

    samples = [("P4", path_graph(4), 3), ("C6", _cyc(6), 3), ("theta333", theta_graph(3, 3), 3)]
    checks = []
    for name, g, max_len in samples:
        hps = find_hanging_path_system(g, max_len, allow_closed=False)
        factors = [dfactor(_cyc(2 * length)) for length in hps.lengths]
        checks.append((
            f"{name}^2<=prod C_2r_i lengths={hps.lengths}",
            dprod(dfactor(g, 2)),
            dprod(*factors),
        ))
    return InequalityEntry(
        "hanging",
        "squared graph against doubled cycles of a hanging path system",
        checks=tuple(checks),
    )


def _entry_hang_bound() -> InequalityEntry:
    from .structure import find_hanging_path_system

    samples = [("C6", _cyc(6), 2), ("C8", _cyc(8), 3), ("fig8", two_cycles_shared_node(4), 2)]
    checks = []
    for name, g, r in samples:
        hps = find_hanging_path_system(g, r, allow_closed=False)
        a = hps.value - (2 * r - 2)
        if a < 0:
            raise HarnessError(f"sample {name} has no system of value 2r-2 at r={r}")
        checks.append((
            f"{name}<=C{2 * r}*C4^({a}/2)",
            dprod(g),
            dprod(_cyc(2 * r), dfactor(_cyc(4), Fraction(a, 2))),
        ))
    return InequalityEntry(
        "hang_bound",
        "hanging path system of value 2r+a-2 dominates by C_2r times C4^(a/2)",
        checks=tuple(checks),
    )


def _entry_erase() -> InequalityEntry:
    checks = []
    c6l = cycle_graph(6, labeled=True)
    checks.append((
        "C6<=((C6')^2)^(1/2)",
        dprod(_cyc(6)),
        dprod(dfactor(square(c6l), Fraction(1, 2))),
    ))
    # 4-path with its middle edge erased and the two middle nodes labeled
    f0 = bigraph([0, 2], [1, 3], [(0, 1), (2, 3)], {1: 1, 2: 2})
    checks.append((
        "P4<=(F0^2)^(1/2)",
        dprod(path_graph(4)),
        dprod(dfactor(square(f0), Fraction(1, 2))),
    ))
    return InequalityEntry(
        "erase",
        "erasing the edges inside a labeled set costs at most a square root",
        checks=tuple(checks),
    )


def _entry_main() -> tuple:
    def mk(eid, name, g, r):
        return InequalityEntry(
            eid,
            "min-degree-2 graph of girth 2r that is neither a cycle nor"
            " complete bipartite is dominated by C_2r * C4^(1/4)",
            checks=(
                (f"{name}<=C{2 * r}*C4^(1/4)", dprod(g),
                 dprod(_cyc(2 * r), dfactor(_cyc(4), Fraction(1, 4)))),
            ),
        )

    return (
        mk("main_theta", "theta333", theta_graph(3, 3), 3),
        mk("main_subdiv_k33", "sbdK33", subdivide(complete_bipartite(3, 3)), 4),
        mk("main_cube", "cube", cube_graph(), 2),
        mk("main_two_c4", "fig8", two_cycles_shared_node(4), 2),
    )


def _entry_two_end() -> InequalityEntry:
    checks = []
    # orientations of the 3-node path derived from the actual decompositions;
    # the 4-path case mixes both orientations evenly
    checks.append(("P4<=P3*C4^(1/4)",
                   dprod(path_graph(4)),
                   dprod(dfactor(_p3_center_second(), Fraction(1, 2)),
                         dfactor(_p3_center_first(), Fraction(1, 2)),
                         dfactor(_cyc(4), Fraction(1, 4)))))
    checks.append(("P5<=P3*C4^(1/4)",
                   dprod(path_graph(5)),
                   dprod(_p3_center_second(), dfactor(_cyc(4), Fraction(1, 4)))))
    spider = spider_graph(1, 1, 2)
    checks.append(("spider112<=P3*C4^(1/4)",
                   dprod(spider),
                   dprod(_p3_center_first(), dfactor(_cyc(4), Fraction(1, 4)))))
    return InequalityEntry(
        "two_end",
        "two nonadjacent endpoints: dominated by the 2-star and a quarter"
        " power of C4",
        checks=tuple(checks),
    )


def _entry_one_end() -> InequalityEntry:
    checks = []
    for girth in (4, 6):
        g = pendant_cycle(girth)
        # the pendant hangs off a first-class node, so the 2-star is rooted there
        half = Fraction(1, 2)
        rhs = dsum(
            dprod(dfactor(_cyc(girth)), dfactor(_cyc(4), Fraction(1, 8)), coeff=half),
            dprod(dfactor(_p3_center_first()), dfactor(_cyc(4), Fraction(1, 8)), coeff=half),
        )
        checks.append((f"pendant_C{girth}<=(C{girth}+P3)/2*C4^(1/8)", dprod(g), rhs))
    return InequalityEntry(
        "one_end",
        "exactly one endpoint: averaged cycle and 2-star bound with C4^(1/8)",
        checks=tuple(checks),
    )


def _edge_weight_margins(u: StepKernel, rng: random.Random, density_fn: Callable):
    # triangle multigraph, +-1 tables over two blocks; kernel input unused
    blocks = 2
    measures = (Fraction(1, 2), Fraction(1, 2))
    nodes = (0, 1, 2)
    edges = ((0, 1), (1, 2), (0, 2))
    tables = {}
    for v in nodes:
        inc = tuple(j for j, (a, b) in enumerate(edges) if v in (a, b))
        tab = {}
        for asg in itertools.product(range(blocks), repeat=len(inc)):
            tab[asg] = Fraction(rng.choice((-1, 1)))
        tables[v] = tab
    model = edge_factor_model(nodes, edges, measures, tables, mode="rational")
    tr = edge_factor_value(model)
    bound = 1.0
    for v in nodes:
        bound *= factor_l2_norm(model, v)
    return [("(|tr(G,f)|<=prod||f_i||_2)", abs(float(tr)), bound)]


def _entry_edge_weight() -> InequalityEntry:
    return InequalityEntry(
        "edge_weight",
        "statistical-physics edge model bounded by the product of factor norms",
        domain="w",
        margin_fn=_edge_weight_margins,
    )


def _entry_triv_abs() -> InequalityEntry:
    pairs = [("P5", path_graph(5)), ("K23", complete_bipartite(2, 3)), ("C8", _cyc(8))]
    checks = [(f"|{name}|<=C4", dprod(dfactor(g, 1, absolute=True)), dprod(_cyc(4)))
              for name, g in pairs]
    return InequalityEntry(
        "triv_abs",
        "domination in the signed order controls the absolute density",
        checks=tuple(checks),
    )


def _entry_subdiv_transfer() -> InequalityEntry:
    base = [
        ("P5<=C4", dprod(path_graph(5)), dprod(_cyc(4))),
        ("K23<=C4", dprod(complete_bipartite(2, 3)), dprod(_cyc(4))),
        ("theta<=C6*C4^(1/4)", dprod(theta_graph(3, 3)),
         dprod(_cyc(6), dfactor(_cyc(4), Fraction(1, 4)))),
    ]

    def sub_expr(expr: DensityExpr) -> DensityExpr:
        terms = []
        for t in expr.terms:
            terms.append(ExprTerm(t.coeff, tuple(
                ExprFactor(subdivide(f.graph), f.power, f.absolute) for f in t.factors)))
        return DensityExpr(tuple(terms))

    checks = [(f"subdivided {name}", sub_expr(lhs), sub_expr(rhs)) for name, lhs, rhs in base]
    return InequalityEntry(
        "subdiv_transfer",
        "subdividing every edge preserves domination",
        checks=tuple(checks),
    )


def _cut_margin_factory(form: str):
    def margins(u: StepKernel, rng: random.Random, density_fn: Callable):
        cn = cut_norm(u).value
        t4 = density_fn(_cyc(4), u)
        if form == "lower":
            return [("cut^4<=C4", cn ** 4, t4)]
        if form == "upper4":
            return [("C4<=4cut", t4, 4 * cn)]
        return [("C4<=cut", t4, cn)]

    return margins


def _entry_cut_sandwich() -> tuple:
    lower = InequalityEntry(
        "cut_sandwich_lower",
        "fourth power of the cut norm below the 4-cycle density",
        margin_fn=_cut_margin_factory("lower"),
    )
    upper = InequalityEntry(
        "cut_sandwich_upper",
        "4-cycle density at most four times the cut norm",
        status="corrected",
        margin_fn=_cut_margin_factory("upper4"),
    )
    literal = InequalityEntry(
        "cut_sandwich_upper_literal",
        "4-cycle density at most the cut norm (known to fail; the rank-one"
        " sign kernel gives margin -3/4)",
        status="erratum-suspect",
        margin_fn=_cut_margin_factory("literal"),
    )
    return lower, upper, literal


def builtin_registry() -> list[InequalityEntry]:
    entries = [
        _entry_mon(),
        _entry_gcs(),
        _entry_cycle0(),
        _entry_cycle_pack(),
        _entry_four_cycle(),
        _entry_paths_split(),
        _entry_paths_cycle(),
        _entry_mon2(),
        _entry_knn(),
        _entry_c4fix(),
        _entry_p3fix(),
        _entry_gluing_cs(),
        _entry_square_pos(),
        _entry_subdiv_transfer(),
        _entry_indep1(),
        _entry_indep_product(),
        _entry_hanging(),
        _entry_hang_bound(),
        _entry_erase(),
        *_entry_main(),
        _entry_two_end(),
        _entry_one_end(),
        _entry_edge_weight(),
        _entry_triv_abs(),
        *_entry_cut_sandwich(),
    ]
    ids = [e.entry_id for e in entries]
    if len(set(ids)) != len(ids):
        raise HarnessError("duplicate entry ids in the registry")
    return entries


def get_entry(entry_id: str) -> InequalityEntry:
    for e in builtin_registry():
        if e.entry_id == entry_id:
            return e
    raise HarnessError(f"no registry entry named {entry_id!r}")


def run_registry(trials: int = 100, tol: float = 1e-9, seed: int = 0,
                 only: Iterable[str] | None = None) -> dict:
    """Check every entry; returns a JSON-ready report."""
    entries = builtin_registry()
    if only is not None:
        wanted = set(only)
        entries = [e for e in entries if e.entry_id in wanted]
        missing = wanted - {e.entry_id for e in entries}
        if missing:
            raise HarnessError(f"unknown entries: {sorted(missing)}")
    reports = [check_entry(e, trials, tol=tol, seed=seed) for e in entries]
    paper_fail = [r.entry_id for r in reports if r.status == "paper" and not r.passed]
    return {
        "trials": trials,
        "tol": tol,
        "seed": seed,
        "entries": [r.to_json() for r in reports],
        "paper_entries": sum(1 for r in reports if r.status == "paper"),
        "paper_failures": paper_fail,
        "all_paper_passed": not paper_fail,
    }
