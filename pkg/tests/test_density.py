"""Density engine: oracle equivalence, identities, expansion, edge models."""

import itertools
import random
from fractions import Fraction

import pytest

from conftest import density_brute, hom_brute
from homdens import (
    DensityError,
    Bigraph,
    bigraph,
    complete_bipartite,
    complete_graph,
    constant_kernel,
    cycle_graph,
    density,
    density_naive,
    disjoint_union,
    edge_factor_model,
    edge_factor_value,
    expansion,
    expansion_total,
    factor_l2_norm,
    glue_product,
    hom_count,
    kernel_from_graph,
    affine,
    path_graph,
    plan_contraction,
    plain_graph,
    rooted_density,
    sample_kernel,
    square,
    star_product,
    step_kernel,
    subdivide,
    transpose,
    transpose_kernel,
    unlabel,
)
from homdens.harness import corner_kernel


def test_constant_kernel_densities():
    assert density(path_graph(2), constant_kernel(1)) == 1
    c = Fraction(2, 3)
    for f in (path_graph(4), cycle_graph(6), complete_bipartite(2, 3)):
        assert density(f, constant_kernel(c)) == c ** f.n_edges
    assert density(Bigraph((), (), ()), constant_kernel(c)) == 1


def test_small_hom_counts():
    assert hom_count(path_graph(2), complete_graph(3)) == 6
    assert hom_count(path_graph(3), complete_graph(3)) == 12
    assert hom_count(cycle_graph(4), complete_graph(2)) == 2


def test_engine_matches_naive_and_brute():
    rng = random.Random(0)
    kernels = [sample_kernel(b, seed=s, mode="rational") for b, s in ((1, 1), (2, 2), (3, 3))]
    graphs = [path_graph(4), cycle_graph(4), complete_bipartite(2, 3),
              cycle_graph(2), disjoint_union(path_graph(3), path_graph(2))]
    for f in graphs:
        for k in kernels:
            v = density(f, k)
            assert v == density_naive(f, k)
            assert v == density_brute(f, k)


def test_multiplicativity():
    u = sample_kernel(3, seed=5, mode="rational")
    f1, f2 = cycle_graph(4), path_graph(3)
    assert density(disjoint_union(f1, f2), u) == density(f1, u) * density(f2, u)


def test_subdivision_identity_exact():
    from homdens import compose

    u = sample_kernel(2, seed=9, mode="rational", symmetric=False)
    for f in (path_graph(4), cycle_graph(4), complete_bipartite(2, 3)):
        assert density(subdivide(f), u) == density(f, compose(u, transpose_kernel(u)))


def test_transpose_pairing():
    u = sample_kernel(3, seed=13, mode="rational", symmetric=False)
    for f in (path_graph(3), complete_bipartite(2, 3)):
        assert density(f, u) == density(transpose(f), transpose_kernel(u))


def test_rooted_density():
    c = constant_kernel(Fraction(3, 5))
    k2 = path_graph(2, labeled_ends=1)
    assert rooted_density(k2, c, {1: 0}) == Fraction(3, 5)

    u = sample_kernel(3, seed=21, mode="rational")
    # anchor marginalization
    f = cycle_graph(4, labeled=True)
    s = sum(u.row_measures[x] * rooted_density(f, u, {1: x}) for x in range(3))
    assert s == density(unlabel(f), u)
    # gluing identity through a shared root
    f1 = path_graph(3, labeled_ends=1)
    f2 = cycle_graph(4, labeled=True)
    lhs = sum(
        u.row_measures[x]
        * rooted_density(f1, u, {1: x})
        * rooted_density(f2, u, {1: x})
        for x in range(3)
    )
    assert lhs == density(star_product(f1, f2), u)


def test_rooted_cycle_nonnegative():
    f = cycle_graph(4, labeled=True)
    for seed in range(200):
        u = sample_kernel(1 + seed % 4, seed=seed, mode="float")
        for x in range(u.n_rows):
            assert rooted_density(f, u, {1: x}) >= -1e-12


def test_rooted_errors():
    f = cycle_graph(4, labeled=True)
    u = constant_kernel(1)
    with pytest.raises(DensityError):
        rooted_density(f, u, {})
    with pytest.raises(DensityError):
        rooted_density(f, u, {1: 0, 2: 0})


def test_plan_contraction_shapes():
    assert plan_contraction(path_graph(8)).width == 1
    assert plan_contraction(cycle_graph(8)).width == 2
    assert plan_contraction(complete_bipartite(3, 3)).width <= 3
    p = plan_contraction(path_graph(6), blocks=3)
    assert p.cost <= 6 * 9


def test_plan_independence():
    u = sample_kernel(3, seed=2, mode="rational")
    f = complete_bipartite(2, 3)
    base = density(f, u)
    from homdens import ContractionPlan

    nodes = list(f.nodes)
    rng = random.Random(4)
    for _ in range(5):
        rng.shuffle(nodes)
        plan = ContractionPlan(tuple(nodes), len(nodes) - 1, 0)
        assert density(f, u, plan=plan) == base


def test_cauchy_schwarz_gluing_and_positivity():
    pairs = [
        (path_graph(2, 1), path_graph(3, 1)),
        (path_graph(3, 2), path_graph(5, 2)),
        (cycle_graph(4, labeled=True), cycle_graph(4, labeled=True)),
    ]
    for seed in range(30):
        u = sample_kernel(1 + seed % 3, (-2, 2), seed=seed, mode="float")
        for f1, f2 in pairs:
            lhs = float(density(star_product(f1, f2), u)) ** 2
            rhs = float(density(square(f1), u)) * float(density(square(f2), u))
            assert lhs <= rhs + 1e-9
            assert float(density(square(f1), u)) >= -1e-12


def test_expansion_c4_ledger():
    u0 = sample_kernel(3, seed=6, mode="rational", mean_zero=True)
    terms = expansion(cycle_graph(4), u0)
    profile = {(t.n_nodes, t.n_edges): t.multiplicity for t in terms}
    assert profile == {(0, 0): 1, (2, 1): 4, (3, 2): 4, (4, 2): 2, (4, 3): 4, (4, 4): 1}
    by_shape = {(t.n_nodes, t.n_edges): t.value for t in terms}
    assert by_shape[(2, 1)] == 0 and by_shape[(4, 2)] == 0  # single-edge factors vanish
    assert expansion_total(terms) == density(cycle_graph(4), affine(u0, 1, 1))


def test_expansion_identity_independent_path():
    for seed in (3, 4):
        u = sample_kernel(2, seed=seed, mode="rational")
        f = path_graph(4)
        total = expansion_total(expansion(f, u))
        w = affine(u, 1, 1)
        assert total == density_brute(f, w)
    k2 = path_graph(2)
    u = sample_kernel(2, seed=8, mode="rational")
    terms = expansion(k2, u)
    assert [(t.n_edges, t.multiplicity) for t in terms] == [(0, 1), (1, 1)]
    assert terms[1].value == u.integral()


def test_corner_kernel_complete_bipartite_constant():
    # brute-force check that t(K_{a,b}) is constant (1/2) for the corner kernel
    u = corner_kernel()
    for a, b in ((1, 1), (1, 3), (2, 2), (2, 3), (3, 3)):
        f = complete_bipartite(a, b)
        v = density(f, u)
        assert v == density_brute(f, u)
        assert v == Fraction(1, 2)
        assert v > Fraction(1, 4)  # bounded away from zero


def test_edge_factor_models():
    # all-ones factors integrate to 1
    measures = (Fraction(1, 2), Fraction(1, 2))
    nodes = (0, 1)
    edges = ((0, 1),)
    ones = {v: {(0,): Fraction(1), (1,): Fraction(1)} for v in nodes}
    m = edge_factor_model(nodes, edges, measures, ones, mode="rational")
    assert edge_factor_value(m) == 1

    # single edge with equal factors: the value is the squared L2 norm
    g = {(0,): Fraction(1, 3), (1,): Fraction(-2, 3)}
    m2 = edge_factor_model(nodes, edges, measures, {0: g, 1: g}, mode="rational")
    val = edge_factor_value(m2)
    expected = Fraction(1, 2) * Fraction(1, 9) + Fraction(1, 2) * Fraction(4, 9)
    assert val == expected
    assert abs(float(val) - factor_l2_norm(m2, 0) ** 2) < 1e-12

    # triangle with random sign tables stays below the product of norms
    rng = random.Random(1)
    tri_edges = ((0, 1), (1, 2), (0, 2))
    for _ in range(50):
        tables = {}
        for v in (0, 1, 2):
            inc = tuple(j for j, (a, b) in enumerate(tri_edges) if v in (a, b))
            tables[v] = {asg: Fraction(rng.choice((-1, 1)))
                         for asg in itertools.product(range(2), repeat=len(inc))}
        m3 = edge_factor_model((0, 1, 2), tri_edges, measures, tables, mode="rational")
        bound = 1.0
        for v in (0, 1, 2):
            bound *= factor_l2_norm(m3, v)
        assert abs(float(edge_factor_value(m3))) <= bound + 1e-9


def test_hom_matches_brute_on_samples():
    rng = random.Random(17)
    for _ in range(10):
        n = rng.randint(2, 4)
        edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.6]
        g = plain_graph(range(n), edges)
        for f in (path_graph(3), cycle_graph(4), complete_bipartite(1, 2)):
            assert hom_count(f, g) == hom_brute(f, g)
