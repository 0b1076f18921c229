"""Step-kernel algebra, norms, averaging, and sampling."""

from fractions import Fraction

import pytest

from conftest import density_brute
from homdens import (
    KernelError,
    affine,
    complete_graph,
    compose,
    constant_kernel,
    cut_norm,
    cycle_graph,
    density,
    identity_partition,
    in_w1,
    kernel_bounds,
    kernel_from_graph,
    kernel_from_json,
    kernel_to_json,
    l2_norm,
    linf_norm,
    norm,
    path_graph,
    sample_kernel,
    schatten_norm,
    single_class_partition,
    square_grid,
    step_average,
    step_kernel,
    sub_kernels,
    subdivide,
    transpose_kernel,
)
from homdens.harness import rank_one_sign_kernel


def test_kernel_from_graph():
    w = kernel_from_graph(complete_graph(2))
    assert w.row_measures == (Fraction(1, 2), Fraction(1, 2))
    assert w.values == ((0, 1), (1, 0))
    w3 = kernel_from_graph(complete_graph(3))
    assert all(w3.values[i][j] == (0 if i == j else 1) for i in range(3) for j in range(3))
    assert density(path_graph(2), w3) == Fraction(2, 3)


def test_w1_and_bounds():
    assert in_w1(constant_kernel(Fraction(1, 2)))
    assert not in_w1(constant_kernel(-2))
    assert in_w1(kernel_from_graph(complete_graph(3)))
    assert kernel_bounds(step_kernel([[0, 2], [-1, 1]])) == (-1, 2)


def test_affine():
    u = affine(constant_kernel(1), 1, -1)
    assert u.values == ((0,),)
    # odd edge count flips sign with the kernel
    u2 = sample_kernel(3, seed=3, mode="rational")
    p4 = path_graph(4)
    assert density(p4, affine(u2, -1, 0)) == -density(p4, u2)
    w = kernel_from_graph(complete_graph(4))
    scaled = affine(w, Fraction(2), 0)
    assert kernel_bounds(scaled) == (0, 2)


def test_compose():
    c = constant_kernel(Fraction(1, 3))
    cc = compose(c, c)
    assert cc.values == ((Fraction(1, 9),),)
    wk2 = kernel_from_graph(complete_graph(2))
    sq = compose(wk2, wk2)
    assert sq.values == ((Fraction(1, 2), 0), (0, Fraction(1, 2)))
    # subdivision identity via composition with the transpose
    u = sample_kernel(3, seed=11, mode="rational", symmetric=False)
    for f in (path_graph(3), cycle_graph(4)):
        assert density(subdivide(f), u) == density(f, compose(u, transpose_kernel(u)))


def test_compose_psd_and_trace():
    import numpy as np

    u = sample_kernel(4, seed=5, mode="float", symmetric=False)
    m = compose(u, transpose_kernel(u))
    assert m.row_measures == m.col_measures
    vals = np.array(m.values, dtype=float)
    lam = np.array(m.row_measures, dtype=float)
    sym = np.sqrt(lam)[:, None] * vals * np.sqrt(lam)[None, :]
    assert np.allclose(sym, sym.T, atol=1e-12)
    assert np.linalg.eigvalsh(sym).min() >= -1e-12
    trace = sum(m.row_measures[i] * m.values[i][i] for i in range(m.n_rows))
    assert abs(float(trace) - l2_norm(u) ** 2) < 1e-12


def test_norms_constant_and_rank_one():
    c = constant_kernel(Fraction(-1, 2))
    assert cut_norm(c).value == Fraction(1, 2)
    assert abs(l2_norm(c) - 0.5) < 1e-15
    assert linf_norm(c) == Fraction(1, 2)

    u = rank_one_sign_kernel()
    res = cut_norm(u)
    assert res.value == Fraction(1, 4) and res.exact
    assert density(cycle_graph(4), u) == 1
    assert abs(schatten_norm(u, 2) - 1.0) < 1e-12
    assert norm(u, "cut") == Fraction(1, 4)
    assert norm(u, "schatten", r=2) == schatten_norm(u, 2)


def test_cut_norm_hill_climb_flagged():
    u = sample_kernel(6, seed=9, mode="float")
    res = cut_norm(u, enum_cap=3)
    exact = cut_norm(u)
    assert not res.exact and exact.exact
    assert res.value <= exact.value + 1e-12


def test_step_average():
    w = step_kernel([[Fraction(2), Fraction(0)], [Fraction(0), Fraction(2)]])
    same = step_average(w, identity_partition(w))
    assert same.values == w.values
    const = step_average(w, single_class_partition(w))
    assert all(v == w.integral() for row in const.values for v in row)
    # projection: averaging twice changes nothing; the integral is preserved
    p = single_class_partition(w)
    assert step_average(step_average(w, p), p).values == step_average(w, p).values
    assert step_average(w, p).integral() == w.integral()
    # range [0, 2] survives averaging
    lo, hi = kernel_bounds(const)
    assert 0 <= lo and hi <= 2


def test_sampler_determinism_and_mean_zero():
    a = sample_kernel(3, (-1, 1), symmetric=True, seed=7)
    b = sample_kernel(3, (-1, 1), symmetric=True, seed=7)
    assert a.values == b.values
    assert in_w1(sample_kernel(4, (-1, 1), seed=1, mode="rational"))
    mz = sample_kernel(4, (-1, 1), seed=2, mode="rational", mean_zero=True)
    assert mz.integral() == 0
    assert in_w1(mz)


def test_json_roundtrip():
    k = sample_kernel(3, (-1, 1), seed=4, mode="rational")
    back = kernel_from_json(kernel_to_json(k))
    assert back == k
    kf = sample_kernel(2, (-1, 1), seed=4, mode="float")
    backf = kernel_from_json(kernel_to_json(kf))
    assert backf.values == kf.values
    with pytest.raises(KernelError):
        kernel_from_json({"row_measures": ["1/2"], "values": [[0]]})


def test_common_refinement_sub():
    a = step_kernel([[1]], row_measures=[1], col_measures=[1])
    b = step_kernel([[0, 1], [1, 0]])
    d = sub_kernels(a, b)
    assert d.n_rows == 2 and d.values == ((1, 0), (0, 1))
    assert density_brute(path_graph(2), d) == d.integral()


def test_square_grid():
    k = step_kernel([[1, 2, 3]], row_measures=[1], col_measures=[Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)])
    g = square_grid(k)
    assert g.row_measures == g.col_measures
    assert g.integral() == k.integral()
