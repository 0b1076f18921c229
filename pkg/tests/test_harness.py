"""Registry structure, expression evaluation, determinism, failure handling."""

from fractions import Fraction

import pytest

from homdens import (
    builtin_registry,
    check_entry,
    constant_kernel,
    cycle_graph,
    density,
    dfactor,
    dprod,
    dsum,
    evaluate,
    get_entry,
    path_graph,
    run_registry,
    sample_kernel,
)
from homdens.harness import (
    HarnessError,
    InequalityEntry,
    KernelSampler,
    expression_degree,
    rank_one_sign_kernel,
    zero_expr,
)


def test_registry_shape():
    entries = builtin_registry()
    assert len([e for e in entries if e.status == "paper"]) >= 24
    assert all(e.citation for e in entries)
    ids = [e.entry_id for e in entries]
    assert len(set(ids)) == len(ids)
    statuses = {e.status for e in entries}
    assert statuses == {"paper", "corrected", "erratum-suspect"}


def test_evaluate_examples():
    for c in (Fraction(1, 2), Fraction(-2, 3)):
        u = constant_kernel(c)
        quarter = dprod(dfactor(cycle_graph(4), Fraction(1, 4)))
        assert abs(evaluate(quarter, u) - abs(float(c))) < 1e-12
        expr = dprod(cycle_graph(6), dfactor(cycle_graph(4), Fraction(1, 4)))
        assert abs(evaluate(expr, u) - float(c) ** 6 * abs(float(c))) < 1e-12

    # dual implementation of (C4 + P3)/2 * C4^(1/8)
    u = sample_kernel(3, seed=12, mode="float", symmetric=True)
    half = Fraction(1, 2)
    expr = dsum(
        dprod(dfactor(cycle_graph(4)), dfactor(cycle_graph(4), Fraction(1, 8)), coeff=half),
        dprod(dfactor(path_graph(3)), dfactor(cycle_graph(4), Fraction(1, 8)), coeff=half),
    )
    t4 = float(density(cycle_graph(4), u))
    t3 = float(density(path_graph(3), u))
    by_hand = 0.5 * (t4 + t3) * t4 ** 0.125
    assert abs(evaluate(expr, u) - by_hand) < 1e-12


def test_evaluate_exact_for_integer_powers():
    u = sample_kernel(2, seed=3, mode="rational")
    expr = dprod(dfactor(cycle_graph(4), 2), dfactor(path_graph(3), 1))
    val = evaluate(expr, u)
    assert isinstance(val, Fraction)
    assert val == density(cycle_graph(4), u) ** 2 * density(path_graph(3), u)


def test_fractional_power_needs_nonnegative_base():
    u = constant_kernel(Fraction(-1, 2))
    bad = dprod(dfactor(path_graph(2), Fraction(1, 2)))
    with pytest.raises(HarnessError):
        evaluate(bad, u)
    ok = dprod(dfactor(path_graph(2), Fraction(1, 2), absolute=True))
    assert abs(evaluate(ok, u) - (0.5) ** 0.5) < 1e-12


def test_expression_degree():
    expr = dprod(dfactor(cycle_graph(4), Fraction(1, 2)), dfactor(path_graph(3), 1))
    assert expression_degree(expr) == Fraction(4)
    mixed = dsum(dprod(cycle_graph(4)), dprod(path_graph(3)))
    assert expression_degree(mixed) is None


def test_check_entry_determinism():
    entry = get_entry("mon")
    a = check_entry(entry, trials=20, seed=5).to_json()
    b = check_entry(entry, trials=20, seed=5).to_json()
    assert a == b


def test_homogeneous_entries_scale_stable():
    # scaling the kernel by c in (0, 1] must not flip a pass into a fail
    from homdens import affine

    entry = get_entry("mon")
    for label, lhs, rhs in entry.checks:
        dl, dr = expression_degree(lhs), expression_degree(rhs)
        if dl is None or dr is None or dl != dr:
            continue
        u = sample_kernel(3, seed=8, mode="float", symmetric=True)
        for c in (1.0, 0.5, 0.125):
            scaled = affine(u, c, 0)
            assert evaluate(rhs, scaled) - evaluate(lhs, scaled) >= -1e-9


def test_erratum_entry_reports_witness():
    entry = get_entry("cut_sandwich_upper_literal")
    rep = check_entry(entry, trials=100, seed=0)
    assert not rep.passed
    assert rep.worst_margin_exact == "-3/4"
    assert rep.witness is not None
    # the witness is the rank-one sign kernel
    from homdens import kernel_from_json

    w = kernel_from_json(rep.witness)
    assert w.values == rank_one_sign_kernel().values


def test_false_entry_fails_with_witness():
    bad = InequalityEntry(
        "bad_test_entry",
        "intentionally false inequality used to exercise failure reporting",
        checks=(("C4<=0", dprod(cycle_graph(4)), zero_expr()),),
    )
    rep = check_entry(bad, trials=10, seed=0)
    assert not rep.passed and rep.witness is not None


def test_sampler_determinism_and_domains():
    s = KernelSampler("w1", seed=3)
    ks = [s.kernel(i) for i in range(16)]
    ks2 = [s.kernel(i) for i in range(16)]
    assert all(a.values == b.values for a, b in zip(ks, ks2))
    from homdens import in_w1

    assert all(in_w1(k) for k in ks)
    wide = KernelSampler("w", seed=3)
    assert any(not in_w1(wide.kernel(i)) for i in range(16))
    sym = KernelSampler("w1", seed=3, symmetric_only=True)
    assert all(sym.kernel(i).is_symmetric() for i in range(16))


def test_run_registry_subset():
    rep = run_registry(trials=12, seed=2, only=["mon", "gcs", "cut_sandwich_upper_literal"])
    assert len(rep["entries"]) == 3
    assert rep["all_paper_passed"]
    with pytest.raises(HarnessError):
        run_registry(trials=2, only=["nope"])
