import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from spectral_gap_lab.bounds import BoundInputs, cdk, kdk, weyl_bound
from spectral_gap_lab.discretization import BoundaryCondition, assemble_problem
from spectral_gap_lab.eigensolver import cluster_ids, dense_eigs
from spectral_gap_lab.errors import EvaluationError
from spectral_gap_lab.fields import constant_field_gauge, parse_field
from spectral_gap_lab.geometry import DomainSpec, measure
from spectral_gap_lab.verify import classify, richardson, signed_margin

leaf = st.one_of(
    st.sampled_from(["x", "y", "r2", "x1", "x2"]),
    st.floats(0, 9, allow_nan=False).map(lambda v: repr(round(v, 3))),
)


def _combine(children):
    binary = st.tuples(children, st.sampled_from(["+", "-", "*", "/", "^"]), children).map(
        lambda t: f"({t[0]}) {t[1]} ({t[2]})")
    unary = st.tuples(st.sampled_from(["sin", "cos", "exp", "abs", "-"]), children).map(
        lambda t: f"-({t[1]})" if t[0] == "-" else f"{t[0]}({t[1]})")
    return st.one_of(binary, unary)


expressions = st.recursive(leaf, _combine, max_leaves=8)


@settings(max_examples=150, deadline=None)
@given(expressions)
def test_pretty_print_roundtrip(text):
    e = parse_field(text, 2)
    again = parse_field(str(e), 2)
    pts = np.random.default_rng(0).uniform(0.1, 1.0, size=(100, 2))
    try:
        a = e.evaluate(pts)
    except EvaluationError:
        return
    b = again.evaluate(pts)
    assert np.all((a == b) | (np.abs(a - b) <= 1e-14 * np.maximum(1, np.abs(a))))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.integers(1, 200), st.floats(0.2, 5.0),
       st.sampled_from(["surface", "ball"]))
def test_constant_identities(d, k, side, convention):
    inp = BoundInputs(d, k, measure(DomainSpec.rectangle(*([side] * d))), convention=convention)
    w = weyl_bound(inp)
    assert math.isclose((d + 2) / d / k * cdk(inp), w, rel_tol=1e-13)
    assert math.isclose(((d + 2) / 2) ** (2 / d) * w, kdk(inp), rel_tol=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(-10, 10), st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3),
       st.floats(1.0, 3.0), st.floats(0.01, 0.5))
def test_richardson_recovers_power_law(L, c, p, h):
    vals = [L + c * (h / 2**i) ** p for i in range(3)]
    assume(abs(vals[0] - vals[1]) > 1e-9 * max(1, abs(L)))
    ex = richardson(vals)
    assert math.isclose(ex.limit, L, abs_tol=1e-6 * max(1, abs(L)))
    assert math.isclose(ex.order, p, abs_tol=1e-4)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["upper-for-sum", "lower-for-single", "upper-for-gap", "lower-for-sum"]),
       st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(0, 10))
def test_verdict_trichotomy(side, bound, value, unc):
    m = signed_margin(side, bound, value)
    v = classify(m, unc)
    if abs(m) < unc:
        assert v == "inconclusive"
    elif side.startswith("upper"):
        assert v == ("holds" if value <= bound else "fails")
    else:
        assert v == ("holds" if value >= bound else "fails")


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 100), min_size=1, max_size=30))
def test_clusters_are_monotone_groups(values):
    vals = np.sort(np.array(values))
    ids = cluster_ids(vals)
    assert ids[0] == 0 and np.all(np.diff(ids) >= 0) and np.all(np.diff(ids) <= 1)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 8.0), st.integers(5, 9), st.sampled_from(["dirichlet", "neumann"]))
def test_assembled_operator_hermitian_and_diamagnetic(B, n, kind):
    sq = DomainSpec.rectangle(1, 1)
    bc = BoundaryCondition.dirichlet() if kind == "dirichlet" else BoundaryCondition.neumann(2)
    op = assemble_problem(sq, n, bc, A=constant_field_gauge(B))
    H = op.matrix
    assert (H - H.conj().T).count_nonzero() == 0
    lam = dense_eigs(op).eigenvalues[0]
    ref = dense_eigs(assemble_problem(sq, n, bc)).eigenvalues[0]
    assert lam >= ref - 1e-8
