import json
import math

import numpy as np
import pytest

from spectral_gap_lab.bounds import BoundInputs, ProblemContext, build_catalog
from spectral_gap_lab.discretization import BoundaryCondition, assemble_problem
from spectral_gap_lab.eigensolver import SolverConfig, lanczos_lowest
from spectral_gap_lab.errors import InsufficientEigenvalues
from spectral_gap_lab.geometry import DomainSpec, measure
from spectral_gap_lab.oracles import rectangle_spectrum
from spectral_gap_lab.verify import (CHECK_COLUMNS, ConvergenceStudy, classify,
                                     convergence_study, load_report, report_to_dict,
                                     richardson, run_checks, sandwich_checks, signed_margin,
                                     weyl_ratio_table, write_report)

PI = math.pi
SQ = DomainSpec.rectangle(1, 1)
INP = BoundInputs(2, 1, measure(SQ))
NEU = rectangle_spectrum([1, 1], "neumann", 600)
DIR = rectangle_spectrum([1, 1], "dirichlet", 600)


def test_richardson_exact_quadratic():
    L, c, h = 3.0, 0.7, 0.1
    ex = richardson([L + c * h**2, L + c * (h / 2) ** 2, L + c * (h / 4) ** 2])
    assert ex.limit == pytest.approx(L, abs=1e-9)
    assert ex.order == pytest.approx(2.0, abs=1e-9)


def test_richardson_general_spacings():
    hs = [1 / 33, 1 / 65, 1 / 129]
    vals = [5.0 + 2.0 * h**2 for h in hs]
    ex = richardson(vals, hs)
    assert ex.limit == pytest.approx(5.0, abs=1e-12)
    assert ex.order == pytest.approx(2.0, abs=1e-6)


def test_richardson_constant():
    ex = richardson([2.0, 2.0, 2.0])
    assert ex.limit == 2.0 and ex.order is None


def test_richardson_alternating():
    L = 1.0
    ex = richardson([L + 0.4, L - 0.1, L + 0.025])
    assert ex.limit == pytest.approx(L, abs=1e-12)
    assert ex.alternating and ex.order == pytest.approx(2.0)


def test_richardson_validation():
    with pytest.raises(ValueError):
        richardson([1.0, 2.0])
    with pytest.raises(ValueError):
        richardson([1, 2, 3], [0.1, 0.2, 0.05])


def test_margin_and_classify():
    assert signed_margin("upper-for-sum", 10, 8) == 2
    assert signed_margin("lower-for-single", 10, 8) == -2
    assert classify(2.0, 0.1) == "holds"
    assert classify(-2.0, 0.1) == "fails"
    assert classify(0.05, 0.1) == "inconclusive"
    assert classify(float("nan"), 0.1) == "inconclusive"


def test_kroeger_convention_finding():
    rep = run_checks(NEU, INP, 20, ProblemContext(2, "neumann"))
    surf = {c.k: c for c in rep.select("eq:Kroeger", "surface")}
    ball = {c.k: c for c in rep.select("eq:Kroeger", "ball")}
    assert surf[6].verdict == "fails"
    assert surf[6].value == pytest.approx(12 * PI**2) and surf[6].bound == pytest.approx(36 * PI)
    assert ball[6].verdict == "holds" and ball[6].bound == pytest.approx(72 * PI)


def test_polya_lower_dirichlet():
    rep = run_checks(DIR, INP, 5, ProblemContext(2, "dirichlet"))
    c = [x for x in rep.select("eq:Polya:D", "ball") if x.k == 1][0]
    assert c.verdict == "holds" and c.value == pytest.approx(2 * PI**2)
    assert c.bound == pytest.approx(4 * PI)


def test_report_completeness_and_ordering():
    ctx = ProblemContext(2, "dirichlet")
    k_max = 7
    rep = run_checks(DIR, INP, k_max, ctx)
    n_entries = sum(1 for e in build_catalog(2) if e.applies(ctx))
    assert len(rep.checks) == n_entries * 2 * k_max
    keys = [(c.identifier, c.convention, c.k) for c in rep.checks]
    assert len(set(keys)) == len(keys)
    assert keys == sorted(keys, key=lambda t: (t[0], ("surface", "ball").index(t[1]), t[2]))


def test_verdicts_reproducible_from_margins():
    rep = run_checks(NEU, INP, 15, ProblemContext(2, "neumann"))
    for c in rep.checks:
        assert c.margin == signed_margin(c.side, c.bound, c.value)
        assert c.verdict == classify(c.margin, c.uncertainty)


def test_neumann_ground_state_excludes_quotient():
    ctx = ProblemContext(2, "dirichlet")
    lam = np.array(DIR.eigenvalues[:10]) - DIR.eigenvalues[0]
    rep = run_checks(lam, INP, 5, ctx)
    assert not rep.select("eq:FLM")


def test_negative_robin_needs_positive_spectrum():
    ctx = ProblemContext(2, "robin", "negative")
    lam = np.linspace(-1.0, 30.0, 12)
    rep = run_checks(lam, INP, 5, ctx)
    assert not rep.select("eq:EECor")
    rep = run_checks(lam + 2.0, INP, 5, ctx)
    assert rep.select("eq:EECor")


def test_force_marks_informational():
    rep = run_checks(DIR, INP, 3, ProblemContext(2, "dirichlet"), force=True)
    kro = rep.select("eq:Kroeger")
    assert kro and all(c.verdict == "not-applicable" and c.informational for c in kro)
    assert all(not c.informational for c in rep.select("eq:LY"))


def test_insufficient_eigenvalues():
    with pytest.raises(InsufficientEigenvalues):
        run_checks(DIR.eigenvalues[:5], INP, 5, ProblemContext(2, "dirichlet"))


def test_sandwich():
    checks = sandwich_checks(NEU, DIR, INP, 20)
    assert all(c.verdict == "holds" for c in checks if c.convention == "ball")


def test_weyl_table():
    rows = weyl_ratio_table(DIR, INP, 500)
    assert rows[0]["ratio"] == pytest.approx(2 * PI**2 / (4 * PI))
    assert 0.95 <= rows[-1]["ratio"] <= 1.10
    neu = weyl_ratio_table(NEU, INP, 500)
    assert all(r["sum_ratio"] <= 1 for r in neu)


def test_convergence_study_dirichlet():
    spectra, hs = [], []
    for n in (16, 32, 64):
        op = assemble_problem(SQ, n, BoundaryCondition.dirichlet())
        spectra.append(lanczos_lowest(op, SolverConfig(count=3)))
        hs.append(op.grid.h)
    st = convergence_study([16, 32, 64], hs, spectra)
    assert isinstance(st, ConvergenceStudy)
    assert np.allclose(st.orders, 2.0, atol=0.3)
    assert st.limits[0] == pytest.approx(2 * PI**2, rel=1e-4)
    assert st.uncertainty[0] == abs(st.limits[0] - st.finest[0])
    with pytest.raises(ValueError):
        convergence_study([16, 32], hs[:2], spectra[:2])
    rep = run_checks(None, INP, 2, ProblemContext(2, "dirichlet"), study=st)
    assert rep.extrapolated_spectrum is not None
    assert all(c.discretization == "extrapolated" for c in rep.checks)


def test_oracle_and_extrapolated_verdicts_agree():
    spectra, hs = [], []
    for n in (24, 48, 96):
        op = assemble_problem(SQ, n, BoundaryCondition.neumann(2))
        spectra.append(lanczos_lowest(op, SolverConfig(count=9)))
        hs.append(op.grid.h)
    st = convergence_study([24, 48, 96], hs, spectra)
    ctx = ProblemContext(2, "neumann")
    disc = run_checks(None, INP, 8, ctx, study=st)
    oracle = run_checks(NEU, INP, 8, ctx)
    for a, b in zip(disc.checks, oracle.checks):
        assert (a.identifier, a.k, a.convention) == (b.identifier, b.k, b.convention)
        if abs(a.margin) > a.uncertainty and abs(b.margin) > 1e-6 * max(1, abs(b.bound)):
            assert a.verdict == b.verdict, (a, b)


def test_serialization_roundtrip(tmp_path):
    rep = run_checks(NEU, INP, 6, ProblemContext(2, "neumann"), problem={"name": "square"})
    js, cs = write_report(rep, tmp_path)
    assert js.name == "verify_report.v1.json" and cs.name == "verify_report.v1.csv"
    data = load_report(js)
    assert set(data) == {"schema_version", "problem", "spectra", "checks", "summary"}
    assert len(data["checks"]) == len(rep.checks)
    lines = cs.read_text().splitlines()
    assert lines[0].split(",") == list(CHECK_COLUMNS) and len(lines) == len(rep.checks) + 1
    again = write_report(rep, tmp_path / "b")
    assert again[0].read_bytes() == js.read_bytes()
    assert again[1].read_bytes() == cs.read_bytes()
    assert json.loads(js.read_text()) == report_to_dict(rep)
    assert not list(tmp_path.glob(".*.tmp"))
