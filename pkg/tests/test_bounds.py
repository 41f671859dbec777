import math

import numpy as np
import pytest
from scipy.integrate import quad

from spectral_gap_lab.bounds import (BoundInputs, ProblemContext, build_catalog,
                                     catalog_identifiers, cdk, constants_row, ese_sum_upper,
                                     flm_quotient_bounds, gap_bounds, h_d_constant, kdk,
                                     lb_bounds, li_yau_lemma_upper, mean_potential,
                                     melas_lower, optimal_radius, ppw_gap_bound,
                                     prop_ee_upper, robin_bounds, ubnbc_upper, weyl_bound)
from spectral_gap_lab.errors import Infeasible, NotApplicable
from spectral_gap_lab.geometry import DomainSpec, measure
from spectral_gap_lab.oracles import bessel_zero

PI = math.pi
SQ = measure(DomainSpec.rectangle(1, 1))


def inputs(k=1, convention="ball", **kw):
    return BoundInputs(2, k, kw.pop("measures", SQ), convention=convention, **kw)


def test_weyl_examples():
    assert weyl_bound(inputs(convention="surface")) == pytest.approx(2 * PI)
    assert weyl_bound(inputs()) == pytest.approx(4 * PI)


@pytest.mark.parametrize("t", [0.5, 3.0])
def test_weyl_scaling(t):
    m = measure(DomainSpec.rectangle(t, t))
    assert weyl_bound(inputs(measures=m)) == pytest.approx(weyl_bound(inputs()) / t**2)


def test_c_and_k_examples():
    assert cdk(inputs(3, "surface")) == pytest.approx(9 * PI)
    assert kdk(inputs(2, "surface")) == pytest.approx(8 * PI)
    assert cdk(inputs(6)) == pytest.approx(72 * PI)


def test_h_d():
    assert h_d_constant(2) == pytest.approx(2.5663, abs=1e-3)
    assert all(h_d_constant(d) > 0 for d in range(2, 7))
    with pytest.raises(ValueError):
        h_d_constant(1)


def _bessel_poisson(nu, x):
    # J_nu(x) = (x/2)^nu / (sqrt(pi) Gamma(nu + 1/2)) int_{-1}^{1} (1-t^2)^{nu-1/2} cos(xt) dt
    integral = quad(lambda t: (1 - t * t) ** (nu - 0.5) * math.cos(x * t), -1, 1,
                    epsabs=1e-14, epsrel=1e-14)[0]
    return (x / 2) ** nu / (math.sqrt(PI) * math.gamma(nu + 0.5)) * integral


def test_h3_two_ways():
    j = bessel_zero(0.5, 1)
    via_quad = 2 * 3 / (j**2 * _bessel_poisson(1.5, j) ** 2)
    assert h_d_constant(3) == pytest.approx(via_quad, rel=1e-8)
    assert h_d_constant(3) == pytest.approx(3.0, rel=1e-12)


def test_mean_potential():
    assert mean_potential(inputs()) == 0
    assert mean_potential(inputs(v_l1=3.0)) == 3.0
    m2 = measure(DomainSpec.rectangle(1, 2))
    assert mean_potential(inputs(v_l1=3.0, measures=m2)) == 1.5


def test_prop_ee_closed_form_radius():
    inp = inputs(convention="surface")
    assert kdk(inp) == pytest.approx(4 * PI)
    assert prop_ee_upper(inp, 0.0) <= kdk(inp) + 1e-12
    assert prop_ee_upper(inp, 0.0) == pytest.approx(kdk(inp), rel=1e-9)


@pytest.mark.parametrize("k", [1, 3, 10])
def test_prop_ee_inf_property(k):
    inp = inputs(k, a_l2_sq=2.0, v_l1=0.7)
    partial = 0.3 * cdk(inp)
    best = prop_ee_upper(inp, partial)
    # brute force over the admissible radii
    r_min = math.sqrt(weyl_bound(inp))
    rs = np.linspace(r_min * 1.001, 8 * r_min, 4000)
    S, vol = inp.sphere, inp.volume
    num = 0.5 * rs**4 * S * vol + rs**2 * S * 2.7 - (2 * PI) ** 2 * partial
    vals = num / (rs**2 * S * vol - (2 * PI) ** 2 * k)
    assert best <= vals.min() + 1e-9
    assert best <= ubnbc_upper(inp).value + 1e-9


def test_prop_ee_infeasible():
    with pytest.raises(Infeasible):
        prop_ee_upper(inputs(10_000), 0.0, r_max=1.0)


def test_ubnbc_and_ese():
    assert ubnbc_upper(inputs()).value == pytest.approx(8 * PI)
    assert ubnbc_upper(inputs(a_l2_sq=4 / 3)).value == pytest.approx(8 / 3 + 8 * PI)
    assert ese_sum_upper(inputs(5)).value == pytest.approx(cdk(inputs(5)))
    for k in range(1, 20):
        assert ubnbc_upper(inputs(k)).value == kdk(inputs(k))


def test_lb_bounds():
    for k in (1, 4, 9):
        assert lb_bounds(inputs(k))[0].value == pytest.approx(cdk(inputs(k)))
    assert lb_bounds(inputs())[1].value == pytest.approx(2 * PI)
    cube = measure(DomainSpec.rectangle(1, 1, 1))
    inp3 = BoundInputs(3, 4, cube)
    assert lb_bounds(inp3)[1].value == pytest.approx(2 * 0.6 * weyl_bound(inp3))


def test_gap_bounds():
    base = gap_bounds(inputs())[0].value
    assert base == pytest.approx(4 * PI)
    assert gap_bounds(inputs(v_l1=3.0))[0].value == pytest.approx(base + 6)
    robin = gap_bounds(inputs(sigma_sup=1.0), robin=True)[0]
    assert robin.value == pytest.approx(base + 16) and robin.identifier == "eq:lk+1R"
    tele = gap_bounds(inputs(3))
    assert tele[1].value == pytest.approx(3 * tele[0].value)


def test_robin_bounds():
    pos = robin_bounds(inputs(sigma_sup=1.0), "positive")
    assert pos[0].value == pytest.approx(16 + 8 * PI)
    assert robin_bounds(inputs(2, sigma_sup=1.0), "positive")[1].value == pytest.approx(8 * PI + 16)
    zero = robin_bounds(inputs(3), "positive")
    assert zero[0].value == pytest.approx(ubnbc_upper(inputs(3)).value)
    assert zero[1].value == pytest.approx(ese_sum_upper(inputs(3)).value)
    neg = robin_bounds(inputs(2, sigma_sup=1.0), "negative")
    assert neg[0].identifier == "eq:EECor" and "all-eigenvalues-positive" in neg[0].applicability
    with pytest.raises(NotApplicable):
        robin_bounds(inputs(), "mixed")


def test_flm_and_ppw():
    b1, b2 = flm_quotient_bounds(inputs())
    assert b1 == pytest.approx(6.1326, abs=2e-3)
    assert b2 == pytest.approx(6.849, abs=3e-3)
    assert ppw_gap_bound(2 * PI**2, 1, 2) == pytest.approx(4 * PI**2)


def test_melas():
    assert melas_lower(inputs(3)).value == pytest.approx(cdk(inputs(3)))
    assert melas_lower(inputs(2, melas_constant=1.0)).value == pytest.approx(cdk(inputs(2)) + 12)
    disk = measure(DomainSpec.disk(1.0))
    got = melas_lower(inputs(1, melas_constant=1.0, measures=disk)).value
    assert got == pytest.approx(cdk(inputs(1, measures=disk)) + 2)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("convention", ["surface", "ball"])
def test_identity_chain(d, convention):
    m = measure(DomainSpec.rectangle(*([1.3] * d)))
    for k in range(1, 51):
        inp = BoundInputs(d, k, m, convention=convention)
        w = weyl_bound(inp)
        assert abs((d + 2) / d / k * cdk(inp) - w) <= 1e-13 * w
        assert abs(((d + 2) / 2) ** (2 / d) * w - kdk(inp)) <= 1e-13 * w


@pytest.mark.parametrize("d", [2, 3, 4])
def test_convention_ratio(d):
    m = measure(DomainSpec.rectangle(*([1.0] * d)))
    for k in (1, 7, 30):
        ratio = cdk(BoundInputs(d, k, m, convention="surface")) / cdk(BoundInputs(d, k, m))
        assert ratio == pytest.approx(d ** (-2 / d), rel=1e-13)


def test_dilation_scaling():
    t = 2.5
    m, mt = SQ, measure(DomainSpec.rectangle(t, t))
    # A -> A/t keeps ||A||^2 (area t^2), V -> V/t^2 keeps ||V||_1, sigma -> sigma/t
    base = inputs(3, a_l2_sq=1.2, v_l1=0.8, sigma_sup=0.5)
    scaled = inputs(3, a_l2_sq=1.2, v_l1=0.8, sigma_sup=0.5 / t, measures=mt)
    for fn in (lambda i: ubnbc_upper(i).value,
               lambda i: robin_bounds(i, "positive")[0].value,
               lambda i: gap_bounds(i)[0].value):
        assert fn(scaled) == pytest.approx(fn(base) / t**2, rel=1e-12)


def test_li_yau_lemma_extremal_and_random():
    d = 2
    N1, R = 3.0, 0.8
    mass = N1 * PI * R**2
    moment = N1 * PI * R**4 / 2
    assert li_yau_lemma_upper(d, N1, moment) == pytest.approx(mass, rel=1e-12)
    for a in (0.5, 1.0, 4.0):
        # f = N1 exp(-a |x|^2) satisfies 0 <= f <= N1
        total = N1 * PI / a
        second = N1 * PI / a**2
        assert total <= li_yau_lemma_upper(d, N1, second) + 1e-12
    assert li_yau_lemma_upper(d, N1, moment, "surface") > mass


def test_optimal_radius():
    inp = inputs()
    assert optimal_radius(inp) ** 2 == pytest.approx(kdk(inp))


def test_constants_row():
    row = constants_row(inputs(2))
    assert row["W"] == pytest.approx(8 * PI) and row["H_d"] == pytest.approx(2.5663, abs=1e-3)
    assert row["Ar_over_Vol"] == 4.0 and row["I"] == pytest.approx(1 / 6)


def test_catalog_ids_are_stable():
    ids = catalog_identifiers()
    for name in ("eq:LY", "eq:Kroeger", "eq:EECor", "eq:ESE", "eq:slR", "eq:EEHRCor",
                 "eq:FLM", "eq:PPW", "eq:Polya:D", "eq:Polya:N", "eq:lam0sum", "eq:lamlow",
                 "eq:HVgap1", "eq:HVgap2", "eq:Melas", "eq:Kdk", "eq:EE"):
        assert name in ids


@pytest.mark.parametrize("ctx", [
    ProblemContext(2, "dirichlet"), ProblemContext(2, "neumann"),
    ProblemContext(2, "robin", "positive"), ProblemContext(2, "robin", "negative"),
    ProblemContext(2, "robin", "mixed"),
    ProblemContext(2, "dirichlet", a_zero=False, constant_field=True),
    ProblemContext(2, "neumann", a_zero=False, constant_field=True, v_zero=False)])
def test_catalog_ids_unique_per_context(ctx):
    applicable = [e.identifier for e in build_catalog(2) if e.applies(ctx)]
    assert len(applicable) == len(set(applicable))


def test_mixed_sigma_gets_no_robin_bounds():
    ids = {e.identifier for e in build_catalog(2) if e.applies(ProblemContext(2, "robin", "mixed"))}
    assert not ids & {"eq:EEHRCor", "eq:slR", "eq:EECor", "eq:ESE", "prop:EEHR"}


def test_lb_grade_probe_in_3d():
    grades = {e.identifier: e.grade for e in build_catalog(3)}
    assert grades["eq:lamlow"] == "probe"
    assert {e.identifier: e.grade for e in build_catalog(2)}["eq:lamlow"] == "stated"


def test_input_validation():
    with pytest.raises(ValueError):
        inputs(0)
    with pytest.raises(ValueError):
        inputs(1, v_l1=-1.0)
    with pytest.raises(ValueError):
        inputs(1, "sphere")
