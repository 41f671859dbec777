"""Eigenvalue constants and inequalities as evaluable formulas.

Two sphere conventions are supported. ``surface`` uses Vol(S^{d-1}) (the
surface measure of the unit sphere) in the constants W, C, K; ``ball`` uses
the unit-ball volume Vol(S^{d-1}) / d, which is what the classical Li-Yau,
Kroger and Weyl constants require. They differ in C by the factor d^{-2/d}.

Catalog identifiers are stable strings: ``eq:LY``, ``eq:Kroeger``,
``eq:EECor``, ``eq:slR`` and so on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import Infeasible, NotApplicable
from .geometry import GeometryMeasures, unit_ball_volume, unit_sphere_area
from .oracles import bessel_j, bessel_zero

CONVENTIONS = ("surface", "ball")
SIDES = ("lower-for-single", "upper-for-single", "lower-for-sum", "upper-for-sum",
         "upper-for-gap", "upper-for-quotient")
_GOLDEN = (math.sqrt(5) - 1) / 2


def sphere_constant(d: int, convention: str) -> float:
    if convention == "surface":
        return unit_sphere_area(d)
    if convention == "ball":
        return unit_ball_volume(d)
    raise ValueError(f"unknown sphere convention {convention!r}")


@dataclass(frozen=True)
class BoundInputs:
    d: int
    k: int
    measures: GeometryMeasures
    a_l2_sq: float = 0.0
    v_l1: float = 0.0
    sigma_sup: float = 0.0
    convention: str = "ball"
    melas_constant: float = 0.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if min(self.a_l2_sq, self.v_l1, self.sigma_sup) < 0:
            raise ValueError("norms must be nonnegative")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown sphere convention {self.convention!r}")
        if self.melas_constant < 0:
            raise ValueError("Melas constant must be >= 0")

    @property
    def volume(self) -> float:
        return self.measures.volume

    @property
    def sphere(self) -> float:
        return sphere_constant(self.d, self.convention)

    def at(self, k: int | None = None, convention: str | None = None) -> "BoundInputs":
        changes = {}
        if k is not None:
            changes["k"] = k
        if convention is not None:
            changes["convention"] = convention
        return replace(self, **changes)


@dataclass(frozen=True)
class BoundValue:
    identifier: str
    value: float
    side: str
    k: int
    applicability: tuple[str, ...] = ()


# -- constants ---------------------------------------------------------------

def weyl_bound(inp: BoundInputs, k: int | None = None) -> float:
    """W_{d,k} = (2 pi)^2 (k / (S Vol))^{2/d}."""
    k = inp.k if k is None else k
    return (2 * math.pi) ** 2 * (k / (inp.sphere * inp.volume)) ** (2.0 / inp.d)


def cdk(inp: BoundInputs, k: int | None = None) -> float:
    """C_{d,k} = d/(d+2) k W_{d,k}."""
    k = inp.k if k is None else k
    return inp.d / (inp.d + 2) * k * weyl_bound(inp, k)


def kdk(inp: BoundInputs, k: int | None = None) -> float:
    """K_{d,k} = ((d+2)/2)^{2/d} W_{d,k}."""
    return ((inp.d + 2) / 2) ** (2.0 / inp.d) * weyl_bound(inp, k)


@lru_cache(maxsize=None)
def h_d_constant(d: int) -> float:
    """2d / (j^2 J_{d/2}(j)^2) with j the first zero of J_{(d-2)/2}."""
    if d < 2:
        raise ValueError("H_d is defined for d >= 2")
    j = bessel_zero((d - 2) / 2, 1)
    return 2 * d / (j**2 * bessel_j(d / 2, j) ** 2)


def mean_potential(inp: BoundInputs) -> float:
    return inp.v_l1 / inp.volume


def specific_surface(inp: BoundInputs) -> float:
    return inp.measures.boundary_area / inp.volume


def li_yau_lemma_upper(d: int, sup_bound: float, second_moment: float,
                       convention: str = "ball") -> float:
    """Upper half of the Hormander / Li-Yau lemma.

    For 0 <= f <= sup_bound with integral of |x|^2 f at most second_moment,
    the integral of f is at most C_d sup_bound^{2/(d+2)} second_moment^{d/(d+2)}.
    """
    S = sphere_constant(d, convention)
    c = ((d + 2) / d) ** (d / (d + 2)) * S ** (2 / (d + 2))
    return c * sup_bound ** (2 / (d + 2)) * second_moment ** (d / (d + 2))


# -- the variational bound on lambda_{k+1} -----------------------------------

def _ee_quotient(inp: BoundInputs, partial_sum: float, include_sigma: bool):
    d, S, vol, k = inp.d, inp.sphere, inp.volume, inp.k
    two_pi_d = (2 * math.pi) ** d
    extra = inp.a_l2_sq + inp.v_l1
    if include_sigma:
        extra += inp.sigma_sup * inp.measures.boundary_area

    def f(r):
        rd = r**d * S
        num = d / (d + 2) * r**2 * rd * vol + rd * extra - two_pi_d * partial_sum
        return num / (rd * vol - two_pi_d * k)

    return f


def optimal_radius(inp: BoundInputs) -> float:
    """r(2) = W_{d,k}^{1/2} ((d+2)/2)^{1/d}."""
    return math.sqrt(weyl_bound(inp)) * ((inp.d + 2) / 2) ** (1 / inp.d)


def prop_ee_upper(inp: BoundInputs, partial_sum: float = 0.0, *,
                  include_sigma: bool = False, r_max: float | None = None) -> float:
    """Minimized upper bound on lambda_{k+1} over the ball radius r.

    The quotient [int_{B_r x Omega}(|xi|^2 + |A|^2 + V) - (2pi)^d sum_{j<=k} lambda_j]
    / [Vol(B_r) Vol(Omega) - (2pi)^d k] is scanned on a log grid over
    [r_min (1 + 1e-6), 8 r_min] and refined by golden-section search; the
    result never exceeds the value at r(2). With ``include_sigma`` the Robin
    term ||sigma|| Ar Vol(B_r) is added to the numerator.
    """
    r_min = math.sqrt(weyl_bound(inp))
    lo, hi = r_min * (1 + 1e-6), 8 * r_min
    if r_max is not None:
        hi = min(hi, r_max)
    if hi <= lo:
        raise Infeasible(f"no admissible radius: r_max={r_max} <= r_min={r_min}")
    f = _ee_quotient(inp, partial_sum, include_sigma)
    grid = np.geomspace(lo, hi, 161)
    vals = np.array([f(r) for r in grid])
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    c, e = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fe = f(c), f(e)
    for _ in range(80):
        if fc < fe:
            b, e, fe = e, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + _GOLDEN * (b - a)
            fe = f(e)
    best = min(vals[i], fc, fe)
    r2 = optimal_radius(inp)
    if lo <= r2 <= hi:
        best = min(best, f(r2))
    return float(best)


def prop_ee_sum_sensitivity(inp: BoundInputs) -> float:
    """|d bound / d sum_j lambda_j| at r(2); used to propagate eigenvalue uncertainty."""
    r = optimal_radius(inp)
    den = r**inp.d * inp.sphere * inp.volume - (2 * math.pi) ** inp.d * inp.k
    return (2 * math.pi) ** inp.d / den


# -- theorem-level bounds ----------------------------------------------------

def ubnbc_upper(inp: BoundInputs) -> BoundValue:
    """lambda_{k+1} <= (d+2)/(d Vol) (||A||^2 + ||V||_1) + K_{d,k}."""
    d = inp.d
    val = (d + 2) / (d * inp.volume) * (inp.a_l2_sq + inp.v_l1) + kdk(inp)
    return BoundValue("eq:EECor", val, "upper-for-single", inp.k, ("neumann", "robin-"))


def ese_sum_upper(inp: BoundInputs) -> BoundValue:
    """sum_{j<=k} lambda_j <= C_{d,k} + k^2 ||A||^2 / Vol + k ||V||_1 / Vol."""
    k = inp.k
    val = cdk(inp) + k * k * inp.a_l2_sq / inp.volume + k * inp.v_l1 / inp.volume
    return BoundValue("eq:ESE", val, "upper-for-sum", k, ("neumann", "robin-"))


def lb_bounds(inp: BoundInputs) -> tuple[BoundValue, BoundValue]:
    """Sum and single lower bounds for A = 0 with the k^{d/2} factor taken literally."""
    d, k = inp.d, inp.k
    w = weyl_bound(inp)
    total = d / (d + 2) * k ** (d / 2) * w
    single = d / (d + 2) * k ** (d / 2 - 1) * w
    return (BoundValue("eq:lam0sum", total, "lower-for-sum", k, ("A=0",)),
            BoundValue("eq:lamlow", single, "lower-for-single", k, ("A=0",)))


def _gap_term(inp: BoundInputs, literal_exponent: bool) -> float:
    d, k = inp.d, inp.k
    factor = k ** (d / 2 - 1) if literal_exponent else 1.0
    return (kdk(inp) - d / (d + 2) * factor * weyl_bound(inp, k + 1)
            + (d + 2) / d * mean_potential(inp))


def gap_bounds(inp: BoundInputs, *, robin: bool = False,
               constant_field: bool = False) -> list[BoundValue]:
    """Adjacent-gap and telescoped-gap upper bounds.

    The telescoped form bounds lambda_{k+1} - lambda_1 by k times the
    adjacent-gap expression, as printed (the summand does not depend on the
    summation index). ``constant_field`` replaces k^{d/2-1} by 1; ``robin``
    adds (d+2) Ar/Vol ||sigma||.
    """
    term = _gap_term(inp, literal_exponent=not constant_field)
    if robin:
        term += (inp.d + 2) * specific_surface(inp) * inp.sigma_sup
    if constant_field:
        ids = ("rem:ELV:gap", "rem:ELV:gap-sum")
    elif robin:
        ids = ("eq:lk+1R", "eq:lk+1R:sum")
    else:
        ids = ("eq:HVgap1", "eq:HVgap2")
    return [BoundValue(ids[0], term, "upper-for-gap", inp.k),
            BoundValue(ids[1], inp.k * term, "upper-for-gap", inp.k)]


def robin_bounds(inp: BoundInputs, sigma_sign: str) -> list[BoundValue]:
    """Robin upper bounds; for negative sigma they coincide with eq:EECor / eq:ESE."""
    if sigma_sign == "mixed":
        raise NotApplicable("Robin bounds need a one-signed sigma")
    d, k, vol = inp.d, inp.k, inp.volume
    if sigma_sign in ("negative", "nonpositive"):
        single, total = ubnbc_upper(inp), ese_sum_upper(inp)
        flag = ("robin-", "all-eigenvalues-positive")
        return [replace(single, applicability=flag), replace(total, applicability=flag)]
    ar = inp.measures.boundary_area
    single = (d + 2) / (d * vol) * (inp.a_l2_sq + inp.v_l1 + d * ar * inp.sigma_sup) + kdk(inp)
    total = (cdk(inp) + k * k * ar / vol * inp.sigma_sup + k * k * inp.a_l2_sq / vol
             + k * inp.v_l1 / vol)
    return [BoundValue("eq:EEHRCor", single, "upper-for-single", k, ("robin+",)),
            BoundValue("eq:slR", total, "upper-for-sum", k, ("robin+",))]


def flm_quotient_bounds(inp: BoundInputs) -> tuple[float, float]:
    """Upper bounds on lambda_{k+1} / lambda_1 (first is better for small k)."""
    d, k = inp.d, inp.k
    H = h_d_constant(d)
    b1 = 1 + ((d + 2) / 2 * H * k) ** (2 / d)
    b2 = (1 + 4 / d) * (1 + d / (d + 2) * (H * k) ** (2 / d))
    return b1, b2


def ppw_gap_bound(partial_sum: float, k: int, d: int) -> float:
    """lambda_{k+1} - lambda_k <= (4/d) (1/k) sum_{j<=k} lambda_j."""
    return 4.0 / d * partial_sum / k


def melas_lower(inp: BoundInputs) -> BoundValue:
    """sum mu_j >= C_{d,k} + M_d Vol / I(Omega) k."""
    val = cdk(inp) + inp.melas_constant * inp.volume / inp.measures.inertia * inp.k
    return BoundValue("eq:Melas", val, "lower-for-sum", inp.k, ("dirichlet", "A=0"))


def constants_row(inp: BoundInputs) -> dict:
    """All scalar constants for one (k, convention); no spectrum needed."""
    return {
        "k": inp.k,
        "convention": inp.convention,
        "W": weyl_bound(inp),
        "C": cdk(inp),
        "K": kdk(inp),
        "H_d": h_d_constant(inp.d) if inp.d >= 2 else float("nan"),
        "M": mean_potential(inp),
        "Ar_over_Vol": specific_surface(inp),
        "I": inp.measures.inertia,
        "r2_radius": optimal_radius(inp),
    }


# -- the catalog -------------------------------------------------------------

@dataclass(frozen=True)
class ProblemContext:
    """What the verifier knows about the operator behind a spectrum."""

    d: int
    bc: str  # dirichlet | neumann | robin
    sigma_sign: str = "zero"
    a_zero: bool = True
    constant_field: bool = False
    v_zero: bool = True
    positive_spectrum: bool = True

    @property
    def robin_family(self) -> str | None:
        """robin+ for sigma >= 0; robin- for sigma <= 0 with a positive spectrum."""
        if self.bc != "robin":
            return None
        if self.sigma_sign in ("positive", "nonnegative"):
            return "robin+"
        if self.sigma_sign in ("negative", "nonpositive") and self.positive_spectrum:
            return "robin-"
        return None


@dataclass
class Evaluation:
    observed: float
    bound: float
    uncertainty: float


@dataclass(frozen=True)
class CatalogEntry:
    identifier: str
    side: str
    grade: str  # theorem | stated | conjecture | probe
    description: str
    applies: Callable[[ProblemContext], bool] = field(repr=False)
    evaluate: Callable = field(repr=False)
    needs_positive_ground_state: bool = False


def _entry_single(identifier, side, grade, description, applies, bound_fn, shifted):
    """Check on lambda_k (shifted=False) or lambda_{k+1} (shifted=True)."""
    def ev(inp, lam, unc, ctx):
        i = inp.k if shifted else inp.k - 1
        return Evaluation(lam[i], bound_fn(inp, ctx), unc[i])
    return CatalogEntry(identifier, side, grade, description, applies, ev)


def _entry_sum(identifier, side, grade, description, applies, bound_fn):
    def ev(inp, lam, unc, ctx):
        k = inp.k
        return Evaluation(float(np.sum(lam[:k])), bound_fn(inp, ctx), float(np.sum(unc[:k])))
    return CatalogEntry(identifier, side, grade, description, applies, ev)


def _entry_gap(identifier, grade, description, applies, bound_fn, telescoped):
    def ev(inp, lam, unc, ctx):
        k = inp.k
        lo = 0 if telescoped else k - 1
        return Evaluation(lam[k] - lam[lo], bound_fn(inp, ctx), unc[k] + unc[lo])
    return CatalogEntry(identifier, "upper-for-gap", grade, description, applies, ev)


def _ee_entry(identifier, applies, include_sigma):
    def ev(inp, lam, unc, ctx):
        k = inp.k
        partial = float(np.sum(lam[:k]))
        bound = prop_ee_upper(inp, partial, include_sigma=include_sigma)
        sens = prop_ee_sum_sensitivity(inp)
        return Evaluation(lam[k], bound, unc[k] + sens * float(np.sum(unc[:k])))
    return CatalogEntry(identifier, "upper-for-single", "stated",
                        "lambda_{k+1} <= inf_r variational quotient using sum_{j<=k} lambda_j",
                        applies, ev)


def _flm_entry():
    def ev(inp, lam, unc, ctx):
        k = inp.k
        q = lam[k] / lam[0]
        dq = unc[k] / abs(lam[0]) + abs(lam[k]) * unc[0] / lam[0] ** 2
        return Evaluation(q, min(flm_quotient_bounds(inp)), dq)
    return CatalogEntry("eq:FLM", "upper-for-quotient", "theorem",
                        "lambda_{k+1}/lambda_1 <= min of the two quotient bounds",
                        lambda c: c.bc == "dirichlet", ev, needs_positive_ground_state=True)


def _ppw_entry():
    def ev(inp, lam, unc, ctx):
        k = inp.k
        partial = float(np.sum(lam[:k]))
        bound = ppw_gap_bound(partial, k, inp.d)
        return Evaluation(lam[k] - lam[k - 1], bound,
                          unc[k] + unc[k - 1] + 4.0 / inp.d * float(np.sum(unc[:k])) / k)
    return CatalogEntry("eq:PPW", "upper-for-gap", "theorem",
                        "lambda_{k+1} - lambda_k <= (4/d) mean_{j<=k} lambda_j",
                        lambda c: c.bc == "dirichlet", ev)


def build_catalog(d: int) -> list[CatalogEntry]:
    """All catalog entries for dimension d (grades depend on d)."""
    dirichlet = lambda c: c.bc == "dirichlet"
    neumann = lambda c: c.bc == "neumann"
    robin_plus = lambda c: c.robin_family == "robin+"
    robin_minus = lambda c: c.robin_family == "robin-"
    no_bc = lambda c: neumann(c) or robin_minus(c)
    lb_grade = "probe" if d >= 3 else "stated"

    def lb_sum(inp, ctx):
        return lb_bounds(inp)[0].value

    def lb_single(inp, ctx):
        return lb_bounds(inp)[1].value

    entries = [
        _entry_sum("eq:LY", "lower-for-sum", "theorem",
                   "sum_{j<=k} lambda_j >= C_{d,k}",
                   lambda c: dirichlet(c) and (c.a_zero or c.constant_field),
                   lambda inp, ctx: cdk(inp)),
        _entry_sum("eq:LY", "lower-for-sum", "stated",
                   "Robin: sum_{j<=k} lambda_j >= C_{d,k}",
                   lambda c: robin_plus(c) or robin_minus(c),
                   lambda inp, ctx: cdk(inp)),
        _entry_single("eq:LYbound", "lower-for-single", "theorem",
                      "lambda_k >= d/(d+2) W_{d,k}",
                      lambda c: dirichlet(c) and (c.a_zero or c.constant_field),
                      lambda inp, ctx: inp.d / (inp.d + 2) * weyl_bound(inp), shifted=False),
        _entry_single("eq:LYbound", "lower-for-single", "stated",
                      "Robin: lambda_k >= d/(d+2) W_{d,k}",
                      lambda c: robin_plus(c) or robin_minus(c),
                      lambda inp, ctx: inp.d / (inp.d + 2) * weyl_bound(inp), shifted=False),
        _entry_sum("eq:Melas", "lower-for-sum", "theorem",
                   "sum_{j<=k} lambda_j >= C_{d,k} + M_d Vol/I k",
                   lambda c: dirichlet(c) and c.a_zero,
                   lambda inp, ctx: melas_lower(inp).value),
        _entry_single("eq:Polya:D", "lower-for-single", "conjecture", "lambda_k >= W_{d,k}",
                      lambda c: dirichlet(c) and c.a_zero,
                      lambda inp, ctx: weyl_bound(inp), shifted=False),
        _entry_single("eq:Polya:N", "upper-for-single", "conjecture", "lambda_{k+1} <= W_{d,k}",
                      lambda c: neumann(c) and c.a_zero and c.v_zero,
                      lambda inp, ctx: weyl_bound(inp), shifted=True),
        _entry_sum("eq:Kroeger", "upper-for-sum", "theorem", "sum_{j<=k} lambda_j <= C_{d,k}",
                   lambda c: neumann(c) and c.a_zero and c.v_zero,
                   lambda inp, ctx: cdk(inp)),
        _entry_single("eq:Kdk", "upper-for-single", "theorem", "lambda_{k+1} <= K_{d,k}",
                      lambda c: neumann(c) and c.a_zero and c.v_zero,
                      lambda inp, ctx: kdk(inp), shifted=True),
        _ee_entry("eq:EE", no_bc, include_sigma=False),
        _ee_entry("prop:EEHR", robin_plus, include_sigma=True),
        _entry_single("eq:EECor", "upper-for-single", "stated",
                      "lambda_{k+1} <= (d+2)/(d Vol)(||A||^2+||V||_1) + K_{d,k}",
                      no_bc, lambda inp, ctx: ubnbc_upper(inp).value, shifted=True),
        _entry_sum("eq:ESE", "upper-for-sum", "stated",
                   "sum_{j<=k} lambda_j <= C_{d,k} + k^2 ||A||^2/Vol + k ||V||_1/Vol",
                   no_bc, lambda inp, ctx: ese_sum_upper(inp).value),
        _entry_single("eq:EEHRCor", "upper-for-single", "stated",
                      "Robin sigma>0: lambda_{k+1} <= (d+2)/(d Vol)(||A||^2+||V||_1+d Ar ||sigma||) + K",
                      robin_plus, lambda inp, ctx: robin_bounds(inp, "positive")[0].value,
                      shifted=True),
        _entry_sum("eq:slR", "upper-for-sum", "stated",
                   "Robin sigma>0: sum <= C + k^2 Ar/Vol ||sigma|| + k^2 ||A||^2/Vol + k ||V||_1/Vol",
                   robin_plus, lambda inp, ctx: robin_bounds(inp, "positive")[1].value),
        _entry_sum("eq:lam0sum", "lower-for-sum", lb_grade,
                   "sum_{j<=k} lambda_j >= d/(d+2) k^{d/2} W_{d,k}",
                   lambda c: c.a_zero and (dirichlet(c) or robin_plus(c) or robin_minus(c)),
                   lb_sum),
        _entry_single("eq:lamlow", "lower-for-single", lb_grade,
                      "lambda_k >= d/(d+2) k^{d/2-1} W_{d,k}",
                      lambda c: c.a_zero and (dirichlet(c) or robin_plus(c) or robin_minus(c)),
                      lb_single, shifted=False),
        _entry_gap("eq:HVgap1", "stated", "lambda_{k+1} - lambda_k <= K - d/(d+2)k^{d/2-1}W_{k+1} + (d+2)/d M",
                   lambda c: c.a_zero and (dirichlet(c) or neumann(c) or robin_minus(c)),
                   lambda inp, ctx: gap_bounds(inp)[0].value, telescoped=False),
        _entry_gap("eq:HVgap2", "stated", "lambda_{k+1} - lambda_1 <= k x (eq:HVgap1 right side)",
                   lambda c: c.a_zero and (dirichlet(c) or neumann(c) or robin_minus(c)),
                   lambda inp, ctx: gap_bounds(inp)[1].value, telescoped=True),
        _entry_gap("eq:lk+1R", "stated", "Robin sigma>0 adjacent gap, A = 0",
                   lambda c: c.a_zero and robin_plus(c),
                   lambda inp, ctx: gap_bounds(inp, robin=True)[0].value, telescoped=False),
        _entry_gap("eq:lk+1R:sum", "stated", "Robin sigma>0 telescoped gap, A = 0",
                   lambda c: c.a_zero and robin_plus(c),
                   lambda inp, ctx: gap_bounds(inp, robin=True)[1].value, telescoped=True),
        _entry_gap("rem:ELV:gap", "stated", "constant field adjacent gap",
                   lambda c: c.constant_field and c.bc in ("dirichlet", "neumann")
                   or (c.constant_field and c.robin_family is not None),
                   lambda inp, ctx: gap_bounds(inp, constant_field=True,
                                               robin=ctx.robin_family == "robin+")[0].value,
                   telescoped=False),
        _entry_gap("rem:ELV:gap-sum", "stated", "constant field telescoped gap",
                   lambda c: c.constant_field and c.bc in ("dirichlet", "neumann")
                   or (c.constant_field and c.robin_family is not None),
                   lambda inp, ctx: gap_bounds(inp, constant_field=True,
                                               robin=ctx.robin_family == "robin+")[1].value,
                   telescoped=True),
        _entry_sum("rem:ELV:sum", "lower-for-sum", "stated",
                   "constant field: sum_{j<=k} lambda_j >= d/(d+2) k W_{d,k+1}",
                   lambda c: dirichlet(c) and c.constant_field,
                   lambda inp, ctx: inp.d / (inp.d + 2) * inp.k * weyl_bound(inp, inp.k + 1)),
        _entry_single("rem:ELV:single", "lower-for-single", "stated",
                      "constant field: lambda_k >= d/(d+2) W_{d,k+1}",
                      lambda c: dirichlet(c) and c.constant_field,
                      lambda inp, ctx: inp.d / (inp.d + 2) * weyl_bound(inp, inp.k + 1),
                      shifted=False),
        _flm_entry(),
        _ppw_entry(),
    ]
    return entries


def catalog_identifiers(d: int = 2) -> list[str]:
    return sorted({e.identifier for e in build_catalog(d)})
