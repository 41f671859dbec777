"""Closed-form and transcendental-equation spectra used as ground truth."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SERIES_LIMIT = 12.0


@dataclass(frozen=True)
class AnalyticSpectrum:
    eigenvalues: np.ndarray
    labels: tuple
    source: str

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def residual_norms(self) -> np.ndarray:
        return np.zeros(len(self.eigenvalues))


def _bisect(f, lo, hi, flo=None):
    flo = f(lo) if flo is None else flo
    fhi = f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise RuntimeError(f"no sign change on [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- one-dimensional Robin problem -------------------------------------------

def robin_interval_roots(sigma: float, L: float, count: int) -> list[float]:
    """Eigenvalues t^2 of -u'' on [0, L] with u'(0) = sigma u(0), u'(L) = -sigma u(L).

    The roots solve tan(tL) = 2 sigma t / (t^2 - sigma^2); the k-th one lies in
    ((k-1) pi / L, k pi / L) and is isolated by bisection on
    (t^2 - sigma^2) sin(tL) - 2 sigma t cos(tL), which has no poles.
    """
    if sigma < 0:
        raise ValueError("robin_interval_roots requires sigma >= 0")
    if L <= 0 or count < 1:
        raise ValueError("need L > 0 and count >= 1")
    if sigma == 0:
        return [(k * math.pi / L) ** 2 for k in range(count)]

    def f(t):
        return (t * t - sigma * sigma) * math.sin(t * L) - 2 * sigma * t * math.cos(t * L)

    roots = []
    for k in range(1, count + 1):
        lo = (k - 1) * math.pi / L
        hi = k * math.pi / L
        if k == 1:
            lo = hi * 1e-12
        t = _bisect(f, lo, hi)
        roots.append(t * t)
    return roots


# -- separable rectangle spectra ---------------------------------------------

def _merge_sums(axis_values: Sequence[Sequence[float]], count: int):
    """First ``count`` sums sum_i axis_values[i][m_i], ascending, with index labels."""
    d = len(axis_values)
    start = (0,) * d
    heap = [(sum(v[0] for v in axis_values), start)]
    seen = {start}
    out = []
    while heap and len(out) < count:
        val, idx = heapq.heappop(heap)
        out.append((val, idx))
        for axis in range(d):
            nxt = list(idx)
            nxt[axis] += 1
            nxt = tuple(nxt)
            if nxt[axis] >= len(axis_values[axis]) or nxt in seen:
                continue
            seen.add(nxt)
            heapq.heappush(heap, (sum(axis_values[i][nxt[i]] for i in range(d)), nxt))
    return out


def rectangle_spectrum(lengths: Sequence[float], bc: str, count: int,
                       sigma: float = 0.0) -> AnalyticSpectrum:
    """Laplacian eigenvalues on a box with a uniform boundary condition.

    Labels are per-axis quantum numbers: m_i >= 1 for Dirichlet, m_i >= 0
    for Neumann, and the 0-based root index for Robin.
    """
    lengths = [float(L) for L in lengths]
    if count < 1:
        raise ValueError("count must be >= 1")
    if bc == "dirichlet":
        axis_values = [[(m * math.pi / L) ** 2 for m in range(1, count + 1)] for L in lengths]
        offset = 1
    elif bc == "neumann":
        axis_values = [[(m * math.pi / L) ** 2 for m in range(count)] for L in lengths]
        offset = 0
    elif bc == "robin":
        if sigma < 0:
            raise ValueError("Robin oracle requires sigma >= 0")
        axis_values = [robin_interval_roots(sigma, L, count) for L in lengths]
        offset = 0
    else:
        raise ValueError(f"unknown boundary condition {bc!r}")
    merged = _merge_sums(axis_values, count)
    vals = np.array([v for v, _ in merged])
    labels = tuple(tuple(i + offset for i in idx) for _, idx in merged)
    return AnalyticSpectrum(vals, labels, f"rectangle-{bc}")


def interval_robin_spectrum(sigma: float, L: float, count: int) -> AnalyticSpectrum:
    vals = robin_interval_roots(sigma, L, count)
    return AnalyticSpectrum(np.array(vals), tuple((k,) for k in range(count)), "interval-robin")


# -- Bessel functions --------------------------------------------------------

def _bessel_series(nu: float, x: float) -> float:
    if x == 0:
        return 1.0 if nu == 0 else 0.0
    half = 0.5 * x
    q = half * half
    term = half**nu / math.gamma(nu + 1)
    terms = [term]
    peak = abs(term)
    m = 0
    while m < 500:
        m += 1
        term *= -q / (m * (m + nu))
        terms.append(term)
        peak = max(peak, abs(term))
        if m > q and abs(term) < 1e-18 * peak:
            break
    return math.fsum(terms)


def _bessel_asymptotic(nu: float, x: float) -> float:
    mu = 4.0 * nu * nu
    omega = x - (0.5 * nu + 0.25) * math.pi
    P, Q = 0.0, 0.0
    a = 1.0
    prev = math.inf
    k = 0
    while True:
        # a_k(nu) / x^k with a_0 = 1
        if k > 0:
            a *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(a) > prev or k > 60:
            break
        prev = abs(a) if k > 0 else math.inf
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            P += sign * a
        else:
            Q += sign * a
        if a == 0.0 or abs(a) < 1e-17:
            break
        k += 1
    return math.sqrt(2.0 / (math.pi * x)) * (P * math.cos(omega) - Q * math.sin(omega))


def bessel_j(order: float, x: float) -> float:
    """J_order(x) for order >= 0, x >= 0: ascending series up to x = 12, Hankel expansion beyond."""
    if order < 0 or x < 0:
        raise ValueError("bessel_j needs order >= 0 and x >= 0")
    if x <= SERIES_LIMIT:
        return _bessel_series(float(order), float(x))
    return _bessel_asymptotic(float(order), float(x))


def _mcmahon(nu: float, n: int) -> float:
    mu = 4.0 * nu * nu
    beta = (n + 0.5 * nu - 0.25) * math.pi
    return beta - (mu - 1) / (8 * beta) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * beta) ** 3)


def _zeros_by_scan(nu: float, upper: float, step: float = 0.05) -> list[float]:
    f = lambda t: bessel_j(nu, t)
    zeros = []
    lo = max(step, 1e-8)
    flo = f(lo)
    while lo < upper:
        hi = lo + step
        fhi = f(hi)
        if fhi == 0 or (flo > 0) != (fhi > 0):
            zeros.append(_bisect(f, lo, hi, flo))
        lo, flo = hi, fhi
    return zeros


def bessel_zero(order: float, n: int) -> float:
    """n-th positive zero of J_order, by bisection from a McMahon bracket."""
    if order < 0 or n < 1:
        raise ValueError("bessel_zero needs order >= 0 and n >= 1")
    f = lambda t: bessel_j(order, t)
    guess = _mcmahon(order, n)
    lo, hi = guess - 0.4, guess + 0.4
    if lo > 0 and (f(lo) > 0) != (f(hi) > 0):
        # the bracket must hold exactly the n-th zero
        below = _zeros_by_scan(order, lo)
        if len(below) == n - 1:
            return _bisect(f, lo, hi)
    zeros = _zeros_by_scan(order, guess + (n + 2) * math.pi)
    return zeros[n - 1]


def disk_dirichlet_spectrum(R: float, count: int) -> AnalyticSpectrum:
    """Dirichlet eigenvalues (j_{s,n} / R)^2 of the disk; each s >= 1 mode is doubly degenerate."""
    if R <= 0 or count < 1:
        raise ValueError("need R > 0 and count >= 1")
    cutoff = 2.0 * math.sqrt(count) + 5.0
    while True:
        entries = []
        s = 0
        while True:
            zeros = [z for z in _zeros_by_scan(s, cutoff) if z <= cutoff]
            if not zeros:
                break
            for n, z in enumerate(zeros, start=1):
                z = bessel_zero(s, n) if s <= 6 else z
                entries.append((z * z, (s, n)))
                if s >= 1:
                    entries.append((z * z, (-s, n)))
            s += 1
        if len(entries) >= count:
            break
        cutoff *= 1.5
    entries.sort(key=lambda e: (e[0], abs(e[1][0]), e[1][0]))
    entries = entries[:count]
    vals = np.array([v / R**2 for v, _ in entries])
    return AnalyticSpectrum(vals, tuple(lab for _, lab in entries), "disk-dirichlet")
