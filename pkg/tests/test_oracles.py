import math

import numpy as np
import pytest
import scipy.linalg as sla

from spectral_gap_lab.oracles import (bessel_j, bessel_zero, disk_dirichlet_spectrum,
                                      interval_robin_spectrum, rectangle_spectrum,
                                      robin_interval_roots)

PI2 = math.pi**2


def test_dirichlet_square():
    s = rectangle_spectrum([1, 1], "dirichlet", 5)
    assert np.allclose(s.eigenvalues / PI2, [2, 5, 5, 8, 10], rtol=1e-14)
    assert s.source == "rectangle-dirichlet"


def test_neumann_square():
    s = rectangle_spectrum([1, 1], "neumann", 4)
    assert np.allclose(s.eigenvalues / PI2, [0, 1, 1, 2], atol=1e-14)


def test_labels_reproduce_values():
    s = rectangle_spectrum([1, 2], "dirichlet", 30)
    for val, (m, n) in zip(s.eigenvalues, s.labels):
        assert val == pytest.approx(PI2 * (m**2 + (n / 2) ** 2), rel=1e-14)
    assert np.all(np.diff(s.eigenvalues) >= 0)


def test_cube_enumeration():
    s = rectangle_spectrum([1, 1, 1], "dirichlet", 200)
    vals = sorted(l * l + m * m + n * n for l in range(1, 12) for m in range(1, 12)
                  for n in range(1, 12))[:200]
    assert np.allclose(s.eigenvalues, PI2 * np.array(vals), rtol=1e-14)


def test_robin_large_sigma_is_dirichlet():
    assert robin_interval_roots(1e6, 1.0, 1)[0] == pytest.approx(PI2, rel=1e-3)
    s = rectangle_spectrum([1, 1], "robin", 1, sigma=1e6)
    assert s.eigenvalues[0] == pytest.approx(2 * PI2, rel=1e-3)


def test_robin_zero_sigma_is_neumann():
    assert np.allclose(robin_interval_roots(0.0, 1.0, 3), [0, PI2, 4 * PI2])


def test_robin_root_against_dense_1d():
    # cell-centred 1D Robin Laplacian with second-order ghost elimination
    n, sigma = 2000, 1.0
    h = 1.0 / n
    main = np.full(n, 2.0)
    g = (1 - h * sigma / 2) / (1 + h * sigma / 2)
    main[0] -= g
    main[-1] -= g
    lam = sla.eigh_tridiagonal(main / h**2, np.full(n - 1, -1.0 / h**2),
                               select="i", select_range=(0, 0))[0][0]
    assert robin_interval_roots(sigma, 1.0, 1)[0] == pytest.approx(lam, rel=1e-4)


def test_robin_roots_solve_equation():
    sigma, L = 1.0, 1.0
    for lam in robin_interval_roots(sigma, L, 6):
        t = math.sqrt(lam)
        assert abs((t * t - sigma**2) * math.sin(t * L) - 2 * sigma * t * math.cos(t * L)) < 1e-10


def test_robin_negative_sigma_rejected():
    with pytest.raises(ValueError):
        robin_interval_roots(-1.0, 1.0, 2)


def test_interval_spectrum_source():
    assert interval_robin_spectrum(1.0, 1.0, 3).source == "interval-robin"


def test_interlacing():
    nu = rectangle_spectrum([1, 1.5], "neumann", 20).eigenvalues
    mu = rectangle_spectrum([1, 1.5], "dirichlet", 20).eigenvalues
    assert np.all(nu <= mu)


def test_robin_monotone_in_sigma():
    rows = [rectangle_spectrum([1, 1], "robin", 10, sigma=s).eigenvalues
            for s in (0, 0.5, 1, 2, 10)]
    assert np.all(np.diff(np.array(rows), axis=0) >= -1e-12)


def test_bessel_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    # J_{1/2}(x) = sqrt(2/(pi x)) sin x
    for x in (0.5, 3.0, 11.0, 20.0, 40.0):
        assert bessel_j(0.5, x) == pytest.approx(math.sqrt(2 / (math.pi * x)) * math.sin(x),
                                                 abs=1e-12)


@pytest.mark.parametrize("order", [0, 1, 2, 3, 4])
def test_bessel_against_reference(order):
    from scipy.special import jv
    xs = np.concatenate([np.linspace(0, 12, 61), np.linspace(15, 40, 26)])
    for x in xs:
        assert abs(bessel_j(order, x) - jv(order, x)) <= 1e-12
    # the series/asymptotic seam is slightly less accurate
    for x in np.linspace(12.0, 15.0, 31):
        assert abs(bessel_j(order, x) - jv(order, x)) <= 2e-12


def test_bessel_zeros():
    assert bessel_zero(0, 1) == pytest.approx(2.404825557695773, abs=1e-10)
    assert bessel_zero(1, 1) == pytest.approx(3.8317059702, abs=1e-8)
    assert bessel_zero(0.5, 2) == pytest.approx(2 * math.pi, abs=1e-10)


def test_disk_spectrum():
    s = disk_dirichlet_spectrum(1.0, 6)
    assert s.eigenvalues[0] == pytest.approx(5.7832, abs=1e-4)
    assert s.eigenvalues[0] == pytest.approx(bessel_zero(0, 1) ** 2, abs=1e-6)
    assert s.eigenvalues[1] == s.eigenvalues[2] == pytest.approx(14.6820, abs=1e-4)
    s2 = disk_dirichlet_spectrum(2.0, 6)
    assert np.allclose(s2.eigenvalues, s.eigenvalues / 4, rtol=1e-14)
