import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clockdephasing import ticks
from clockdephasing.ticks import (
    Comb,
    Dirac,
    Empirical,
    Exponential,
    Gaussian,
    comb_characteristic_closed_form,
    load_empirical_csv,
)


def brute_comb_moments(n, eps):
    atoms = [k / (n * eps) for k in range(n)]
    mean = sum(atoms) / n
    return mean, sum((a - mean) ** 2 for a in atoms) / n


def test_simple_moments():
    assert Gaussian(math.pi, 0.1).moments() == (math.pi, 0.1 ** 2)
    assert Dirac(1.0).moments() == (1.0, 0.0)
    assert Exponential(2.0).moments() == (2.0, 4.0)


def test_comb_moments_match_atoms():
    mean, var = Comb(4, 1.0).moments()
    assert mean == pytest.approx(3 / 8, abs=1e-15)
    assert var == pytest.approx(5 / 64, abs=1e-15)
    assert (mean, var) == pytest.approx(brute_comb_moments(4, 1.0), abs=1e-15)


@pytest.mark.parametrize("n,eps", [(1, 1.0), (2, 0.3), (7, 2.5)])
def test_comb_moments_general(n, eps):
    assert Comb(n, eps).moments() == pytest.approx(brute_comb_moments(n, eps), rel=1e-12, abs=1e-15)


def test_empirical_moments():
    e = Empirical((1.0, 2.0, 4.0), (0.25, 0.5, 0.25))
    assert e.moments() == pytest.approx((2.25, 0.25 * 1.5625 + 0.5 * 0.0625 + 0.25 * 3.0625))


def test_accuracy_values():
    assert Gaussian(math.pi, math.pi).accuracy() == 1.0
    assert Dirac(3.0).accuracy() == math.inf
    n = Gaussian(100e-9, 0.530e-9).accuracy()
    assert 3.5e4 < n < 3.6e4
    assert n == pytest.approx((100 / 0.53) ** 2)


def test_accuracy_needs_positive_mean():
    with pytest.raises(ValueError):
        Gaussian(-1.0, 0.1).accuracy()
    with pytest.raises(ValueError):
        Comb(1, 1.0).accuracy()


def test_from_accuracy_roundtrip():
    g = Gaussian.from_accuracy(math.pi, 1234.5)
    assert g.accuracy() == pytest.approx(1234.5, rel=1e-14)
    assert Gaussian.from_accuracy(1.0, math.inf).sigma == 0.0


def test_gaussian_characteristic():
    g = Gaussian(2.0, 0.7)
    omega = np.linspace(-5, 5, 21)
    assert np.allclose(g.characteristic(omega), np.exp(-0.5 * 0.49 * omega ** 2), atol=1e-15)
    assert np.allclose(g.dephasing_rate(omega), 0.5 * 0.49 * omega ** 2, atol=1e-15)


def test_dirac_characteristic():
    assert Dirac(1.0).characteristic(7.3) == 1.0
    assert Dirac(1.0).dephasing_rate(7.3) == 0.0


def test_exponential_characteristic_matches_integral():
    from scipy.integrate import quad

    tau, omega = 1.3, 0.8
    re = quad(lambda t: math.exp(-t / tau) / tau * math.cos(omega * (t - tau)), 0, math.inf)[0]
    im = quad(lambda t: -math.exp(-t / tau) / tau * math.sin(omega * (t - tau)), 0, math.inf)[0]
    assert abs(Exponential(tau).characteristic(omega) - complex(re, im)) < 1e-9


def test_comb_revivals_unit_magnitude():
    for n in (2, 3, 5):
        c = Comb(n, 1.0)
        for k in (-2, -1, 0, 1, 3):
            assert abs(abs(c.characteristic(2 * math.pi * n * k)) - 1.0) < 1e-15
        assert c.dephasing_rate(2 * math.pi * n) == pytest.approx(0.0, abs=1e-15)
        assert c.variance > 0


def test_comb_vanishes_between_revivals():
    # first zero of the Dirichlet ratio at Omega/eps = 2 pi
    assert abs(Comb(4, 1.0).characteristic(2 * math.pi)) < 1e-15
    assert Comb(4, 1.0).dephasing_rate(2 * math.pi) > 30


def test_empirical_matches_comb_closed_form():
    atoms = Comb(3, 1.0).atoms()
    emp = Empirical(tuple(atoms))
    omega = np.linspace(-40, 40, 50)
    brute = np.array(
        [sum(np.exp(-1j * w * (t - emp.mean)) for t in atoms) / 3 for w in omega]
    )
    assert np.abs(emp.characteristic(omega) - brute).max() < 1e-12
    assert np.abs(Comb(3, 1.0).characteristic(omega) - brute).max() < 1e-12
    uncentered = np.array([sum(np.exp(-1j * w * t) for t in atoms) / 3 for w in omega])
    assert np.abs(comb_characteristic_closed_form(3, 1.0, omega) - uncentered).max() < 1e-12


def test_closed_form_examples():
    assert comb_characteristic_closed_form(4, 1.0, 0.0) == 1.0
    for w in np.linspace(-20, 20, 17):
        assert abs(abs(comb_characteristic_closed_form(1, 0.5, w)) - 1) < 1e-15
    brute = sum(np.exp(-1j * 3.7 * k / 5) for k in range(5)) / 5
    assert abs(comb_characteristic_closed_form(5, 1.0, 3.7) - brute) < 1e-12


def test_closed_form_near_singularity():
    n, eps = 5, 1.0
    for w in (2 * math.pi * n * 2 + 1e-9, 2 * math.pi * n - 3e-8):
        brute = sum(np.exp(-1j * w * k / (n * eps)) for k in range(n)) / n
        assert abs(comb_characteristic_closed_form(n, eps, w) - brute) < 1e-12


@pytest.mark.parametrize("bad", [(0, 1.0), (3, 0.0), (2.5, 1.0)])
def test_comb_validation(bad):
    with pytest.raises(ValueError):
        Comb(*bad)


def test_distribution_validation():
    with pytest.raises(ValueError):
        Gaussian(1.0, -0.1)
    with pytest.raises(ValueError):
        Exponential(0.0)
    with pytest.raises(ValueError):
        Empirical((1.0, 2.0), (0.5, 0.6))
    with pytest.raises(ValueError):
        Empirical((1.0, 2.0), (1.5, -0.5))
    with pytest.raises(ValueError):
        Empirical(())


dists = st.one_of(
    st.builds(Dirac, st.floats(0.1, 10)),
    st.builds(Gaussian, st.floats(0.1, 10), st.floats(0, 3)),
    st.builds(Exponential, st.floats(0.1, 10)),
    st.builds(Comb, st.integers(1, 9), st.floats(0.1, 5)),
    st.builds(
        lambda t, w: Empirical(tuple(t), tuple(np.asarray(w) / np.sum(w))),
        st.lists(st.floats(0, 10), min_size=3, max_size=3),
        st.lists(st.floats(0.01, 1), min_size=3, max_size=3),
    ),
)


@settings(max_examples=200, deadline=None)
@given(dist=dists, omega=st.floats(-100, 100))
def test_characteristic_bounded_and_hermitian(dist, omega):
    phi = dist.characteristic(omega)
    assert abs(phi) <= 1 + 1e-12
    assert abs(dist.characteristic(-omega) - np.conj(phi)) < 1e-12
    assert dist.characteristic(0.0) == pytest.approx(1.0, abs=1e-15)
    gamma = dist.dephasing_rate(omega)
    assert gamma >= 0
    # the Gaussian rate is evaluated analytically, so it can resolve gaps below rounding of |phi|
    if gamma == 0:
        assert abs(phi) >= 1.0
    if abs(phi) < 1.0:
        assert gamma > 0


@settings(max_examples=100, deadline=None)
@given(dist=dists)
def test_small_frequency_expansion(dist):
    var = dist.variance
    if var <= 1e-6:
        return
    omega = 1e-3 / math.sqrt(var)
    ratio = (1 - abs(dist.characteristic(omega))) / (var * omega ** 2 / 2)
    assert ratio == pytest.approx(1.0, abs=0.01)


@settings(max_examples=50, deadline=None)
@given(sigma=st.floats(0.01, 5), a=st.floats(0, 50), b=st.floats(0, 50))
def test_gaussian_rate_monotone(sigma, a, b):
    g = Gaussian(1.0, sigma)
    if a < b:
        assert g.dephasing_rate(-a) <= g.dephasing_rate(b)
        if b - a > 1e-6 * b:
            assert g.dephasing_rate(a) < g.dephasing_rate(b) or g.dephasing_rate(b) == 0


def test_comb_unit_magnitude_only_at_revivals():
    for n in (2, 3, 5):
        grid = np.arange(-3 * 8 * n, 3 * 8 * n + 1) * (2 * math.pi / 8)
        mag = np.abs(Comb(n, 1.0).characteristic(grid))
        revival = np.isclose(np.mod(grid / (2 * math.pi * n) + 0.5, 1.0), 0.5, atol=1e-12)
        assert np.all(mag[revival] == pytest.approx(1.0, abs=1e-15))
        assert np.all(mag[~revival] < 1 - 1e-6)


def test_sample_dirac(rng):
    assert Dirac(2.0).sample(rng) == 2.0
    assert np.all(Dirac(2.0).sample(rng, 10) == 2.0)


def test_sample_gaussian_statistics(rng):
    x = Gaussian(math.pi, 0.2).sample(rng, 1_000_000)
    assert abs(x.mean() - math.pi) < 5 * 0.2 / 1e3
    # variance of the sample variance is 2 sigma^4 / M
    assert abs(x.var() - 0.04) < 5 * math.sqrt(2) * 0.04 / 1e3


def test_sample_comb_frequencies(rng):
    x = Comb(2, 1.0).sample(rng, 1_000_000)
    assert set(np.unique(x)) == {0.0, 0.5}
    assert abs((x == 0).mean() - 0.5) < 0.002


@pytest.mark.parametrize(
    "dist", [Exponential(1.5), Comb(5, 0.7), Empirical((0.0, 1.0, 3.0), (0.2, 0.3, 0.5))]
)
def test_sample_moments(dist, rng):
    m = 1_000_000
    x = dist.sample(rng, m)
    mean, var = dist.moments()
    assert abs(x.mean() - mean) < 5 * math.sqrt(var / m)
    fourth = np.mean((x - mean) ** 4)
    assert abs(x.var() - var) < 5 * math.sqrt((fourth - var ** 2) / m)


def test_module_wrappers(rng):
    g = Gaussian(1.0, 0.5)
    assert ticks.moments(g) == g.moments()
    assert ticks.accuracy(g) == 4.0
    assert ticks.centered_characteristic(g, 2.0) == g.characteristic(2.0)
    assert ticks.dephasing_rate(g, 2.0) == 0.5
    assert np.shape(ticks.sample(g, rng, 3)) == (3,)


def test_load_csv(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("time_seconds,weight\n1e-9,0.5\n2e-9,0.5000004\n")
    e = load_empirical_csv(p)
    assert e.times == (1e-9, 2e-9)
    assert sum(e.weights) == pytest.approx(1.0, abs=1e-15)


def test_load_csv_rejects(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("1.0,0.5\n2.0,0.4\n")
    with pytest.raises(ValueError):
        load_empirical_csv(p)
    p.write_text("1.0,0.5\nfoo,0.5\n")
    with pytest.raises(ValueError):
        load_empirical_csv(p)
