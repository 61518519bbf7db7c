import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from sl2harmonic import (DomainError, PoleError, c_function, decay_profile, hyp2f1, phi,
                         phi_big, phi_near_one)
from sl2harmonic.spherical import nu_remainder

mpmath.mp.dps = 30


def phi_oracle(m, s, r):
    x = mpmath.tanh(r) ** 2
    val = mpmath.cosh(r) ** (-1 - 2 * s) * mpmath.hyp2f1((1 + m) / 2 + s, (1 - m) / 2 + s, 1, x)
    return complex(val)


def test_phi_at_origin():
    for m in (0, 1, 5):
        for s in (0.3, 2 + 1j, -4j):
            assert phi(m, s, 0.0) == 1.0


@settings(max_examples=40, deadline=None)
@given(st.integers(-6, 6), st.floats(-0.9, 0.9), st.floats(-8, 8), st.floats(0, 4))
def test_phi_against_mpmath(m, x, y, r):
    s = complex(x, y)
    ref = phi_oracle(m, mpmath.mpc(x, y), mpmath.mpf(r))
    assert abs(phi(m, s, r) - ref) <= 1e-9 * max(1.0, abs(ref))


@settings(max_examples=60, deadline=None)
@given(st.integers(-6, 6), st.floats(-1, 1), st.floats(-6, 6), st.floats(0, 5))
def test_phi_symmetries(m, x, y, r):
    s = complex(x, y)
    v = phi(m, s, r)
    assert abs(phi(-m, s, r) - v) <= 1e-12 * max(1, abs(v))
    assert abs(phi(m, -s, r) - v) <= 1e-12 * max(1, abs(v))
    assert abs(v) <= phi(0, abs(x), r).real * (1 + 1e-9) + 1e-14


def test_phi_forms_agree():
    rng = np.random.default_rng(3)
    for _ in range(100):
        m = int(rng.integers(-5, 6))
        s = complex(rng.uniform(-1, 1), rng.uniform(-4, 4))
        r = rng.uniform(0.01, 0.8)
        ref = phi(m, s, r, method="tanh")
        assert abs(phi(m, s, r, method="sinh") - ref) <= 1e-10 * max(1, abs(ref))
        if r >= 0.1:
            assert abs(phi_near_one(m, s, r) - ref) <= 1e-10 * max(1, abs(ref))
    for r in (1.0, 3.0, 8.0):
        ref = phi(3, 0.2 + 1j, r)
        assert abs(phi_near_one(3, 0.2 + 1j, r) - ref) <= 1e-10 * max(1, abs(ref))


def test_connection_identity_suite():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        m = int(rng.integers(-6, 7))
        s = complex(rng.uniform(-1.2, 1.2), rng.uniform(-5, 5))
        if abs(2 * s - round(2 * s.real)) < 1e-3:
            continue
        r = rng.uniform(0.1, 5.0)
        rhs = c_function(m, s) * phi_big(m, s, r) + c_function(m, -s) * phi_big(m, -s, r)
        ref = phi_oracle(m, mpmath.mpc(s.real, s.imag), mpmath.mpf(r))
        worst = max(worst, abs(rhs - ref) / max(1.0, abs(ref)))
    assert worst <= 1e-8


def test_phi_big_routes_and_errors():
    for m, s, r in [(0, 0.3 + 2j, 0.3), (3, -0.2 + 1j, 0.2), (4, 0.1 - 0.5j, 1.2)]:
        q = phi_big(m, s, r, method="q")
        assert abs(phi_big(m, s, r, method="series") - q) <= 1e-10 * abs(q)
    with pytest.raises(PoleError):
        phi_big(0, 1.0, 1.0)
    with pytest.raises(DomainError):
        phi_big(0, 0.3j, 0.0)


def test_phi_big_m0_series_oracle():
    s, r = 0.25, 3.0
    x = 1 / np.cosh(r) ** 2
    a_, b_, c_ = 0.5 - s, 0.5 - s, 1 - 2 * s
    term, total = 1.0, 1.0
    for k in range(50):
        term *= (a_ + k) * (b_ + k) / ((c_ + k) * (k + 1)) * x
        total += term
    ref = (2 * np.cosh(r)) ** (2 * s - 1) * total
    assert phi_big(0, s, r) == pytest.approx(ref, rel=1e-13)


def test_phi_big_leading_behavior():
    for m, s in [(0, -0.3 + 1j), (5, 0.2 + 3j)]:
        vals = [abs(phi_big(m, s, r) * np.exp((1 - 2 * s) * r) - 1) for r in (5, 10, 20)]
        assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-6


def test_nu_remainder():
    assert abs(nu_remainder(0, -0.5 + 0.3j, 5.0)) < 0.1
    for m in (0, 3, 6):
        rng = np.random.default_rng(m)
        s = -rng.uniform(0.01, 3, 200) + 1j * rng.uniform(-20, 20, 200)
        r = rng.uniform(0.1, 6, 200)
        assert np.isfinite(np.abs(nu_remainder(m, s, r))).all()
        assert np.abs(nu_remainder(m, s, r)).max() < 50
        tail = np.abs(nu_remainder(m, -0.2 + 1j, np.array([4.0, 8.0, 16.0])))
        assert tail[0] > tail[1] > tail[2]


def test_decay_profile():
    assert decay_profile(0, 0) == decay_profile(3, 0)
    assert decay_profile(0, 0).rate == -1 and decay_profile(0, 0).power == 1
    assert decay_profile(4, 1.5).rate == -4 and decay_profile(4, 1.5).regime == "discrete"
    assert decay_profile(2, 0.2 + 5j).rate == pytest.approx(-0.6)


@pytest.mark.parametrize("m,s", [(0, 0.0), (0, 0.3 + 2j), (4, 1.5), (4, 0.5), (5, 1.0),
                                  (3, 0.4 + 1j)])
def test_empirical_decay(m, s):
    d = decay_profile(m, s)
    r = np.linspace(2, 12, 21)
    log_ratio = np.log(np.abs(phi(m, s, r))) - d.rate * r - d.power * np.log1p(r)
    assert np.ptp(log_ratio) < 2.0


def test_discrete_terminates():
    # s in D_m: the tanh form is a polynomial of degree (|m| - 1 - 2|s|)/2 in tanh^2 r
    for m, s in [(4, 1.5), (4, 0.5), (7, 1.0), (7, 2.0)]:
        deg = int(round((m - 1 - 2 * s) / 2))
        x = np.linspace(0, 0.95, 40)
        r = np.arctanh(np.sqrt(x))
        poly = phi(m, s, r) * np.cosh(r) ** (1 + 2 * s)
        coef = np.polyfit(x, poly.real, deg + 2)
        assert np.abs(coef[:2]).max() < 1e-8


@pytest.mark.parametrize("m,s", [(6, 2.5), (4, 1.5), (7, 2.0)])
def test_discrete_l1_bound(m, s):
    # int |phi| omega_alpha <= C / (2|s| - alpha - 1) with C = |P(1)| 2^{1+2s} the
    # leading coefficient of phi at infinity
    edge = 2 * s - 1

    def integrand(r, alpha):
        # |phi| = cosh^{-1-2s} |P(tanh^2 r)| with P saturated beyond r = 15
        poly = abs(phi(m, s, min(r, 15.0))) * np.cosh(min(r, 15.0)) ** (1 + 2 * s)
        log_cosh = r + np.log1p(np.exp(-2 * r)) - np.log(2)
        log_haar = 2 * r + np.log1p(-np.exp(-4 * r))
        return poly * np.exp(alpha * r - (1 + 2 * s) * log_cosh + log_haar)

    scaled = []
    for alpha in edge - np.array([edge, 0.75 * edge, 0.5, 0.2, 0.1]):
        val, _ = quad(integrand, 0, 600, args=(alpha,), limit=400)
        scaled.append(val * (edge - alpha))
    const = abs(hyp2f1((1 + m) / 2 + s, (1 - m) / 2 + s, 1, 1 - 1e-15)) * 2 ** (1 + 2 * s)
    assert max(scaled) <= const * (1 + 1e-8)
    assert np.all(np.diff(scaled) > 0) and scaled[-1] > 0.8 * const
