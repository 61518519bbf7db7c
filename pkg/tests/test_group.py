import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sl2harmonic import (DomainError, GroupElement, Weight, a, cartan_decompose, haar_density,
                         iwasawa_decompose, k, n, op_norm, random_elements, weight_eval)

reals = st.floats(-3, 3, allow_nan=False)
angles = st.floats(0, 2 * np.pi, exclude_max=True)


def element(t, rr, th):
    return GroupElement.from_matrix(n(t) @ a(rr) @ k(th))


def test_identity_cartan():
    c = cartan_decompose(np.eye(2))
    assert (c.theta, c.r, c.psi) == (0.0, 0.0, 0.0)


def test_a2_cartan():
    c = cartan_decompose(a(2.0))
    assert c.theta == pytest.approx(0.0, abs=1e-14)
    assert c.r == pytest.approx(2.0, abs=1e-14)
    assert c.psi == pytest.approx(0.0, abs=1e-14)


def test_identity_and_n1_iwasawa():
    i = iwasawa_decompose(np.eye(2))
    assert (i.t, i.rr, i.theta) == (0.0, 0.0, 0.0)
    j = iwasawa_decompose(n(1.0))
    assert (j.t, j.rr, j.theta) == pytest.approx((1.0, 0.0, 0.0), abs=1e-14)


def test_round_trips_on_random_elements():
    mats = random_elements(np.random.default_rng(0), 10_000)
    worst_c = worst_i = 0.0
    for g in mats:
        c = cartan_decompose(g)
        assert 0 <= c.theta < 2 * np.pi and 0 <= c.psi < np.pi and c.r >= 0
        worst_c = max(worst_c, np.abs(c.matrix() - g).max() / np.abs(g).max())
        worst_i = max(worst_i, np.abs(iwasawa_decompose(g).matrix() - g).max() / np.abs(g).max())
    assert worst_c < 1e-10 and worst_i < 1e-10


@given(reals, reals, angles)
def test_op_norm_is_top_singular_value(t, rr, th):
    g = element(t, rr, th)
    assert op_norm(g) == pytest.approx(np.linalg.svd(g.matrix, compute_uv=False)[0], rel=1e-10)


@given(reals, reals, angles)
def test_inverse_has_same_radius(t, rr, th):
    g = element(t, rr, th)
    assert cartan_decompose(g.inverse()).r == pytest.approx(cartan_decompose(g).r, abs=1e-9)
    assert op_norm(g.inverse()) == pytest.approx(op_norm(g), rel=1e-10)


def test_op_norm_examples():
    assert op_norm(a(1.5)) == pytest.approx(4.481689070338065, rel=1e-14)
    assert op_norm(k(0.7)) == pytest.approx(1.0, abs=1e-14)


def test_haar_density():
    assert haar_density(0.0) == 0.0
    assert haar_density(1e-6) / 4e-6 == pytest.approx(1.0, rel=1e-10)
    assert haar_density(20.0) / np.exp(40.0) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(DomainError):
        haar_density(-0.1)


@settings(max_examples=50)
@given(reals, reals, angles, reals, reals, angles, st.floats(0, 3))
def test_weight_properties(t1, r1, h1, t2, r2, h2, alpha):
    w = Weight(alpha)
    x, y = element(t1, r1, h1), element(t2, r2, h2)
    assert w(x) >= 1.0
    assert w(x.inverse()) == pytest.approx(w(x), rel=1e-9)
    assert w(x @ y) <= w(x) * w(y) * (1 + 1e-9)


def test_weight_examples():
    assert weight_eval(Weight(0.0), element(1.0, 2.0, 0.3)) == 1.0
    assert weight_eval(Weight(2.0), a(1.0)) == pytest.approx(np.e ** 2, rel=1e-14)
    with pytest.raises(DomainError):
        Weight(-1.0)


def test_submultiplicative_on_random_pairs():
    rng = np.random.default_rng(1)
    xs, ys = random_elements(rng, 1000), random_elements(rng, 1000)
    for x, y in zip(xs, ys):
        assert op_norm(x @ y) <= op_norm(x) * op_norm(y) * (1 + 1e-10)


def test_unimodularity():
    g = GroupElement(1.0 + 1e-10, 0.0, 0.0, 1.0)
    assert g.a * g.d - g.b * g.c == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(DomainError):
        GroupElement(2.0, 0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        cartan_decompose(np.diag([2.0, 1.0]))
    with pytest.raises(DomainError):
        GroupElement(np.nan, 0.0, 0.0, 1.0)
