import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sl2harmonic import (DomainError, PreconditionError, SpectralCutoffs, approx_identity_gap,
                         approx_identity_symbol, convolve_at, forward_transform,
                         generator_reconstruct, heat_kernel, heat_pde_check, heat_symbol,
                         l1_weighted_norm, multiplier_synthesize, radial_grid, rational_symbol,
                         resolvent_kernel, resolvent_symbol)
from sl2harmonic.kernels import (_resolvent_closed, heat_laplace_values, heat_values,
                                 synthesize_values)

COARSE = radial_grid(r_max=10.0, h=2.0, order=4)


def sup_rel(a, b):
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.5])
@pytest.mark.parametrize("m", [0, 1, 4, 7])
def test_cutoff_invariants(alpha, m):
    cut = SpectralCutoffs(alpha, m)
    assert cut.alpha_m > cut.floor
    assert cut.alpha_m == pytest.approx(cut.floor + 1)
    assert cut.beta_m == pytest.approx(np.sqrt(cut.alpha_m + 0.25))
    assert cut.gamma_m == pytest.approx(np.sqrt(cut.alpha_m + 1.25))
    assert cut.beta_m < cut.gamma_m
    with pytest.raises(DomainError):
        SpectralCutoffs(alpha, m, alpha_m=cut.floor)


@given(st.floats(0.01, 5), st.floats(0.01, 5), st.complex_numbers(max_magnitude=10))
def test_semigroup_in_symbol_space(s1, t1, z):
    prod = heat_symbol(0, s1) * heat_symbol(0, t1)
    assert abs(prod(z) - heat_symbol(0, s1 + t1)(z)) <= 1e-12 * abs(heat_symbol(0, s1 + t1)(z))


def test_semigroup_in_space_m0():
    rho = np.array([0.0, 0.5, 1.0, 2.0])
    half = heat_kernel(0, 0.5)
    assert sup_rel(convolve_at(half, half, rho), heat_values(0, 1.0, rho)) <= 1e-2


def test_heat_pde_residual_and_order():
    r = np.linspace(0.0, 3.0, 13)
    res = [heat_pde_check(0, 1.0, dt, r) for dt in (4e-3, 2e-3, 1e-3)]
    assert res[-1] <= 1e-5
    assert res[0] / res[1] == pytest.approx(4.0, rel=0.1)
    assert res[1] / res[2] == pytest.approx(4.0, rel=0.1)


def test_heat_to_initial_data():
    # f = h_1, f * h_t = h_{1+t}: ||f * h_t - f|| shrinks as t halves
    f = heat_kernel(0, 1.0)
    gaps = [l1_weighted_norm(f.with_values(heat_values(0, 1 + t, f.r) - f.values))
            for t in (1.0, 0.5, 0.25, 0.125)]
    assert np.all(np.diff(gaps) < 0)


def test_resolvent_symbol_check():
    for m in (0, 4):
        cut = SpectralCutoffs(0.0, m)
        zeta = cut.gamma_m + 1
        rz = resolvent_kernel(m, zeta, cut)
        lam = np.linspace(0, 6, 13)
        assert sup_rel(forward_transform(rz, 1j * lam), 1 / (zeta ** 2 + lam ** 2)) <= 1e-4


def test_resolvent_real_axis_norm():
    for m in (0, 4):
        cut = SpectralCutoffs(0.0, m)
        zetas = cut.gamma_m + np.array([0.5, 2.0, 5.0, 10.0])
        c = [l1_weighted_norm(resolvent_kernel(m, z, cut)) * (z * z - cut.beta_m ** 2) for z in zetas]
        assert max(c) / min(c) < 3.0


def test_resolvent_polynomial_bound():
    cut = SpectralCutoffs(0.0, 0)
    ys = np.array([0.0, 10.0, 25.0, 50.0])
    q = [l1_weighted_norm(resolvent_kernel(0, cut.gamma_m + 1j * y, cut)) / (1 + abs(cut.gamma_m + 1j * y)) ** 4
         for y in ys]
    assert max(q) <= 1.01 * q[0]


def test_resolvent_routes_agree():
    cut = SpectralCutoffs(0.0, 0)
    r = np.array([0.1, 0.3, 1.0, 2.5])
    for zeta in cut.gamma_m + np.array([0.5, 2.0, 5.0]):
        lap = heat_laplace_values(0, zeta ** 2 - 0.25, r, cut.alpha_m)
        con = _resolvent_closed(0, zeta, r)
        assert np.max(np.abs(lap / con - 1)) <= 1e-4


def test_resolvent_forbidden_strip():
    cut = SpectralCutoffs(0.0, 4)
    with pytest.raises(DomainError):
        resolvent_kernel(4, cut.gamma_m - 0.1, cut)
    with pytest.raises(DomainError):
        resolvent_kernel(4, cut.gamma_m + 1 + 1j, cut, method="laplace")


def test_first_resolvent_identity():
    m = 0
    cut = SpectralCutoffs(0.0, m)
    z, w = cut.gamma_m + 0.5, cut.gamma_m + 2.0 + 1.0j
    rz, rw = resolvent_symbol(m, z), resolvent_symbol(m, w)
    s = np.linspace(-0.5, 0.5, 7) + 1j * np.linspace(-20, 20, 7)
    lhs = rz(s) - rw(s)
    assert np.max(np.abs(lhs - (w * w - z * z) * rz(s) * rw(s))) <= 1e-15 * np.max(np.abs(lhs))
    r = np.array([0.5, 1.5, 3.0])
    direct = _resolvent_closed(m, z, r) - _resolvent_closed(m, w, r)
    prod = synthesize_values((rz * rw).scaled(w * w - z * z), r, 1.2, tol=1e-8)
    assert sup_rel(prod, direct) <= 1e-3


def test_certificate_for_heat():
    cut = SpectralCutoffs(0.0, 4)
    f, cert = multiplier_synthesize(heat_symbol(4, 1.0), 2 * cut.gamma_m, cut, grid=COARSE)
    assert np.isfinite(cert["certificate"]) and cert["computed_norm"] <= cert["certificate"]
    assert cert["C_m"] > 0


def test_resolvent_square_matches_convolution():
    m = 0
    cut = SpectralCutoffs(0.0, m)
    g = cut.gamma_m
    sq = rational_symbol(m, [1.0], [1.0, -2 * g * g, g ** 4])
    f, cert = multiplier_synthesize(sq, 2 * g - 0.2, cut, grid=COARSE, tol=1e-8)
    rho = np.array([0.05, 0.5, 1.0, 2.0])
    rg = resolvent_kernel(m, g, cut)
    conv = convolve_at(rg, rg, rho, n_theta=128, r_panels=24)
    assert sup_rel(f(rho), conv) <= 1e-2
    assert cert["computed_norm"] <= cert["certificate"]


def test_synthesis_uniqueness():
    cut = SpectralCutoffs(0.0, 1)
    psi = heat_symbol(1, 1.0) * resolvent_symbol(1, cut.gamma_m + 1)
    r = np.array([1.5, 3.0, 6.0])
    a = synthesize_values(psi, r, 0.8)
    b = synthesize_values(psi, r, 1.6)
    assert np.max(np.abs(a - b)) <= 1e-6 * np.max(np.abs(a))


def test_synthesis_rejections():
    cut = SpectralCutoffs(0.0, 0)
    with pytest.raises(DomainError):
        multiplier_synthesize(heat_symbol(0, 1.0), 0.9, cut)
    with pytest.raises(PreconditionError):
        multiplier_synthesize(resolvent_symbol(0, 1.2), 3.0, cut)


def test_approx_identity():
    cut = SpectralCutoffs(0.0, 4)
    g = cut.gamma_m
    psi = heat_symbol(4, 1.0)
    assert approx_identity_gap(psi, g + 1, 0, cut) == 0.0
    gaps = [approx_identity_gap(psi, z, 4, cut) for z in (g + 1, 2 * g, 4 * g, 8 * g)]
    assert np.all(np.diff(gaps) < 0)
    with pytest.raises(DomainError):
        approx_identity_gap(psi, g - 0.1, 4, cut)


def test_approx_identity_uniformly_bounded():
    cut = SpectralCutoffs(0.0, 0)
    certs = []
    for z in cut.gamma_m * np.array([1.2, 2.0, 4.0, 8.0]):
        _, cert = multiplier_synthesize(approx_identity_symbol(0, z, 4) * heat_symbol(0, 0.05),
                                        2 * cut.gamma_m, cut, grid=COARSE)
        certs.append(cert["computed_norm"])
    assert max(certs) / min(certs) < 2.0


def test_generator_truncation_and_linearity():
    cut = SpectralCutoffs(0.0, 0)
    target = approx_identity_symbol(0, cut.gamma_m + 1, 4) * heat_symbol(0, 0.1)
    direct, _ = multiplier_synthesize(target, 2 * cut.gamma_m, cut, grid=COARSE)
    errs = []
    # truncation levels kept above the synthesis noise floor (~1e-11)
    for y in (1.0, 2.0, 4.0, 8.0):
        rec = generator_reconstruct(target, cut, y_max=y, grid=COARSE)
        errs.append(l1_weighted_norm(direct.with_values(rec.values - direct.values)))
    assert np.all(np.diff(errs) < 0) and errs[-1] < 1e-6
    rec = generator_reconstruct(target, cut, y_max=20.0, grid=COARSE)
    rec3 = generator_reconstruct(target.scaled(3.0), cut, y_max=20.0, grid=COARSE)
    assert sup_rel(rec3.values, 3 * rec.values) <= 1e-12


def test_generator_rejects_slow_decay():
    cut = SpectralCutoffs(0.0, 0)
    with pytest.raises(PreconditionError):
        generator_reconstruct(approx_identity_symbol(0, cut.gamma_m + 1, 2), cut)
