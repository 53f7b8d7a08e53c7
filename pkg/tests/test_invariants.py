import numpy as np
import pytest

import oracle_spot_values
from maxsurf.errors import DegeneratePointError, ValidityError
from maxsurf.holfun import parse
from maxsurf.invariants import (
    E_from_curvatures,
    beta_field,
    canonical_invariants,
    correspond_from_r42,
    correspond_to_r42,
    curvatures_from_normal,
    ellipse_axes,
    field_to_csv,
    general_invariants,
    geometric_mean_E,
    invariant_field,
    normal_from_curvatures,
    r31_field_to_csv,
    r31_invariants,
    read_field_csv,
)
from maxsurf.weierstrass import GridSpec, HolPair, HolTriple

ORACLE = {k: {n: float(v) for n, v in vals.items()} for k, vals in oracle_spot_values.spot_values().items()}
S2 = np.sqrt(2)


def _close(a, b, rel=1e-12):
    return abs(a - b) <= rel * max(abs(b), 1e-300)


def test_oracle_agrees_with_exact_fractions():
    a = ORACLE["z,2z@2"]
    assert _close(a["E"], 45 / 8) and _close(a["K"], 464 / 10125) and _close(a["kappa"], -336 / 10125)
    b = ORACLE["2+z,2exp(z)@0"]
    assert _close(b["K"], 80 / 81) and _close(b["kappa"], 16 / 27)
    assert _close(b["nu"], 2 * S2 / 3) and _close(b["mu"], 2 * S2 / 9) and _close(b["E"], 9 / 8)


@pytest.mark.parametrize(
    "pair,t,key",
    [(("z", "2*z"), 2.0, "z,2z@2"), (("2+z", "2*exp(z)"), 0.0, "2+z,2exp(z)@0")],
)
def test_canonical_spot_values(pair, t, key):
    inv = canonical_invariants(HolPair.parse(*pair), t)
    ref = ORACLE[key]
    for name in ("E", "K", "kappa", "nu", "mu"):
        assert _close(getattr(inv, name), ref[name]), name


def test_equal_generators_lie_in_hyperplane():
    inv = canonical_invariants(HolPair.parse("z^2+3", "z^2+3"), 1.2 + 0.4j)
    assert abs(inv.mu) <= 1e-12 * inv.nu and abs(inv.kappa) <= 1e-12 * inv.K


def test_canonical_invariants_errors():
    with pytest.raises(ValidityError):
        canonical_invariants(HolPair.parse("2+z", "3*z"), 0.1)
    with pytest.raises(DegeneratePointError):
        canonical_invariants(HolPair.parse("z^2", "2*z"), 0.0)


def test_general_invariants():
    E, K, kappa = general_invariants(HolTriple.parse("1", "z", "2*z"), 2.0)
    assert E == pytest.approx(45, rel=1e-14)
    E2, K2, kappa2 = general_invariants(HolTriple.parse("3", "z", "2*z"), 2.0)
    assert E2 == pytest.approx(9 * E) and K2 == pytest.approx(K / 9) and kappa2 == pytest.approx(kappa / 9)
    canon = HolTriple.parse("1/(2*sqrt(2))", "z", "2*z")
    Ec, Kc, kc = general_invariants(canon, 2.0 + 0.3j)
    ref = canonical_invariants(HolPair.parse("z", "2*z"), 2.0 + 0.3j)
    assert _close(Ec, ref.E) and _close(Kc, ref.K) and _close(kc, ref.kappa)


def test_curvature_conversions():
    assert curvatures_from_normal(1, 0) == (1, 0)
    assert curvatures_from_normal(2, 1) == (5, 4)
    K, kappa = curvatures_from_normal(2 * S2 / 3, 2 * S2 / 9)
    assert _close(K, 80 / 81) and _close(kappa, 16 / 27)
    assert normal_from_curvatures(1, 0) == (1, 0)
    assert normal_from_curvatures(5, 4) == pytest.approx((2, 1), rel=1e-15)
    nu, mu = normal_from_curvatures(5, 3)
    assert _close(nu, (np.sqrt(8) + S2) / 2) and _close(mu, (np.sqrt(8) - S2) / 2)
    assert E_from_curvatures(1, 0) == 1
    assert E_from_curvatures(5, 3) == pytest.approx(0.5, rel=1e-15)
    with pytest.raises(ValueError):
        normal_from_curvatures(1, 1)
    with pytest.raises(ValueError):
        curvatures_from_normal(1, 1)


def test_conversion_roundtrip_random():
    rng = np.random.default_rng(5)
    nu = rng.uniform(0.1, 3, 500)
    mu = nu * rng.uniform(-0.99, 0.99, 500)
    K, kappa = curvatures_from_normal(nu, mu)
    nu2, mu2 = normal_from_curvatures(K, kappa)
    np.testing.assert_allclose(nu2, nu, rtol=1e-12)
    np.testing.assert_allclose(mu2, mu, rtol=1e-10, atol=1e-12 * np.max(nu))


def test_E_from_curvatures_matches_canonical():
    inv = canonical_invariants(HolPair.parse("z", "2*z"), 2.0)
    assert abs(E_from_curvatures(inv.K, inv.kappa) - 45 / 8) <= 1e-10


@pytest.mark.parametrize("pair", [("z", "2*z"), ("2+z", "2*exp(z)"), ("exp(z)", "z^3+2")])
def test_sample_invariants_on_grid(pair):
    grid = GridSpec(1.5, 2.5, 0, 1, 21, 21) if pair[0] != "2+z" else GridSpec(-0.2, 0.2, -0.2, 0.2, 11, 11)
    inv = canonical_invariants(HolPair.parse(*pair), grid.points(), strict=False)
    np.testing.assert_allclose(inv.K, inv.nu**2 + inv.mu**2, rtol=1e-12)
    np.testing.assert_allclose(inv.kappa, 2 * inv.nu * inv.mu, rtol=1e-12)
    np.testing.assert_allclose(inv.E, 1 / np.sqrt(inv.nu**2 - inv.mu**2), rtol=1e-12)
    assert np.all(inv.K > np.abs(inv.kappa)) and np.all(inv.nu > np.abs(inv.mu))


def test_ellipse_axes():
    p = HolPair.parse("z", "2*z")
    major, minor = ellipse_axes(p, 2.0)
    assert _close(major, ORACLE["z,2z@2"]["nu"]) and _close(minor, -ORACLE["z,2z@2"]["mu"])
    major, minor = ellipse_axes(HolPair.parse("z^2+3", "z^2+3"), 1 + 1j)
    assert minor <= 1e-12 * major
    major, minor = ellipse_axes(HolPair.parse("z^2", "2*z"), 0.0)
    assert major == minor


def test_r31_invariants():
    E, nu = r31_invariants(parse("z"), 2.0)
    assert nu == pytest.approx(4 / 9) and E == pytest.approx(9 / 4)
    E, nu = r31_invariants(parse("2*z"), 1.0)
    assert nu == pytest.approx(16 / 9) and E == pytest.approx(9 / 16)
    t = np.array([2 + 1j, 3 - 0.5j, 1.5j])
    E, nu = r31_invariants(parse("exp(z) + z"), t)
    np.testing.assert_allclose(E * nu, 1, rtol=1e-12)
    with pytest.raises(DegeneratePointError):
        r31_invariants(parse("z^2"), 0.0)


def test_correspondence():
    assert correspond_to_r42(3, 3) == (9, 0)
    assert correspond_to_r42(1, 4) == (5, 3)
    assert correspond_from_r42(5, 3) == pytest.approx((1, 4), rel=1e-15)
    assert correspond_from_r42(1, 0) == (1, 1)
    rng = np.random.default_rng(8)
    nu1, nu2 = rng.uniform(0.01, 5, 100), rng.uniform(0.01, 5, 100)
    back = correspond_from_r42(*correspond_to_r42(nu1, nu2))
    np.testing.assert_allclose(back[0], nu1, rtol=1e-12)
    np.testing.assert_allclose(back[1], nu2, rtol=1e-12)
    with pytest.raises(ValueError):
        correspond_to_r42(0, 1)


def test_correspondence_matches_canonical_pointwise():
    g1, g2 = parse("2+z"), parse("2*exp(z)")
    t = np.array([0, 0.1 + 0.05j, -0.1j])
    _, nu1 = r31_invariants(g1, t)
    _, nu2 = r31_invariants(g2, t)
    K, kappa = correspond_to_r42(nu1, nu2)
    inv = canonical_invariants(HolPair(g1, g2), t)
    np.testing.assert_allclose(K, inv.K, rtol=1e-10)
    np.testing.assert_allclose(kappa, inv.kappa, rtol=1e-10)


def test_geometric_mean():
    assert geometric_mean_E(1, 1) == 1
    assert geometric_mean_E(9 / 4, 9 / 16) == pytest.approx(9 / 8)
    E1, _ = r31_invariants(parse("2+z"), 0.0)
    E2, _ = r31_invariants(parse("2*exp(z)"), 0.0)
    inv = canonical_invariants(HolPair.parse("2+z", "2*exp(z)"), 0.0)
    assert abs(geometric_mean_E(E1, E2) - inv.E) <= 1e-12
    with pytest.raises(ValueError):
        geometric_mean_E(-1, 1)


def test_invariant_field_mask_and_degenerate_points():
    inv = invariant_field(HolPair.parse("z", "2*z"), GridSpec(1.5, 2.5, 0, 1, 11, 11))
    assert inv.valid.all() and inv.degenerate == []
    inv = invariant_field(HolPair.parse("z^2", "2*z"), GridSpec(-0.5, 0.5, -0.5, 0.5, 11, 11))
    assert not inv.valid[5, 5]
    assert len(inv.degenerate) == 1 and abs(inv.degenerate[0]) < 1e-10


def test_beta_vanishes_in_hyperplane_case():
    inv = invariant_field(HolPair.parse("z^2+3", "z^2+3"), GridSpec(1, 2, 0, 1, 21, 21))
    beta, mask = beta_field(inv)
    assert mask.sum() == 19 * 19
    assert np.nanmax(np.abs(beta)) < 1e-8


def _ricci_residual(h):
    grid = GridSpec.square_cells(1.5, 2.5, 0, 1, h)
    inv = invariant_field(HolPair.parse("z", "2*z"), grid)
    beta, mask = beta_field(inv)
    from maxsurf.invariants import d_dtbar

    res = np.imag(d_dtbar(beta, h)) + inv.E * inv.nu * inv.mu / 2
    return res, grid


def test_ricci_identity_converges_quadratically():
    r1, g1 = _ricci_residual(1 / 32)
    r2, _ = _ricci_residual(1 / 64)
    coarse = r1
    fine = r2[::2, ::2]
    both = np.isfinite(coarse) & np.isfinite(fine)
    ratio = np.max(np.abs(coarse[both])) / np.max(np.abs(fine[both]))
    assert 3.5 <= ratio <= 4.5
    assert np.nanmax(np.abs(r2)) < 1e-3


def test_field_csv_roundtrip():
    inv = invariant_field(HolPair.parse("z", "2*z"), GridSpec(1.5, 2.5, 0, 1, 5, 5))
    text = field_to_csv(inv)
    assert text.splitlines()[0] == "u,v,E,K,kappa,nu,mu,valid"
    cols = read_field_csv(text)
    assert cols["u"][1] == 1.75 and cols["v"][1] == 0
    row = np.flatnonzero((cols["u"] == 2.0) & (cols["v"] == 0.0))[0]
    assert cols["E"][row] == 5.625
    np.testing.assert_array_equal(cols["K"].reshape(5, 5), inv.K)
    r31 = r31_field_to_csv(inv.grid, inv.E, inv.nu, inv.valid)
    assert r31.splitlines()[0] == "u,v,E,nu,valid"
