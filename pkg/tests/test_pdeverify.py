import numpy as np
import pytest

from maxsurf.holfun import parse
from maxsurf.invariants import field_from_arrays, invariant_field
from maxsurf.pdeverify import (
    EmptyMaskError,
    frenet_residual,
    geodesic_curvature_check,
    geodesic_curvatures,
    laplacian_fd,
    residual_gauss,
    residual_natural_K_kappa,
    residual_natural_nu_mu,
    residual_r31,
    study_frenet,
    study_pair,
    study_r31,
)
from maxsurf.weierstrass import GridSpec, HolPair

GRID = GridSpec.square_cells(1.5, 2.5, 0, 1, 1 / 32)


def test_laplacian_examples():
    g = GridSpec(-1, 1, -1, 1, 21, 21)
    t = g.points()
    u, v = t.real, t.imag
    assert np.nanmax(np.abs(laplacian_fd(np.full(g.shape, 3.0), g.h))) == 0
    np.testing.assert_allclose(laplacian_fd(u**2 + v**2, g.h)[1:-1, 1:-1], 4, rtol=1e-10)
    assert np.all(np.isnan(laplacian_fd(u, g.h)[0]))


def test_laplacian_of_harmonic_function_is_second_order():
    errs = []
    for n in (21, 41):
        g = GridSpec(1, 2, 1, 2, n, n)
        t = g.points()
        errs.append(np.nanmax(np.abs(laplacian_fd(np.log(np.abs(t) ** 2), g.h))))
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_constant_fields():
    g = GridSpec(0, 1, 0, 1, 9, 9)
    inv = field_from_arrays(g, E=1.0, K=1.0, kappa=0.0)
    reps = {r.equation_id: r for r in residual_natural_K_kappa(inv)}
    assert reps["natural-kkappa-1"].max_abs == 2.0
    assert reps["natural-kkappa-1"].rms == 2.0
    numu = {r.equation_id: r for r in residual_natural_nu_mu(inv)}
    assert numu["natural-numu-1"].max_abs == 2.0
    assert residual_gauss(inv).max_abs == 2.0
    assert residual_gauss(field_from_arrays(g, E=1.0, K=0.0, kappa=0.0, nu=1.0, mu=0.0)).max_abs == 0.0
    assert residual_r31(np.ones(g.shape), g.h).max_abs == 2.0


def test_report_json_shape():
    inv = invariant_field(HolPair.parse("z", "2*z"), GRID)
    d = residual_gauss(inv).to_dict()
    assert set(d) == {"equation_id", "h", "max_abs", "rms", "points"}
    assert d["points"] == (GRID.nu - 2) * (GRID.nv - 2)


def test_empty_mask():
    g = GridSpec(0, 1, 0, 1, 5, 5)
    inv = field_from_arrays(g, 1.0, 1.0, 0.0, valid=np.zeros(g.shape, bool))
    with pytest.raises(EmptyMaskError):
        residual_gauss(inv)


@pytest.mark.parametrize("pair", [("z", "2*z"), ("2+z", "2*exp(z)")])
def test_field_equations_converge(pair):
    grid = GRID if pair[0] == "z" else GridSpec.square_cells(-0.25, 0.25, -0.25, 0.25, 1 / 64)
    out = study_pair(HolPair.parse(*pair), grid)
    assert set(out) >= {"natural-kkappa-1", "natural-kkappa-2", "sakaki-plus", "sakaki-minus",
                        "natural-numu-1", "natural-numu-2", "gauss", "ricci"}
    for eq, (coarse, fine) in out.items():
        assert 3.5 <= fine.reduction_ratio <= 4.5, eq
        assert fine.order_estimate == pytest.approx(2, abs=0.2)


def test_two_systems_vanish_together():
    out = study_pair(HolPair.parse("z", "2*z"), GRID, ["natural-kkappa", "natural-numu"])
    a = max(out["natural-kkappa-1"][0].max_abs, out["natural-kkappa-2"][0].max_abs)
    b = max(out["natural-numu-1"][0].max_abs, out["natural-numu-2"][0].max_abs)
    assert 0.1 < a / b < 10


@pytest.mark.parametrize("g", ["z", "2*z"])
def test_r31_equation_converges(g):
    coarse, fine = study_r31(parse(g), GRID)
    assert 3.5 <= fine.reduction_ratio <= 4.5


def test_degenerate_disk_excluded():
    grid = GridSpec.square_cells(-0.5, 0.5, -0.5, 0.5, 1 / 32)
    inv = invariant_field(HolPair.parse("z^2+2", "3*z + 4"), grid)
    assert inv.degenerate and abs(inv.degenerate[0]) < 1e-10
    rep = residual_gauss(inv)
    from maxsurf.pdeverify import residual_mask

    m = residual_mask(inv)
    assert not np.any(m & (np.abs(grid.points()) <= 3 * grid.h))
    assert np.isfinite(rep.max_abs)


def test_frenet_z_2z():
    out = study_frenet(HolPair.parse("z", "2*z"), GridSpec.square_cells(1.5, 2.5, 0, 1, 1 / 32))
    coarse, fine = out["frenet-phi-tbar"]
    assert coarse.max_abs <= 1e-3 * coarse.h**2
    for eq in ("frenet-phi", "frenet-n1", "frenet-n2"):
        assert 3.5 <= out[eq][1].reduction_ratio <= 4.5, eq


def test_frenet_tbar_is_small_for_nonpolynomial_phi():
    reps = {r.equation_id: r for r in frenet_residual(HolPair.parse("2+z", "2*exp(z)"),
                                                        GridSpec.square_cells(-0.2, 0.2, -0.2, 0.2, 1 / 64))}
    assert reps["frenet-phi-tbar"].max_abs < reps["frenet-phi"].max_abs


def test_frenet_hyperplane_case_flags_mu_zero():
    reps = frenet_residual(HolPair.parse("z^2+3", "z^2+3"), GridSpec.square_cells(1, 2, 0, 1, 1 / 32))
    assert all(any("mu-identically-zero" in f for f in r.flags) for r in reps)
    by_id = {r.equation_id: r for r in reps}
    assert by_id["frenet-phi"].max_abs < 1e-2
    assert by_id["frenet-n1"].max_abs < 1e-2


def test_geodesic_curvatures():
    g = GridSpec(0, 1, 0, 1, 9, 9)
    g1, g2 = geodesic_curvatures(field_from_arrays(g, 2.0, 1.0, 0.0))
    assert np.nanmax(np.abs(g1)) == 0 and np.nanmax(np.abs(g2)) == 0
    rep, _, _ = geodesic_curvature_check(invariant_field(HolPair.parse("z", "2*z"), GRID))
    assert not rep.flags and np.isfinite(rep.max_abs)


def test_geodesic_curvature_self_convergence():
    p = HolPair.parse("z", "2*z")
    fields = [geodesic_curvatures(invariant_field(p, GridSpec.square_cells(1.5, 2.5, 0, 1, h)))[0]
              for h in (1 / 16, 1 / 32, 1 / 64)]
    d1 = fields[0] - fields[1][::2, ::2]
    d2 = fields[1][::2, ::2] - fields[2][::4, ::4]
    ratio = np.nanmax(np.abs(d1)) / np.nanmax(np.abs(d2))
    assert 3.5 <= ratio <= 4.5
