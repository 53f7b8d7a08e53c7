"""Finite-difference residuals of the differential identities of the theory.

Each residual is evaluated on the interior of the validity mask with a
plain 5-point Laplacian or central first differences, so every residual
carries an O(h^2) truncation error on analytic data.  Degenerate points are
cut out with a disk of radius 3h.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import MaxsurfError
from .invariants import InvariantField, beta_field, d_dt, d_dtbar, interior_mask, invariant_field
from .neutralgeo import bilinear, det4, normal_project
from .weierstrass import GridSpec, HolPair, canonical_data


@dataclass
class ResidualReport:
    equation_id: str
    h: float
    max_abs: float
    rms: float
    points: int
    order_estimate: Optional[float] = None
    reduction_ratio: Optional[float] = None
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {"equation_id": self.equation_id, "h": self.h, "max_abs": self.max_abs, "rms": self.rms, "points": self.points}
        if self.order_estimate is not None:
            d["order_estimate"] = self.order_estimate
            d["reduction_ratio"] = self.reduction_ratio
        if self.flags:
            d["flags"] = list(self.flags)
        return d


class EmptyMaskError(MaxsurfError, ValueError):
    """No grid point has a complete stencil inside the mask."""


def laplacian_fd(F: np.ndarray, h: float) -> np.ndarray:
    """(F_E + F_W + F_N + F_S - 4 F_C) / h^2 with nan on the boundary ring."""
    F = np.asarray(F)
    out = np.full(F.shape, np.nan, dtype=F.dtype if np.iscomplexobj(F) else float)
    out[1:-1, 1:-1] = (F[1:-1, 2:] + F[1:-1, :-2] + F[2:, 1:-1] + F[:-2, 1:-1] - 4 * F[1:-1, 1:-1]) / h**2
    return out


def residual_mask(inv: InvariantField, radius=3.0) -> np.ndarray:
    """Stencil-complete interior of the mask, minus disks around degenerate points."""
    m = interior_mask(inv.valid)
    if inv.degenerate:
        t = inv.grid.points()
        for z in inv.degenerate:
            m &= np.abs(t - z) > radius * inv.h
    return m


def make_report(equation_id: str, res: np.ndarray, mask: np.ndarray, h: float) -> ResidualReport:
    mask = mask & np.isfinite(res)
    if not np.any(mask):
        raise EmptyMaskError(f"no interior points available for {equation_id}")
    r = np.abs(res[mask])
    return ResidualReport(equation_id, float(h), float(np.max(r)), float(np.sqrt(np.mean(r**2))), int(r.size))


def _masked(F, valid):
    return np.where(valid, F, np.nan)


def _natural_kkappa(inv):
    K, kap = inv.K, inv.kappa
    with np.errstate(all="ignore"):
        q = ((K - kap) * (K + kap)) ** 0.25
        lnq = _masked(np.log(q), inv.valid)
        half_ratio = _masked(0.5 * np.log((K + kap) / (K - kap)), inv.valid)
    h = inv.h
    return {
        "natural-kkappa-1": q * laplacian_fd(lnq, h) - 2 * K,
        "natural-kkappa-2": q * laplacian_fd(half_ratio, h) - 2 * kap,
    }


def _sakaki(inv):
    K, kap, h = inv.K, inv.kappa, inv.h
    with np.errstate(all="ignore"):
        lp = _masked(np.log(K + kap), inv.valid)
        lm = _masked(np.log(K - kap), inv.valid)
    return {
        "sakaki-plus": laplacian_fd(lp, h) / inv.E - 2 * (2 * K + kap),
        "sakaki-minus": laplacian_fd(lm, h) / inv.E - 2 * (2 * K - kap),
    }


def _natural_numu(inv):
    nu, mu, h = inv.nu, inv.mu, inv.h
    with np.errstate(all="ignore"):
        r = np.sqrt((nu - mu) * (nu + mu))
        lnr = _masked(np.log(r), inv.valid)
        lratio = _masked(np.log((nu + mu) / (nu - mu)), inv.valid)
    return {
        "natural-numu-1": r * laplacian_fd(lnr, h) - 2 * nu**2 - 2 * mu**2,
        "natural-numu-2": r * laplacian_fd(lratio, h) - 4 * nu * mu,
    }


def _gauss(inv):
    with np.errstate(all="ignore"):
        lnE = _masked(np.log(inv.E), inv.valid)
    return {"gauss": laplacian_fd(lnE, inv.h) / inv.E + 2 * inv.K}


def _ricci(inv):
    beta, _ = beta_field(inv)
    return {"ricci": np.imag(d_dtbar(beta, inv.h)) + inv.E * inv.nu * inv.mu / 2}


EQUATION_GROUPS: dict = {
    "natural-kkappa": _natural_kkappa,
    "sakaki": _sakaki,
    "natural-numu": _natural_numu,
    "gauss": _gauss,
    "ricci": _ricci,
}


def _reports(inv, fn):
    mask = residual_mask(inv)
    return [make_report(k, v, mask, inv.h) for k, v in fn(inv).items()]


def residual_natural_K_kappa(inv: InvariantField) -> list:
    """Both (K, kappa) equations plus the two Sakaki forms."""
    return _reports(inv, _natural_kkappa) + _reports(inv, _sakaki)


def residual_natural_nu_mu(inv: InvariantField) -> list:
    return _reports(inv, _natural_numu)


def residual_gauss(inv: InvariantField) -> ResidualReport:
    return _reports(inv, _gauss)[0]


def residual_ricci(inv: InvariantField) -> ResidualReport:
    return _reports(inv, _ricci)[0]


def residual_r31_array(nu: np.ndarray, h: float) -> np.ndarray:
    with np.errstate(all="ignore"):
        return laplacian_fd(np.log(nu), h) - 2 * nu


def residual_r31(nu: np.ndarray, h: float, valid=None) -> ResidualReport:
    """Report of Delta ln nu - 2 nu for a Minkowski-space normal curvature field."""
    nu = np.asarray(nu, dtype=float)
    valid = np.isfinite(nu) & (nu > 0) if valid is None else np.asarray(valid) & (nu > 0)
    return make_report("r31", residual_r31_array(np.where(valid, nu, np.nan), h), interior_mask(valid), h)


# ---------------------------------------------------------------- convergence

def _shared(coarse_res, coarse_mask, fine_res, fine_mask):
    fm = fine_mask[::2, ::2]
    fr = fine_res[::2, ::2]
    both = coarse_mask & fm & np.isfinite(coarse_res) & np.isfinite(fr)
    return both, fr


def convergence_pair(equation_id, coarse_res, coarse_mask, fine_res, fine_mask, h) -> tuple:
    """Reports at h and h/2 over the points the two grids share.

    The fine report carries log2 of the max-residual reduction.
    """
    both, fr = _shared(coarse_res, coarse_mask, fine_res, fine_mask)
    rc = make_report(equation_id, coarse_res, both, h)
    rf = make_report(equation_id, fr, both, h / 2)
    if rf.max_abs > 0:
        ratio = rc.max_abs / rf.max_abs
        rf.reduction_ratio = float(ratio)
        rf.order_estimate = float(np.log2(ratio)) if ratio > 0 else None
    else:
        rf.flags.append("residual-exactly-zero: no convergence ratio")
    return rc, rf


def study_pair(p: HolPair, grid: GridSpec, groups=None) -> dict:
    """Residuals of every field equation at h and h/2 for a pair."""
    groups = list(EQUATION_GROUPS) if groups is None else groups
    coarse = invariant_field(p, grid)
    fine = invariant_field(p, grid.refined())
    mc, mf = residual_mask(coarse), residual_mask(fine)
    out = {}
    for g in groups:
        rc, rf = EQUATION_GROUPS[g](coarse), EQUATION_GROUPS[g](fine)
        for k in rc:
            out[k] = convergence_pair(k, rc[k], mc, rf[k], mf, grid.h)
    return out


def study_r31(g, grid: GridSpec) -> tuple:
    from .invariants import r31_invariants

    res, masks = [], []
    for gr in (grid, grid.refined()):
        _, nu = r31_invariants(g, gr.points())
        valid = np.isfinite(nu) & (nu > 0)
        res.append(residual_r31_array(np.where(valid, nu, np.nan), gr.h))
        masks.append(interior_mask(valid))
    return convergence_pair("r31", res[0], masks[0], res[1], masks[1], grid.h)


# ---------------------------------------------------------------- Frenet system

def _completion(X1, X2, n1):
    """Unit time-like vector eta-orthogonal to X1, X2, n1 with positive orientation."""
    M = np.stack([X1, X2, n1], axis=-2)
    c = np.empty(X1.shape)
    for k in range(4):
        cols = [j for j in range(4) if j != k]
        c[..., k] = (-1) ** k * np.linalg.det(M[..., cols])
    w = c * np.array([1.0, 1.0, -1.0, -1.0])
    w = w / np.sqrt(np.abs(bilinear(w, w)))[..., None]
    sign = np.sign(det4(X1, X2, n1, w).real)
    return w * sign[..., None]


@dataclass
class FrenetFrame:
    phi: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    E: np.ndarray
    nu: np.ndarray
    mu: np.ndarray
    beta: np.ndarray
    mask: np.ndarray
    orientation: np.ndarray
    mu_zero: bool


def frenet_frame(p: HolPair, grid: GridSpec) -> FrenetFrame:
    """Phi, the normal frame (n1, n2) and beta on the grid."""
    inv = invariant_field(p, grid)
    t = grid.points()
    base = (0, 0)
    data = canonical_data(p, t, base_index=base)
    phi, dphi = data.phi, data.phi_prime
    E = inv.E
    sqE = np.sqrt(E)[..., None]
    X1, X2 = phi.real / sqE, -phi.imag / sqE
    mask = residual_mask(inv)
    with np.errstate(all="ignore"):
        perp = normal_project(np.where(inv.valid[..., None], phi, np.nan), dphi, floor=-np.inf)
    s11 = perp.real / E[..., None]
    s12 = -perp.imag / E[..., None]
    nu, mu = inv.nu, inv.mu
    n1 = -s11 / nu[..., None]
    mu_zero = bool(np.nanmax(np.abs(mu[inv.valid]) / nu[inv.valid]) < 1e-9)
    if mu_zero:
        n2 = _completion(X1, X2, n1)
    else:
        n2 = s12 / (-mu[..., None])
    with np.errstate(all="ignore"):
        orientation = np.sign(det4(X1, X2, n1, n2).real)
    beta, bmask = beta_field(inv)
    return FrenetFrame(phi, n1, n2, E, nu, mu, beta, mask & bmask, orientation, mu_zero)


def _cnorm(v):
    return np.sqrt(np.sum(np.abs(v) ** 2, axis=-1))


def frenet_residual_arrays(fr: FrenetFrame, h: float) -> dict:
    def dt(F):
        return np.stack([d_dt(F[..., k], h) for k in range(4)], axis=-1)

    def dtbar(F):
        return np.stack([d_dtbar(F[..., k], h) for k in range(4)], axis=-1)

    phi, n1, n2 = fr.phi, fr.n1.astype(complex), fr.n2.astype(complex)
    E, nu, mu, beta = fr.E, fr.nu, fr.mu, fr.beta
    with np.errstate(all="ignore"):
        dlnE = d_dt(np.log(E), h)
    col = lambda a: a[..., None]  # noqa: E731
    r_hol = dtbar(phi)
    r_phi = dt(phi) - (col(dlnE) * phi - col(E * nu) * n1 + 1j * col(E * mu) * n2)
    r_n1 = dt(n1) - (-col(nu / 2) * np.conj(phi) + col(beta) * n2)
    r_n2 = dt(n2) - (1j * col(mu / 2) * np.conj(phi) - col(beta) * n1)
    return {
        "frenet-phi-tbar": _cnorm(r_hol),
        "frenet-phi": _cnorm(r_phi),
        "frenet-n1": _cnorm(r_n1),
        "frenet-n2": _cnorm(r_n2),
    }


def frenet_residual(p: HolPair, grid: GridSpec) -> list:
    """Residuals of the four complex Frenet equations on the grid."""
    fr = frenet_frame(p, grid)
    res = frenet_residual_arrays(fr, grid.h)
    reports = [make_report(k, v, fr.mask, grid.h) for k, v in res.items()]
    for r in reports:
        r.flags = _frenet_flags(fr)
    return reports


def _frenet_flags(fr: FrenetFrame) -> list:
    flags = []
    if fr.mu_zero:
        flags.append("mu-identically-zero: n2 taken from the oriented completion")
    orient = fr.orientation[fr.mask]
    if orient.size and np.all(orient < 0):
        flags.append("frame orientation det(X1,X2,n1,n2) < 0")
    return flags


def study_frenet(p: HolPair, grid: GridSpec) -> dict:
    fc, ff = frenet_frame(p, grid), frenet_frame(p, grid.refined())
    rc, rf = frenet_residual_arrays(fc, grid.h), frenet_residual_arrays(ff, grid.h / 2)
    out = {}
    for k in rc:
        coarse, fine = convergence_pair(k, rc[k], fc.mask, rf[k], ff.mask, grid.h)
        coarse.flags = _frenet_flags(fc) + coarse.flags
        fine.flags = _frenet_flags(ff) + fine.flags
        out[k] = (coarse, fine)
    return out


# ---------------------------------------------------------------- geodesic curvatures

def geodesic_curvatures(inv: InvariantField) -> tuple:
    """gamma1 = -E_v / (2 E sqrt E), gamma2 = E_u / (2 E sqrt E) by central differences."""
    E, h = _masked(inv.E, inv.valid), inv.h
    Eu = np.full(E.shape, np.nan)
    Ev = np.full(E.shape, np.nan)
    Eu[1:-1, 1:-1] = (E[1:-1, 2:] - E[1:-1, :-2]) / (2 * h)
    Ev[1:-1, 1:-1] = (E[2:, 1:-1] - E[:-2, 1:-1]) / (2 * h)
    d = 2 * E * np.sqrt(E)
    return -Ev / d, Eu / d


def geodesic_curvature_check(inv: InvariantField) -> tuple:
    """Report of the geodesic curvatures (finiteness on the mask) plus the fields."""
    g1, g2 = geodesic_curvatures(inv)
    mask = residual_mask(inv)
    rep = make_report("geodesic-curvature", np.hypot(g1, g2), mask, inv.h)
    if not np.all(np.isfinite(g1[mask]) & np.isfinite(g2[mask])):
        rep.flags.append("non-finite geodesic curvature on the mask")
    return rep, g1, g2


RESIDUAL_FUNCTIONS: dict[str, Callable] = {
    "natural-kkappa": residual_natural_K_kappa,
    "natural-numu": residual_natural_nu_mu,
    "gauss": residual_gauss,
    "ricci": residual_ricci,
}
