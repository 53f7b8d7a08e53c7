"""Scalar invariants E, K, kappa, nu, mu of maximal space-like surfaces.

Canonical pairs use closed forms in g1, g2 and their derivatives.  Triples
use the general formulas with |f|^2.  The Minkowski-space quantities and the
curvature correspondence between the two settings live here too.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegeneratePointError, ValidityError
from .weierstrass import GridSpec, HolPair, HolTriple, degenerate_points, validity_report


@dataclass
class InvariantSample:
    """E, K, kappa, nu, mu at t.  Fields are floats or equally shaped arrays."""

    E: object
    K: object
    kappa: object
    nu: object
    mu: object
    t: object = None


def _moduli(g1, dg1, g2, dg2):
    a, b = np.abs(dg1), np.abs(dg2)
    A1, A2 = np.abs(g1) ** 2 - 1, np.abs(g2) ** 2 - 1
    return a, b, A1, A2


def _check_scalar(t, D, ab=None):
    if np.ndim(t) == 0:
        if not D > 0:
            raise ValidityError(f"(|g1|^2-1)(|g2|^2-1) = {float(D):.6g} is not positive at t={t}")
        if ab is not None and not ab > 0:
            raise DegeneratePointError(f"g1' g2' vanishes at t={t}")


def canonical_invariants(p: HolPair, t, strict=True) -> InvariantSample:
    """Invariants of the canonical representation generated by (g1, g2).

    With a = |g1'|, b = |g2'|, A_j = |g_j|^2 - 1 and D = A1 A2:
    E = D / (4ab), K = 8ab/D (a^2/A1^2 + b^2/A2^2),
    kappa = -8ab/D (a^2/A1^2 - b^2/A2^2),
    nu = 2 sqrt(ab/D) (a/|A1| + b/|A2|), mu = -2 sqrt(ab/D) (a/|A1| - b/|A2|).
    Scalar t raises on invalid or degenerate points; arrays give nan/inf there.
    """
    t = np.asarray(t, dtype=complex)
    d1, d2 = p.g1.derivative(), p.g2.derivative()
    a, b, A1, A2 = _moduli(p.g1.values(t), d1.values(t), p.g2.values(t), d2.values(t))
    D = A1 * A2
    if strict:
        _check_scalar(t, D, a * b)
    with np.errstate(all="ignore"):
        E = D / (4 * a * b)
        r1, r2 = a**2 / A1**2, b**2 / A2**2
        K = 8 * a * b / D * (r1 + r2)
        kappa = -8 * a * b / D * (r1 - r2)
        root = 2 * np.sqrt(a * b / D)
        nu = root * (a / np.abs(A1) + b / np.abs(A2))
        mu = -root * (a / np.abs(A1) - b / np.abs(A2))
    return _sample(E, K, kappa, nu, mu, t)


def _sample(E, K, kappa, nu, mu, t):
    if np.ndim(t) == 0:
        return InvariantSample(float(E), float(K), float(kappa), float(nu), float(mu), complex(t))
    return InvariantSample(E, K, kappa, nu, mu, t)


def general_invariants(tr: HolTriple, t, strict=True) -> tuple:
    """(E, K, kappa) for the triple (f, g1, g2), any isothermal coordinate."""
    t = np.asarray(t, dtype=complex)
    f = tr.f.values(t)
    a, b, A1, A2 = _moduli(tr.g1.values(t), tr.g1.derivative().values(t), tr.g2.values(t), tr.g2.derivative().values(t))
    D = A1 * A2
    if strict:
        _check_scalar(t, D)
        if np.ndim(t) == 0 and not abs(f) > 0:
            raise ValidityError(f"f vanishes at t={t}")
    F = np.abs(f) ** 2
    with np.errstate(all="ignore"):
        E = F * D
        r1, r2 = a**2 / A1**2, b**2 / A2**2
        K = 2 / (F * D) * (r1 + r2)
        kappa = -2 / (F * D) * (r1 - r2)
    if np.ndim(t) == 0:
        return float(E), float(K), float(kappa)
    return E, K, kappa


def curvatures_from_normal(nu, mu):
    """(K, kappa) = (nu^2 + mu^2, 2 nu mu)."""
    nu, mu = np.asarray(nu, dtype=float), np.asarray(mu, dtype=float)
    if np.any(~(nu > np.abs(mu))):
        raise ValueError("normal curvatures need nu > |mu|")
    K, kappa = nu**2 + mu**2, 2 * nu * mu
    return (float(K), float(kappa)) if K.ndim == 0 else (K, kappa)


def normal_from_curvatures(K, kappa):
    """(nu, mu) = ((sqrt(K+kappa) + sqrt(K-kappa))/2, (sqrt(K+kappa) - sqrt(K-kappa))/2)."""
    K, kappa = np.asarray(K, dtype=float), np.asarray(kappa, dtype=float)
    if np.any(~(K > np.abs(kappa))):
        raise ValueError("need K > |kappa| (non-degenerate point)")
    p, m = np.sqrt(K + kappa), np.sqrt(K - kappa)
    nu, mu = (p + m) / 2, (p - m) / 2
    return (float(nu), float(mu)) if nu.ndim == 0 else (nu, mu)


def E_from_curvatures(K, kappa):
    """E = (K^2 - kappa^2)^(-1/4), valid in canonical coordinates."""
    K, kappa = np.asarray(K, dtype=float), np.asarray(kappa, dtype=float)
    if np.any(~(K > np.abs(kappa))):
        raise ValueError("need K > |kappa| (non-degenerate point)")
    E = ((K - kappa) * (K + kappa)) ** -0.25
    return float(E) if E.ndim == 0 else E


def ellipse_axes(p: HolPair, t) -> tuple:
    """Semi-axes (nu, |mu|) of the normal-curvature ellipse.

    Computed without dividing by g1' g2', so a degenerate point gives the
    circle (0, 0) rather than an error.
    """
    g1, g2 = p.g1.values(t), p.g2.values(t)
    a, b, A1, A2 = _moduli(g1, p.g1.derivative().values(t), g2, p.g2.derivative().values(t))
    D = A1 * A2
    _check_scalar(t, D)
    root = 2 * np.sqrt(a * b / D)
    nu = root * (a / np.abs(A1) + b / np.abs(A2))
    mu = root * np.abs(a / np.abs(A1) - b / np.abs(A2))
    return (float(nu), float(mu)) if np.ndim(nu) == 0 else (nu, mu)


# ---------------------------------------------------------------- Minkowski 3-space

def r31_invariants(g, t) -> tuple:
    """(E, nu) = ((|g|^2-1)^2 / (4|g'|^2), 4|g'|^2 / (|g|^2-1)^2)."""
    gv, dg = g.values(t), g.derivative().values(t)
    m = np.abs(gv) ** 2 - 1
    a2 = np.abs(dg) ** 2
    if np.ndim(t) == 0 and (not a2 > 0 or m == 0 or not np.isfinite(m)):
        raise DegeneratePointError(f"g' = 0 or |g| = 1 at t={t}")
    with np.errstate(all="ignore"):
        E, nu = m**2 / (4 * a2), 4 * a2 / m**2
    return (float(E), float(nu)) if np.ndim(E) == 0 else (E, nu)


def correspond_to_r42(nu1, nu2):
    """K = sqrt(nu1 nu2)(nu1 + nu2)/2, kappa = -sqrt(nu1 nu2)(nu1 - nu2)/2."""
    nu1, nu2 = np.asarray(nu1, dtype=float), np.asarray(nu2, dtype=float)
    if np.any(~(nu1 > 0)) or np.any(~(nu2 > 0)):
        raise ValueError("normal curvatures of the two surfaces must be positive")
    r = np.sqrt(nu1 * nu2) / 2
    K, kappa = r * (nu1 + nu2), -r * (nu1 - nu2)
    return (float(K), float(kappa)) if K.ndim == 0 else (K, kappa)


def correspond_from_r42(K, kappa):
    """nu1 = (K - kappa)/(K^2 - kappa^2)^(1/4), nu2 = (K + kappa)/(K^2 - kappa^2)^(1/4)."""
    K, kappa = np.asarray(K, dtype=float), np.asarray(kappa, dtype=float)
    if np.any(~(K > np.abs(kappa))):
        raise ValueError("need K > |kappa| (non-degenerate point)")
    q = ((K - kappa) * (K + kappa)) ** 0.25
    nu1, nu2 = (K - kappa) / q, (K + kappa) / q
    return (float(nu1), float(nu2)) if nu1.ndim == 0 else (nu1, nu2)


def geometric_mean_E(E1, E2):
    E1, E2 = np.asarray(E1, dtype=float), np.asarray(E2, dtype=float)
    if np.any(~(E1 > 0)) or np.any(~(E2 > 0)):
        raise ValueError("metric coefficients must be positive")
    E = np.sqrt(E1 * E2)
    return float(E) if E.ndim == 0 else E


# ---------------------------------------------------------------- fields

NEAR_DEGENERATE = 1e-9


@dataclass
class InvariantField:
    """Invariants sampled on a grid, with a validity mask."""

    grid: GridSpec
    E: np.ndarray
    K: np.ndarray
    kappa: np.ndarray
    nu: np.ndarray
    mu: np.ndarray
    valid: np.ndarray
    degenerate: list = field(default_factory=list)
    source: Optional[dict] = None

    @property
    def h(self) -> float:
        return self.grid.h


def invariant_field(p: HolPair, grid: GridSpec, rel_tol=1e-9) -> InvariantField:
    """Canonical invariants on every grid point.

    The mask drops points failing the validity checks and near-degenerate
    samples with nu - |mu| < 1e-9 nu.
    """
    rep = validity_report(p, grid, rel_tol)
    inv = canonical_invariants(p, grid.points(), strict=False)
    valid = rep.valid & np.isfinite(inv.E) & np.isfinite(inv.nu)
    with np.errstate(invalid="ignore"):
        valid &= (inv.nu - np.abs(inv.mu)) >= NEAR_DEGENERATE * inv.nu
    degen = degenerate_points(p, grid)
    return InvariantField(grid, inv.E, inv.K, inv.kappa, inv.nu, inv.mu, valid, degen, p.describe())


def field_from_arrays(grid: GridSpec, E, K, kappa, nu=None, mu=None, valid=None) -> InvariantField:
    """Build a field from raw arrays (nu, mu default to the K, kappa inversion)."""
    shape = grid.shape
    E, K, kappa = (np.broadcast_to(np.asarray(x, dtype=float), shape).copy() for x in (E, K, kappa))
    if nu is None or mu is None:
        with np.errstate(invalid="ignore"):
            p, m = np.sqrt(K + kappa), np.sqrt(K - kappa)
        nu, mu = (p + m) / 2, (p - m) / 2
    nu, mu = (np.broadcast_to(np.asarray(x, dtype=float), shape).copy() for x in (nu, mu))
    valid = np.ones(shape, dtype=bool) if valid is None else np.asarray(valid, dtype=bool)
    return InvariantField(grid, E, K, kappa, nu, mu, valid)


def interior_mask(valid: np.ndarray) -> np.ndarray:
    """Points whose full 5-point stencil is valid, boundary ring excluded."""
    m = np.zeros_like(valid, dtype=bool)
    c = valid[1:-1, 1:-1]
    m[1:-1, 1:-1] = c & valid[:-2, 1:-1] & valid[2:, 1:-1] & valid[1:-1, :-2] & valid[1:-1, 2:]
    return m


def d_dt(F: np.ndarray, h: float) -> np.ndarray:
    """(dF/du - i dF/dv)/2 by central differences; nan on the boundary ring."""
    out = np.full(F.shape, complex(np.nan, np.nan))
    Fu = (F[1:-1, 2:] - F[1:-1, :-2]) / (2 * h)
    Fv = (F[2:, 1:-1] - F[:-2, 1:-1]) / (2 * h)
    out[1:-1, 1:-1] = (Fu - 1j * Fv) / 2
    return out


def d_dtbar(F: np.ndarray, h: float) -> np.ndarray:
    out = np.full(F.shape, complex(np.nan, np.nan))
    Fu = (F[1:-1, 2:] - F[1:-1, :-2]) / (2 * h)
    Fv = (F[2:, 1:-1] - F[:-2, 1:-1]) / (2 * h)
    out[1:-1, 1:-1] = (Fu + 1j * Fv) / 2
    return out


def beta_field(inv: InvariantField) -> tuple:
    """beta = -(i/2) d/dt ln((nu + mu)/(nu - mu)), with its interior mask."""
    with np.errstate(all="ignore"):
        L = np.log((inv.nu + inv.mu) / (inv.nu - inv.mu))
    L = np.where(inv.valid, L, np.nan)
    beta = -0.5j * d_dt(L, inv.h)
    mask = interior_mask(inv.valid) & np.isfinite(beta)
    return np.where(mask, beta, np.nan), mask


def field_to_csv(inv: InvariantField) -> str:
    """CSV with header u,v,E,K,kappa,nu,mu,valid; rows run over u fastest."""
    buf = io.StringIO()
    buf.write("u,v,E,K,kappa,nu,mu,valid\n")
    u, v = inv.grid.u, inv.grid.v
    for i in range(inv.grid.nv):
        for j in range(inv.grid.nu):
            vals = (u[j], v[i], inv.E[i, j], inv.K[i, j], inv.kappa[i, j], inv.nu[i, j], inv.mu[i, j])
            buf.write(",".join(_fmt(x) for x in vals) + f",{int(inv.valid[i, j])}\n")
    return buf.getvalue()


def r31_field_to_csv(grid: GridSpec, E, nu, valid) -> str:
    buf = io.StringIO()
    buf.write("u,v,E,nu,valid\n")
    u, v = grid.u, grid.v
    for i in range(grid.nv):
        for j in range(grid.nu):
            buf.write(f"{_fmt(u[j])},{_fmt(v[i])},{_fmt(E[i, j])},{_fmt(nu[i, j])},{int(valid[i, j])}\n")
    return buf.getvalue()


def _fmt(x) -> str:
    return format(float(x), ".17g")


def read_field_csv(text: str) -> dict:
    """Parse a field CSV back into column arrays."""
    lines = text.strip().splitlines()
    names = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    return {name: data[:, k] for k, name in enumerate(names)}
