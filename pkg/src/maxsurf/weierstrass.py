"""Phi from generating holomorphic data, domain checks and canonicalisation.

Generating functions follow a small protocol: ``values(t)`` evaluates
leniently (nan at singular points) and ``derivative()`` returns another
function of the same kind.  Parsed expressions satisfy it, and so does
:class:`Reparametrized`, which composes an expression with the inverse of
the canonical-parameter map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import holfun
from .errors import (
    DegeneratePointError,
    EvaluationError,
    QuadratureError,
    RecoveryError,
)
from .holfun import HolExpr, as_expr
from .neutralgeo import herm_norm_sq, quad


def _vals(g, t):
    return g.values(t)


def _strict(arr, what):
    if not np.all(np.isfinite(arr)):
        raise EvaluationError(f"{what} is singular or non-finite at the requested point(s)")
    return arr


@dataclass(frozen=True)
class HolPair:
    """(g1, g2) for the canonical representation.

    ``branch_sign`` picks the global sign of sqrt(g1' g2'); ``second_type``
    switches to f = 1/(2 sqrt(-g1' g2')), for which Phi'^2 = +1.
    """

    g1: Any
    g2: Any
    branch_sign: int = 1
    second_type: bool = False

    @classmethod
    def parse(cls, g1, g2, branch_sign=1, second_type=False) -> "HolPair":
        return cls(as_expr(g1), as_expr(g2), branch_sign, second_type)

    def describe(self) -> dict:
        return {"kind": "pair", "g1": str(self.g1), "g2": str(self.g2), "branch_sign": self.branch_sign}


@dataclass(frozen=True)
class HolTriple:
    """(f, g1, g2) for the general representation."""

    f: Any
    g1: Any
    g2: Any

    @classmethod
    def parse(cls, f, g1, g2) -> "HolTriple":
        return cls(as_expr(f), as_expr(g1), as_expr(g2))

    def describe(self) -> dict:
        return {"kind": "triple", "f": str(self.f), "g1": str(self.g1), "g2": str(self.g2)}


@dataclass(frozen=True)
class GridSpec:
    """Rectangle [u0, u1] x [v0, v1] sampled with square cells.

    Field arrays have shape (nv, nu): row index is v, column index is u.
    """

    u0: float
    u1: float
    v0: float
    v1: float
    nu: int
    nv: int

    def __post_init__(self):
        if self.nu < 5 or self.nv < 5:
            raise ValueError("grid needs at least 5 points per direction")
        hu = (self.u1 - self.u0) / (self.nu - 1)
        hv = (self.v1 - self.v0) / (self.nv - 1)
        if hu <= 0 or hv <= 0:
            raise ValueError("grid bounds must be increasing")
        if abs(hu - hv) > 1e-12 * max(1.0, abs(hu)):
            raise ValueError(f"grid cells are not square: hu={hu!r}, hv={hv!r}")

    @classmethod
    def square_cells(cls, u0, u1, v0, v1, h) -> "GridSpec":
        nu = int(round((u1 - u0) / h)) + 1
        nv = int(round((v1 - v0) / h)) + 1
        return cls(u0, u1, v0, v1, nu, nv)

    @property
    def h(self) -> float:
        return (self.u1 - self.u0) / (self.nu - 1)

    @property
    def u(self) -> np.ndarray:
        return np.linspace(self.u0, self.u1, self.nu)

    @property
    def v(self) -> np.ndarray:
        return np.linspace(self.v0, self.v1, self.nv)

    @property
    def shape(self) -> tuple:
        return (self.nv, self.nu)

    def points(self) -> np.ndarray:
        uu, vv = np.meshgrid(self.u, self.v)
        return uu + 1j * vv

    def refined(self) -> "GridSpec":
        """Same rectangle with half the spacing."""
        return GridSpec(self.u0, self.u1, self.v0, self.v1, 2 * self.nu - 1, 2 * self.nv - 1)

    def nearest_index(self, t) -> tuple:
        j = int(round((t.real - self.u0) / self.h))
        i = int(round((t.imag - self.v0) / self.h))
        return min(max(i, 0), self.nv - 1), min(max(j, 0), self.nu - 1)

    def to_dict(self) -> dict:
        return {"u0": self.u0, "u1": self.u1, "v0": self.v0, "v1": self.v1, "nu": self.nu, "nv": self.nv}


# ---------------------------------------------------------------- branch handling

def _align(vals, ref):
    """Flip the sign of vals wherever -vals is closer to ref."""
    flip = np.abs(vals - ref) > np.abs(vals + ref)
    flip &= np.isfinite(ref)
    return np.where(flip, -vals, vals)


def continue_sqrt(w, base_index=None, ref=None):
    """Square root of w made continuous along the array.

    1-D arrays are followed in order; 2-D arrays along the base row and then
    outward column by column.  The start value is the principal root,
    unless ``ref`` is given, in which case the root nearest to ref is used.
    A ``ref`` array of w's shape aligns every entry to its own reference.
    """
    r = np.sqrt(np.asarray(w, dtype=complex))
    if ref is not None and np.ndim(ref) > 0 and np.shape(ref) == r.shape:
        return _align(r, ref)
    if r.ndim == 0:
        return r if ref is None else _align(r, ref)
    if r.ndim == 1:
        r = r.copy()
        k0 = 0 if base_index is None else base_index
        if ref is not None:
            r[k0] = _align(r[k0], ref)
        for k in range(k0 + 1, len(r)):
            r[k] = _align(r[k], _last_finite(r, k, -1))
        for k in range(k0 - 1, -1, -1):
            r[k] = _align(r[k], _last_finite(r, k, 1))
        return r
    if r.ndim != 2:
        raise ValueError("continue_sqrt handles 0-, 1- and 2-D arrays")
    i0, j0 = (0, 0) if base_index is None else base_index
    r = r.copy()
    r[i0] = continue_sqrt(w[i0], j0, ref)
    for i in range(i0 + 1, r.shape[0]):
        r[i] = _align(r[i], np.where(np.isfinite(r[i - 1]), r[i - 1], r[max(i - 2, i0)]))
    for i in range(i0 - 1, -1, -1):
        r[i] = _align(r[i], np.where(np.isfinite(r[i + 1]), r[i + 1], r[min(i + 2, i0)]))
    return r


def _last_finite(r, k, step):
    j = k + step
    while 0 <= j < len(r) and not np.isfinite(r[j]):
        j += step
    return r[j] if 0 <= j < len(r) else np.nan


# ---------------------------------------------------------------- Phi

def phi_from_fg(f, g1, g2):
    return quad(f * (g1 * g2 + 1), 1j * f * (g1 * g2 - 1), f * (g1 + g2), 1j * f * (g1 - g2))


def phi_prime_from_fg(f, df, g1, dg1, g2, dg2):
    s = dg1 * g2 + g1 * dg2
    return quad(
        df * (g1 * g2 + 1) + f * s,
        1j * (df * (g1 * g2 - 1) + f * s),
        df * (g1 + g2) + f * (dg1 + dg2),
        1j * (df * (g1 - g2) + f * (dg1 - dg2)),
    )


def phi_general(tr: HolTriple, t):
    """Phi = (f(g1 g2 + 1), i f(g1 g2 - 1), f(g1 + g2), i f(g1 - g2))."""
    f, g1, g2 = (_vals(x, t) for x in (tr.f, tr.g1, tr.g2))
    return _strict(phi_from_fg(f, g1, g2), "Phi")


def phi_general_prime(tr: HolTriple, t):
    f, g1, g2 = (_vals(x, t) for x in (tr.f, tr.g1, tr.g2))
    df, dg1, dg2 = (_vals(x.derivative(), t) for x in (tr.f, tr.g1, tr.g2))
    return _strict(phi_prime_from_fg(f, df, g1, dg1, g2, dg2), "Phi'")


@dataclass
class CanonicalData:
    """Pointwise values behind the canonical Phi (all arrays share t's shape)."""

    g1: np.ndarray
    g2: np.ndarray
    dg1: np.ndarray
    dg2: np.ndarray
    f: np.ndarray
    df: np.ndarray

    @property
    def phi(self):
        return phi_from_fg(self.f, self.g1, self.g2)

    @property
    def phi_prime(self):
        return phi_prime_from_fg(self.f, self.df, self.g1, self.dg1, self.g2, self.dg2)


def canonical_data(p: HolPair, t, base_index=None, ref=None) -> CanonicalData:
    """Evaluate g1, g2, their derivatives and f = 1/(2 sqrt(+-g1' g2')).

    The square root starts on the principal branch at the base point (times
    ``branch_sign``) and is continued across array-valued t.
    """
    t = np.asarray(t, dtype=complex)
    g1, g2 = _vals(p.g1, t), _vals(p.g2, t)
    d1, d2 = p.g1.derivative(), p.g2.derivative()
    dg1, dg2 = _vals(d1, t), _vals(d2, t)
    ddg1, ddg2 = _vals(d1.derivative(), t), _vals(d2.derivative(), t)
    w = dg1 * dg2
    if p.second_type:
        w = -w
    root = continue_sqrt(w, base_index, ref)
    if ref is None:
        root = root * p.branch_sign
    with np.errstate(all="ignore"):
        f = 1.0 / (2.0 * root)
        dw = ddg1 * dg2 + dg1 * ddg2
        if p.second_type:
            dw = -dw
        # f = w^(-1/2) / 2  =>  f' = -f w' / (2 w)
        df = -f * dw / (2.0 * w)
    return CanonicalData(g1, g2, dg1, dg2, f, df)


def phi_canonical(p: HolPair, t, base_index=None):
    d = canonical_data(p, t, base_index)
    if np.any(d.dg1 * d.dg2 == 0):
        raise DegeneratePointError("g1' g2' vanishes: degenerate point")
    return _strict(d.phi, "canonical Phi")


def phi_canonical_prime(p: HolPair, t, base_index=None):
    d = canonical_data(p, t, base_index)
    if np.any(d.dg1 * d.dg2 == 0):
        raise DegeneratePointError("g1' g2' vanishes: degenerate point")
    return _strict(d.phi_prime, "canonical Phi'")


def pair_as_triple_values(p: HolPair, t, base_index=None):
    d = canonical_data(p, t, base_index)
    return d.f, d.g1, d.g2


def recover_generators(phi):
    """Read (f, g1, g2) off Phi."""
    phi = np.asarray(phi, dtype=complex)
    s = phi[..., 0] + 1j * phi[..., 1]
    if np.any(np.abs(s) <= 1e-300):
        raise RecoveryError("phi1 + i phi2 = 0; apply a proper motion first so that f is defined")
    f = s / 2
    g1 = (phi[..., 2] - 1j * phi[..., 3]) / s
    g2 = (phi[..., 2] + 1j * phi[..., 3]) / s
    return f, g1, g2


def phi_r31(g, t):
    """Phi = ((g^2 + 1)/(2 g'), i (g^2 - 1)/(2 g'), g/g') for Minkowski 3-space."""
    g = as_expr(g) if isinstance(g, str) else g
    gv, dg = _vals(g, t), _vals(g.derivative(), t)
    if np.any(dg == 0):
        raise DegeneratePointError("g' vanishes")
    with np.errstate(all="ignore"):
        out = np.stack([(gv**2 + 1) / (2 * dg), 1j * (gv**2 - 1) / (2 * dg), gv / dg], axis=-1)
    return _strict(out, "Phi (R^3_1)")


# ---------------------------------------------------------------- validity

VALID, MIXED_MODULI, DEGENERATE_POINT, SINGULAR = 0, 1, 2, 3
STATUS_NAMES = {
    VALID: "valid",
    MIXED_MODULI: "metric-degenerate",
    DEGENERATE_POINT: "degenerate-point",
    SINGULAR: "singular-evaluation",
}


@dataclass
class ValidityReport:
    grid: GridSpec
    status: np.ndarray
    w_abs: np.ndarray = field(repr=False)

    @property
    def valid(self) -> np.ndarray:
        return self.status == VALID

    @property
    def all_valid(self) -> bool:
        return bool(np.all(self.valid))

    def counts(self) -> dict:
        return {name: int(np.sum(self.status == code)) for code, name in STATUS_NAMES.items()}

    def failures(self, limit=50) -> list:
        pts = self.grid.points()
        idx = np.argwhere(self.status != VALID)[:limit]
        return [
            {"u": float(pts[i, j].real), "v": float(pts[i, j].imag), "status": STATUS_NAMES[int(self.status[i, j])]}
            for i, j in idx
        ]

    def to_dict(self) -> dict:
        return {
            "all_valid": self.all_valid,
            "any_metric_degenerate": bool(np.any(self.status == MIXED_MODULI)),
            "any_degenerate_point": bool(np.any(self.status == DEGENERATE_POINT)),
            "any_singular": bool(np.any(self.status == SINGULAR)),
            "counts": self.counts(),
            "failures": self.failures(),
        }


def _moduli_status(g1, g2, w, extra_ok, rel_tol):
    prod = (np.abs(g1) ** 2 - 1) * (np.abs(g2) ** 2 - 1)
    finite = np.isfinite(prod) & np.isfinite(w) & extra_ok
    status = np.full(np.shape(g1), VALID, dtype=np.int8)
    status[~finite] = SINGULAR
    status[finite & ~(prod > 0)] = MIXED_MODULI
    wa = np.abs(np.where(finite, w, np.nan))
    scale = np.nanmedian(wa) if np.any(np.isfinite(wa)) else 0.0
    status[finite & (prod > 0) & (wa <= rel_tol * scale)] = DEGENERATE_POINT
    return status, wa


def validity_report(src, grid: GridSpec, rel_tol=1e-9) -> ValidityReport:
    """Classify every grid point of a pair or triple."""
    t = grid.points()
    if isinstance(src, HolTriple):
        f = _vals(src.f, t)
        g1, g2 = _vals(src.g1, t), _vals(src.g2, t)
        w = f**2 * _vals(src.g1.derivative(), t) * _vals(src.g2.derivative(), t)
        ok = np.isfinite(f) & (f != 0)
    else:
        g1, g2 = _vals(src.g1, t), _vals(src.g2, t)
        w = _vals(src.g1.derivative(), t) * _vals(src.g2.derivative(), t)
        ok = np.ones(t.shape, dtype=bool)
    status, wa = _moduli_status(g1, g2, w, ok, rel_tol)
    return ValidityReport(grid, status, wa)


# ---------------------------------------------------------------- degenerate points

def degenerate_points(p: HolPair, grid: GridSpec, tol=1e-9, newton_tol=1e-10) -> list:
    """Zeros of g1' g2' inside the grid rectangle.

    Cells whose corner values wind around 0, or whose nodes have
    |g1' g2'| <= tol * median, seed a Newton iteration on g1' g2'.
    """
    d1, d2 = p.g1.derivative(), p.g2.derivative()

    def w(t):
        return _vals(d1, t) * _vals(d2, t)

    def dw(t):
        return _vals(d1.derivative(), t) * _vals(d2, t) + _vals(d1, t) * _vals(d2.derivative(), t)

    t = grid.points()
    wv = w(t)
    wa = np.abs(wv)
    scale = np.nanmedian(wa)
    seeds = list(t[np.isfinite(wa) & (wa <= tol * scale)])
    # winding of w around each cell, from its four corners
    c = [wv[:-1, :-1], wv[:-1, 1:], wv[1:, 1:], wv[1:, :-1]]
    with np.errstate(all="ignore"):
        turn = sum(np.angle(c[(k + 1) % 4] / c[k]) for k in range(4))
    wind = np.rint(turn / (2 * np.pi))
    wind = np.where(np.isfinite(turn), wind, 0)
    for i, j in np.argwhere(wind != 0):
        seeds.append((t[i, j] + t[i + 1, j + 1]) / 2)
    found = []
    h = grid.h
    for z in seeds:
        z = complex(z)
        for _ in range(100):
            d = dw(z)
            if not np.isfinite(d) or d == 0:
                break
            step = w(z) / d
            z -= step
            if abs(step) < newton_tol * max(1.0, abs(z)) * 1e-2:
                break
        if not np.isfinite(z) or abs(w(z)) > 1e-8 * max(scale, 1e-300):
            continue
        if not (grid.u0 - h <= z.real <= grid.u1 + h and grid.v0 - h <= z.imag <= grid.v1 + h):
            continue
        if all(abs(z - q) > 10 * newton_tol + 1e-6 * h for q in found):
            found.append(z)
    return sorted(found, key=lambda q: (q.real, q.imag))


# ---------------------------------------------------------------- canonical parameter

def _canonical_integrand_sq(tr: HolTriple, t):
    """-Phi'^2 = 4 f^2 g1' g2'; the canonical integrand is its fourth root."""
    f = _vals(tr.f, t)
    return 4 * f**2 * _vals(tr.g1.derivative(), t) * _vals(tr.g2.derivative(), t)


_QUARTER_TURNS = np.array([1, 1j, -1, -1j])


def _align4(vals, ref):
    """Multiply vals by the power of i that brings it closest to ref."""
    vals = np.asarray(vals, dtype=complex)
    cand = vals[..., None] * _QUARTER_TURNS
    k = np.argmin(np.abs(cand - np.asarray(ref)[..., None]), axis=-1)
    out = np.take_along_axis(cand, k[..., None], axis=-1)[..., 0]
    return np.where(np.isfinite(ref), out, vals)


def _track_root4(q, ref=None):
    """Fourth root of a 1-D array, continued along it from the first entry."""
    r = np.asarray(q, dtype=complex) ** 0.25
    if r.ndim == 0:
        return r if ref is None else _align4(r, ref)
    r = r.copy()
    if ref is not None:
        r[0] = _align4(r[0], ref)
    for k in range(1, len(r)):
        r[k] = _align4(r[k], _last_finite(r, k, -1))
    return r


def _gauss_segment(tr, a, b, ref, n=16):
    """Integral of the tracked root along [a, b] by n-point Gauss-Legendre."""
    x, wts = np.polynomial.legendre.leggauss(n)
    tau = (x + 1) / 2
    nodes = a + tau * (b - a)
    root = _track_root4(_canonical_integrand_sq(tr, nodes), ref)
    return np.sum(wts * root) * (b - a) / 2, root


def canonical_parameter(tr: HolTriple, t0, t, branch_sign=1, tol=1e-10, max_depth=40, n_track=256) -> complex:
    """s(t) = integral from t0 to t of (4 f^2 g1' g2')^(1/4) along the segment.

    The root starts on the principal branch at t0 (times branch_sign) and is
    tracked continuously; adaptive Simpson runs on each of ``n_track``
    sub-segments with the absolute target split evenly between them.
    """
    t0, t = complex(t0), complex(t)
    if t == t0:
        return 0j
    dt = t - t0
    taus = np.linspace(0.0, 1.0, n_track + 1)
    q = _canonical_integrand_sq(tr, t0 + taus * dt)
    if not np.all(np.isfinite(q)):
        raise EvaluationError("integrand is singular on the integration path")
    qscale = np.max(np.abs(q))
    if np.min(np.abs(q)) <= 1e-24 * max(qscale, 1e-300):
        raise DegeneratePointError("integrand vanishes on the integration path (degenerate point)")
    track = _track_root4(q) * branch_sign

    def F(tau, ref):
        return _align4(_canonical_integrand_sq(tr, t0 + tau * dt) ** 0.25, ref)

    total = 0j
    local_tol = tol / n_track / abs(dt)
    for k in range(n_track):
        a, b = taus[k], taus[k + 1]
        fa, fb = track[k], track[k + 1]
        fm = F((a + b) / 2, (fa + fb) / 2)
        total += _adaptive_simpson(F, a, b, fa, fm, fb, local_tol, max_depth)
    return complex(total * dt)


def _adaptive_simpson(F, a, b, fa, fm, fb, tol, max_depth):
    """Adaptive Simpson on [a, b]; F(x, ref) returns the branch nearest ref."""
    whole = (b - a) / 6 * (fa + 4 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = 0j
    while stack:
        a, b, fa, fm, fb, whole, tol, depth = stack.pop()
        m = (a + b) / 2
        flm = F((a + m) / 2, (fa + fm) / 2)
        frm = F((m + b) / 2, (fm + fb) / 2)
        left = (m - a) / 6 * (fa + 4 * flm + fm)
        right = (b - m) / 6 * (fm + 4 * frm + fb)
        err = left + right - whole
        if abs(err) <= 15 * tol:
            total += left + right + err / 15
        elif depth >= max_depth:
            raise QuadratureError(f"adaptive Simpson did not converge at depth {max_depth}")
        else:
            stack.append((a, m, fa, flm, fm, left, tol / 2, depth + 1))
            stack.append((m, b, fm, frm, fb, right, tol / 2, depth + 1))
    return total


@dataclass
class CanonicalChart:
    """The map t -> s of canonical coordinates and its numerical inverse.

    ``anchors`` are points whose s-values are computed once; inversion
    starts Newton from the anchor with the nearest s.
    """

    tr: HolTriple
    t0: complex
    anchors: np.ndarray
    branch_sign: int = 1
    s_anchor: np.ndarray = field(init=False, repr=False)
    w_anchor: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.anchors = np.atleast_1d(np.asarray(self.anchors, dtype=complex))
        self.s_anchor = np.array([self.s_of_t(a) for a in self.anchors])
        self.w_anchor = np.array([self.root_at(a) for a in self.anchors])

    def root_at(self, t) -> complex:
        """(4 f^2 g1' g2')^(1/4) at t on the branch continued along [t0, t]."""
        t = complex(t)
        n = 64
        path = self.t0 + np.linspace(0, 1, n + 1) * (t - self.t0)
        return complex(_track_root4(_canonical_integrand_sq(self.tr, path))[-1] * self.branch_sign)

    def s_of_t(self, t) -> complex:
        return canonical_parameter(self.tr, self.t0, t, self.branch_sign)

    def t_of_s(self, s, tol=1e-14, max_iter=60):
        """Return (t, root at t) for each s (scalar or array)."""
        s_arr = np.asarray(s, dtype=complex)
        ts = np.empty(s_arr.shape, dtype=complex)
        ws = np.empty(s_arr.shape, dtype=complex)
        for idx, sv in np.ndenumerate(s_arr):
            ts[idx], ws[idx] = self._invert(complex(sv), tol, max_iter)
        if s_arr.ndim == 0:
            return complex(ts), complex(ws)
        return ts, ws

    def _invert(self, s, tol, max_iter):
        k = int(np.argmin(np.abs(self.s_anchor - s)))
        ta, sa, wa = self.anchors[k], self.s_anchor[k], self.w_anchor[k]
        t = ta + (s - sa) / wa
        for _ in range(max_iter):
            integral, roots = _gauss_segment(self.tr, ta, t, wa)
            w_end = _align4(_canonical_integrand_sq(self.tr, t) ** 0.25, roots[-1])
            step = (sa + integral - s) / w_end
            t = t - step
            if abs(step) <= tol * max(1.0, abs(t)):
                integral, roots = _gauss_segment(self.tr, ta, t, wa)
                w_end = _align4(_canonical_integrand_sq(self.tr, t) ** 0.25, roots[-1])
                return t, w_end
        raise QuadratureError(f"inverting the canonical parameter did not converge at s={s}")


class Reparametrized:
    """s -> H(t(s)) / w(t(s))^k, where w = ds/dt = (4 f^2 g1' g2')^(1/4).

    With H = g and k = 0 this is g written in canonical coordinates.  The
    s-derivative is again of this form:
    d/ds [H w^-k] = (H' - k H Q'/(4Q)) w^-(k+1) with Q = w^4, so every
    derivative stays an expression tree divided by a power of the root.
    """

    def __init__(self, H: HolExpr, chart: CanonicalChart, k: int = 0):
        self.H = H
        self.chart = chart
        self.k = k
        self._deriv: Optional[Reparametrized] = None

    def values(self, s):
        t, w = self.chart.t_of_s(s)
        with np.errstate(all="ignore"):
            return _vals(self.H, t) / w**self.k

    def __call__(self, s):
        return _strict(self.values(s), "reparametrized function")

    def derivative(self) -> "Reparametrized":
        if self._deriv is None:
            tr = self.chart.tr
            Q = holfun.Mul(holfun.Mul(holfun.const(4), holfun.Pow(tr.f, 2)), holfun.Mul(tr.g1.derivative(), tr.g2.derivative()))
            H = holfun.differentiate(self.H)
            if self.k:
                corr = holfun.Div(holfun.Mul(holfun.const(self.k), holfun.Mul(self.H, holfun.differentiate(Q))), holfun.Mul(holfun.const(4), Q))
                H = holfun.Sub(H, corr)
            self._deriv = Reparametrized(H, self.chart, self.k + 1)
        return self._deriv

    def __str__(self):
        return f"({self.H}) o t(s) / w^{self.k}"


def canonicalize(tr: HolTriple, t0, anchors, branch_sign=1) -> tuple:
    """Pair (g1(t(s)), g2(t(s))) in canonical coordinates, plus the chart."""
    chart = CanonicalChart(tr, complex(t0), anchors, branch_sign)
    return HolPair(Reparametrized(tr.g1, chart), Reparametrized(tr.g2, chart)), chart
