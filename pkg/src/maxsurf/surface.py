"""Surface patches from Phi: the primitive Psi, x_theta = Re(exp(-i theta) Psi),
finite-difference checks and export."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePointError, QuadratureError
from .invariants import invariant_field
from .neutralgeo import ETA
from .pdeverify import laplacian_fd
from .weierstrass import GridSpec, HolPair, canonical_data, degenerate_points, phi_general

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
PATH_TOL = 1e-9


# ------------------------------------------------------------------ Phi sampling

def _grid_root(p: HolPair, grid: GridSpec, base_index):
    """sqrt(+-g1' g2') on the grid, continued from the base node (with branch_sign)."""
    d = canonical_data(p, grid.points(), base_index)
    with np.errstate(all="ignore"):
        return 1.0 / (2.0 * d.f)


class _PhiSampler:
    """Phi at arbitrary points, on the branch fixed by the grid's continued root."""

    def __init__(self, source, grid: GridSpec, base_index):
        self.source = source
        self.grid = grid
        self.root = _grid_root(source, grid, base_index) if isinstance(source, HolPair) else None

    def _ref(self, anchor):
        g = self.grid
        j = np.clip(np.rint((anchor.real - g.u0) / g.h).astype(int), 0, g.nu - 1)
        i = np.clip(np.rint((anchor.imag - g.v0) / g.h).astype(int), 0, g.nv - 1)
        return self.root[i, j]

    def __call__(self, t, anchor):
        """Phi(t), shape t.shape + (4,); ``anchor`` (broadcastable to t) selects the branch."""
        with np.errstate(all="ignore"):
            if self.root is None:
                phi = phi_general(self.source, t)
            else:
                ref = np.broadcast_to(self._ref(anchor), t.shape)
                phi = canonical_data(self.source, t, ref=ref).phi
        if not np.all(np.isfinite(phi)):
            raise DegeneratePointError("Phi is not finite on the integration path (degenerate or singular point)")
        return phi


# ------------------------------------------------------------------ quadrature

def _gl(F, a, b, anchor):
    mid, half = (a + b) / 2, (b - a) / 2
    t = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = F(t, anchor[:, None])
    return half[:, None] * np.einsum("k,nkc->nc", _GL_W, vals)


def _segments(F, a, b, anchor, tol, depth=30, whole=None):
    """Integrals of Phi over straight segments [a_n, b_n], halving where needed."""
    if a.size == 0:
        return np.zeros((0, 4), dtype=complex)
    if whole is None:
        whole = _gl(F, a, b, anchor)
    m = (a + b) / 2
    left, right = _gl(F, a, m, anchor), _gl(F, m, b, anchor)
    halves = left + right
    err = np.max(np.abs(halves - whole), axis=1)
    bad = err > tol * np.maximum(1.0, np.max(np.abs(halves), axis=1))
    if not bad.any():
        return halves
    if depth == 0:
        raise QuadratureError(f"quadrature did not converge on {int(bad.sum())} segments")
    out = halves.copy()
    out[bad] = (_segments(F, a[bad], m[bad], anchor[bad], tol, depth - 1, left[bad])
                + _segments(F, m[bad], b[bad], anchor[bad], tol, depth - 1, right[bad]))
    return out


def _cumulative(F, pts, anchors, tol):
    """Running integral of Phi along the polyline pts (shape (..., n)), zero at index 0."""
    a, b = pts[..., :-1], pts[..., 1:]
    flat = _segments(F, a.ravel(), b.ravel(), anchors[..., :-1].ravel(), tol)
    inc = flat.reshape(a.shape + (4,))
    zero = np.zeros(pts.shape[:-1] + (1, 4), dtype=complex)
    return np.concatenate([zero, np.cumsum(inc, axis=-2)], axis=-2)


def _with_base(nodes, x0):
    """Sorted breakpoints nodes U {x0}, and the positions of the nodes and of x0."""
    pts = np.union1d(nodes, [x0])
    return pts, np.searchsorted(pts, nodes), int(np.searchsorted(pts, x0))


def _l_path(F, grid: GridSpec, t0, horizontal_first: bool, tol):
    u, v = grid.u, grid.v
    x0, y0 = t0.real, t0.imag
    xs, ui, xi0 = _with_base(u, x0)
    ys, vi, yi0 = _with_base(v, y0)
    if horizontal_first:
        leg1 = xs + 1j * y0
        c1 = _cumulative(F, leg1, leg1, tol)
        first = c1[ui] - c1[xi0]                                    # (nu, 4)
        legs = u[:, None] + 1j * ys[None, :]                        # column u_j, running in v
        c2 = _cumulative(F, legs, legs, tol)                        # (nu, len(ys), 4)
        second = c2[:, vi] - c2[:, yi0][:, None]                    # (nu, nv, 4)
        return np.transpose(first[:, None] + second, (1, 0, 2))
    leg1 = x0 + 1j * ys
    c1 = _cumulative(F, leg1, leg1, tol)
    first = c1[vi] - c1[yi0]                                        # (nv, 4)
    legs = xs[None, :] + 1j * v[:, None]                            # row v_i, running in u
    c2 = _cumulative(F, legs, legs, tol)
    second = c2[:, ui] - c2[:, xi0][:, None]
    return first[:, None] + second


def integrate_psi(source, grid: GridSpec, t0, tol: float = 1e-13):
    """Psi on the grid with Psi(t0) = 0, and the largest disagreement between the two L-paths.

    Psi is integrated along t0 -> Re t + i Im t0 -> t, cell by cell with
    16-point Gauss-Legendre, halving segments where the two-halves estimate
    disagrees.  A pair with a degenerate point inside the rectangle is
    rejected.  The other order (vertical leg first) is computed as well;
    a disagreement above 1e-9 (relative to max(1, |Psi|)) raises QuadratureError.
    """
    t0 = complex(t0)
    if not (grid.u0 <= t0.real <= grid.u1 and grid.v0 <= t0.imag <= grid.v1):
        raise ValueError(f"base point {t0} lies outside the grid")
    if isinstance(source, HolPair):
        bad = degenerate_points(source, grid)
        if bad:
            raise DegeneratePointError(f"degenerate point {bad[0]:.6g} inside the grid: Phi is not single-valued there")
    F = _PhiSampler(source, grid, grid.nearest_index(t0))
    psi = _l_path(F, grid, t0, True, tol)
    other = _l_path(F, grid, t0, False, tol)
    scale = np.maximum(1.0, np.max(np.abs(psi), axis=-1))
    disc = float(np.max(np.max(np.abs(psi - other), axis=-1) / scale))
    if disc > PATH_TOL:
        raise QuadratureError(f"L-path results disagree by {disc:.3g}; Phi may not be holomorphic on the grid")
    return psi, disc


# ------------------------------------------------------------------ patches

@dataclass
class SurfacePatch:
    grid: GridSpec
    t0: complex
    theta: float
    psi: np.ndarray
    x: np.ndarray
    provenance: dict = field(default_factory=dict)


def _describe(source) -> dict:
    return source.describe() if hasattr(source, "describe") else {"kind": type(source).__name__}


def build_patch(source, grid: GridSpec, t0, theta: float = 0.0) -> SurfacePatch:
    psi, disc = integrate_psi(source, grid, t0)
    x = np.real(np.exp(-1j * theta) * psi)
    prov = dict(_describe(source), path_discrepancy=disc)
    return SurfacePatch(grid, complex(t0), float(theta), psi, x, prov)


def grid_phi(source, grid: GridSpec, t0) -> np.ndarray:
    """Phi at the grid nodes, on the same branch build_patch integrates."""
    F = _PhiSampler(source, grid, grid.nearest_index(complex(t0)))
    t = grid.points()
    return F(t, t)


def _dot(a, b):
    return np.einsum("...i,ij,...j->...", a, ETA, b)


@dataclass
class PatchReport:
    h: float
    x_u: float
    x_v: float
    E_minus_G: float
    F: float
    harmonic: float
    isometry: float
    E_vs_canonical: float | None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_patch(patch: SurfacePatch, source) -> PatchReport:
    """Finite-difference consistency of a patch with Phi (interior nodes only)."""
    h = patch.grid.h
    x = patch.x
    phi = np.exp(-1j * patch.theta) * grid_phi(source, patch.grid, patch.t0)
    inner = (slice(1, -1), slice(1, -1))
    xu = (x[1:-1, 2:] - x[1:-1, :-2]) / (2 * h)
    xv = (x[2:, 1:-1] - x[:-2, 1:-1]) / (2 * h)
    E, F, G = _dot(xu, xu), _dot(xu, xv), _dot(xv, xv)
    lap = np.stack([laplacian_fd(x[..., k], h)[inner] for k in range(4)], axis=-1)
    re0 = np.real(grid_phi(source, patch.grid, patch.t0))
    e_theta = _dot(phi.real, phi.real)
    e_0 = _dot(re0, re0)
    ecan = None
    if isinstance(source, HolPair):
        ecan = float(np.max(np.abs(E - invariant_field(source, patch.grid).E[inner])))
    return PatchReport(
        h=h,
        x_u=float(np.max(np.abs(xu - phi.real[inner]))),
        x_v=float(np.max(np.abs(xv + phi.imag[inner]))),
        E_minus_G=float(np.max(np.abs(E - G))),
        F=float(np.max(np.abs(F))),
        harmonic=float(np.max(np.abs(lap))),
        isometry=float(np.max(np.abs(e_theta - e_0) / np.maximum(1.0, np.abs(e_0)))),
        E_vs_canonical=ecan,
    )


# ------------------------------------------------------------------ export

def _fmt(x) -> str:
    return format(float(x), ".17g")


def export_patch(patch: SurfacePatch, fmt: str = "csv4d") -> bytes:
    """csv4d: ``u,v,x1,x2,x3,x4`` rows with u running fastest.  json: grid, t0, theta, points, provenance."""
    g = patch.grid
    if fmt == "csv4d":
        u, v = g.u, g.v
        buf = io.StringIO()
        buf.write("u,v,x1,x2,x3,x4\n")
        for i in range(g.nv):
            vi = _fmt(v[i])
            for j in range(g.nu):
                buf.write(f"{_fmt(u[j])},{vi},{','.join(_fmt(c) for c in patch.x[i, j])}\n")
        return buf.getvalue().encode()
    if fmt == "json":
        doc = {
            "grid": g.to_dict(),
            "t0": [patch.t0.real, patch.t0.imag],
            "theta": patch.theta,
            "points": patch.x.reshape(-1, 4).tolist(),
            "provenance": patch.provenance,
        }
        return json.dumps(doc).encode()
    raise ValueError(f"unknown export format {fmt!r}; use 'csv4d' or 'json'")


def read_patch_csv(data: bytes) -> dict:
    lines = data.decode().strip().splitlines()
    if lines[0] != "u,v,x1,x2,x3,x4":
        raise ValueError("not a csv4d patch file")
    arr = np.array([[float(s) for s in ln.split(",")] for ln in lines[1:]])
    nu = int(np.sum(arr[:, 1] == arr[0, 1]))
    nv = arr.shape[0] // nu
    return {"u": arr[:, 0].reshape(nv, nu), "v": arr[:, 1].reshape(nv, nu), "x": arr[:, 2:].reshape(nv, nu, 4)}


def read_patch_json(data: bytes) -> dict:
    doc = json.loads(data)
    g = GridSpec(**doc["grid"])
    doc["x"] = np.array(doc["points"], dtype=float).reshape(g.nv, g.nu, 4)
    doc["grid"] = g
    doc["t0"] = complex(*doc["t0"])
    return doc

