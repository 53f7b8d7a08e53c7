"""Transformations of generating pairs: motions, coordinate changes,
homotheties, the associated family, and the tests built on Moebius fits.

A Moebius map here is always g -> (a g + conj(b)) / (b g + conj(a)) with
|a|^2 - |b|^2 = +-1; (a, b) and (-a, -b) give the same map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, FitError, ValidityError
from .holfun import (
    Z,
    HolExpr,
    _add,
    _div,
    _mul,
    affine,
    conjugate_coefficients,
    const,
    substitute,
)
from .invariants import invariant_field
from .weierstrass import GridSpec, HolPair, validity_report

SIGN_TOL = 1e-12
DELTAS = (1, -1, 1j, -1j)


@dataclass(frozen=True)
class MoebiusParams:
    a: complex
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        d = abs(self.a) ** 2 - abs(self.b) ** 2
        if abs(abs(d) - 1) > SIGN_TOL:
            raise ValueError(f"|a|^2 - |b|^2 = {d!r}, expected +1 or -1")

    @property
    def sign(self) -> int:
        return 1 if abs(self.a) > abs(self.b) else -1

    @classmethod
    def normalized(cls, a, b) -> "MoebiusParams":
        d = abs(a) ** 2 - abs(b) ** 2
        if d == 0:
            raise ValueError("|a| = |b|: not a Moebius map of the disc")
        s = np.sqrt(abs(d))
        return cls(a / s, b / s)

    def __call__(self, w):
        return (self.a * w + np.conj(self.b)) / (self.b * w + np.conj(self.a))

    def canonical(self) -> "MoebiusParams":
        """Representative of {(a, b), (-a, -b)} with the larger of |a|, |b| on the right half-plane."""
        lead = self.a if abs(self.a) >= abs(self.b) else self.b
        if lead.real < 0 or (lead.real == 0 and lead.imag < 0):
            return MoebiusParams(-self.a, -self.b)
        return self

    def to_dict(self) -> dict:
        return {"a": [self.a.real, self.a.imag], "b": [self.b.real, self.b.imag]}

    @classmethod
    def from_dict(cls, d) -> "MoebiusParams":
        try:
            return cls(complex(*d["a"]), complex(*d["b"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad Moebius parameters {d!r}: {exc}") from None


IDENTITY = MoebiusParams(1, 0)


@dataclass(frozen=True)
class MotionSpec:
    """Generator-level description of a motion.

    Without ``swap``: g1 -> m1(g1), g2 -> m2(g2).  With ``swap``:
    g1 -> m1(g2), g2 -> m2(g1).  Both maps must share their sign.
    """

    m1: MoebiusParams
    m2: MoebiusParams
    swap: bool = False

    def __post_init__(self):
        if self.m1.sign != self.m2.sign:
            raise ConfigError("m1 and m2 must have the same sign of |a|^2 - |b|^2")

    @classmethod
    def identity(cls) -> "MotionSpec":
        return cls(IDENTITY, IDENTITY)

    @property
    def sign(self) -> int:
        return self.m1.sign

    @property
    def component(self) -> tuple:
        """(proper, orthochronous)."""
        return (not self.swap, (self.sign == 1) == (not self.swap))

    def to_dict(self) -> dict:
        return {"m1": self.m1.to_dict(), "m2": self.m2.to_dict(), "swap": bool(self.swap)}

    @classmethod
    def from_dict(cls, d) -> "MotionSpec":
        try:
            m1, m2 = d["m1"], d["m2"]
        except (KeyError, TypeError):
            raise ConfigError("motion spec needs 'm1' and 'm2'") from None
        swap = d.get("swap", False)
        if not isinstance(swap, bool):
            raise ConfigError("'swap' must be a boolean")
        return cls(MoebiusParams.from_dict(m1), MoebiusParams.from_dict(m2), swap)


def moebius_apply(m: MoebiusParams, g: HolExpr) -> HolExpr:
    if m.b == 0 and m.a == 1:
        return g
    num = _add(_mul(const(m.a), g), const(m.b.conjugate()))
    den = _add(_mul(const(m.b), g), const(m.a.conjugate()))
    return _div(num, den)


def _checked(p: HolPair, grid: GridSpec | None) -> HolPair:
    if grid is not None:
        rep = validity_report(p, grid)
        if not rep.all_valid:
            raise ValidityError(f"transformed pair is not valid on the grid: {rep.counts()}")
    return p


def motion_transform_pair(ms: MotionSpec, p: HolPair, grid: GridSpec | None = None) -> HolPair:
    """Apply a motion to the pair; with ``grid``, also check validity there."""
    src1, src2 = (p.g2, p.g1) if ms.swap else (p.g1, p.g2)
    q = HolPair(moebius_apply(ms.m1, src1), moebius_apply(ms.m2, src2), p.branch_sign, p.second_type)
    return _checked(q, grid)


def _compose(p: HolPair, inner: HolExpr) -> HolPair:
    return HolPair(substitute(p.g1, inner), substitute(p.g2, inner), p.branch_sign, p.second_type)


def coordinate_change_pair(p: HolPair, delta, c, antiholo: bool = False) -> HolPair:
    """Pair in the coordinate s with t = delta s + c, or t = delta conj(s) + c.

    The antiholomorphic case uses conj(g(delta conj(s) + c)) = gc(conj(delta) s + conj(c)),
    where gc has conjugated coefficients, so the result is still a tree.
    """
    delta, c = complex(delta), complex(c)
    if delta not in DELTAS:
        raise ValueError(f"delta must be one of +-1, +-i, got {delta!r}")
    if not antiholo:
        if delta == 1 and c == 0:
            return p
        return _compose(p, affine(delta, c))
    inner = affine(delta.conjugate(), c.conjugate())
    one = const(1)
    g1 = _div(one, substitute(conjugate_coefficients(p.g1), inner))
    g2 = _div(one, substitute(conjugate_coefficients(p.g2), inner))
    return HolPair(g1, g2, p.branch_sign, p.second_type)


def homothety_pair(p: HolPair, k) -> HolPair:
    if not k > 0:
        raise ValueError(f"homothety coefficient must be positive, got {k!r}")
    if k == 1:
        return p
    return _compose(p, _mul(const(1 / np.sqrt(k)), Z))


def associated_pair(p: HolPair, theta) -> HolPair:
    if theta == 0:
        return p
    return _compose(p, _mul(const(np.exp(0.5j * theta)), Z))


# ------------------------------------------------------------------ fitting


def _three_points(src, dst):
    """Three finite sample pairs, well separated in the source values."""
    src, dst = np.ravel(src), np.ravel(dst)
    ok = np.isfinite(src) & np.isfinite(dst)
    src, dst = src[ok], dst[ok]
    if src.size < 3:
        raise FitError("fewer than three finite sample points")
    i = 0
    j = int(np.argmax(np.abs(src - src[i])))
    k = int(np.argmax(np.minimum(np.abs(src - src[i]), np.abs(src - src[j]))))
    if len({i, j, k}) < 3:
        raise FitError("sample values are not separated enough to fit a Moebius map")
    return src[[i, j, k]], dst[[i, j, k]]


def fit_moebius(src, dst) -> MoebiusParams:
    """(a, b) with dst = (a src + conj(b)) / (b src + conj(a)), from three samples.

    Solves r*s*d + q*d - p*s - b' = 0 for (p, b', r, q) ~ (a, conj b, b, conj a),
    then fixes the phase so that q = conj(p) and normalizes.
    """
    s, d = _three_points(src, dst)
    A = np.column_stack([-s, -np.ones(3), s * d, d])
    _, sv, vh = np.linalg.svd(A)
    p, bc, r, q = np.conj(vh[-1])
    # (p, bc, r, q) = lam * (a, conj b, b, conj a); pick the better-conditioned pair for the phase.
    ratio = q / np.conj(p) if abs(p) >= abs(r) else bc / np.conj(r)
    if not np.isfinite(ratio) or ratio == 0:
        raise FitError("degenerate Moebius fit")
    phase = np.sqrt(ratio / abs(ratio))
    a, b = p / phase, r / phase
    try:
        return MoebiusParams.normalized(a, b).canonical()
    except ValueError as exc:
        raise FitError(str(exc)) from None


def moebius_error(m: MoebiusParams, src, dst) -> float:
    err = np.abs(m(np.asarray(src)) - np.asarray(dst)) / np.maximum(1, np.abs(dst))
    return float(np.nanmax(err))


def hyperplane_test(p: HolPair, grid: GridSpec, tol: float = 1e-9):
    """(True, m) when the surface lies in a hyperplane, i.e. g2 = m(g1); else (False, None).

    The kappa test is scaled by max(1, max K) so that large curvature near
    |g| = 1 does not swamp the rounding level.
    """
    inv = invariant_field(p, grid)
    m = inv.valid
    if not m.any():
        raise ValidityError("no valid grid points")
    scale = max(1.0, float(np.max(inv.K[m])))
    if float(np.max(np.abs(inv.kappa[m]))) > tol * scale:
        return False, None
    t = grid.points()[m]
    g1, g2 = p.g1.values(t), p.g2.values(t)
    fit = fit_moebius(g1, g2)
    err = moebius_error(fit, g1, g2)
    if err > tol:
        raise FitError(f"kappa vanishes but no Moebius map fits g2 = m(g1) (error {err:.3g})")
    return True, fit


def _fields_agree(a, b, mask, tol) -> bool:
    for x, y in ((a.K, b.K), (a.kappa, b.kappa)):
        rms = float(np.sqrt(np.mean(x[mask] ** 2)))
        if float(np.max(np.abs(x[mask] - y[mask]))) > tol * max(rms, 1e-300):
            return False
    return True


def equivalence_test(pA: HolPair, pB: HolPair, grid: GridSpec, tol: float = 1e-8):
    """Moebius maps (m1, m2) with gB_j = m_j(gA_j) when the (K, kappa) fields agree, else None.

    Each map is reported as its canonical representative; a motion is only
    determined up to negating both at once.
    """
    a, b = invariant_field(pA, grid), invariant_field(pB, grid)
    mask = a.valid & b.valid
    if not mask.any():
        raise ValidityError("the pairs have no common valid grid points")
    if not _fields_agree(a, b, mask, tol):
        return None
    t = grid.points()[mask]
    out = []
    for ga, gb in ((pA.g1, pB.g1), (pA.g2, pB.g2)):
        src, dst = ga.values(t), gb.values(t)
        fit = fit_moebius(src, dst)
        err = moebius_error(fit, src, dst)
        if err > max(tol, 1e-9):
            raise FitError(f"invariant fields agree but generators are not Moebius related (error {err:.3g})")
        out.append(fit)
    return tuple(out)
