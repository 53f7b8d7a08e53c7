"""Linear algebra of C^4 with the neutral signature (+, +, -, -).

Vectors are numpy arrays whose last axis has length 4; every product is
vectorised over the leading axes, so a whole grid of Phi values can be
passed at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMetricError, SpinorError

ETA = np.diag([1.0, 1.0, -1.0, -1.0])
SIGNATURE = np.array([1.0, 1.0, -1.0, -1.0])
J2 = np.diag([1.0, -1.0])

# absolute tolerance for O(1) identity checks and relative tolerance otherwise
TOLERANCES = {"identity_abs": 1e-12, "relative": 1e-10, "metric_floor": 1e-14}


def quad(c1, c2, c3, c4) -> np.ndarray:
    """Stack four complex scalars or equally shaped arrays into a QuadC array."""
    parts = np.broadcast_arrays(*(np.asarray(c, dtype=complex) for c in (c1, c2, c3, c4)))
    return np.stack(parts, axis=-1)


def bilinear(a, b):
    """a1 b1 + a2 b2 - a3 b3 - a4 b4 (no conjugation)."""
    return np.sum(np.asarray(a) * np.asarray(b) * SIGNATURE, axis=-1)


def herm_norm_sq(a):
    """|a1|^2 + |a2|^2 - |a3|^2 - |a4|^2."""
    a = np.asarray(a)
    return np.sum((a.real**2 + a.imag**2) * SIGNATURE, axis=-1)


def normal_project(phi, phiP, floor=None):
    """Component of phiP orthogonal to span{phi, conj(phi)}.

    Uses phi^2 = 0, so the projection onto the normal plane only needs the
    coefficient (phiP . conj(phi)) / ||phi||^2 in front of phi.
    """
    floor = TOLERANCES["metric_floor"] if floor is None else floor
    phi = np.asarray(phi, dtype=complex)
    phiP = np.asarray(phiP, dtype=complex)
    n2 = herm_norm_sq(phi)
    if np.any(n2 <= floor):
        raise DegenerateMetricError(f"||Phi||^2 = {np.min(n2):.3e} is not positive")
    coef = bilinear(phiP, np.conj(phi)) / n2
    return phiP - coef[..., None] * phi


def second_fundamental(phi, phiP):
    """Return (sigma(x_u, x_u), sigma(x_u, x_v)) as real 4-vectors."""
    perp = normal_project(phi, phiP)
    return perp.real.copy(), -perp.imag


def det4(a, b, c, d):
    """Determinant of the 4x4 matrix with columns a, b, c, d."""
    m = np.stack([np.asarray(v, dtype=complex) for v in (a, b, c, d)], axis=-1)
    return np.linalg.det(m)


def spinor_matrix(x):
    """S = [[x3 + i x4, x1 + i x2], [x1 - i x2, x3 - i x4]]; det S = -x.x."""
    x = np.asarray(x, dtype=complex)
    x1, x2, x3, x4 = (x[..., k] for k in range(4))
    row0 = np.stack([x3 + 1j * x4, x1 + 1j * x2], axis=-1)
    row1 = np.stack([x1 - 1j * x2, x3 - 1j * x4], axis=-1)
    return np.stack([row0, row1], axis=-2)


def spinor_vector(S):
    """Inverse of spinor_matrix, valid for any complex 2x2 matrix."""
    S = np.asarray(S, dtype=complex)
    s11, s12, s21, s22 = S[..., 0, 0], S[..., 0, 1], S[..., 1, 0], S[..., 1, 1]
    return np.stack([(s12 + s21) / 2, (s12 - s21) / 2j, (s11 + s22) / 2, (s11 - s22) / 2j], axis=-1)


@dataclass(frozen=True)
class Spinor2:
    """Matrix [[conj(a), b], [conj(b), a]] with |a|^2 - |b|^2 = sign."""

    a: complex
    b: complex
    sign: int = 1

    def __post_init__(self):
        pd = abs(self.a) ** 2 - abs(self.b) ** 2
        if self.sign not in (1, -1) or abs(pd - self.sign) > 1e-12 * max(1.0, abs(self.a) ** 2):
            raise SpinorError(f"|a|^2 - |b|^2 = {pd!r} does not match sign {self.sign}")

    @property
    def matrix(self) -> np.ndarray:
        a, b = complex(self.a), complex(self.b)
        return np.array([[a.conjugate(), b], [b.conjugate(), a]])

    @property
    def pseudo_det(self) -> float:
        return abs(self.a) ** 2 - abs(self.b) ** 2

    @classmethod
    def from_matrix(cls, M, tol=1e-12) -> "Spinor2":
        M = np.asarray(M, dtype=complex)
        a, b = complex(M[1, 1]), complex(M[0, 1])
        if abs(M[0, 0] - a.conjugate()) > tol * (1 + abs(a)) or abs(M[1, 0] - b.conjugate()) > tol * (1 + abs(b)):
            raise SpinorError("matrix is not of the form [[conj(a), b], [conj(b), a]]")
        return cls(a, b, int(np.sign(abs(a) ** 2 - abs(b) ** 2)))

    def __matmul__(self, other: "Spinor2") -> "Spinor2":
        return Spinor2.from_matrix(self.matrix @ other.matrix)

    def __neg__(self) -> "Spinor2":
        return Spinor2(-self.a, -self.b, self.sign)


def spinor_U(a, b) -> Spinor2:
    """Left factor built from Moebius parameters (a1, b1)."""
    a, b = complex(a), complex(b)
    return Spinor2(a, b, int(np.sign(abs(a) ** 2 - abs(b) ** 2)))


def spinor_V(a, b) -> Spinor2:
    """Right factor [[conj(a2), -b2], [-conj(b2), a2]] built from (a2, b2)."""
    a, b = complex(a), complex(b)
    return Spinor2(a, -b, int(np.sign(abs(a) ** 2 - abs(b) ** 2)))


def pseudo_adjoint(M) -> np.ndarray:
    """Hermitian conjugate with respect to the form diag(1, -1) on C^2."""
    return J2 @ np.conj(np.asarray(M)).T @ J2


@dataclass(frozen=True)
class Motion4:
    """x -> A x + translation, with A in O(2,2)."""

    A: np.ndarray
    proper: int = 1
    orthochronous: int = 1
    translation: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def apply(self, x):
        return np.asarray(x) @ self.A.T + self.translation


def motion_from_matrix(A, translation=None, tol=1e-10) -> Motion4:
    """Wrap A, checking A^T eta A = eta and reading off its component flags."""
    A = np.asarray(A, dtype=float)
    err = np.max(np.abs(A.T @ ETA @ A - ETA))
    if err > tol * max(1.0, np.max(np.abs(A)) ** 2):
        raise ValueError(f"matrix is not in O(2,2): defect {err:.3e}")
    proper = 1 if np.linalg.det(A) > 0 else -1
    # orientation of the time-like plane span{e3, e4}
    orth = 1 if np.linalg.det(A[2:, 2:]) > 0 else -1
    t = np.zeros(4) if translation is None else np.asarray(translation, dtype=float)
    return Motion4(A, proper, orth, t)


def spinor_to_motion(U: Spinor2, V: Spinor2, tol=1e-12) -> Motion4:
    """Matrix A with spinor_matrix(A x) = U spinor_matrix(x) V* for all x."""
    for name, s in (("U", U), ("V", V)):
        if s.sign != 1:
            raise SpinorError(f"{name} is not in SU(1,1): pseudo-determinant {s.pseudo_det:.6g}")
    Um, Vs = U.matrix, pseudo_adjoint(V.matrix)
    cols = []
    for k in range(4):
        e = np.zeros(4)
        e[k] = 1.0
        cols.append(spinor_vector(Um @ spinor_matrix(e) @ Vs))
    A = np.stack(cols, axis=-1)
    scale = max(1.0, np.max(np.abs(A)))
    if np.max(np.abs(A.imag)) > tol * scale * 10:
        raise SpinorError("spinor action did not produce a real matrix")
    return motion_from_matrix(A.real, tol=max(tol, 1e-12) * 100)
