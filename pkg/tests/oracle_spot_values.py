"""High-precision reference values, computed independently of the library.

Works from Phi and Phi' directly (no closed forms in g1, g2):
E = ||Phi||^2 / 2, K = -4 ||Phi'_perp||^2 / ||Phi||^4,
kappa = -4 det(Phi, conj Phi, Phi', conj Phi') / ||Phi||^6,
and nu, mu from K, kappa.  Run as a script to print the table.
"""

import mpmath as mp

mp.mp.dps = 50
SIG = (1, 1, -1, -1)


def _dot(a, b):
    return sum(s * x * y for s, x, y in zip(SIG, a, b))


def _hnorm(a):
    return mp.re(_dot(a, [mp.conj(x) for x in a]))


def _phi_pair(g1, g2, dg1, dg2, ddg1, ddg2, t):
    """Canonical Phi and Phi' from pointwise values of g_j and derivatives."""
    w = dg1(t) * dg2(t)
    f = 1 / (2 * mp.sqrt(w))
    dw = ddg1(t) * dg2(t) + dg1(t) * ddg2(t)
    df = -f * dw / (2 * w)
    a, b, da, db = g1(t), g2(t), dg1(t), dg2(t)
    phi = [f * (a * b + 1), 1j * f * (a * b - 1), f * (a + b), 1j * f * (a - b)]
    s = da * b + a * db
    dphi = [
        df * (a * b + 1) + f * s,
        1j * (df * (a * b - 1) + f * s),
        df * (a + b) + f * (da + db),
        1j * (df * (a - b) + f * (da - db)),
    ]
    return phi, dphi


def invariants_from_phi(phi, dphi):
    n2 = _hnorm(phi)
    conj = [mp.conj(x) for x in phi]
    coef = _dot(dphi, conj) / n2
    perp = [d - coef * p for d, p in zip(dphi, phi)]
    K = -4 * _hnorm(perp) / n2**2
    m = mp.matrix(4, 4)
    cols = [phi, conj, dphi, [mp.conj(x) for x in dphi]]
    for j, col in enumerate(cols):
        for i in range(4):
            m[i, j] = col[i]
    kappa = mp.re(-4 * mp.det(m) / n2**3)
    nu = (mp.sqrt(K + kappa) + mp.sqrt(K - kappa)) / 2
    mu = (mp.sqrt(K + kappa) - mp.sqrt(K - kappa)) / 2
    return {"E": n2 / 2, "K": K, "kappa": kappa, "nu": nu, "mu": mu}


def spot_values():
    one = lambda t: mp.mpf(1)  # noqa: E731
    zero = lambda t: mp.mpf(0)  # noqa: E731
    a = invariants_from_phi(
        *_phi_pair(lambda t: t, lambda t: 2 * t, one, lambda t: mp.mpf(2), zero, zero, mp.mpf(2))
    )
    b = invariants_from_phi(
        *_phi_pair(lambda t: 2 + t, lambda t: 2 * mp.exp(t), one, lambda t: 2 * mp.exp(t), zero,
                   lambda t: 2 * mp.exp(t), mp.mpf(0))
    )
    return {"z,2z@2": a, "2+z,2exp(z)@0": b}


if __name__ == "__main__":
    for name, vals in spot_values().items():
        print(name)
        for k, v in vals.items():
            print(f"  {k:6s} {mp.nstr(v, 30)}")
