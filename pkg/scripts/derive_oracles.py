"""Recompute the frozen reference constants used in ``tests/``.

Everything here is exact symbolic arithmetic (sympy), independent of the
numerical code in ``clarkmodel``.  Run it and compare the printed values with
the literals in ``tests/oracles.py``.

    python scripts/derive_oracles.py
"""

from __future__ import annotations

import sympy as sp

z = sp.symbols("z")


def cauchy_R(atoms, masses):
    return sum(m / (1 - sp.conjugate(x) * z) for x, m in zip(atoms, masses))


def theta0(atoms, masses):
    return sp.cancel(sp.together(1 - 1 / cauchy_R(atoms, masses)))


def clark(theta, alpha):
    """Atoms are roots of theta = alpha; masses are 1/|theta'| there."""
    num, den = sp.fraction(sp.together(theta))
    roots = sp.solve(sp.expand(num - alpha * den), z)
    dth = sp.diff(theta, z)
    out = []
    for r in roots:
        m = sp.nsimplify(sp.simplify(1 / sp.Abs(dth.subs(z, r))))
        out.append((sp.N(sp.arg(r), 20), sp.simplify(m)))
    return sorted(out, key=lambda t: float(t[0]) % float(2 * sp.pi))


def perturbation(atoms, masses, gamma):
    n = len(atoms)
    s = [sp.sqrt(m) for m in masses]
    return sp.Matrix(n, n, lambda j, k: (atoms[k] if j == k else 0) + (gamma - 1) * s[j] * s[k] * atoms[k])


def main() -> None:
    half, q = sp.Rational(1, 2), sp.Rational(1, 4)

    print("theta0 for 3/4 d_1 + 1/4 d_-1:", sp.factor(theta0([1, -1], [3 * q, q])))
    print("theta0 for 1/2 d_1 + 1/2 d_-1:", sp.factor(theta0([1, -1], [half, half])))
    th = theta0([1, -1], [3 * q, q])
    for lam in (sp.Rational(3, 10), sp.Rational(1, 2) * sp.I, sp.Rational(-2, 5) + sp.Rational(1, 5) * sp.I):
        print("  theta0(%s) =" % lam, sp.N(th.subs(z, lam), 18))

    # Mobius with gamma = 1/2 of theta0 = z; Taylor coefficient at 1
    tg = (z - half) / (1 - half * z)
    print("Taylor(1) of (z - 1/2)/(1 - z/2):", sp.series(tg, z, 0, 3).coeff(z, 1))

    print("Clark measure of z^2 at alpha=-1:", clark(z**2, -1))
    print("Clark measure of z(z+1/2)/(1+z/2) at alpha=i:", [(a, sp.N(m, 18)) for a, m in clark(th, sp.I)])

    U = perturbation([1, -1], [half, half], 0)
    print("U_0 for 1/2 d_1 + 1/2 d_-1:", U)

    # Phi* for mu = 1/2 d_1 + 1/2 d_-1, gamma = 0, model basis {1, z}:
    # solve Phi* b = c, Phi* b1 = c1 with c = (1, 0), c1 = (0, 1).
    b = sp.Matrix([sp.sqrt(half), sp.sqrt(half)])
    b1 = sp.Matrix([sp.sqrt(half), -sp.sqrt(half)])
    P = sp.Matrix([[1, 0], [0, 1]]) * sp.Matrix.hstack(b, b1).inv()
    M = sp.Matrix([[0, 0], [1, 0]])
    print("Phi* (2x2 brute force):", sp.simplify(P))
    print("  intertwining residual:", sp.simplify(M * P - P * U))

    # V_alpha at alpha=-1 via the spectral theorem: rows are eigenvectors of
    # U_{-1} (sorted by angle) with phases making <b, v> > 0.
    Um = perturbation([1, -1], [half, half], -1)
    rows = []
    for val, _, vecs in Um.eigenvects():
        v = vecs[0] / vecs[0].norm()
        ph = (v.H * b)[0]
        v = v * ph / sp.Abs(ph)
        rows.append((float(sp.arg(val)) % float(2 * sp.pi), sp.simplify(v.H)))
    rows.sort(key=lambda t: t[0])
    print("V_{-1}:", sp.simplify(sp.Matrix.vstack(*[r for _, r in rows])))


if __name__ == "__main__":
    main()
