"""Symbolic oracle for the manufactured quad-curl solution.

Differentiates u = curl(g, g, 0), g = sin^3(pi x) sin^3(pi y) sin^3(pi z)
with sympy and prints u, curl u, grad curl u, f = -curl(Laplace(curl u))
and psi = (Laplace^2 g, Laplace^2 g, 0) at fixed sample points. The printed values are frozen into
tests/test_manufactured.cpp.
"""
import sympy as sp

x, y, z = sp.symbols("x y z")
X = (x, y, z)
g = sp.sin(sp.pi * x) ** 3 * sp.sin(sp.pi * y) ** 3 * sp.sin(sp.pi * z) ** 3


def curl(v):
    return [sp.diff(v[2], y) - sp.diff(v[1], z),
            sp.diff(v[0], z) - sp.diff(v[2], x),
            sp.diff(v[1], x) - sp.diff(v[0], y)]


def lap(s):
    return sum(sp.diff(s, c, 2) for c in X)


u = curl([g, g, sp.Integer(0)])
cu = curl(u)
sigma = [[sp.diff(cu[r], X[s]) for s in range(3)] for r in range(3)]
f = [-c for c in curl([lap(c) for c in cu])]
psi = [lap(lap(g)), lap(lap(g)), sp.Integer(0)]

points = [(0.3, 0.6, 0.45), (0.1, 0.25, 0.8), (0.71, 0.33, 0.52)]
for p in points:
    sub = dict(zip(X, p))
    vals = lambda e: [float(sp.N(c.subs(sub), 30)) for c in e]
    print("point", p)
    print("  u    ", ", ".join(f"{v:.17g}" for v in vals(u)))
    print("  curlu", ", ".join(f"{v:.17g}" for v in vals(cu)))
    print("  sigma", ", ".join(f"{v:.17g}" for v in vals([e for row in sigma for e in row])))
    print("  f    ", ", ".join(f"{v:.17g}" for v in vals(f)))
    print("  psi  ", ", ".join(f"{v:.17g}" for v in vals(psi)))
