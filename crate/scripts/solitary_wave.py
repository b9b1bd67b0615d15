"""Derive the 1D flat-bottom solitary-wave constants used by the reference solver.

Ansatz: zeta = a sech^2(kappa (x - c t)), h = 1 + eps zeta, V = c zeta / h.
With y = tanh(kappa X) every term of the momentum equation is rational in y;
the numerator must vanish identically, which fixes c and kappa.

Momentum equation (original time, b = 0):
    (h - (mu/3) d_x h^3 d_x) d_t V + h d_x zeta + eps h V d_x V
        + (mu eps / 3) d_x (h^3 (-V d_x + d_x V) d_x V) = 0
Mass: d_t zeta + d_x (h V) = 0 holds by construction of V.

Run: python3 scripts/solitary_wave.py
"""

import sympy as sp

a, eps, mu, c, kappa = sp.symbols("a epsilon mu c kappa", positive=True)
y = sp.symbols("y")


def d_x(expr):
    # d/dX with y = tanh(kappa X)
    return sp.together(kappa * (1 - y**2) * sp.diff(expr, y))


zeta = a * (1 - y**2)
h = 1 + eps * zeta
V = c * zeta / h
# travelling wave: d_t = -c d_X
dV_t = -c * d_x(V)

div_v = d_x(V)
dv_term = -V * d_x(div_v) + div_v * div_v
momentum = (
    h * dV_t
    - mu / 3 * d_x(h**3 * d_x(dV_t))
    + h * d_x(zeta)
    + eps * h * V * d_x(V)
    + mu * eps / 3 * d_x(h**3 * dv_term)
)
mass = -c * d_x(zeta) + d_x(h * V)

num = sp.numer(sp.together(sp.simplify(momentum)))
coeffs = sp.Poly(sp.expand(num), y).coeffs()
sol = sp.solve([sp.factor(q) for q in coeffs], [c, kappa], dict=True)

print("mass residual:", sp.simplify(mass))
for s in sol:
    print("c     =", sp.simplify(s[c]))
    print("kappa =", sp.simplify(s[kappa]))

expect_c = sp.sqrt(1 + eps * a)
expect_k = sp.sqrt(3 * eps * a / (4 * mu * (1 + eps * a)))
check = sp.simplify(momentum.subs({c: expect_c, kappa: expect_k}))
print("momentum residual at frozen constants:", check)

vals = {a: sp.Rational(1, 2), mu: sp.Rational(1, 10), eps: sp.sqrt(sp.Rational(1, 10))}
print("mu = 0.1, eps = sqrt(mu), a = 0.5:")
print("  c     =", sp.N(expect_c.subs(vals), 17))
print("  kappa =", sp.N(expect_k.subs(vals), 17))
