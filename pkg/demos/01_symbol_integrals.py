"""
Integrating symbols along the conormal direction
=================================================

A symbol a(z, y; zeta, eta) of degree d < -1 can be integrated over the
frequency eta dual to the normal variable.  The result is a symbol in
(z, zeta) alone, of degree d + 1.  This script walks through the
quadrature engine and the two symbol transforms built on it.
"""

import math

import numpy as np

from bilateral import quadrature_with_tail, integrate_eta, trace_symbol
from bilateral.symbolspec import parse_symbol, resolvent, modulated_resolvent

# The engine integrates on a finite window and adds the tail from the
# known decay rate.  The Lorentzian has the closed form pi.
v = quadrature_with_tail(lambda e: 1 / (1 + e * e), -2)
print("int 1/(1+eta^2)          =", v, " error", abs(v - math.pi))

# Odd integrands cancel exactly, because the rule folds eta and -eta.
print("int eta/(1+eta^2)^2      =", quadrature_with_tail(lambda e: e / (1 + e * e) ** 2, -3))

# Squared Lorentzians of width a: pi / (2 a^3)
for a in (1.0, 2.5, 10.0):
    v = quadrature_with_tail(lambda e: (a * a + e * e) ** -2, -4)
    print(f"a = {a:5.1f}: relative error {abs(v / (math.pi / (2 * a**3)) - 1):.1e}")

# %%
# Symbols are lists of homogeneous components.  The resolvent preset keeps
# four terms of its large-frequency expansion and its closed form.
a = resolvent(1)
print([c.degree for c in a.components])

b = trace_symbol(a)
zeta = np.array([0.0, 1.0, 3.0, 10.0])
print("trace symbol      ", b(0.0, zeta))
print("1/(2 sqrt(1+z^2)) ", 1 / (2 * np.sqrt(1 + zeta**2)))

# Dropping everything past the principal term leaves 1/(2|zeta|), which is
# good only at large |zeta|.
print("principal term    ", b.principal()(0.0, zeta))

# %%
# z enters only as a parameter of the integral.
bm = trace_symbol(modulated_resolvent(1))
z = np.linspace(0, 2 * np.pi, 5)
print(bm(z, 1.5))

# %%
# User expressions need a declared degree.  A wrong declaration is caught
# by sampling the decay rate.
s = parse_symbol("1/((zeta^2+2*eta^2)*sqrt(zeta^2+eta^2)) @ -3")
B = integrate_eta(s)
for t in (2.0, 4.0, 8.0):
    c = B.components[0]
    print(f"t = {t}: b(t zeta) / (t^-2 b(zeta)) = {c(0.0, 3.0 * t) / (t**-2 * c(0.0, 3.0)):.12f}")
