"""A tour of the polynomial BV algebra and its descendant brackets.

The playground is C = Q[x] (x) Lambda[eta] with the cubic potential
S = x^3/3.  We build the odd Laplacian, the classical and quantum
differentials, check the failure-of-derivation identity, and watch the
higher descendant brackets collapse.
"""

from bvcorr import (
    DescendantFamily,
    PolyElement,
    Potential,
    bv_bracket,
    classical_K,
    delta_op,
    quantum_K,
)
from bvcorr.scalars import HPoly

pot = Potential.a_k(2)  # S = x^3/3
x = PolyElement.x(0, 1)
eta = PolyElement.eta(0, 1)
one = PolyElement.one(1)

print("The generators: x (ghost 0) and eta (ghost -1).")
print("delta(x*eta)  =", delta_op(x * eta))
print("K(eta)        =", classical_K(pot, eta), "   # dS/dx = x^2")
print("Khat(x*eta)   =", quantum_K(pot, x * eta), "   # K - h*delta")
print()

print("The bracket is the failure of delta to be a derivation:")
print("(x, eta)_BV   =", bv_bracket(x, eta))
print("(x^2, eta)_BV =", bv_bracket(x * x, eta))
print()

print("Khat fails to be a derivation by exactly (-h) times the bracket:")
a, b = x * x, x * eta
lhs = quantum_K(pot, a * b) - quantum_K(pot, a) * b - a.J() * quantum_K(pot, b)
print("failure       =", lhs)
print("(-h)(a,b)_BV  =", bv_bracket(a, b).scale(-HPoly.h()))
print()

print("Descendant brackets: ell_1 = Khat, ell_2 = bracket, higher vanish.")
fam = DescendantFamily(pot)
print("ell_2(x, eta) =", fam.ell(2, [x, eta]))
print("ell_3(x,x,eta)=", fam.ell(3, [x, x, eta]))
print("ell_4(x,x,x,eta) =", fam.ell(4, [x, x, x, eta]))
