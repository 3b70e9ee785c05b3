"""
Polynomials over F2 truncated at X^w_th
=======================================

Every value the decoder touches lives in F2[X]/(X^w_th).  A polynomial is a
plain Python int: bit k is the coefficient of X^k.
"""

from polymatch.poly_gf2 import TruncatedPoly, monomial

# (X + 1)^2 = X^2 + 1, since the cross term 2X vanishes mod 2
a = TruncatedPoly.from_exponents([1, 0], 8)
print(a * a)

# products past the threshold simply disappear
print(monomial(5, 8) * monomial(4, 8), (monomial(5, 8) * monomial(4, 8)).is_zero())

# the lowest surviving exponent is what the decoder reads off
p = TruncatedPoly.from_exponents([6, 9, 11], 16)
print("min degree", p.min_degree())

# hex is little-endian: the first nibble printed last holds X^0..X^3
print(TruncatedPoly.from_exponents([0, 9], 12).to_hex())

# dropping to a smaller threshold commutes with multiplication
x = TruncatedPoly(0b1011_0110_1101, 12)
y = TruncatedPoly(0b0110_0001_0011, 12)
print((x * y).truncate(6) == x.truncate(6) * y.truncate(6))
