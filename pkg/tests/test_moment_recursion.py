"""Independent oracle: formal integration-by-parts moment recursions.

For a one-variable potential, <x^n S'(x)> = n h <x^(n-1)> must hold for the
canonical expectation (it is the cochain property applied to x^n eta).  For
monomial potentials this determines every moment from <1> and finitely many
seeds, giving a closed-form tower computed here without any of the library's
homological machinery.
"""

from fractions import Fraction

from bvcorr import PolyElement, Potential, build_retract, milnor_basis, quantize_retract
from bvcorr.scalars import HPoly
from bvcorr.slinf import Expectation

X = PolyElement.x(0, 1)


def _moments(expect, top):
    vals = {}
    p = PolyElement.one(1)
    for n in range(top + 1):
        vals[n] = expect(p)
        p = p * X
    return vals


def test_cubic_moment_tower():
    # S' = x^2: <x^(n+2)> = n h <x^(n-1)>; with iota = (1, 0) the tower is
    # <x^(3k)> = h^k prod_{j<k} (3j+1), all other moments vanish
    q = quantize_retract(build_retract(milnor_basis(Potential.a_k(2))), order=10)
    expect = Expectation(q, [1, 0])
    vals = _moments(expect, 12)
    oracle = {0: HPoly.const(1), 1: HPoly.zero(), 2: HPoly.zero()}
    for n in range(10):
        oracle[n + 3] = HPoly({1: Fraction(n + 1)}) * oracle[n]
    for n in range(13):
        assert vals[n] == oracle[n]
    assert vals[9] == HPoly({3: 28})  # 1 * 4 * 7


def test_quartic_moment_tower():
    # S' = x^3: <x^(n+3)> = n h <x^(n-1)>
    q = quantize_retract(build_retract(milnor_basis(Potential.a_k(3))), order=10)
    expect = Expectation(q, [1, 0, 0])
    vals = _moments(expect, 13)
    oracle = {n: HPoly.zero() for n in range(4)}
    oracle[0] = HPoly.const(1)
    for n in range(10):
        oracle[n + 4] = HPoly({1: Fraction(n + 1)}) * oracle[n]
    for n in range(14):
        assert vals[n] == oracle[n]
    assert vals[12] == HPoly({3: 45})  # 1 * 5 * 9


def test_seeded_moments_follow_other_classes():
    # a nonzero iota on [x] seeds the complementary tower of the cubic
    q = quantize_retract(build_retract(milnor_basis(Potential.a_k(2))), order=10)
    expect = Expectation(q, [1, Fraction(1, 2)])
    vals = _moments(expect, 10)
    oracle = {0: HPoly.const(1), 1: HPoly.const(Fraction(1, 2)), 2: HPoly.zero()}
    for n in range(8):
        oracle[n + 3] = HPoly({1: Fraction(n + 1)}) * oracle[n]
    for n in range(11):
        assert vals[n] == oracle[n]


def test_double_well_satisfies_integration_by_parts():
    # non-monomial S' = x^3 - x: <x^n (x^3 - x)> = n h <x^(n-1)> directly
    pot = Potential.single_variable({4: Fraction(1, 4), 2: Fraction(-1, 2)})
    q = quantize_retract(build_retract(milnor_basis(pot)), order=10)
    expect = Expectation(q, [1, 0, 0])
    vals = _moments(expect, 12)
    for n in range(9):
        lhs = vals[n + 3] - vals[n + 1]
        rhs = HPoly({1: Fraction(n)}) * vals[n - 1] if n >= 1 else HPoly.zero()
        assert lhs == rhs
