from fractions import Fraction

import pytest

from bvcorr.groebner import (
    MilnorData,
    NonIsolatedError,
    buchberger,
    divide,
    p_add,
    p_mul,
)
from bvcorr.polyalg import Potential


def test_a2_basis():
    mil = MilnorData(Potential.a_k(2))
    assert mil.basis == [(0,), (1,)]
    assert mil.dimension == 2


def test_a3_basis():
    mil = MilnorData(Potential.a_k(3))
    assert mil.basis == [(0,), (1,), (2,)]
    assert mil.dimension == 3


def test_non_isolated_rejected():
    pot = Potential(2, {(2, 1): Fraction(1)})  # Jacobian (2xy, x^2)
    with pytest.raises(NonIsolatedError):
        MilnorData(pot)


def test_two_variable_isolated():
    pot = Potential(2, {(3, 0): Fraction(1, 3), (0, 3): Fraction(1, 3)})
    mil = MilnorData(pot)
    assert mil.dimension == 4
    assert mil.basis == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_normal_form_examples():
    mil = MilnorData(Potential.a_k(2))
    assert mil.normal_form({(2,): Fraction(1)}) == {}
    assert mil.normal_form({(1,): Fraction(1)}) == {(1,): Fraction(1)}
    assert mil.normal_form({(3,): Fraction(2)}) == {}


def test_witnesses_reconstruct_the_input():
    pot = Potential(2, {(3, 0): Fraction(1, 3), (0, 3): Fraction(1, 3), (1, 1): Fraction(1)})
    mil = MilnorData(pot)
    p = {(4, 1): Fraction(3), (2, 2): Fraction(-1), (0, 0): Fraction(5)}
    nf = mil.normal_form(p)
    wit = mil.witnesses(p)
    recon = dict(nf)
    for q, g in zip(wit, mil.gens):
        recon = p_add(recon, p_mul(q, g))
    assert recon == p


def test_witnesses_deterministic_and_linear():
    mil = MilnorData(Potential.a_k(3))
    a = {(5,): Fraction(1)}
    b = {(4,): Fraction(2)}
    wa, wb = mil.witnesses(a), mil.witnesses(b)
    both = mil.witnesses(p_add(a, b))
    assert both == [p_add(x, y) for x, y in zip(wa, wb)]
    assert mil.witnesses(a) == wa


def test_normal_form_idempotent():
    pot = Potential(2, {(3, 0): Fraction(1, 3), (0, 3): Fraction(1, 3)})
    mil = MilnorData(pot)
    p = {(5, 2): Fraction(7), (1, 1): Fraction(1)}
    nf = mil.normal_form(p)
    assert mil.normal_form(nf) == nf


def test_buchberger_cofactors():
    gens = [
        {(2, 0): Fraction(1), (0, 1): Fraction(1)},
        {(1, 1): Fraction(1)},
    ]
    basis, cofs = buchberger(gens)
    for g, row in zip(basis, cofs):
        acc = {}
        for q, src in zip(row, gens):
            acc = p_add(acc, p_mul(q, src))
        assert acc == g


def test_division_remainder_irreducible():
    gens = [{(2, 0): Fraction(1)}, {(0, 2): Fraction(1)}]
    quots, rem = divide({(3, 3): Fraction(1), (1, 1): Fraction(2)}, gens)
    for exp in rem:
        assert not all(a <= b for a, b in zip((2, 0), exp))
        assert not all(a <= b for a, b in zip((0, 2), exp))
