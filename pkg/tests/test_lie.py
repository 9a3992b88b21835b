from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2dual.exterior import basis, parse_form, wedge
from g2dual.lie import (
    AdmissibilityError,
    Derivation,
    LieAlgebra,
    LieAlgebraError,
    SpanIdeal,
    basic_decomposition,
    ce_differential,
    center,
    central_extension,
    change_of_basis,
    extension_by_derivation,
    is_basic,
    jacobi_check,
    quotient,
)
from g2dual.linsolve import rank
from strategies import bracket_tables, forms

from examples_data import EX2_PHI, ex1_algebra, ex2_algebra, ex3_algebra, f7


def test_example_differentials():
    d = ex1_algebra().differentials()
    assert {k: str(v) for k, v in d.items() if v} == {3: "e17", 4: "e15 + e27", 6: "e13"}
    d = ex2_algebra().differentials()
    assert {k: str(v) for k, v in d.items() if v} == {6: "e25", 7: "-e45"}
    d = ex3_algebra().differentials()
    assert {k: str(v) for k, v in d.items() if v} == {1: "e35 + e46", 3: "e67", 4: "e57", 5: "e47", 6: "e37"}


def test_ce_on_higher_forms():
    g = ex2_algebra()
    assert ce_differential(g, f7("e127")) == f7("-e1245")
    assert not ce_differential(g, f7(EX2_PHI))


def test_jacobi_examples():
    for g in (ex1_algebra(), ex2_algebra(), ex3_algebra()):
        assert jacobi_check(g).ok and g.is_lie
    so3 = LieAlgebra(3, {(1, 2): {3: 1}, (2, 3): {1: 1}, (3, 1): {2: 1}})
    assert jacobi_check(so3).ok
    bad = LieAlgebra(3, {(1, 2): {2: 1}, (1, 3): {3: 1}, (2, 3): {1: 1}})
    rep = jacobi_check(bad)
    assert not rep.ok
    assert rep.triple == (1, 2, 3)
    assert rep.residual == (2, 0, 0)


@settings(max_examples=80, deadline=None)
@given(bracket_tables(4))
def test_d_squared_zero_iff_jacobi(table):
    g = LieAlgebra(4, table)
    d2_zero = all(not ce_differential(g, ce_differential(g, basis(4, k))) for k in range(1, 5))
    assert d2_zero == jacobi_check(g).ok


@settings(max_examples=40, deadline=None)
@given(forms(7), forms(7))
def test_d_is_odd_derivation(a, b):
    g = ex1_algebra()
    for k in range(8):
        ak = a.grade_part(k)
        lhs = ce_differential(g, wedge(ak, b))
        rhs = wedge(ce_differential(g, ak), b) + wedge(ak, ce_differential(g, b)) * (-1) ** k
        assert lhs == rhs


def test_centers():
    def spans(g, gens):
        c = center(g)
        units = [[Fraction(int(i == j)) for i in range(1, g.dim + 1)] for j in gens]
        return len(c) == len(gens) and rank(c + units) == len(gens)

    assert spans(ex1_algebra(), [4, 6])
    assert spans(ex2_algebra(), [1, 3, 6, 7])
    assert spans(ex3_algebra(), [1, 2])
    assert len(center(LieAlgebra.abelian(5))) == 5


def test_quotient_ex1():
    g = ex1_algebra()
    n, index = quotient(g, SpanIdeal(g, (6,)))
    assert n.dim == 6
    assert index == {1: 1, 2: 2, 3: 3, 4: 4, 5: 5, 7: 6}
    assert {k: str(v) for k, v in n.differentials().items() if v} == {3: "e16", 4: "e15 + e26"}


def test_quotient_ex3_and_not_ideal():
    g = ex3_algebra()
    n, index = quotient(g, SpanIdeal(g, (1, 2)))
    assert index == {3: 1, 4: 2, 5: 3, 6: 4, 7: 5}
    assert {k: str(v) for k, v in n.differentials().items() if v} == {1: "e45", 2: "e35", 3: "e25", 4: "e15"}
    with pytest.raises(LieAlgebraError):
        quotient(g, SpanIdeal(g, (7,)))


def test_span_ideal_predicates():
    g = ex1_algebra()
    a = SpanIdeal(g, (6,))
    assert a.is_ideal() and a.is_abelian() and a.is_central()
    b = SpanIdeal(g, (3, 6))
    assert b.is_ideal() and not b.is_central()
    with pytest.raises(LieAlgebraError):
        SpanIdeal(g, (6, 6))
    with pytest.raises(LieAlgebraError):
        SpanIdeal(g, (8,))


def test_quotient_then_extension_round_trip():
    g = ex1_algebra()
    n, index = quotient(g, SpanIdeal(g, (6,)))
    psi = g.differential_of_basis(6).relabel(index, n.dim)
    assert central_extension(n, [psi], positions=[6]) == g


def test_central_extension_rejects_nonclosed():
    n = ex1_algebra()
    with pytest.raises(LieAlgebraError):
        central_extension(n, [f7("e35")])


def test_derivation_extension():
    h = LieAlgebra(6, {(3, 5): {1: -1}, (4, 6): {1: -1}})
    D = Derivation.from_images(h, {3: {6: 1}, 4: {5: 1}, 5: {4: 1}, 6: {3: 1}})
    assert D.is_derivation()
    g = extension_by_derivation(h, D)
    assert g == ex3_algebra()
    assert g.is_unimodular and jacobi_check(g).ok
    bad = Derivation.from_images(h, {3: {3: 1}})
    assert not bad.is_derivation()
    with pytest.raises(LieAlgebraError):
        extension_by_derivation(h, bad)


def test_change_of_basis_identity_and_swap():
    g = ex2_algebra()
    I = [[int(i == j) for j in range(7)] for i in range(7)]
    assert change_of_basis(g, I) == g
    P = [row[:] for row in I]
    P[5], P[6] = P[6], P[5]
    h = change_of_basis(g, P)
    assert jacobi_check(h).ok
    assert sorted(len(v) for v in h.differentials().values() if v) == [1, 1]


def test_basic_decomposition():
    g = ex1_algebra()
    a = SpanIdeal(g, (6,))
    H = f7("e136 + e137 + e145 - e247")
    dec = basic_decomposition(g, a, H)
    assert dec.fiber_contractions == (f7("e13"),)
    assert dec.fiber_part + dec.basic_part == H
    assert is_basic(g, (6,), dec.basic_part)


def test_basic_decomposition_errors():
    g = ex3_algebra()
    a = SpanIdeal(g, (1, 2))
    with pytest.raises(AdmissibilityError):
        basic_decomposition(g, a, f7("e123"))


def test_is_basic():
    # [e1,e2] = e3: e^3 is not basic for the non-ideal direction e2 since d e^3 = -e^12
    g = LieAlgebra(3, {(1, 2): {3: 1}})
    assert not is_basic(g, (2,), parse_form("e3", 3))
    assert is_basic(g, (3,), parse_form("e12", 3))
    assert not is_basic(g, (3,), parse_form("e3", 3))


def test_bracket_antisymmetry_folding():
    g = LieAlgebra(3, {(2, 1): {3: 1}})
    assert g.bracket(1, 2) == {3: -1}
    assert g.structure_constant(2, 1, 3) == 1
