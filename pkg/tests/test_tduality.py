import pytest
from hypothesis import given, settings

from g2dual.exterior import Form, basis
from g2dual.integrability import twisted_differential
from g2dual.lie import LieAlgebra, SpanIdeal
from g2dual.tduality import (
    DualityError,
    correspondence,
    double_dual_check,
    dual_correspondence,
    dualize,
    transport_spinor,
    validate_admissible,
    verify_duality_certificate,
)
from strategies import forms

from examples_data import EX1_H_GENERATORS, EX1_DF6_TERMS, ex1_algebra, ex2_algebra, ex3_algebra, f7


def triples():
    return {
        "ex1": validate_admissible(ex1_algebra(), (6,), f7("e146 + e236")),
        "ex2": validate_admissible(ex2_algebra(), (7,), f7("e124 - e456 + 4 e135 + e245")),
        "ex3": validate_admissible(ex3_algebra(), (1, 2), Form(7)),
    }


TRIPLES = triples()
DUALS = {k: dualize(t) for k, t in TRIPLES.items()}
SPACES = {k: correspondence(TRIPLES[k], DUALS[k]) for k in TRIPLES}


def test_validation_flags():
    g = ex1_algebra()
    t = validate_admissible(g, (6,), Form(7))
    assert t.valid and not t.failures()
    t = validate_admissible(g, (3,), Form(7))
    assert not t.fiber_abelian_ideal and "fiber_abelian_ideal" in t.failures()
    t = validate_admissible(g, (6,), f7("e356"))
    assert not t.H_closed and not t.admissible
    t = validate_admissible(ex3_algebra(), (1, 2), f7("e123"))
    assert not t.H_fiber_degenerate
    with pytest.raises(DualityError):
        validate_admissible(g, (6,), f7("e12"))


def test_dualize_rejects_invalid():
    g = ex1_algebra()
    with pytest.raises(DualityError):
        dualize(validate_admissible(g, (6,), f7("e356")))
    # abelian ideal that is not central
    g3 = LieAlgebra(3, {(1, 2): {3: 1}})
    t = validate_admissible(g3, (2, 3), Form(3))
    assert t.admissible and not t.fiber_central
    with pytest.raises(DualityError):
        dualize(t)


def brackets(g):
    return {k: dict(v) for k, v in g.brackets.items()}


def test_ex1_zero_H():
    d = dualize(validate_admissible(ex1_algebra(), (6,), Form(7)))
    assert brackets(d.dual.algebra) == {(1, 5): {4: -1}, (1, 7): {3: -1}, (2, 7): {4: -1}}
    assert d.dual.H == f7("e136")


@pytest.mark.parametrize("k", sorted(EX1_DF6_TERMS))
def test_ex1_df6_terms(k):
    d = dualize(validate_admissible(ex1_algebra(), (6,), f7(EX1_H_GENERATORS[k - 1])))
    assert d.dual.algebra.differential_of_basis(6) == f7(EX1_DF6_TERMS[k])


def test_ex1_df6_all_generators_against_printed_expansion():
    # df6 = -a6 f17 - (a1+a5) f27 - a7 f37 - a9 f57 + a2 f12 + a3 f13 + a4 f15 + a8 (f14 + f23)
    printed = {1: "-e27", 5: "-e27", 6: "-e17", 7: "-e37", 9: "-e57", 2: "e12", 3: "e13", 4: "e15", 8: "e14 + e23"}
    for k, text in enumerate(EX1_H_GENERATORS, start=1):
        H = f7(text)
        t = validate_admissible(ex1_algebra(), (6,), H)
        if not t.valid:
            continue
        df6 = dualize(t).dual.algebra.differential_of_basis(6)
        assert df6 == f7(printed.get(k, "0")), k


def test_ex1_dual_H_pieces():
    printed = {
        1: "e134 + e123 + e357", 2: "-e237", 3: "e137 - e247 + e145", 4: "-e357",
        5: "e157 + e134 + e357", 6: "-e257", 7: "-e457", 8: "0", 9: "e347",
        10: "e124 + e257", 11: "e125 + e137", 12: "e127", 13: "e135", 14: "e245", 15: "e145 + e235",
    }
    for k, text in enumerate(EX1_H_GENERATORS, start=1):
        d = dualize(validate_admissible(ex1_algebra(), (6,), f7(text)))
        assert d.dual.H - f7("e136") == f7(printed[k]), k


def test_ex2_and_ex3_duals():
    assert brackets(DUALS["ex2"].dual.algebra) == {(2, 5): {6: -1}}
    assert DUALS["ex2"].dual.H == TRIPLES["ex2"].H - f7("e457")
    assert DUALS["ex3"].dual.H == f7("e135 + e146")
    assert brackets(DUALS["ex3"].dual.algebra) == {(3, 7): {6: -1}, (4, 7): {5: -1}, (5, 7): {4: -1}, (6, 7): {3: -1}}


@pytest.mark.parametrize("name", sorted(TRIPLES))
def test_certificate(name):
    cert = verify_duality_certificate(SPACES[name], TRIPLES[name].H, DUALS[name].dual.H)
    assert cert.passed and not cert.residual
    assert SPACES[name].fiber_nondegenerate()


@pytest.mark.parametrize("name", sorted(TRIPLES))
def test_certificate_fails_with_wrong_sign(name):
    cs = correspondence(TRIPLES[name], DUALS[name], sign=-1)
    assert not verify_duality_certificate(cs, TRIPLES[name].H, DUALS[name].dual.H).passed


@pytest.mark.parametrize("name", sorted(TRIPLES))
def test_double_dual(name):
    rep = double_dual_check(TRIPLES[name])
    assert rep.passed and not rep.differing_brackets and not rep.H_difference


@pytest.mark.parametrize("name", sorted(TRIPLES))
@settings(max_examples=15, deadline=None)
@given(sigma=forms(7, max_terms=6))
def test_transport_intertwines_up_to_fiber_sign(name, sigma):
    t, d, cs = TRIPLES[name], DUALS[name], SPACES[name]
    m = len(cs.fiber)
    lhs = twisted_differential(d.dual.algebra, d.dual.H, transport_spinor(cs, sigma))
    rhs = transport_spinor(cs, twisted_differential(t.algebra, t.H, sigma))
    assert lhs == rhs * (-1) ** m


@pytest.mark.parametrize("name", sorted(TRIPLES))
@settings(max_examples=15, deadline=None)
@given(sigma=forms(7, max_terms=6))
def test_transport_parity(name, sigma):
    m = len(SPACES[name].fiber)
    out = transport_spinor(SPACES[name], sigma)
    if sigma.is_even() and out:
        assert out.is_even() if m % 2 == 0 else out.is_odd()
    if sigma.is_odd() and out:
        assert out.is_odd() if m % 2 == 0 else out.is_even()


@pytest.mark.parametrize("name", sorted(TRIPLES))
@settings(max_examples=10, deadline=None)
@given(sigma=forms(7, max_terms=6))
def test_transport_back_is_minus_identity(name, sigma):
    back = dual_correspondence(DUALS[name])
    assert transport_spinor(back, transport_spinor(SPACES[name], sigma)) == -sigma


def test_transport_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        transport_spinor(SPACES["ex1"], basis(6, 1))


def test_projection_maps():
    cs = SPACES["ex3"]
    assert cs.dual_fiber == (8, 9)
    assert cs.push_to_dual(cs.pull_back_dual(f7("e13 + e7"))) == f7("e13 + e7")
    assert cs.algebra.dim == 9


def test_correspondence_checks_origin():
    with pytest.raises(DualityError):
        correspondence(TRIPLES["ex1"], DUALS["ex2"])


def test_span_ideal_input():
    g = ex1_algebra()
    t = validate_admissible(g, SpanIdeal(g, (6,)), Form(7))
    assert t.fiber.generators == (6,)
