import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsimple.caps import Caps
from fsimple.closure import (
    CERTIFIED,
    ParameterSystem,
    QuotientRing,
    check_integral_equation,
    find_parameter_system,
    find_test_element,
    integral_membership,
    is_f_rational,
    is_parameter_system,
    jacobian_ideal,
    parameter_test_ideal,
    tight_closure_ideal,
    tight_membership,
)
from fsimple.errors import HypothesisError, UnitIdealError
from fsimple.frobenius import frobenius_closure

from conftest import ring


def quotient(p, names, *gens, domain=True):
    ctx = ring(p, names)
    return QuotientRing(ctx.ideal(*gens), asserted_domain=domain)


CUSP = quotient(5, "x y", "y^2 - x^3")
NODE = quotient(5, "x y", "y^2 - x^3 - x^2")
QUAD = quotient(5, "x y z w", "x*y - z*w")


def test_quotient_ring_data():
    assert (CUSP.dim, CUSP.codim) == (1, 1)
    assert QUAD.cohen_macaulay() == (True, "resolution_length")
    cm, route = NODE.cohen_macaulay()
    assert cm and route != "resolution_length"
    with pytest.raises(UnitIdealError):
        QuotientRing(ring(5, "x").ideal("1"))


def test_domain_must_be_asserted():
    A = quotient(5, "x y", "y^2 - x^3", domain=False)
    with pytest.raises(HypothesisError):
        A.require_domain()


@pytest.mark.parametrize("A, element", [(CUSP, "y"), (NODE, "y"), (QUAD, "x")])
def test_test_element(A, element):
    c = find_test_element(A)
    assert c.element == A.ctx.poly(element)
    assert (A.I + jacobian_ideal(A.I)).contains(c.element)


@pytest.mark.parametrize("A, params", [(CUSP, ["x"]), (NODE, ["x"]), (QUAD, ["x", "y", "z + w"])])
def test_parameter_system(A, params):
    sop = find_parameter_system(A)
    assert sop.to_strs() == params
    assert is_parameter_system(A, sop.elements)


def test_parameter_system_rejects_non_sop():
    with pytest.raises(HypothesisError):
        ParameterSystem(QUAD, QUAD.ctx.polys("x, y, z"))
    with pytest.raises(HypothesisError):
        ParameterSystem(QUAD, QUAD.ctx.polys("x, y"))


def test_integral_dependence_of_node():
    J = NODE.ctx.ideal("x")
    y = NODE.ctx.poly("y")
    cert = integral_membership(y, J, NODE)
    assert cert.verdict == "In" and cert.confidence == CERTIFIED
    coeffs = [NODE.ctx.poly(s) for s in cert.witness["coefficients"]]
    assert check_integral_equation(y, J.gens, coeffs, NODE.I)
    assert not check_integral_equation(y, J.gens, [NODE.ctx.zero(), NODE.ctx.poly("x^3")], NODE.I)


def test_integral_refutation_by_radical():
    ctx = CUSP.ctx
    cert = integral_membership(ctx.poly("y + 1"), ctx.ideal("x"), CUSP)
    assert cert.verdict == "NotIn"


@pytest.mark.parametrize("A", [CUSP, NODE])
def test_curve_tight_closure(A):
    sop = find_parameter_system(A)
    T = tight_closure_ideal(sop, A, find_test_element(A))
    assert T.ideal == A.ctx.ideal("x", "y")
    assert T.confidence == CERTIFIED


def test_quadric_cone_is_tightly_closed():
    sop = find_parameter_system(QUAD)
    T = tight_closure_ideal(sop, QUAD, find_test_element(QUAD))
    assert T.collapsed and not T.extra
    assert T.ideal == sop.ideal + QUAD.I


def test_tight_membership_probe():
    sop = find_parameter_system(NODE)
    c = find_test_element(NODE)
    ctx = NODE.ctx
    assert tight_membership(ctx.poly("x"), sop, NODE, c).verdict == "In"
    assert tight_membership(ctx.poly("y"), sop, NODE, c).verdict == "InUpTo"
    out = tight_membership(ctx.poly("1"), sop, NODE, c)
    assert out.verdict == "NotIn" and out.confidence == CERTIFIED


@pytest.mark.parametrize("A, tau", [(CUSP, ["x", "y"]), (NODE, ["x", "y"]), (QUAD, ["1"])])
def test_parameter_test_ideal(A, tau):
    pt = parameter_test_ideal(A, find_parameter_system(A))
    assert pt.ideal == A.ctx.ideal(*tau) + A.I
    assert pt.stabilized_at is not None


@pytest.mark.parametrize("p", [2, 3, 5])
def test_quadric_cone_is_f_rational(p):
    A = quotient(p, "x y z w", "x*y - z*w")
    fr = is_f_rational(A, find_parameter_system(A))
    assert (fr.answer, fr.confidence) == ("Yes", CERTIFIED)


@pytest.mark.parametrize("A", [CUSP, NODE])
def test_curves_are_not_f_rational(A):
    fr = is_f_rational(A, find_parameter_system(A))
    assert fr.answer == "No" and fr.confidence == CERTIFIED
    z, t, cert = fr.witness
    assert z == A.ctx.poly("y") and t == 1


@pytest.mark.parametrize("p, in_frobenius", [(5, True), (7, False)])
def test_fermat_cubic_closures(p, in_frobenius):
    # z^2 ∈ (x, y)^* always; it lies in (x, y)^F exactly when p = 2 mod 3
    A = quotient(p, "x y z", "x^3 + y^3 + z^3")
    sop = find_parameter_system(A)
    assert sop.to_strs() == ["x", "y"]
    T = tight_closure_ideal(sop, A, find_test_element(A))
    z2 = A.ctx.poly("z^2")
    assert T.ideal.contains(z2) and T.confidence == CERTIFIED
    F = frobenius_closure(sop.ideal, A.I).last
    assert F.contains(z2) is in_frobenius


def test_caps_recorded():
    caps = Caps(e_max=2, window=3)
    assert caps.to_dict()["e_max"] == 2 and caps.to_dict()["window"] == 3


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["x", "y", "x*y", "y^2", "x + y", "x^2 + y", "1 + x"]))
def test_closure_tower_on_node(text):
    """J ⊆ J^F ⊆ J^* ⊆ integral closure, checked per element."""
    A = NODE
    ctx = A.ctx
    sop = find_parameter_system(A)
    J = sop.ideal
    z = ctx.poly(text)
    JF = frobenius_closure(J, A.I).last
    Jstar = tight_closure_ideal(sop, A, find_test_element(A)).ideal
    in_J = (J + A.I).contains(z)
    in_F = JF.contains(z)
    in_star = Jstar.contains(z)
    bar = integral_membership(z, J, A).verdict
    assert not in_J or in_F
    assert not in_F or in_star
    assert not in_star or bar == "In"
    if bar == "NotIn":
        assert not in_star
