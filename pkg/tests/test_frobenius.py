import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsimple.errors import ContextMismatchError, ExponentOverflowError
from fsimple.frobenius import (
    ClosureSetup,
    FrobeniusExponent,
    FrobeniusTower,
    LinearFrame,
    frobenius_closure,
    frobenius_membership,
    frobenius_power,
    frobenius_preimage,
    frobenius_root,
)
from fsimple.polyring import Ideal, Poly

from conftest import ring

R2 = ring(2, "x y")
R5 = ring(5, "x y")


def direct_member(z, J, I, e):
    """Oracle: plain GB membership of z^q in J^[q] + I."""
    q = z.ctx.p**e
    K = Ideal(z.ctx, [g.frobenius(q) for g in J.gens] + list(I.gens))
    return K.contains(z.frobenius(q))


def test_fpower_example():
    J = frobenius_power(R2.ideal("x", "y"), 1)
    assert [g.to_str() for g in J.gens] == ["x^2", "y^2"]


@pytest.mark.parametrize(
    "p, gens, e, root",
    [
        (2, ["x^2*y^3"], 1, ["x*y"]),
        (3, ["x^5"], 1, ["x"]),
        (3, ["x^9*y^2"], 2, ["x"]),
        (2, ["x", "y"], 1, ["1"]),
        (5, ["x^5 + y^10"], 1, ["x + y^2"]),
    ],
)
def test_root_examples(p, gens, e, root):
    ctx = ring(p, "x y")
    assert frobenius_root(ctx.ideal(*gens), e) == ctx.ideal(*root)


@pytest.mark.parametrize("e", [1, 2])
def test_preimage_of_bracket_power(e):
    ctx = ring(3, "x y")
    I = ctx.ideal("x + y^2", "x*y")
    assert frobenius_preimage(frobenius_power(I, e), e) == I


def test_preimage_example():
    K = R5.ideal("x^5 + y^5")
    assert frobenius_preimage(K, 1) == R5.ideal("x + y")


def test_exponent_cap():
    with pytest.raises(ExponentOverflowError):
        FrobeniusExponent(2, 40)
    with pytest.raises(ExponentOverflowError):
        FrobeniusExponent(5, 10).check_degree(10**6)
    with pytest.raises(ValueError):
        FrobeniusExponent(5, -1)


def test_exponent_characteristic_mismatch():
    with pytest.raises(ContextMismatchError):
        frobenius_power(R5.ideal("x"), FrobeniusExponent(2, 1))


def test_cusp_frobenius_closure():
    I = R5.ideal("y^2 - x^3")
    J = R5.ideal("x")
    w = frobenius_membership(R5.poly("y"), J, I)
    assert w.found and w.e == 1
    assert w.describe() == "In(e=1)"
    chain = frobenius_closure(J, I)
    assert chain.is_ascending()
    assert chain.last == R5.ideal("x", "y")


def test_node_frobenius_refutations():
    I = R5.ideal("y^2 - x^3 - x^2")
    J = R5.ideal("x")
    w = frobenius_membership(R5.poly("y"), J, I, e_max=6)
    assert not w.found
    assert w.refutations == list(range(7))
    assert w.describe() == "NotUpTo(6)"


def test_linear_frame_roundtrip():
    ctx = ring(5, "x y z")
    frame = LinearFrame.for_forms(ctx, ctx.polys("x + y, z - x"))
    f = ctx.poly("x^2*y - 3*z + y*z^2")
    assert frame.from_frame(frame.to_frame(f)) == f
    s = frame.to_frame(ctx.poly("x + y"))
    assert len(s.terms) == 1


def test_tower_matches_direct_membership():
    ctx = ring(3, "x y z")
    I = ctx.ideal("x*y - z^2")
    J = ctx.ideal("x", "y")
    setup = ClosureSetup(J, I)
    for text in ["z", "x*z", "z^2", "y + z"]:
        z = ctx.poly(text)
        fz = setup.frame.to_frame(z)
        for e in range(3):
            assert setup.tower.member(e, fz) == direct_member(z, J, I, e)


@st.composite
def small_ideals(draw, ctx):
    gens = []
    for _ in range(draw(st.integers(1, 2))):
        terms = {}
        for _ in range(draw(st.integers(1, 3))):
            exps = tuple(draw(st.integers(0, 3)) for _ in range(ctx.n))
            terms[exps] = draw(st.integers(1, ctx.p - 1))
        gens.append(Poly(ctx, terms))
    return Ideal(ctx, gens)


@settings(max_examples=30, deadline=None)
@given(small_ideals(ring(3, "x y z")), st.integers(1, 2))
def test_root_is_smallest_containing(I, e):
    root = frobenius_root(I, e)
    assert all(frobenius_power(root, e).contains(g) for g in I.gens)
    assert frobenius_root(frobenius_power(root, e), e) == root


@settings(max_examples=30, deadline=None)
@given(small_ideals(ring(2, "x y")), st.integers(1, 2))
def test_power_is_flat(I, e):
    assert frobenius_root(frobenius_power(I, e), e) == I


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["x", "y", "x*y", "y^2", "x + y", "x*y + y^2"]), st.integers(0, 2))
def test_membership_agrees_with_oracle(text, e):
    ctx = ring(3, "x y")
    I = ctx.ideal("y^2 - x^3")
    J = ctx.ideal("x^2")
    z = ctx.poly(text)
    setup = ClosureSetup(J, I)
    assert setup.tower.member(e, setup.frame.to_frame(z)) == direct_member(z, J, I, e)


def test_tower_direct_construction():
    tower = FrobeniusTower(R5, R5.polys("x"), R5.polys("y^2 - x^3"))
    assert tower.member(1, R5.poly("y"))
    assert not tower.member(0, R5.poly("y"))
