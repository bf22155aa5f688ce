from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsimple.errors import NotGradedError, RankMismatchError, TruncatedResolutionError
from fsimple.modgb import (
    NO_LIFT,
    ModuleMap,
    ModuleMatrix,
    PresentedModule,
    annihilator,
    ext_module,
    free_resolution,
    is_cohen_macaulay,
    lift,
    projective_dimension,
    same_image,
    syzygies,
    trim,
)
from fsimple.polyring import Poly

from conftest import ring

R = ring(5, "x y z w")


def row(*strs):
    return ModuleMatrix.row(R, [R.poly(s) for s in strs])


def mat(rows):
    return ModuleMatrix(R, [[R.poly(s) for s in r] for r in rows], len(rows), len(rows[0]))


@st.composite
def small_polys(draw):
    terms = {}
    for _ in range(draw(st.integers(1, 3))):
        exps = tuple(draw(st.integers(0, 2)) for _ in range(R.n))
        terms[exps] = draw(st.integers(1, 4))
    return Poly(R, terms)


def test_koszul_syzygy():
    S = syzygies(row("x", "y"))
    assert S.ncols == 1
    assert same_image(S, mat([["y"], ["-x"]]))


def test_lift_and_no_lift():
    A = row("x")
    X = lift(row("x^5"), A)
    assert X.entries[0][0] == R.poly("x^4")
    assert lift(row("y"), A) is NO_LIFT


def test_lift_rank_mismatch():
    with pytest.raises(RankMismatchError):
        lift(mat([["x"], ["y"]]), row("x"))


@pytest.mark.parametrize("c", [1, 2, 3, 4])
def test_koszul_resolution_ranks(c):
    res = free_resolution(R.ideal(*R.vars[:c]))
    assert res.ranks == [comb(c, k) for k in range(c + 1)]


@pytest.mark.parametrize(
    "gens, ranks, cm",
    [
        (["x*z - y^2", "x*w - y*z", "y*w - z^2"], [1, 3, 2], True),  # twisted cubic
        (["x*z", "x*w", "y*z", "y*w"], [1, 4, 4, 1], False),  # two skew planes
        (["x*y - z*w"], [1, 1], True),
    ],
)
def test_betti_numbers_and_cm(gens, ranks, cm):
    I = R.ideal(*gens)
    res = free_resolution(I)
    assert res.ranks == ranks
    assert is_cohen_macaulay(I) is cm


def test_differentials_compose_to_zero():
    res = free_resolution(R.ideal("x*z - y^2", "x*w - y*z", "y*w - z^2"))
    for k in range(1, res.length):
        assert (res.differential(k) * res.differential(k + 1)).is_zero()


def test_cm_needs_grading():
    with pytest.raises(NotGradedError):
        is_cohen_macaulay(R.ideal("y^2 - x^3 - x^2"))


def test_truncated_resolution():
    with pytest.raises(TruncatedResolutionError):
        free_resolution(R.ideal("x", "y", "z"), max_length=2)


@pytest.mark.parametrize("c", [1, 2, 3])
def test_ext_of_complete_intersection(c):
    I = R.ideal(*R.vars[:c])
    res = free_resolution(I)
    for i in range(c + 2):
        E = ext_module(PresentedModule.quotient(I), i, res=res)
        if i == c:
            assert E.rank == 1
            assert annihilator(E) == I
        else:
            assert E.is_zero()


def test_trim_removes_unit_relations():
    M = PresentedModule(mat([["1", "0"], ["x", "y"]]))
    N, to_old, to_new = trim(M)
    assert N.rank == 1
    assert annihilator(N) == R.ideal("y")


def test_module_map_injectivity():
    src = PresentedModule.quotient(R.ideal("x"))
    tgt = PresentedModule.quotient(R.ideal("x^2"))
    mult_x = ModuleMap(src, tgt, row("x"))
    assert mult_x.is_injective()
    mult_1 = ModuleMap(tgt, src, row("1"))
    assert not mult_1.is_injective()
    with pytest.raises(ValueError):
        ModuleMap(src, tgt, row("1"))


def test_projective_dimension():
    assert projective_dimension(R.ideal("x", "y*z")) == 2


@settings(max_examples=30, deadline=None)
@given(st.lists(small_polys(), min_size=1, max_size=3))
def test_syzygies_are_relations(entries):
    M = ModuleMatrix.row(R, entries)
    S = syzygies(M)
    assert (M * S).is_zero()


@settings(max_examples=30, deadline=None)
@given(st.lists(small_polys(), min_size=2, max_size=3), small_polys(), small_polys())
def test_lift_recovers_combination(entries, a, b):
    M = ModuleMatrix.row(R, entries)
    target = ModuleMatrix.row(R, [a * entries[0] + b * entries[1]])
    X = lift(target, M)
    assert X is not NO_LIFT
    assert M * X == target
