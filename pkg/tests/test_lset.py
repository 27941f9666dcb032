import random

import pytest
from hypothesis import given, settings, strategies as st

from hrpn.lset import (
    LabelledSet, LSetMorphism, NotM, SubtypeViolation, check_morphism, compose, forget,
    free_label, identity, is_M, pullback, pushout_along_M,
)
from hrpn.poset import TOP, PosetG

from oracles import (
    morphisms, pullback_universal, pushout_universal, random_lset, random_m_span,
    random_morphism, set_pushout_size, square_commutes_pb, square_commutes_po, tree_alphabet,
)

STEPS = ["step1", "step2", "intermediate step", "parallel step"]
A = PosetG.build(["task1", "step"] + STEPS, [(s, "step") for s in STEPS])


def ls(**labels):
    return LabelledSet(labels, A)


def test_identity_is_valid_and_in_M():
    s = ls(x="step", y="task1")
    f = check_morphism(s, s, {"x": "x", "y": "y"})
    assert is_M(f) == (True, True) and is_M(f).is_m


def test_subtype_direction():
    with pytest.raises(SubtypeViolation) as e:
        check_morphism(ls(x="step1"), ls(y="step"), {"x": "y"})
    assert e.value.element == "x"
    f = check_morphism(ls(x="step"), ls(y="step1"), {"x": "y"})
    flag = is_M(f)
    assert flag.injective and not flag.strict and not flag.is_m


def test_constant_map_not_injective():
    f = check_morphism(ls(a=TOP, b=TOP), ls(c="task1"), {"a": "c", "b": "c"})
    assert not is_M(f).injective


def test_pushout_over_empty_is_disjoint_union():
    s0 = ls()
    s1, s2 = ls(a="step"), ls(a="task1", b="step1")
    s3, f_, g_ = pushout_along_M(LSetMorphism(s0, s1, {}), LSetMorphism(s0, s2, {}))
    assert len(s3) == 3
    assert sorted(s3.labels.values()) == sorted(["step", "task1", "step1"])


def test_pushout_along_identity():
    s1 = ls(a="step", b="task1")
    s2 = ls(u="step1", v="task1", w="step")
    g = check_morphism(s1, s2, {"a": "u", "b": "v"})
    s3, f_, g_ = pushout_along_M(identity(s1), g)
    assert len(s3) == len(s2)
    assert {s2.labels[x] == s3.labels[f_(x)] for x in s2.labels} == {True}
    assert is_M(f_).is_m


def test_pushout_relabels_glued_down():
    s0, s1, s2 = ls(x="step"), ls(x="step", y="task1"), ls(x2="step1")
    f = check_morphism(s0, s1, {"x": "x"})
    g = check_morphism(s0, s2, {"x": "x2"})
    s3, f_, g_ = pushout_along_M(f, g)
    assert len(s3) == 2
    assert s3.labels[g_("x")] == "step1" and s3.labels[g_("y")] == "task1"
    # the S1-side representative names the glued class
    assert g_("x") == "1:x"
    assert pushout_universal(f, g, s3, f_, g_, [ls(z="step1"), ls(z="step1", w="task1"), ls(z="step", w="task1")])


def test_pushout_requires_M():
    s0, s1 = ls(x="step"), ls(y="step1")
    with pytest.raises(NotM):
        pushout_along_M(check_morphism(s0, s1, {"x": "y"}), identity(s0))


def test_pullback_of_identities_is_diagonal():
    s = ls(a="step", b="task1")
    s3, f_, g_ = pullback(identity(s), identity(s))
    assert len(s3) == 2
    assert sorted(s3.labels.values()) == ["step", "task1"]


def test_pullback_into_point_is_product():
    point = LabelledSet({"*": TOP}, A)
    s1, s2 = ls(a=TOP, b=TOP), ls(c=TOP, d=TOP)
    g = check_morphism(s1, point, {"a": "*", "b": "*"})
    f = check_morphism(s2, point, {"c": "*", "d": "*"})
    s3, f_, g_ = pullback(g, f)
    assert len(s3) == 4 and set(s3.labels.values()) == {TOP}
    assert pullback_universal(g, f, s3, f_, g_, [LabelledSet({"t": TOP, "u": "step"}, A)])


def test_pullback_joins_labels():
    point = LabelledSet({"*": "step1"}, A)
    s1, s2 = ls(a="step1", b="step"), ls(c="step1", d="step")
    g = check_morphism(s1, point, {"a": "*", "b": "*"})
    f = check_morphism(s2, point, {"c": "*", "d": "*"})
    s3, f_, g_ = pullback(g, f)
    assert len(s3) == 4
    assert s3.labels[("a", "c")] == "step1" and s3.labels[("a", "d")] == "step"
    tests = [LabelledSet({"t": "step1"}, A), LabelledSet({"t": TOP}, A), LabelledSet({"t": "step", "u": "step1"}, A)]
    assert pullback_universal(g, f, s3, f_, g_, tests)


def test_pullback_along_M_keeps_labels():
    s0 = ls(p="step1", q="task1")
    s2 = ls(p="step1")
    f = check_morphism(s2, s0, {"p": "p"})
    g = check_morphism(ls(a="step", b="task1"), s0, {"a": "p", "b": "q"})
    s3, f_, g_ = pullback(g, f)
    # f in M: the parallel projection is in M and the labels come from S1
    assert is_M(f_).is_m
    assert all(s3.labels[s] == g.source.labels[f_(s)] for s in s3.labels)


def test_free_forget():
    assert forget(free_label({1, 2}, A)) == {1, 2}
    assert len(free_label(set(), A)) == 0
    free = free_label({"x", "y"}, A)
    target = ls(z="step1")
    assert check_morphism(free, target, {"x": "z", "y": "z"})


def test_compose():
    s1, s2, s3 = ls(a="step"), ls(b="step1"), ls(c="step1")
    f = check_morphism(s1, s2, {"a": "b"})
    g = check_morphism(s2, s3, {"b": "c"})
    h = compose(f, g)
    assert h.mapping == {"a": "c"}
    check_morphism(s1, s3, h.mapping)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_pushout_properties_random(seed):
    rng = random.Random(seed)
    alpha = tree_alphabet(rng, rng.randint(2, 5))
    n0 = rng.randint(0, 2)
    span = random_m_span(rng, alpha, n0, rng.randint(n0, 3), rng.randint(max(1, n0) if n0 else 0, 3))
    if span is None:
        return
    f, g = span
    s3, f_, g_ = pushout_along_M(f, g)
    assert square_commutes_po(f, g, f_, g_)
    assert is_M(f_).is_m
    assert len(s3) == set_pushout_size(f, g)
    tests = [random_lset(rng, alpha, k, "t") for k in (1, 2)]
    assert pushout_universal(f, g, s3, f_, g_, tests)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_pullback_properties_random(seed):
    rng = random.Random(seed)
    alpha = tree_alphabet(rng, rng.randint(2, 5))
    s0 = random_lset(rng, alpha, rng.randint(1, 3), "o")
    s1 = random_lset(rng, alpha, rng.randint(0, 3), "a")
    s2 = random_lset(rng, alpha, rng.randint(0, 3), "b")
    g = random_morphism(rng, s1, s0)
    f = random_morphism(rng, s2, s0)
    if g is None or f is None:
        return
    s3, f_, g_ = pullback(g, f)
    assert square_commutes_pb(g, f, f_, g_)
    expected = {(x, y) for x in s1.labels for y in s2.labels if g(x) == f(y)}
    assert set(s3.labels) == expected
    assert pullback_universal(g, f, s3, f_, g_, [random_lset(rng, alpha, k, "t") for k in (1, 2)])
    if is_M(f).is_m:
        assert is_M(f_).is_m


def test_morphism_enumerator_counts():
    # oracle self-check
    src = LabelledSet({"a": "step", "b": TOP}, A)
    tgt = LabelledSet({"x": TOP, "y": "step1"}, A)
    got = list(morphisms(src, tgt))
    # a may only go to y (step1 <= step), b anywhere
    assert len(got) == 2
