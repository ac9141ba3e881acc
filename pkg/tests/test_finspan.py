"""Spans over a base: chosen fiber products, composition, 2-cells, and
canonical recoordination certificates."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spantrace.finspan import (
    Span,
    base_space,
    canonical_recoord,
    cell_check,
    cell_vcompose,
    comp,
    fiber_product,
    id_leaf,
    identity_span,
    leaf,
    make_fin_over,
    make_over_map,
    make_span_cell,
    om_anchor,
    om_identity,
    span_compose,
    span_iso_search,
    span_tensor,
    tensor,
)
from spantrace.generate import GenParams, random_base, random_space, random_span

seeds = st.integers(0, 2**32 - 1)


def two_over_one():
    base = ("z",)
    x = make_fin_over(base, ("a", "b"), {"a": "z", "b": "z"})
    y = make_fin_over(base, ("c",), {"c": "z"})
    z = base_space(base)
    return x, y, z


def test_make_over_map_validation():
    base = ("s", "t")
    x = make_fin_over(base, ("a",), {"a": "s"})
    y = make_fin_over(base, ("b",), {"b": "t"})
    with pytest.raises(ValueError, match="anchors"):
        make_over_map(x, y, {"a": "b"})
    with pytest.raises(ValueError, match="total"):
        make_over_map(x, x, {})


def test_fiber_product_examples():
    x, y, z = two_over_one()
    f = make_over_map(x, z, {"a": "z", "b": "z"})
    # along (f, id): elements (x, f(x)), first projection bijective onto x
    apex, pr1, _ = fiber_product(f, om_identity(z))
    assert apex.elements == (("a", "z"), ("b", "z"))
    assert pr1.graph == ("a", "b")
    # disjoint images -> empty
    w = make_fin_over(("s", "t"), ("p", "q"), {"p": "s", "q": "t"})
    f1 = make_over_map(make_fin_over(("s", "t"), ("u",), {"u": "s"}), w, {"u": "p"})
    f2 = make_over_map(make_fin_over(("s", "t"), ("v",), {"v": "t"}), w, {"v": "q"})
    empty, _, _ = fiber_product(f1, f2)
    assert empty.elements == ()
    # {a,b} -> z <- {c}
    g = make_over_map(y, z, {"c": "z"})
    apex2, _, _ = fiber_product(f, g)
    assert apex2.elements == (("a", "c"), ("b", "c"))


def test_fiber_product_symmetric_up_to_swap():
    x, y, z = two_over_one()
    f = make_over_map(x, z, {"a": "z", "b": "z"})
    g = make_over_map(y, z, {"c": "z"})
    left, _, _ = fiber_product(f, g)
    right, _, _ = fiber_product(g, f)
    assert sorted((b, a) for a, b in left.elements) == sorted(right.elements)


def test_span_compose_examples():
    x, y, z = two_over_one()
    f = make_over_map(x, z, {"a": "z", "b": "z"})
    c = Span(om_identity(x), f)
    # composing with the identity span has a canonical certificate
    _, _, bij = canonical_recoord(comp(leaf(c), id_leaf(identity_span(z))), leaf(c))
    assert bij.is_bijective()
    # empty apex propagates
    e = make_fin_over(x.base, (), {})
    empty_span = Span(make_over_map(e, z, {}), make_over_map(e, z, {}))
    composed = span_compose(Span(f, f), empty_span)
    assert composed.apex.elements == ()
    # constant middle legs give the full product
    g = make_over_map(y, z, {"c": "z"})
    full = span_compose(Span(om_identity(x), f), Span(g, om_identity(y)))
    assert full.apex.size == x.size * y.size


def test_span_tensor_examples():
    x, y, z = two_over_one()
    f = make_over_map(x, z, {"a": "z", "b": "z"})
    c = Span(f, f)
    unit = identity_span(z)
    _, _, bij = canonical_recoord(tensor(leaf(c), id_leaf(unit)), leaf(c))
    assert bij.is_bijective()
    singleton = Span(om_identity(y), om_identity(y))
    assert span_tensor(singleton, singleton).apex.size == 1
    assert span_tensor(c, c).apex.size == 4


def test_cell_check_examples():
    x, y, z = two_over_one()
    f = make_over_map(x, z, {"a": "z", "b": "z"})
    c = Span(f, f)
    ident = make_span_cell(c, c, {"a": "a", "b": "b"})
    cell_check(ident)
    swap = make_span_cell(c, c, {"a": "b", "b": "a"})
    cell_check(swap)  # equal legs, so the swap is leg-compatible
    d = Span(om_identity(x), f)
    broken = make_span_cell(d, d, {"a": "b", "b": "a"})
    with pytest.raises(ValueError, match="left leg"):
        cell_check(broken)


def test_cell_vcompose_passes():
    x, _, z = two_over_one()
    f = make_over_map(x, z, {"a": "z", "b": "z"})
    c = Span(f, f)
    s1 = make_span_cell(c, c, {"a": "b", "b": "a"})
    s2 = make_span_cell(c, c, {"a": "b", "b": "a"})
    cell_check(cell_vcompose(s2, s1))


def test_canonical_recoord_associativity():
    rng = random.Random(3)
    params = GenParams()
    base = random_base(rng, params)
    spaces = [random_space(rng, base, f"v{i}", params, min_size=1) for i in range(4)]
    c = random_span(rng, spaces[0], spaces[1], "c", params)
    d = random_span(rng, spaces[1], spaces[2], "d", params)
    e = random_span(rng, spaces[2], spaces[3], "e", params)
    sa, sb, bij = canonical_recoord(
        comp(comp(leaf(c), leaf(d)), leaf(e)), comp(leaf(c), comp(leaf(d), leaf(e)))
    )
    assert bij.is_bijective()
    for g in sa.apex.elements:
        assert sa.left(g) == sb.left(bij(g))
        assert sa.right(g) == sb.right(bij(g))


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_span_compose_associative_up_to_recoord(seed):
    rng = random.Random(seed)
    params = GenParams()
    base = random_base(rng, params)
    spaces = [random_space(rng, base, f"v{i}", params, min_size=1) for i in range(4)]
    c = random_span(rng, spaces[0], spaces[1], "c", params)
    d = random_span(rng, spaces[1], spaces[2], "d", params)
    e = random_span(rng, spaces[2], spaces[3], "e", params)
    sa, sb, bij = canonical_recoord(
        comp(comp(leaf(c), leaf(d)), leaf(e)), comp(leaf(c), comp(leaf(d), leaf(e)))
    )
    assert bij.is_bijective()
    for g in sa.apex.elements:
        assert sa.left(g) == sb.left(bij(g))
        assert sa.right(g) == sb.right(bij(g))


def test_span_iso_search_examples():
    x, y, z = two_over_one()
    f = make_over_map(x, z, {"a": "z", "b": "z"})
    c = Span(f, f)
    found = span_iso_search(c, c)
    assert found is not None and found.graph == ("a", "b")
    small = Span(make_over_map(y, z, {"c": "z"}), make_over_map(y, z, {"c": "z"}))
    assert span_iso_search(c, small) is None
    # crossed legs force the swap
    a1 = Span(om_identity(x), om_identity(x))
    crossed = Span(
        make_over_map(x, x, {"a": "b", "b": "a"}),
        make_over_map(x, x, {"a": "b", "b": "a"}),
    )
    found = span_iso_search(a1, crossed)
    assert found is not None and found.graph == ("b", "a")


def test_all_over_maps_have_finite_fibers():
    rng = random.Random(5)
    params = GenParams()
    base = random_base(rng, params)
    x = random_space(rng, base, "x", params)
    for s in base:
        assert isinstance(om_anchor(x).fiber(s), tuple)
