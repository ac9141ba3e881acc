"""Finite sets over a base, anchored maps, spans and 2-cells between spans.

Fiber products are chosen once and for all (pair sets in lexicographic
input order), so composites of spans are honest values and canonical
identifications between differently-bracketed composites are explicit
bijections rather than abstract isomorphisms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

Label = Union[str, tuple]


@dataclass(frozen=True)
class FinOver:
    """Finite set of labels anchored to a base set."""

    base: tuple[Label, ...]
    elements: tuple[Label, ...]
    anchor: tuple[Label, ...]
    _amap: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_amap", dict(zip(self.elements, self.anchor)))

    def anchor_of(self, x: Label) -> Label:
        return self._amap[x]

    def __contains__(self, x: Label) -> bool:
        return x in self._amap

    @property
    def size(self) -> int:
        return len(self.elements)


def make_fin_over(base: Sequence[Label], elements: Sequence[Label], anchor: Mapping[Label, Label]) -> FinOver:
    base = tuple(base)
    elements = tuple(elements)
    if len(set(elements)) != len(elements):
        raise ValueError("duplicate labels")
    if len(set(base)) != len(base):
        raise ValueError("duplicate base labels")
    anchors = []
    for x in elements:
        if x not in anchor:
            raise ValueError(f"missing anchor for {x!r}")
        a = anchor[x]
        if a not in base:
            raise ValueError(f"anchor of {x!r} is {a!r}, not a base element")
        anchors.append(a)
    return FinOver(base, elements, tuple(anchors))


def base_space(base: Sequence[Label]) -> FinOver:
    base = tuple(base)
    return FinOver(base, base, base)


@dataclass(frozen=True)
class OverMap:
    """Total map of finite sets commuting with the anchors."""

    source: FinOver
    target: FinOver
    graph: tuple[Label, ...]
    _gmap: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_gmap", dict(zip(self.source.elements, self.graph)))

    def __call__(self, x: Label) -> Label:
        return self._gmap[x]

    def fiber(self, y: Label) -> tuple[Label, ...]:
        return tuple(x for x, v in zip(self.source.elements, self.graph) if v == y)

    def is_bijective(self) -> bool:
        return len(set(self.graph)) == len(self.graph) == self.target.size


def make_over_map(source: FinOver, target: FinOver, graph: Mapping[Label, Label]) -> OverMap:
    if source.base != target.base:
        raise ValueError("base mismatch")
    out = []
    for x in source.elements:
        if x not in graph:
            raise ValueError(f"map not total: missing {x!r}")
        y = graph[x]
        if y not in target:
            raise ValueError(f"image {y!r} of {x!r} not in target")
        if target.anchor_of(y) != source.anchor_of(x):
            raise ValueError(f"map does not commute with anchors at {x!r}")
        out.append(y)
    return OverMap(source, target, tuple(out))


def om_identity(x: FinOver) -> OverMap:
    return OverMap(x, x, x.elements)


def om_compose(g: OverMap, f: OverMap) -> OverMap:
    """g after f."""
    if f.target != g.source:
        raise ValueError("composition boundary mismatch")
    return OverMap(f.source, g.target, tuple(g(f(x)) for x in f.source.elements))


def om_anchor(x: FinOver) -> OverMap:
    """The anchor viewed as a map to the base regarded as a space."""
    return OverMap(x, base_space(x.base), x.anchor)


def om_inverse(f: OverMap) -> OverMap:
    if not f.is_bijective():
        raise ValueError("not bijective")
    inv = {y: x for x, y in zip(f.source.elements, f.graph)}
    return OverMap(f.target, f.source, tuple(inv[y] for y in f.target.elements))


def fiber_product(f: OverMap, g: OverMap) -> tuple[FinOver, OverMap, OverMap]:
    """Chosen fiber product along f: X -> Z, g: Y -> Z.

    Elements are the pairs (x, y) with f(x) = g(y), in lexicographic input
    order; returns the set together with the two projections.
    """
    if f.target != g.target:
        raise ValueError("fiber product target mismatch")
    elements, anchors = [], []
    for x in f.source.elements:
        fx = f(x)
        ax = f.source.anchor_of(x)
        for y in g.source.elements:
            if g(y) == fx:
                elements.append((x, y))
                anchors.append(ax)
    apex = FinOver(f.source.base, tuple(elements), tuple(anchors))
    pr1 = OverMap(apex, f.source, tuple(e[0] for e in elements))
    pr2 = OverMap(apex, g.source, tuple(e[1] for e in elements))
    return apex, pr1, pr2


def prod_over_base(x: FinOver, y: FinOver) -> tuple[FinOver, OverMap, OverMap]:
    """Chosen product over the base: pairs with equal anchors."""
    if x.base != y.base:
        raise ValueError("base mismatch")
    return fiber_product(om_anchor(x), om_anchor(y))


@dataclass(frozen=True)
class Span:
    """Correspondence X <- C -> Y over the base; left and right share the apex."""

    left: OverMap
    right: OverMap

    def __post_init__(self):
        if self.left.source != self.right.source:
            raise ValueError("span legs must share their source")

    @property
    def apex(self) -> FinOver:
        return self.left.source


def identity_span(x: FinOver) -> Span:
    i = om_identity(x)
    return Span(i, i)


def span_compose(c: Span, d: Span) -> Span:
    """Composite correspondence via the chosen fiber product of the middle legs."""
    if c.right.target != d.left.target:
        raise ValueError("span boundary mismatch")
    _, pr1, pr2 = fiber_product(c.right, d.left)
    return Span(om_compose(c.left, pr1), om_compose(d.right, pr2))


def span_tensor(c: Span, d: Span) -> Span:
    """Pointwise product of correspondences over the base."""
    if c.apex.base != d.apex.base:
        raise ValueError("base mismatch")
    apex, pr1, pr2 = prod_over_base(c.apex, d.apex)
    lspace, _, _ = prod_over_base(c.left.target, d.left.target)
    rspace, _, _ = prod_over_base(c.right.target, d.right.target)
    left = OverMap(apex, lspace, tuple((c.left(a), d.left(b)) for a, b in apex.elements))
    right = OverMap(apex, rspace, tuple((c.right(a), d.right(b)) for a, b in apex.elements))
    return Span(left, right)


@dataclass(frozen=True)
class SpanCell:
    """2-cell between parallel spans: a map of apexes commuting with both legs."""

    source: Span
    target: Span
    graph: OverMap


def make_span_cell(source: Span, target: Span, graph: Mapping[Label, Label]) -> SpanCell:
    g = make_over_map(source.apex, target.apex, graph)
    return SpanCell(source, target, g)


def cell_check(p: SpanCell) -> None:
    """Check both leg equations; raises naming the failing leg."""
    if p.source.left.target != p.target.left.target or p.source.right.target != p.target.right.target:
        raise ValueError("cell between non-parallel spans")
    for x in p.source.apex.elements:
        if p.target.left(p.graph(x)) != p.source.left(x):
            raise ValueError(f"left leg broken at {x!r}")
    for x in p.source.apex.elements:
        if p.target.right(p.graph(x)) != p.source.right(x):
            raise ValueError(f"right leg broken at {x!r}")


def cell_vcompose(q: SpanCell, p: SpanCell) -> SpanCell:
    if p.target != q.source:
        raise ValueError("vertical composition boundary mismatch")
    return SpanCell(p.source, q.target, om_compose(q.graph, p.graph))


# ---------------------------------------------------------------------------
# canonical recoordination

# Span expressions: Leaf(span) holds a building block; unit-like leaves
# (identity spans and the unit span of the base) contribute no coordinate
# to the normal form, which makes reassociation and unit insertion into
# explicit apex bijections.


@dataclass(frozen=True)
class SpanExpr:
    kind: str  # "leaf" | "id_leaf" | "comp" | "tensor"
    span: Span | None = None
    a: "SpanExpr | None" = None
    b: "SpanExpr | None" = None


def leaf(span: Span) -> SpanExpr:
    return SpanExpr("leaf", span=span)


def id_leaf(span: Span) -> SpanExpr:
    """A leaf whose apex coordinate is redundant (identity or unit span)."""
    return SpanExpr("id_leaf", span=span)


def comp(a: SpanExpr, b: SpanExpr) -> SpanExpr:
    return SpanExpr("comp", a=a, b=b)


def tensor(a: SpanExpr, b: SpanExpr) -> SpanExpr:
    return SpanExpr("tensor", a=a, b=b)


def eval_span_expr(e: SpanExpr) -> tuple[Span, Callable[[Label], tuple]]:
    """Evaluate to the chosen span plus the normal-form extractor on its apex."""
    if e.kind in ("leaf", "id_leaf"):
        keep = e.kind == "leaf"
        return e.span, (lambda x: (x,)) if keep else (lambda x: ())
    sa, na = eval_span_expr(e.a)
    sb, nb = eval_span_expr(e.b)
    if e.kind == "comp":
        span = span_compose(sa, sb)
    else:
        span = span_tensor(sa, sb)
    return span, lambda x: na(x[0]) + nb(x[1])


def canonical_recoord(ea: SpanExpr, eb: SpanExpr) -> tuple[Span, Span, OverMap]:
    """Canonical bijection between the apexes of two parallel composites.

    Both expressions must evaluate to spans whose apexes have the same
    normal forms (the tuples of non-redundant leaf coordinates); the
    bijection is the evident retupling and is checked to be one.
    """
    sa, na = eval_span_expr(ea)
    sb, nb = eval_span_expr(eb)
    forms_b = {}
    for y in sb.apex.elements:
        key = nb(y)
        if key in forms_b:
            raise ValueError("normal forms not unique; expressions not canonically parallel")
        forms_b[key] = y
    graph = {}
    for x in sa.apex.elements:
        key = na(x)
        if key not in forms_b:
            raise ValueError("expressions not parallel")
        graph[x] = forms_b[key]
    if len(set(graph.values())) != sb.apex.size or sa.apex.size != sb.apex.size:
        raise ValueError("expressions not parallel")
    bij = OverMap(sa.apex, sb.apex, tuple(graph[x] for x in sa.apex.elements))
    return sa, sb, bij


def span_iso_search(a: Span, b: Span) -> OverMap | None:
    """Leg-compatible bijection between parallel spans, if one exists.

    A bijection is leg-compatible exactly when it matches elements with
    identical (left, right) images, so a deterministic greedy matching by
    signature is complete; absence is returned as None.
    """
    if a.left.target != b.left.target or a.right.target != b.right.target:
        raise ValueError("spans not parallel")
    if a.apex.size != b.apex.size:
        return None
    sig = lambda s, x: (s.left(x), s.right(x))
    buckets: dict[tuple, list[Label]] = {}
    for y in b.apex.elements:
        buckets.setdefault(sig(b, y), []).append(y)
    graph = {}
    for x in a.apex.elements:
        pool = buckets.get(sig(a, x))
        if not pool:
            return None
        graph[x] = pool.pop(0)
    return OverMap(a.apex, b.apex, tuple(graph[x] for x in a.apex.elements))
