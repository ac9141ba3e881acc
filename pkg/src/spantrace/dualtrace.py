"""Duals, traces, pairings, and their functoriality under pushforward.

Every object here is dualizable: the dual carries the stalkwise dual
sheaf, evaluation lives on the diagonal-to-base span, coevaluation on the
base-to-diagonal span, and both triangle composites are certified against
the identity with explicit invertible 2-cells at construction time.

The pairing of u : (X, L) -> (Y, M) and v back is computed by the honest
categorical composite (coevaluation, tensor with the composite
endomorphism, symmetry, evaluation) and then recoordinated onto the
chosen fixed-point set F = {(gamma, delta) : feet interlock}.  The
pointwise formula alt_trace(v . u) is kept separate as an independent
oracle; their agreement is a theorem-shaped test, not an assumption.
"""

from __future__ import annotations

from dataclasses import dataclass
from .chainalg import (
    alt_trace,
    coev_map,
    ev_map,
    make_chain_map,
    map_compose,
    mat_transpose,
)
from .corrcat import (
    CCCell,
    CCMorphism,
    CCObject,
    cc_assoc,
    cc_assoc_inv,
    cc_cell_check,
    cc_compose,
    cc_compose_many,
    cc_identity,
    cc_invert,
    cc_iso_search,
    cc_relabel,
    cc_swap,
    cc_tensor,
    curry_morphism,
    f_natural,
    internal_hom,
    left_unitor,
    left_unitor_inv,
    make_cc_cell,
    make_cc_morphism,
    obj_tensor,
    right_unitor,
    right_unitor_inv,
    shriek_push,
    unit_object,
)
from .finspan import (
    FinOver,
    OverMap,
    Span,
    fiber_product,
    om_anchor,
    om_compose,
    prod_over_base,
)
from .sheafops import OmegaClass, omega_push, push, verdier


@dataclass(frozen=True)
class DualityData:
    obj: CCObject
    dual: CCObject
    ev: CCMorphism
    coev: CCMorphism
    triangle_obj: CCCell
    triangle_dual: CCCell


@dataclass(frozen=True)
class PairingResult:
    omega: OmegaClass


def make_dual(a: CCObject) -> DualityData:
    """Dual object, evaluation, coevaluation, and verified triangle cells."""
    ring = a.ring
    x = a.space
    dual = CCObject(x, verdier(a.sheaf))
    unit = unit_object(ring, x.base)

    dx_space, _, _ = prod_over_base(x, x)
    diag = OverMap(x, dx_space, tuple((e, e) for e in x.elements))

    ev_src = obj_tensor(dual, a)
    ev_maps = {}
    for e in x.elements:
        c = a.sheaf.stalk(e)
        ev_maps[e] = ev_map(c)
    ev = make_cc_morphism(ev_src, unit, Span(diag, om_anchor(x)), ev_maps)

    coev_tgt = obj_tensor(a, dual)
    coev_maps = {e: coev_map(a.sheaf.stalk(e)) for e in x.elements}
    coev = make_cc_morphism(unit, coev_tgt, Span(om_anchor(x), diag), coev_maps)

    t1 = _triangle_cell_obj(a, dual, ev, coev)
    t2 = _triangle_cell_dual(a, dual, ev, coev)
    cc_cell_check(t1)
    cc_cell_check(t2)
    return DualityData(a, dual, ev, coev, t1, t2)


def _triangle_cell_obj(a: CCObject, dual: CCObject, ev: CCMorphism, coev: CCMorphism) -> CCCell:
    # a -> 1 (x) a -> (a (x) a*) (x) a -> a (x) (a* (x) a) -> a (x) 1 -> a
    comp = cc_compose_many(
        left_unitor(a),
        cc_tensor(coev, cc_identity(a)),
        cc_assoc_inv(a, dual, a),
        cc_tensor(cc_identity(a), ev),
        right_unitor_inv(a),
    )
    return _cell_onto_identity(comp, a)


def _triangle_cell_dual(a: CCObject, dual: CCObject, ev: CCMorphism, coev: CCMorphism) -> CCCell:
    # a* -> a* (x) 1 -> a* (x) (a (x) a*) -> (a* (x) a) (x) a* -> 1 (x) a* -> a*
    comp = cc_compose_many(
        right_unitor(dual),
        cc_tensor(cc_identity(dual), coev),
        cc_assoc(dual, a, dual),
        cc_tensor(ev, cc_identity(dual)),
        left_unitor_inv(dual),
    )
    return _cell_onto_identity(comp, dual)


def _cell_onto_identity(comp: CCMorphism, a: CCObject) -> CCCell:
    """Invertible 2-cell from a composite endomorphism onto the identity.

    The cell map is the left leg; it must be a bijection onto the space
    with both legs agreeing, and the sum condition then demands identity
    components on the nose.
    """
    ident = cc_identity(a)
    apex = comp.span.apex
    seen = {}
    for e in apex.elements:
        l, r = comp.span.left(e), comp.span.right(e)
        if l != r:
            raise ValueError("triangle composite legs disagree")
        if l in seen:
            raise ValueError("triangle composite apex is not reduced")
        seen[l] = e
    if len(seen) != a.space.size:
        raise ValueError("triangle composite apex misses points")
    graph = {e: comp.span.left(e) for e in apex.elements}
    return make_cc_cell(comp, ident, graph)


# ---------------------------------------------------------------------------
# pairings


def fixed_point_space(u: CCMorphism, v: CCMorphism) -> FinOver:
    """Chosen interlocking set F: pairs (gamma, delta) with matching feet."""
    c, d = u.span, v.span
    xy, _, _ = prod_over_base(u.source.space, u.target.space)
    into_c = OverMap(c.apex, xy, tuple((c.left(g), c.right(g)) for g in c.apex.elements))
    into_d = OverMap(d.apex, xy, tuple((d.right(g), d.left(g)) for g in d.apex.elements))
    apex, _, _ = fiber_product(into_c, into_d)
    return apex


def local_pairing(u: CCMorphism, v: CCMorphism) -> OmegaClass:
    """Independent pointwise oracle: alternating trace of v . u per point."""
    _check_pairing_boundaries(u, v)
    f = fixed_point_space(u, v)
    ring = u.source.ring
    values = []
    for g, d in f.elements:
        values.append(alt_trace(map_compose(v.map_at(d), u.map_at(g))))
    return OmegaClass(ring, f, tuple(ring.norm(t) for t in values))


def _check_pairing_boundaries(u: CCMorphism, v: CCMorphism) -> None:
    if u.target != v.source or v.target != u.source:
        raise ValueError("pairing boundary mismatch")


def pairing(u: CCMorphism, v: CCMorphism, dx: DualityData) -> PairingResult:
    """The categorical pairing, recoordinated onto the fixed-point set."""
    _check_pairing_boundaries(u, v)
    if dx.obj != u.source:
        raise ValueError("duality data is for the wrong object")
    e = cc_compose(u, v)
    total = cc_compose_many(
        dx.coev,
        cc_tensor(e, cc_identity(dx.dual)),
        cc_swap(dx.obj, dx.dual),
        dx.ev,
    )
    f = fixed_point_space(u, v)
    found = {}
    for t in total.span.apex.elements:
        pair = t[0][0][1][0]
        if pair in found:
            raise ValueError("pairing recoordination is not injective")
        comp = total.map_at(t).component(0)
        found[pair] = comp.entries[0][0] if comp.rows and comp.cols else 0
    if set(found) != set(f.elements):
        raise ValueError("pairing recoordination misses fixed points")
    ring = u.source.ring
    values = tuple(ring.norm(found[p]) for p in f.elements)
    return PairingResult(OmegaClass(ring, f, values))


def trace(e: CCMorphism, dx: DualityData) -> PairingResult:
    """Trace of an endomorphism, carried by the loop set of its span."""
    if e.source != e.target:
        raise ValueError("endomorphism required")
    pr = pairing(e, cc_identity(e.source), dx)
    c = e.span
    loops = tuple(g for g in c.apex.elements if c.left(g) == c.right(g))
    carrier = FinOver(
        c.apex.base, loops, tuple(c.apex.anchor_of(g) for g in loops)
    )
    values = tuple(pr.omega.value((g, c.left(g))) for g in loops)
    return PairingResult(OmegaClass(e.source.ring, carrier, values))


def char_class(a: CCObject, dx: DualityData | None = None) -> OmegaClass:
    """Trace of the identity; pointwise the Euler characteristic."""
    if dx is None:
        dx = make_dual(a)
    return trace(cc_identity(a), dx).omega


def pairing_symmetry(
    u: CCMorphism, v: CCMorphism, dx: DualityData, dy: DualityData
) -> tuple[OmegaClass, OmegaClass, OverMap]:
    """Both pairings plus the interlocking swap; values must agree through it."""
    a = pairing(u, v, dx).omega
    b = pairing(v, u, dy).omega
    swap = OverMap(a.carrier, b.carrier, tuple((d, g) for g, d in a.carrier.elements))
    for g, d in a.carrier.elements:
        if a.value((g, d)) != b.value((d, g)):
            raise ValueError(f"pairing not symmetric at {(g, d)!r}")
    return a, b, swap


# ---------------------------------------------------------------------------
# dual of a morphism


def dual_of_morphism(u: CCMorphism, da: DualityData, db: DualityData) -> CCMorphism:
    """Mate of u under the dualities: target-dual -> source-dual.

    Computed by the insert-coevaluation / contract-evaluation composite;
    pointwise it is the transpose, which the tests pin down.
    """
    if da.obj != u.source or db.obj != u.target:
        raise ValueError("duality data endpoints mismatch")
    a, b = da.obj, db.obj
    comp = cc_compose_many(
        right_unitor(db.dual),
        cc_tensor(cc_identity(db.dual), da.coev),
        cc_assoc(db.dual, a, da.dual),
        cc_tensor(cc_tensor(cc_identity(db.dual), u), cc_identity(da.dual)),
        cc_tensor(db.ev, cc_identity(da.dual)),
        left_unitor_inv(da.dual),
    )
    return comp


def expected_dual_morphism(u: CCMorphism, da: DualityData, db: DualityData) -> CCMorphism:
    """Oracle shape for the mate: flipped span, components the transposes
    with the degree negated (degree n of the mate pairs against degree -n)."""
    span = Span(u.span.right, u.span.left)
    maps = {}
    for g in u.span.apex.elements:
        f = u.map_at(g)
        comps = {-n: mat_transpose(m) for n, m in f.components}
        maps[g] = make_chain_map(
            db.dual.sheaf.stalk(u.span.right(g)), da.dual.sheaf.stalk(u.span.left(g)), comps
        )
    return make_cc_morphism(db.dual, da.dual, span, maps)


# ---------------------------------------------------------------------------
# functoriality under pushforward


@dataclass(frozen=True)
class PushRectangles:
    """The two-rectangle diagram: upper morphisms u, v over spans c, d,
    vertical maps f (on X), p, g (on Y), q, lower spans cp, dp."""

    f: OverMap
    p: OverMap
    g: OverMap
    q: OverMap
    u: CCMorphism
    v: CCMorphism
    cp: Span
    dp: Span

    def validate(self) -> None:
        c, d = self.u.span, self.v.span
        checks = [
            (om_compose(self.f, c.left), om_compose(self.cp.left, self.p)),
            (om_compose(self.g, c.right), om_compose(self.cp.right, self.p)),
            (om_compose(self.g, d.left), om_compose(self.dp.left, self.q)),
            (om_compose(self.f, d.right), om_compose(self.dp.right, self.q)),
        ]
        for lhs, rhs in checks:
            if lhs != rhs:
                raise ValueError("non-commuting diagram")
        _check_pairing_boundaries(self.u, self.v)


@dataclass(frozen=True)
class Splitting:
    """Explicit splitting data for the left down-square: the diagonal
    morphism w together with the two defining 2-cells."""

    w: CCMorphism
    gamma: CCCell
    delta: CCCell


def proper_splitting(rect: PushRectangles) -> Splitting:
    """Canonical splitting of the left down-square (all maps are proper):
    the diagonal is the pushforward of u along (f, id, id)."""
    u, f, p = rect.u, rect.f, rect.p
    c = u.span
    idc = OverMap(c.apex, c.apex, c.apex.elements)
    idy = OverMap(u.target.space, u.target.space, u.target.space.elements)
    diag_span = Span(om_compose(f, c.left), c.right)
    w = shriek_push(u, f, idc, idy, diag_span)

    fn = f_natural(f, u.source.sheaf)
    comp_fw = cc_compose(fn, w)
    gamma = make_cc_cell(u, comp_fw, {g: (c.left(g), g) for g in c.apex.elements})

    gn = f_natural(rect.g, u.target.sheaf)
    comp_wg = cc_compose(w, gn)
    pushed = shriek_push(u, f, p, rect.g, rect.cp)
    delta = make_cc_cell(comp_wg, pushed, {e: p(e[0]) for e in comp_wg.span.apex.elements})
    cc_cell_check(gamma)
    cc_cell_check(delta)
    return Splitting(w, gamma, delta)


@dataclass(frozen=True)
class FunctorialResult:
    s: OverMap
    pushed: OmegaClass
    rhs: OmegaClass

    @property
    def equal(self) -> bool:
        return self.pushed == self.rhs


def pairing_functorial(
    rect: PushRectangles,
    dx: DualityData,
    dxp: DualityData,
    splitting: Splitting | None = None,
) -> FunctorialResult:
    """Push the pairing along the induced map of fixed-point sets and
    compare with the pairing of the pushed morphisms; exact equality.

    With explicit splitting data supplied, the apex component of the
    induced map is read off the delta cell instead of the raw vertical
    map (the two agree; the cells are checked either way).
    """
    rect.validate()
    lhs = pairing(rect.u, rect.v, dx).omega
    u2 = shriek_push(rect.u, rect.f, rect.p, rect.g, rect.cp)
    v2 = shriek_push(rect.v, rect.g, rect.q, rect.f, rect.dp)
    if dxp.obj != u2.source:
        raise ValueError("duality data for the pushed object is wrong")
    rhs = pairing(u2, v2, dxp).omega

    if splitting is not None:
        cc_cell_check(splitting.gamma)
        cc_cell_check(splitting.delta)
        c = rect.u.span

        def push_gamma(g):
            return splitting.delta.graph((g, c.right(g)))

    else:

        def push_gamma(g):
            return rect.p(g)

    graph = tuple((push_gamma(g), rect.q(d)) for g, d in lhs.carrier.elements)
    s = OverMap(lhs.carrier, rhs.carrier, graph)
    pushed = omega_push(s, lhs)
    return FunctorialResult(s, pushed, rhs)


def push_preserves_dual(f: OverMap, dx: DualityData) -> DualityData:
    """Certified duality data for the pushforward; its dual sheaf equals
    the pushforward of the dual sheaf on the nose."""
    if f.source != dx.obj.space:
        raise ValueError("carrier mismatch")
    pushed = CCObject(f.target, push(f, dx.obj.sheaf))
    data = make_dual(pushed)
    if data.dual.sheaf != push(f, dx.dual.sheaf):
        raise ValueError("pushforward does not commute with the dual")
    return data


# ---------------------------------------------------------------------------
# split-epimorphism criterion for dualizability


def split_epi_criterion(a: CCObject) -> tuple[CCMorphism, CCMorphism]:
    """The comparison a (x) hom(a, 1) -> hom(a, a) and a section of it.

    In this model the comparison is invertible (stalkwise a signed
    permutation), so the section is its inverse.
    """
    ring = a.ring
    unit = unit_object(ring, a.space.base)
    hom_a1 = internal_hom(a, unit)
    da = make_dual(a)
    # identify the abstract hom with the dual object: (x, s) -> x
    ident = cc_relabel(hom_a1, da.dual, lambda e: e[0])
    ev_via_hom = cc_compose(cc_tensor(ident, cc_identity(a)), da.ev)
    big = cc_compose_many(
        cc_assoc_inv(a, hom_a1, a),
        cc_tensor(cc_identity(a), ev_via_hom),
        right_unitor_inv(a),
    )
    m = curry_morphism(big, obj_tensor(a, hom_a1), a)
    section = cc_invert(m)
    roundtrip = cc_compose(section, m)
    if cc_iso_search(roundtrip, cc_identity(m.target)) is None:
        raise ValueError("section is not a section")
    return m, section
