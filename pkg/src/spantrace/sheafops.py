"""Indexed complexes on finite sets over a base, and the six operations.

Pullback and exceptional pullback coincide (maps of finite sets behave
like finite etale maps), so the dualizing object is the constant unit
complex and duality is stalkwise.  Pushforward along any map is the
fiberwise direct sum in carrier order, which makes base change hold as a
literal matrix identity for every chosen fiber-product square.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .chainalg import (
    Complex,
    Ring,
    cx_direct_sum,
    cx_dual,
    cx_tensor,
    cx_validate,
    unit_complex,
)
from .finspan import FinOver, Label, OverMap, prod_over_base


@dataclass(frozen=True)
class Sheaf:
    """One bounded complex per carrier element, all over the same ring."""

    ring: Ring
    carrier: FinOver
    stalks: tuple[Complex, ...]

    def stalk(self, x: Label) -> Complex:
        return self.stalks[self.carrier.elements.index(x)]


def make_sheaf(ring: Ring, carrier: FinOver, stalks: Mapping[Label, Complex]) -> Sheaf:
    out = []
    for x in carrier.elements:
        if x not in stalks:
            raise ValueError(f"missing stalk at {x!r}")
        c = stalks[x]
        if c.ring != ring:
            raise ValueError(f"stalk at {x!r} has the wrong ring")
        cx_validate(c)
        out.append(c)
    return Sheaf(ring, carrier, tuple(out))


def unit_sheaf(ring: Ring, space: FinOver) -> Sheaf:
    one = unit_complex(ring)
    return Sheaf(ring, space, tuple(one for _ in space.elements))


def pull(f: OverMap, m: Sheaf) -> Sheaf:
    """Pullback: stalk at x is the stalk at f(x)."""
    if m.carrier != f.target:
        raise ValueError("carrier mismatch")
    return Sheaf(m.ring, f.source, tuple(m.stalk(f(x)) for x in f.source.elements))


def upper_shriek(f: OverMap, m: Sheaf) -> Sheaf:
    """Exceptional pullback; equal to pull in this setting."""
    return pull(f, m)


def push(f: OverMap, l: Sheaf) -> Sheaf:
    """Pushforward: stalk at y is the direct sum over the fiber, in carrier order."""
    if l.carrier != f.source:
        raise ValueError("carrier mismatch")
    stalks = tuple(
        cx_direct_sum([l.stalk(x) for x in f.fiber(y)], l.ring) for y in f.target.elements
    )
    return Sheaf(l.ring, f.target, stalks)


def box(l: Sheaf, m: Sheaf) -> Sheaf:
    """External tensor on the chosen product over the base."""
    if l.carrier.base != m.carrier.base:
        raise ValueError("base mismatch")
    if l.ring != m.ring:
        raise ValueError("ring mismatch")
    space, _, _ = prod_over_base(l.carrier, m.carrier)
    stalks = tuple(cx_tensor(l.stalk(x), m.stalk(y)) for x, y in space.elements)
    return Sheaf(l.ring, space, stalks)


def verdier(l: Sheaf) -> Sheaf:
    """Stalkwise dual; an involution on the nose."""
    return Sheaf(l.ring, l.carrier, tuple(cx_dual(c) for c in l.stalks))


def sheaf_hom(l: Sheaf, m: Sheaf) -> Sheaf:
    """Internal hom on the product: stalk at (x, y) is dual(L_x) (x) M_y."""
    if l.carrier.base != m.carrier.base:
        raise ValueError("base mismatch")
    if l.ring != m.ring:
        raise ValueError("ring mismatch")
    space, _, _ = prod_over_base(l.carrier, m.carrier)
    stalks = tuple(cx_tensor(cx_dual(l.stalk(x)), m.stalk(y)) for x, y in space.elements)
    return Sheaf(l.ring, space, stalks)


@dataclass(frozen=True)
class OmegaClass:
    """Ring-valued function on a finite set over the base."""

    ring: Ring
    carrier: FinOver
    values: tuple[int, ...]

    def value(self, x: Label) -> int:
        return self.values[self.carrier.elements.index(x)]


def make_omega(ring: Ring, carrier: FinOver, values: Mapping[Label, int]) -> OmegaClass:
    out = []
    for x in carrier.elements:
        if x not in values:
            raise ValueError(f"missing value at {x!r}")
        out.append(ring.norm(values[x]))
    return OmegaClass(ring, carrier, tuple(out))


def omega_push(q: OverMap, a: OmegaClass) -> OmegaClass:
    """Fiberwise sum; functorial in the map."""
    if a.carrier != q.source:
        raise ValueError("carrier mismatch")
    vals = tuple(a.ring.norm(sum(a.value(x) for x in q.fiber(y))) for y in q.target.elements)
    return OmegaClass(a.ring, q.target, vals)


def omega_pull(f: OverMap, a: OmegaClass) -> OmegaClass:
    """Value-copying pullback, used by base change."""
    if a.carrier != f.target:
        raise ValueError("carrier mismatch")
    return OmegaClass(a.ring, f.source, tuple(a.value(f(x)) for x in f.source.elements))


def omega_total(a: OmegaClass) -> int:
    return a.ring.norm(sum(a.values))
