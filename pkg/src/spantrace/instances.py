"""Instance files: named spaces, maps, objects, spans and morphisms in
JSON, with an optional pushforward rectangle and base-change datum.

Parsing validates everything (anchors, chain conditions, span feet) and
reports the first failure with a JSON-pointer style location.  Emission
is canonical, so parse . emit . parse == parse and fixtures round-trip
byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .basefunc import BaseChange, make_base_change
from .chainalg import Complex, Matrix, Ring, make_chain_map, make_complex, mat
from .corrcat import CCMorphism, CCObject, make_cc_morphism
from .dualtrace import PushRectangles
from .finspan import FinOver, OverMap, Span, make_fin_over, make_over_map
from .sheafops import OmegaClass, make_sheaf


class ParseError(ValueError):
    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


@dataclass
class Instance:
    ring: Ring
    base: tuple[str, ...]
    spaces: dict[str, FinOver] = field(default_factory=dict)
    maps: dict[str, OverMap] = field(default_factory=dict)
    objects: dict[str, CCObject] = field(default_factory=dict)
    spans: dict[str, Span] = field(default_factory=dict)
    morphisms: dict[str, CCMorphism] = field(default_factory=dict)
    lv: PushRectangles | None = None
    lv_names: dict[str, str] | None = None
    base_change: BaseChange | None = None


def _expect(cond: bool, loc: str, msg: str) -> None:
    if not cond:
        raise ParseError(loc, msg)


def _as_dict(x, loc):
    _expect(isinstance(x, dict), loc, "expected an object")
    return x


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError("/", f"invalid JSON: {e}") from None
    doc = _as_dict(doc, "/")
    _expect("modulus" in doc, "/modulus", "missing")
    _expect(isinstance(doc["modulus"], int) and doc["modulus"] >= 0, "/modulus", "must be a non-negative integer")
    ring = Ring(doc["modulus"])
    _expect("base" in doc, "/base", "missing")
    base = doc["base"]
    _expect(isinstance(base, list) and all(isinstance(x, str) for x in base), "/base", "must be a list of strings")
    inst = Instance(ring, tuple(base))

    for name, raw in _as_dict(doc.get("spaces", {}), "/spaces").items():
        loc = f"/spaces/{name}"
        raw = _as_dict(raw, loc)
        els = raw.get("elements")
        _expect(isinstance(els, list) and all(isinstance(x, str) for x in els), f"{loc}/elements", "must be a list of strings")
        anchor = _as_dict(raw.get("anchor", {}), f"{loc}/anchor")
        try:
            inst.spaces[name] = make_fin_over(inst.base, els, anchor)
        except ValueError as e:
            raise ParseError(loc, str(e)) from None

    for name, raw in _as_dict(doc.get("maps", {}), "/maps").items():
        loc = f"/maps/{name}"
        raw = _as_dict(raw, loc)
        src = _ref(inst.spaces, raw.get("source"), f"{loc}/source", "space")
        tgt = _ref(inst.spaces, raw.get("target"), f"{loc}/target", "space")
        graph = _as_dict(raw.get("graph", {}), f"{loc}/graph")
        try:
            inst.maps[name] = make_over_map(src, tgt, graph)
        except ValueError as e:
            raise ParseError(loc, str(e)) from None

    for name, raw in _as_dict(doc.get("objects", {}), "/objects").items():
        loc = f"/objects/{name}"
        raw = _as_dict(raw, loc)
        space = _ref(inst.spaces, raw.get("space"), f"{loc}/space", "space")
        stalks_raw = _as_dict(raw.get("stalks", {}), f"{loc}/stalks")
        stalks = {}
        for el, c in stalks_raw.items():
            stalks[el] = parse_complex(ring, c, f"{loc}/stalks/{el}")
        try:
            sheaf = make_sheaf(ring, space, stalks)
        except ValueError as e:
            raise ParseError(f"{loc}/stalks", str(e)) from None
        inst.objects[name] = CCObject(space, sheaf)

    for name, raw in _as_dict(doc.get("spans", {}), "/spans").items():
        loc = f"/spans/{name}"
        raw = _as_dict(raw, loc)
        left = _ref(inst.maps, raw.get("left"), f"{loc}/left", "map")
        right = _ref(inst.maps, raw.get("right"), f"{loc}/right", "map")
        try:
            inst.spans[name] = Span(left, right)
        except ValueError as e:
            raise ParseError(loc, str(e)) from None

    for name, raw in _as_dict(doc.get("morphisms", {}), "/morphisms").items():
        loc = f"/morphisms/{name}"
        raw = _as_dict(raw, loc)
        span = _ref(inst.spans, raw.get("span"), f"{loc}/span", "span")
        src = _ref(inst.objects, raw.get("source"), f"{loc}/source", "object")
        tgt = _ref(inst.objects, raw.get("target"), f"{loc}/target", "object")
        maps_raw = _as_dict(raw.get("maps", {}), f"{loc}/maps")
        maps = {}
        for el in span.apex.elements:
            mloc = f"{loc}/maps/{el}"
            _expect(el in maps_raw, mloc, "missing component")
            comps = {}
            for deg, rows in _as_dict(maps_raw[el], mloc).items():
                comps[_int(deg, mloc)] = _matrix(ring, rows, mloc, src.sheaf.stalk(span.left(el)).rank(_int(deg, mloc)))
            try:
                maps[el] = make_chain_map(
                    src.sheaf.stalk(span.left(el)), tgt.sheaf.stalk(span.right(el)), comps
                )
            except ValueError as e:
                raise ParseError(mloc, str(e)) from None
        try:
            inst.morphisms[name] = make_cc_morphism(src, tgt, span, maps)
        except ValueError as e:
            raise ParseError(loc, str(e)) from None

    if "lv" in doc:
        loc = "/lv"
        raw = _as_dict(doc["lv"], loc)
        names = {}
        for key in ("f", "p", "g", "q", "u", "v", "cp", "dp"):
            _expect(key in raw, f"{loc}/{key}", "missing")
            names[key] = raw[key]
        try:
            rect = PushRectangles(
                f=_ref(inst.maps, names["f"], f"{loc}/f", "map"),
                p=_ref(inst.maps, names["p"], f"{loc}/p", "map"),
                g=_ref(inst.maps, names["g"], f"{loc}/g", "map"),
                q=_ref(inst.maps, names["q"], f"{loc}/q", "map"),
                u=_ref(inst.morphisms, names["u"], f"{loc}/u", "morphism"),
                v=_ref(inst.morphisms, names["v"], f"{loc}/v", "morphism"),
                cp=_ref(inst.spans, names["cp"], f"{loc}/cp", "span"),
                dp=_ref(inst.spans, names["dp"], f"{loc}/dp", "span"),
            )
            rect.validate()
        except ValueError as e:
            raise ParseError(loc, str(e)) from None
        inst.lv = rect
        inst.lv_names = names

    if "base_change" in doc:
        loc = "/base_change"
        raw = _as_dict(doc["base_change"], loc)
        graph = _as_dict(raw.get("g", {}), f"{loc}/g")
        try:
            inst.base_change = make_base_change(tuple(graph.keys()), graph, inst.base)
        except ValueError as e:
            raise ParseError(loc, str(e)) from None
    return inst


def _ref(table: dict, name, loc: str, kind: str):
    _expect(isinstance(name, str), loc, f"expected a {kind} name")
    _expect(name in table, loc, f"unknown {kind} {name!r}")
    return table[name]


def _int(s: str, loc: str) -> int:
    try:
        return int(s)
    except (TypeError, ValueError):
        raise ParseError(loc, f"bad integer key {s!r}") from None


def _matrix(ring: Ring, rows, loc: str, cols_hint: int) -> Matrix:
    _expect(
        isinstance(rows, list) and all(isinstance(r, list) and all(isinstance(x, int) for x in r) for r in rows),
        loc,
        "expected a matrix as a list of integer rows",
    )
    try:
        return mat(ring, rows, cols=cols_hint if not rows else None)
    except ValueError as e:
        raise ParseError(loc, str(e)) from None


def parse_complex(ring: Ring, raw, loc: str) -> Complex:
    raw = _as_dict(raw, loc)
    ranks = {}
    for deg, r in _as_dict(raw.get("ranks", {}), f"{loc}/ranks").items():
        _expect(isinstance(r, int) and r >= 0, f"{loc}/ranks/{deg}", "rank must be a non-negative integer")
        ranks[_int(deg, f"{loc}/ranks")] = r
    diff = {}
    for deg, rows in _as_dict(raw.get("diff", {}), f"{loc}/diff").items():
        n = _int(deg, f"{loc}/diff")
        diff[n] = _matrix(ring, rows, f"{loc}/diff/{deg}", ranks.get(n, 0))
    try:
        return make_complex(ring, ranks, diff)
    except ValueError as e:
        raise ParseError(loc, str(e)) from None


def parse_file(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


# ---------------------------------------------------------------------------
# emission


def complex_doc(c: Complex) -> dict:
    return {
        "ranks": {str(n): r for n, r in c.ranks},
        "diff": {str(n): [list(r) for r in m.entries] for n, m in c.diff},
    }


def emit_instance(inst: Instance) -> str:
    doc: dict = {"modulus": inst.ring.modulus, "base": list(inst.base)}
    doc["spaces"] = {
        name: {
            "elements": list(s.elements),
            "anchor": {x: s.anchor_of(x) for x in s.elements},
        }
        for name, s in inst.spaces.items()
    }
    doc["maps"] = {
        name: {
            "source": _name_of(inst.spaces, m.source),
            "target": _name_of(inst.spaces, m.target),
            "graph": {x: m(x) for x in m.source.elements},
        }
        for name, m in inst.maps.items()
    }
    doc["objects"] = {
        name: {
            "space": _name_of(inst.spaces, o.space),
            "stalks": {x: complex_doc(o.sheaf.stalk(x)) for x in o.space.elements},
        }
        for name, o in inst.objects.items()
    }
    doc["spans"] = {
        name: {"left": _name_of(inst.maps, s.left), "right": _name_of(inst.maps, s.right)}
        for name, s in inst.spans.items()
    }
    doc["morphisms"] = {
        name: {
            "span": _name_of(inst.spans, m.span),
            "source": _name_of(inst.objects, m.source),
            "target": _name_of(inst.objects, m.target),
            "maps": {
                g: {str(n): [list(r) for r in c.entries] for n, c in m.map_at(g).components}
                for g in m.span.apex.elements
            },
        }
        for name, m in inst.morphisms.items()
    }
    if inst.lv is not None:
        doc["lv"] = dict(inst.lv_names)
    if inst.base_change is not None:
        g = inst.base_change.g
        doc["base_change"] = {"g": {x: g(x) for x in g.source.elements}}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _name_of(table: dict, value) -> str:
    # prefer the identical object: distinct registered values can compare
    # equal (e.g. two empty spaces), and naming must stay stable
    for name, v in table.items():
        if v is value:
            return name
    for name, v in table.items():
        if v == value:
            return name
    raise ValueError("value not registered under a name")


def omega_doc(a: OmegaClass) -> dict:
    return {
        "carrier": [_label_doc(x) for x in a.carrier.elements],
        "values": {_label_key(x): a.value(x) for x in a.carrier.elements},
    }


def _label_doc(x):
    if isinstance(x, tuple):
        return [_label_doc(y) for y in x]
    return x


def _label_key(x) -> str:
    if isinstance(x, str):
        return x
    return json.dumps(_label_doc(x), separators=(",", ":"))
