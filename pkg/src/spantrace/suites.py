"""Verification suites over seeded random instances, with machine reports."""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field

from .basefunc import functor_preserves, push2_strict
from .dualtrace import (
    make_dual,
    local_pairing,
    pairing,
    pairing_functorial,
    pairing_symmetry,
    trace,
)
from .generate import (
    GenParams,
    random_base_change_for,
    random_endo_instance,
    random_lv_instance,
    random_object_instance,
    random_pair_instance,
)
from .instances import omega_doc
from .chainalg import alt_trace
from .sheafops import verdier
from .finspan import base_space

SUITE_NAMES = ("lv", "global", "triangle", "symmetry", "basechange", "oracle", "all")


@dataclass
class Check:
    index: int
    name: str
    status: str  # "pass" | "fail"
    detail: dict | None = None


@dataclass
class Report:
    suite: str
    seed: int
    count: int
    params: GenParams
    checks: list[Check] = field(default_factory=list)
    elapsed_seconds: float = 0.0

    @property
    def failures(self) -> int:
        return sum(1 for c in self.checks if c.status != "pass")

    @property
    def ok(self) -> bool:
        return self.failures == 0


def _check(index: int, name: str, ok: bool, detail: dict | None = None) -> Check:
    return Check(index, name, "pass" if ok else "fail", None if ok else detail)


def _suite_oracle(seed: int, index: int, params: GenParams) -> list[Check]:
    a, b, u, v = random_pair_instance(seed, params)
    cat = pairing(u, v, make_dual(a.obj)).omega
    loc = local_pairing(u, v)
    ok = cat == loc
    return [_check(index, "pairing equals pointwise alternating trace", ok,
                   {"lhs": omega_doc(cat), "rhs": omega_doc(loc)})]


def _suite_lv(seed: int, index: int, params: GenParams) -> list[Check]:
    inst = random_lv_instance(seed, params)
    rect = inst.lv
    dx = make_dual(rect.u.source)
    res = pairing_functorial(rect, dx, _pushed_dual(rect))
    return [_check(index, "pushforward trace identity", res.equal,
                   {"lhs": omega_doc(res.pushed), "rhs": omega_doc(res.rhs)})]


def _pushed_dual(rect):
    from .corrcat import CCObject
    from .sheafops import push

    pushed = CCObject(rect.f.target, push(rect.f, rect.u.source.sheaf))
    return make_dual(pushed)


def _suite_global(seed: int, index: int, params: GenParams) -> list[Check]:
    from .corrcat import shriek_push
    from .finspan import Span, om_anchor

    gen, e = random_endo_instance(seed, params)
    obj = gen.obj
    dx = make_dual(obj)
    tr = trace(e, dx).omega
    local_total = tr.ring.norm(sum(tr.values))

    s = base_space(obj.space.base)
    a_x = om_anchor(obj.space)
    a_c = om_anchor(e.span.apex)
    point_span = Span(om_anchor(s), om_anchor(s))
    e_tot = shriek_push(e, a_x, a_c, a_x, point_span)
    total = alt_trace(e_tot.map_at(s.elements[0]))
    ok = local_total == total
    return [_check(index, "sum of local terms equals global alternating trace", ok,
                   {"lhs": local_total, "rhs": total})]


def _suite_triangle(seed: int, index: int, params: GenParams) -> list[Check]:
    gen = random_object_instance(seed, params)
    out = []
    try:
        make_dual(gen.obj)
        out.append(_check(index, "duality triangle certificates", True))
    except ValueError as e:
        out.append(_check(index, "duality triangle certificates", False, {"error": str(e)}))
    bidual = verdier(verdier(gen.obj.sheaf)) == gen.obj.sheaf
    out.append(_check(index, "double dual is the identity on matrices", bidual))
    return out


def _suite_symmetry(seed: int, index: int, params: GenParams) -> list[Check]:
    a, b, u, v = random_pair_instance(seed, params)
    try:
        lhs, rhs, _ = pairing_symmetry(u, v, make_dual(a.obj), make_dual(b.obj))
        return [_check(index, "pairing symmetric through the swap", True)]
    except ValueError as e:
        return [_check(index, "pairing symmetric through the swap", False, {"error": str(e)})]


def _suite_basechange(seed: int, index: int, params: GenParams) -> list[Check]:
    inst = random_lv_instance(seed, params)
    rect = inst.lv
    bc = random_base_change_for(seed ^ 0x5A5A5A, inst.base, params)
    da = make_dual(rect.u.source)
    rep = functor_preserves(bc, da, rect.u, rect.v)
    out = [
        _check(index, "pullback commutes with duals strictly", rep.dual_strict),
        _check(index, "pullback commutes with pairings after recoordination",
               rep.pairing_strict, {"lhs": omega_doc(rep.lhs), "rhs": omega_doc(rep.rhs)}),
        _check(index, "pullback commutes with pushforward strictly",
               push2_strict(bc, rect)),
    ]
    return out


_SUITES = {
    "oracle": _suite_oracle,
    "lv": _suite_lv,
    "global": _suite_global,
    "triangle": _suite_triangle,
    "symmetry": _suite_symmetry,
    "basechange": _suite_basechange,
}


def run_suite(name: str, seed: int, count: int, params: GenParams | None = None) -> Report:
    if name not in SUITE_NAMES:
        raise ValueError(f"unknown suite {name!r}")
    params = params or GenParams()
    params.validate()
    names = [n for n in SUITE_NAMES if n != "all"] if name == "all" else [name]
    report = Report(name, seed, count, params)
    start = time.perf_counter()
    master = random.Random(seed)
    child_seeds = [master.getrandbits(63) for _ in range(count)]
    for suite in names:
        fn = _SUITES[suite]
        for i, child in enumerate(child_seeds):
            for check in fn(child, i, params):
                if name == "all":
                    check.name = f"{suite}: {check.name}"
                report.checks.append(check)
    report.elapsed_seconds = time.perf_counter() - start
    return report


def report_doc(report: Report) -> dict:
    return {
        "suite": report.suite,
        "seed": report.seed,
        "count": report.count,
        "params": {
            "max_set": report.params.max_set,
            "max_rank": report.params.max_rank,
            "deg_min": report.params.deg_min,
            "deg_max": report.params.deg_max,
            "modulus": report.params.modulus,
        },
        "failures": report.failures,
        "checks": [
            {"index": c.index, "name": c.name, "status": c.status,
             **({"detail": c.detail} if c.detail else {})}
            for c in report.checks
        ],
        "elapsed_seconds": report.elapsed_seconds,
    }


def report_emit(report_or_doc, fmt: str) -> str:
    doc = report_doc(report_or_doc) if isinstance(report_or_doc, Report) else report_or_doc
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"suite {doc['suite']}  seed {doc['seed']}  count {doc['count']}"]
    for c in doc["checks"]:
        lines.append(f"  [{c['status']:>4}] instance {c['index']:>4}  {c['name']}")
        if c.get("detail"):
            lines.append(f"         {json.dumps(c['detail'], sort_keys=True)}")
    n = len(doc["checks"])
    lines.append(
        f"{n - doc['failures']}/{n} checks passed in {doc['elapsed_seconds']:.2f}s"
    )
    return "\n".join(lines) + "\n"
