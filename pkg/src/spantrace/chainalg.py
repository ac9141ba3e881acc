"""Exact linear algebra over Z or Z/m and bounded chain complexes of
finite-rank free modules.

Cohomological convention throughout: the differential raises degree,
d^n : C^n -> C^(n+1).  The tensor differential follows the Koszul rule
d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy.  Duality uses the plain
transpose for the dual differential and puts the compensating signs
(-1)^(p(p+1)/2) into the evaluation and coevaluation maps; this is the
unique distribution of signs (given the Koszul rule above) for which
evaluation/coevaluation are chain maps, the triangle composites are the
strict identity, the categorical trace is the alternating trace, and
dualizing twice returns the original matrices on the nose.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence


@dataclass(frozen=True)
class Ring:
    """Coefficient ring: modulus 0 means Z, modulus m > 0 means Z/m."""

    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 0:
            raise ValueError("modulus must be non-negative")

    def norm(self, x: int) -> int:
        return x % self.modulus if self.modulus else x


ZZ = Ring(0)


@dataclass(frozen=True)
class Matrix:
    """Dense matrix with normalized entries; rows x cols over a Ring."""

    ring: Ring
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]


def mat(ring: Ring, rows: Sequence[Sequence[int]], cols: int | None = None) -> Matrix:
    nrows = len(rows)
    if nrows == 0:
        if cols is None:
            cols = 0
        return Matrix(ring, 0, cols, ())
    ncols = len(rows[0])
    if cols is not None and cols != ncols:
        raise ValueError(f"expected {cols} columns, got {ncols}")
    ent = []
    for r in rows:
        if len(r) != ncols:
            raise ValueError("ragged rows")
        ent.append(tuple(ring.norm(x) for x in r))
    return Matrix(ring, nrows, ncols, tuple(ent))


def mat_zero(ring: Ring, rows: int, cols: int) -> Matrix:
    return Matrix(ring, rows, cols, tuple((0,) * cols for _ in range(rows)))


@lru_cache(maxsize=4096)
def mat_identity(ring: Ring, n: int) -> Matrix:
    return Matrix(
        ring, n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    )


def _same_ring(a: Matrix, b: Matrix) -> Ring:
    if a.ring != b.ring:
        raise ValueError("ring mismatch")
    return a.ring


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    ring = _same_ring(a, b)
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise ValueError(f"shape mismatch: {a.rows}x{a.cols} + {b.rows}x{b.cols}")
    norm = ring.norm
    return Matrix(
        ring,
        a.rows,
        a.cols,
        tuple(
            tuple(norm(x + y) for x, y in zip(ra, rb))
            for ra, rb in zip(a.entries, b.entries)
        ),
    )


def mat_scale(c: int, a: Matrix) -> Matrix:
    norm = a.ring.norm
    return Matrix(
        a.ring, a.rows, a.cols, tuple(tuple(norm(c * x) for x in row) for row in a.entries)
    )


def mat_neg(a: Matrix) -> Matrix:
    return mat_scale(-1, a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    ring = _same_ring(a, b)
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch: {a.rows}x{a.cols} times {b.rows}x{b.cols}")
    if a.cols == 0:
        return mat_zero(ring, a.rows, b.cols)
    norm = ring.norm
    bent = b.entries
    ncols = b.cols
    rows = []
    for arow in a.entries:
        acc = [0] * ncols
        for k, x in enumerate(arow):
            if x:
                brow = bent[k]
                for j in range(ncols):
                    y = brow[j]
                    if y:
                        acc[j] += x * y
        rows.append(tuple(norm(v) for v in acc))
    return Matrix(ring, a.rows, ncols, tuple(rows))


def mat_trace(a: Matrix) -> int:
    if a.rows != a.cols:
        raise ValueError(f"trace of non-square {a.rows}x{a.cols} matrix")
    return a.ring.norm(sum(a.entries[i][i] for i in range(a.rows)))


def mat_transpose(a: Matrix) -> Matrix:
    rows = tuple(tuple(a.entries[i][j] for i in range(a.rows)) for j in range(a.cols))
    return Matrix(a.ring, a.cols, a.rows, rows)


def mat_kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product in row-major block layout: index (i,k) -> i*b.rows + k."""
    ring = _same_ring(a, b)
    norm = ring.norm
    rows = []
    for i in range(a.rows):
        arow = a.entries[i]
        for k in range(b.rows):
            brow = b.entries[k]
            rows.append(tuple(norm(arow[j] * brow[l]) for j in range(a.cols) for l in range(b.cols)))
    return Matrix(ring, a.rows * b.rows, a.cols * b.cols, tuple(rows))


def mat_block(
    ring: Ring,
    row_parts: Sequence[int],
    col_parts: Sequence[int],
    blocks: Mapping[tuple[int, int], Matrix],
) -> Matrix:
    """Assemble a block matrix; absent blocks are zero."""
    grid = [[0] * sum(col_parts) for _ in range(sum(row_parts))]
    row_off = _offsets(row_parts)
    col_off = _offsets(col_parts)
    for (bi, bj), m in blocks.items():
        if (m.rows, m.cols) != (row_parts[bi], col_parts[bj]):
            raise ValueError("block shape mismatch")
        r0, c0 = row_off[bi], col_off[bj]
        for i, row in enumerate(m.entries):
            for j, x in enumerate(row):
                grid[r0 + i][c0 + j] = x
    return mat(ring, grid, cols=sum(col_parts))


def _offsets(parts: Sequence[int]) -> list[int]:
    out, acc = [], 0
    for p in parts:
        out.append(acc)
        acc += p
    return out


# ---------------------------------------------------------------------------
# complexes


@dataclass(frozen=True)
class Complex:
    """Bounded complex of finite-rank free modules.

    ranks holds (degree, rank) pairs with rank > 0, sorted by degree; diff
    holds the differential matrices for every degree n where both rank(n)
    and rank(n+1) are positive (zero matrices included, so equality of
    complexes is plain structural equality).
    """

    ring: Ring
    ranks: tuple[tuple[int, int], ...]
    diff: tuple[tuple[int, Matrix], ...]

    def rank(self, n: int) -> int:
        for d, r in self.ranks:
            if d == n:
                return r
        return 0

    def d(self, n: int) -> Matrix:
        for d, m in self.diff:
            if d == n:
                return m
        return mat_zero(self.ring, self.rank(n + 1), self.rank(n))

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.ranks)

    @property
    def total_rank(self) -> int:
        return sum(r for _, r in self.ranks)


def make_complex(
    ring: Ring,
    ranks: Mapping[int, int],
    diff: Mapping[int, Matrix | Sequence[Sequence[int]]] | None = None,
) -> Complex:
    rk = tuple(sorted((int(n), r) for n, r in ranks.items() if r != 0))
    for _, r in rk:
        if r < 0:
            raise ValueError("negative rank")
    rank_of = dict(rk)
    stored = []
    diff = diff or {}
    for n, r in rk:
        r_up = rank_of.get(n + 1, 0)
        if r_up == 0:
            continue
        m = diff.get(n)
        if m is None:
            m = mat_zero(ring, r_up, r)
        elif not isinstance(m, Matrix):
            m = mat(ring, m, cols=r)
        if (m.rows, m.cols) != (r_up, r):
            raise ValueError(f"differential at degree {n} has shape {m.rows}x{m.cols}, expected {r_up}x{r}")
        if m.ring != ring:
            raise ValueError("ring mismatch in differential")
        stored.append((n, m))
    return Complex(ring, rk, tuple(stored))


def unit_complex(ring: Ring) -> Complex:
    return make_complex(ring, {0: 1})


def zero_complex(ring: Ring) -> Complex:
    return make_complex(ring, {})


def cx_validate(c: Complex) -> None:
    """Check d.d = 0; raises with the first failing degree."""
    for n, _ in c.ranks:
        if c.rank(n + 1) and c.rank(n + 2):
            prod = mat_mul(c.d(n + 1), c.d(n))
            if prod != mat_zero(c.ring, c.rank(n + 2), c.rank(n)):
                raise ValueError(f"d.d != 0 at degree {n}")


def cx_shift_degrees(c: Complex) -> tuple[int, int]:
    degs = c.degrees
    return (degs[0], degs[-1]) if degs else (0, 0)


# tensor layout: summands of (a (x) b)^n are the pairs (p, q), p + q = n,
# ordered by q ascending; within a summand the basis is row-major,
# (i, j) -> i * rank_b(q) + j.


def tensor_summands(a: Complex, b: Complex, n: int) -> list[tuple[int, int]]:
    out = []
    for q, rq in b.ranks:
        p = n - q
        if a.rank(p) > 0:
            out.append((p, q))
    return out


def tensor_offsets(a: Complex, b: Complex, n: int) -> dict[tuple[int, int], int]:
    off, acc = {}, 0
    for p, q in tensor_summands(a, b, n):
        off[(p, q)] = acc
        acc += a.rank(p) * b.rank(q)
    return off


@lru_cache(maxsize=4096)
def cx_tensor(a: Complex, b: Complex) -> Complex:
    if a.ring != b.ring:
        raise ValueError("ring mismatch")
    ring = a.ring
    degrees = sorted({p + q for p, _ in a.ranks for q, _ in b.ranks})
    ranks = {
        n: sum(a.rank(p) * b.rank(q) for p, q in tensor_summands(a, b, n)) for n in degrees
    }
    diff: dict[int, Matrix] = {}
    for n in degrees:
        if ranks.get(n + 1, 0) == 0:
            continue
        src_off = tensor_offsets(a, b, n)
        tgt_off = tensor_offsets(a, b, n + 1)
        grid = [[0] * ranks[n] for _ in range(ranks[n + 1])]
        for (p, q), co in src_off.items():
            if a.rank(p + 1):
                _add_block(grid, tgt_off[(p + 1, q)], co, mat_kron(a.d(p), mat_identity(ring, b.rank(q))))
            if b.rank(q + 1):
                blk = mat_kron(mat_identity(ring, a.rank(p)), b.d(q))
                if p % 2:
                    blk = mat_neg(blk)
                _add_block(grid, tgt_off[(p, q + 1)], co, blk)
        diff[n] = mat(ring, grid, cols=ranks[n])
    return make_complex(ring, ranks, diff)


def _add_block(grid: list[list[int]], r0: int, c0: int, m: Matrix) -> None:
    for i, row in enumerate(m.entries):
        for j, x in enumerate(row):
            grid[r0 + i][c0 + j] = x


@lru_cache(maxsize=4096)
def cx_dual(a: Complex) -> Complex:
    """Dual complex: rank(n) = rank(-n), differential the plain transpose.

    With the signed evaluation below this is an involution on the nose.
    """
    ranks = {-n: r for n, r in a.ranks}
    diff = {}
    for n in list(ranks):
        if ranks.get(n + 1, 0) and ranks[n]:
            diff[n] = mat_transpose(a.d(-n - 1))
    return make_complex(a.ring, ranks, diff)


def cx_direct_sum(parts: Sequence[Complex], ring: Ring) -> Complex:
    for p in parts:
        if p.ring != ring:
            raise ValueError("ring mismatch")
    degrees = sorted({n for p in parts for n, _ in p.ranks})
    ranks = {n: sum(p.rank(n) for p in parts) for n in degrees}
    diff = {}
    for n in degrees:
        if ranks.get(n + 1, 0) == 0:
            continue
        blocks = {
            (i, i): parts[i].d(n)
            for i in range(len(parts))
            if parts[i].rank(n) and parts[i].rank(n + 1)
        }
        diff[n] = mat_block(
            ring, [p.rank(n + 1) for p in parts], [p.rank(n) for p in parts], blocks
        )
    return make_complex(ring, ranks, diff)


# ---------------------------------------------------------------------------
# chain maps


@dataclass(frozen=True)
class ChainMap:
    """Degree-zero map of complexes commuting with the differentials."""

    source: Complex
    target: Complex
    components: tuple[tuple[int, Matrix], ...]

    def component(self, n: int) -> Matrix:
        for d, m in self.components:
            if d == n:
                return m
        return mat_zero(self.source.ring, self.target.rank(n), self.source.rank(n))


def make_chain_map(
    source: Complex,
    target: Complex,
    components: Mapping[int, Matrix | Sequence[Sequence[int]]] | None = None,
    check: bool = True,
) -> ChainMap:
    if source.ring != target.ring:
        raise ValueError("ring mismatch")
    ring = source.ring
    components = components or {}
    stored = []
    for n, rs in source.ranks:
        rt = target.rank(n)
        if rt == 0:
            continue
        m = components.get(n)
        if m is None:
            m = mat_zero(ring, rt, rs)
        elif not isinstance(m, Matrix):
            m = mat(ring, m, cols=rs)
        if (m.rows, m.cols) != (rt, rs):
            raise ValueError(f"component at degree {n} has shape {m.rows}x{m.cols}, expected {rt}x{rs}")
        stored.append((n, m))
    f = ChainMap(source, target, tuple(stored))
    if check:
        for n, _ in source.ranks:
            if target.rank(n + 1) == 0:
                continue
            lhs = mat_mul(target.d(n), f.component(n))
            rhs = mat_mul(f.component(n + 1), source.d(n))
            if lhs != rhs:
                raise ValueError(f"not a chain map at degree {n}")
    return f


def map_identity(c: Complex) -> ChainMap:
    return make_chain_map(c, c, {n: mat_identity(c.ring, r) for n, r in c.ranks}, check=False)


def map_zero(source: Complex, target: Complex) -> ChainMap:
    return make_chain_map(source, target, {}, check=False)


def map_compose(g: ChainMap, f: ChainMap) -> ChainMap:
    """g after f."""
    if f.target != g.source:
        raise ValueError("composition boundary mismatch")
    comps = {
        n: mat_mul(g.component(n), f.component(n))
        for n, _ in f.source.ranks
        if g.target.rank(n)
    }
    return make_chain_map(f.source, g.target, comps, check=False)


def map_add(f: ChainMap, g: ChainMap) -> ChainMap:
    if f.source != g.source or f.target != g.target:
        raise ValueError("sum of maps with different endpoints")
    comps = {n: mat_add(m, g.component(n)) for n, m in f.components}
    return make_chain_map(f.source, f.target, comps, check=False)


def map_sum(maps: Sequence[ChainMap], source: Complex, target: Complex) -> ChainMap:
    out = map_zero(source, target)
    for m in maps:
        out = map_add(out, m)
    return out


def map_scale(c: int, f: ChainMap) -> ChainMap:
    comps = {n: mat_scale(c, m) for n, m in f.components}
    return make_chain_map(f.source, f.target, comps, check=False)


def alt_trace(e: ChainMap) -> int:
    """Alternating sum of the degreewise matrix traces of an endomorphism."""
    if e.source != e.target:
        raise ValueError("endomorphism required")
    ring = e.source.ring
    total = 0
    for n, _ in e.source.ranks:
        t = mat_trace(e.component(n))
        total += t if n % 2 == 0 else -t
    return ring.norm(total)


def map_tensor(f: ChainMap, g: ChainMap) -> ChainMap:
    """Tensor of degree-zero chain maps; no Koszul signs arise."""
    src = cx_tensor(f.source, g.source)
    tgt = cx_tensor(f.target, g.target)
    ring = src.ring
    comps = {}
    for n, rs in src.ranks:
        if tgt.rank(n) == 0:
            continue
        tgt_off = tensor_offsets(f.target, g.target, n)
        grid = [[0] * rs for _ in range(tgt.rank(n))]
        for (p, q), co in tensor_offsets(f.source, g.source, n).items():
            if f.target.rank(p) and g.target.rank(q):
                _add_block(grid, tgt_off[(p, q)], co, mat_kron(f.component(p), g.component(q)))
        comps[n] = mat(ring, grid, cols=rs)
    return make_chain_map(src, tgt, comps, check=False)


def map_direct_sum(
    blocks: Mapping[tuple[int, int], ChainMap],
    sources: Sequence[Complex],
    targets: Sequence[Complex],
    ring: Ring,
) -> ChainMap:
    """Map between direct sums assembled from blocks (ti, si) -> ChainMap."""
    src = cx_direct_sum(sources, ring)
    tgt = cx_direct_sum(targets, ring)
    comps = {}
    for n, rs in src.ranks:
        if tgt.rank(n) == 0:
            continue
        mats = {
            (ti, si): f.component(n)
            for (ti, si), f in blocks.items()
            if targets[ti].rank(n) and sources[si].rank(n)
        }
        comps[n] = mat_block(ring, [t.rank(n) for t in targets], [s.rank(n) for s in sources], mats)
    return make_chain_map(src, tgt, comps, check=False)


def inclusion_map(parts: Sequence[Complex], i: int, ring: Ring) -> ChainMap:
    return map_direct_sum({(i, 0): map_identity(parts[i])}, [parts[i]], parts, ring)


def projection_map(parts: Sequence[Complex], i: int, ring: Ring) -> ChainMap:
    return map_direct_sum({(0, i): map_identity(parts[i])}, parts, [parts[i]], ring)


# ---------------------------------------------------------------------------
# homotopies


@dataclass(frozen=True)
class Homotopy:
    """Degree -1 grid of matrices between two complexes; no constraints."""

    source: Complex
    target: Complex
    components: tuple[tuple[int, Matrix], ...]

    def component(self, n: int) -> Matrix:
        for d, m in self.components:
            if d == n:
                return m
        return mat_zero(self.source.ring, self.target.rank(n - 1), self.source.rank(n))


def make_homotopy(
    source: Complex, target: Complex, components: Mapping[int, Matrix | Sequence[Sequence[int]]]
) -> Homotopy:
    stored = []
    for n, m in components.items():
        rt, rs = target.rank(n - 1), source.rank(n)
        if not isinstance(m, Matrix):
            m = mat(source.ring, m, cols=rs)
        if (m.rows, m.cols) != (rt, rs):
            raise ValueError(f"homotopy component at degree {n} has shape {m.rows}x{m.cols}, expected {rt}x{rs}")
        if rt and rs:
            stored.append((n, m))
    return Homotopy(source, target, tuple(sorted(stored)))


def homotopy_perturb(e: ChainMap, h: Homotopy) -> ChainMap:
    """e + d.h + h.d; alternating trace is unchanged."""
    if h.source != e.source or h.target != e.target:
        raise ValueError("homotopy shape mismatch")
    comps = {}
    for n, m in e.components:
        dh = mat_mul(e.target.d(n - 1), h.component(n))
        hd = mat_mul(h.component(n + 1), e.source.d(n))
        comps[n] = mat_add(m, mat_add(dh, hd))
    return make_chain_map(e.source, e.target, comps)


# ---------------------------------------------------------------------------
# duality structure maps

# Sign placed on the evaluation pairing in dual degree p.  Together with the
# plain-transpose dual differential these satisfy: chain-map property of
# ev/coev, strict triangle identities, trace = alternating trace, and
# strict involutivity of the dual.


def pair_sign(p: int) -> int:
    return -1 if (p * (p + 1) // 2) % 2 else 1


@lru_cache(maxsize=4096)
def ev_map(c: Complex) -> ChainMap:
    """Evaluation dual(c) (x) c -> unit, phi (x) x -> sign * phi(x)."""
    dual = cx_dual(c)
    src = cx_tensor(dual, c)
    tgt = unit_complex(c.ring)
    comps = {}
    if src.rank(0):
        row = [0] * src.rank(0)
        for (p, q), off in tensor_offsets(dual, c, 0).items():
            r = c.rank(q)
            s = pair_sign(p)
            for i in range(r):
                row[off + i * r + i] = s
        comps[0] = mat(c.ring, [row], cols=src.rank(0))
    return make_chain_map(src, tgt, comps)


@lru_cache(maxsize=4096)
def coev_map(c: Complex) -> ChainMap:
    """Coevaluation unit -> c (x) dual(c), 1 -> sum of sign * e_i (x) e_i*."""
    dual = cx_dual(c)
    tgt = cx_tensor(c, dual)
    src = unit_complex(c.ring)
    comps = {}
    if tgt.rank(0):
        col = [[0] for _ in range(tgt.rank(0))]
        for (n, q), off in tensor_offsets(c, dual, 0).items():
            r = c.rank(n)
            s = pair_sign(-n)
            for i in range(r):
                col[off + i * r + i][0] = s
        comps[0] = mat(c.ring, col, cols=1)
    return make_chain_map(src, tgt, comps)


@lru_cache(maxsize=4096)
def swap_map(a: Complex, b: Complex) -> ChainMap:
    """Symmetry a (x) b -> b (x) a with Koszul sign (-1)^(pq)."""
    src = cx_tensor(a, b)
    tgt = cx_tensor(b, a)
    ring = src.ring
    comps = {}
    for n, rs in src.ranks:
        tgt_off = tensor_offsets(b, a, n)
        grid = [[0] * rs for _ in range(tgt.rank(n))]
        for (p, q), off in tensor_offsets(a, b, n).items():
            ra, rb = a.rank(p), b.rank(q)
            to = tgt_off[(q, p)]
            sign = -1 if (p * q) % 2 else 1
            for i in range(ra):
                for j in range(rb):
                    grid[to + j * ra + i][off + i * rb + j] = sign
        comps[n] = mat(ring, grid, cols=rs)
    return make_chain_map(src, tgt, comps, check=False)


@lru_cache(maxsize=4096)
def assoc_map(a: Complex, b: Complex, c: Complex) -> ChainMap:
    """Reassociation a (x) (b (x) c) -> (a (x) b) (x) c; a sign-free permutation."""
    bc = cx_tensor(b, c)
    ab = cx_tensor(a, b)
    src = cx_tensor(a, bc)
    tgt = cx_tensor(ab, c)
    ring = src.ring
    comps = {}
    for n, rs in src.ranks:
        grid = [[0] * rs for _ in range(tgt.rank(n))]
        src_off = tensor_offsets(a, bc, n)
        tgt_off = tensor_offsets(ab, c, n)
        for p, _ in a.ranks:
            for q, _ in b.ranks:
                for r, _ in c.ranks:
                    if p + q + r != n:
                        continue
                    ra, rb, rc = a.rank(p), b.rank(q), c.rank(r)
                    so = src_off[(p, q + r)]
                    bco = tensor_offsets(b, c, q + r)[(q, r)]
                    to = tgt_off[(p + q, r)]
                    abo = tensor_offsets(a, b, p + q)[(p, q)]
                    for i in range(ra):
                        for j in range(rb):
                            for k in range(rc):
                                col = so + i * bc.rank(q + r) + bco + j * rc + k
                                row = to + (abo + i * rb + j) * rc + k
                                grid[row][col] = 1
        comps[n] = mat(ring, grid, cols=rs)
    return make_chain_map(src, tgt, comps, check=False)


def assoc_map_inv(a: Complex, b: Complex, c: Complex) -> ChainMap:
    f = assoc_map(a, b, c)
    comps = {n: mat_transpose(m) for n, m in f.components}
    return make_chain_map(f.target, f.source, comps, check=False)


def map_curry(f: ChainMap, z: Complex, c: Complex) -> ChainMap:
    """Curry f : z (x) c -> d into z -> dual(c) (x) d."""
    if f.source != cx_tensor(z, c):
        raise ValueError("curry source mismatch")
    d = f.target
    cd = cx_dual(c)
    step1 = map_tensor(map_identity(z), coev_map(c))
    step2 = assoc_map(z, c, cd)
    step3 = map_tensor(f, map_identity(cd))
    step4 = swap_map(d, cd)
    return map_compose(step4, map_compose(step3, map_compose(step2, step1)))


def map_uncurry(g: ChainMap, c: Complex, d: Complex) -> ChainMap:
    """Uncurry g : z -> dual(c) (x) d into z (x) c -> d, with d given."""
    cd = cx_dual(c)
    if g.target != cx_tensor(cd, d):
        raise ValueError("uncurry target mismatch")
    step1 = map_tensor(g, map_identity(c))
    step2 = assoc_map_inv(cd, d, c)
    step3 = map_tensor(map_identity(cd), swap_map(d, c))
    step4 = assoc_map(cd, c, d)
    step5 = map_tensor(ev_map(c), map_identity(d))
    return map_compose(step5, map_compose(step4, map_compose(step3, map_compose(step2, step1))))


def sum_tensor_distribute(parts: Sequence[Complex], m: Complex, ring: Ring) -> ChainMap:
    """Canonical permutation (sum parts) (x) m -> sum (part (x) m).

    This is the bookkeeping isomorphism distributing a direct sum through
    the tensor; it is a permutation of basis vectors, not the identity
    matrix, because the two sides group the basis differently.
    """
    src = cx_tensor(cx_direct_sum(parts, ring), m)
    tensored = [cx_tensor(p, m) for p in parts]
    tgt = cx_direct_sum(tensored, ring)
    total = cx_direct_sum(parts, ring)
    comps = {}
    for n, rs in src.ranks:
        grid = [[0] * rs for _ in range(tgt.rank(n))]
        src_off = tensor_offsets(total, m, n)
        tgt_part_off = _offsets([t.rank(n) for t in tensored])
        for (p, q), so in src_off.items():
            part_off = _offsets([pt.rank(p) for pt in parts])
            for pi, pt in enumerate(parts):
                rp = pt.rank(p)
                if rp == 0:
                    continue
                t_in = tensor_offsets(pt, m, n).get((p, q))
                if t_in is None:
                    continue
                for i in range(rp):
                    for j in range(m.rank(q)):
                        col = so + (part_off[pi] + i) * m.rank(q) + j
                        row = tgt_part_off[pi] + t_in + i * m.rank(q) + j
                        grid[row][col] = 1
        comps[n] = mat(ring, grid, cols=rs)
    return make_chain_map(src, tgt, comps)
