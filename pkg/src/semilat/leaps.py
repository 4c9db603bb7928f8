"""Gates, leaps and oscillation bounds on sublattices of products of chains.

A host K is a finite set of integer tuples closed under componentwise
min and max inside ``L_1 x ... x L_n`` with ``L_i = {0, ..., k_i - 1}``.
Functions on K take exact rational values.

Prime filters of a chain are the up-sets ``[c, ->)`` above its minimum
and lift to K as ``{x in K : x_i >= c}``.  Different cuts c may lift to
the same subset of K; leap bookkeeping identifies a lift with the least
attained coordinate value ``c`` that produces it.

``f`` *leaps* at a pair of cuts ``c_p <= c_q`` on coordinate i when some
gate ``(a, b)`` between the ideal ``K \\ p~`` and the filter ``q~``
satisfies ``|f(a) - f(b)| > eps``; it *jumps* when ``c_p == c_q``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product as iproduct
from typing import Iterable, Sequence

from .errors import (
    BoundViolation,
    CoverViolation,
    DegenerateFilterPair,
    EmptySet,
    FamilyViolation,
    JumpChainInfeasible,
    LawViolation,
    NoGatePoint,
    NoLeapFound,
    NonConvergence,
    NotDisjoint,
    NotJoinClosed,
    NotMeetClosed,
    PreconditionError,
    UnknownElement,
)
from .order import (
    ConvexSet,
    FiniteDistributiveLattice,
    FilterObject,
    bits,
    chain,
    convex_set,
    validate_lattice,
)

Point = tuple


# ---------------------------------------------------------------------------
# hosts

class ChainProductSublattice:
    """Certified sublattice of a finite product of chains.

    ``points`` are sorted lexicographically; that order is the canonical
    element index used for masks and tie-breaking.
    """

    def __init__(self, chains: Sequence[int], points: Sequence[Point]):
        self.chains = tuple(chains)
        self.points = tuple(points)
        self.dims = len(self.chains)
        self.index = {p: i for i, p in enumerate(self.points)}
        self.n = len(self.points)
        self.full = (1 << self.n) - 1

    def __repr__(self):
        return f"ChainProductSublattice({self.chains}, {len(self.points)} points)"

    def __len__(self):
        return self.n

    def idx(self, x) -> int:
        try:
            return self.index[tuple(x)]
        except (KeyError, TypeError):
            raise UnknownElement("not a member", (x,)) from None

    @cached_property
    def lattice(self) -> FiniteDistributiveLattice:
        """The host as an index-based lattice (labels are the points)."""
        pts, pos = self.points, self.index
        meet = [[pos[tuple(map(min, a, b))] for b in pts] for a in pts]
        join = [[pos[tuple(map(max, a, b))] for b in pts] for a in pts]
        return FiniteDistributiveLattice(pts, meet, 0, join, self.n - 1)

    def certify(self) -> FiniteDistributiveLattice:
        """Exhaustive lattice-axiom and distributivity check."""
        return validate_lattice(self.lattice.base)

    def pi(self, i: int, x: int) -> int:
        return self.points[x][i]

    def rho(self, i: int, x: int) -> tuple:
        p = self.points[x]
        return p[:i] + p[i + 1:]

    @cached_property
    def values(self) -> tuple[tuple[int, ...], ...]:
        """Attained coordinate values, sorted, per coordinate."""
        return tuple(tuple(sorted({p[i] for p in self.points})) for i in range(self.dims))

    @cached_property
    def coord_masks(self) -> tuple[dict, ...]:
        out = []
        for i in range(self.dims):
            d: dict[int, int] = {}
            for x, p in enumerate(self.points):
                d[p[i]] = d.get(p[i], 0) | (1 << x)
            out.append(d)
        return tuple(out)

    def ge_mask(self, i: int, c: int) -> int:
        m = 0
        for v, vm in self.coord_masks[i].items():
            if v >= c:
                m |= vm
        return m

    def box_mask(self, lo: Sequence[int], hi: Sequence[int]) -> int:
        m = self.full
        for i in range(self.dims):
            mi = 0
            for v, vm in self.coord_masks[i].items():
                if lo[i] <= v <= hi[i]:
                    mi |= vm
            m &= mi
        return m

    def point_labels(self, mask: int) -> list[Point]:
        return [self.points[x] for x in bits(mask)]


def validate_sublattice(chains: Sequence[int], members: Iterable[Sequence[int]]) -> ChainProductSublattice:
    """Certify that ``members`` is closed under componentwise meet and join."""
    chains = tuple(int(k) for k in chains)
    pts = []
    seen = set()
    for m in members:
        p = tuple(int(v) for v in m)
        if len(p) != len(chains):
            raise PreconditionError("member has wrong dimension", (p,))
        for v, k in zip(p, chains):
            if not 0 <= v < k:
                raise PreconditionError("coordinate outside its chain", (p,))
        if p in seen:
            raise PreconditionError("duplicate member", (p,))
        seen.add(p)
        pts.append(p)
    if not pts:
        raise PreconditionError("members must be nonempty")
    pts.sort()
    for k, a in enumerate(pts):
        for b in pts[k + 1:]:
            if tuple(map(min, a, b)) not in seen:
                raise NotMeetClosed("meet missing", (a, b))
            if tuple(map(max, a, b)) not in seen:
                raise NotJoinClosed("join missing", (a, b))
    return ChainProductSublattice(chains, pts)


def full_grid(*arities: int) -> ChainProductSublattice:
    return ChainProductSublattice(arities, sorted(iproduct(*[range(k) for k in arities])))


def _close(points: set, dims: int) -> set:
    pts = set(points)
    frontier = list(pts)
    while frontier:
        new = []
        for a in frontier:
            for b in list(pts):
                for c in (tuple(map(min, a, b)), tuple(map(max, a, b))):
                    if c not in pts:
                        pts.add(c)
                        new.append(c)
        frontier = new
    return pts


def random_sublattice(seed: int, chains: Sequence[int], generators: int | None = None) -> ChainProductSublattice:
    """Sublattice generated by a few seeded random points of the product."""
    rng = random.Random(seed)
    k = generators if generators is not None else rng.randint(1, 5)
    gens = {tuple(rng.randrange(c) for c in chains) for _ in range(k)}
    return validate_sublattice(chains, _close(gens, len(chains)))


def all_sublattices(chains: Sequence[int]) -> list[ChainProductSublattice]:
    """Every nonempty sublattice of the full product (small products only)."""
    grid = sorted(iproduct(*[range(k) for k in chains]))
    out = []
    for code in range(1, 1 << len(grid)):
        pts = [grid[i] for i in range(len(grid)) if (code >> i) & 1]
        s = set(pts)
        if all(tuple(map(min, a, b)) in s and tuple(map(max, a, b)) in s
               for a in pts for b in pts):
            out.append(ChainProductSublattice(chains, pts))
    return out


# ---------------------------------------------------------------------------
# functions

@dataclass(frozen=True)
class RealFunction:
    host: ChainProductSublattice
    values: tuple[Fraction, ...]

    def __call__(self, x) -> Fraction:
        return self.values[self.host.idx(x)]

    def value(self, x: int) -> Fraction:
        return self.values[x]


def real_function(K: ChainProductSublattice, values) -> RealFunction:
    """From a ``point -> value`` mapping, a callable on points, or a sequence
    in canonical point order."""
    if callable(values):
        vals = [values(p) for p in K.points]
    elif isinstance(values, dict):
        missing = [p for p in K.points if p not in values]
        if missing:
            raise UnknownElement("function is not total", (missing[0],))
        vals = [values[p] for p in K.points]
    else:
        vals = list(values)
        if len(vals) != K.n:
            raise PreconditionError("wrong number of values")
    return RealFunction(K, tuple(Fraction(v) for v in vals))


def random_real_function(seed: int, K: ChainProductSublattice, high: int = 10) -> RealFunction:
    """Seeded rational function with values in ``[0, high]``.

    Mixes four shapes (uniform noise, a coordinate ramp with noise, a
    step function, sparse spikes on a constant) so the sweep sees both
    jumpy and smooth functions.
    """
    rng = random.Random(seed)
    den = rng.choice([1, 2, 3, 4, 8])
    style = rng.randrange(4)
    vals = []
    if style == 0:
        vals = [Fraction(rng.randint(0, high * den), den) for _ in K.points]
    elif style == 1:
        w = [rng.randint(0, 4) for _ in range(K.dims)]
        top = sum(wi * (k - 1) for wi, k in zip(w, K.chains)) or 1
        for p in K.points:
            base = Fraction(high * sum(wi * v for wi, v in zip(w, p)), top)
            noise = Fraction(rng.randint(-den, den), 4 * den)
            vals.append(min(Fraction(high), max(Fraction(0), base + noise)))
    elif style == 2:
        i = rng.randrange(K.dims)
        cut = rng.randrange(K.chains[i])
        lo = Fraction(rng.randint(0, high * den), den)
        hi = Fraction(rng.randint(0, high * den), den)
        vals = [hi if p[i] >= cut else lo for p in K.points]
    else:
        base = Fraction(rng.randint(0, high * den), den)
        vals = [base] * K.n
        for _ in range(rng.randint(1, 3)):
            vals[rng.randrange(K.n)] = Fraction(rng.randint(0, high * den), den)
    return RealFunction(K, tuple(vals))


# ---------------------------------------------------------------------------
# convex sets and gates

def _lat(K) -> FiniteDistributiveLattice:
    return K.lattice if isinstance(K, ChainProductSublattice) else K


def _as_mask(K, C) -> int:
    if isinstance(C, (ConvexSet, FilterObject)):
        return C.members
    if isinstance(C, int):
        return C
    L = _lat(K)
    return L.mask_of(tuple(x) if isinstance(x, list) else x for x in C)


def interval(K, a, b) -> ConvexSet:
    """``[a, b] = {x in K : a ^ b <= x <= a v b}`` with its witness."""
    L = _lat(K)
    ai, bi = L.idx(tuple(a) if isinstance(a, list) else a), L.idx(tuple(b) if isinstance(b, list) else b)
    lo, hi = L.meet(ai, bi), L.join(ai, bi)
    return ConvexSet(L, L.up[lo] & L.down[hi], L.down[hi], L.up[lo])


def _project_search(L: FiniteDistributiveLattice, x: int, C: int) -> int:
    m = C
    for y in bits(C):
        m &= L.interval_mask(x, y)
        if not m:
            break
    if m.bit_count() != 1:
        raise NoGatePoint("no unique gate point", (L.labels[x],))
    return m.bit_length() - 1


def _project_closed(L: FiniteDistributiveLattice, x: int, lo: int, hi: int) -> int:
    return L.meet(L.join(x, lo), hi)


def gate_projection(K, x, C) -> Point:
    """The unique c in C lying in ``[x, y]`` for every y in C (exhaustive
    search; uniqueness asserted)."""
    L = _lat(K)
    Cm = _as_mask(K, C)
    if not Cm:
        raise EmptySet("convex set is empty")
    return L.labels[_project_search(L, L.idx(x), Cm)]


def projection_closed_form(K, x, a, b) -> Point:
    """``(x v (a ^ b)) ^ (a v b)``, the gate point of x in ``[a, b]``."""
    L = _lat(K)
    xi, ai, bi = L.idx(x), L.idx(a), L.idx(b)
    return L.labels[_project_closed(L, xi, L.meet(ai, bi), L.join(ai, bi))]


@dataclass(frozen=True)
class Gate:
    host: FiniteDistributiveLattice
    a: int
    b: int
    A: int
    B: int

    @property
    def pair(self) -> tuple:
        return (self.host.labels[self.a], self.host.labels[self.b])

    def __repr__(self):
        a, b = self.pair
        return f"Gate({a}, {b})"


def gate_violations(g: Gate) -> list[str]:
    """Names of the gate invariants that ``g`` breaks (empty when valid)."""
    L, a, b, A, B = g.host, g.a, g.b, g.A, g.B
    bad = []
    if not (A >> a) & 1:
        bad.append("a in A")
    if not (B >> b) & 1:
        bad.append("b in B")
    ab = L.interval_mask(a, b)
    if A & ab != 1 << a:
        bad.append("A & [a,b] = {a}")
    if B & ab != 1 << b:
        bad.append("B & [a,b] = {b}")
    if any(not (L.interval_mask(x, b) >> a) & 1 for x in bits(A)):
        bad.append("a in [x,b] for x in A")
    if any(not (L.interval_mask(a, y) >> b) & 1 for y in bits(B)):
        bad.append("b in [a,y] for y in B")
    return bad


def _convex_bounds(L, M):
    cs = convex_set(L, M)
    return cs.bottom, cs.top


def gate_pair(K, A, B) -> Gate:
    """Gate between disjoint nonempty convex sets, seeded at ``inf(A)`` and
    alternating projections until the pair is stable."""
    L = _lat(K)
    Am, Bm = _as_mask(K, A), _as_mask(K, B)
    if not Am or not Bm:
        raise EmptySet("gate needs nonempty sets")
    if Am & Bm:
        raise NotDisjoint("sets intersect", tuple(L.sorted_labels(Am & Bm)[:1]))
    convex_set(L, Am)
    convex_set(L, Bm)
    a = L.meet_all(Am)
    b = None
    for _ in range(Am.bit_count() + Bm.bit_count() + 1):
        nb = _project_search(L, a, Bm)
        na = _project_search(L, nb, Am)
        if na == a and nb == b:
            g = Gate(L, a, b, Am, Bm)
            bad = gate_violations(g)
            if bad:
                raise LawViolation("gate invariant fails: " + bad[0], g.pair)
            return g
        a, b = na, nb
    raise NonConvergence("gate alternation did not stabilise")


def all_gates(K, A, B, search: bool = False) -> list[Gate]:
    """Every gate between disjoint convex A and B: the inf(A)-seeded one
    first, then the rest in canonical (a, b) order."""
    L = _lat(K)
    Am, Bm = _as_mask(K, A), _as_mask(K, B)
    if search:
        proj_a = lambda x: _project_search(L, x, Am)  # noqa: E731
        proj_b = lambda x: _project_search(L, x, Bm)  # noqa: E731
    else:
        alo, ahi = L.meet_all(Am), L.join_all(Am)
        blo, bhi = L.meet_all(Bm), L.join_all(Bm)
        proj_a = lambda x: _project_closed(L, x, alo, ahi)  # noqa: E731
        proj_b = lambda x: _project_closed(L, x, blo, bhi)  # noqa: E731
    pairs = []
    seen = set()
    first = None
    for a0 in bits(Am):
        b = proj_b(a0)
        a = proj_a(b)
        if proj_b(a) != b:
            raise NonConvergence("projections are not mutual", (L.labels[a], L.labels[b]))
        if first is None:
            first = (a, b)
        if (a, b) not in seen:
            seen.add((a, b))
            pairs.append((a, b))
    rest = sorted(p for p in pairs if p != first)
    return [Gate(L, a, b, Am, Bm) for a, b in [first] + rest]


@dataclass
class AllIntersect:
    point: Point


def helly_witness(K, family: Sequence) -> tuple | AllIntersect:
    """Two disjoint members of ``family`` when its intersection is empty,
    else :class:`AllIntersect` with the least common point."""
    L = _lat(K)
    masks = [_as_mask(K, C) for C in family]
    if not masks:
        raise PreconditionError("family must be nonempty")
    common = L.full
    for m in masks:
        if not m:
            raise PreconditionError("family members must be nonempty")
        convex_set(L, m)
        common &= m
    if common:
        return AllIntersect(L.labels[(common & -common).bit_length() - 1])
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            if not masks[i] & masks[j]:
                return (family[i], family[j])
    raise FamilyViolation("empty intersection without a disjoint pair")


# ---------------------------------------------------------------------------
# prime filters and lifts

def prime_filters_of_chain(k: int) -> list[FilterObject]:
    """``[c, ->)`` for ``c = 1..k-1``: the prime filters of a k-chain."""
    C = chain(k)
    return [FilterObject(C, C.up[c], c, True) for c in range(1, k)]


@dataclass(frozen=True, repr=False)
class LiftedFilter(FilterObject):
    coordinate: int = 0
    cut: int = 0
    degenerate: bool = False


def _cut(p) -> int:
    if isinstance(p, FilterObject):
        if p.vertex is None:
            raise PreconditionError("not a principal filter of a chain")
        return p.host.labels[p.vertex]
    return int(p)


def lift_prime(K: ChainProductSublattice, i: int, p) -> LiftedFilter:
    """``p~ = {x in K : x_i in p}``; empty or full lifts are flagged."""
    if not 0 <= i < K.dims:
        raise PreconditionError("no such coordinate", (i,))
    c = _cut(p)
    m = K.ge_mask(i, c)
    degenerate = m == 0 or m == K.full
    L = K.lattice
    vertex = L.meet_all(m) if m else None
    return LiftedFilter(L, m, vertex, None if degenerate else True, i, c, degenerate)


def canonical_cuts(K: ChainProductSublattice, i: int) -> tuple[int, ...]:
    """Cuts with distinct proper nonempty lifts (attained values above the minimum)."""
    return K.values[i][1:]


def _gates_for(K: ChainProductSublattice, i: int, cp: int, cq: int) -> list[Gate]:
    cache = K.__dict__.setdefault("_gate_cache", {})
    key = (i, cp, cq)
    if key not in cache:
        ideal = K.full & ~K.ge_mask(i, cp)
        filt = K.ge_mask(i, cq)
        cache[key] = all_gates(K, ideal, filt)
    return cache[key]


def _canonical_pair(K, i, p, q) -> tuple[int, int]:
    cp, cq = _cut(p), _cut(q)
    mp, mq = K.ge_mask(i, cp), K.ge_mask(i, cq)
    if mp in (0, K.full) or mq in (0, K.full):
        raise DegenerateFilterPair("lifts must be proper and nonempty", (cp, cq))
    if mq & ~mp:
        raise DegenerateFilterPair("p~ must contain q~", (cp, cq))
    vals = K.values[i]
    # least attained value in each lift
    return (min(v for v in vals if v >= cp), min(v for v in vals if v >= cq))


def leap_at(f: RealFunction, eps, i: int, p, q) -> Gate | None:
    """First gate (inf-seeded one first) between ``K \\ p~`` and ``q~``
    with ``|f(a) - f(b)| > eps``, or None."""
    K = f.host
    eps = Fraction(eps)
    cp, cq = _canonical_pair(K, i, p, q)
    for g in _gates_for(K, i, cp, cq):
        if abs(f.values[g.a] - f.values[g.b]) > eps:
            return g
    return None


# ---------------------------------------------------------------------------
# maximal leap chains

@dataclass
class LeapWitness:
    coordinate: int
    p_cut: int
    q_cut: int
    gate: Gate

    @property
    def is_jump(self) -> bool:
        return self.p_cut == self.q_cut


@dataclass
class CoordinateLeaps:
    coordinate: int
    m: int
    chain: list[LeapWitness]
    jump_cuts: list[int]
    leap_pairs: list[tuple[int, int]]


def _longest_chain_through(nodes, succ, mandatory):
    """Longest path in a DAG visiting every mandatory node.

    ``nodes`` is in a topological order that is also the tie-break order;
    ``succ(u, v)`` tells whether v may follow u.  Returns the
    lexicographically first longest admissible path, or None.
    """
    M = len(mandatory)
    NEG = -1
    N = len(nodes)
    best = [[NEG] * (M + 1) for _ in range(N)]
    for u in range(N - 1, -1, -1):
        mu = 1 if nodes[u] in mandatory else 0
        row = best[u]
        row[mu] = 1
        for w in range(u + 1, N):
            if not succ(nodes[u], nodes[w]):
                continue
            for k in range(mu, M + 1):
                sub = best[w][k - mu]
                if sub != NEG and sub + 1 > row[k]:
                    row[k] = sub + 1
    if N == 0:
        return [] if M == 0 else None
    top = max(best[u][M] for u in range(N))
    if top == NEG:
        return [] if M == 0 else None
    path = []
    k = M
    need = top
    prev = None
    for u in range(N):
        if best[u][k] == need and (prev is None or succ(nodes[prev], nodes[u])):
            path.append(nodes[u])
            k -= 1 if nodes[u] in mandatory else 0
            need -= 1
            prev = u
            if need == 0:
                break
    return path


def max_leap_count(f: RealFunction, eps, i: int) -> CoordinateLeaps:
    """m_i(f): the longest strictly nested chain of leap pairs on
    coordinate i that contains every jump cut as a ``(c, c)`` node."""
    K = f.host
    eps = Fraction(eps)
    cuts = canonical_cuts(K, i)
    witness = {}
    for s_pos, cp in enumerate(cuts):
        for cq in cuts[s_pos:]:
            for g in _gates_for(K, i, cp, cq):
                if abs(f.values[g.a] - f.values[g.b]) > eps:
                    witness[(cp, cq)] = g
                    break
    nodes = sorted(witness)
    jumps = [c for c in cuts if (c, c) in witness]
    mandatory = {(c, c) for c in jumps}
    path = _longest_chain_through(nodes, lambda u, v: u[1] < v[0], mandatory)
    if path is None:
        raise JumpChainInfeasible("jump cuts cannot be placed in one chain", tuple(jumps))
    chain_ = [LeapWitness(i, cp, cq, witness[(cp, cq)]) for cp, cq in path]
    return CoordinateLeaps(i, len(chain_), chain_, jumps, nodes)


def p_sequence(k: int) -> int:
    """``p(1) = 3``, ``p(k + 1) = 8 p(k) + 6``."""
    if k < 1:
        raise PreconditionError("k must be at least 1")
    v = 3
    for _ in range(k - 1):
        v = 8 * v + 6
    return v


@dataclass
class Cube:
    lo: tuple[int, ...]
    hi: tuple[int, ...]
    members: int


@dataclass
class LeapLedgerN:
    function: RealFunction
    epsilon: Fraction
    coordinates: list[CoordinateLeaps]
    cover: list[Cube]
    pn_table: list[int]

    @property
    def m(self) -> tuple[int, ...]:
        return tuple(c.m for c in self.coordinates)

    @property
    def witnesses(self) -> list[LeapWitness]:
        return [w for c in self.coordinates for w in c.chain]

    @property
    def bound(self) -> Fraction:
        return self.pn_table[-1] * self.epsilon


def _cover_from_chains(K: ChainProductSublattice, coords: list[CoordinateLeaps]) -> list[Cube]:
    blocks = []
    for i in range(K.dims):
        vals = K.values[i]
        starts = {vals[0]}
        for w in coords[i].chain:
            starts.add(w.p_cut)
            starts.add(w.q_cut)
        cur = []
        bl = []
        for v in vals:
            if v in starts and cur:
                bl.append((cur[0], cur[-1]))
                cur = []
            cur.append(v)
        bl.append((cur[0], cur[-1]))
        blocks.append(bl)
    cubes = []
    for combo in iproduct(*blocks):
        lo = tuple(b[0] for b in combo)
        hi = tuple(b[1] for b in combo)
        m = K.box_mask(lo, hi)
        if m:
            cubes.append(Cube(lo, hi, m))
    return cubes


def _check_cover(K, coords, cubes):
    union = 0
    for c in cubes:
        if union & c.members:
            raise CoverViolation("cubes overlap", (c.lo, c.hi))
        union |= c.members
    if union != K.full:
        raise CoverViolation("cubes do not cover K")
    for cl in coords:
        for w in cl.chain:
            ideal = K.full & ~K.ge_mask(cl.coordinate, w.p_cut)
            filt = K.ge_mask(cl.coordinate, w.q_cut)
            for c in cubes:
                for S in (ideal, filt):
                    inter = c.members & S
                    if inter and inter != c.members:
                        raise CoverViolation("cube straddles a chain set", (c.lo, c.hi))


def leap_ledger(f: RealFunction, eps) -> LeapLedgerN:
    eps = Fraction(eps)
    if eps <= 0:
        raise PreconditionError("epsilon must be positive")
    K = f.host
    coords = [max_leap_count(f, eps, i) for i in range(K.dims)]
    cubes = _cover_from_chains(K, coords)
    _check_cover(K, coords, cubes)
    return LeapLedgerN(f, eps, coords, cubes, [p_sequence(k) for k in range(1, K.dims + 1)])


def build_cover(f: RealFunction, eps) -> list[Cube]:
    """Coarsest grid of cubes ``prod [a_i, b_i] & K`` cut at the gate
    coordinates of the maximal chains."""
    return leap_ledger(f, eps).cover


def oscillation(f: RealFunction, C) -> Fraction:
    m = _as_mask(f.host, C)
    if not m:
        raise EmptySet("oscillation of the empty set")
    vals = [f.values[x] for x in bits(m)]
    return max(vals) - min(vals)


@dataclass
class CubeCheck:
    lo: tuple
    hi: tuple
    size: int
    oscillation: Fraction
    slack: Fraction


@dataclass
class OscReport:
    epsilon: Fraction
    dims: int
    bound: Fraction
    m: tuple
    cubes: list[CubeCheck]

    @property
    def ok(self) -> bool:
        return all(c.slack >= 0 for c in self.cubes)

    @property
    def violations(self) -> list[CubeCheck]:
        return [c for c in self.cubes if c.slack < 0]


def verify_osc_bound(f: RealFunction, eps, ledger: LeapLedgerN | None = None,
                     raise_on_failure: bool = False) -> OscReport:
    led = ledger if ledger is not None else leap_ledger(f, eps)
    bound = led.bound
    checks = []
    for c in led.cover:
        o = oscillation(f, c.members)
        checks.append(CubeCheck(c.lo, c.hi, c.members.bit_count(), o, bound - o))
    rep = OscReport(led.epsilon, f.host.dims, bound, led.m, checks)
    if raise_on_failure and not rep.ok:
        c = rep.violations[0]
        raise BoundViolation(f"oscillation {c.oscillation} exceeds {bound}", (c.lo, c.hi))
    return rep


@dataclass
class RefiningGrid:
    """Per-coordinate blocks ``(lo, hi)`` of attained values whose cells
    all have oscillation below eps."""

    blocks: list[list[tuple[int, int]]]
    cells: list[int]


def refining_grid(f: RealFunction, eps) -> RefiningGrid:
    """Greedy coarsening of the finest grid: adjacent blocks on a coordinate
    are merged whenever every resulting cell keeps oscillation < eps."""
    K = f.host
    eps = Fraction(eps)
    blocks = [[(v, v) for v in K.values[i]] for i in range(K.dims)]

    def cells(bl):
        out = []
        for combo in iproduct(*bl):
            m = K.box_mask([b[0] for b in combo], [b[1] for b in combo])
            if m:
                out.append(m)
        return out

    changed = True
    while changed:
        changed = False
        for i in range(K.dims):
            j = 0
            while j + 1 < len(blocks[i]):
                trial = [list(b) for b in blocks]
                trial[i][j:j + 2] = [(blocks[i][j][0], blocks[i][j + 1][1])]
                if all(oscillation(f, m) < eps for m in cells(trial)):
                    blocks = trial
                    changed = True
                else:
                    j += 1
    return RefiningGrid(blocks, cells(blocks))


def verify_jump_finiteness(f: RealFunction, eps) -> list[str]:
    """Check that jump counts are bounded by a refining grid.

    Every cell of the grid has oscillation < eps, no leap witness has both
    ends in one cell, and each coordinate carries at most as many jump
    cuts as the grid has cells.  Returns the failed checks.
    """
    K = f.host
    eps = Fraction(eps)
    grid = refining_grid(f, eps)
    bad = []
    if any(oscillation(f, m) >= eps for m in grid.cells):
        bad.append("cell oscillation")
    led = leap_ledger(f, eps)
    for cl in led.coordinates:
        for cp, cq in cl.leap_pairs:
            for g in _gates_for(K, cl.coordinate, cp, cq):
                if abs(f.values[g.a] - f.values[g.b]) > eps:
                    if any((m >> g.a) & 1 and (m >> g.b) & 1 for m in grid.cells):
                        bad.append(f"leap gate {g} inside one cell")
        if len(cl.jump_cuts) > len(grid.cells):
            bad.append(f"coordinate {cl.coordinate}: too many jumps")
    return bad


def range_gap_check(f: RealFunction, eps, a, b, cover: list[Cube] | None = None) -> bool:
    """No gap longer than eps between consecutive values of f on ``[a, b] & K``."""
    K = f.host
    L = K.lattice
    ai, bi = L.idx(a), L.idx(b)
    if cover is not None and not any((c.members >> ai) & 1 and (c.members >> bi) & 1 for c in cover):
        raise PreconditionError("a and b are not in a common cube", (a, b))
    return _gap_ok(f, Fraction(eps), L.interval_mask(ai, bi))


def _gap_ok(f, eps, mask) -> bool:
    vals = sorted({f.values[x] for x in bits(mask)})
    return all(y - x <= eps for x, y in zip(vals, vals[1:]))


def verify_interval_emptiness(K: ChainProductSublattice, i: int, a, b) -> bool:
    """If no x in ``[a, b]`` has ``a_i < x_i < b_i`` then no x in K does."""
    L = K.lattice
    ai, bi = L.idx(a), L.idx(b)
    return _emptiness_ok(K, i, ai, bi, L.interval_mask(ai, bi))


def _emptiness_ok(K, i, ai, bi, imask) -> bool:
    lo, hi = K.points[ai][i], K.points[bi][i]
    between = 0
    for v, vm in K.coord_masks[i].items():
        if lo < v < hi:
            between |= vm
    return bool(between & imask) or not between


@dataclass
class LawReport:
    coordinate: int
    p_cut: int
    q_cut: int
    gates: list[Gate]
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_gate_coordinate_laws(K: ChainProductSublattice, i: int, p, q,
                                allow_equal: bool = False, raise_on_failure: bool = False) -> LawReport:
    """Check every gate ``(a, b)`` between ``K \\ p~`` and ``q~``: the gate
    invariants, ``a_i < b_i``, that no c with ``a_i < c_i < b_i`` lies in
    either set, the two coordinate characterisations, and for every c in K
    and coordinate j: ``c_i >= b_i`` and ``a_j < b_j`` imply ``c_j >= b_j``.
    """
    cp, cq = _cut(p), _cut(q)
    mp, mq = K.ge_mask(i, cp), K.ge_mask(i, cq)
    if mp in (0, K.full) or mq in (0, K.full):
        raise DegenerateFilterPair("lifts must be proper and nonempty", (cp, cq))
    if mq & ~mp or (mp == mq and not allow_equal):
        raise PreconditionError("requires p~ to strictly contain q~", (cp, cq))
    ideal = K.full & ~mp
    gates = all_gates(K, ideal, mq, search=True)
    bad = []
    pts = K.points
    for g in gates:
        a, b = pts[g.a], pts[g.b]
        for v in gate_violations(g):
            bad.append(f"{g}: {v}")
        if not a[i] < b[i]:
            bad.append(f"{g}: pi_i(a) < pi_i(b)")
        for x in range(K.n):
            c = pts[x]
            if a[i] < c[i] < b[i] and ((mq >> x) & 1 or (ideal >> x) & 1):
                bad.append(f"{g}: {c} strictly between but in a gate set")
            if ((ideal >> x) & 1) != (c[i] <= a[i]):
                bad.append(f"{g}: ideal characterisation at {c}")
            if ((mq >> x) & 1) != (c[i] >= b[i]):
                bad.append(f"{g}: filter characterisation at {c}")
            if c[i] >= b[i]:
                for j in range(K.dims):
                    if a[j] < b[j] and c[j] < b[j]:
                        bad.append(f"{g}: coordinate law at {c}, j={j}")
    rep = LawReport(i, cp, cq, gates, bad)
    if bad and raise_on_failure:
        raise LawViolation(bad[0])
    return rep


def fiber_leap_extraction(f: RealFunction, eps, u, v, i: int) -> Gate:
    """A leap inside the chain ``{x : rho_i(x) = rho_i(u)} & [u, v]``.

    Pairs are scanned by span (adjacent pairs first), then by position;
    ``(u, v)`` itself always qualifies under the preconditions.  The
    returned gate is certified in K between ``{x_i <= a_i}`` and
    ``{x_i >= b_i}``.
    """
    K = f.host
    eps = Fraction(eps)
    L = K.lattice
    ui, vi = L.idx(u), L.idx(v)
    if K.rho(i, ui) != K.rho(i, vi) or not K.pi(i, ui) < K.pi(i, vi):
        raise PreconditionError("u, v must differ only in coordinate i with u_i < v_i")
    if not abs(f.values[ui] - f.values[vi]) > eps:
        raise PreconditionError("|f(u) - f(v)| must exceed eps")
    fiber = [x for x in bits(L.interval_mask(ui, vi)) if K.rho(i, x) == K.rho(i, ui)]
    fiber.sort(key=lambda x: K.pi(i, x))
    for span in range(1, len(fiber)):
        for s in range(len(fiber) - span):
            a, b = fiber[s], fiber[s + span]
            if abs(f.values[a] - f.values[b]) > eps:
                ideal = K.full & ~K.ge_mask(i, K.pi(i, a) + 1)
                filt = K.ge_mask(i, K.pi(i, b))
                g = Gate(L, a, b, ideal, filt)
                bad = gate_violations(g)
                if bad:
                    raise LawViolation("extracted pair is not a gate: " + bad[0], g.pair)
                return g
    raise NoLeapFound("no leap in the fiber")


# ---------------------------------------------------------------------------
# SLD partition audit

@dataclass
class SLDClass:
    key: tuple
    size: int
    neighborhood_checks: int
    max_local_radius: Fraction


@dataclass
class SLDReport:
    epsilon: Fraction
    bound: Fraction
    classes: list[SLDClass]
    checks: int
    violations: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def sld_partition(F: Sequence[RealFunction], eps) -> SLDReport:
    """Partition F by leap counts ``(m_1, ..., m_n)``; inside each class,
    every g that still leaps at all of f's witness gates must satisfy the
    oscillation bound on f's cubes.

    ``max_local_radius`` is the largest sup-distance from f to a member of
    its neighbourhood, the desk-scale stand-in for local diameter (the
    diameter is at most twice it).
    """
    eps = Fraction(eps)
    if not F:
        raise PreconditionError("no functions")
    K = F[0].host
    if any(g.host is not K for g in F):
        raise PreconditionError("functions must share one host")
    bound = p_sequence(K.dims) * eps
    ledgers = [leap_ledger(f, eps) for f in F]
    groups: dict[tuple, list[int]] = {}
    for k, led in enumerate(ledgers):
        groups.setdefault(led.m, []).append(k)
    classes = []
    checks = 0
    bad = []
    for key in sorted(groups):
        members = groups[key]
        nb_checks = 0
        radius = Fraction(0)
        for k in members:
            led = ledgers[k]
            wit = [(w.gate.a, w.gate.b) for w in led.witnesses]
            f = F[k]
            for j in members:
                g = F[j]
                if not all(abs(g.values[a] - g.values[b]) > eps for a, b in wit):
                    continue
                nb_checks += 1
                radius = max(radius, max(abs(x - y) for x, y in zip(f.values, g.values)))
                for c in led.cover:
                    checks += 1
                    if oscillation(g, c.members) > bound:
                        bad.append((key, k, j, c.lo, c.hi))
        classes.append(SLDClass(key, len(members), nb_checks, radius))
    return SLDReport(eps, bound, classes, checks, bad)
