"""Jumps, relative jumps and the level chain of a two-valued function.

For ``f : K -> {0, 1}`` the levels ``L_0(f) <= L_1(f) <= ...`` are
subsemilattices of the dual DK (positive elements plus INF, multiplied by
the supremum in K).  ``L_0`` is generated by the jump points of f and
``L_n`` by ``L_{n-1}`` together with every relative jump point over a
member of ``L_{n-1}``.  The level sizes form the signature ``s(f)``;
together with the values of f on the finite support ``M_f`` they pin f
down uniquely.

Conventions used throughout:

* a level is stored as a bitmask of positive elements; INF is always a
  member and is counted in the signature;
* INF in a level plays the role of 0 when used as the base of a relative
  jump (a relative jump over 0 is a jump), and contributes the point 0 of
  K to the support ``M_f``.
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .errors import (
    DiscretenessViolation,
    InfinityNotAllowed,
    MalformedTree,
    NonTermination,
    NotBelow,
    NotSubsemilattice,
    SizeOverflow,
    UnknownElement,
)
from .order import INF, FiniteSemilattice, bits, validate_semilattice

TREE_INFINITY = "inf"


# ---------------------------------------------------------------------------
# functions

@dataclass(frozen=True)
class BinaryFunction:
    """A total map ``host -> {0, 1}`` stored as the mask of its 1-set."""

    host: FiniteSemilattice
    ones: int

    def __call__(self, label: Hashable) -> int:
        return (self.ones >> self.host.idx(label)) & 1

    def value(self, x: int) -> int:
        return (self.ones >> x) & 1

    @property
    def is_constant(self) -> bool:
        return self.ones in (0, self.host.full)

    def as_dict(self) -> dict:
        return {lab: (self.ones >> i) & 1 for i, lab in enumerate(self.host.labels)}


def binary_function(K: FiniteSemilattice, values: Mapping[Hashable, int] | Iterable[Hashable]) -> BinaryFunction:
    """From a ``label -> 0/1`` mapping (must be total) or the iterable of
    labels where the function is 1."""
    if isinstance(values, Mapping):
        missing = set(K.labels) - set(values)
        if missing:
            raise UnknownElement("function is not total", tuple(sorted(map(str, missing)))[:1])
        ones = 0
        for lab, v in values.items():
            if v not in (0, 1):
                raise ValueError(f"value {v!r} at {lab!r} is not 0 or 1")
            if v:
                ones |= 1 << K.idx(lab)
        return BinaryFunction(K, ones)
    return BinaryFunction(K, K.mask_of(values))


# ---------------------------------------------------------------------------
# per-host tables

class _Calculus:
    """Precomputed masks for fast level computations on one host."""

    def __init__(self, K: FiniteSemilattice):
        self.K = K
        self.positives = [x for x in range(K.n) if x != K.zero]
        self.pos_mask = K.full & ~(1 << K.zero)
        self.preds = K.pred_masks
        self.sup = K.sup_table
        # rel[p] = [(q, p^- & [q, ->)) for q < p positive]
        self.rel = []
        for p in range(K.n):
            row = []
            for q in self.positives:
                if q != p and K.leq(q, p):
                    row.append((q, self.preds[p] & K.up[q]))
            self.rel.append(row)

    def closure(self, gens: int) -> int:
        """Subsemilattice of DK generated by ``gens`` (INF implicit)."""
        L = gens
        todo = list(bits(gens))
        sup = self.sup
        while todo:
            p = todo.pop()
            row = sup[p]
            for q in bits(L):
                s = row[q]
                if s is not None and not (L >> s) & 1:
                    L |= 1 << s
                    todo.append(s)
        return L

    @staticmethod
    def disagrees(f: int, p: int, S: int) -> bool:
        """f(x) != f(p) for every x in S."""
        if (f >> p) & 1:
            return not f & S
        return not S & ~f

    def levels(self, f: int) -> list[int]:
        """``[L_0, ..., L_n(f), L_n(f)+1]`` as masks; the last two are equal."""
        prev = 0
        out = []
        preds, rel, disagrees = self.preds, self.rel, self.disagrees
        for _ in range(len(self.positives) + 2):
            gens = prev
            for p in self.positives:
                if (prev >> p) & 1:
                    continue
                # INF in the previous level acts as 0: a plain jump
                if disagrees(f, p, preds[p]):
                    gens |= 1 << p
                    continue
                for q, S in rel[p]:
                    if (prev >> q) & 1 and disagrees(f, p, S):
                        gens |= 1 << p
                        break
            new = self.closure(gens) if gens != prev else prev
            out.append(new)
            if len(out) >= 2 and out[-1] == out[-2]:
                return out
            prev = new
        raise NonTermination("level chain did not stabilise", (f,))

    def support(self, L: int) -> int:
        m = L | (1 << self.K.zero)
        for p in bits(L):
            m |= self.preds[p]
        return m

    def literal_support(self, L: int) -> int:
        m = L
        for p in bits(L):
            m |= self.preds[p]
        return m

    def jump_mask(self, f: int) -> int:
        m = 0
        for p in self.positives:
            if self.disagrees(f, p, self.preds[p]):
                m |= 1 << p
        return m

    def fibers(self, L: int) -> dict[int, int]:
        """image mask -> fiber mask for ``x -> {p in L : p <= x}``."""
        out: dict[int, int] = defaultdict(int)
        down = self.K.down
        for x in range(self.K.n):
            out[L & down[x]] |= 1 << x
        return dict(out)


def _calc(K: FiniteSemilattice) -> _Calculus:
    c = K.__dict__.get("_sigma_calculus")
    if c is None:
        c = _Calculus(K)
        K.__dict__["_sigma_calculus"] = c
    return c


# ---------------------------------------------------------------------------
# modesty and trees

@dataclass
class ModestyReport:
    modest: bool
    predecessor_counts: dict
    max_predecessors: int


def is_modest(K: FiniteSemilattice) -> ModestyReport:
    """Every finite semilattice is modest; the report lists ``|p^-|``."""
    counts = {K.labels[x]: K.pred_masks[x].bit_count() for x in range(K.n)}
    return ModestyReport(True, counts, max(counts.values(), default=0))


def _tree_parents(T) -> dict:
    if isinstance(T, Mapping):
        return dict(T)
    return {i: p for i, p in enumerate(T)}


def tree_compactification(T) -> FiniteSemilattice:
    """``alpha T = T + {inf}`` with ``s ^ t = max(s, t)`` for comparable
    nodes (in tree order, root lowest) and ``inf`` otherwise.

    ``T`` maps each node to its parent (``None`` for the root); a sequence
    is read as ``parents[i]`` for node ``i``.  In the semilattice order the
    root is the maximum and ``inf`` the minimum.
    """
    parents = _tree_parents(T)
    if not parents:
        raise MalformedTree("empty tree")
    if TREE_INFINITY in parents:
        raise MalformedTree("node label is reserved", (TREE_INFINITY,))
    roots = [v for v, p in parents.items() if p is None]
    if len(roots) != 1:
        raise MalformedTree("tree must have exactly one root", tuple(map(str, roots)))
    ancestors = {}
    for v in parents:
        seen = [v]
        u = parents[v]
        while u is not None:
            if u not in parents:
                raise MalformedTree("parent is not a node", (u,))
            if u in seen:
                raise MalformedTree("cycle through node", (u,))
            seen.append(u)
            u = parents[u]
        ancestors[v] = set(seen)  # includes v itself
    nodes = list(parents)
    labels = [TREE_INFINITY] + nodes
    table = [[TREE_INFINITY] * len(labels)]
    for s in nodes:
        row = [TREE_INFINITY]
        for t in nodes:
            if s in ancestors[t]:
                row.append(t)  # s is an ancestor of t, the deeper node is t
            elif t in ancestors[s]:
                row.append(s)
            else:
                row.append(TREE_INFINITY)
        table.append(row)
    return validate_semilattice(labels, table, TREE_INFINITY)


def complete_binary_tree(depth: int) -> dict:
    """Parent map of the complete binary tree with ``2**(depth+1) - 1`` nodes,
    nodes labelled ``t1, t2, ...`` in breadth-first order."""
    total = 2 ** (depth + 1) - 1
    return {f"t{i}": (None if i == 1 else f"t{i // 2}") for i in range(1, total + 1)}


# ---------------------------------------------------------------------------
# jumps

def _check_positive(K: FiniteSemilattice, p: Hashable) -> int:
    if p is INF:
        raise InfinityNotAllowed("jumps are not defined at INF")
    pi = K.idx(p)
    if pi == K.zero:
        raise InfinityNotAllowed("0 is not an element of the dual", (p,))
    return pi


def has_jump(f: BinaryFunction, p: Hashable) -> bool:
    """f(p) differs from f on every immediate predecessor of p."""
    K = f.host
    pi = _check_positive(K, p)
    return _Calculus.disagrees(f.ones, pi, K.pred_masks[pi])


def has_relative_jump(f: BinaryFunction, p: Hashable, q: Hashable) -> bool:
    """Relative jump at p over q: ``q < p`` and f(x) != f(p) for every
    x in ``p^- & [q, ->)``.  With q the zero of K this is :func:`has_jump`."""
    K = f.host
    pi = _check_positive(K, p)
    qi = K.idx(q)
    if not K.lt(qi, pi):
        raise NotBelow("q is not strictly below p", (q, p))
    return _Calculus.disagrees(f.ones, pi, K.pred_masks[pi] & K.up[qi])


def jump_existence_check(f: BinaryFunction):
    """A minimal p with f(p) != f(0), certified to be a jump point, or
    None when f is constant."""
    K = f.host
    z = f.value(K.zero)
    diff = (K.full & ~f.ones) if z else f.ones
    if not diff:
        return None
    for p in bits(diff):
        if K.down[p] & diff == 1 << p:
            if not _Calculus.disagrees(f.ones, p, K.pred_masks[p]):
                raise DiscretenessViolation("minimal disagreement point is not a jump",
                                            (K.labels[p],))
            return K.labels[p]
    raise DiscretenessViolation("no minimal disagreement point")  # pragma: no cover


# ---------------------------------------------------------------------------
# ledger

@dataclass
class JumpLedger:
    """Level chain of one function.

    Masks are over host indices; INF is implicit in every level.  ``n``
    is the stabilisation index and ``levels`` has ``n + 1`` entries.
    """

    function: BinaryFunction
    jump_mask: int
    level_masks: list[int]
    n: int
    signature: tuple[int, ...]
    support_mask: int

    @property
    def host(self) -> FiniteSemilattice:
        return self.function.host

    @property
    def final_mask(self) -> int:
        return self.level_masks[-1]

    @property
    def jump_points(self) -> frozenset:
        return self.host.labels_of(self.jump_mask)

    @property
    def levels(self) -> list[frozenset]:
        return [self.host.labels_of(m) | {INF} for m in self.level_masks]

    @property
    def support(self) -> frozenset:
        return self.host.labels_of(self.support_mask)


def compute_ledger(f: BinaryFunction) -> JumpLedger:
    calc = _calc(f.host)
    lv = calc.levels(f.ones)[:-1]
    return JumpLedger(
        function=f,
        jump_mask=calc.jump_mask(f.ones),
        level_masks=lv,
        n=len(lv) - 1,
        signature=tuple(m.bit_count() + 1 for m in lv),
        support_mask=calc.support(lv[-1]),
    )


# ---------------------------------------------------------------------------
# quotients

@dataclass
class QuotientMap:
    """``x -> {p in L : p <= x}`` for a subsemilattice L of DK.

    ``assignment[x]`` is the image of host index x as a mask of positive
    elements of L; ``fibers`` lists preimages ordered by their image.
    """

    source: FiniteSemilattice
    subsemilattice: int
    assignment: tuple[int, ...]
    fibers: list[int] = field(default_factory=list)
    homomorphism: bool = True
    fiber_minima_in_L: bool = True

    def __call__(self, label: Hashable) -> frozenset:
        return self.source.labels_of(self.assignment[self.source.idx(label)])

    @property
    def image_size(self) -> int:
        return len(self.fibers)

    def fiber_labels(self) -> list[list]:
        return [self.source.sorted_labels(m) for m in self.fibers]


def _as_level_mask(K: FiniteSemilattice, L) -> int:
    if isinstance(L, int):
        return L
    m = 0
    for lab in L:
        if lab is INF:
            continue
        x = K.idx(lab)
        if x == K.zero:
            raise NotSubsemilattice("0 is not an element of the dual", (lab,))
        m |= 1 << x
    return m


def quotient_map(K: FiniteSemilattice, L) -> QuotientMap:
    """Dual map of the inclusion ``L <= DK``.  ``L`` is an iterable of
    labels (INF optional, always implied) or a mask of positive elements."""
    calc = _calc(K)
    Lm = _as_level_mask(K, L)
    if calc.closure(Lm) != Lm:
        raise NotSubsemilattice("not closed under the dual product",
                                tuple(K.sorted_labels(calc.closure(Lm) & ~Lm)[:1]))
    assignment = tuple(Lm & K.down[x] for x in range(K.n))
    fib = calc.fibers(Lm)
    hom = assignment[K.zero] == 0 and all(
        assignment[K.meet(x, y)] == assignment[x] & assignment[y]
        for x in range(K.n) for y in range(K.n)
    )
    minima_ok = True
    for image, fm in fib.items():
        lo = K.meet_all(fm)
        if not (fm >> lo) & 1:
            minima_ok = False
        elif lo != K.zero and not (Lm >> lo) & 1:
            minima_ok = False
        elif lo == K.zero and image != 0:
            minima_ok = False
    fibers = [fib[k] for k in sorted(fib, key=lambda m: (m.bit_count(), m))]
    return QuotientMap(K, Lm, assignment, fibers, hom, minima_ok)


@dataclass
class FiberCheck:
    ok: bool
    quotient: QuotientMap
    failing_fiber: list | None = None


def verify_fiber_constancy(f: BinaryFunction) -> FiberCheck:
    """f is constant on every fiber of the quotient induced by ``L(f)``."""
    led = compute_ledger(f)
    Q = quotient_map(f.host, led.final_mask)
    for fm in Q.fibers:
        v = f.ones & fm
        if v and v != fm:
            return FiberCheck(False, Q, f.host.sorted_labels(fm))
    return FiberCheck(True, Q)


@dataclass
class DiscretenessReport:
    """Exhaustive audit of ``s(f) = s(g) and f|M_f = g|M_f  =>  f = g``."""

    size: int
    functions: int
    classes: int
    max_class_size: int
    class_sizes: dict
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _discreteness_violations(entries: dict[tuple, list[tuple[int, int]]], limit: int = 10) -> list:
    """``entries`` maps signature -> [(f, M_f)]; returns violating pairs."""
    bad = []
    for members in entries.values():
        by_mask: dict[int, Counter] = {}
        for _, M in members:
            if M not in by_mask:
                by_mask[M] = Counter(g & M for g, _ in members)
        for f, M in members:
            if by_mask[M][f & M] != 1:
                g = next(g for g, _ in members if g != f and g & M == f & M)
                bad.append((f, g))
                if len(bad) >= limit:
                    return bad
    return bad


def verify_discreteness(K: FiniteSemilattice, max_exponent: int = 16, raise_on_failure: bool = False) -> DiscretenessReport:
    """Enumerate ``{0,1}^K``, bucket by signature and check that agreeing
    on ``M_f`` inside a bucket forces equality."""
    if K.n > max_exponent:
        raise SizeOverflow(f"2^{K.n} functions exceed the 2^{max_exponent} bound")
    calc = _calc(K)
    entries: dict[tuple, list] = defaultdict(list)
    for f in range(1 << K.n):
        lv = calc.levels(f)[:-1]
        s = tuple(m.bit_count() + 1 for m in lv)
        entries[s].append((f, calc.support(lv[-1])))
    bad = _discreteness_violations(entries)
    sizes = {s: len(v) for s, v in entries.items()}
    rep = DiscretenessReport(K.n, 1 << K.n, len(entries), max(sizes.values()), sizes,
                             [(_fmt_fn(K, f), _fmt_fn(K, g)) for f, g in bad])
    if bad and raise_on_failure:
        raise DiscretenessViolation("distinct functions share signature and support values",
                                    rep.violations[0])
    return rep


def _fmt_fn(K: FiniteSemilattice, f: int) -> str:
    return "".join(str((f >> i) & 1) for i in range(K.n))


@dataclass
class HostAudit:
    """Counts of violations of each property over all binary functions."""

    size: int
    functions: int
    dual_size: int
    missing_jump: int = 0
    late_stabilisation: int = 0
    fiber_violations: int = 0
    discreteness_violations: int = 0
    literal_support_violations: int = 0
    max_n: int = 0
    signatures: int = 0

    @property
    def ok(self) -> bool:
        return not (self.missing_jump or self.late_stabilisation
                    or self.fiber_violations or self.discreteness_violations)


def audit_host(K: FiniteSemilattice, check_literal_support: bool = False) -> HostAudit:
    """Run every binary-function property exhaustively on one host.

    With ``check_literal_support`` the discreteness check is repeated with
    ``M_f`` taken without the point 0, to count how often that variant
    fails.
    """
    calc = _calc(K)
    n = K.n
    audit = HostAudit(n, 1 << n, len(calc.positives) + 1)
    entries: dict[tuple, list] = defaultdict(list)
    literal: dict[tuple, list] = defaultdict(list)
    zero = K.zero
    down = K.down
    preds = K.pred_masks
    for f in range(1 << n):
        # jump existence
        if f and f != K.full:
            diff = (K.full & ~f) if (f >> zero) & 1 else f
            p = next(p for p in bits(diff) if down[p] & diff == 1 << p)
            if not calc.disagrees(f, p, preds[p]):
                audit.missing_jump += 1
        lv = calc.levels(f)[:-1]
        nf = len(lv) - 1
        audit.max_n = max(audit.max_n, nf)
        if nf > audit.dual_size:
            audit.late_stabilisation += 1
        L = lv[-1]
        for fm in calc.fibers(L).values():
            v = f & fm
            if v and v != fm:
                audit.fiber_violations += 1
                break
        s = tuple(m.bit_count() + 1 for m in lv)
        entries[s].append((f, calc.support(L)))
        if check_literal_support:
            literal[s].append((f, calc.literal_support(L)))
    audit.signatures = len(entries)
    audit.discreteness_violations = len(_discreteness_violations(entries, limit=1 << n))
    if check_literal_support:
        audit.literal_support_violations = len(_discreteness_violations(literal, limit=1 << n))
    return audit


# ---------------------------------------------------------------------------
# minimal quotient

MINIMALITY_BOUND = 8


def _set_partitions(items: list[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def meet_congruences(K: FiniteSemilattice, respect: int | None = None) -> list[list[int]]:
    """All meet-congruences of K as lists of class masks.

    With ``respect`` (a function mask) only congruences on whose classes
    that function is constant are returned; the search splits the two
    value classes first.
    """
    groups = [list(range(K.n))]
    if respect is not None:
        groups = [[x for x in range(K.n) if (respect >> x) & 1],
                  [x for x in range(K.n) if not (respect >> x) & 1]]
        groups = [g for g in groups if g]
    out = []

    def combine(gi, acc):
        if gi == len(groups):
            cls = [0] * K.n
            masks = []
            for k, block in enumerate(acc):
                m = 0
                for x in block:
                    cls[x] = k
                    m |= 1 << x
                masks.append(m)
            for a in range(K.n):
                for b in range(a + 1, K.n):
                    if cls[a] != cls[b]:
                        continue
                    ra, rb = K.meet_table[a], K.meet_table[b]
                    for c in range(K.n):
                        if cls[ra[c]] != cls[rb[c]]:
                            return
            out.append(sorted(masks))
            return
        for part in _set_partitions(groups[gi]):
            combine(gi + 1, acc + part)

    combine(0, [])
    return out


@dataclass
class MinimalityCertificate:
    status: str  # "minimal", "not-minimal" or "unchecked"
    quotient_size: int
    minimum_size: int | None = None
    congruences_checked: int = 0


def minimal_quotient(f: BinaryFunction) -> tuple[QuotientMap, MinimalityCertificate]:
    """Quotient by ``L(f)`` and a brute-force check that no meet-congruence
    with fewer classes has f constant on its classes (hosts up to
    ``MINIMALITY_BOUND`` elements; larger ones are marked unchecked)."""
    led = compute_ledger(f)
    Q = quotient_map(f.host, led.final_mask)
    if f.host.n > MINIMALITY_BOUND:
        return Q, MinimalityCertificate("unchecked", Q.image_size)
    congs = meet_congruences(f.host, respect=f.ones)
    best = min(len(c) for c in congs)
    status = "minimal" if best >= Q.image_size else "not-minimal"
    return Q, MinimalityCertificate(status, Q.image_size, best, len(congs))


# ---------------------------------------------------------------------------
# random hosts

DEFAULT_SIZE_CAP = 24


def random_semilattice(seed: int, size: int, cap: int = DEFAULT_SIZE_CAP,
                       density: float | None = None) -> FiniteSemilattice:
    """Seeded random finite semilattice.

    ``size`` points (one of them a forced minimum) receive a random partial
    order by random cover insertion; each point is then represented by its
    down-set and the family is closed under intersection, which is the
    meet-closure inside the ideal completion.  Labels are ``"0", "1", ...``
    in a linear extension.  The result may exceed ``size``; past ``cap`` it
    raises :class:`SizeOverflow`.
    """
    if size < 1:
        raise ValueError("size must be at least 1")
    rng = random.Random(seed)
    p = density if density is not None else rng.uniform(0.15, 0.55)
    n = size
    up = [1 << i for i in range(n)]
    for j in range(1, n):
        for i in range(1, j):
            if rng.random() < p:
                up[i] |= 1 << j
        up[0] |= 1 << j
    # close transitively (natural labelling: i < j only)
    for i in range(n - 1, -1, -1):
        m = up[i]
        for j in bits(m & ~(1 << i)):
            m |= up[j]
        up[i] = m
    downs = [sum(1 << i for i in range(n) if (up[i] >> j) & 1) for j in range(n)]
    family = set(downs)
    frontier = list(family)
    while frontier:
        new = []
        for a in frontier:
            for b in list(family):
                c = a & b
                if c not in family:
                    family.add(c)
                    new.append(c)
                    if len(family) > cap:
                        raise SizeOverflow(f"meet closure exceeds {cap} elements")
        frontier = new
    elems = sorted(family, key=lambda m: (m.bit_count(), m))
    pos = {m: i for i, m in enumerate(elems)}
    labels = [str(i) for i in range(len(elems))]
    table = [[labels[pos[a & b]] for b in elems] for a in elems]
    return validate_semilattice(labels, table, "0")
