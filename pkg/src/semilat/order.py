"""Finite meet-semilattices, distributive lattices, filters and convex sets.

Elements are opaque hashable labels with a canonical index (their position
in ``labels``); subsets are int bitmasks over those indices.  The order is
always derived from the meet table: ``x <= y`` iff ``meet(x, y) == x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Iterator, Sequence

from .errors import (
    NoMaximum,
    NoMeet,
    NoMinimum,
    NotAbsorptive,
    NotAssociative,
    NotCommutative,
    NotConvex,
    NotDistributive,
    NotIdempotent,
    NotPartialOrder,
    NotTotal,
    UnknownElement,
)


class _Infinity:
    """The artificial top of the dual semilattice, also the marker for an
    unbounded pair in :func:`sup_of_pair`."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
UNBOUNDED = INF


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


class FiniteSemilattice:
    """A certified finite meet-semilattice with minimum.

    Use :func:`validate_semilattice` or :func:`semilattice_from_covers` to
    build one; the constructor trusts its input.
    """

    def __init__(self, labels: Sequence[Hashable], meet: Sequence[Sequence[int]], zero: int):
        self.labels = tuple(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.meet_table = tuple(tuple(row) for row in meet)
        self.zero = zero
        n = len(self.labels)
        self.n = n
        self.full = (1 << n) - 1
        up = [0] * n
        down = [0] * n
        for x in range(n):
            row = self.meet_table[x]
            for y in range(n):
                if row[y] == x:
                    up[x] |= 1 << y
                    down[y] |= 1 << x
        self.up = tuple(up)
        self.down = tuple(down)
        preds = []
        for x in range(n):
            strict = down[x] & ~(1 << x)
            m = 0
            for y in bits(strict):
                if not (up[y] & strict & ~(1 << y)):
                    m |= 1 << y
            preds.append(m)
        self.pred_masks = tuple(preds)
        self._sup = None

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"{type(self).__name__}({list(self.labels)!r})"

    def __eq__(self, other):
        return (
            isinstance(other, FiniteSemilattice)
            and self.labels == other.labels
            and self.meet_table == other.meet_table
        )

    def __hash__(self):
        return hash((self.labels, self.meet_table))

    def idx(self, label: Hashable) -> int:
        try:
            return self.index[label]
        except (KeyError, TypeError):
            raise UnknownElement("unknown element", (label,)) from None

    def mask_of(self, labels: Iterable[Hashable]) -> int:
        return to_mask(self.idx(x) for x in labels)

    def labels_of(self, mask: int) -> frozenset:
        return frozenset(self.labels[i] for i in bits(mask))

    def sorted_labels(self, mask: int) -> list:
        return [self.labels[i] for i in bits(mask)]

    def meet(self, x: int, y: int) -> int:
        return self.meet_table[x][y]

    def leq(self, x: int, y: int) -> bool:
        return self.meet_table[x][y] == x

    def lt(self, x: int, y: int) -> bool:
        return x != y and self.meet_table[x][y] == x

    def meet_all(self, mask: int) -> int:
        """Meet of a nonempty set (by index mask)."""
        it = bits(mask)
        m = next(it)
        for x in it:
            m = self.meet_table[m][x]
        return m

    @property
    def sup_table(self) -> tuple:
        """``sup_table[x][y]`` is the least upper bound index or ``None``."""
        if self._sup is None:
            n = self.n
            table = []
            for x in range(n):
                row = []
                for y in range(n):
                    common = self.up[x] & self.up[y]
                    row.append(self.meet_all(common) if common else None)
                table.append(tuple(row))
            self._sup = tuple(table)
        return self._sup

    def is_upset(self, mask: int) -> bool:
        for x in bits(mask):
            if self.up[x] & ~mask:
                return False
        return True

    def is_filter_mask(self, mask: int) -> bool:
        """The filter condition: ``a, b in F`` and ``a ^ b <= x`` imply ``x in F``."""
        if not self.is_upset(mask):
            return False
        members = list(bits(mask))
        for k, a in enumerate(members):
            row = self.meet_table[a]
            for b in members[k + 1:]:
                if not (mask >> row[b]) & 1:
                    return False
        return True


class FiniteDistributiveLattice(FiniteSemilattice):
    """A certified finite distributive lattice (see :func:`validate_lattice`)."""

    def __init__(self, labels, meet, zero, join, one):
        super().__init__(labels, meet, zero)
        self.join_table = tuple(tuple(row) for row in join)
        self.one = one

    @property
    def base(self) -> FiniteSemilattice:
        return FiniteSemilattice(self.labels, self.meet_table, self.zero)

    def join(self, x: int, y: int) -> int:
        return self.join_table[x][y]

    def join_all(self, mask: int) -> int:
        it = bits(mask)
        m = next(it)
        for x in it:
            m = self.join_table[m][x]
        return m

    def is_downset(self, mask: int) -> bool:
        for x in bits(mask):
            if self.down[x] & ~mask:
                return False
        return True

    def is_ideal_mask(self, mask: int) -> bool:
        if not self.is_downset(mask):
            return False
        members = list(bits(mask))
        for k, a in enumerate(members):
            row = self.join_table[a]
            for b in members[k + 1:]:
                if not (mask >> row[b]) & 1:
                    return False
        return True

    def interval_mask(self, a: int, b: int) -> int:
        """``[a, b] = {x : a ^ b <= x <= a v b}`` as a mask."""
        return self.up[self.meet_table[a][b]] & self.down[self.join_table[a][b]]


# ---------------------------------------------------------------------------
# construction and certification

def _check_semilattice_axioms(labels, table, zero):
    n = len(labels)
    for x in range(n):
        if table[x][x] != x:
            raise NotIdempotent("meet is not idempotent", (labels[x],))
    for x in range(n):
        for y in range(x + 1, n):
            if table[x][y] != table[y][x]:
                raise NotCommutative("meet is not commutative", (labels[x], labels[y]))
    for x in range(n):
        tx = table[x]
        for y in range(n):
            xy = tx[y]
            ty = table[y]
            txy = table[xy]
            for z in range(n):
                if txy[z] != tx[ty[z]]:
                    raise NotAssociative(
                        "meet is not associative", (labels[x], labels[y], labels[z])
                    )
    for x in range(n):
        if table[zero][x] != zero:
            raise NoMinimum("zero is not below every element", (labels[zero], labels[x]))


def validate_semilattice(
    labels: Sequence[Hashable],
    meet: Sequence[Sequence[Hashable]],
    zero: Hashable | None = None,
) -> FiniteSemilattice:
    """Certify a meet table given over element labels.

    ``meet[i][j]`` is the label of ``labels[i] ^ labels[j]``.  When ``zero``
    is omitted the minimum is searched for.  Every axiom is checked
    exhaustively; the first failure raises with its witnessing tuple.
    """
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise NotTotal("duplicate element labels")
    if not labels:
        raise NoMinimum("empty element set")
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    if len(meet) != n or any(len(row) != n for row in meet):
        raise NotTotal("meet table is not n x n")
    table = []
    for i, row in enumerate(meet):
        out = []
        for j, v in enumerate(row):
            if v not in index:
                raise NotTotal("meet value outside element set", (labels[i], labels[j], v))
            out.append(index[v])
        table.append(out)
    if zero is None:
        for z in range(n):
            if all(table[z][x] == z for x in range(n)):
                zi = z
                break
        else:
            # still run the other checks first so the most specific error wins
            _check_semilattice_axioms(labels, table, 0)
            raise NoMinimum("no element is below every element")
    else:
        if zero not in index:
            raise UnknownElement("unknown zero", (zero,))
        zi = index[zero]
    _check_semilattice_axioms(labels, table, zi)
    return FiniteSemilattice(labels, table, zi)


def _order_from_covers(labels, covers):
    """Reflexive-transitive closure of the cover pairs as up-masks."""
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    up = [1 << i for i in range(n)]
    for lo, hi in covers:
        if lo not in index:
            raise UnknownElement("unknown element in cover", (lo,))
        if hi not in index:
            raise UnknownElement("unknown element in cover", (hi,))
        up[index[lo]] |= 1 << index[hi]
    changed = True
    while changed:
        changed = False
        for x in range(n):
            m = up[x]
            for y in bits(m & ~(1 << x)):
                m |= up[y]
            if m != up[x]:
                up[x] = m
                changed = True
    for x in range(n):
        for y in bits(up[x] & ~(1 << x)):
            if (up[y] >> x) & 1:
                raise NotPartialOrder("cover relation has a cycle", (labels[x], labels[y]))
    down = [0] * n
    for x in range(n):
        for y in bits(up[x]):
            down[y] |= 1 << x
    return up, down


def semilattice_from_covers(
    labels: Sequence[Hashable], covers: Iterable[tuple[Hashable, Hashable]]
) -> FiniteSemilattice:
    """Build the meet table from a covering (Hasse) relation, then certify it."""
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise NotTotal("duplicate element labels")
    up, down = _order_from_covers(labels, list(covers))
    n = len(labels)
    table = []
    for x in range(n):
        row = []
        for y in range(n):
            lower = down[x] & down[y]
            for m in bits(lower):
                if lower & ~down[m] == 0:
                    row.append(labels[m])
                    break
            else:
                raise NoMeet("pair has no greatest lower bound", (labels[x], labels[y]))
        table.append(row)
    return validate_semilattice(labels, table)


def validate_lattice(
    base: FiniteSemilattice, join: Sequence[Sequence[Hashable]] | None = None
) -> FiniteDistributiveLattice:
    """Certify ``base`` as a distributive lattice.

    The join is the least upper bound computed from the order unless an
    explicit table is supplied, in which case it is checked against the
    axioms (not against the order).
    """
    n = base.n
    labels = base.labels
    if join is None:
        sup = base.sup_table
        for x in range(n):
            for y in range(n):
                if sup[x][y] is None:
                    raise NoMaximum("pair has no upper bound", (labels[x], labels[y]))
        jt = [list(r) for r in sup]
    else:
        if len(join) != n or any(len(r) != n for r in join):
            raise NotTotal("join table is not n x n")
        jt = []
        for i, row in enumerate(join):
            out = []
            for j, v in enumerate(row):
                if v not in base.index:
                    raise NotTotal("join value outside element set", (labels[i], labels[j], v))
                out.append(base.index[v])
            jt.append(out)
    mt = base.meet_table
    for x in range(n):
        if jt[x][x] != x:
            raise NotIdempotent("join is not idempotent", (labels[x],))
        for y in range(x + 1, n):
            if jt[x][y] != jt[y][x]:
                raise NotCommutative("join is not commutative", (labels[x], labels[y]))
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if jt[jt[x][y]][z] != jt[x][jt[y][z]]:
                    raise NotAssociative(
                        "join is not associative", (labels[x], labels[y], labels[z])
                    )
    for x in range(n):
        for y in range(n):
            if mt[x][jt[x][y]] != x or jt[x][mt[x][y]] != x:
                raise NotAbsorptive("absorption fails", (labels[x], labels[y]))
    for a in range(n):
        for b in range(n):
            ab = jt[a][b]
            for c in range(n):
                if mt[ab][c] != jt[mt[a][c]][mt[b][c]]:
                    raise NotDistributive(
                        "distributivity fails", (labels[a], labels[b], labels[c])
                    )
    one = None
    for x in range(n):
        if base.up[x] == 1 << x and base.down[x] == base.full:
            one = x
    if one is None:
        raise NoMaximum("no maximum element")
    return FiniteDistributiveLattice(labels, mt, base.zero, jt, one)


def lattice_from_covers(labels, covers) -> FiniteDistributiveLattice:
    return validate_lattice(semilattice_from_covers(labels, covers))


def chain(k: int, labels: Sequence[Hashable] | None = None) -> FiniteDistributiveLattice:
    """The k-element chain 0 < 1 < ... < k-1."""
    labels = tuple(range(k)) if labels is None else tuple(labels)
    meet = [[min(i, j) for j in range(k)] for i in range(k)]
    join = [[max(i, j) for j in range(k)] for i in range(k)]
    return FiniteDistributiveLattice(labels, meet, 0, join, k - 1)


# ---------------------------------------------------------------------------
# elementary operations (label based)

def immediate_predecessors(K: FiniteSemilattice, p: Hashable) -> frozenset:
    """All x with x < p and nothing strictly between."""
    return K.labels_of(K.pred_masks[K.idx(p)])


def sup_of_pair(K: FiniteSemilattice, p: Hashable, q: Hashable):
    """Least common upper bound of ``p`` and ``q`` or :data:`UNBOUNDED`.

    Upper-bound sets are meet-closed, so a nonempty one has a minimum.
    """
    s = K.sup_table[K.idx(p)][K.idx(q)]
    return UNBOUNDED if s is None else K.labels[s]


def sup_of_set(K: FiniteSemilattice, mask: int) -> int | None:
    """Index of ``sup`` of a subset (``sup of the empty set`` is 0)."""
    common = K.full
    for x in bits(mask):
        common &= K.up[x]
    return K.meet_all(common) if common else None


def is_compact_element(K: FiniteSemilattice, p: Hashable, max_down: int = 16) -> bool:
    """Literal compactness test.

    Every subset A with ``sup A == p`` must contain a finite A0 with the
    same supremum.  Only subsets of the down-set of p can have supremum p.
    Each such A is scanned for a sup-irredundant A0 of least size; in a
    finite semilattice one always exists (A itself is finite), so the
    enumeration is capped at ``max_down`` elements below p.
    """
    pi = K.idx(p)
    below = K.down[pi]
    if below.bit_count() > max_down:
        return True
    members = list(bits(below))
    for r in range(len(members) + 1):
        for subset in combinations(members, r):
            A = to_mask(subset)
            if sup_of_set(K, A) != pi:
                continue
            if _finite_witness(K, A, pi) is None:
                return False
    return True


def _finite_witness(K, A, target):
    elems = list(bits(A))
    for r in range(len(elems) + 1):
        for sub in combinations(elems, r):
            if sup_of_set(K, to_mask(sub)) == target:
                return sub
    return None


def join_irreducibles(L: FiniteDistributiveLattice) -> frozenset:
    """Nonzero elements with exactly one lower cover."""
    return frozenset(
        L.labels[x] for x in range(L.n) if x != L.zero and L.pred_masks[x].bit_count() == 1
    )


# ---------------------------------------------------------------------------
# filters

@dataclass(frozen=True)
class FilterObject:
    """A subset certified as a filter of ``host``.

    ``vertex`` is the index p when the filter equals ``[p, ->)``; ``prime``
    is None when the host is not a lattice.  Every filter is clopen in the
    discrete finite topology.
    """

    host: FiniteSemilattice
    members: int
    vertex: int | None = None
    prime: bool | None = None

    clopen = True

    @property
    def is_principal(self) -> bool:
        return self.vertex is not None

    @property
    def elements(self) -> frozenset:
        return self.host.labels_of(self.members)

    def __contains__(self, label):
        return bool((self.members >> self.host.idx(label)) & 1)

    def __len__(self):
        return self.members.bit_count()

    def __repr__(self):
        return f"FilterObject({sorted(map(str, self.elements))})"


def is_filter(K: FiniteSemilattice, members: Iterable[Hashable]) -> bool:
    return K.is_filter_mask(K.mask_of(members))


def is_prime_mask(L: FiniteDistributiveLattice, mask: int) -> bool:
    if mask == 0 or mask == L.full:
        return False
    return L.is_filter_mask(mask) and L.is_ideal_mask(L.full & ~mask)


def is_prime_filter(L: FiniteDistributiveLattice, F: Iterable[Hashable]) -> bool:
    """Nonempty filter whose complement is a nonempty ideal."""
    return is_prime_mask(L, L.mask_of(F))


def make_filter(K: FiniteSemilattice, mask: int) -> FilterObject:
    vertex = None
    if mask:
        v = K.meet_all(mask)
        if K.up[v] == mask:
            vertex = v
    prime = is_prime_mask(K, mask) if isinstance(K, FiniteDistributiveLattice) else None
    return FilterObject(K, mask, vertex, prime)


def principal_filter(K: FiniteSemilattice, p: Hashable) -> FilterObject:
    return make_filter(K, K.up[K.idx(p)])


BRUTE_FORCE_LIMIT = 12


def _filter_masks_bruteforce(K: FiniteSemilattice) -> list[int]:
    return [m for m in range(1 << K.n) if K.is_filter_mask(m)]


def _filter_masks_generated(K: FiniteSemilattice) -> list[int]:
    # a nonempty finite filter contains the meet of its members, so it is
    # generated by that single element
    out = {0}
    for x in range(K.n):
        if K.is_filter_mask(K.up[x]):
            out.add(K.up[x])
    return list(out)


def enumerate_filters(K: FiniteSemilattice, method: str = "auto") -> list[FilterObject]:
    """Every filter of K, the empty one included.

    ``method`` is ``"brute"`` (check every subset), ``"generated"`` (close
    each element upward and keep the filters) or ``"auto"`` (brute force up
    to ``BRUTE_FORCE_LIMIT`` elements).  Ordered by size, then by mask.
    """
    if method == "auto":
        method = "brute" if K.n <= BRUTE_FORCE_LIMIT else "generated"
    if method == "brute":
        masks = _filter_masks_bruteforce(K)
    elif method == "generated":
        masks = _filter_masks_generated(K)
    else:
        raise ValueError(f"unknown method {method!r}")
    masks.sort(key=lambda m: (m.bit_count(), m))
    return [make_filter(K, m) for m in masks]


def prime_filters(L: FiniteDistributiveLattice) -> list[FilterObject]:
    return [F for F in enumerate_filters(L) if F.prime]


# ---------------------------------------------------------------------------
# convex sets

@dataclass(frozen=True)
class ConvexSet:
    """``members = ideal & filter`` with ``ideal`` a lattice ideal and
    ``filter`` a lattice filter (either may be the whole lattice)."""

    host: FiniteDistributiveLattice
    members: int
    ideal: int
    filter: int

    @property
    def elements(self) -> frozenset:
        return self.host.labels_of(self.members)

    def __len__(self):
        return self.members.bit_count()

    @property
    def bottom(self) -> int:
        return self.host.meet_all(self.members)

    @property
    def top(self) -> int:
        return self.host.join_all(self.members)


def convex_set(L: FiniteDistributiveLattice, mask: int) -> ConvexSet:
    """Certify ``mask`` as convex; nonempty convex sets are intervals
    ``{x : lo <= x <= hi}`` with witness ``(down(hi), up(lo))``."""
    if mask == 0:
        return ConvexSet(L, 0, L.full, 0)
    lo = L.meet_all(mask)
    hi = L.join_all(mask)
    ideal, filt = L.down[hi], L.up[lo]
    if ideal & filt != mask:
        missing = (ideal & filt) & ~mask
        raise NotConvex("set is not an ideal-filter intersection",
                        tuple(L.sorted_labels(missing)[:1]))
    return ConvexSet(L, mask, ideal, filt)


def convex_from_labels(L: FiniteDistributiveLattice, labels: Iterable[Hashable]) -> ConvexSet:
    return convex_set(L, L.mask_of(labels))


def interval(L: FiniteDistributiveLattice, a: Hashable, b: Hashable) -> ConvexSet:
    """``[a, b] = {x : a ^ b <= x <= a v b}``, the least convex set holding a and b."""
    ai, bi = L.idx(a), L.idx(b)
    lo, hi = L.meet_table[ai][bi], L.join_table[ai][bi]
    return ConvexSet(L, L.up[lo] & L.down[hi], L.down[hi], L.up[lo])
